//! Gap opening, Cantor-spectrum iteration, block concatenation and
//! Hausdorff cover sums.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::floquet::{band_spectrum, BandSpectrum};
use crate::potentials::PeriodicPotential;

/// Default threshold below which a gap counts as closed.
pub const GAP_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub open_gaps: usize,
    pub closed_gaps: usize,
    /// Smallest open gap; absent when no gap is open.
    pub min_gap_size: Option<f64>,
    pub perturbation_t: Option<usize>,
    pub perturbation_size: f64,
}

impl GapReport {
    pub fn all_open(&self) -> bool {
        self.closed_gaps == 0
    }
}

pub fn analyze_gaps(p: &PeriodicPotential, tol: f64) -> Result<GapReport> {
    let spectrum = band_spectrum(p, tol)?;
    Ok(report_for(&spectrum, p.period(), tol))
}

fn report_for(spectrum: &BandSpectrum, period: usize, tol: f64) -> GapReport {
    let sizes: Vec<f64> = spectrum.gaps().iter().map(|g| g[1] - g[0]).collect();
    let open: Vec<f64> = sizes.iter().copied().filter(|&s| s > tol).collect();
    GapReport {
        open_gaps: open.len(),
        closed_gaps: period - 1 - open.len(),
        min_gap_size: open.iter().copied().reduce(f64::min),
        perturbation_t: None,
        perturbation_size: 0.0,
    }
}

/// Opens every gap by adding `t/M` at the last site of the period, for the
/// smallest `t` in `1..=2p+1` that works. `M` is the smallest integer with
/// `(2p+1)/M < epsilon`. An input whose gaps are already open is returned
/// unchanged.
pub fn open_all_gaps(
    p: &PeriodicPotential,
    epsilon: f64,
    tol: f64,
) -> Result<(PeriodicPotential, GapReport)> {
    if !(epsilon > 0.0) {
        return Err(Error::Value(format!("epsilon = {epsilon} must be positive")));
    }
    let report = analyze_gaps(p, tol)?;
    if report.all_open() {
        return Ok((p.clone(), report));
    }
    let n = p.period();
    let tries = 2 * n + 1;
    let m = (tries as f64 / epsilon).floor() + 1.0;
    let last = n - 1;
    for t in 1..=tries {
        let mut values = p.values().to_vec();
        let shift = t as f64 / m;
        values[last] += shift;
        let candidate = PeriodicPotential::new(values)?;
        let mut report = analyze_gaps(&candidate, tol)?;
        if report.all_open() {
            report.perturbation_t = Some(t);
            report.perturbation_size = shift;
            return Ok((candidate, report));
        }
    }
    Err(Error::Exhausted { tried: tries, tol })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CantorIterationState {
    pub stage: usize,
    pub period: usize,
    pub f_k: PeriodicPotential,
    /// The perturbation added at this stage, `f_k - f_(k-1)`.
    pub s_k: PeriodicPotential,
    /// `|s_1|, ..., |s_k|`.
    pub s_norms: Vec<f64>,
    /// Smallest open gap of `f_0, ..., f_(k-1)`; absent when none had one.
    pub beta_k: Option<f64>,
    /// `min(epsilon / 2^k, beta_k / (3 2^k))`.
    pub budget: f64,
    pub min_gap: Option<f64>,
}

/// Runs `stages` steps of gap opening over the period `basis`. Stage `k`
/// lifts `f_(k-1)` to period `basis[k-1]` and opens all its gaps with a
/// perturbation below the stage budget.
pub fn cantor_iterate(
    f0: &PeriodicPotential,
    basis: &[usize],
    epsilon: f64,
    stages: usize,
    tol: f64,
) -> Result<Vec<CantorIterationState>> {
    if stages == 0 || stages > basis.len() {
        return Err(Error::Value(format!(
            "stages = {stages} must lie in 1..={}",
            basis.len()
        )));
    }
    if !(epsilon > 0.0) {
        return Err(Error::Value(format!("epsilon = {epsilon} must be positive")));
    }
    let mut previous = f0.period();
    for &q in basis {
        if q == 0 || q % previous != 0 {
            return Err(Error::Divisibility(previous.to_string(), q.to_string()));
        }
        previous = q;
    }
    let mut beta = analyze_gaps(f0, tol)?.min_gap_size;
    let mut current = f0.clone();
    let mut norms = Vec::with_capacity(stages);
    let mut trail = Vec::with_capacity(stages);
    for k in 1..=stages {
        let scale = 0.5f64.powi(k as i32);
        let budget = match beta {
            Some(b) => (epsilon * scale).min(b * scale / 3.0),
            None => epsilon * scale,
        };
        let lifted = current.lift(basis[k - 1])?;
        let (next, report) = open_all_gaps(&lifted, budget, tol).map_err(|e| Error::Stage {
            stage: k,
            reason: e.to_string(),
        })?;
        let s_k = PeriodicPotential::new(
            next.values()
                .iter()
                .zip(lifted.values())
                .map(|(a, b)| a - b)
                .collect(),
        )?;
        let norm = s_k.sup_norm();
        if !(norm < budget) {
            return Err(Error::Stage {
                stage: k,
                reason: format!("perturbation {norm} is not below budget {budget}"),
            });
        }
        norms.push(norm);
        trail.push(CantorIterationState {
            stage: k,
            period: next.period(),
            f_k: next.clone(),
            s_k,
            s_norms: norms.clone(),
            beta_k: beta,
            budget,
            min_gap: report.min_gap_size,
        });
        beta = match (beta, report.min_gap_size) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        current = next;
    }
    Ok(trail)
}

/// Largest fraction of the gap `(a, b)` left free of `spectrum`.
pub fn retained_fraction(gap: [f64; 2], spectrum: &BandSpectrum) -> f64 {
    let width = gap[1] - gap[0];
    if !(width > 0.0) {
        return 0.0;
    }
    let mut cursor = gap[0];
    let mut free = 0.0f64;
    for b in spectrum.bands() {
        if b[1] <= gap[0] || b[0] >= gap[1] {
            continue;
        }
        free = free.max(b[0] - cursor);
        cursor = cursor.max(b[1]);
    }
    free = free.max(gap[1] - cursor);
    free.max(0.0) / width
}

/// Index arithmetic of a block concatenation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockLayout {
    /// Common period `n_k` of the family.
    pub block: usize,
    /// Target period `n_K`.
    pub period: usize,
    pub r: usize,
    pub d: usize,
    /// Block boundaries `0 = j_0 < j_1 < ... < j_m = n_K / n_k`.
    pub breakpoints: Vec<usize>,
    /// Perturbed blocks as `(j, member)`, member 0-based.
    pub perturbed: Vec<(usize, usize)>,
    /// `r^-N`.
    pub step: f64,
}

impl BlockLayout {
    /// The family member (0-based) used on block `j`.
    pub fn member_of_block(&self, j: usize) -> usize {
        self.breakpoints[1..]
            .iter()
            .position(|&b| j < b)
            .expect("block inside the period")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockConcatenation {
    pub potential: PeriodicPotential,
    pub layout: BlockLayout,
    /// `r^-N (r - 1)`: the sup-norm spread over all `t` vectors.
    pub diameter: f64,
    /// `n_K^(-N/2)`.
    pub diameter_bound: f64,
    /// `r >= n_K^((1 - 2/N)/2)`, the regime where the bound is claimed.
    pub diameter_regime: bool,
}

impl BlockConcatenation {
    pub fn diameter_within_bound(&self) -> bool {
        self.diameter <= self.diameter_bound
    }
}

/// Concatenates blocks of the family members over one period `n_K`.
///
/// With `n_K = m n_k r + d`, member `i` fills `r + 1` consecutive blocks of
/// length `n_k` for `i < d / n_k` and `r` blocks otherwise. Block
/// `j_i - 1` is raised by `r^-N t_i` for `i < m`, and block `j_m - 2` by
/// `r^-N t_m`.
pub fn block_concatenate(
    family: &[PeriodicPotential],
    n_big: usize,
    n_exp: u32,
    t: &[usize],
) -> Result<BlockConcatenation> {
    let m = family.len();
    if m == 0 {
        return Err(Error::Partition("family is empty".into()));
    }
    let nk = family[0].period();
    if let Some(f) = family.iter().find(|f| f.period() != nk) {
        return Err(Error::Partition(format!(
            "member period {} differs from {nk}",
            f.period()
        )));
    }
    if n_exp < 2 {
        return Err(Error::Value(format!("N = {n_exp} must be at least 2")));
    }
    if t.len() != m {
        return Err(Error::Partition(format!("{} t values for {m} members", t.len())));
    }
    if n_big % nk != 0 {
        return Err(Error::Divisibility(nk.to_string(), n_big.to_string()));
    }
    let r = n_big / (m * nk);
    let d = n_big - m * nk * r;
    if r < 2 {
        return Err(Error::Partition(format!(
            "n_K = {n_big} gives r = {r}; need n_K >= 2 m n_k = {}",
            2 * m * nk
        )));
    }
    if let Some(bad) = t.iter().find(|&&x| x >= r) {
        return Err(Error::Partition(format!("t = {bad} is not below r = {r}")));
    }
    let extra = d / nk;
    let mut breakpoints = vec![0usize];
    for i in 0..m - 1 {
        let last = *breakpoints.last().expect("nonempty");
        breakpoints.push(last + if i < extra { r + 1 } else { r });
    }
    breakpoints.push(n_big / nk);
    let final_len = breakpoints[m] - breakpoints[m - 1];
    if final_len < 2 {
        return Err(Error::Partition(format!("last segment has {final_len} blocks")));
    }
    let mut perturbed: Vec<(usize, usize)> = (1..m).map(|i| (breakpoints[i] - 1, i - 1)).collect();
    perturbed.push((breakpoints[m] - 2, m - 1));
    let step = (r as f64).powi(-(n_exp as i32));
    let layout = BlockLayout {
        block: nk,
        period: n_big,
        r,
        d,
        breakpoints,
        perturbed,
        step,
    };
    let mut values: Vec<f64> = (0..n_big)
        .map(|l| family[layout.member_of_block(l / nk)].values()[l % nk])
        .collect();
    for &(j, i) in &layout.perturbed {
        for v in &mut values[j * nk..(j + 1) * nk] {
            *v += step * t[i] as f64;
        }
    }
    let diameter = step * (r as f64 - 1.0);
    let nb = n_big as f64;
    Ok(BlockConcatenation {
        potential: PeriodicPotential::new(values)?,
        diameter,
        diameter_bound: nb.powf(-(n_exp as f64) / 2.0),
        diameter_regime: r as f64 >= nb.powf(0.5 * (1.0 - 2.0 / n_exp as f64)),
        layout,
    })
}

/// One level of an iterated block concatenation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CascadeLevel {
    pub period: usize,
    pub family: Vec<PeriodicPotential>,
}

/// Builds each level's family from the previous one, one member per `t`
/// vector.
pub fn block_cascade(
    base: &[PeriodicPotential],
    periods: &[usize],
    n_exp: u32,
    t_vectors: &[Vec<usize>],
) -> Result<Vec<CascadeLevel>> {
    if t_vectors.is_empty() {
        return Err(Error::Partition("no t vectors".into()));
    }
    let mut family = base.to_vec();
    let mut levels = Vec::with_capacity(periods.len());
    for &period in periods {
        let next: Vec<PeriodicPotential> = t_vectors
            .iter()
            .map(|t| block_concatenate(&family, period, n_exp, t).map(|b| b.potential))
            .collect::<Result<_>>()?;
        levels.push(CascadeLevel {
            period,
            family: next.clone(),
        });
        family = next;
    }
    Ok(levels)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverSum {
    pub alpha: f64,
    pub level: usize,
    pub sum: f64,
    pub interval_count: usize,
    pub inflation: f64,
}

/// `sum_z (|b_z| + 2 inflation)^alpha` over each level's bands; levels are
/// numbered from 1.
pub fn hausdorff_cover_sums(levels: &[(BandSpectrum, f64)], alpha: f64) -> Result<Vec<CoverSum>> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Value(format!("alpha = {alpha} must lie in (0, 1]")));
    }
    levels
        .iter()
        .enumerate()
        .map(|(i, (spectrum, inflation))| {
            if !(*inflation >= 0.0) {
                return Err(Error::Value(format!("inflation {inflation} must be >= 0")));
            }
            Ok(CoverSum {
                alpha,
                level: i + 1,
                sum: spectrum
                    .bands()
                    .iter()
                    .map(|b| (b[1] - b[0] + 2.0 * inflation).powf(alpha))
                    .sum(),
                interval_count: spectrum.count(),
                inflation: *inflation,
            })
        })
        .collect()
}

/// Cover sums of `lambda f` for the first member of each cascade level,
/// with level `i` inflated by `lambda p_i^-i`.
pub fn cascade_cover_sums(levels: &[CascadeLevel], lambda: f64, alpha: f64) -> Result<Vec<CoverSum>> {
    let spectra = levels
        .iter()
        .enumerate()
        .map(|(i, level)| {
            let spectrum = band_spectrum(&level.family[0].scaled(lambda), GAP_TOL)?;
            let inflation = lambda.abs() * (level.period as f64).powi(-(i as i32 + 1));
            Ok((spectrum, inflation))
        })
        .collect::<Result<Vec<_>>>()?;
    hausdorff_cover_sums(&spectra, alpha)
}
