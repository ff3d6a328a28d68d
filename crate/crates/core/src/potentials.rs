//! Periodic and limit-periodic potentials.
//!
//! A limit-periodic potential is stored as a finite series of periodic
//! terms whose periods form a divisibility chain, plus a sup-norm bound on
//! the omitted tail. The distal and Pöschel constructions are rational, so
//! their terms are kept exact and only converted to `f64` on evaluation.

use std::f64::consts::TAU;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::procyclic::{mod_floor, FrequencyIntegerSet};

/// Anything that assigns a real value to every site of `Z`.
pub trait Potential {
    fn value(&self, n: i64) -> f64;
}

impl<F: Fn(i64) -> f64> Potential for F {
    fn value(&self, n: i64) -> f64 {
        self(n)
    }
}

/// A `p`-periodic potential given by its values on `0..p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PeriodicPotential {
    values: Vec<f64>,
}

impl PeriodicPotential {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Value("periodic potential needs at least one value".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Value(format!("non-finite potential value {v}")));
        }
        Ok(Self { values })
    }

    /// The constant potential `c` with period `p`.
    pub fn constant(c: f64, period: usize) -> Self {
        Self {
            values: vec![c; period.max(1)],
        }
    }

    pub fn period(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// The same sequence viewed with period `period`, which must be a
    /// multiple of the current one.
    pub fn lift(&self, period: usize) -> Result<Self> {
        if period == 0 || period % self.period() != 0 {
            return Err(Error::Divisibility(self.period().to_string(), period.to_string()));
        }
        Ok(Self {
            values: (0..period).map(|i| self.values[i % self.period()]).collect(),
        })
    }

    /// `n -> V(n + shift)`.
    pub fn rotate(&self, shift: i64) -> Self {
        Self {
            values: (0..self.period() as i64).map(|n| self.value(n + shift)).collect(),
        }
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * lambda).collect(),
        }
    }

    /// Sup-norm distance; both potentials are lifted to a common period.
    pub fn distance(&self, other: &Self) -> f64 {
        let p = self.period().lcm(&other.period());
        (0..p as i64)
            .map(|n| (self.value(n) - other.value(n)).abs())
            .fold(0.0, f64::max)
    }
}

impl Potential for PeriodicPotential {
    fn value(&self, n: i64) -> f64 {
        self.values[n.rem_euclid(self.values.len() as i64) as usize]
    }
}

impl TryFrom<Vec<f64>> for PeriodicPotential {
    type Error = Error;
    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<PeriodicPotential> for Vec<f64> {
    fn from(p: PeriodicPotential) -> Self {
        p.values
    }
}

/// One periodic term of a limit-periodic series.
#[derive(Clone, Debug, PartialEq)]
pub enum SeriesTerm {
    /// Tabulated values over one period.
    Table(PeriodicPotential),
    /// `n -> (n mod modulus) * scale`.
    Residue { modulus: BigUint, scale: BigRational },
    /// `n -> weight` if `start <= n mod modulus < end`, else 0.
    Indicator {
        modulus: BigUint,
        start: BigUint,
        end: BigUint,
        weight: BigRational,
    },
}

impl SeriesTerm {
    pub fn period(&self) -> BigUint {
        match self {
            SeriesTerm::Table(p) => BigUint::from(p.period()),
            SeriesTerm::Residue { modulus, .. } | SeriesTerm::Indicator { modulus, .. } => {
                modulus.clone()
            }
        }
    }

    pub fn exact_value(&self, n: i64) -> BigRational {
        match self {
            SeriesTerm::Table(p) => {
                BigRational::from_float(p.value(n)).expect("finite by construction")
            }
            SeriesTerm::Residue { modulus, scale } => {
                let r = residue(n, modulus);
                scale * BigRational::from_integer(BigInt::from(r))
            }
            SeriesTerm::Indicator {
                modulus,
                start,
                end,
                weight,
            } => {
                let r = residue(n, modulus);
                if &r >= start && &r < end {
                    weight.clone()
                } else {
                    BigRational::zero()
                }
            }
        }
    }

    pub fn sup_norm(&self) -> f64 {
        match self {
            SeriesTerm::Table(p) => p.sup_norm(),
            SeriesTerm::Residue { modulus, scale } => {
                let top = BigRational::from_integer(BigInt::from(modulus - 1u32));
                (top * scale.abs()).to_f64().unwrap_or(f64::INFINITY)
            }
            SeriesTerm::Indicator {
                start, end, weight, ..
            } => {
                if start < end {
                    weight.abs().to_f64().unwrap_or(f64::INFINITY)
                } else {
                    0.0
                }
            }
        }
    }

    fn scaled(&self, lambda: &BigRational) -> Self {
        match self {
            SeriesTerm::Table(p) => {
                SeriesTerm::Table(p.scaled(lambda.to_f64().expect("finite coupling")))
            }
            SeriesTerm::Residue { modulus, scale } => SeriesTerm::Residue {
                modulus: modulus.clone(),
                scale: scale * lambda,
            },
            SeriesTerm::Indicator {
                modulus,
                start,
                end,
                weight,
            } => SeriesTerm::Indicator {
                modulus: modulus.clone(),
                start: start.clone(),
                end: end.clone(),
                weight: weight * lambda,
            },
        }
    }
}

fn residue(n: i64, modulus: &BigUint) -> BigUint {
    match modulus.to_u64() {
        Some(m) => BigUint::from((n as i128).rem_euclid(m as i128) as u64),
        None => mod_floor(&BigInt::from(n), modulus),
    }
}

/// A finite truncation `sum_j P_j` of a limit-periodic series together with
/// a bound on the sup norm of everything left out.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitPeriodicPotential {
    terms: Vec<SeriesTerm>,
    tail_bound: f64,
}

impl LimitPeriodicPotential {
    pub fn new(terms: Vec<SeriesTerm>, tail_bound: f64) -> Result<Self> {
        if !(tail_bound >= 0.0) {
            return Err(Error::Value(format!("tail bound {tail_bound} must be >= 0")));
        }
        for pair in terms.windows(2) {
            let (a, b) = (pair[0].period(), pair[1].period());
            if !(&b % &a).is_zero() {
                return Err(Error::Series(format!("period {a} does not divide {b}")));
            }
        }
        Ok(Self { terms, tail_bound })
    }

    /// An exactly periodic potential as a one-term series.
    pub fn from_periodic(p: PeriodicPotential) -> Self {
        Self {
            terms: vec![SeriesTerm::Table(p)],
            tail_bound: 0.0,
        }
    }

    /// A series of tabulated periodic terms.
    pub fn from_tables(terms: Vec<PeriodicPotential>, tail_bound: f64) -> Result<Self> {
        Self::new(terms.into_iter().map(SeriesTerm::Table).collect(), tail_bound)
    }

    pub fn terms(&self) -> &[SeriesTerm] {
        &self.terms
    }

    pub fn depth(&self) -> usize {
        self.terms.len()
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Period of the partial sum of the first `depth` terms (1 when empty).
    pub fn period_at(&self, depth: usize) -> BigUint {
        match depth.min(self.depth()) {
            0 => BigUint::one(),
            d => self.terms[d - 1].period(),
        }
    }

    /// The sum of the first `depth` terms, with the dropped terms' sup norms
    /// added to the tail bound.
    pub fn truncate(&self, depth: usize) -> Self {
        let depth = depth.min(self.depth());
        let dropped: f64 = self.terms[depth..].iter().map(SeriesTerm::sup_norm).sum();
        Self {
            terms: self.terms[..depth].to_vec(),
            tail_bound: self.tail_bound + dropped,
        }
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        let exact = BigRational::from_float(lambda)
            .ok_or_else(|| Error::Value(format!("coupling {lambda} is not finite")))?;
        Ok(Self {
            terms: self.terms.iter().map(|t| t.scaled(&exact)).collect(),
            tail_bound: self.tail_bound * lambda.abs(),
        })
    }

    /// Exact value of the truncated series at site `n`.
    pub fn evaluate_exact(&self, n: i64) -> BigRational {
        self.terms
            .iter()
            .fold(BigRational::zero(), |acc, t| acc + t.exact_value(n))
    }

    /// Values on `lo..=hi` over a common denominator: returns numerators and
    /// the denominator.
    pub fn exact_window(&self, lo: i64, hi: i64) -> (Vec<BigInt>, BigInt) {
        let values: Vec<BigRational> = (lo..=hi).map(|n| self.evaluate_exact(n)).collect();
        let denom = values
            .iter()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let numers = values
            .iter()
            .map(|v| v.numer() * (&denom / v.denom()))
            .collect();
        (numers, denom)
    }

    /// The periodic approximant given by the first `depth` terms.
    pub fn approximant(&self, depth: usize) -> Result<PeriodicPotential> {
        let depth = depth.min(self.depth());
        let period = self.period_at(depth).to_usize().filter(|&p| p <= 1 << 24).ok_or_else(|| {
            Error::Value(format!(
                "approximant period {} too large to tabulate",
                self.period_at(depth)
            ))
        })?;
        let head = self.truncate(depth);
        PeriodicPotential::new((0..period as i64).map(|n| head.value(n)).collect())
    }
}

impl Potential for LimitPeriodicPotential {
    /// Evaluates the truncated series. Tabulated-only series are summed in
    /// `f64`; anything with exact terms is summed exactly and rounded once.
    fn value(&self, n: i64) -> f64 {
        if self.terms.iter().all(|t| matches!(t, SeriesTerm::Table(_))) {
            self.terms
                .iter()
                .map(|t| match t {
                    SeriesTerm::Table(p) => p.value(n),
                    _ => unreachable!(),
                })
                .sum()
        } else {
            self.evaluate_exact(n).to_f64().expect("bounded series")
        }
    }
}

/// Value of the truncated series at `n`. The ideal infinite series lies
/// within `tail_bound` of this.
pub fn evaluate(v: &LimitPeriodicPotential, n: i64) -> f64 {
    v.value(n)
}

fn two_pow_neg(k: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << k)
}

/// The potential `k -> dist(kE, 0)` in the hull metric: term `j` is
/// `2^-(j+1)` wherever `k` is nonzero modulo `n_j`.
pub fn hull_metric_potential(set: &FrequencyIntegerSet) -> LimitPeriodicPotential {
    let terms = set
        .levels()
        .iter()
        .enumerate()
        .map(|(i, n)| SeriesTerm::Indicator {
            modulus: n.clone(),
            start: BigUint::one(),
            end: n.clone(),
            weight: two_pow_neg(i + 2),
        })
        .collect();
    LimitPeriodicPotential {
        terms,
        tail_bound: 0.5f64.powi(set.depth() as i32),
    }
}

fn cube(n: &BigUint) -> BigUint {
    n * n * n
}

/// Greedy subchain with `n_k^3 <= n_(k+1) <= n_k^(3m)`, starting at the
/// first level and always taking the smallest admissible next level.
///
/// The walk stops cleanly when no level at least `n_k^3` remains. If larger
/// levels remain but all of them exceed `n_k^(3m)`, the chain violates
/// condition A at exponent `m` and the walk fails.
pub fn select_distal_subset(s_max: &FrequencyIntegerSet, m: u32) -> Result<FrequencyIntegerSet> {
    if m < 2 {
        return Err(Error::Value(format!("exponent m = {m} must be at least 2")));
    }
    let levels = s_max.levels();
    let mut chosen = vec![levels[0].clone()];
    loop {
        let current = chosen.last().expect("nonempty");
        let lo = cube(current);
        let hi = num_traits::pow(current.clone(), 3 * m as usize);
        let mut larger = levels.iter().filter(|n| **n >= lo).peekable();
        match larger.peek() {
            None => break,
            Some(next) if **next <= hi => chosen.push((*next).clone()),
            Some(next) => {
                return Err(Error::ConditionA(format!(
                    "no level in [{lo}, {hi}] after {current}; next is {next}"
                )))
            }
        }
    }
    if chosen.len() < 2 {
        return Err(Error::ConditionA(format!(
            "no level in [{}, {}] after {}",
            cube(&chosen[0]),
            num_traits::pow(chosen[0].clone(), 3 * m as usize),
            chosen[0]
        )));
    }
    FrequencyIntegerSet::new(chosen)
}

/// Checks `n_k^3 <= n_(k+1) <= n_k^(3m)` along the chain.
pub fn check_distal_growth(set: &FrequencyIntegerSet, m: u32) -> Result<()> {
    for pair in set.levels().windows(2) {
        let hi = num_traits::pow(pair[0].clone(), 3 * m as usize);
        if pair[1] < cube(&pair[0]) || pair[1] > hi {
            return Err(Error::GrowthCondition(pair[0].to_string(), pair[1].to_string()));
        }
    }
    Ok(())
}

/// The distal potential `V_i = sum_v (i mod n_v) / (n_(v-1)^2 n_v)` with
/// `n_0 = 1`.
pub fn distal_potential(set: &FrequencyIntegerSet, m: u32) -> Result<LimitPeriodicPotential> {
    check_distal_growth(set, m)?;
    let mut prev = BigUint::one();
    let mut terms = Vec::with_capacity(set.depth());
    for n in set.levels() {
        let denom = &prev * &prev * n;
        terms.push(SeriesTerm::Residue {
            modulus: n.clone(),
            scale: BigRational::new(BigInt::one(), BigInt::from(denom)),
        });
        prev = n.clone();
    }
    // sum_{v > K} n_(v-1)^-2 <= 2 n_K^-2 under the cubic growth.
    let top = set.top().to_f64().unwrap_or(f64::INFINITY);
    Ok(LimitPeriodicPotential {
        terms,
        tail_bound: 2.0 / (top * top),
    })
}

/// Lower bound `Q(|k|)^-1` on `inf_i |V_i - V_(i+k)|` for the distal
/// potential: `2 / (3 n_1^(3m+1))` below the first level, and
/// `(2/3) |k|^-(3m+1)` from there on.
pub fn distal_separation_bound(set: &FrequencyIntegerSet, m: u32, k: u64) -> BigRational {
    let exponent = 3 * m as usize + 1;
    let n1 = set.level(1);
    let base = if BigUint::from(k) < *n1 {
        BigInt::from(n1.clone())
    } else {
        BigInt::from(k)
    };
    BigRational::new(BigInt::from(2), BigInt::from(3) * num_traits::pow(base, exponent))
}

/// Pöschel's dyadic example in one dimension: `V_i = sum_v alpha_v(i) 2^-v`
/// where `alpha_v` indicates the lower half of each `2^v`-block for even `v`
/// and the upper half for odd `v`.
pub fn poschel_potential(depth: usize) -> Result<LimitPeriodicPotential> {
    if depth == 0 {
        return Err(Error::Value("Pöschel potential depth must be at least 1".into()));
    }
    let terms = (1..=depth)
        .map(|v| {
            let modulus = BigUint::one() << v;
            let half = BigUint::one() << (v - 1);
            let (start, end) = if v % 2 == 0 {
                (BigUint::zero(), half)
            } else {
                (half, modulus.clone())
            };
            SeriesTerm::Indicator {
                modulus,
                start,
                end,
                weight: two_pow_neg(v),
            }
        })
        .collect();
    Ok(LimitPeriodicPotential {
        terms,
        tail_bound: 0.5f64.powi(depth as i32),
    })
}

/// One Fourier-Bohr average.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyEntry {
    pub alpha: f64,
    pub amplitude_modulus: f64,
    pub window: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencySpectrumReport {
    pub entries: Vec<FrequencyEntry>,
}

impl FrequencySpectrumReport {
    /// Flags entries whose modulus exceeds `threshold`.
    pub fn above(&self, threshold: f64) -> Vec<bool> {
        self.entries
            .iter()
            .map(|e| e.amplitude_modulus > threshold)
            .collect()
    }
}

/// Finite-window Fourier-Bohr averages `|<V(k) e^(-2 pi i k alpha)>|` over
/// the symmetric window `-n..=n`.
///
/// The two endpoint sites carry half weight and the sum is divided by `2n`.
/// For `p`-periodic `V` with `n` a multiple of `p` this is exactly the
/// discrete Fourier coefficient at every `alpha = j/p`.
pub fn estimate_frequency_module(
    v: &impl Potential,
    alphas: &[f64],
    window: u64,
) -> Result<FrequencySpectrumReport> {
    if window == 0 {
        return Err(Error::Value("window must be at least 1".into()));
    }
    let n = window as i64;
    let samples: Vec<f64> = (-n..=n).map(|k| v.value(k)).collect();
    let entries = alphas
        .iter()
        .map(|&alpha| {
            let (mut re, mut im) = (0.0, 0.0);
            for (idx, &val) in samples.iter().enumerate() {
                let k = idx as i64 - n;
                let weight = if k == -n || k == n { 0.5 } else { 1.0 };
                // Reduce k*alpha mod 1 before the trig call.
                let phase = TAU * (k as f64 * alpha).rem_euclid(1.0);
                re += weight * val * phase.cos();
                im -= weight * val * phase.sin();
            }
            let norm = 2.0 * n as f64;
            FrequencyEntry {
                alpha,
                amplitude_modulus: (re / norm).hypot(im / norm),
                window,
            }
        })
        .collect();
    Ok(FrequencySpectrumReport { entries })
}

/// One scale of a Gordon certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GordonScale {
    pub q: u64,
    /// `max_{1 <= n <= q} |V(n) - V(n +- q)|`, rounded to `f64` for reporting.
    pub defect: f64,
    /// `k^-q` rounded to `f64`; may be 0 when it underflows binary64.
    pub bound: f64,
    /// `log2` of the bound, always finite.
    pub bound_log2: f64,
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GordonCertificate {
    pub precision_bits: u32,
    pub scales: Vec<GordonScale>,
}

impl GordonCertificate {
    pub fn valid(&self) -> bool {
        self.scales.iter().all(|s| s.passes)
    }
}

pub const DEFAULT_GORDON_PRECISION: u32 = 256;

/// `q_k = k p` for `k = 1..=count`.
pub fn period_multiples(period: u64, count: usize) -> Vec<u64> {
    (1..=count as u64).map(|k| k * period).collect()
}

/// Distinct term periods above 1 of a series, up to `count` of them.
pub fn series_scales(v: &LimitPeriodicPotential, count: usize) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    for t in v.terms() {
        if let Some(p) = t.period().to_u64() {
            if p > 1 && out.last().is_none_or(|&l| l < p) {
                out.push(p);
            }
        }
    }
    out.truncate(count);
    out
}

/// Certifies the Gordon condition at the given scales.
///
/// Site values are rounded to fixed point with `precision_bits` fractional
/// bits, so each defect is known to within one unit in the last place.
/// A bound `k^-q` below two units cannot be decided and raises a precision
/// error instead of comparing.
pub fn gordon_check(
    v: &LimitPeriodicPotential,
    scales: &[u64],
    precision_bits: u32,
) -> Result<GordonCertificate> {
    if scales.is_empty() || scales.windows(2).any(|w| w[0] >= w[1]) || scales[0] == 0 {
        return Err(Error::Value("scales must be nonempty, positive and strictly increasing".into()));
    }
    let one = BigInt::one() << precision_bits as usize;
    let fixed = |n: i64| -> BigInt {
        let x = v.evaluate_exact(n) * BigRational::from_integer(one.clone());
        x.round().to_integer()
    };
    let mut out = Vec::with_capacity(scales.len());
    for (idx, &q) in scales.iter().enumerate() {
        let k = idx as u64 + 1;
        let bound_log2 = -(q as f64) * (k as f64).log2() + 0.0;
        let k_pow = num_traits::pow(BigInt::from(k), q as usize);
        // Need k^q <= 2^(P-1) for the comparison to be decidable.
        if k_pow.bits() > precision_bits as u64 {
            return Err(Error::Precision {
                precision_bits,
                bound_inverse_bits: k_pow.bits(),
            });
        }
        let qi = q as i64;
        let mut worst = BigInt::zero();
        for n in 1..=qi {
            let here = fixed(n);
            for other in [fixed(n + qi), fixed(n - qi)] {
                let d = (&here - other).abs();
                if d > worst {
                    worst = d;
                }
            }
        }
        let passes = &worst * &k_pow <= one;
        let defect = BigRational::new(worst, one.clone()).to_f64().unwrap_or(f64::INFINITY);
        out.push(GordonScale {
            q,
            defect,
            bound: bound_log2.exp2(),
            bound_log2,
            passes,
        });
    }
    Ok(GordonCertificate {
        precision_bits,
        scales: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::procyclic::make_frequency_set;

    fn periodic(v: &[f64]) -> PeriodicPotential {
        PeriodicPotential::new(v.to_vec()).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let empty = LimitPeriodicPotential::new(vec![], 0.0).unwrap();
        assert_eq!(evaluate(&empty, 17), 0.0);
        let c = LimitPeriodicPotential::from_periodic(periodic(&[1.5]));
        assert_eq!(evaluate(&c, -3), 1.5);
        let v = LimitPeriodicPotential::from_tables(
            vec![periodic(&[0.0, 1.0]), periodic(&[0.0, 0.0, 0.0, 1.0])],
            0.0,
        )
        .unwrap();
        assert_eq!(evaluate(&v, 3), 2.0);
        assert_eq!(evaluate(&v, -1), 2.0);
    }

    #[test]
    fn series_rejects_broken_chain() {
        let bad = LimitPeriodicPotential::from_tables(
            vec![periodic(&[0.0, 1.0]), periodic(&[0.0, 0.0, 1.0])],
            0.0,
        );
        assert!(matches!(bad, Err(Error::Series(_))));
    }

    #[test]
    fn hull_metric_examples() {
        let v = hull_metric_potential(&make_frequency_set(&[2, 4]).unwrap());
        assert_eq!(evaluate(&v, 0), 0.0);
        assert_eq!(evaluate(&v, 1), 0.375);
        assert_eq!(evaluate(&v, 2), 0.125);
        assert_eq!(v.tail_bound(), 0.25);
    }

    #[test]
    fn distal_subset_examples() {
        let pow2 = make_frequency_set(&(1..=9).map(|e| 1u64 << e).collect::<Vec<_>>()).unwrap();
        assert_eq!(
            select_distal_subset(&pow2, 2).unwrap(),
            make_frequency_set(&[2, 8, 512]).unwrap()
        );
        assert!(matches!(
            select_distal_subset(&make_frequency_set(&[2, 4]).unwrap(), 2),
            Err(Error::ConditionA(_))
        ));
        let pow3 = make_frequency_set(&(1..=9).map(|e| 3u64.pow(e)).collect::<Vec<_>>()).unwrap();
        assert_eq!(
            select_distal_subset(&pow3, 2).unwrap(),
            make_frequency_set(&[3, 27, 19683]).unwrap()
        );
        // 2 -> nothing in [8, 64], but 128 exists: condition A fails at m = 2.
        let gap = make_frequency_set(&[2, 4, 128]).unwrap();
        assert!(matches!(select_distal_subset(&gap, 2), Err(Error::ConditionA(_))));
    }

    /// Brute force over all subchains starting at the first level.
    fn exhaustive_greedy(levels: &[u64], m: u32) -> Vec<u64> {
        let mut chain = vec![levels[0]];
        loop {
            let c = *chain.last().unwrap() as u128;
            let admissible: Vec<u64> = levels
                .iter()
                .copied()
                .filter(|&n| (n as u128) >= c.pow(3) && (n as u128) <= c.pow(3 * m))
                .collect();
            match admissible.iter().min() {
                Some(&n) => chain.push(n),
                None => return chain,
            }
        }
    }

    #[test]
    fn distal_subset_matches_search() {
        let levels: Vec<u64> = (1..=20).map(|e| 1u64 << e).collect();
        for m in 2..=4 {
            let got = select_distal_subset(&make_frequency_set(&levels).unwrap(), m).unwrap();
            let want = make_frequency_set(&exhaustive_greedy(&levels, m)).unwrap();
            assert_eq!(got, want, "m = {m}");
        }
    }

    #[test]
    fn distal_examples() {
        let s = make_frequency_set(&[2, 8, 512]).unwrap();
        let v = distal_potential(&s, 2).unwrap();
        assert_eq!(v.evaluate_exact(0), BigRational::zero());
        let expected = BigRational::new(1.into(), 2.into())
            + BigRational::new(1.into(), 32.into())
            + BigRational::new(1.into(), 32768.into());
        assert_eq!(v.evaluate_exact(1), expected);
        assert!(matches!(
            distal_potential(&make_frequency_set(&[2, 4]).unwrap(), 2),
            Err(Error::GrowthCondition(..))
        ));
    }

    #[test]
    fn distal_separation_on_window() {
        let s = make_frequency_set(&[2, 8, 512]).unwrap();
        let m = 2;
        let v = distal_potential(&s, m).unwrap();
        let (num, den) = v.exact_window(-1100, 1100);
        for k in 1..=100u64 {
            let bound = distal_separation_bound(&s, m, k);
            let worst = (0..num.len() - k as usize)
                .map(|i| (&num[i] - &num[i + k as usize]).abs())
                .min()
                .unwrap();
            assert!(BigRational::new(worst, den.clone()) >= bound, "k = {k}");
        }
    }

    #[test]
    fn poschel_examples() {
        let v = poschel_potential(12).unwrap();
        let t = v.terms();
        assert_eq!(t[0].exact_value(0), BigRational::zero());
        assert_eq!(t[1].exact_value(0), BigRational::new(1.into(), 4.into()));
        // Independent per-site indicator sum.
        let oracle = |i: i64| -> f64 {
            (1..=12)
                .filter(|&v| {
                    let r = i.rem_euclid(1 << v);
                    let h = 1 << (v - 1);
                    if v % 2 == 0 {
                        r < h
                    } else {
                        r >= h
                    }
                })
                .map(|v| 0.5f64.powi(v))
                .sum()
        };
        for i in -300..300 {
            assert_eq!(evaluate(&v, i), oracle(i));
        }
        assert!((evaluate(&v, 0) - 0.333_251_953_125).abs() < 1e-15);
    }

    #[test]
    fn truncation_consistency() {
        let chains: [&[u64]; 2] = [&[2, 4, 8, 16, 32], &[3, 6, 30, 60]];
        for chain in chains {
            let full = hull_metric_potential(&make_frequency_set(chain).unwrap());
            for k in 1..full.depth() {
                let a = full.truncate(k);
                let b = full.truncate(k + 1);
                let tail = hull_metric_potential(&make_frequency_set(&chain[..k]).unwrap()).tail_bound();
                for n in -200..200 {
                    assert!((a.value(n) - b.value(n)).abs() <= tail);
                }
            }
        }
        let p = poschel_potential(10).unwrap();
        for k in 1..10 {
            let tail = poschel_potential(k).unwrap().tail_bound();
            for n in 0..1024 {
                assert!((p.truncate(k).value(n) - p.truncate(k + 1).value(n)).abs() <= tail);
            }
        }
    }

    #[test]
    fn frequency_examples() {
        let c = periodic(&[0.7]);
        let r = estimate_frequency_module(&c, &[0.0, 0.5], 8).unwrap();
        assert!((r.entries[0].amplitude_modulus - 0.7).abs() < 1e-15);
        assert!(r.entries[1].amplitude_modulus <= 0.7 / 17.0);

        let cos = |k: i64| (TAU * k as f64 / 4.0).cos();
        let r = estimate_frequency_module(&cos, &[0.25], 16).unwrap();
        assert!((r.entries[0].amplitude_modulus - 0.5).abs() < 1e-12);
        assert_eq!(r.above(0.4), vec![true]);
        assert!(estimate_frequency_module(&c, &[0.0], 0).is_err());
    }

    /// Explicit DFT over one period.
    fn dft_modulus(values: &[f64], j: usize) -> f64 {
        let p = values.len() as f64;
        let (re, im) = values.iter().enumerate().fold((0.0, 0.0), |(re, im), (n, v)| {
            let ph = TAU * (j * n) as f64 / p;
            (re + v * ph.cos(), im - v * ph.sin())
        });
        (re / p).hypot(im / p)
    }

    #[test]
    fn frequency_matches_dft_and_vanishes_off_grid() {
        for p in 1..=16usize {
            let values: Vec<f64> = (0..p).map(|i| ((i * i * 7 + 3) % 11) as f64 / 5.0).collect();
            let v = periodic(&values);
            let window = 3 * p as u64;
            let on: Vec<f64> = (0..p).map(|j| j as f64 / p as f64).collect();
            let r = estimate_frequency_module(&v, &on, window).unwrap();
            for (j, e) in r.entries.iter().enumerate() {
                assert!((e.amplitude_modulus - dft_modulus(&values, j)).abs() < 1e-12);
            }
            // Frequencies on the window grid m/(2n) that are not multiples of 1/p.
            let off: Vec<f64> = (0..2 * window)
                .filter(|m| (m * p as u64) % (2 * window) != 0)
                .map(|m| m as f64 / (2 * window) as f64)
                .collect();
            let r = estimate_frequency_module(&v, &off, window).unwrap();
            assert!(r.entries.iter().all(|e| e.amplitude_modulus < 1e-12), "p = {p}");
        }
    }

    #[test]
    fn gordon_periodic_is_exact() {
        let v = LimitPeriodicPotential::from_periodic(periodic(&[0.3, -1.2, 0.7]));
        let cert = gordon_check(&v, &period_multiples(3, 5), DEFAULT_GORDON_PRECISION).unwrap();
        assert!(cert.valid());
        assert!(cert.scales.iter().all(|s| s.defect == 0.0));
    }

    #[test]
    fn gordon_detects_defect() {
        let v = LimitPeriodicPotential::from_periodic(periodic(&[0.0, 0.0, 0.0, 0.25]));
        let cert = gordon_check(&v, &[2], 64).unwrap();
        assert_eq!(cert.scales[0].defect, 0.25);
        assert!(cert.scales[0].passes);
        // Second scale: 0.25 against 2^-2 sits exactly on the bound.
        let cert = gordon_check(&v, &[1, 2], 64).unwrap();
        assert!(cert.valid());
        // q = 3 against 2^-3 fails.
        let cert = gordon_check(&v, &[1, 3], 64).unwrap();
        assert_eq!(cert.scales[1].defect, 0.25);
        assert!(!cert.scales[1].passes);
        assert!(!cert.valid());
    }

    #[test]
    fn gordon_precision_error() {
        let v = LimitPeriodicPotential::from_periodic(periodic(&[0.0]));
        assert!(matches!(
            gordon_check(&v, &[1, 200], 64),
            Err(Error::Precision { .. })
        ));
        assert!(gordon_check(&v, &[1, 200], 256).is_ok());
        assert!(gordon_check(&v, &[2, 2], 256).is_err());
    }
}
