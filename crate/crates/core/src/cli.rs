//! Command-line front end.
//!
//! Every command reads a JSON potential specification, runs one analysis
//! and writes CSV (tables) or JSON (trails and reports). [`run`] maps
//! failures to exit codes: 2 for input and validation errors, 3 for
//! numerical ones.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cocycle::lyapunov_periodic;
use crate::constructions::{
    block_concatenate, cantor_iterate, cascade_cover_sums, hausdorff_cover_sums, BlockConcatenation,
    CantorIterationState, CascadeLevel,
};
use crate::error::{Error, Result};
use crate::floquet::{
    band_spectrum, density_integral, density_lt_norm, parseval_integral, spectral_density,
    FiniteVector, QUADRATURE_REL_TOL,
};
use crate::potentials::{
    distal_potential, gordon_check, hull_metric_potential, period_multiples, poschel_potential,
    select_distal_subset, series_scales, LimitPeriodicPotential, PeriodicPotential,
    DEFAULT_GORDON_PRECISION,
};
use crate::procyclic::{
    hulls_isomorphic, is_generator, make_frequency_set, maximal_refinement, FrequencyIntegerSet,
    OdometerPoint,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_QUADRATURE_TOL: f64 = 1e-6;

/// Orbits of odometers up to this size are counted by iteration.
const ORBIT_ENUMERATION_LIMIT: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecKind {
    Periodic,
    Series,
    HullMetric,
    Distal,
    Poschel,
    BlockConcat,
}

/// The input document `{"schema": 1, "kind": ..., "lambda": ..., "parameters": {...}}`.
///
/// Unknown top-level fields are ignored, so construction trails that carry
/// extra fields still parse as specifications.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub schema: u32,
    pub kind: SpecKind,
    #[serde(default = "one")]
    pub lambda: f64,
    pub parameters: serde_json::Value,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodicParams {
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesParams {
    /// One value table per term; periods are the table lengths.
    pub terms: Vec<Vec<f64>>,
    #[serde(default)]
    pub tail_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainParams {
    pub chain: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistalParams {
    pub chain: Vec<u64>,
    pub m: u32,
    /// Run the greedy subchain selection on `chain` first.
    #[serde(default)]
    pub select: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoschelParams {
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockConcatParams {
    pub family: Vec<Vec<f64>>,
    /// Target period of each level.
    pub periods: Vec<usize>,
    /// One `t` vector per member of the next family.
    pub t_vec: Vec<Vec<usize>>,
    #[serde(rename = "N")]
    pub n: u32,
}

/// A specification turned into a potential.
#[derive(Clone, Debug, PartialEq)]
pub enum Resolved {
    Periodic(PeriodicPotential),
    Series {
        potential: LimitPeriodicPotential,
        chain: Option<FrequencyIntegerSet>,
    },
    Cascade {
        base: Vec<PeriodicPotential>,
        levels: Vec<CascadeLevel>,
        params: BlockConcatParams,
        lambda: f64,
    },
}

fn params<T: for<'de> Deserialize<'de>>(spec: &PotentialSpec) -> Result<T> {
    serde_json::from_value(spec.parameters.clone())
        .map_err(|e| Error::Value(format!("parameters for {:?}: {e}", spec.kind)))
}

fn periodic_table(values: &[f64]) -> Result<PeriodicPotential> {
    PeriodicPotential::new(values.to_vec())
}

impl PotentialSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let spec: PotentialSpec =
            serde_json::from_str(text).map_err(|e| Error::Value(format!("malformed spec: {e}")))?;
        if spec.schema != SCHEMA_VERSION {
            return Err(Error::Value(format!(
                "unsupported schema {} (expected {SCHEMA_VERSION})",
                spec.schema
            )));
        }
        if !spec.lambda.is_finite() || spec.lambda == 0.0 {
            return Err(Error::Value(format!("lambda = {} must be finite and nonzero", spec.lambda)));
        }
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes") + "\n"
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let lambda = self.lambda;
        let series = |v: LimitPeriodicPotential, chain| -> Result<Resolved> {
            Ok(Resolved::Series {
                potential: v.scaled(lambda)?,
                chain,
            })
        };
        match self.kind {
            SpecKind::Periodic => {
                let p: PeriodicParams = params(self)?;
                Ok(Resolved::Periodic(periodic_table(&p.values)?.scaled(lambda)))
            }
            SpecKind::Series => {
                let p: SeriesParams = params(self)?;
                let tables = p.terms.iter().map(|t| periodic_table(t)).collect::<Result<Vec<_>>>()?;
                if tables.is_empty() {
                    return Err(Error::Value("series has no terms".into()));
                }
                series(LimitPeriodicPotential::from_tables(tables, p.tail_bound)?, None)
            }
            SpecKind::HullMetric => {
                let p: ChainParams = params(self)?;
                let set = make_frequency_set(&p.chain)?;
                series(hull_metric_potential(&set), Some(set))
            }
            SpecKind::Distal => {
                let p: DistalParams = params(self)?;
                let mut set = make_frequency_set(&p.chain)?;
                if p.select {
                    set = select_distal_subset(&set, p.m)?;
                }
                series(distal_potential(&set, p.m)?, Some(set))
            }
            SpecKind::Poschel => {
                let p: PoschelParams = params(self)?;
                series(poschel_potential(p.depth)?, None)
            }
            SpecKind::BlockConcat => {
                let p: BlockConcatParams = params(self)?;
                let base = p.family.iter().map(|f| periodic_table(f)).collect::<Result<Vec<_>>>()?;
                if p.periods.is_empty() {
                    return Err(Error::Value("block_concat needs at least one period".into()));
                }
                let levels = crate::constructions::block_cascade(&base, &p.periods, p.n, &p.t_vec)?;
                Ok(Resolved::Cascade {
                    base,
                    levels,
                    params: p,
                    lambda,
                })
            }
        }
    }
}

impl Resolved {
    /// The periodic potential analysed at `depth`: the first `depth` series
    /// terms, or the first member of cascade level `depth` (1-based).
    /// Without a depth the deepest available approximant is used.
    pub fn approximant(&self, depth: Option<usize>) -> Result<PeriodicPotential> {
        match self {
            Resolved::Periodic(p) => Ok(p.clone()),
            Resolved::Series { potential, .. } => {
                let d = check_depth(depth, potential.depth())?;
                potential.approximant(d)
            }
            Resolved::Cascade { levels, lambda, .. } => {
                let d = check_depth(depth, levels.len())?;
                Ok(levels[d - 1].family[0].scaled(*lambda))
            }
        }
    }

    /// The potential as a series truncated at `depth`.
    pub fn series(&self, depth: Option<usize>) -> Result<LimitPeriodicPotential> {
        match self {
            Resolved::Series { potential, .. } => {
                let d = check_depth(depth, potential.depth())?;
                Ok(potential.truncate(d))
            }
            _ => Ok(LimitPeriodicPotential::from_periodic(self.approximant(depth)?)),
        }
    }

    /// The frequency integer set of the hull.
    pub fn frequency_set(&self, depth: Option<usize>) -> Result<FrequencyIntegerSet> {
        let set = match self {
            Resolved::Series {
                chain: Some(set), ..
            } => set.clone(),
            Resolved::Series { potential, .. } => {
                let mut levels: Vec<BigUint> = Vec::new();
                for t in potential.terms() {
                    let p = t.period();
                    if p > BigUint::one() && levels.last().is_none_or(|l| *l < p) {
                        levels.push(p);
                    }
                }
                if levels.is_empty() {
                    levels.push(BigUint::one());
                }
                FrequencyIntegerSet::new(levels)?
            }
            Resolved::Periodic(p) => make_frequency_set(&[p.period() as u64])?,
            Resolved::Cascade { levels, base, .. } => {
                let mut chain = vec![base[0].period() as u64];
                chain.extend(levels.iter().map(|l| l.period as u64));
                make_frequency_set(&chain)?
            }
        };
        match depth {
            Some(d) => set.truncate(d),
            None => Ok(set),
        }
    }
}

fn check_depth(depth: Option<usize>, available: usize) -> Result<usize> {
    match depth {
        None => Ok(available),
        Some(d) if d >= 1 && d <= available => Ok(d),
        Some(d) => Err(Error::Depth {
            requested: d,
            available,
        }),
    }
}

#[derive(Parser, Debug)]
#[command(name = "limitband", version, about = "Spectral analysis of limit-periodic Schrödinger operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct Common {
    /// JSON potential specification.
    #[arg(long)]
    pub spec: PathBuf,
    /// Output file, or `-` for standard output.
    #[arg(long)]
    pub out: String,
    /// Approximant depth; defaults to the deepest available.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Band and gap tolerance in energy units.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Quadrature relative tolerance target.
    #[arg(long, default_value_t = DEFAULT_QUADRATURE_TOL)]
    pub quad_tol: f64,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write run metadata as JSON to this file.
    #[arg(long)]
    pub meta: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Debug)]
pub enum Command {
    /// Band edges of the periodic approximant.
    Bands {
        #[command(flatten)]
        common: Common,
    },
    /// Lyapunov exponent over an energy grid.
    Lyapunov {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true, default_value_t = -4.0)]
        e_min: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 4.0)]
        e_max: f64,
        #[arg(long, default_value_t = 101)]
        n_grid: usize,
    },
    /// Spectral density of a finitely supported vector.
    Dos {
        #[command(flatten)]
        common: Common,
        /// Support of `u` as `site:amplitude` pairs.
        #[arg(long, value_delimiter = ',', default_value = "0:1", allow_hyphen_values = true)]
        u: Vec<String>,
        #[arg(long, default_value_t = 1.5)]
        t: f64,
        #[arg(long, allow_hyphen_values = true)]
        e_min: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        e_max: Option<f64>,
        #[arg(long, default_value_t = 201)]
        n_grid: usize,
        /// Write one row of integrals instead of the density profile.
        #[arg(long)]
        summary: bool,
    },
    /// Gordon certificate.
    Gordon {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 5)]
        k_max: usize,
        #[arg(long, default_value_t = DEFAULT_GORDON_PRECISION)]
        precision_bits: u32,
    },
    /// Cantor iteration from a periodic spec, or block concatenation.
    Construct {
        #[command(flatten)]
        common: Common,
        /// Period basis of the Cantor iteration.
        #[arg(long, value_delimiter = ',')]
        basis: Vec<usize>,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        /// Number of stages; defaults to the basis length.
        #[arg(long)]
        stages: Option<usize>,
    },
    /// Hausdorff cover sums of a block-concatenation cascade.
    Hausdorff {
        #[command(flatten)]
        common: Common,
        /// Number of cascade levels; defaults to all.
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// Coupling; defaults to the spec's lambda.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
        /// Fixed inflation replacing the `lambda p_i^-i` schedule.
        #[arg(long)]
        inflation: Option<f64>,
    },
    /// Hull report: generator check, orbit size, isomorphism.
    Hull {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        generator: u64,
        /// Second frequency chain to compare hulls against.
        #[arg(long, value_delimiter = ',')]
        compare: Vec<u64>,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Bands { common }
            | Command::Lyapunov { common, .. }
            | Command::Dos { common, .. }
            | Command::Gordon { common, .. }
            | Command::Construct { common, .. }
            | Command::Hausdorff { common, .. }
            | Command::Hull { common, .. } => common,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Bands { .. } => "bands",
            Command::Lyapunov { .. } => "lyapunov",
            Command::Dos { .. } => "dos",
            Command::Gordon { .. } => "gordon",
            Command::Construct { .. } => "construct",
            Command::Hausdorff { .. } => "hausdorff",
            Command::Hull { .. } => "hull",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub version: String,
    pub schema: u32,
    pub tol: f64,
    pub quadrature_rel_tol: f64,
    pub quadrature_accept_rel: f64,
    pub gordon_precision_bits: u32,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub command: String,
    /// Hex SHA-256 of the spec bytes and the arguments.
    pub inputs_digest: String,
    pub meta: RunMeta,
    /// CSV or JSON text as written to `--out`.
    pub output: String,
}

/// Formats a float so that it parses back to the same `f64`: integers
/// without a fraction, everything else in shortest round-trip form.
pub fn format_float(x: f64) -> String {
    if x.is_finite() && x.fract() == 0.0 && x.abs() < 1e16 {
        format!("{x}")
    } else {
        format!("{x:?}")
    }
}

fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(format_float).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// Parses CSV written by a command into its header and numeric rows.
pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Value("empty csv".into()))?
        .split(',')
        .map(str::to_string)
        .collect::<Vec<_>>();
    let rows = lines
        .map(|l| {
            l.split(',')
                .map(|c| c.parse::<f64>().map_err(|e| Error::Value(format!("cell {c:?}: {e}"))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((header, rows))
}

fn digest(spec_bytes: &[u8], args: &[String]) -> String {
    let mut h = Sha256::new();
    h.update(spec_bytes);
    for a in args {
        h.update([0u8]);
        h.update(a.as_bytes());
    }
    hex::encode(h.finalize())
}

/// Arguments with the `--out` and `--meta` destinations removed.
fn digest_args(args: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in args.iter().skip(1) {
        if skip {
            skip = false;
            continue;
        }
        if a == "--out" || a == "--meta" {
            skip = true;
            continue;
        }
        if a.starts_with("--out=") || a.starts_with("--meta=") {
            continue;
        }
        out.push(a.clone());
    }
    out
}

fn validate_common(c: &Common) -> Result<()> {
    if !(c.tol > 0.0 && c.tol.is_finite()) {
        return Err(Error::Value(format!("tol = {} must be positive", c.tol)));
    }
    if !(c.quad_tol > 0.0 && c.quad_tol < 1.0) {
        return Err(Error::Value(format!("quad-tol = {} must lie in (0, 1)", c.quad_tol)));
    }
    Ok(())
}

fn energy_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::Value(format!("n-grid = {n} must be at least 2")));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Value(format!("energy range [{lo}, {hi}] is empty")));
    }
    let last = (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / last })
        .collect())
}

fn parse_vector(entries: &[String]) -> Result<FiniteVector> {
    let mut out = Vec::with_capacity(entries.len());
    for e in entries {
        let (site, amp) = e
            .split_once(':')
            .ok_or_else(|| Error::Value(format!("vector entry {e:?} is not site:amplitude")))?;
        let site: i64 = site.trim().parse().map_err(|_| Error::Value(format!("bad site in {e:?}")))?;
        let amp: f64 = amp.trim().parse().map_err(|_| Error::Value(format!("bad amplitude in {e:?}")))?;
        if !amp.is_finite() {
            return Err(Error::Value(format!("amplitude in {e:?} is not finite")));
        }
        out.push((site, amp));
    }
    Ok(FiniteVector::new(out))
}

fn json_with_trail(spec: PotentialSpec, trail: serde_json::Value) -> String {
    let mut doc = serde_json::to_value(&spec).expect("spec serializes");
    doc["trail"] = trail;
    serde_json::to_string_pretty(&doc).expect("trail serializes") + "\n"
}

#[derive(Serialize)]
struct HullReport {
    levels: Vec<String>,
    maximal_refinement: Vec<String>,
    generator: u64,
    is_generator: bool,
    orbit_size: String,
    orbit_enumerated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    compare: Option<HullComparison>,
}

#[derive(Serialize)]
struct HullComparison {
    levels: Vec<String>,
    isomorphic: bool,
}

fn level_strings(set: &FrequencyIntegerSet) -> Vec<String> {
    set.levels().iter().map(|n| n.to_string()).collect()
}

/// Size of the orbit of the identity under translation by `k`.
fn orbit_size(set: &FrequencyIntegerSet, k: u64) -> (BigUint, bool) {
    let top = set.top();
    let formula = top / BigUint::from(k).gcd(top);
    if formula.to_u64().is_none_or(|n| n > ORBIT_ENUMERATION_LIMIT) {
        return (formula, false);
    }
    let parent = Arc::new(set.clone());
    let identity = OdometerPoint::identity(parent.clone());
    let step = OdometerPoint::from_integer(parent, &BigInt::from(k));
    let mut x = step.clone();
    let mut count = 1u64;
    while x != identity {
        x = x.add(&step).expect("same parent");
        count += 1;
    }
    (BigUint::from(count), true)
}

/// Runs a parsed command; `spec_text` is the content of `--spec`.
pub fn execute(command: &Command, spec_text: &str, args: &[String]) -> Result<RunResult> {
    let c = command.common();
    validate_common(c)?;
    let spec = PotentialSpec::parse(spec_text)?;
    let resolved = spec.resolve()?;
    let mut gordon_bits = DEFAULT_GORDON_PRECISION;
    let output = match command {
        Command::Bands { .. } => {
            let p = resolved.approximant(c.depth)?;
            let s = band_spectrum(&p, c.tol)?;
            csv(
                &["band_index", "a", "b", "length"],
                s.bands()
                    .iter()
                    .enumerate()
                    .map(|(i, b)| vec![i as f64, b[0], b[1], b[1] - b[0]]),
            )
        }
        Command::Lyapunov {
            e_min,
            e_max,
            n_grid,
            ..
        } => {
            let grid = energy_grid(*e_min, *e_max, *n_grid)?;
            let p = resolved.approximant(c.depth)?;
            csv(
                &["E", "L"],
                grid.iter().map(|&e| vec![e, lyapunov_periodic(e, &p).exponent]),
            )
        }
        Command::Dos {
            u,
            t,
            e_min,
            e_max,
            n_grid,
            summary,
            ..
        } => {
            if !(*t > 1.0 && *t < 2.0) {
                return Err(Error::Value(format!("t = {t} must lie in (1, 2)")));
            }
            let u = parse_vector(u)?;
            let p = resolved.approximant(c.depth)?;
            if *summary {
                let row = vec![
                    u.norm_sq(),
                    parseval_integral(&p, &u)?,
                    density_integral(&p, &u)?,
                    density_lt_norm(&p, &u, *t)?,
                    *t,
                ];
                csv(&["norm_sq", "parseval", "energy_integral", "lt_norm", "t"], [row])
            } else {
                let s = band_spectrum(&p, c.tol)?;
                let grid = energy_grid(e_min.unwrap_or(s.min()), e_max.unwrap_or(s.max()), *n_grid)?;
                let mut rows = Vec::with_capacity(grid.len());
                for e in grid {
                    match spectral_density(&p, &u, e) {
                        Ok(g) => rows.push(vec![e, g]),
                        Err(Error::BandEdge { .. }) => {}
                        Err(err) => return Err(err),
                    }
                }
                csv(&["E", "g"], rows)
            }
        }
        Command::Gordon {
            k_max,
            precision_bits,
            ..
        } => {
            if *k_max == 0 {
                return Err(Error::Value("k-max must be at least 1".into()));
            }
            gordon_bits = *precision_bits;
            let v = resolved.series(c.depth)?;
            let scales = match &resolved {
                Resolved::Series { .. } => series_scales(&v, *k_max),
                _ => period_multiples(resolved.approximant(c.depth)?.period() as u64, *k_max),
            };
            if scales.is_empty() {
                return Err(Error::Value("series has no term of period above 1".into()));
            }
            let cert = gordon_check(&v, &scales, *precision_bits)?;
            csv(
                &["k", "q", "defect", "bound_log2", "passes"],
                cert.scales.iter().enumerate().map(|(i, s)| {
                    vec![
                        (i + 1) as f64,
                        s.q as f64,
                        s.defect,
                        s.bound_log2,
                        if s.passes { 1.0 } else { 0.0 },
                    ]
                }),
            )
        }
        Command::Construct {
            basis,
            epsilon,
            stages,
            ..
        } => match &resolved {
            Resolved::Periodic(f0) => {
                if basis.is_empty() {
                    return Err(Error::Value("cantor construction needs --basis".into()));
                }
                let trail = cantor_iterate(f0, basis, *epsilon, stages.unwrap_or(basis.len()), c.tol)?;
                cantor_document(f0, &trail)
            }
            Resolved::Cascade {
                base,
                levels,
                params,
                lambda,
            } => cascade_document(base, levels, params, *lambda)?,
            Resolved::Series { .. } => {
                return Err(Error::Value(
                    "construct takes a periodic spec (cantor) or a block_concat spec".into(),
                ))
            }
        },
        Command::Hausdorff {
            levels: count,
            alpha,
            lambda,
            inflation,
            ..
        } => {
            let Resolved::Cascade {
                levels,
                lambda: spec_lambda,
                ..
            } = &resolved
            else {
                return Err(Error::Value("hausdorff needs a block_concat spec".into()));
            };
            let n = check_depth(*count, levels.len())?;
            let lambda = lambda.unwrap_or(*spec_lambda);
            if !lambda.is_finite() || lambda == 0.0 {
                return Err(Error::Value(format!("lambda = {lambda} must be finite and nonzero")));
            }
            let sums = match inflation {
                None => cascade_cover_sums(&levels[..n], lambda, *alpha)?,
                Some(w) => {
                    let spectra = levels[..n]
                        .iter()
                        .map(|l| Ok((band_spectrum(&l.family[0].scaled(lambda), c.tol)?, *w)))
                        .collect::<Result<Vec<_>>>()?;
                    hausdorff_cover_sums(&spectra, *alpha)?
                }
            };
            csv(
                &["level", "alpha", "inflation", "count", "sum"],
                sums.iter().map(|s| {
                    vec![s.level as f64, s.alpha, s.inflation, s.interval_count as f64, s.sum]
                }),
            )
        }
        Command::Hull {
            generator,
            compare,
            ..
        } => {
            let set = resolved.frequency_set(c.depth)?;
            let (size, enumerated) = orbit_size(&set, *generator);
            let comparison = if compare.is_empty() {
                None
            } else {
                let other = make_frequency_set(compare)?;
                Some(HullComparison {
                    levels: level_strings(&other),
                    isomorphic: hulls_isomorphic(&set, &other),
                })
            };
            let report = HullReport {
                levels: level_strings(&set),
                maximal_refinement: level_strings(&maximal_refinement(&set)),
                generator: *generator,
                is_generator: is_generator(*generator, &set),
                orbit_size: size.to_string(),
                orbit_enumerated: enumerated,
                compare: comparison,
            };
            serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
        }
    };
    Ok(RunResult {
        command: command.name().to_string(),
        inputs_digest: digest(spec_text.as_bytes(), &digest_args(args)),
        meta: RunMeta {
            version: env!("CARGO_PKG_VERSION").to_string(),
            schema: SCHEMA_VERSION,
            tol: c.tol,
            quadrature_rel_tol: c.quad_tol,
            quadrature_accept_rel: QUADRATURE_REL_TOL,
            gordon_precision_bits: gordon_bits,
            seed: c.seed,
        },
        output,
    })
}

/// The final potential as a series spec `f_0 + s_1 + ... + s_k`, with the
/// stage trail attached.
fn cantor_document(f0: &PeriodicPotential, trail: &[CantorIterationState]) -> String {
    let mut terms = vec![f0.values().to_vec()];
    terms.extend(trail.iter().map(|s| s.s_k.values().to_vec()));
    let spec = PotentialSpec {
        schema: SCHEMA_VERSION,
        kind: SpecKind::Series,
        lambda: 1.0,
        parameters: serde_json::to_value(SeriesParams {
            terms,
            tail_bound: 0.0,
        })
        .expect("params serialize"),
    };
    json_with_trail(spec, serde_json::to_value(trail).expect("trail serializes"))
}

#[derive(Serialize)]
struct CascadeTrailLevel {
    level: usize,
    period: usize,
    concatenations: Vec<BlockConcatenation>,
}

/// The scaled first member of the last level as a periodic spec, with every
/// concatenation of the cascade attached.
fn cascade_document(
    base: &[PeriodicPotential],
    levels: &[CascadeLevel],
    params: &BlockConcatParams,
    lambda: f64,
) -> Result<String> {
    let mut family = base.to_vec();
    let mut trail = Vec::with_capacity(levels.len());
    for (i, level) in levels.iter().enumerate() {
        let concatenations = params
            .t_vec
            .iter()
            .map(|t| block_concatenate(&family, level.period, params.n, t))
            .collect::<Result<Vec<_>>>()?;
        trail.push(CascadeTrailLevel {
            level: i + 1,
            period: level.period,
            concatenations,
        });
        family = level.family.clone();
    }
    let last = levels.last().expect("at least one level").family[0].scaled(lambda);
    let spec = PotentialSpec {
        schema: SCHEMA_VERSION,
        kind: SpecKind::Periodic,
        lambda: 1.0,
        parameters: serde_json::to_value(PeriodicParams {
            values: last.values().to_vec(),
        })
        .expect("params serialize"),
    };
    Ok(json_with_trail(spec, serde_json::to_value(trail).expect("trail serializes")))
}

/// Parses `args` (program name first), runs the command and writes its
/// output. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_command(&cli.command, &args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("limitband {}: {e}", cli.command.name());
            if e.is_numerical() {
                3
            } else {
                2
            }
        }
    }
}

fn read_spec(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Value(format!("cannot read spec {}: {e}", path.display())))
}

fn write_out(dest: &str, text: &str) -> Result<()> {
    if dest == "-" {
        let mut stdout = std::io::stdout().lock();
        stdout
            .write_all(text.as_bytes())
            .and_then(|_| stdout.flush())
            .map_err(|e| Error::Value(format!("cannot write to stdout: {e}")))
    } else {
        std::fs::write(dest, text).map_err(|e| Error::Value(format!("cannot write {dest}: {e}")))
    }
}

fn run_command(command: &Command, args: &[String]) -> Result<()> {
    let c = command.common();
    let spec_text = read_spec(&c.spec)?;
    let result = execute(command, &spec_text, args)?;
    write_out(&c.out, &result.output)?;
    if let Some(meta) = &c.meta {
        let mut text = serde_json::to_string_pretty(&result).expect("result serializes");
        let _ = writeln!(text);
        std::fs::write(meta, text)
            .map_err(|e| Error::Value(format!("cannot write {}: {e}", meta.display())))?;
    }
    Ok(())
}
