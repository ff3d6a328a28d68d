//! Finite-depth model of procyclic groups.
//!
//! A procyclic group is the inverse limit of a divisibility chain of cyclic
//! groups `Z/n_1 <- Z/n_2 <- ...`. Everything here works with a truncation at
//! some depth `K`: a point of the odometer is a compatible vector of residues
//! `(r_1, ..., r_K)` with `r_{k+1} = r_k (mod n_k)`.
//!
//! Levels and residues are arbitrary-width integers. Chains produced by the
//! distal construction grow like `n_{k+1} >= n_k^3` and leave 64-bit range
//! after four or five levels.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A divisibility chain `n_1 | n_2 | ... | n_K` with every `n_j >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<BigUint>", into = "Vec<BigUint>")]
pub struct FrequencyIntegerSet {
    levels: Vec<BigUint>,
}

impl FrequencyIntegerSet {
    /// Validates a chain. The levels are sorted before the divisibility check.
    pub fn new(mut levels: Vec<BigUint>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Value("frequency integer set must be nonempty".into()));
        }
        levels.sort();
        let two = BigUint::from(2u32);
        if let Some(bad) = levels.iter().find(|n| **n < two) {
            return Err(Error::Value(format!("level {bad} is smaller than 2")));
        }
        for pair in levels.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::Value(format!("level {} repeated", pair[0])));
            }
            if !(&pair[1] % &pair[0]).is_zero() {
                return Err(Error::Divisibility(pair[0].to_string(), pair[1].to_string()));
            }
        }
        Ok(Self { levels })
    }

    pub fn levels(&self) -> &[BigUint] {
        &self.levels
    }

    /// Number of levels `K`.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// `n_k` for `1 <= k <= K`.
    pub fn level(&self, k: usize) -> &BigUint {
        &self.levels[k - 1]
    }

    /// The finest level `n_K`.
    pub fn top(&self) -> &BigUint {
        self.levels.last().expect("nonempty by construction")
    }

    /// The chain cut down to its first `k` levels.
    pub fn truncate(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.depth() {
            return Err(Error::Depth {
                requested: k,
                available: self.depth(),
            });
        }
        Ok(Self {
            levels: self.levels[..k].to_vec(),
        })
    }

    /// `n_K` as a `usize`, for table-based code paths.
    pub fn top_usize(&self) -> Result<usize> {
        self.top()
            .to_usize()
            .ok_or_else(|| Error::Value(format!("level {} too large to tabulate", self.top())))
    }
}

impl TryFrom<Vec<BigUint>> for FrequencyIntegerSet {
    type Error = Error;
    fn try_from(levels: Vec<BigUint>) -> Result<Self> {
        Self::new(levels)
    }
}

impl From<FrequencyIntegerSet> for Vec<BigUint> {
    fn from(set: FrequencyIntegerSet) -> Self {
        set.levels
    }
}

impl fmt::Display for FrequencyIntegerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, n) in self.levels.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "}}")
    }
}

/// Builds a frequency integer set from machine integers.
pub fn make_frequency_set(chain: &[u64]) -> Result<FrequencyIntegerSet> {
    FrequencyIntegerSet::new(chain.iter().map(|&n| BigUint::from(n)).collect())
}

/// Refines a chain until every consecutive ratio is prime.
///
/// The refinement between two levels is not unique. Prime factors of each
/// ratio are inserted smallest first, starting from the implicit level 1.
pub fn maximal_refinement(set: &FrequencyIntegerSet) -> FrequencyIntegerSet {
    let mut refined = Vec::new();
    let mut current = BigUint::one();
    for level in set.levels() {
        let ratio = level / &current;
        for (prime, mult) in num_prime::nt_funcs::factorize(ratio) {
            for _ in 0..mult {
                current *= &prime;
                refined.push(current.clone());
            }
        }
    }
    FrequencyIntegerSet { levels: refined }
}

/// Truncation-level isomorphism test for hulls.
///
/// Returns `true` when every level of either chain divides some level of the
/// other. This is a statement about the given finite chains only; two
/// truncations of non-isomorphic groups can agree.
pub fn hulls_isomorphic(a: &FrequencyIntegerSet, b: &FrequencyIntegerSet) -> bool {
    let covered = |x: &FrequencyIntegerSet, y: &FrequencyIntegerSet| {
        x.levels()
            .iter()
            .all(|n| y.levels().iter().any(|m| (m % n).is_zero()))
    };
    covered(a, b) && covered(b, a)
}

/// `true` iff translation by `k` is minimal on the odometer, i.e.
/// `gcd(k, n_j) = 1` at every level.
pub fn is_generator(k: u64, set: &FrequencyIntegerSet) -> bool {
    let k = BigUint::from(k);
    // n_j | n_K, so coprimality with the top level suffices.
    k.gcd(set.top()).is_one()
}

/// A compatible residue vector of the truncated odometer.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OdometerPoint {
    residues: Vec<BigUint>,
    parent: Arc<FrequencyIntegerSet>,
}

impl OdometerPoint {
    pub fn new(parent: Arc<FrequencyIntegerSet>, residues: Vec<BigUint>) -> Result<Self> {
        if residues.len() != parent.depth() {
            return Err(Error::Incompatible(format!(
                "{} residues for depth {}",
                residues.len(),
                parent.depth()
            )));
        }
        for (j, (r, n)) in residues.iter().zip(parent.levels()).enumerate() {
            if r >= n {
                return Err(Error::Incompatible(format!("residue {r} >= {n} at level {}", j + 1)));
            }
        }
        for j in 1..residues.len() {
            let n_prev = parent.level(j);
            if &residues[j] % n_prev != residues[j - 1] {
                return Err(Error::Incompatible(format!(
                    "level {} residue {} is not {} mod {}",
                    j + 1,
                    residues[j],
                    residues[j - 1],
                    n_prev
                )));
            }
        }
        Ok(Self { residues, parent })
    }

    /// The image of the integer `n` under `Z -> Omega`, the point `nE`.
    pub fn from_integer(parent: Arc<FrequencyIntegerSet>, n: &BigInt) -> Self {
        let residues = parent
            .levels()
            .iter()
            .map(|m| mod_floor(n, m))
            .collect();
        Self { residues, parent }
    }

    pub fn identity(parent: Arc<FrequencyIntegerSet>) -> Self {
        let residues = vec![BigUint::zero(); parent.depth()];
        Self { residues, parent }
    }

    /// The canonical generator `E = (1, 1, ..., 1)`.
    pub fn generator(parent: Arc<FrequencyIntegerSet>) -> Self {
        let residues = vec![BigUint::one(); parent.depth()];
        Self { residues, parent }
    }

    pub fn residues(&self) -> &[BigUint] {
        &self.residues
    }

    pub fn parent(&self) -> &Arc<FrequencyIntegerSet> {
        &self.parent
    }

    fn check_parent(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.parent, &other.parent) || self.parent == other.parent {
            Ok(())
        } else {
            Err(Error::ParentMismatch)
        }
    }

    /// Group addition, residue by residue.
    pub fn add(&self, other: &Self) -> Result<Self> {
        odometer_translate(self, other, 1)
    }
}

/// `x + steps * b`, computed levelwise modulo `n_k`.
pub fn odometer_translate(x: &OdometerPoint, b: &OdometerPoint, steps: i64) -> Result<OdometerPoint> {
    x.check_parent(b)?;
    let steps = BigInt::from(steps);
    let residues = x
        .residues
        .iter()
        .zip(&b.residues)
        .zip(x.parent.levels())
        .map(|((r, s), n)| {
            let v = BigInt::from(r.clone()) + &steps * BigInt::from(s.clone());
            mod_floor(&v, n)
        })
        .collect();
    Ok(OdometerPoint {
        residues,
        parent: Arc::clone(&x.parent),
    })
}

/// The product metric `sum_j 2^-j d_j / (1 + d_j)` with `d_j` the discrete
/// metric on level `j`. Each disagreeing level contributes `2^-(j+1)`.
pub fn group_metric(x: &OdometerPoint, y: &OdometerPoint) -> Result<f64> {
    x.check_parent(y)?;
    Ok(x.residues
        .iter()
        .zip(&y.residues)
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .map(|(j, _)| 0.5f64.powi(j as i32 + 2))
        .sum())
}

/// Mathematical modulus of a signed integer by a positive modulus.
pub(crate) fn mod_floor(n: &BigInt, m: &BigUint) -> BigUint {
    let m = BigInt::from(m.clone());
    n.mod_floor(&m)
        .to_biguint()
        .expect("mod_floor by a positive modulus is nonnegative")
}

/// A continuous function on the hull, represented by its values on the
/// cosets of the level-`K` subgroup together with a sup-norm tail bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingFunction {
    set: FrequencyIntegerSet,
    table: Vec<f64>,
    tail_bound: f64,
}

impl SamplingFunction {
    pub fn new(set: FrequencyIntegerSet, table: Vec<f64>, tail_bound: f64) -> Result<Self> {
        let n = set.top_usize()?;
        if table.len() != n {
            return Err(Error::Value(format!(
                "table has {} entries, expected n_K = {n}",
                table.len()
            )));
        }
        if !(tail_bound >= 0.0) {
            return Err(Error::Value(format!("tail bound {tail_bound} must be >= 0")));
        }
        Ok(Self {
            set,
            table,
            tail_bound,
        })
    }

    pub fn set(&self) -> &FrequencyIntegerSet {
        &self.set
    }

    pub fn depth(&self) -> usize {
        self.set.depth()
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// `f` at the coset with top-level residue `r`.
    pub fn at_residue(&self, r: usize) -> f64 {
        self.table[r % self.table.len()]
    }

    /// The potential `n -> f(omega + nE)` sampled along the orbit, with
    /// `omega` given by its top-level residue.
    pub fn potential_value(&self, omega: usize, n: i64) -> f64 {
        let len = self.table.len() as i64;
        self.table[(omega as i64 + n).rem_euclid(len) as usize]
    }

    /// Largest spread of `f` within a single coset of the level-`k` subgroup.
    pub fn coset_oscillation(&self, k: usize) -> Result<f64> {
        let (n_k, _) = self.coset_shape(k)?;
        let mut osc = 0.0f64;
        for r in 0..n_k {
            let (lo, hi) = self
                .table
                .iter()
                .skip(r)
                .step_by(n_k)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            osc = osc.max(hi - lo);
        }
        Ok(osc)
    }

    fn coset_shape(&self, k: usize) -> Result<(usize, usize)> {
        if k == 0 || k > self.depth() {
            return Err(Error::Depth {
                requested: k,
                available: self.depth(),
            });
        }
        let n_k = self.set.level(k).to_usize().expect("divides a tabulated level");
        Ok((n_k, self.table.len() / n_k))
    }
}

/// Averages `f` over the cosets of the level-`k` subgroup (Haar measure on a
/// finite-index subgroup), producing an exactly `n_k`-periodic function.
///
/// Cosets on which `f` is constant return that constant unchanged, so an
/// already `n_k`-periodic table survives bit for bit.
pub fn periodize(f: &SamplingFunction, k: usize) -> Result<SamplingFunction> {
    let (n_k, count) = f.coset_shape(k)?;
    let table = (0..n_k)
        .map(|r| {
            let mut coset = f.table.iter().skip(r).step_by(n_k).copied();
            let first = coset.next().expect("cosets are nonempty");
            if coset.clone().all(|v| v == first) {
                return first;
            }
            // Neumaier summation keeps the mean reproducible across table sizes.
            let (mut sum, mut comp) = (first, 0.0f64);
            for v in coset {
                let t = sum + v;
                if sum.abs() >= v.abs() {
                    comp += (sum - t) + v;
                } else {
                    comp += (v - t) + sum;
                }
                sum = t;
            }
            (sum + comp) / count as f64
        })
        .collect();
    Ok(SamplingFunction {
        set: f.set.truncate(k)?,
        table,
        tail_bound: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(chain: &[u64]) -> FrequencyIntegerSet {
        make_frequency_set(chain).unwrap()
    }

    fn point(s: &Arc<FrequencyIntegerSet>, r: &[u64]) -> OdometerPoint {
        OdometerPoint::new(Arc::clone(s), r.iter().map(|&x| BigUint::from(x)).collect()).unwrap()
    }

    #[test]
    fn frequency_set_validation() {
        assert_eq!(set(&[2, 4, 8]).to_string(), "{2,4,8}");
        assert_eq!(set(&[12, 2, 6]).to_string(), "{2,6,12}");
        assert!(matches!(make_frequency_set(&[2, 3]), Err(Error::Divisibility(..))));
        assert!(matches!(make_frequency_set(&[1, 2]), Err(Error::Value(_))));
        assert!(matches!(make_frequency_set(&[]), Err(Error::Value(_))));
    }

    #[test]
    fn refinement_examples() {
        assert_eq!(maximal_refinement(&set(&[4])), set(&[2, 4]));
        assert_eq!(maximal_refinement(&set(&[2, 4, 8])), set(&[2, 4, 8]));
        assert_eq!(maximal_refinement(&set(&[6, 36])), set(&[2, 6, 12, 36]));
    }

    /// Enumerates every chain of prime steps from 1 to `target` through the
    /// given intermediate levels, and picks the one whose insertions are
    /// lexicographically smallest within each original segment.
    fn canonical_prime_chain(levels: &[u64]) -> Vec<u64> {
        fn segment(from: u64, to: u64) -> Vec<Vec<u64>> {
            if from == to {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in 2..=(to / from) {
                let is_prime = (2..p).all(|d| p % d != 0);
                if is_prime && (to / from) % p == 0 {
                    for mut rest in segment(from * p, to) {
                        rest.insert(0, from * p);
                        out.push(rest);
                    }
                }
            }
            out
        }
        let mut chain = Vec::new();
        let mut from = 1;
        for &l in levels {
            let mut options = segment(from, l);
            options.sort();
            chain.extend(options.remove(0));
            from = l;
        }
        chain
    }

    #[test]
    fn refinement_matches_enumeration() {
        for chain in [vec![6, 36], vec![4, 24, 720], vec![30], vec![9, 90, 900]] {
            let expected = canonical_prime_chain(&chain);
            assert_eq!(maximal_refinement(&set(&chain)), set(&expected), "{chain:?}");
        }
    }

    #[test]
    fn isomorphism_examples() {
        assert!(hulls_isomorphic(&set(&[2, 4, 8]), &set(&[2, 4, 8])));
        assert!(!hulls_isomorphic(&set(&[2, 4, 8]), &set(&[6, 12, 24])));
        assert!(hulls_isomorphic(&set(&[2, 4]), &set(&[4])));
    }

    #[test]
    fn translation_examples() {
        let s = Arc::new(set(&[2, 4]));
        let e = OdometerPoint::generator(Arc::clone(&s));
        let zero = OdometerPoint::identity(Arc::clone(&s));
        assert_eq!(odometer_translate(&zero, &e, 0).unwrap(), zero);
        assert_eq!(odometer_translate(&zero, &e, 3).unwrap(), point(&s, &[1, 3]));
        assert_eq!(odometer_translate(&point(&s, &[1, 1]), &e, 3).unwrap(), zero);
        assert_eq!(odometer_translate(&zero, &e, -1).unwrap(), point(&s, &[1, 3]));
    }

    #[test]
    fn parent_mismatch() {
        let a = OdometerPoint::identity(Arc::new(set(&[2, 4])));
        let b = OdometerPoint::identity(Arc::new(set(&[2, 8])));
        assert_eq!(group_metric(&a, &b), Err(Error::ParentMismatch));
        assert!(matches!(odometer_translate(&a, &b, 1), Err(Error::ParentMismatch)));
    }

    #[test]
    fn incompatible_residues_rejected() {
        let s = Arc::new(set(&[2, 4]));
        let bad = OdometerPoint::new(s, vec![BigUint::from(1u32), BigUint::from(2u32)]);
        assert!(matches!(bad, Err(Error::Incompatible(_))));
    }

    #[test]
    fn metric_examples() {
        let s = Arc::new(set(&[2, 4, 8]));
        let x = point(&s, &[0, 0, 0]);
        assert_eq!(group_metric(&x, &x).unwrap(), 0.0);
        // Differ at level 1 only is impossible for compatible points unless the
        // finer levels also differ, so use a depth-1 chain for that case.
        let s1 = Arc::new(set(&[2]));
        assert_eq!(group_metric(&point(&s1, &[0]), &point(&s1, &[1])).unwrap(), 0.25);
        let s2 = Arc::new(set(&[2, 4]));
        assert_eq!(group_metric(&point(&s2, &[0, 0]), &point(&s2, &[1, 1])).unwrap(), 0.375);
    }

    #[test]
    fn generator_examples() {
        assert!(is_generator(1, &set(&[2, 4, 8])));
        assert!(is_generator(3, &set(&[2, 4, 8])));
        assert!(!is_generator(2, &set(&[2, 4, 8])));
        assert!(!is_generator(9, &set(&[3, 6])));
    }

    #[test]
    fn periodize_examples() {
        let s = set(&[2, 4]);
        let f = SamplingFunction::new(s.clone(), vec![0.0, 1.0, 2.0, 3.0], 0.0).unwrap();
        let g = periodize(&f, 1).unwrap();
        assert_eq!(g.table(), &[1.0, 2.0]);
        assert_eq!(g.tail_bound(), 0.0);

        let c = SamplingFunction::new(s.clone(), vec![0.1; 4], 0.0).unwrap();
        assert_eq!(periodize(&c, 1).unwrap().table(), &[0.1, 0.1]);

        let periodic = SamplingFunction::new(s.clone(), vec![0.1, 0.7, 0.1, 0.7], 0.0).unwrap();
        assert_eq!(periodize(&periodic, 1).unwrap().table(), &[0.1, 0.7]);
        assert_eq!(periodize(&periodic, 2).unwrap().table(), periodic.table());

        assert!(matches!(periodize(&f, 3), Err(Error::Depth { .. })));
        assert!(matches!(periodize(&f, 0), Err(Error::Depth { .. })));
    }

    #[test]
    fn periodize_idempotent_and_close() {
        let s = set(&[3, 6, 12]);
        let table: Vec<f64> = (0..12).map(|i| ((i * 7) % 5) as f64 * 0.3).collect();
        let f = SamplingFunction::new(s, table, 0.01).unwrap();
        for k in 1..=3 {
            let g = periodize(&f, k).unwrap();
            assert_eq!(periodize(&g, k).unwrap(), g);
            let osc = f.coset_oscillation(k).unwrap();
            let dist = (0..12)
                .map(|r| (g.at_residue(r) - f.at_residue(r)).abs())
                .fold(0.0, f64::max);
            assert!(dist <= osc + f.tail_bound());
        }
    }
}
