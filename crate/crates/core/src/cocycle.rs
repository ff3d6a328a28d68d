//! Transfer-matrix cocycles and Lyapunov exponents.

use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::{PeriodicPotential, Potential};

/// A real 2×2 matrix, row major. Products of one-step matrices have det 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferMatrix {
    pub entries: [[f64; 2]; 2],
}

impl TransferMatrix {
    pub const IDENTITY: Self = Self {
        entries: [[1.0, 0.0], [0.0, 1.0]],
    };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self {
            entries: [[a, b], [c, d]],
        }
    }

    /// The one-step matrix `[[E - v, -1], [1, 0]]`.
    pub fn step(energy: f64, v: f64) -> Self {
        Self::new(energy - v, -1.0, 1.0, 0.0)
    }

    /// Rotation by `theta` radians.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c, -s, s, c)
    }

    pub fn det(&self) -> f64 {
        let [[a, b], [c, d]] = self.entries;
        a * d - b * c
    }

    pub fn trace(&self) -> f64 {
        self.entries[0][0] + self.entries[1][1]
    }

    /// Frobenius norm squared.
    pub fn frobenius_sq(&self) -> f64 {
        self.entries.iter().flatten().map(|x| x * x).sum()
    }

    /// Largest singular value.
    pub fn norm(&self) -> f64 {
        let [[a, b], [c, d]] = self.entries;
        0.5 * ((a + d).hypot(b - c) + (a - d).hypot(b + c))
    }

    /// `true` if `|det - 1| <= 1e-12 (1 + |entries|^2)`.
    pub fn det_is_one(&self) -> bool {
        (self.det() - 1.0).abs() <= 1e-12 * (1.0 + self.frobenius_sq())
    }

    pub fn apply(&self, x: [f64; 2]) -> [f64; 2] {
        let [[a, b], [c, d]] = self.entries;
        [a * x[0] + b * x[1], c * x[0] + d * x[1]]
    }

    pub fn scaled(&self, s: f64) -> Self {
        let [[a, b], [c, d]] = self.entries;
        Self::new(a * s, b * s, c * s, d * s)
    }
}

impl Mul for TransferMatrix {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let [[a, b], [c, d]] = self.entries;
        let [[e, f], [g, h]] = rhs.entries;
        Self::new(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
    }
}

/// `S_(start+length) ... S_(start+1)`.
pub fn transfer_matrix(
    energy: f64,
    v: &impl Potential,
    start: i64,
    length: u64,
) -> TransferMatrix {
    (1..=length as i64).fold(TransferMatrix::IDENTITY, |acc, j| {
        TransferMatrix::step(energy, v.value(start + j)) * acc
    })
}

/// The same product kept as `scale * exp(log_scale)`, renormalizing whenever
/// the entries leave a safe range.
pub(crate) fn transfer_matrix_log(
    energy: f64,
    v: &impl Potential,
    start: i64,
    length: u64,
) -> (TransferMatrix, f64) {
    let mut m = TransferMatrix::IDENTITY;
    let mut log_scale = 0.0;
    for j in 1..=length as i64 {
        m = TransferMatrix::step(energy, v.value(start + j)) * m;
        let size = m.entries.iter().flatten().fold(0.0f64, |s, x| s.max(x.abs()));
        if size > 1e100 {
            m = m.scaled(1.0 / size);
            log_scale += size.ln();
        }
    }
    (m, log_scale)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovSample {
    pub energy: f64,
    pub exponent: f64,
    pub period_used: usize,
}

/// `log(|x|/2 + sqrt(x^2/4 - 1))` for `|x| >= 2`, from `x = scaled * e^log_scale`.
fn acosh_half(scaled: f64, log_scale: f64) -> f64 {
    if log_scale == 0.0 {
        let h = scaled.abs() / 2.0;
        if h <= 1.0 + 5e-13 {
            return 0.0;
        }
        (h + (h * h - 1.0).sqrt()).ln()
    } else {
        // |x| > 1e90 here; the correction -x^-2 is below rounding.
        scaled.abs().ln() + log_scale
    }
}

/// Lyapunov exponent of a periodic potential from the trace of the
/// period-length transfer matrix. `|trace|` within `1e-12` of 2 counts as 2.
pub fn lyapunov_periodic(energy: f64, p: &PeriodicPotential) -> LyapunovSample {
    let period = p.period();
    let (m, log_scale) = transfer_matrix_log(energy, p, 0, period as u64);
    LyapunovSample {
        energy,
        exponent: acosh_half(m.trace(), log_scale) / period as f64,
        period_used: period,
    }
}

/// `(1/n) log |A_n|` from a long product renormalized every 32 steps.
/// Slow and approximate; kept as a cross-check.
pub fn lyapunov_product(energy: f64, v: &impl Potential, n: u64) -> f64 {
    // Track one column; the column growth rate matches the norm growth
    // rate for almost every start vector.
    let mut x = [1.0f64, 0.0];
    let mut log_growth = 0.0;
    for j in 1..=n as i64 {
        x = TransferMatrix::step(energy, v.value(j)).apply(x);
        if j % 32 == 0 || j == n as i64 {
            let r = x[0].hypot(x[1]);
            log_growth += r.ln();
            x = [x[0] / r, x[1] / r];
        }
    }
    log_growth / n as f64
}

/// Result of following Lyapunov exponents along a sequence of approximants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovLimit {
    /// Exponent of the last approximant.
    pub sample: LyapunovSample,
    pub trail: Vec<LyapunovSample>,
    /// `|L_last - L_previous|`, absent for a single approximant.
    pub last_difference: Option<f64>,
    pub converged: bool,
    pub warning: Option<String>,
}

pub fn lyapunov_limit(
    energy: f64,
    approximants: &[PeriodicPotential],
    tol: f64,
) -> Result<LyapunovLimit> {
    if approximants.is_empty() {
        return Err(Error::Value("need at least one approximant".into()));
    }
    let trail: Vec<LyapunovSample> = approximants
        .iter()
        .map(|p| lyapunov_periodic(energy, p))
        .collect();
    let sample = *trail.last().expect("nonempty");
    let last_difference = (trail.len() >= 2)
        .then(|| (sample.exponent - trail[trail.len() - 2].exponent).abs());
    let converged = last_difference.is_none_or(|d| d <= tol);
    let warning = (!converged).then(|| {
        format!(
            "last two exponents differ by {} > {tol}",
            last_difference.expect("set when not converged")
        )
    });
    Ok(LyapunovLimit {
        sample,
        trail,
        last_difference,
        converged,
        warning,
    })
}

/// `4 pi p / C`: a bound on the measure of the spectrum when the transfer
/// matrices have norm at least `C` over it.
pub fn spectrum_measure_bound(p: &PeriodicPotential, c: f64) -> Result<f64> {
    if !(c >= 1.0) {
        return Err(Error::Value(format!("C = {c} must be at least 1")));
    }
    Ok(4.0 * std::f64::consts::PI * p.period() as f64 / c)
}

/// `(1/(16 mu^2), 16 mu^2)` with `mu` the top singular value of `m`.
pub fn angle_distortion_bounds(m: &TransferMatrix) -> Result<(f64, f64)> {
    if (m.det() - 1.0).abs() > 1e-9 {
        return Err(Error::Det(m.det()));
    }
    let mu2 = m.norm().powi(2);
    Ok((1.0 / (16.0 * mu2), 16.0 * mu2))
}

/// Unsigned angle in `[0, pi]` between two nonzero vectors.
pub fn vector_angle(u: [f64; 2], v: [f64; 2]) -> f64 {
    let cross = u[0] * v[1] - u[1] * v[0];
    let dot = u[0] * v[0] + u[1] * v[1];
    cross.abs().atan2(dot)
}

/// The angle between `u` and `v` before and after applying `m`.
pub fn image_angle(m: &TransferMatrix, u: [f64; 2], v: [f64; 2]) -> (f64, f64) {
    (vector_angle(u, v), vector_angle(m.apply(u), m.apply(v)))
}
