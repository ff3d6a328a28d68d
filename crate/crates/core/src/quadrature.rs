//! Tanh-sinh quadrature on finite intervals.
//!
//! The integrand receives the abscissa together with its exact distances to
//! both endpoints, so integrands with endpoint singularities can be
//! evaluated accurately closer to the endpoint than `f64` spacing allows.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Difference of the last two refinement levels.
    pub error: f64,
    pub evaluations: usize,
    pub level: u32,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TanhSinh {
    pub rel_tol: f64,
    /// Absolute floor below which a vanishing integral counts as converged.
    pub abs_tol: f64,
    pub max_level: u32,
}

impl Default for TanhSinh {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-300,
            max_level: 12,
        }
    }
}

const T_MAX: f64 = 6.5;

impl TanhSinh {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    /// `int_a^b f`, where `f(x, x - a, b - x)`.
    pub fn integrate<F>(&self, f: F, a: f64, b: f64) -> Result<QuadratureResult>
    where
        F: Fn(f64, f64, f64) -> f64,
    {
        if !(a.is_finite() && b.is_finite()) || a > b {
            return Err(Error::Value(format!("bad interval [{a}, {b}]")));
        }
        if a == b {
            return Ok(QuadratureResult {
                value: 0.0,
                error: 0.0,
                evaluations: 0,
                level: 0,
            });
        }
        let c = 0.5 * (b - a);
        let mut evaluations = 0usize;
        let n0 = T_MAX as i64;
        let mut sum = node_sum(&f, a, b, (-n0..=n0).map(|j| j as f64), &mut evaluations)?;
        let mut value = c * sum;
        let mut error = f64::INFINITY;
        for level in 1..=self.max_level {
            let h = 0.5f64.powi(level as i32);
            let count = (T_MAX / h) as i64;
            let odd = (-count..=count).filter(|j| j % 2 != 0).map(|j| j as f64 * h);
            let fresh = node_sum(&f, a, b, odd, &mut evaluations)?;
            sum = 0.5 * sum + h * fresh;
            let next = c * sum;
            error = (next - value).abs();
            value = next;
            if level >= 3 && error <= (self.rel_tol * value.abs()).max(self.abs_tol) {
                return Ok(QuadratureResult {
                    value,
                    error,
                    evaluations,
                    level,
                });
            }
        }
        Err(Error::Quadrature {
            rel_tol: self.rel_tol,
            estimate: value,
            error,
        })
    }

    /// `int_a^b f` for an integrand without endpoint trouble.
    pub fn integrate_plain<F>(&self, f: F, a: f64, b: f64) -> Result<QuadratureResult>
    where
        F: Fn(f64) -> f64,
    {
        self.integrate(|x, _, _| f(x), a, b)
    }
}

/// `sum_t w_t f(x_t)` over the given nodes `t` on the reference interval.
fn node_sum<F>(
    f: &F,
    a: f64,
    b: f64,
    ts: impl Iterator<Item = f64>,
    evaluations: &mut usize,
) -> Result<f64>
where
    F: Fn(f64, f64, f64) -> f64,
{
    let c = 0.5 * (b - a);
    let mut s = 0.0;
    for t in ts {
        let (x, w, v) = if t == 0.0 {
            (a + c, FRAC_PI_2, f(a + c, c, c))
        } else {
            let u = FRAC_PI_2 * t.abs().sinh();
            let e = (-2.0 * u).exp();
            // Distance to the nearer endpoint.
            let delta = c * 2.0 * e / (1.0 + e);
            let w = FRAC_PI_2 * t.abs().cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e));
            if delta == 0.0 || w == 0.0 {
                continue;
            }
            let far = 2.0 * c - delta;
            if t > 0.0 {
                (b - delta, w, f(b - delta, far, delta))
            } else {
                (a + delta, w, f(a + delta, delta, far))
            }
        };
        *evaluations += 1;
        if !v.is_finite() {
            return Err(Error::Value(format!("integrand is {v} at {x}")));
        }
        s += w * v;
    }
    Ok(s)
}
