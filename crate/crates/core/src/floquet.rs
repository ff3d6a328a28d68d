//! Floquet-Bloch analysis of periodic potentials.
//!
//! Spectral integrals are taken in `theta = k p in (0, pi)`. For `theta` in
//! that range the `j`-th eigenvalue of `J(theta / p)` traces band `j` once,
//! and `dE = |dE/dtheta| dtheta`. With Bloch solutions normalized to unit
//! mass over one period the spectral density of `u` is
//! `g = (1/2pi) (|u+|^2 + |u-|^2) p |dk/dE|`, which makes `int g dE = |u|^2`.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cocycle::transfer_matrix;
use crate::error::{Error, Result};
use crate::potentials::{PeriodicPotential, Potential};
use crate::quadrature::TanhSinh;

/// Energies closer than this (in `2 - |Delta|`) to a band edge are refused.
pub const EDGE_TOL: f64 = 1e-12;

/// `Delta(E)`, the trace of the period-length transfer matrix.
pub fn discriminant(energy: f64, p: &PeriodicPotential) -> f64 {
    transfer_matrix(energy, p, 0, p.period() as u64).trace()
}

/// A polynomial on `[lo, hi]` in the Chebyshev basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ChebyshevSeries {
    lo: f64,
    hi: f64,
    coeffs: Vec<f64>,
}

impl ChebyshevSeries {
    /// Interpolates `f` at `degree + 1` Chebyshev points; exact for
    /// polynomials of that degree.
    pub fn interpolate(f: impl Fn(f64) -> f64, lo: f64, hi: f64, degree: usize) -> Self {
        let n = degree + 1;
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let angles: Vec<f64> = (0..n).map(|m| PI * (m as f64 + 0.5) / n as f64).collect();
        let values: Vec<f64> = angles.iter().map(|a| f(mid + half * a.cos())).collect();
        let coeffs = (0..n)
            .map(|j| {
                let s: f64 = values
                    .iter()
                    .zip(&angles)
                    .map(|(v, a)| v * (j as f64 * a).cos())
                    .sum();
                s * if j == 0 { 1.0 } else { 2.0 } / n as f64
            })
            .collect();
        Self { lo, hi, coeffs }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = (2.0 * x - self.lo - self.hi) / (self.hi - self.lo);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * t * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + self.coeffs[0]
    }

    pub fn derivative(&self) -> Self {
        let n = self.coeffs.len();
        let scale = 2.0 / (self.hi - self.lo);
        if n <= 1 {
            return Self {
                lo: self.lo,
                hi: self.hi,
                coeffs: vec![0.0],
            };
        }
        let mut d = vec![0.0; n + 1];
        for k in (1..n).rev() {
            d[k - 1] = d[k + 1] + 2.0 * k as f64 * self.coeffs[k];
        }
        d.truncate(n - 1);
        d[0] *= 0.5;
        Self {
            lo: self.lo,
            hi: self.hi,
            coeffs: d.into_iter().map(|c| c * scale).collect(),
        }
    }
}

/// `Delta` and its first three derivatives as Chebyshev series on
/// `[min V - 2, max V + 2]`, which holds the whole spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscriminantPolynomial {
    pub delta: ChebyshevSeries,
    pub d1: ChebyshevSeries,
    pub d2: ChebyshevSeries,
    pub d3: ChebyshevSeries,
}

pub fn discriminant_polynomial(p: &PeriodicPotential) -> DiscriminantPolynomial {
    let lo = p.values().iter().copied().fold(f64::INFINITY, f64::min) - 2.0;
    let hi = p.values().iter().copied().fold(f64::NEG_INFINITY, f64::max) + 2.0;
    let delta = ChebyshevSeries::interpolate(|e| discriminant(e, p), lo, hi, p.period());
    let d1 = delta.derivative();
    let d2 = d1.derivative();
    let d3 = d2.derivative();
    DiscriminantPolynomial { delta, d1, d2, d3 }
}

/// `J` with corner phase `z = e^(i k p)`, sites `l..l+p`.
fn floquet_from_phase(p: &PeriodicPotential, z: Complex64, l: i64) -> DMatrix<Complex64> {
    let n = p.period();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        m[(j, j)] = Complex64::from(p.value(l + j as i64));
    }
    match n {
        1 => m[(0, 0)] += z + z.conj(),
        _ => {
            for j in 0..n - 1 {
                m[(j, j + 1)] += 1.0;
                m[(j + 1, j)] += 1.0;
            }
            m[(0, n - 1)] += z.conj();
            m[(n - 1, 0)] += z;
        }
    }
    m
}

/// `dJ/dtheta` for `theta = k p`, at phase `z`.
fn floquet_phase_derivative(n: usize, z: Complex64) -> DMatrix<Complex64> {
    let i = Complex64::i();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    m[(0, n - 1)] += -i * z.conj();
    m[(n - 1, 0)] += i * z;
    m
}

/// The Floquet matrix `J_l(k)`: the restriction of `H` to `l..l+p` with
/// boundary condition `u(n + p) = e^(ikp) u(n)`.
pub fn floquet_matrix(p: &PeriodicPotential, k: f64, l: i64) -> DMatrix<Complex64> {
    floquet_from_phase(p, Complex64::from_polar(1.0, k * p.period() as f64), l)
}

fn sorted_eigen(m: DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (values, vectors)
}

fn real_eigenvalues(p: &PeriodicPotential, sign: f64) -> Vec<f64> {
    let n = p.period();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        m[(j, j)] = p.values()[j];
    }
    if n == 1 {
        m[(0, 0)] += 2.0 * sign;
    } else {
        for j in 0..n - 1 {
            m[(j, j + 1)] += 1.0;
            m[(j + 1, j)] += 1.0;
        }
        m[(0, n - 1)] += sign;
        m[(n - 1, 0)] += sign;
    }
    let mut v: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `Delta(E) = 2 + prod_j (E - l_j)` over the eigenvalues of `J(0)`.
///
/// Unlike the transfer-matrix trace this stays accurate for long periods
/// with large Lyapunov exponents, where the partial products cancel.
fn discriminant_from_roots(energy: f64, periodic_edges: &[f64]) -> f64 {
    let mut sign = 1.0;
    let mut log_mag = 0.0;
    for l in periodic_edges {
        let f = energy - l;
        if f == 0.0 {
            return 2.0;
        }
        sign *= f.signum();
        log_mag += f.abs().ln();
    }
    2.0 + sign * log_mag.min(700.0).exp()
}

/// Ordered closed bands of a periodic operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandSpectrum {
    bands: Vec<[f64; 2]>,
    period: usize,
}

impl BandSpectrum {
    pub fn from_bands(bands: Vec<[f64; 2]>, period: usize) -> Result<Self> {
        if bands.is_empty() || bands.len() > period.max(1) {
            return Err(Error::Value(format!("{} bands for period {period}", bands.len())));
        }
        for b in &bands {
            if !(b[0] <= b[1]) {
                return Err(Error::Value(format!("band [{}, {}] is reversed", b[0], b[1])));
            }
        }
        for w in bands.windows(2) {
            if w[0][1] > w[1][0] {
                return Err(Error::Value("bands overlap or are out of order".into()));
            }
        }
        Ok(Self { bands, period })
    }

    pub fn bands(&self) -> &[[f64; 2]] {
        &self.bands
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn count(&self) -> usize {
        self.bands.len()
    }

    pub fn total_length(&self) -> f64 {
        self.bands.iter().map(|b| b[1] - b[0]).sum()
    }

    pub fn min(&self) -> f64 {
        self.bands[0][0]
    }

    pub fn max(&self) -> f64 {
        self.bands[self.bands.len() - 1][1]
    }

    /// The `count - 1` gaps between consecutive bands, possibly empty.
    pub fn gaps(&self) -> Vec<[f64; 2]> {
        self.bands.windows(2).map(|w| [w[0][1], w[1][0]]).collect()
    }

    pub fn contains(&self, energy: f64, tol: f64) -> bool {
        self.bands
            .iter()
            .any(|b| energy >= b[0] - tol && energy <= b[1] + tol)
    }

    /// Sorted list of all band edges.
    pub fn edges(&self) -> Vec<f64> {
        self.bands.iter().flat_map(|b| [b[0], b[1]]).collect()
    }

    /// Bands with gaps of size at most `tol` closed up.
    pub fn merged(&self, tol: f64) -> Vec<[f64; 2]> {
        let mut out: Vec<[f64; 2]> = Vec::new();
        for b in &self.bands {
            match out.last_mut() {
                Some(last) if b[0] - last[1] <= tol => last[1] = last[1].max(b[1]),
                _ => out.push(*b),
            }
        }
        out
    }
}

/// Bands from the eigenvalues of `J(0)` and `J(pi/p)`, paired in order.
pub fn band_spectrum(p: &PeriodicPotential, tol: f64) -> Result<BandSpectrum> {
    if !(tol > 0.0) {
        return Err(Error::Value(format!("tolerance {tol} must be positive")));
    }
    let n = p.period();
    if n == 1 {
        let v = p.values()[0];
        return BandSpectrum::from_bands(vec![[v - 2.0, v + 2.0]], 1);
    }
    let periodic_edges = real_eigenvalues(p, 1.0);
    let mut edges = periodic_edges.clone();
    edges.extend(real_eigenvalues(p, -1.0));
    edges.sort_by(f64::total_cmp);
    let mut bands: Vec<[f64; 2]> = edges.chunks(2).map(|c| [c[0], c[1]]).collect();
    // Clean up reordering noise between touching bands.
    for i in 1..bands.len() {
        if bands[i][0] < bands[i - 1][1] {
            bands[i][0] = bands[i - 1][1];
        }
    }
    for b in &bands {
        if b[1] - b[0] <= tol {
            continue;
        }
        let mid = 0.5 * (b[0] + b[1]);
        let d = discriminant_from_roots(mid, &periodic_edges);
        if d.abs() > 2.0 + tol {
            return Err(Error::Tolerance {
                tol,
                detail: format!("|Delta| = {} at the midpoint of [{}, {}]", d.abs(), b[0], b[1]),
            });
        }
    }
    BandSpectrum::from_bands(bands, n)
}

/// Normalized Bloch solutions at an energy inside a band.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochPair {
    pub energy: f64,
    /// Quasimomentum in `(0, pi/p)`.
    pub k: f64,
    pub phi_plus: Vec<Complex64>,
    pub phi_minus: Vec<Complex64>,
}

impl BlochPair {
    pub fn period(&self) -> usize {
        self.phi_plus.len()
    }

    /// `e^(i k p)`.
    pub fn multiplier(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.k * self.period() as f64)
    }

    /// `phi+` extended to all of `Z` by the Floquet relation.
    pub fn plus_at(&self, n: i64) -> Complex64 {
        extend(&self.phi_plus, self.multiplier(), n)
    }

    pub fn minus_at(&self, n: i64) -> Complex64 {
        extend(&self.phi_minus, self.multiplier().conj(), n)
    }
}

fn extend(cell: &[Complex64], z: Complex64, n: i64) -> Complex64 {
    let p = cell.len() as i64;
    let (q, r) = (n.div_euclid(p), n.rem_euclid(p));
    cell[r as usize] * z.powi(q as i32)
}

/// One period of the Bloch solution with multiplier `cos + i sin`, from the
/// eigenvector of the period-length transfer matrix. Normalized to unit
/// mass with the first entry real and positive.
fn bloch_cell(energy: f64, p: &PeriodicPotential, cos: f64, sin: f64) -> Vec<Complex64> {
    let n = p.period();
    let m = transfer_matrix(energy, p, 0, n as u64).entries;
    let lambda = Complex64::new(cos, sin);
    let [[a, b], [c, d]] = m;
    // Eigenvector (u(1), u(0)) from whichever row of A - lambda is larger.
    let r1 = (Complex64::from(b), lambda - a);
    let r2 = (lambda - d, Complex64::from(c));
    let size = |v: &(Complex64, Complex64)| v.0.norm_sqr() + v.1.norm_sqr();
    let (u1, u0) = if size(&r1) >= size(&r2) { r1 } else { r2 };
    let mut u = Vec::with_capacity(n);
    u.push(u0);
    if n > 1 {
        u.push(u1);
    }
    for j in 1..n.saturating_sub(1) {
        let next = (energy - p.value(j as i64)) * u[j] - u[j - 1];
        u.push(next);
    }
    let mass: f64 = u.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let phase = if u[0].norm() > 0.0 {
        u[0].conj() / u[0].norm()
    } else {
        Complex64::from(1.0)
    };
    u.into_iter().map(|x| x * phase / mass).collect()
}

fn inside_band(energy: f64, p: &PeriodicPotential) -> Result<f64> {
    let d = discriminant(energy, p);
    if d.abs() >= 2.0 - EDGE_TOL {
        return Err(Error::BandEdge {
            energy,
            discriminant: d.abs(),
        });
    }
    Ok(d)
}

pub fn bloch_solutions(energy: f64, p: &PeriodicPotential) -> Result<BlochPair> {
    let d = inside_band(energy, p)?;
    let cos = d / 2.0;
    let sin = (1.0 - cos * cos).sqrt();
    let phi_plus = bloch_cell(energy, p, cos, sin);
    let phi_minus = phi_plus.iter().map(|x| x.conj()).collect();
    Ok(BlochPair {
        energy,
        k: sin.atan2(cos) / p.period() as f64,
        phi_plus,
        phi_minus,
    })
}

/// `|dk/dE| = |Delta'| / |2 p sin(kp)|`.
pub fn dk_de(energy: f64, p: &PeriodicPotential) -> Result<f64> {
    dk_de_with(energy, p, &discriminant_polynomial(p))
}

fn dk_de_with(energy: f64, p: &PeriodicPotential, poly: &DiscriminantPolynomial) -> Result<f64> {
    inside_band(energy, p)?;
    Ok(dk_de_unchecked(energy, p, poly))
}

fn dk_de_unchecked(energy: f64, p: &PeriodicPotential, poly: &DiscriminantPolynomial) -> f64 {
    let d = discriminant(energy, p);
    let sin = (1.0 - d * d / 4.0).max(0.0).sqrt();
    poly.d1.eval(energy).abs() / (2.0 * p.period() as f64 * sin)
}

/// A finitely supported vector on `Z`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FiniteVector {
    entries: BTreeMap<i64, f64>,
}

impl FiniteVector {
    pub fn new(entries: impl IntoIterator<Item = (i64, f64)>) -> Self {
        let mut map = BTreeMap::new();
        for (n, v) in entries {
            *map.entry(n).or_insert(0.0) += v;
        }
        Self { entries: map }
    }

    pub fn delta(n: i64) -> Self {
        Self::new([(n, 1.0)])
    }

    pub fn is_zero(&self) -> bool {
        self.entries.values().all(|v| *v == 0.0)
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.values().map(|v| v * v).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.entries.iter().map(|(n, v)| (*n, *v))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.iter().map(|(n, v)| (n, v * s)))
    }
}

/// `|<phi, u>|^2 + |<conj phi, u>|^2` for a cell with multiplier `z`.
fn projection_sum(cell: &[Complex64], z: Complex64, u: &FiniteVector) -> f64 {
    let (mut plus, mut minus) = (Complex64::from(0.0), Complex64::from(0.0));
    for (n, v) in u.iter() {
        let phi = extend(cell, z, n);
        plus += phi.conj() * v;
        minus += phi * v;
    }
    plus.norm_sqr() + minus.norm_sqr()
}

/// Evaluates `g` in the energy variable, resolving energies very close to a
/// band edge by a Taylor expansion of `Delta` about the edge.
struct DensityModel<'a> {
    p: &'a PeriodicPotential,
    poly: DiscriminantPolynomial,
    /// Band edges with the sign of `Delta` there.
    edges: Vec<(f64, f64)>,
    bands: BandSpectrum,
}

impl<'a> DensityModel<'a> {
    fn new(p: &'a PeriodicPotential) -> Result<Self> {
        let bands = band_spectrum(p, 1e-9)?;
        let edges = bands
            .edges()
            .into_iter()
            .map(|e| (e, discriminant(e, p).signum()))
            .collect();
        Ok(Self {
            p,
            poly: discriminant_polynomial(p),
            edges,
            bands,
        })
    }

    fn edge_near(&self, x: f64) -> Option<(f64, f64)> {
        self.edges
            .iter()
            .copied()
            .find(|(e, _)| (x - e).abs() <= 1e-12 * (1.0 + e.abs()))
    }

    /// `g` at `x = anchor + offset`; `anchor` is used for the Taylor step
    /// when it is a band edge.
    fn density(&self, u: &FiniteVector, anchor: f64, offset: f64) -> f64 {
        let x = anchor + offset;
        let (gap_dist, sum_dist) = match self.edge_near(anchor) {
            Some((e, sigma)) if offset.abs() < 1e-7 => {
                let t = (anchor - e) + offset;
                let diff = t * (self.poly.d1.eval(e) + t * (self.poly.d2.eval(e) / 2.0 + t * self.poly.d3.eval(e) / 6.0));
                // 2 - sigma Delta and 2 + sigma Delta.
                (-sigma * diff, 4.0 + sigma * diff)
            }
            _ => {
                let d = discriminant(x, self.p);
                (2.0 - d.abs(), 2.0 + d.abs())
            }
        };
        if gap_dist <= 0.0 {
            return 0.0;
        }
        let sin = (gap_dist * sum_dist).sqrt() / 2.0;
        let d = discriminant(x, self.p);
        let cos = d.signum() * (1.0 - gap_dist / 2.0);
        let cell = bloch_cell(x, self.p, cos, sin);
        let z = Complex64::new(cos, sin);
        let s = projection_sum(&cell, z, u);
        s / TAU * self.poly.d1.eval(x).abs() / (2.0 * sin)
    }

    /// `int |g|^t` or `int g` over one interval, by tanh-sinh in `E`.
    fn integrate_over(
        &self,
        u: &FiniteVector,
        a: f64,
        b: f64,
        power: f64,
        q: &TanhSinh,
    ) -> Result<(f64, f64)> {
        let r = q.integrate(
            |_, da, db| {
                let g = if da <= db {
                    self.density(u, a, da)
                } else {
                    self.density(u, b, -db)
                };
                g.powf(power)
            },
            a,
            b,
        );
        relaxed(r)
    }
}

/// Tolerance at which spectral quadratures are reported as failed.
pub const QUADRATURE_REL_TOL: f64 = 1e-4;

/// Accepts a quadrature that missed its tight target but still meets
/// `QUADRATURE_REL_TOL`.
fn relaxed(r: Result<crate::quadrature::QuadratureResult>) -> Result<(f64, f64)> {
    match r {
        Ok(q) => Ok((q.value, q.error)),
        Err(Error::Quadrature {
            estimate, error, ..
        }) if error <= QUADRATURE_REL_TOL * estimate.abs() => Ok((estimate, error)),
        Err(Error::Quadrature {
            estimate, error, ..
        }) => Err(Error::Quadrature {
            rel_tol: QUADRATURE_REL_TOL,
            estimate,
            error,
        }),
        Err(e) => Err(e),
    }
}

fn spectral_quadrature() -> TanhSinh {
    TanhSinh {
        rel_tol: 1e-10,
        abs_tol: 1e-14,
        max_level: 10,
    }
}

/// `g_(V,u)(E)`; zero outside the spectrum.
pub fn spectral_density(p: &PeriodicPotential, u: &FiniteVector, energy: f64) -> Result<f64> {
    let d = discriminant(energy, p);
    if d.abs() > 2.0 {
        return Ok(0.0);
    }
    inside_band(energy, p)?;
    if u.is_zero() {
        return Ok(0.0);
    }
    let cos = d / 2.0;
    let sin = (1.0 - cos * cos).sqrt();
    let cell = bloch_cell(energy, p, cos, sin);
    let s = projection_sum(&cell, Complex64::new(cos, sin), u);
    Ok(s / TAU * p.period() as f64 * dk_de(energy, p)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralDensityProfile {
    pub potential: PeriodicPotential,
    pub vector_support: FiniteVector,
    /// `(E, g)`; energies at band edges are left out.
    pub samples: Vec<(f64, f64)>,
}

pub fn density_profile(
    p: &PeriodicPotential,
    u: &FiniteVector,
    energies: &[f64],
) -> Result<SpectralDensityProfile> {
    let mut samples = Vec::with_capacity(energies.len());
    for &e in energies {
        match spectral_density(p, u, e) {
            Ok(g) => samples.push((e, g)),
            Err(Error::BandEdge { .. }) => {}
            Err(err) => return Err(err),
        }
    }
    Ok(SpectralDensityProfile {
        potential: p.clone(),
        vector_support: u.clone(),
        samples,
    })
}

/// `int g dE` band by band in the energy variable.
pub fn density_integral(p: &PeriodicPotential, u: &FiniteVector) -> Result<f64> {
    if u.is_zero() {
        return Ok(0.0);
    }
    let model = DensityModel::new(p)?;
    let q = spectral_quadrature();
    let mut total = 0.0;
    for b in model.bands.bands() {
        total += model.integrate_over(u, b[0], b[1], 1.0, &q)?.0;
    }
    Ok(total)
}

/// At each `theta in (0, pi)`: per band, `(E, S, |dE/dtheta|)` with
/// `S = |u+|^2 + |u-|^2`.
fn theta_slice(
    p: &PeriodicPotential,
    u: &FiniteVector,
    from_zero: f64,
    from_pi: f64,
) -> Vec<(f64, f64, f64)> {
    // e^(i theta), taken from the nearer endpoint for accuracy.
    let z = if from_zero <= from_pi {
        Complex64::from_polar(1.0, from_zero)
    } else {
        -Complex64::from_polar(1.0, -from_pi)
    };
    let n = p.period();
    let (values, vectors) = sorted_eigen(floquet_from_phase(p, z, 0));
    let dj = floquet_phase_derivative(n, z);
    (0..n)
        .map(|j| {
            let psi = vectors.column(j);
            let slope = (psi.adjoint() * &dj * psi)[(0, 0)].re;
            let cell: Vec<Complex64> = psi.iter().copied().collect();
            (values[j], projection_sum(&cell, z, u), slope.abs())
        })
        .collect()
}

/// `int g dE` computed as `(1/2pi) int_0^pi sum_j S_j dtheta`.
pub fn parseval_integral(p: &PeriodicPotential, u: &FiniteVector) -> Result<f64> {
    if u.is_zero() {
        return Ok(0.0);
    }
    let r = spectral_quadrature().integrate(
        |_, d0, dpi| {
            theta_slice(p, u, d0, dpi)
                .iter()
                .map(|s| s.1)
                .sum::<f64>()
                / TAU
        },
        0.0,
        PI,
    );
    Ok(relaxed(r)?.0)
}

/// `int |g|^t dE = sum_j int_0^pi (S_j / 2pi)^t |dE/dtheta|^(1-t) dtheta`.
pub fn density_lt_norm(p: &PeriodicPotential, u: &FiniteVector, t: f64) -> Result<f64> {
    if !(t > 1.0 && t < 2.0) {
        return Err(Error::Value(format!("exponent t = {t} must lie in (1, 2)")));
    }
    if u.is_zero() {
        return Ok(0.0);
    }
    let r = spectral_quadrature().integrate(
        |_, d0, dpi| {
            theta_slice(p, u, d0, dpi)
                .iter()
                .map(|&(_, s, slope)| {
                    if s == 0.0 {
                        0.0
                    } else {
                        (s / TAU).powf(t) * slope.powf(1.0 - t)
                    }
                })
                .sum()
        },
        0.0,
        PI,
    );
    Ok(relaxed(r)?.0)
}

/// `int |g_(P_n,u) - g_(P,u)|^t dE` for each `P_n`.
pub fn density_convergence(
    sequence: &[PeriodicPotential],
    p: &PeriodicPotential,
    u: &FiniteVector,
    t: f64,
) -> Result<Vec<f64>> {
    if !(t > 1.0 && t < 2.0) {
        return Err(Error::Value(format!("exponent t = {t} must lie in (1, 2)")));
    }
    if let Some(bad) = sequence.iter().find(|q| q.period() != p.period()) {
        return Err(Error::Value(format!(
            "period {} differs from {}",
            bad.period(),
            p.period()
        )));
    }
    let target = DensityModel::new(p)?;
    let q = spectral_quadrature();
    let mut out = Vec::with_capacity(sequence.len());
    for pn in sequence {
        if pn == p || u.is_zero() {
            out.push(0.0);
            continue;
        }
        let model = DensityModel::new(pn)?;
        let mut cuts: Vec<f64> = target.bands.edges();
        cuts.extend(model.bands.edges());
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + b.abs()));
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mid = 0.5 * (a + b);
            if !(target.bands.contains(mid, 0.0) || model.bands.contains(mid, 0.0)) {
                continue;
            }
            let r = q.integrate(
                |_, da, db| {
                    let (anchor, offset) = if da <= db { (a, da) } else { (b, -db) };
                    let g1 = model.density(u, anchor, offset);
                    let g0 = target.density(u, anchor, offset);
                    (g1 - g0).abs().powf(t)
                },
                a,
                b,
            );
            total += relaxed(r)?.0;
        }
        out.push(total);
    }
    Ok(out)
}
