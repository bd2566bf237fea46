//! Zeros of the run polynomial `q_d`.
//!
//! In `w = (1−p)z` the polynomial reads `1 − c·Σ_{j=1}^{d} w^j` with
//! `c = p/(1−p)`, whose zeros sit near the unit circle for every `p`, so the
//! companion matrix is well scaled. Eigenvalues come from a real Schur
//! decomposition and each one gets a Newton step.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) const RESIDUAL_TOL: f64 = 1e-10;
pub(crate) const CLUSTER_RADIUS: f64 = 1e-7;

/// `S(w) = Σ_{j=1}^{d} w^j` and `S'(w)`.
pub(crate) fn power_sum(w: Complex64, d: usize) -> (Complex64, Complex64) {
    let mut s = Complex64::new(0.0, 0.0);
    let mut ds = Complex64::new(0.0, 0.0);
    for _ in 0..d {
        ds = ds * w + s;
        s = s * w + 1.0;
    }
    // Horner above builds Σ_{j=0}^{d-1} w^j; shift by one power.
    (s * w, ds * w + s)
}

/// Zeros of `q_d` as `(w, residual)` pairs, where `z = w/(1−p)` and the
/// residual is `|q|` relative to the sum of its term magnitudes.
pub(crate) fn q_zeros_scaled(d: usize, p: f64) -> Result<Vec<(Complex64, f64)>> {
    let c = p / (1.0 - p);
    // Monic form: w^d + w^{d−1} + … + w − 1/c.
    let mut companion = DMatrix::<f64>::zeros(d, d);
    for j in 0..d {
        companion[(0, j)] = if j == d - 1 { 1.0 / c } else { -1.0 };
    }
    for i in 1..d {
        companion[(i, i - 1)] = 1.0;
    }
    let schur = nalgebra::linalg::Schur::try_new(companion, f64::EPSILON, 200 * d.max(10))
        .ok_or_else(|| Error::Numeric(format!("eigenvalue iteration did not converge for d = {d}")))?;
    let eig = schur.complex_eigenvalues();
    Ok(eig
        .iter()
        .map(|&w0| {
            let w = newton_step(w0, d, c);
            (w, residual(w, d, c))
        })
        .collect())
}

fn newton_step(w: Complex64, d: usize, c: f64) -> Complex64 {
    let (s, ds) = power_sum(w, d);
    let f = 1.0 - c * s;
    let df = -c * ds;
    if df.norm() == 0.0 {
        return w;
    }
    let next = w - f / df;
    if residual(next, d, c) <= residual(w, d, c) {
        next
    } else {
        w
    }
}

fn residual(w: Complex64, d: usize, c: f64) -> f64 {
    let (s, _) = power_sum(w, d);
    let r = w.norm();
    let scale = 1.0 + c * (1..=d).map(|j| r.powi(j as i32)).sum::<f64>();
    (1.0 - c * s).norm() / scale
}

/// Groups points lying within `radius` of a cluster's first member; returns
/// `(centroid, size)` pairs.
pub(crate) fn cluster(points: &[Complex64], radius: f64) -> Vec<(Complex64, usize)> {
    let mut groups: Vec<(Complex64, Vec<Complex64>)> = Vec::new();
    for &z in points {
        match groups.iter_mut().find(|(seed, _)| (*seed - z).norm() <= radius) {
            Some((_, members)) => members.push(z),
            None => groups.push((z, vec![z])),
        }
    }
    groups
        .into_iter()
        .map(|(_, m)| (m.iter().sum::<Complex64>() / m.len() as f64, m.len()))
        .collect()
}
