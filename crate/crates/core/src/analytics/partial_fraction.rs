//! Closed-form run probabilities through the Z-transform of the absorbing
//! chain.
//!
//! `Σ_M Pr{D^max ≥ d}·z^M = N(z) / ((1−z)·q_d(z))` with `N(z) = (z(1−p))^d`.
//! Expanding in the basis `(1 − z/φ)^{−r}` and reading off the coefficient of
//! `z^M` gives `Pr{D^max ≥ d} = Σ_i Σ_r a_{i,r}·C(M+r−1, r−1)·φ_i^{−M}`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::roots::{self, CLUSTER_RADIUS, RESIDUAL_TOL};
use crate::error::{Error, Result};

/// Largest tolerated `κ·ε`, where `κ` is the summed magnitude of the terms
/// in the inverse transform.
const CANCELLATION_LIMIT: f64 = 1e-10;
const RECONSTRUCTION_POINTS: usize = 64;
const RECONSTRUCTION_RADIUS: f64 = 0.5;
const RECONSTRUCTION_TOL: f64 = 1e-8;
const IMAG_TOL: f64 = 1e-9;
const CLAMP_TOL: f64 = 1e-6;

/// One distinct pole `φ` of multiplicity `s` and its coefficients
/// `a_1..a_s` in the basis `(1 − z/φ)^{−r}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pole {
    pub phi: Complex64,
    pub multiplicity: usize,
    pub coeffs: Vec<Complex64>,
}

/// Partial-fraction expansion of `(z(1−p))^d / ((1−z)·q_d(z))`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialFraction {
    d: usize,
    p: f64,
    poles: Vec<Pole>,
    reconstruction_error: f64,
}

impl PartialFraction {
    /// Builds the expansion for `d ≥ 1` and `0 < p < 1`.
    ///
    /// Fails when a polished zero misses the residual tolerance or the
    /// rebuilt rational function disagrees with the original.
    pub fn new(d: usize, p: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::param("d", "must be at least 1"));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::param("p", format!("must lie in (0, 1), got {p}")));
        }
        let zeros = roots::q_zeros_scaled(d, p)?;
        if let Some((w, res)) = zeros.iter().find(|(_, r)| *r > RESIDUAL_TOL) {
            return Err(Error::Numeric(format!(
                "zero {w} of q_{d} has relative residual {res:e} at p = {p}"
            )));
        }
        let scale = 1.0 - p;
        let z: Vec<Complex64> = zeros.iter().map(|(w, _)| w / scale).collect();

        // z = 1 comes from the (1−z) factor and is simple since q_d(1) = (1−p)^d > 0;
        // its coefficient is N(1)/q_d(1) = 1.
        let mut poles = vec![Pole {
            phi: Complex64::new(1.0, 0.0),
            multiplicity: 1,
            coeffs: vec![Complex64::new(1.0, 0.0)],
        }];
        let numerator = numerator_coeffs(d, p);
        let denominator = denominator_coeffs(d, p);
        for (phi, s) in roots::cluster(&z, CLUSTER_RADIUS) {
            let coeffs = if s == 1 {
                vec![simple_coefficient(phi, d, p)]
            } else {
                principal_part(&numerator, &denominator, phi, s)
            };
            poles.push(Pole {
                phi,
                multiplicity: s,
                coeffs,
            });
        }
        debug_assert_eq!(poles.iter().map(|p| p.multiplicity).sum::<usize>(), d + 1);

        let mut pf = Self {
            d,
            p,
            poles,
            reconstruction_error: 0.0,
        };
        pf.reconstruction_error = pf.reconstruction_check();
        if pf.reconstruction_error >= RECONSTRUCTION_TOL {
            return Err(Error::Numeric(format!(
                "partial fractions for d = {d}, p = {p} rebuild with relative error {:e}",
                pf.reconstruction_error
            )));
        }
        Ok(pf)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn poles(&self) -> &[Pole] {
        &self.poles
    }

    /// Largest relative mismatch between the expansion and the rational
    /// function over the sample circle.
    pub fn reconstruction_error(&self) -> f64 {
        self.reconstruction_error
    }

    /// Rational function `N(z) / ((1−z)·q_d(z))` evaluated directly.
    pub fn rational(&self, z: Complex64) -> Complex64 {
        let w = z * (1.0 - self.p);
        let (s, _) = roots::power_sum(w, self.d);
        let q = 1.0 - self.p / (1.0 - self.p) * s;
        w.powi(self.d as i32) / ((1.0 - z) * q)
    }

    /// The expansion `Σ a_{i,r}·(1 − z/φ_i)^{−r}` evaluated at `z`, together
    /// with the summed magnitude of its terms.
    pub fn expansion(&self, z: Complex64) -> (Complex64, f64) {
        let mut total = Complex64::new(0.0, 0.0);
        let mut magnitude = 0.0;
        for pole in &self.poles {
            let base = (1.0 - z / pole.phi).inv();
            let mut factor = base;
            for a in &pole.coeffs {
                let term = a * factor;
                total += term;
                magnitude += term.norm();
                factor *= base;
            }
        }
        (total, magnitude)
    }

    fn reconstruction_check(&self) -> f64 {
        (0..RECONSTRUCTION_POINTS)
            .map(|k| {
                let angle = 2.0 * PI * (k as f64 + 0.5) / RECONSTRUCTION_POINTS as f64;
                let z = Complex64::from_polar(RECONSTRUCTION_RADIUS, angle);
                let exact = self.rational(z);
                let (rebuilt, magnitude) = self.expansion(z);
                // Relative to the larger of the value and the term scale: for large
                // d the function is tiny near the origin while its terms are O(1).
                (rebuilt - exact).norm() / exact.norm().max(magnitude)
            })
            .fold(0.0, f64::max)
    }

    /// `Pr{D^max ≥ d}` over `M` blocks.
    ///
    /// Errors when cancellation among the terms, a residual imaginary part or
    /// a value outside `[0, 1]` beyond noise makes the result untrustworthy.
    pub fn tail(&self, m: usize) -> Result<f64> {
        let mut total = Complex64::new(0.0, 0.0);
        let mut kappa = 0.0;
        for pole in &self.poles {
            let decay = pole.phi.powf(-(m as f64));
            for (k, a) in pole.coeffs.iter().enumerate() {
                // Coefficient of z^M in (1 − z/φ)^{−r} is C(M+r−1, r−1)·φ^{−M}, r = k+1.
                let term = a * binomial(m + k, k) * decay;
                total += term;
                kappa += term.norm();
            }
        }
        if kappa * f64::EPSILON > CANCELLATION_LIMIT {
            return Err(Error::Numeric(format!(
                "cancellation in run tail: term magnitude {kappa:e} for M = {m}, d = {}, p = {}",
                self.d, self.p
            )));
        }
        if total.im.abs() >= IMAG_TOL {
            return Err(Error::Numeric(format!(
                "run tail has imaginary part {:e} for M = {m}, d = {}, p = {}",
                total.im, self.d, self.p
            )));
        }
        clamp_probability(total.re)
    }
}

/// Coefficient for a simple zero `φ` of `q_d`.
///
/// Generic residue form `a = −N(φ)/(φ·D'(φ))` with `D = (1−z)q_d`. At a zero of
/// `q_d`, `D'(φ) = (1−φ)·q_d'(φ)`, and multiplying `q_d` by `1 − (1−p)z` gives
/// `1 − z + p(1−p)^d z^{d+1}`, hence `1 − φ = −p(1−p)^d φ^{d+1}` exactly. That
/// avoids forming `1 − φ` by subtraction, which loses everything when a zero
/// approaches 1 (large `d`), and leaves `a = 1/(p·φ²·q_d'(φ))`.
fn simple_coefficient(phi: Complex64, d: usize, p: f64) -> Complex64 {
    let w = phi * (1.0 - p);
    let (_, ds) = roots::power_sum(w, d);
    // q_d'(z) = −p·S'(w) in terms of w = (1−p)z.
    let dq = -p * ds;
    (p * phi * phi * dq).inv()
}

/// `(z(1−p))^d` as ascending coefficients.
fn numerator_coeffs(d: usize, p: f64) -> Vec<f64> {
    let mut c = vec![0.0; d + 1];
    c[d] = (1.0 - p).powi(d as i32);
    c
}

/// `(1−z)·q_d(z)` as ascending coefficients.
fn denominator_coeffs(d: usize, p: f64) -> Vec<f64> {
    let q = super::q_polynomial(d, p);
    let mut c = vec![0.0; d + 2];
    for (k, &qk) in q.iter().enumerate() {
        c[k] += qk;
        c[k + 1] -= qk;
    }
    c
}

/// Taylor coefficients of a real polynomial about `x0`: the first `count`
/// values of `f^{(k)}(x0)/k!`, by repeated synthetic division.
fn taylor_at(coeffs: &[f64], x0: Complex64, count: usize) -> Vec<Complex64> {
    let mut work: Vec<Complex64> = coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        if work.is_empty() {
            out.push(Complex64::new(0.0, 0.0));
            continue;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        let mut quotient = vec![Complex64::new(0.0, 0.0); work.len().saturating_sub(1)];
        for k in (0..work.len()).rev() {
            acc = acc * x0 + work[k];
            if k > 0 {
                quotient[k - 1] = acc;
            }
        }
        out.push(acc);
        work = quotient;
    }
    out
}

/// Coefficients `a_1..a_s` of the principal part of `num/den` at a zero `phi`
/// of `den` with multiplicity `s`, in the basis `(1 − z/φ)^{−r}`.
///
/// With `u = 1 − z/φ`, `den = u^s·E(u)` and `a_r = [u^{s−r}] num(u)/E(u)`.
pub(crate) fn principal_part(num: &[f64], den: &[f64], phi: Complex64, s: usize) -> Vec<Complex64> {
    // z − φ = −φu, so the k-th Taylor coefficient in u picks up (−φ)^k.
    let to_u = |taylor: Vec<Complex64>| -> Vec<Complex64> {
        let mut scale = Complex64::new(1.0, 0.0);
        taylor
            .into_iter()
            .map(|t| {
                let v = t * scale;
                scale *= -phi;
                v
            })
            .collect()
    };
    let n = to_u(taylor_at(num, phi, s));
    let e: Vec<Complex64> = to_u(taylor_at(den, phi, 2 * s)).split_off(s);
    // Power-series division n/e up to u^{s−1}.
    let mut ratio = vec![Complex64::new(0.0, 0.0); s];
    for k in 0..s {
        let mut acc = n[k];
        for j in 1..=k {
            acc -= e[j] * ratio[k - j];
        }
        ratio[k] = acc / e[0];
    }
    (1..=s).map(|r| ratio[s - r]).collect()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Clamps floating-point noise into `[0, 1]`; anything beyond the noise
/// tolerance is an error.
pub(crate) fn clamp_probability(x: f64) -> Result<f64> {
    if !x.is_finite() || x < -CLAMP_TOL || x > 1.0 + CLAMP_TOL {
        return Err(Error::Numeric(format!("probability {x} outside [0, 1]")));
    }
    Ok(x.clamp(0.0, 1.0))
}
