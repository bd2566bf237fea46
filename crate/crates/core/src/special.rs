//! Exponential integral.

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const MAX_ITER: usize = 500;

/// Exponential integral `E1(x) = ∫_x^∞ e^{-t}/t dt` for `x > 0`.
///
/// Power series below `x = 1`, modified Lentz continued fraction above.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::param("x", format!("E1 needs a finite positive argument, got {x}")));
    }
    if x <= 1.0 {
        e1_series(x)
    } else {
        e1_continued_fraction(x)
    }
}

/// `e^x · E1(x)`, finite for large `x` where `e^x` alone overflows.
pub fn scaled_exp_integral_e1(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::param("x", format!("E1 needs a finite positive argument, got {x}")));
    }
    if x <= 1.0 {
        Ok(x.exp() * e1_series(x)?)
    } else {
        continued_fraction_tail(x)
    }
}

fn e1_series(x: f64) -> Result<f64> {
    // E1(x) = -γ - ln x - Σ_{k≥1} (-x)^k / (k·k!)
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..MAX_ITER {
        let k = k as f64;
        term *= -x / k;
        let contrib = term / k;
        sum += contrib;
        if contrib.abs() < sum.abs() * f64::EPSILON * 0.5 {
            return Ok(-EULER_GAMMA - x.ln() - sum);
        }
    }
    Err(Error::Numeric(format!("E1 series did not converge at x = {x}")))
}

fn e1_continued_fraction(x: f64) -> Result<f64> {
    Ok(continued_fraction_tail(x)? * (-x).exp())
}

// e^x E1(x) = 1/(x+1- 1/(x+3- 4/(x+5- ...)))
fn continued_fraction_tail(x: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let a = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < f64::EPSILON {
            return Ok(h);
        }
    }
    Err(Error::Numeric(format!("E1 continued fraction did not converge at x = {x}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from a 30-digit arbitrary-precision evaluation.
    const REFERENCE: &[(f64, f64)] = &[
        (1e-8, 17.843_465_089_050_832),
        (0.1, 1.822_923_958_419_390_6),
        (0.316_227_766_016_838, 0.866_962_349_512_028_7),
        (0.5, 0.559_773_594_776_160_8),
        (1.0, 0.219_383_934_395_520_27),
        (1.5, 0.100_019_582_406_632_65),
        (2.0, 0.048_900_510_708_061_12),
        (10.0, 4.156_968_929_685_324e-6),
    ];

    #[test]
    fn matches_reference_values() {
        for &(x, want) in REFERENCE {
            let got = exp_integral_e1(x).unwrap();
            assert!(
                ((got - want) / want).abs() < 1e-13,
                "E1({x}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn continuous_across_switchover() {
        let below = exp_integral_e1(1.0).unwrap();
        let above = e1_continued_fraction(1.0).unwrap();
        assert!((below - above).abs() < 1e-14);
    }

    #[test]
    fn scaled_form_survives_large_arguments() {
        let x = 1e4;
        let v = scaled_exp_integral_e1(x).unwrap();
        // e^x E1(x) ~ 1/x (1 - 1/x + 2/x^2 ...)
        assert!((v - (1.0 / x) * (1.0 - 1.0 / x + 2.0 / (x * x))).abs() < 1e-15);
        let x: f64 = 0.7;
        let direct = x.exp() * exp_integral_e1(x).unwrap();
        assert!((scaled_exp_integral_e1(x).unwrap() - direct).abs() < 1e-15);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(exp_integral_e1(0.0).is_err());
        assert!(exp_integral_e1(-1.0).is_err());
        assert!(exp_integral_e1(f64::NAN).is_err());
    }
}
