//! Distribution of the longest run of undecoded packets when every block is
//! decoded independently with probability `p`.
//!
//! Two exact evaluations of `Pr{D^max ≥ d}` are provided: powers of the
//! absorbing run-length chain and the closed-form inverse Z-transform. The
//! closed form is preferred and falls back to the matrix power when its
//! numerical checks fail.

mod partial_fraction;
mod roots;

pub use partial_fraction::{PartialFraction, Pole};

use crate::error::{Error, Result};

/// Largest `M` accepted by [`run_tail_enumeration`].
pub const ENUMERATION_MAX_BLOCKS: usize = 24;

/// Run-length chain for threshold `d`: state `k < d` is the current run of
/// undecoded packets, state `d` is absorbing. A decoded packet (probability
/// `p`) resets to 0, a miss advances to `k+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunChain {
    d: usize,
    p: f64,
    h: Vec<f64>,
}

impl RunChain {
    pub fn new(d: usize, p: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::param("d", "must be at least 1"));
        }
        check_probability(p)?;
        let n = d + 1;
        let mut h = vec![0.0; n * n];
        for k in 0..d {
            h[k * n] += p;
            h[k * n + k + 1] += 1.0 - p;
        }
        h[d * n + d] = 1.0;
        Ok(Self { d, p, h })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.d + 1
    }

    /// Transition matrix, row-major.
    pub fn matrix(&self) -> &[f64] {
        &self.h
    }

    /// `H^steps`, row-major, by repeated squaring with compensated sums.
    pub fn power(&self, steps: usize) -> Vec<f64> {
        let n = self.dim();
        let mut result = identity(n);
        let mut base = self.h.clone();
        let mut e = steps;
        while e > 0 {
            if e & 1 == 1 {
                result = mat_mul(&result, &base, n);
            }
            e >>= 1;
            if e > 0 {
                base = mat_mul(&base, &base, n);
            }
        }
        result
    }
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

fn mat_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = neumaier_sum((0..n).map(|k| a[i * n + k] * b[k * n + j]));
        }
    }
    out
}

fn neumaier_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for t in terms {
        let s = sum + t;
        comp += if sum.abs() >= t.abs() { (sum - s) + t } else { (t - s) + sum };
        sum = s;
    }
    sum + comp
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::param("p", format!("must lie in [0, 1], got {p}")))
    }
}

fn check_threshold(m: usize, d: usize) -> Result<()> {
    if d == 0 || d > m {
        return Err(Error::param("d", format!("must satisfy 1 <= d <= M = {m}, got {d}")));
    }
    Ok(())
}

/// `Pr{D^max ≥ d}` over `M` blocks as the (start, absorbing) entry of `H^M`.
pub fn run_tail_matrix_power(m: usize, p: f64, d: usize) -> Result<f64> {
    check_threshold(m, d)?;
    let chain = RunChain::new(d, p)?;
    let hm = chain.power(m);
    Ok(hm[d].clamp(0.0, 1.0))
}

/// Ascending coefficients of `q_d(z) = 1 − p·Σ_{j=1}^{d} z^j (1−p)^{j−1}`.
pub fn q_polynomial(d: usize, p: f64) -> Vec<f64> {
    let mut c = Vec::with_capacity(d + 1);
    c.push(1.0);
    let mut weight = p;
    for _ in 1..=d {
        c.push(-weight);
        weight *= 1.0 - p;
    }
    c
}

/// How a run tail was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailMethod {
    PartialFraction,
    MatrixPower,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEstimate {
    pub value: f64,
    pub method: TailMethod,
    /// The closed form was attempted and rejected by its numerical checks.
    pub degraded: bool,
}

/// `Pr{D^max ≥ d}` by the closed-form inverse transform, falling back to
/// [`run_tail_matrix_power`] (and flagging `degraded`) when a check fails.
/// `p ∈ {0, 1}` goes straight to the matrix power without the flag.
pub fn run_tail_partial_fraction(m: usize, p: f64, d: usize) -> Result<TailEstimate> {
    check_threshold(m, d)?;
    check_probability(p)?;
    if p == 0.0 || p == 1.0 {
        return Ok(TailEstimate {
            value: run_tail_matrix_power(m, p, d)?,
            method: TailMethod::MatrixPower,
            degraded: false,
        });
    }
    tail_from(PartialFraction::new(d, p), m, p, d)
}

fn tail_from(pf: Result<PartialFraction>, m: usize, p: f64, d: usize) -> Result<TailEstimate> {
    match pf.and_then(|pf| pf.tail(m)) {
        Ok(value) => Ok(TailEstimate {
            value,
            method: TailMethod::PartialFraction,
            degraded: false,
        }),
        Err(Error::Numeric(_)) => Ok(TailEstimate {
            value: run_tail_matrix_power(m, p, d)?,
            method: TailMethod::MatrixPower,
            degraded: true,
        }),
        Err(e) => Err(e),
    }
}

/// `Pr{D^max ≥ d}` for `d = 1..=M` by summing over all `2^M` sequences.
pub fn run_tails_enumeration(m: usize, p: f64) -> Result<Vec<f64>> {
    if m == 0 || m > ENUMERATION_MAX_BLOCKS {
        return Err(Error::param(
            "M",
            format!("enumeration supports 1..={ENUMERATION_MAX_BLOCKS} blocks, got {m}"),
        ));
    }
    check_probability(p)?;
    let mut pmf = vec![0.0; m + 1];
    for mask in 0u32..(1u32 << m) {
        let ones = mask.count_ones() as i32;
        let weight = p.powi(ones) * (1.0 - p).powi(m as i32 - ones);
        let (mut run, mut best) = (0usize, 0usize);
        for t in 0..m {
            if mask >> t & 1 == 1 {
                run = 0;
            } else {
                run += 1;
                best = best.max(run);
            }
        }
        pmf[best] += weight;
    }
    let mut tails = vec![0.0; m];
    let mut acc = 0.0;
    for d in (1..=m).rev() {
        acc += pmf[d];
        tails[d - 1] = acc;
    }
    Ok(tails)
}

pub fn run_tail_enumeration(m: usize, p: f64, d: usize) -> Result<f64> {
    check_threshold(m, d)?;
    Ok(run_tails_enumeration(m, p)?[d - 1])
}

/// Tail probabilities `Pr{D^max ≥ d}` for `d = 1..=M` and their sum.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayDistribution {
    /// `tail[d−1] = Pr{D^max ≥ d}`.
    pub tail: Vec<f64>,
    pub mean: f64,
    /// Number of thresholds that fell back to the matrix power.
    pub degraded: usize,
}

impl DelayDistribution {
    /// `Pr{D^max = d}` for `d = 0..=M`.
    pub fn pmf(&self) -> Vec<f64> {
        let m = self.tail.len();
        (0..=m)
            .map(|d| {
                let upper = if d == 0 { 1.0 } else { self.tail[d - 1] };
                let lower = if d < m { self.tail[d] } else { 0.0 };
                upper - lower
            })
            .collect()
    }
}

/// Distribution of the longest undecoded run over `M` i.i.d. blocks.
pub fn delay_distribution(m: usize, p: f64) -> Result<DelayDistribution> {
    check_probability(p)?;
    let mut tail = Vec::with_capacity(m);
    let mut degraded = 0;
    for d in 1..=m {
        let est = run_tail_partial_fraction(m, p, d)?;
        degraded += usize::from(est.degraded);
        tail.push(est.value);
    }
    // Tails must be nonincreasing; anything beyond rounding is a bug.
    for k in 1..tail.len() {
        if tail[k] > tail[k - 1] {
            if tail[k] - tail[k - 1] > 1e-9 {
                return Err(Error::Numeric(format!(
                    "run tail increases from {} to {} at d = {}",
                    tail[k - 1],
                    tail[k],
                    k + 1
                )));
            }
            tail[k] = tail[k - 1];
        }
    }
    let mean = tail.iter().sum();
    Ok(DelayDistribution { tail, mean, degraded })
}

/// Mean maximum inter-decoding delay of memoryless transmission,
/// `Σ_{d=1}^{M} Pr{D^max ≥ d}`.
pub fn mt_mean_max_delay(m: usize, p: f64) -> Result<f64> {
    Ok(delay_distribution(m, p)?.mean)
}

/// Floor/ceil bounds for windowed time-sharing.
///
/// A window of `B` blocks is decoded with probability `p_B`, so the windows
/// behave like memoryless transmission over `⌊M/B⌋` to `⌈M/B⌉` slots of `B`
/// blocks each. The delay bounds count lost windows only; the longest zero run
/// of a wTS decode vector also includes the `B − 1` untransmitted packets in
/// front of the next decoded window, so simulated delays sit above them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WtsBounds {
    pub delay_lower: f64,
    pub delay_upper: f64,
    /// Expected decoded packets, `⌊M/B⌋·p_B`.
    pub decoded_lower: f64,
    /// Expected decoded packets, `⌈M/B⌉·p_B`.
    pub decoded_upper: f64,
}

impl WtsBounds {
    /// Throughput bounds in bits per channel use.
    pub fn throughput_bpcu(&self, rate: f64, m: usize) -> (f64, f64) {
        let scale = rate / m as f64;
        (scale * self.decoded_lower, scale * self.decoded_upper)
    }
}

pub fn wts_delay_bounds(m: usize, b: usize, p_b: f64) -> Result<WtsBounds> {
    if b == 0 || b > m {
        return Err(Error::param("B", format!("must satisfy 1 <= B <= M = {m}, got {b}")));
    }
    check_probability(p_b)?;
    let lo = m / b;
    let hi = m.div_ceil(b);
    let scaled = |slots: usize| -> Result<f64> { Ok(b as f64 * mt_mean_max_delay(slots, p_b)?) };
    Ok(WtsBounds {
        delay_lower: scaled(lo)?,
        delay_upper: scaled(hi)?,
        decoded_lower: lo as f64 * p_b,
        decoded_upper: hi as f64 * p_b,
    })
}
