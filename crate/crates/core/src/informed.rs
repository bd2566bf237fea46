//! Informed-transmitter (genie) bound.
//!
//! With the whole realization known in advance, the receiver seen at block `t`
//! can have decoded at most `min(t, ⌊I_tot(t)/R⌋)` packets, where `I_tot(t)` is
//! the mutual information accumulated over blocks `1..t`. The greedy recursion
//! attains that count; [`min_delay_max_rate`] then moves decoding positions to
//! the right to minimize the longest gap without losing any packet.

use crate::channel::ChannelTrace;
use crate::error::{Error, Result};
use crate::schemes::DecodeVector;

/// Largest block count accepted by [`oracle_exhaustive`].
pub const ORACLE_MAX_BLOCKS: usize = 20;

/// Output of [`greedy_allocate`].
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyResult {
    /// Tentative throughput-optimal decode vector.
    pub v: DecodeVector,
    /// Cumulative decode counts `Ψ(t)`.
    pub psi: Vec<usize>,
    /// Cumulative mutual information `I_tot(t)`.
    pub i_tot: Vec<f64>,
}

/// Decode `W_t` whenever the information collected so far covers one more
/// packet than already decoded: `v(t) = 1 iff I_tot(t) ≥ (Ψ(t−1) + 1)·R`.
pub fn greedy_allocate(trace: &ChannelTrace, rate: f64) -> GreedyResult {
    let m = trace.len();
    let mut bits = Vec::with_capacity(m);
    let mut psi = Vec::with_capacity(m);
    let mut i_tot = Vec::with_capacity(m);
    let mut acc = 0.0;
    let mut decoded = 0usize;
    for &c in trace.capacities() {
        acc += c;
        let hit = acc >= (decoded + 1) as f64 * rate;
        if hit {
            decoded += 1;
        }
        bits.push(hit);
        psi.push(decoded);
        i_tot.push(acc);
    }
    GreedyResult {
        v: DecodeVector::new(bits),
        psi,
        i_tot,
    }
}

/// Sparsest length-`M` pattern whose longest zero run is `D`: ones exactly at
/// positions `k(D+1)`, `k = 1..⌊M/(D+1)⌋` (1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerBoundPattern {
    pub delay: usize,
    pub bits: DecodeVector,
}

pub fn lower_bound_pattern(m: usize, delay: usize) -> Result<LowerBoundPattern> {
    if delay > m {
        return Err(Error::param("D", format!("must satisfy 0 <= D <= M = {m}, got {delay}")));
    }
    Ok(LowerBoundPattern {
        delay,
        bits: DecodeVector::new(pattern_bits(m, delay)),
    })
}

fn pattern_bits(m: usize, delay: usize) -> Vec<bool> {
    (1..=m).map(|t| t % (delay + 1) == 0).collect()
}

/// Smallest achievable maximum delay for the decode vector `v` together with
/// a same-throughput allocation achieving it.
///
/// Tries `D = 0, 1, …` until `Ψ(t) ≥ Ψ_lb,D(t)` holds for every `t`, starts
/// from the sparse pattern for that `D` and turns its rightmost zeros into ones
/// until the packet count matches `v`. An all-zero `v` yields delay `M`.
pub fn min_delay_max_rate(v: &DecodeVector) -> (DecodeVector, usize) {
    let m = v.len();
    let total = v.popcount();
    if total == 0 {
        return (DecodeVector::zeros(m), m);
    }
    let psi = v.cumulative();
    let delay = (0..=m)
        .find(|&d| dominates(&psi, d))
        .expect("the all-zero pattern is always dominated");
    let mut s = pattern_bits(m, delay);
    let mut excess = total - m / (delay + 1);
    for bit in s.iter_mut().rev() {
        if excess == 0 {
            break;
        }
        if !*bit {
            *bit = true;
            excess -= 1;
        }
    }
    (DecodeVector::new(s), delay)
}

/// `Ψ(t) ≥ ⌊t/(d+1)⌋` for all `t`, i.e. `v` keeps pace with the sparse pattern.
fn dominates(psi: &[usize], d: usize) -> bool {
    psi.iter().enumerate().all(|(i, &p)| p >= (i + 1) / (d + 1))
}

/// Brute-force reference for the informed transmitter, `M ≤ 20`.
///
/// A set of decoding positions `t_1 < … < t_k` is feasible iff
/// `I_tot(t_j) ≥ j·R` for every `j`. Returns the largest feasible `k` and the
/// smallest longest-zero-run among feasible sets of that size.
pub fn oracle_exhaustive(trace: &ChannelTrace, rate: f64) -> Result<(usize, usize)> {
    let m = trace.len();
    if m > ORACLE_MAX_BLOCKS {
        return Err(Error::param(
            "M",
            format!("exhaustive search supports at most {ORACLE_MAX_BLOCKS} blocks, got {m}"),
        ));
    }
    let mut i_tot = Vec::with_capacity(m);
    let mut acc = 0.0;
    for &c in trace.capacities() {
        acc += c;
        i_tot.push(acc);
    }
    let mut best = (0usize, m);
    for mask in 0u32..(1u32 << m) {
        let k = mask.count_ones() as usize;
        if k < best.0 {
            continue;
        }
        let mut j = 0usize;
        let mut feasible = true;
        let mut run = 0usize;
        let mut max_run = 0usize;
        for (t, &it) in i_tot.iter().enumerate() {
            if mask >> t & 1 == 1 {
                j += 1;
                if it < j as f64 * rate {
                    feasible = false;
                    break;
                }
                run = 0;
            } else {
                run += 1;
                max_run = max_run.max(run);
            }
        }
        if !feasible {
            continue;
        }
        if k > best.0 || max_run < best.1 {
            best = (k, max_run);
        }
    }
    Ok(best)
}
