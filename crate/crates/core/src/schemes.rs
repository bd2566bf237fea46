//! Time-sharing transmission schemes.
//!
//! A scheme fixes `α[m][t]`, the fraction of block `t` spent on packet `m`.
//! Packet `m` accumulates `I_m = Σ_{t≤m} α[m][t]·C_t` and is decoded iff it was
//! transmitted and `I_m ≥ R`.
//!
//! Two evaluation paths are provided: the dense [`AllocationMatrix`] path,
//! which follows the definition literally, and [`SchemeSpec::decode_trace`],
//! which exploits each scheme's structure and is what the Monte Carlo engine
//! uses. Tests pin the two together.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelParams, ChannelTrace};
use crate::error::{Error, Result};
use crate::metrics::{self, TrialMetrics};
use crate::simulate;

/// Per-packet decoding outcome: `v[m]` is true iff packet `m` was decoded by
/// its deadline. Untransmitted packets are always `false`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DecodeVector(Vec<bool>);

impl DecodeVector {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    /// Parses a vector of 0/1 values.
    pub fn from_bits(bits: &[u8]) -> Self {
        Self(bits.iter().map(|&b| b != 0).collect())
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![false; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn to_u8(&self) -> Vec<u8> {
        self.0.iter().map(|&b| b as u8).collect()
    }

    /// Number of decoded packets.
    pub fn popcount(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn max_zero_run(&self) -> usize {
        metrics::max_zero_run(&self.0)
    }

    /// Cumulative decode counts `Ψ(t)` for `t = 1..M`.
    pub fn cumulative(&self) -> Vec<usize> {
        self.0
            .iter()
            .scan(0, |acc, &b| {
                *acc += b as usize;
                Some(*acc)
            })
            .collect()
    }
}

impl fmt::Display for DecodeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(if *b { "1" } else { "0" })?;
        }
        f.write_str("]")
    }
}

/// Scheme family, without its window parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    /// Memoryless transmission.
    Mt,
    /// Equal time-sharing.
    Ets,
    /// Pre-buffering.
    Pb,
    /// Windowed time-sharing.
    Wts,
}

impl SchemeKind {
    pub fn has_window(self) -> bool {
        matches!(self, SchemeKind::Pb | SchemeKind::Wts)
    }

    pub fn with_window(self, b: usize) -> SchemeSpec {
        match self {
            SchemeKind::Mt => SchemeSpec::Mt,
            SchemeKind::Ets => SchemeSpec::Ets,
            SchemeKind::Pb => SchemeSpec::Pb { b },
            SchemeKind::Wts => SchemeSpec::Wts { b },
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeKind::Mt => "MT",
            SchemeKind::Ets => "eTS",
            SchemeKind::Pb => "PB",
            SchemeKind::Wts => "wTS",
        })
    }
}

/// Criterion used to pick the PB buffer size or the wTS window size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    MaxThroughput,
    MinMaxDelay,
}

/// A fully parameterized scheme.
///
/// For PB, `b` is the number of transmitted packets (the last `b`); for wTS it
/// is the window length in blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeSpec {
    Mt,
    Ets,
    Pb { b: usize },
    Wts { b: usize },
}

impl SchemeSpec {
    pub fn kind(&self) -> SchemeKind {
        match self {
            SchemeSpec::Mt => SchemeKind::Mt,
            SchemeSpec::Ets => SchemeKind::Ets,
            SchemeSpec::Pb { .. } => SchemeKind::Pb,
            SchemeSpec::Wts { .. } => SchemeKind::Wts,
        }
    }

    pub fn window(&self) -> Option<usize> {
        match *self {
            SchemeSpec::Pb { b } | SchemeSpec::Wts { b } => Some(b),
            _ => None,
        }
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        if m == 0 {
            return Err(Error::param("M", "need at least one packet"));
        }
        if let Some(b) = self.window() {
            if b == 0 || b > m {
                return Err(Error::param("B", format!("must satisfy 1 <= B <= M = {m}, got {b}")));
            }
        }
        Ok(())
    }

    /// Whether packet `m` (0-based) is ever transmitted.
    pub fn transmits(&self, m: usize, total: usize) -> bool {
        match *self {
            SchemeSpec::Mt | SchemeSpec::Ets => true,
            SchemeSpec::Pb { b } => m + b >= total,
            SchemeSpec::Wts { b } => (m + 1) % b == 0 || m + 1 == total,
        }
    }

    /// Decodes one channel realization.
    pub fn decode_trace(&self, trace: &ChannelTrace, rate: f64) -> DecodeVector {
        // Same operation order as the dense path so both agree bit for bit.
        let c = trace.capacities();
        let m = c.len();
        match *self {
            SchemeSpec::Mt => DecodeVector(c.iter().map(|&ct| ct >= rate).collect()),
            SchemeSpec::Ets => {
                let mut acc = 0.0;
                DecodeVector(
                    c.iter()
                        .enumerate()
                        .map(|(t, &ct)| {
                            acc += (1.0 / (m - t) as f64) * ct;
                            acc >= rate
                        })
                        .collect(),
                )
            }
            SchemeSpec::Pb { b } => {
                let first = m - b;
                let share = 1.0 / b as f64;
                let buffered: f64 = c[..=first].iter().map(|&ct| share * ct).sum();
                let mut bits = vec![false; m];
                let mut acc = buffered;
                bits[first] = acc >= rate;
                for t in first + 1..m {
                    acc += (1.0 / (m - t) as f64) * c[t];
                    bits[t] = acc >= rate;
                }
                DecodeVector(bits)
            }
            SchemeSpec::Wts { b } => {
                let mut bits = vec![false; m];
                for start in (0..m).step_by(b) {
                    let end = (start + b).min(m);
                    let sum: f64 = c[start..end].iter().sum();
                    bits[end - 1] = sum >= rate;
                }
                DecodeVector(bits)
            }
        }
    }

    /// Throughput and delay figures of one decoded realization.
    pub fn trial_metrics(&self, v: &DecodeVector) -> TrialMetrics {
        TrialMetrics::new(v.popcount(), v.max_zero_run())
    }
}

impl fmt::Display for SchemeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.window() {
            Some(b) => write!(f, "{}(B={b})", self.kind()),
            None => write!(f, "{}", self.kind()),
        }
    }
}

/// Dense time-allocation matrix `α[m][t]`, both indices 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationMatrix {
    m: usize,
    alpha: Vec<f64>,
    transmitted: Vec<bool>,
}

impl AllocationMatrix {
    pub fn size(&self) -> usize {
        self.m
    }

    /// Fraction of block `t` given to packet `msg`.
    pub fn get(&self, msg: usize, t: usize) -> f64 {
        self.alpha[msg * self.m + t]
    }

    pub fn row(&self, msg: usize) -> &[f64] {
        &self.alpha[msg * self.m..(msg + 1) * self.m]
    }

    pub fn transmitted(&self, msg: usize) -> bool {
        self.transmitted[msg]
    }

    /// `Σ_m α[m][t]` for every block.
    pub fn block_loads(&self) -> Vec<f64> {
        (0..self.m)
            .map(|t| (0..self.m).map(|msg| self.get(msg, t)).sum())
            .collect()
    }

    fn set(&mut self, msg: usize, t: usize, value: f64) {
        self.alpha[msg * self.m + t] = value;
    }
}

/// Builds the allocation matrix of `spec` for `m` packets.
pub fn build_allocation(spec: SchemeSpec, m: usize) -> Result<AllocationMatrix> {
    spec.validate(m)?;
    let mut alloc = AllocationMatrix {
        m,
        alpha: vec![0.0; m * m],
        transmitted: (0..m).map(|msg| spec.transmits(msg, m)).collect(),
    };
    match spec {
        SchemeSpec::Mt => {
            for t in 0..m {
                alloc.set(t, t, 1.0);
            }
        }
        SchemeSpec::Ets => {
            for msg in 0..m {
                for t in 0..=msg {
                    alloc.set(msg, t, 1.0 / (m - t) as f64);
                }
            }
        }
        SchemeSpec::Pb { b } => {
            // Blocks up to the first transmitted packet's deadline are shared
            // by all b packets; later blocks by the packets still alive.
            let first = m - b;
            for msg in first..m {
                for t in 0..=first {
                    alloc.set(msg, t, 1.0 / b as f64);
                }
                for t in first + 1..=msg {
                    alloc.set(msg, t, 1.0 / (m - t) as f64);
                }
            }
        }
        SchemeSpec::Wts { b } => {
            for start in (0..m).step_by(b) {
                let end = (start + b).min(m);
                for t in start..end {
                    alloc.set(end - 1, t, 1.0);
                }
            }
        }
    }
    Ok(alloc)
}

/// Total mutual information accumulated by every packet, `I_m = Σ_t α[m][t]·C_t`.
pub fn accumulate_mi(alloc: &AllocationMatrix, trace: &ChannelTrace) -> Result<Vec<f64>> {
    if trace.len() != alloc.m {
        return Err(Error::param(
            "trace",
            format!("has {} blocks, allocation expects {}", trace.len(), alloc.m),
        ));
    }
    let c = trace.capacities();
    Ok((0..alloc.m)
        .map(|msg| alloc.row(msg).iter().zip(c).map(|(a, ct)| a * ct).sum())
        .collect())
}

/// Decodes with the dense allocation: `v[m] = transmitted(m) && I_m ≥ R`.
pub fn decode(alloc: &AllocationMatrix, trace: &ChannelTrace, rate: f64) -> Result<DecodeVector> {
    if !(rate > 0.0) {
        return Err(Error::param("rate", format!("must be positive, got {rate}")));
    }
    let mi = accumulate_mi(alloc, trace)?;
    Ok(DecodeVector(
        mi.iter()
            .enumerate()
            .map(|(msg, &i)| alloc.transmitted[msg] && i >= rate)
            .collect(),
    ))
}

/// Result of a window-size sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowOptimum {
    pub b: usize,
    /// Estimated objective at `b`: average throughput in bpcu, or average
    /// maximum delay in blocks.
    pub value: f64,
}

/// Picks the PB buffer size or wTS window size by exhaustive sweep over
/// `B ∈ 1..=M`, using the same channel realizations for every candidate.
/// Ties go to the smaller `B`.
pub fn optimize_b(
    kind: SchemeKind,
    objective: Objective,
    params: &ChannelParams,
    trials: u64,
    seed: u64,
) -> Result<WindowOptimum> {
    if !kind.has_window() {
        return Err(Error::param("kind", format!("{kind} has no window parameter")));
    }
    if trials == 0 {
        return Err(Error::param("trials", "need at least one trial"));
    }
    let sums = simulate::sweep_window_sums(kind, params, trials, seed);
    let (b, best) = simulate::best_window(&sums, objective);
    let m = params.blocks() as f64;
    let n = trials as f64;
    let value = match objective {
        Objective::MaxThroughput => params.rate() * best.count as f64 / (m * n),
        Objective::MinMaxDelay => best.run as f64 / n,
    };
    Ok(WindowOptimum { b, value })
}
