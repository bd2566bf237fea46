//! Average throughput and average maximum inter-decoding delay.

use crate::error::{Error, Result};

pub use crate::schemes::DecodeVector;

/// Longest run of consecutive zeros (undecoded packets).
pub fn max_zero_run(bits: &[bool]) -> usize {
    let mut best = 0;
    let mut run = 0;
    for &b in bits {
        if b {
            run = 0;
        } else {
            run += 1;
            best = best.max(run);
        }
    }
    best
}

/// Figures of merit of a single channel realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TrialMetrics {
    /// Number of decoded packets; also the histogram bin for `η(m)`.
    pub decoded_count: usize,
    /// Maximum inter-decoding delay in blocks.
    pub max_run0: usize,
}

impl TrialMetrics {
    pub fn new(decoded_count: usize, max_run0: usize) -> Self {
        Self {
            decoded_count,
            max_run0,
        }
    }

    pub fn from_decode_vector(v: &DecodeVector) -> Self {
        Self::new(v.popcount(), v.max_zero_run())
    }
}

/// Sample means over many realizations.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateMetrics {
    pub rate: f64,
    pub blocks: usize,
    pub trials: u64,
    /// `(R/M)·E[#decoded]` in bits per channel use.
    pub avg_throughput_bpcu: f64,
    /// `E[#decoded]`.
    pub avg_decoded_msgs: f64,
    pub avg_max_delay_blocks: f64,
    pub stderr_throughput: f64,
    pub stderr_delay: f64,
    /// Empirical pmf of the number of decoded packets, `η(0..=M)`.
    pub eta_hist: Vec<f64>,
}

impl AggregateMetrics {
    /// Throughput recomputed from the histogram, `(R/M)·Σ m·η(m)`.
    pub fn throughput_from_hist(&self) -> f64 {
        let mean: f64 = self.eta_hist.iter().enumerate().map(|(m, p)| m as f64 * p).sum();
        self.rate * mean / self.blocks as f64
    }
}

/// Integer sufficient statistics; adding them is exact, so partial sums from
/// different workers combine to the same result in any order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub(crate) struct MetricSums {
    pub trials: u64,
    pub count: u64,
    pub count_sq: u64,
    pub run: u64,
    pub run_sq: u64,
}

impl MetricSums {
    pub fn push(&mut self, tm: TrialMetrics) {
        let c = tm.decoded_count as u64;
        let r = tm.max_run0 as u64;
        self.trials += 1;
        self.count += c;
        self.count_sq += c * c;
        self.run += r;
        self.run_sq += r * r;
    }

    pub fn merge(&mut self, other: &MetricSums) {
        self.trials += other.trials;
        self.count += other.count;
        self.count_sq += other.count_sq;
        self.run += other.run;
        self.run_sq += other.run_sq;
    }
}

fn mean_and_stderr(sum: u64, sum_sq: u64, n: u64) -> (f64, f64) {
    let nf = n as f64;
    let mean = sum as f64 / nf;
    if n < 2 {
        return (mean, 0.0);
    }
    // Sample variance from exact integer moments: (n Σx² − (Σx)²) / (n(n−1)).
    let num = (n as u128 * sum_sq as u128).saturating_sub(sum as u128 * sum as u128);
    let var = num as f64 / (nf * (nf - 1.0));
    (mean, (var / nf).sqrt())
}

/// Aggregates per-trial metrics into means, standard errors and `η`.
pub fn aggregate(trials: &[TrialMetrics], rate: f64, blocks: usize) -> Result<AggregateMetrics> {
    if trials.is_empty() {
        return Err(Error::param("trials", "cannot aggregate an empty trial list"));
    }
    if let Some(bad) = trials.iter().find(|t| t.decoded_count > blocks || t.max_run0 > blocks) {
        return Err(Error::param("trials", format!("metrics {bad:?} exceed M = {blocks}")));
    }
    let mut sums = MetricSums::default();
    let mut hist = vec![0u64; blocks + 1];
    for &tm in trials {
        sums.push(tm);
        hist[tm.decoded_count] += 1;
    }
    Ok(from_sums(&sums, &hist, rate, blocks))
}

pub(crate) fn from_sums(sums: &MetricSums, hist: &[u64], rate: f64, blocks: usize) -> AggregateMetrics {
    let n = sums.trials;
    let (count_mean, count_se) = mean_and_stderr(sums.count, sums.count_sq, n);
    let (run_mean, run_se) = mean_and_stderr(sums.run, sums.run_sq, n);
    let scale = rate / blocks as f64;
    AggregateMetrics {
        rate,
        blocks,
        trials: n,
        avg_throughput_bpcu: scale * count_mean,
        avg_decoded_msgs: count_mean,
        avg_max_delay_blocks: run_mean,
        stderr_throughput: scale * count_se,
        stderr_delay: run_se,
        eta_hist: hist.iter().map(|&h| h as f64 / n as f64).collect(),
    }
}
