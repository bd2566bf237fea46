//! Monte Carlo engine.
//!
//! Trial `i` always sees the channel realization drawn from substream
//! `(seed, i)`, and every scheme evaluated in one call sees the same
//! realizations. Work runs on the current rayon pool; results are collected in
//! trial order or reduced with exact integer sums, so output does not depend on
//! the number of worker threads.

use rayon::prelude::*;

use crate::channel::{ChannelParams, ChannelTrace};
use crate::error::{Error, Result};
use crate::informed;
use crate::metrics::{self, AggregateMetrics, MetricSums, TrialMetrics};
use crate::schemes::{Objective, SchemeKind, SchemeSpec};

const CHUNK: u64 = 64;

/// Something that turns a channel realization into trial metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evaluator {
    Scheme(SchemeSpec),
    /// Non-causal informed transmitter: greedy allocation followed by the
    /// delay-minimizing reallocation.
    InformedBound,
}

impl Evaluator {
    pub fn evaluate(&self, trace: &ChannelTrace, rate: f64) -> TrialMetrics {
        match self {
            Evaluator::Scheme(spec) => spec.trial_metrics(&spec.decode_trace(trace, rate)),
            Evaluator::InformedBound => {
                let greedy = informed::greedy_allocate(trace, rate);
                let (s_opt, delay) = informed::min_delay_max_rate(&greedy.v);
                TrialMetrics::new(s_opt.popcount(), delay)
            }
        }
    }
}

/// Applies `f` to every trial's realization; results are in trial order.
pub fn map_trials<T, F>(params: &ChannelParams, trials: u64, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &ChannelTrace) -> T + Sync + Send,
{
    (0..trials)
        .into_par_iter()
        .map(|i| f(i, &params.sample_trace(seed, i)))
        .collect()
}

/// Per-trial metrics for every evaluator, indexed `[evaluator][trial]`.
pub fn evaluate_trials(
    params: &ChannelParams,
    trials: u64,
    seed: u64,
    evaluators: &[Evaluator],
) -> Result<Vec<Vec<TrialMetrics>>> {
    for e in evaluators {
        if let Evaluator::Scheme(spec) = e {
            spec.validate(params.blocks())?;
        }
    }
    let rate = params.rate();
    let rows = map_trials(params, trials, seed, |_, trace| {
        evaluators.iter().map(|e| e.evaluate(trace, rate)).collect::<Vec<_>>()
    });
    let mut out = vec![Vec::with_capacity(rows.len()); evaluators.len()];
    for row in rows {
        for (k, tm) in row.into_iter().enumerate() {
            out[k].push(tm);
        }
    }
    Ok(out)
}

/// Averages for every evaluator over the same `trials` realizations.
pub fn simulate(
    params: &ChannelParams,
    trials: u64,
    seed: u64,
    evaluators: &[Evaluator],
) -> Result<Vec<AggregateMetrics>> {
    if trials == 0 {
        return Err(Error::param("trials", "need at least one trial"));
    }
    evaluate_trials(params, trials, seed, evaluators)?
        .iter()
        .map(|tms| metrics::aggregate(tms, params.rate(), params.blocks()))
        .collect()
}

/// Integer metric sums for every window size `B = 1..=M`, indexed by `B − 1`.
pub(crate) fn sweep_window_sums(kind: SchemeKind, params: &ChannelParams, trials: u64, seed: u64) -> Vec<MetricSums> {
    let m = params.blocks();
    let rate = params.rate();
    let chunks = trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut sums = vec![MetricSums::default(); m];
            for i in chunk * CHUNK..((chunk + 1) * CHUNK).min(trials) {
                let trace = params.sample_trace(seed, i);
                match kind {
                    SchemeKind::Pb => {
                        let pb = PrebufferSweep::new(trace.capacities());
                        for (b, s) in sums.iter_mut().enumerate() {
                            let decoded = pb.decoded(b + 1, rate);
                            s.push(TrialMetrics::new(decoded, m - decoded));
                        }
                    }
                    _ => {
                        for (b, s) in sums.iter_mut().enumerate() {
                            s.push(Evaluator::Scheme(kind.with_window(b + 1)).evaluate(&trace, rate));
                        }
                    }
                }
            }
            sums
        })
        .reduce(
            || vec![MetricSums::default(); m],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| x.merge(y));
                a
            },
        )
}

/// Best window under `objective`; ties resolve to the smaller `B`.
pub(crate) fn best_window(sums: &[MetricSums], objective: Objective) -> (usize, MetricSums) {
    let mut best = 0;
    for (i, s) in sums.iter().enumerate().skip(1) {
        let better = match objective {
            Objective::MaxThroughput => s.count > sums[best].count,
            Objective::MinMaxDelay => s.run < sums[best].run,
        };
        if better {
            best = i;
        }
    }
    (best + 1, sums[best])
}

/// PB decoding for all buffer sizes of one realization in `O(M log M)`.
///
/// With prefix sums `P[k] = Σ_{t<k} C_t` and `G[k] = Σ_{t<k} C_t/(M−t)`, the
/// packet `m ≥ M−B` holds `P[M−B+1]/B + G[m+1] − G[M−B+1]`, which is
/// nondecreasing in `m`, so the decoded set is found by binary search.
struct PrebufferSweep {
    prefix: Vec<f64>,
    shared: Vec<f64>,
}

impl PrebufferSweep {
    fn new(c: &[f64]) -> Self {
        let m = c.len();
        let mut prefix = Vec::with_capacity(m + 1);
        let mut shared = Vec::with_capacity(m + 1);
        prefix.push(0.0);
        shared.push(0.0);
        for (t, &ct) in c.iter().enumerate() {
            prefix.push(prefix[t] + ct);
            shared.push(shared[t] + ct / (m - t) as f64);
        }
        Self { prefix, shared }
    }

    fn decoded(&self, b: usize, rate: f64) -> usize {
        let m = self.prefix.len() - 1;
        let first = m - b;
        let buffered = self.prefix[first + 1] / b as f64;
        let base = self.shared[first + 1];
        // packets first..m; binary search for the first that reaches the rate
        let (mut lo, mut hi) = (first, m);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if buffered + (self.shared[mid + 1] - base) < rate {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        m - lo
    }
}
