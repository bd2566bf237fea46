use crate::analytics;
use crate::error::{Error, Result};
use crate::metrics::AggregateMetrics;
use crate::schemes::{self, SchemeKind, SchemeSpec};
use crate::simulate::{self, Evaluator};
use crate::ChannelParams;

use super::config::{ExperimentConfig, SchemeEntry, Sweep};

/// Closed-form values reported next to a simulated row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Analytic {
    /// Expected throughput in bpcu.
    pub throughput_bpcu: f64,
    pub delay_lower: f64,
    pub delay_upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub sweep_value: f64,
    pub scheme: String,
    /// Buffer or window size in use, after optimization.
    pub b: Option<usize>,
    pub metrics: AggregateMetrics,
    pub analytic: Option<Analytic>,
}

/// Output of [`run_experiment`]; rows are ordered by sweep point, then by
/// scheme in config order, with the IT bound last.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub sweep: Option<Sweep>,
    pub trials: u64,
    pub seed: u64,
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    /// Scheme labels in order of first appearance.
    pub fn schemes(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.scheme) {
                out.push(r.scheme.clone());
            }
        }
        out
    }

    pub fn rows_for<'a>(&'a self, scheme: &'a str) -> impl Iterator<Item = &'a ResultRow> + 'a {
        self.rows.iter().filter(move |r| r.scheme == scheme)
    }

    pub fn row(&self, sweep_value: f64, scheme: &str) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.sweep_value == sweep_value && r.scheme == scheme)
    }
}

/// Runs every scheme at every sweep point on a shared set of channel
/// realizations per point. Deterministic for a fixed config, whatever the
/// thread count.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::config("threads", e.to_string()))?
            .install(|| run_points(config)),
        None => run_points(config),
    }
}

fn run_points(config: &ExperimentConfig) -> Result<ResultTable> {
    let mut rows = Vec::new();
    for i in 0..config.points() {
        let params = config.channel_at(i).params()?;
        let sweep_value = match &config.sweep {
            Some(s) => s.value(i),
            None => params.blocks() as f64,
        };
        rows.extend(run_point(config, &params, sweep_value)?);
    }
    Ok(ResultTable {
        sweep: config.sweep.clone(),
        trials: config.trials,
        seed: config.seed,
        rows,
    })
}

fn run_point(config: &ExperimentConfig, params: &ChannelParams, sweep_value: f64) -> Result<Vec<ResultRow>> {
    let m = params.blocks();
    let mut specs = Vec::with_capacity(config.schemes.len());
    for entry in &config.schemes {
        specs.push(resolve(entry, params, config.trials, config.seed)?);
    }
    let mut evaluators: Vec<Evaluator> = specs.iter().map(|&s| Evaluator::Scheme(s)).collect();
    if config.include_it_bound {
        evaluators.push(Evaluator::InformedBound);
    }
    let results = simulate::simulate(params, config.trials, config.seed, &evaluators)?;
    let mut rows = Vec::with_capacity(results.len());
    for (k, metrics) in results.into_iter().enumerate() {
        let (scheme, b, analytic) = match evaluators[k] {
            Evaluator::Scheme(spec) => (config.schemes[k].label(), spec.window(), analytic(spec, params)?),
            Evaluator::InformedBound => ("IT".to_string(), None, None),
        };
        debug_assert_eq!(metrics.blocks, m);
        rows.push(ResultRow {
            sweep_value,
            scheme,
            b,
            metrics,
            analytic,
        });
    }
    Ok(rows)
}

/// Fixes the window of a scheme entry. A fixed `b` larger than `M` is capped
/// at `M` so one entry can serve a whole sweep over `M`.
fn resolve(entry: &SchemeEntry, params: &ChannelParams, trials: u64, seed: u64) -> Result<SchemeSpec> {
    let m = params.blocks();
    if !entry.kind.has_window() {
        return Ok(entry.kind.with_window(0));
    }
    let b = match (entry.b, entry.optimize) {
        (Some(b), _) => b.min(m),
        (None, Some(objective)) => schemes::optimize_b(entry.kind, objective, params, trials, seed)?.b,
        (None, None) => return Err(Error::config("schemes", format!("{} needs `b` or `optimize`", entry.kind))),
    };
    let spec = entry.kind.with_window(b);
    spec.validate(m)?;
    Ok(spec)
}

/// Closed forms: MT throughput `R·p` and its mean maximum delay; wTS expected
/// throughput (short last window included) and floor/ceil delay bounds.
pub fn analytic(spec: SchemeSpec, params: &ChannelParams) -> Result<Option<Analytic>> {
    let m = params.blocks();
    let rate = params.rate();
    match spec {
        SchemeSpec::Mt => {
            let p = params.decode_success_prob();
            let delay = analytics::mt_mean_max_delay(m, p)?;
            Ok(Some(Analytic {
                throughput_bpcu: rate * p,
                delay_lower: delay,
                delay_upper: delay,
            }))
        }
        SchemeSpec::Wts { b } => {
            let p_b = params.window_success_prob(b)?;
            let bounds = analytics::wts_delay_bounds(m, b, p_b)?;
            let rem = m % b;
            let tail = if rem == 0 { 0.0 } else { params.window_success_prob(rem)? };
            let decoded = (m / b) as f64 * p_b + tail;
            Ok(Some(Analytic {
                throughput_bpcu: rate * decoded / m as f64,
                delay_lower: bounds.delay_lower,
                delay_upper: bounds.delay_upper,
            }))
        }
        SchemeSpec::Ets | SchemeSpec::Pb { .. } => Ok(None),
    }
}

/// Closed-form-only summary of one channel, without sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticSummary {
    pub decode_success_prob: f64,
    pub mean_capacity: f64,
    pub mean_capacity_closed_form: f64,
    pub alpha_opt: f64,
    pub rows: Vec<(String, Option<usize>, Analytic)>,
}

/// Closed forms for MT and every wTS entry with a fixed window. Entries
/// without a closed form (or needing optimization) are skipped.
pub fn analyze(params: &ChannelParams, entries: &[SchemeEntry]) -> Result<AnalyticSummary> {
    let mut rows = Vec::new();
    for e in entries {
        let spec = match (e.kind, e.b) {
            (SchemeKind::Mt, _) => SchemeSpec::Mt,
            (SchemeKind::Wts, Some(b)) => SchemeSpec::Wts { b: b.min(params.blocks()) },
            _ => continue,
        };
        if let Some(a) = analytic(spec, params)? {
            rows.push((e.label(), spec.window(), a));
        }
    }
    Ok(AnalyticSummary {
        decode_success_prob: params.decode_success_prob(),
        mean_capacity: params.mean_capacity()?,
        mean_capacity_closed_form: params.mean_capacity_closed_form()?,
        alpha_opt: crate::asymptotics::alpha_opt(params)?,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::config::ChannelConfig;
    use crate::schemes::Objective;

    fn config() -> ExperimentConfig {
        let mut c = ExperimentConfig::new(ChannelConfig {
            snr_db: 0.0,
            rate: 1.0,
            messages: 12,
            fading: Default::default(),
        });
        c.trials = 300;
        c.seed = 5;
        c.include_it_bound = true;
        c.schemes = vec![
            SchemeEntry::fixed(SchemeKind::Mt, None),
            SchemeEntry::fixed(SchemeKind::Ets, None),
            SchemeEntry::optimized(SchemeKind::Pb, Objective::MaxThroughput),
            SchemeEntry::fixed(SchemeKind::Wts, Some(20)),
        ];
        c.sweep = Some(Sweep::Messages { values: vec![4, 12] });
        c
    }

    #[test]
    fn row_layout() {
        let t = run_experiment(&config()).unwrap();
        assert_eq!(t.rows.len(), 10);
        assert_eq!(t.schemes(), ["MT", "eTS", "PB", "wTS", "IT"]);
        let wts = t.row(4.0, "wTS").unwrap();
        assert_eq!(wts.b, Some(4));
        assert!(wts.analytic.is_some());
        assert!(t.row(12.0, "eTS").unwrap().analytic.is_none());
        assert!(t.row(12.0, "IT").unwrap().analytic.is_none());
    }

    #[test]
    fn informed_bound_dominates() {
        let t = run_experiment(&config()).unwrap();
        for &x in &[4.0, 12.0] {
            let it = &t.row(x, "IT").unwrap().metrics;
            for s in ["MT", "eTS", "PB", "wTS"] {
                let m = &t.row(x, s).unwrap().metrics;
                assert!(it.avg_throughput_bpcu >= m.avg_throughput_bpcu);
            }
        }
    }

    #[test]
    fn wts_expected_throughput() {
        let params = ChannelParams::new(-5.0, 1.0, 7).unwrap();
        let a = analytic(SchemeSpec::Wts { b: 7 }, &params).unwrap().unwrap();
        let p7 = params.window_success_prob(7).unwrap();
        assert!((a.throughput_bpcu - p7 / 7.0).abs() < 1e-15);
        let a1 = analytic(SchemeSpec::Wts { b: 1 }, &params).unwrap().unwrap();
        let mt = analytic(SchemeSpec::Mt, &params).unwrap().unwrap();
        assert!((a1.throughput_bpcu - mt.throughput_bpcu).abs() < 1e-12);
        assert!((a1.delay_lower - mt.delay_lower).abs() < 1e-12);
    }

    #[test]
    fn analyze_summary() {
        let params = ChannelParams::new(5.0, 1.0, 40).unwrap();
        let s = analyze(
            &params,
            &[
                SchemeEntry::fixed(SchemeKind::Mt, None),
                SchemeEntry::fixed(SchemeKind::Wts, Some(3)),
                SchemeEntry::fixed(SchemeKind::Ets, None),
            ],
        )
        .unwrap();
        assert_eq!(s.rows.len(), 2);
        assert!((s.mean_capacity - s.mean_capacity_closed_form).abs() < 1e-8);
    }
}
