//! Self-checks run by `fading-stream verify`: every fast path is compared with
//! a slower reference on seeded inputs.

use rand::Rng;

use crate::analytics;
use crate::channel::ChannelParams;
use crate::informed;
use crate::rng;
use crate::schemes::{self, SchemeSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    /// Number of individual comparisons made.
    pub checked: usize,
    pub detail: String,
}

impl SuiteReport {
    fn new(name: &'static str, checked: usize, failures: Vec<String>) -> Self {
        let passed = failures.is_empty();
        let detail = match failures.first() {
            None => format!("{checked} checks"),
            Some(first) => format!("{} of {checked} checks failed; first: {first}", failures.len()),
        };
        Self {
            name,
            passed,
            checked,
            detail,
        }
    }
}

/// Runs all suites.
pub fn run_all(seed: u64) -> Vec<SuiteReport> {
    vec![
        run_tail_agreement(),
        informed_optimality(seed, 2000),
        decoder_agreement(seed, 100),
        scheme_identities(seed, 2000),
        mean_capacity_forms(),
    ]
}

/// Enumeration, matrix power and closed form agree on `Pr{D^max ≥ d}`.
pub fn run_tail_agreement() -> SuiteReport {
    let mut failures = Vec::new();
    let mut checked = 0;
    for m in 2..=12 {
        for k in 1..=19 {
            let p = k as f64 * 0.05;
            let tails = match analytics::run_tails_enumeration(m, p) {
                Ok(t) => t,
                Err(e) => {
                    failures.push(e.to_string());
                    continue;
                }
            };
            for d in 1..=m {
                checked += 1;
                let mp = analytics::run_tail_matrix_power(m, p, d);
                let pf = analytics::run_tail_partial_fraction(m, p, d);
                match (mp, pf) {
                    (Ok(mp), Ok(pf)) => {
                        let err = (mp - tails[d - 1]).abs().max((pf.value - tails[d - 1]).abs());
                        if err > 1e-9 {
                            failures.push(format!("M={m} p={p} d={d}: error {err:e}"));
                        }
                    }
                    (Err(e), _) | (_, Err(e)) => failures.push(format!("M={m} p={p} d={d}: {e}")),
                }
            }
        }
    }
    SuiteReport::new("run-tail agreement", checked, failures)
}

/// The greedy allocation plus reallocation matches brute force.
pub fn informed_optimality(seed: u64, traces: u64) -> SuiteReport {
    let mut failures = Vec::new();
    let mut pick = rng::substream(seed, u64::MAX);
    for i in 0..traces {
        let m = pick.gen_range(1..=12);
        let snr = [-5.0, 0.0, 5.0][pick.gen_range(0..3)];
        let params = ChannelParams::new(snr, 1.0, m).expect("valid channel");
        let trace = params.sample_trace(seed, i);
        let greedy = informed::greedy_allocate(&trace, 1.0);
        let (s, d) = informed::min_delay_max_rate(&greedy.v);
        match informed::oracle_exhaustive(&trace, 1.0) {
            Ok(oracle) if oracle == (s.popcount(), d) => {}
            Ok(oracle) => failures.push(format!("trial {i}: got {:?}, oracle {oracle:?}", (s.popcount(), d))),
            Err(e) => failures.push(e.to_string()),
        }
    }
    SuiteReport::new("informed-transmitter optimality", traces as usize, failures)
}

/// The per-scheme fast decoder matches the allocation-matrix decoder.
pub fn decoder_agreement(seed: u64, traces: u64) -> SuiteReport {
    let mut failures = Vec::new();
    let mut checked = 0;
    for m in [1, 2, 5, 9, 16] {
        let params = ChannelParams::new(0.0, 1.0, m).expect("valid channel");
        let mut specs = vec![SchemeSpec::Mt, SchemeSpec::Ets];
        for b in 1..=m {
            specs.push(SchemeSpec::Pb { b });
            specs.push(SchemeSpec::Wts { b });
        }
        for spec in specs {
            let alloc = schemes::build_allocation(spec, m).expect("valid spec");
            for i in 0..traces {
                checked += 1;
                let trace = params.sample_trace(seed, i);
                let fast = spec.decode_trace(&trace, 1.0);
                match schemes::decode(&alloc, &trace, 1.0) {
                    Ok(dense) if dense == fast => {}
                    Ok(dense) => failures.push(format!("{spec} M={m} trial {i}: {fast} vs {dense}")),
                    Err(e) => failures.push(e.to_string()),
                }
            }
        }
    }
    SuiteReport::new("scheme decoder agreement", checked, failures)
}

/// eTS and PB decode a suffix of the packets, so their longest gap is the
/// number of undecoded packets.
pub fn scheme_identities(seed: u64, traces: u64) -> SuiteReport {
    let mut failures = Vec::new();
    let mut checked = 0;
    for snr in [-5.0, 5.0] {
        let params = ChannelParams::new(snr, 1.0, 40).expect("valid channel");
        for i in 0..traces {
            let trace = params.sample_trace(seed, i);
            for spec in [SchemeSpec::Ets, SchemeSpec::Pb { b: 25 }] {
                checked += 1;
                let v = spec.decode_trace(&trace, 1.0);
                if v.max_zero_run() != 40 - v.popcount() {
                    failures.push(format!("{spec} snr={snr} trial {i}: {v}"));
                }
            }
        }
    }
    SuiteReport::new("eTS/PB suffix identity", checked, failures)
}

/// Quadrature and closed-form mean capacity agree.
pub fn mean_capacity_forms() -> SuiteReport {
    let mut failures = Vec::new();
    let mut checked = 0;
    for snr in -10..=15 {
        checked += 1;
        let params = ChannelParams::new(f64::from(snr), 1.0, 1).expect("valid channel");
        match (params.mean_capacity(), params.mean_capacity_closed_form()) {
            (Ok(q), Ok(c)) if (q - c).abs() <= 1e-8 => {}
            (Ok(q), Ok(c)) => failures.push(format!("snr={snr}: {q} vs {c}")),
            (Err(e), _) | (_, Err(e)) => failures.push(e.to_string()),
        }
    }
    SuiteReport::new("mean capacity forms", checked, failures)
}
