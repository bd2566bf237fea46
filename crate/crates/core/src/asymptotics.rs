//! Large-`M` behaviour of pre-buffering.
//!
//! With `B = αM` buffered packets the first one transmitted collects
//! `(1/B)·Σ_{t≤M−B+1} C_t`, the least of all. By the law of large numbers it is
//! decoded (and with it every other packet) with probability tending to 1 when
//! `α < α_opt = 1/(R/C̄ + 1)` and to 0 when `α > α_opt`.

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::simulate;

/// Smallest block count accepted by [`verify_threshold`].
pub const MIN_BLOCKS: usize = 500;

/// Probability that every packet of PB with buffer `b` is decoded, estimated
/// over `trials` realizations.
pub fn decode_all_probability(params: &ChannelParams, b: usize, trials: u64, seed: u64) -> Result<f64> {
    let m = params.blocks();
    if b == 0 || b > m {
        return Err(Error::param("B", format!("must satisfy 1 <= B <= M = {m}, got {b}")));
    }
    if trials == 0 {
        return Err(Error::param("trials", "need at least one trial"));
    }
    Ok(decode_all_counts(params, b, b, trials, seed).0 as f64 / trials as f64)
}

fn decode_all_counts(params: &ChannelParams, b1: usize, b2: usize, trials: u64, seed: u64) -> (u64, u64) {
    let m = params.blocks();
    let rate = params.rate();
    let hits = simulate::map_trials(params, trials, seed, |_, trace| {
        let c = trace.capacities();
        // The first buffered packet only sees blocks 1..=M−B+1, shared B ways.
        let decodes = |b: usize| c[..=m - b].iter().sum::<f64>() / b as f64 >= rate;
        (u64::from(decodes(b1)), u64::from(decodes(b2)))
    });
    hits.iter().fold((0, 0), |(x, y), &(a, b)| (x + a, y + b))
}

/// `1/(R/C̄ + 1)`.
pub fn alpha_opt(params: &ChannelParams) -> Result<f64> {
    Ok(alpha_from(params.rate(), params.mean_capacity()?))
}

fn alpha_from(rate: f64, mean_capacity: f64) -> f64 {
    1.0 / (rate / mean_capacity + 1.0)
}

/// Empirical check of the threshold at `α_opt ± delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticReport {
    pub alpha_opt: f64,
    pub mean_capacity: f64,
    /// Buffer size `round((α_opt − delta)·M)`.
    pub b_below: usize,
    /// Buffer size `round((α_opt + delta)·M)`.
    pub b_above: usize,
    pub decode_all_prob_below: f64,
    pub decode_all_prob_above: f64,
    pub m_used: usize,
    pub trials: u64,
}

impl AsymptoticReport {
    /// Limiting PB throughput `α_opt·R` in bits per channel use.
    pub fn limit_throughput_bpcu(&self, rate: f64) -> f64 {
        self.alpha_opt * rate
    }

    /// Limiting number of decoded packets per block, `α_opt`.
    pub fn limit_decoded_fraction(&self) -> f64 {
        self.alpha_opt
    }
}

/// Estimates `Pr{every buffered packet decoded}` on both sides of `α_opt`
/// using the same realizations for both buffer sizes. `M` is taken from
/// `params`.
pub fn verify_threshold(params: &ChannelParams, delta: f64, trials: u64, seed: u64) -> Result<AsymptoticReport> {
    let m = params.blocks();
    if m < MIN_BLOCKS {
        return Err(Error::param("M", format!("must be at least {MIN_BLOCKS}, got {m}")));
    }
    if trials == 0 {
        return Err(Error::param("trials", "need at least one trial"));
    }
    let mean_capacity = params.mean_capacity()?;
    let alpha = alpha_from(params.rate(), mean_capacity);
    if !(delta > 0.0 && delta < alpha.min(1.0 - alpha)) {
        return Err(Error::param(
            "delta",
            format!("must lie in (0, {}), got {delta}", alpha.min(1.0 - alpha)),
        ));
    }
    let buffer = |a: f64| ((a * m as f64).round() as usize).clamp(1, m);
    let b_below = buffer(alpha - delta);
    let b_above = buffer(alpha + delta);
    let (below, above) = decode_all_counts(params, b_below, b_above, trials, seed);
    Ok(AsymptoticReport {
        alpha_opt: alpha,
        mean_capacity,
        b_below,
        b_above,
        decode_all_prob_below: below as f64 / trials as f64,
        decode_all_prob_above: above as f64 / trials as f64,
        m_used: m,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::FadingLaw;

    #[test]
    fn alpha_formula() {
        assert_eq!(alpha_from(1.7, 1.7), 0.5);
        assert!((alpha_from(1.0, 2.0) - 2.0 / 3.0).abs() < 1e-15);
        let params = ChannelParams::with_fading(5.0, 1.0, 40, FadingLaw::Constant { gain: 1.0 }).unwrap();
        let c = params.mean_capacity().unwrap();
        assert!((alpha_opt(&params).unwrap() - c / (1.0 + c)).abs() < 1e-12);
    }

    #[test]
    fn dead_channel_never_decodes() {
        let live = ChannelParams::new(5.0, 1.0, 600).unwrap();
        let r = verify_threshold(&live, 0.1, 20, 1).unwrap();
        let dead = ChannelParams::with_fading(5.0, 1.0, 600, FadingLaw::Constant { gain: 0.0 }).unwrap();
        assert_eq!(decode_all_probability(&dead, r.b_below, 20, 1).unwrap(), 0.0);
        assert_eq!(decode_all_probability(&dead, r.b_above, 20, 1).unwrap(), 0.0);
        // C̄ = 0 puts α_opt at 0, leaving no admissible delta.
        assert!(verify_threshold(&dead, 0.1, 10, 1).is_err());
    }

    #[test]
    fn shortcut_matches_full_decoding() {
        use crate::schemes::SchemeSpec;
        let params = ChannelParams::new(0.0, 1.0, 60).unwrap();
        for b in [5, 20, 41] {
            let direct = (0..300)
                .filter(|&i| {
                    let v = SchemeSpec::Pb { b }.decode_trace(&params.sample_trace(4, i), 1.0);
                    v.popcount() == b
                })
                .count();
            assert_eq!(decode_all_probability(&params, b, 300, 4).unwrap(), direct as f64 / 300.0);
        }
    }

    #[test]
    fn preconditions() {
        let small = ChannelParams::new(5.0, 1.0, 100).unwrap();
        assert!(verify_threshold(&small, 0.1, 10, 1).is_err());
        let params = ChannelParams::new(5.0, 1.0, 600).unwrap();
        assert!(verify_threshold(&params, 0.0, 10, 1).is_err());
        assert!(verify_threshold(&params, 0.4, 10, 1).is_err());
        assert!(verify_threshold(&params, 0.1, 0, 1).is_err());
    }

    #[test]
    fn threshold_separates() {
        let params = ChannelParams::new(5.0, 1.0, 800).unwrap();
        let r = verify_threshold(&params, 0.1, 200, 3).unwrap();
        assert!(r.b_below < r.b_above);
        assert!(r.decode_all_prob_below > 0.95, "{r:?}");
        assert!(r.decode_all_prob_above < 0.05, "{r:?}");
    }
}
