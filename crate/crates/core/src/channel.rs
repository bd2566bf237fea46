//! Block-fading channel: fading realizations and per-block capacities.
//!
//! Block `t` has power gain `φ[t]`, drawn i.i.d. across blocks, and supports
//! `C_t = log2(1 + φ[t]·P)` bits per channel use with Gaussian codebooks and
//! unit-variance noise. The SNR in dB is `10·log10(P)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;
use crate::rng;
use crate::special;

/// Relative tolerance used for the mean-capacity quadrature.
pub const MEAN_CAPACITY_REL_TOL: f64 = 1e-10;

/// Grid size used for the window-sum distribution (doubled once for
/// Richardson extrapolation).
const WINDOW_GRID: usize = 1024;

/// Distribution of the per-block power gain `φ = |h|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case", tag = "law")]
pub enum FadingLaw {
    /// Rayleigh fading: `φ` is a unit-mean exponential variate.
    #[default]
    RayleighUnitMean,
    /// Degenerate law with `φ ≡ gain` in every block.
    Constant { gain: f64 },
}

impl FadingLaw {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            FadingLaw::RayleighUnitMean => rng::unit_exponential(rng),
            FadingLaw::Constant { gain } => gain,
        }
    }
}

/// Power, rate, block count and fading law of one experiment point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    snr_db: f64,
    power: f64,
    fading: FadingLaw,
    rate: f64,
    blocks: usize,
}

impl ChannelParams {
    /// Rayleigh channel with SNR `snr_db`, packet rate `rate` (bpcu) and
    /// `blocks` fading blocks (one packet per block).
    pub fn new(snr_db: f64, rate: f64, blocks: usize) -> Result<Self> {
        Self::with_fading(snr_db, rate, blocks, FadingLaw::RayleighUnitMean)
    }

    pub fn with_fading(snr_db: f64, rate: f64, blocks: usize, fading: FadingLaw) -> Result<Self> {
        if !snr_db.is_finite() {
            return Err(Error::param("snr_db", "must be finite"));
        }
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::param("rate", format!("must be positive, got {rate}")));
        }
        if blocks == 0 {
            return Err(Error::param("blocks", "need at least one block"));
        }
        if let FadingLaw::Constant { gain } = fading {
            if !(gain >= 0.0) || !gain.is_finite() {
                return Err(Error::param("gain", format!("must be a finite nonnegative gain, got {gain}")));
            }
        }
        let power = 10f64.powf(snr_db / 10.0);
        if !(power > 0.0) || !power.is_finite() {
            return Err(Error::param("snr_db", format!("{snr_db} dB gives no usable power")));
        }
        Ok(Self {
            snr_db,
            power,
            fading,
            rate,
            blocks,
        })
    }

    pub fn snr_db(&self) -> f64 {
        self.snr_db
    }

    /// Linear transmit power `P = 10^(snr_db/10)`.
    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn fading(&self) -> FadingLaw {
        self.fading
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Number of blocks, equal to the number of packets `M`.
    pub fn blocks(&self) -> usize {
        self.blocks
    }

    /// Same channel with a different number of blocks.
    pub fn with_blocks(&self, blocks: usize) -> Result<Self> {
        Self::with_fading(self.snr_db, self.rate, blocks, self.fading)
    }

    /// Instantaneous capacity for gain `gain`.
    pub fn capacity(&self, gain: f64) -> f64 {
        (gain * self.power).ln_1p() / std::f64::consts::LN_2
    }

    /// Smallest gain whose block capacity reaches `rate`: `(2^R − 1)/P`.
    fn gain_threshold(&self, rate: f64) -> f64 {
        (rate * std::f64::consts::LN_2).exp_m1() / self.power
    }

    /// Draws the fading realization of trial `trial_index`.
    ///
    /// The trace is a pure function of `(self, seed, trial_index)`.
    pub fn sample_trace(&self, seed: u64, trial_index: u64) -> ChannelTrace {
        let mut rng = rng::substream(seed, trial_index);
        let gains = (0..self.blocks).map(|_| self.fading.sample(&mut rng)).collect();
        ChannelTrace::from_gains(self, gains)
    }

    /// Probability that a single block supports the packet rate,
    /// `p = Pr{C_t ≥ R}`.
    pub fn decode_success_prob(&self) -> f64 {
        let threshold = self.gain_threshold(self.rate);
        match self.fading {
            FadingLaw::RayleighUnitMean => (-threshold).exp(),
            FadingLaw::Constant { gain } => {
                if self.capacity(gain) >= self.rate {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Mean capacity `E[log2(1 + φP)]` by adaptive quadrature against the
    /// fading density.
    pub fn mean_capacity(&self) -> Result<f64> {
        match self.fading {
            FadingLaw::RayleighUnitMean => quadrature::integrate_to_infinity(
                |x| self.capacity(x) * (-x).exp(),
                0.0,
                MEAN_CAPACITY_REL_TOL,
                0.0,
            ),
            FadingLaw::Constant { gain } => Ok(self.capacity(gain)),
        }
    }

    /// Closed-form mean capacity `e^{1/P} E1(1/P) / ln 2`, Rayleigh only.
    pub fn mean_capacity_closed_form(&self) -> Result<f64> {
        match self.fading {
            FadingLaw::RayleighUnitMean => {
                Ok(special::scaled_exp_integral_e1(1.0 / self.power)? / std::f64::consts::LN_2)
            }
            FadingLaw::Constant { .. } => Err(Error::param("fading", "closed form is defined for Rayleigh fading only")),
        }
    }

    /// Probability that `window` blocks jointly deliver the packet,
    /// `Pr{C_1 + … + C_window ≥ R}`. For `window = 1` this is
    /// [`decode_success_prob`](Self::decode_success_prob).
    pub fn window_success_prob(&self, window: usize) -> Result<f64> {
        if window == 0 {
            return Err(Error::param("window", "must be at least one block"));
        }
        match self.fading {
            FadingLaw::Constant { gain } => {
                let sum = window as f64 * self.capacity(gain);
                Ok(if sum >= self.rate { 1.0 } else { 0.0 })
            }
            FadingLaw::RayleighUnitMean if window == 1 => Ok(self.decode_success_prob()),
            FadingLaw::RayleighUnitMean => {
                // The event {sum < R} only involves capacities below R, so the
                // convolution lives on [0, R]. Midpoint-Stieltjes convolution is
                // second order in the grid step; one Richardson step removes it.
                let coarse = self.window_failure_on_grid(window, WINDOW_GRID);
                let fine = self.window_failure_on_grid(window, 2 * WINDOW_GRID);
                let failure = (4.0 * fine - coarse) / 3.0;
                Ok((1.0 - failure).clamp(0.0, 1.0))
            }
        }
    }

    /// `Pr{C_1 + … + C_window < R}` on an `n`-cell grid over `[0, R]`.
    fn window_failure_on_grid(&self, window: usize, n: usize) -> f64 {
        let h = self.rate / n as f64;
        // Rayleigh capacity CDF: F(c) = 1 − exp(−(2^c − 1)/P).
        let cdf: Vec<f64> = (0..=n)
            .map(|i| -(-self.gain_threshold(i as f64 * h)).exp_m1())
            .collect();
        let mass: Vec<f64> = cdf.windows(2).map(|w| w[1] - w[0]).collect();
        let mut current = cdf.clone();
        for _ in 1..window {
            let prev = current;
            current = (0..=n)
                .map(|i| {
                    (1..=i)
                        .map(|j| mass[j - 1] * 0.5 * (prev[i - j] + prev[i - j + 1]))
                        .sum()
                })
                .collect();
        }
        current[n]
    }
}

/// One fading realization: per-block gains and capacities.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelTrace {
    gains: Vec<f64>,
    capacities: Vec<f64>,
}

impl ChannelTrace {
    /// Builds a trace from explicit gains, filling capacities for `params`.
    pub fn from_gains(params: &ChannelParams, gains: Vec<f64>) -> Self {
        let capacities = gains.iter().map(|&g| params.capacity(g)).collect();
        Self { gains, capacities }
    }

    /// Builds a trace directly from per-block capacities (gains unknown, NaN).
    pub fn from_capacities(capacities: Vec<f64>) -> Result<Self> {
        if capacities.iter().any(|c| !(*c >= 0.0) || !c.is_finite()) {
            return Err(Error::param("capacities", "must be finite and nonnegative"));
        }
        Ok(Self {
            gains: vec![f64::NAN; capacities.len()],
            capacities,
        })
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn capacities(&self) -> &[f64] {
        &self.capacities
    }

    pub fn len(&self) -> usize {
        self.capacities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.capacities.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(snr_db: f64, rate: f64, blocks: usize) -> ChannelParams {
        ChannelParams::new(snr_db, rate, blocks).unwrap()
    }

    /// Independent trapezoid rule on a fine grid over [0, 60].
    fn trapezoid_mean_capacity(power: f64) -> f64 {
        let n = 2_000_000;
        let upper = 60.0;
        let h = upper / n as f64;
        let f = |x: f64| (1.0 + x * power).log2() * (-x).exp();
        let mut sum = 0.5 * (f(0.0) + f(upper));
        for i in 1..n {
            sum += f(i as f64 * h);
        }
        sum * h
    }

    #[test]
    fn power_is_linear_snr() {
        for snr in [-10.0, -5.0, 0.0, 5.0, 15.0] {
            let p = params(snr, 1.0, 3);
            let want = 10f64.powf(snr / 10.0);
            assert!(((p.power() - want) / want).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(ChannelParams::new(5.0, 0.0, 3).is_err());
        assert!(ChannelParams::new(5.0, -1.0, 3).is_err());
        assert!(ChannelParams::new(5.0, 1.0, 0).is_err());
        assert!(ChannelParams::new(f64::NAN, 1.0, 3).is_err());
        assert!(ChannelParams::with_fading(5.0, 1.0, 3, FadingLaw::Constant { gain: -1.0 }).is_err());
    }

    #[test]
    fn unit_gain_capacity_at_5db() {
        let p = params(5.0, 1.0, 3);
        let trace = ChannelTrace::from_gains(&p, vec![1.0; 3]);
        for &c in trace.capacities() {
            // log2(1 + 10^0.5)
            assert!((c - 2.057_373_208_606_795).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_gain_gives_zero_capacity() {
        let p = ChannelParams::with_fading(5.0, 1.0, 4, FadingLaw::Constant { gain: 0.0 }).unwrap();
        let trace = p.sample_trace(1, 0);
        assert!(trace.capacities().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn sampling_is_deterministic() {
        let p = params(5.0, 1.0, 16);
        assert_eq!(p.sample_trace(42, 7), p.sample_trace(42, 7));
        assert_ne!(p.sample_trace(42, 7), p.sample_trace(42, 8));
        let t = p.sample_trace(42, 7);
        assert_eq!(t.gains().len(), 16);
        for (g, c) in t.gains().iter().zip(t.capacities()) {
            assert!(*c >= 0.0);
            assert_eq!(*c, (g * p.power()).ln_1p() / std::f64::consts::LN_2);
        }
    }

    #[test]
    fn success_probability_closed_form() {
        // exp(-(2^R - 1)/P) against midpoint integration of the exponential pdf
        for (snr, want) in [(5.0, 0.728_893_414_110_024_6), (-5.0, 0.042_329_219_623_204_998)] {
            let p = params(snr, 1.0, 1);
            assert!((p.decode_success_prob() - want).abs() < 1e-12);
            let threshold = 1.0 / p.power();
            let n = 1_000_000;
            let upper = threshold + 50.0;
            let h = (upper - threshold) / n as f64;
            let integral: f64 = (0..n).map(|i| (-(threshold + (i as f64 + 0.5) * h)).exp() * h).sum();
            assert!((p.decode_success_prob() - integral).abs() < 1e-9);
        }
    }

    #[test]
    fn success_probability_tends_to_one_for_small_rate() {
        let p = params(0.0, 1e-9, 1);
        assert!((p.decode_success_prob() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn mean_capacity_quadrature_matches_closed_form() {
        for snr in [-10.0, -5.0, 0.0, 5.0, 10.0, 15.0] {
            let p = params(snr, 1.0, 1);
            let quad = p.mean_capacity().unwrap();
            let closed = p.mean_capacity_closed_form().unwrap();
            assert!((quad - closed).abs() < 1e-8, "snr {snr}: {quad} vs {closed}");
        }
    }

    #[test]
    fn mean_capacity_at_5db_agrees_with_trapezoid() {
        let p = params(5.0, 1.0, 1);
        let trap = trapezoid_mean_capacity(p.power());
        assert!((p.mean_capacity().unwrap() - trap).abs() < 1e-8);
        assert!((p.mean_capacity_closed_form().unwrap() - trap).abs() < 1e-8);
        // 30-digit reference
        assert!((p.mean_capacity_closed_form().unwrap() - 1.715_974_185_067_405_2).abs() < 1e-12);
    }

    #[test]
    fn mean_capacity_vanishes_without_power() {
        let p = params(-200.0, 1.0, 1);
        assert!(p.mean_capacity().unwrap() < 1e-19);
    }

    #[test]
    fn point_mass_mean_capacity() {
        let p = ChannelParams::with_fading(5.0, 1.0, 1, FadingLaw::Constant { gain: 1.0 }).unwrap();
        assert_eq!(p.mean_capacity().unwrap(), (1.0 + p.power()).log2());
    }

    #[test]
    fn single_block_window_is_decode_probability() {
        let p = params(-5.0, 1.0, 1);
        assert_eq!(p.window_success_prob(1).unwrap(), p.decode_success_prob());
    }

    #[test]
    fn window_probability_matches_exact_two_block_integral() {
        // Pr{C1 + C2 < R} = ∫ f(c) F(R - c) dc with a fine midpoint rule.
        let p = params(-5.0, 1.0, 1);
        let cdf = |c: f64| -(-(c * std::f64::consts::LN_2).exp_m1() / p.power()).exp_m1();
        let n = 400_000;
        let h = 1.0 / n as f64;
        let fail: f64 = (0..n)
            .map(|i| {
                let lo = i as f64 * h;
                let mid = lo + 0.5 * h;
                (cdf(lo + h) - cdf(lo)) * cdf(1.0 - mid)
            })
            .sum();
        let got = p.window_success_prob(2).unwrap();
        assert!((got - (1.0 - fail)).abs() < 1e-8, "{got} vs {}", 1.0 - fail);
    }

    #[test]
    fn window_probability_increases_with_window() {
        let p = params(-5.0, 1.0, 1);
        let probs: Vec<f64> = (1..=8).map(|b| p.window_success_prob(b).unwrap()).collect();
        assert!(probs.windows(2).all(|w| w[1] > w[0]));
    }
}
