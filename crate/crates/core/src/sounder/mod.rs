//! The sliding correlator: clock bookkeeping, waveform synthesis,
//! time-dilated correlation and sync timing.
//!
//! A transmitter clocks a PN sequence at the fast rate `alpha`; the receiver
//! multiplies the incoming signal by the same sequence clocked at the slightly
//! slower rate `beta`. The relative delay between the two slips by one fast
//! sample every `gamma` samples, so the low-pass filtered product traces out
//! the channel's power delay profile stretched in time by the slide factor
//! `gamma = alpha / (alpha - beta)`.
//!
//! Two correlators are provided. [`sliding_correlate_direct`] simulates the
//! two clocks, the mixer and the filter sample by sample; it is exact but its
//! cost grows with `gamma`. [`sliding_correlate_fast`] computes the circular
//! cross-correlation on the fast grid and maps the delay axis onto observed
//! time, which is what the direct simulation converges to.

mod correlate;
mod direct;
mod sync;
mod waveform;

pub use correlate::{discrete_correlation, discrete_correlation_with, sliding_correlate_fast};
pub use direct::{sliding_correlate_direct, sliding_correlate_direct_with};
pub use sync::{detect_sync, SyncInfo};
pub use waveform::Waveform;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pnseq::{generate, ChipSequence, PnConfig};

/// Slide factor `alpha / (alpha - beta)`.
pub fn slide_factor(alpha_hz: f64, beta_hz: f64) -> Result<f64> {
    if !(alpha_hz.is_finite() && beta_hz.is_finite() && beta_hz > 0.0 && beta_hz < alpha_hz) {
        return Err(Error::InvalidRates { alpha_hz, beta_hz });
    }
    Ok(alpha_hz / (alpha_hz - beta_hz))
}

/// Spacing of the sync pulses: the PN period dilated by `gamma`.
pub fn sync_period(pn_length: usize, alpha_hz: f64, gamma: f64) -> Result<f64> {
    if pn_length == 0 {
        return Err(Error::EmptyInput("PN sequence"));
    }
    if !(alpha_hz.is_finite() && alpha_hz > 0.0) {
        return Err(Error::InvalidParameter {
            name: "alpha_hz",
            reason: format!("must be positive, got {alpha_hz}"),
        });
    }
    if !(gamma.is_finite() && gamma >= 1.0) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: format!("must be >= 1, got {gamma}"),
        });
    }
    // multiply first so exact products stay exact before the single rounding
    Ok(pn_length as f64 * gamma / alpha_hz)
}

/// Rectangular-pulse realisation of the bipolar chip stream.
pub fn upsample(seq: &ChipSequence, oversample: usize) -> Result<Waveform> {
    if oversample < 2 {
        return Err(Error::InvalidParameter {
            name: "oversample",
            reason: format!("need at least 2 samples per chip, got {oversample}"),
        });
    }
    let samples = seq
        .to_bipolar()
        .into_iter()
        .flat_map(|b| std::iter::repeat_n(Complex64::new(f64::from(b), 0.0), oversample))
        .collect();
    Waveform::new(samples, seq.config().chip_rate_hz() * oversample as f64)
}

/// Receiver configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SounderConfig {
    pn: PnConfig,
    beta_hz: f64,
    oversample: usize,
    lpf_cutoff_hz: f64,
    periods: usize,
    replica_offset_chips: usize,
}

impl SounderConfig {
    /// The fast clock `alpha` is the chip rate of `pn`. The low-pass cutoff
    /// defaults to `alpha - beta`, which makes the moving-average filter span
    /// exactly one dilated chip.
    pub fn new(pn: PnConfig, beta_hz: f64, oversample: usize) -> Result<Self> {
        let alpha_hz = pn.chip_rate_hz();
        slide_factor(alpha_hz, beta_hz)?;
        if oversample < 2 {
            return Err(Error::InvalidParameter {
                name: "oversample",
                reason: format!("need at least 2 samples per chip, got {oversample}"),
            });
        }
        Ok(Self {
            pn,
            beta_hz,
            oversample,
            lpf_cutoff_hz: alpha_hz - beta_hz,
            periods: 3,
            replica_offset_chips: 0,
        })
    }

    /// Builds the receiver from a slide factor instead of a slow clock rate.
    pub fn with_gamma(pn: PnConfig, gamma: f64, oversample: usize) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 1.0) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: format!("must be > 1, got {gamma}"),
            });
        }
        let alpha = pn.chip_rate_hz();
        Self::new(pn, alpha - alpha / gamma, oversample)
    }

    pub fn lpf_cutoff(mut self, hz: f64) -> Result<Self> {
        if !(hz.is_finite() && hz > 0.0) {
            return Err(Error::InvalidParameter {
                name: "lpf_cutoff_hz",
                reason: format!("must be positive, got {hz}"),
            });
        }
        self.lpf_cutoff_hz = hz;
        Ok(self)
    }

    /// Number of sync periods the correlator output spans (default 3).
    pub fn periods(mut self, periods: usize) -> Result<Self> {
        if periods == 0 {
            return Err(Error::InvalidParameter {
                name: "periods",
                reason: "must be at least 1".into(),
            });
        }
        self.periods = periods;
        Ok(self)
    }

    /// Starting chip of the local replica. Real receivers start their PN
    /// generator at an arbitrary phase; the sync signal recovers it.
    pub fn replica_offset(mut self, chips: usize) -> Self {
        self.replica_offset_chips = chips;
        self
    }

    pub fn pn(&self) -> &PnConfig {
        &self.pn
    }

    pub fn alpha_hz(&self) -> f64 {
        self.pn.chip_rate_hz()
    }

    pub fn beta_hz(&self) -> f64 {
        self.beta_hz
    }

    pub fn oversample(&self) -> usize {
        self.oversample
    }

    pub fn lpf_cutoff_hz(&self) -> f64 {
        self.lpf_cutoff_hz
    }

    pub fn span_periods(&self) -> usize {
        self.periods
    }

    pub fn replica_offset_chips(&self) -> usize {
        self.replica_offset_chips
    }

    pub fn gamma(&self) -> f64 {
        self.alpha_hz() / (self.alpha_hz() - self.beta_hz)
    }

    /// Sample rate of the common simulation grid.
    pub fn sample_rate_hz(&self) -> f64 {
        self.alpha_hz() * self.oversample as f64
    }

    pub fn sequence(&self) -> ChipSequence {
        generate(&self.pn)
    }

    /// Expected sync pulse spacing for this configuration.
    pub fn sync_period_s(&self) -> f64 {
        self.pn.maximal_length() as f64 * self.gamma() / self.alpha_hz()
    }

    /// One transmitted PN period on the fast grid.
    pub fn transmit_waveform(&self) -> Waveform {
        upsample(&self.sequence(), self.oversample).expect("oversample validated at construction")
    }

    /// Relative slip between received signal and replica over one replica
    /// period, in fast-grid samples.
    pub fn slip_per_period(&self, pn_length: usize) -> f64 {
        pn_length as f64 * self.oversample as f64 / (self.gamma() - 1.0)
    }

    pub(crate) fn check_grid(&self, pn_length: usize) -> Result<()> {
        let slip = self.slip_per_period(pn_length);
        if !(slip >= 1.0) {
            return Err(Error::GridTooCoarse { slip_samples: slip });
        }
        Ok(())
    }
}

/// Which correlator implementation to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Correlator {
    Direct,
    #[default]
    Fast,
}

pub fn sliding_correlate(
    received: &Waveform,
    config: &SounderConfig,
    correlator: Correlator,
) -> Result<Pdp> {
    match correlator {
        Correlator::Direct => sliding_correlate_direct(received, config),
        Correlator::Fast => sliding_correlate_fast(received, config),
    }
}

/// Power delay profile. Powers are linear and nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct Pdp {
    powers: Vec<f64>,
    time_step_s: f64,
    gamma: f64,
    dilated: bool,
}

impl Pdp {
    /// `dilated` marks an observed-time axis; `false` means true delay.
    pub fn new(powers: Vec<f64>, time_step_s: f64, gamma: f64, dilated: bool) -> Result<Self> {
        if let Some(p) = powers.iter().find(|p| !(**p >= 0.0)) {
            return Err(Error::InvalidParameter {
                name: "powers",
                reason: format!("must be nonnegative, found {p}"),
            });
        }
        if !(time_step_s.is_finite() && time_step_s > 0.0) {
            return Err(Error::InvalidParameter {
                name: "time_step_s",
                reason: format!("must be positive, got {time_step_s}"),
            });
        }
        if !(gamma.is_finite() && gamma >= 1.0) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: format!("must be >= 1, got {gamma}"),
            });
        }
        Ok(Self {
            powers,
            time_step_s,
            gamma,
            dilated,
        })
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn time_step_s(&self) -> f64 {
        self.time_step_s
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn is_dilated(&self) -> bool {
        self.dilated
    }

    pub fn len(&self) -> usize {
        self.powers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.powers.is_empty()
    }

    pub fn time_at(&self, index: usize) -> f64 {
        index as f64 * self.time_step_s
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.powers.len()).map(|i| self.time_at(i))
    }

    pub fn max_power(&self) -> f64 {
        self.powers.iter().copied().fold(0.0, f64::max)
    }

    /// Index of the strongest sample (first on ties).
    pub fn peak_index(&self) -> Option<usize> {
        let max = self.max_power();
        if max > 0.0 {
            self.powers.iter().position(|&p| p == max)
        } else {
            None
        }
    }

    /// Circularly rotates the profile so that `origin_s` becomes time zero.
    pub fn aligned_to(&self, origin_s: f64) -> Self {
        let n = self.powers.len();
        let mut powers = self.powers.clone();
        if n > 0 {
            let shift = (origin_s / self.time_step_s).round().rem_euclid(n as f64) as usize;
            powers.rotate_left(shift);
        }
        Self { powers, ..*self }
    }

    /// The first `samples` points.
    pub fn truncated(&self, samples: usize) -> Self {
        let mut p = self.clone();
        p.powers.truncate(samples);
        p
    }
}

/// Rescales a dilated profile onto the true-delay axis.
pub fn undilate(pdp: &Pdp) -> Result<Pdp> {
    if !pdp.dilated {
        return Err(Error::AlreadyUndilated);
    }
    Ok(Pdp {
        powers: pdp.powers.clone(),
        time_step_s: pdp.time_step_s / pdp.gamma,
        gamma: pdp.gamma,
        dilated: false,
    })
}

/// Inverse of [`undilate`]: stretches a true-delay profile by `gamma`.
pub fn dilate(pdp: &Pdp, gamma: f64) -> Result<Pdp> {
    if pdp.dilated {
        return Err(Error::InvalidParameter {
            name: "pdp",
            reason: "profile is already dilated".into(),
        });
    }
    Pdp::new(pdp.powers.clone(), pdp.time_step_s * gamma, gamma, true)
}
