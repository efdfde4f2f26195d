//! End-to-end sounding: transmit, propagate, correlate, align, undilate.

use crate::channel::{apply_channel, ChannelModel};
use crate::error::Result;
use crate::sounder::{
    detect_sync, sliding_correlate, undilate, Correlator, Pdp, SounderConfig, SyncInfo, Waveform,
};

/// Sync detection threshold used when aligning profiles.
pub const SYNC_THRESHOLD: f64 = 0.5;

/// One steady-state PN period at the receiver input.
///
/// The transmitter repeats its sequence continuously, so the window is taken
/// after the longest channel delay has elapsed and starts on a transmitter
/// period boundary. Delays therefore appear as circular shifts.
pub fn received_period(config: &SounderConfig, channel: &ChannelModel) -> Result<Waveform> {
    let tx = config.transmit_waveform();
    let period = tx.len();
    let longest = channel
        .sample_shifts(tx.sample_rate_hz())?
        .into_iter()
        .max()
        .unwrap_or(0);
    let start = longest.div_ceil(period) * period;
    let burst = tx.repeat(start / period + 1);
    let rx = apply_channel(&burst, channel)?;
    Ok(rx
        .slice(start, period)
        .expect("burst covers the steady-state window"))
}

#[derive(Debug, Clone)]
pub struct Measurement {
    /// Correlator output on the observed-time axis.
    pub dilated: Pdp,
    /// Sync pulses from correlating the clean local transmitter.
    pub sync: SyncInfo,
    /// One period of the profile, rotated so the sync pulse is time zero and
    /// rescaled to true delay.
    pub aligned: Pdp,
}

/// Runs a full measurement through `channel`.
pub fn measure(
    config: &SounderConfig,
    channel: &ChannelModel,
    correlator: Correlator,
) -> Result<Measurement> {
    let rx = received_period(config, channel)?;
    let dilated = sliding_correlate(&rx, config, correlator)?;
    let sync_trace = sliding_correlate(&config.transmit_waveform(), config, correlator)?;
    let sync = detect_sync(&sync_trace, SYNC_THRESHOLD)?;
    let period_samples = config.pn().maximal_length() * config.oversample();
    let aligned = undilate(&dilated.aligned_to(sync.pulse_times_s[0]))?.truncated(period_samples);
    Ok(Measurement {
        dilated,
        sync,
        aligned,
    })
}
