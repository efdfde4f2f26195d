use num_complex::Complex64;

use super::correlate::check_received;
use super::{Pdp, SounderConfig, Waveform};
use crate::error::Result;
use crate::exec::Execution;

/// Sample-by-sample simulation of the two-clock correlator.
///
/// The received signal is treated as periodic with one PN period on the fast
/// grid. The replica is clocked at `beta` on the same grid: slow chip `j`
/// starts at sample `floor(j * fs / beta + 1/2)`, so individual chip lengths
/// dither between the two neighbouring integers while the long-run rate is
/// exactly `beta`. The mixer output is low-pass filtered by a centred moving
/// average of `round(fs / lpf_cutoff)` samples, and the filter output is read
/// once every `gamma` samples, i.e. once per fast sample of delay slip.
///
/// Cost is `O(periods * L * oversample * window)`; intended as a reference for
/// short sequences and small slide factors.
pub fn sliding_correlate_direct(received: &Waveform, config: &SounderConfig) -> Result<Pdp> {
    sliding_correlate_direct_with(received, config, Execution::default())
}

pub fn sliding_correlate_direct_with(
    received: &Waveform,
    config: &SounderConfig,
    exec: Execution,
) -> Result<Pdp> {
    let period = check_received(received, config)?;
    let rx = &received.samples()[..period];
    let bip: Vec<f64> = config
        .sequence()
        .to_bipolar()
        .iter()
        .map(|&b| f64::from(b))
        .collect();
    let len = bip.len() as i64;
    let offset = (config.replica_offset_chips() as i64) % len;

    let fs = config.sample_rate_hz();
    let gamma = config.gamma();
    let slow_chip = fs / config.beta_hz();
    let window = ((fs / config.lpf_cutoff_hz()).round() as i64).max(1);
    let half = window / 2;
    let period_i = period as i64;

    let replica_at = |n: i64| -> f64 {
        let j = ((n as f64 + 0.5) / slow_chip).ceil() as i64 - 1;
        bip[(j + offset).rem_euclid(len) as usize]
    };

    let gain = smear_gain(config.oversample() as f64, window as f64 / gamma);
    let outputs = period * config.span_periods();
    let powers = exec.map_range(outputs, |m| {
        let centre = (m as f64 * gamma).round() as i64;
        let start = centre - half;
        let mut acc = Complex64::new(0.0, 0.0);
        for n in start..start + window {
            acc += rx[n.rem_euclid(period_i) as usize] * replica_at(n);
        }
        (acc / (window as f64 * gain)).norm_sqr()
    });
    Pdp::new(powers, gamma / fs, gamma, true)
}

/// Peak of a unit chip triangle (half-width `oversample` samples) averaged
/// over a delay span of `span` samples centred on it. This is the amplitude
/// a perfectly aligned clean path reaches after the moving average.
pub(crate) fn smear_gain(oversample: f64, span: f64) -> f64 {
    if span <= 0.0 {
        1.0
    } else if span <= 2.0 * oversample {
        1.0 - span / (4.0 * oversample)
    } else {
        oversample / span
    }
}
