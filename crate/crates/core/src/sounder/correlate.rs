use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{Pdp, SounderConfig, Waveform};
use crate::error::{Error, Result};
use crate::exec::Execution;

/// Matrix form of the correlator: `R_k = <s shifted by k, r>` for every
/// circular shift `k` of `s`, returned as the power profile `R_k^2`.
///
/// `r` may be shorter than `s`; only its first `r.len()` products enter each
/// inner product. Lag `k` measures how far `s` is delayed relative to `r`.
pub fn discrete_correlation(s: &[f64], r: &[f64], time_step_s: f64) -> Result<Pdp> {
    discrete_correlation_with(s, r, time_step_s, Execution::default())
}

pub fn discrete_correlation_with(
    s: &[f64],
    r: &[f64],
    time_step_s: f64,
    exec: Execution,
) -> Result<Pdp> {
    if s.is_empty() || r.is_empty() {
        return Err(Error::EmptyInput("correlation operand"));
    }
    if r.len() > s.len() {
        return Err(Error::InvalidParameter {
            name: "r",
            reason: format!("replica ({}) longer than signal ({})", r.len(), s.len()),
        });
    }
    let n = s.len();
    let powers = exec.map_range(n, |k| {
        let (head, tail) = s.split_at(k);
        let dot: f64 = tail.iter().chain(head).zip(r).map(|(a, b)| a * b).sum();
        dot * dot
    });
    Pdp::new(powers, time_step_s, 1.0, false)
}

/// One period of the local replica on the fast grid, starting at the
/// configured replica chip offset.
pub(super) fn replica_period(config: &SounderConfig) -> Vec<f64> {
    let seq = config.sequence();
    let bip = seq.to_bipolar();
    let len = bip.len();
    let os = config.oversample();
    let off = config.replica_offset_chips() % len;
    (0..len * os)
        .map(|n| f64::from(bip[(n / os + off) % len]))
        .collect()
}

pub(super) fn check_received(received: &Waveform, config: &SounderConfig) -> Result<usize> {
    let fs = config.sample_rate_hz();
    if (received.sample_rate_hz() - fs).abs() > 1e-9 * fs {
        return Err(Error::InvalidParameter {
            name: "received",
            reason: format!(
                "sample rate {} Hz does not match oversample x alpha = {fs} Hz",
                received.sample_rate_hz()
            ),
        });
    }
    let len = config.pn().maximal_length();
    config.check_grid(len)?;
    let period = len * config.oversample();
    if received.len() < period {
        return Err(Error::TooShort {
            needed: period,
            got: received.len(),
        });
    }
    Ok(period)
}

/// Equivalent of the sliding correlator computed on the fast grid.
///
/// The first PN period of `received` is treated as one period of a
/// periodic steady-state signal and circularly cross-correlated with the
/// replica via FFT. Lag `k` (fast samples) is then placed at observed time
/// `k * gamma / fs`, and the period is repeated to span the configured
/// number of sync periods. The result corresponds to an ideal correlator
/// with no post-mixer smoothing; a perfectly aligned clean path has power
/// 1.0.
pub fn sliding_correlate_fast(received: &Waveform, config: &SounderConfig) -> Result<Pdp> {
    let period = check_received(received, config)?;
    let rx = &received.samples()[..period];
    let rep = replica_period(config);

    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(period);
    let inv = planner.plan_fft_inverse(period);

    let mut x: Vec<Complex64> = rx.to_vec();
    let mut y: Vec<Complex64> = rep.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fwd.process(&mut x);
    fwd.process(&mut y);
    for (a, b) in x.iter_mut().zip(&y) {
        *a *= b.conj();
    }
    inv.process(&mut x);

    // one 1/P undoes the unnormalised inverse, the other normalises the
    // aligned peak sum(rep^2) = P to unity
    let scale = 1.0 / (period as f64 * period as f64);
    let one_period: Vec<f64> = x.iter().map(|c| (c * scale).norm_sqr()).collect();
    let powers = one_period.repeat(config.span_periods());
    let gamma = config.gamma();
    Pdp::new(powers, gamma / config.sample_rate_hz(), gamma, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pnseq::{generate, PnConfig};

    fn bipolar(n: usize, taps: &[usize]) -> Vec<f64> {
        let seq = generate(&PnConfig::with_any_length(n, taps, (1 << n) - 1, 1.0).unwrap());
        seq.to_bipolar().iter().map(|&b| f64::from(b)).collect()
    }

    /// Brute force with explicit index arithmetic.
    fn brute(s: &[f64], r: &[f64]) -> Vec<f64> {
        (0..s.len())
            .map(|k| {
                let mut acc = 0.0;
                for i in 0..r.len() {
                    acc += s[(i + k) % s.len()] * r[i];
                }
                acc * acc
            })
            .collect()
    }

    #[test]
    fn m_sequence_profile() {
        let m = bipolar(3, &[3, 2]);
        let pdp = discrete_correlation(&m, &m, 1.0).unwrap();
        assert_eq!(pdp.powers(), &[49.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
        assert_eq!(pdp.gamma(), 1.0);
        assert!(!pdp.is_dilated());
    }

    #[test]
    fn single_chip() {
        let pdp = discrete_correlation(&[1.0], &[1.0], 1.0).unwrap();
        assert_eq!(pdp.powers(), &[1.0]);
        assert!(discrete_correlation(&[], &[1.0], 1.0).is_err());
        assert!(discrete_correlation(&[1.0], &[1.0, 1.0], 1.0).is_err());
    }

    #[test]
    fn delayed_signal_peaks_at_delay() {
        let m = bipolar(5, &[5, 3]);
        let mut delayed = m.clone();
        delayed.rotate_right(2);
        let pdp = discrete_correlation(&delayed, &m, 1.0).unwrap();
        assert_eq!(pdp.peak_index(), Some(2));
        assert_eq!(pdp.powers(), brute(&delayed, &m).as_slice());
    }

    #[test]
    fn shorter_replica_and_strategies() {
        let m = bipolar(7, &[7, 6]);
        let r = &m[..50];
        let a = discrete_correlation_with(&m, r, 1.0, Execution::Sequential).unwrap();
        let b = discrete_correlation_with(&m, r, 1.0, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.powers(), brute(&m, r).as_slice());
    }
}
