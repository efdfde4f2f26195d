use super::Pdp;
use crate::error::{Error, Result};

/// Sync pulse train recovered from a correlator output.
#[derive(Debug, Clone, PartialEq)]
pub struct SyncInfo {
    /// Measured mean pulse spacing.
    pub period_s: f64,
    pub pulse_times_s: Vec<f64>,
}

impl SyncInfo {
    /// Largest deviation of any pulse interval from `period_s`.
    pub fn max_jitter_s(&self) -> f64 {
        self.pulse_times_s
            .windows(2)
            .map(|w| (w[1] - w[0] - self.period_s).abs())
            .fold(0.0, f64::max)
    }
}

/// Locates the sync pulses in a correlator output.
///
/// Each contiguous run of samples above `threshold_fraction` times the global
/// maximum contributes its strongest sample. The capture is read as circular,
/// which is exact for correlator outputs since they span whole sync periods: a
/// run cut by the start of the capture is joined with one cut by its end. An
/// unjoined run whose maximum is the final sample is a pulse cut off by the
/// end of the capture and is ignored.
pub fn detect_sync(pdp: &Pdp, threshold_fraction: f64) -> Result<SyncInfo> {
    if !(threshold_fraction > 0.0 && threshold_fraction < 1.0) {
        return Err(Error::InvalidParameter {
            name: "threshold_fraction",
            reason: format!("must lie in (0, 1), got {threshold_fraction}"),
        });
    }
    let p = pdp.powers();
    let max = pdp.max_power();
    if max <= 0.0 {
        return Err(Error::NoPulses { found: 0 });
    }
    let level = threshold_fraction * max;
    let n = p.len();

    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < n {
        if p[i] <= level {
            i += 1;
            continue;
        }
        let start = i;
        while i < n && p[i] > level {
            i += 1;
        }
        runs.push((start, i));
    }
    let strongest = |from: usize, to: usize, best: usize| {
        (from..to).fold(best, |b, k| if p[k] > p[b] { k } else { b })
    };
    let wraps = runs.len() >= 2 && runs[0].0 == 0 && runs[runs.len() - 1].1 == n;
    let mut peaks: Vec<usize> = Vec::with_capacity(runs.len());
    for (idx, &(a, b)) in runs.iter().enumerate() {
        let best = strongest(a, b, a);
        if wraps && idx == 0 {
            let (ta, tb) = runs[runs.len() - 1];
            peaks.push(strongest(ta, tb, best));
        } else if wraps && idx == runs.len() - 1 {
            continue;
        } else if best != n - 1 {
            peaks.push(best);
        }
    }
    peaks.sort_unstable();
    let pulses: Vec<f64> = peaks.into_iter().map(|k| pdp.time_at(k)).collect();
    if pulses.len() < 2 {
        return Err(Error::NoPulses {
            found: pulses.len(),
        });
    }
    let period_s = (pulses[pulses.len() - 1] - pulses[0]) / (pulses.len() - 1) as f64;
    Ok(SyncInfo {
        period_s,
        pulse_times_s: pulses,
    })
}
