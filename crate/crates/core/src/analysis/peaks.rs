use crate::error::{Error, Result};
use crate::sounder::Pdp;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultipathEstimate {
    /// Delay from the profile's time origin.
    pub delay_ns: f64,
    /// Power relative to the strongest estimate (0 dB for that one).
    pub relative_power_db: f64,
}

/// Picks local maxima of an undilated profile that lie within `threshold_db`
/// of the global maximum, strongest first, discarding any closer than
/// `min_separation_ns` to one already accepted. Returned in delay order.
pub fn detect_peaks(
    pdp: &Pdp,
    threshold_db: f64,
    min_separation_ns: f64,
) -> Result<Vec<MultipathEstimate>> {
    if pdp.is_dilated() {
        return Err(Error::NotUndilated);
    }
    if !(threshold_db < 0.0) {
        return Err(Error::InvalidParameter {
            name: "threshold_db",
            reason: format!("must be negative relative to the maximum, got {threshold_db}"),
        });
    }
    let p = pdp.powers();
    let max = pdp.max_power();
    if p.is_empty() || max <= 0.0 {
        return Err(Error::NoPeaks);
    }
    let floor = max * 10f64.powf(threshold_db / 10.0);
    let last = p.len() - 1;
    let mut candidates: Vec<usize> = (0..p.len())
        .filter(|&i| {
            p[i] >= floor && (i == 0 || p[i] > p[i - 1]) && (i == last || p[i] >= p[i + 1])
        })
        .collect();
    candidates.sort_by(|&a, &b| p[b].total_cmp(&p[a]).then(a.cmp(&b)));

    let step_ns = pdp.time_step_s() * 1e9;
    let mut accepted: Vec<usize> = Vec::new();
    for c in candidates {
        let clear = accepted
            .iter()
            .all(|&a| (c as f64 - a as f64).abs() * step_ns >= min_separation_ns);
        if clear {
            accepted.push(c);
        }
    }
    accepted.sort_unstable();
    Ok(accepted
        .into_iter()
        .map(|i| MultipathEstimate {
            delay_ns: i as f64 * step_ns,
            relative_power_db: 10.0 * (p[i] / max).log10(),
        })
        .collect())
}
