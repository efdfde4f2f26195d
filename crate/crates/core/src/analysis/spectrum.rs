use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::sounder::Waveform;

/// Levels below this are reported as this value rather than `-inf`.
const FLOOR_DB: f64 = -300.0;

/// Two-sided power spectrum, ordered by frequency from `-fs/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Psd {
    pub freqs_hz: Vec<f64>,
    /// Relative to the strongest bin.
    pub power_db: Vec<f64>,
}

impl Psd {
    pub fn resolution_hz(&self) -> f64 {
        match self.freqs_hz.as_slice() {
            [a, b, ..] => b - a,
            _ => 0.0,
        }
    }

    /// Level of the bin nearest `freq_hz`.
    pub fn level_at(&self, freq_hz: f64) -> Option<f64> {
        let i = self
            .freqs_hz
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - freq_hz).abs().total_cmp(&(b.1 - freq_hz).abs()))?
            .0;
        Some(self.power_db[i])
    }
}

/// Averaged periodogram: rectangular-window segments of `fs / resolution`
/// samples with 50 % overlap, normalised to 0 dB at the strongest bin.
pub fn power_spectrum(w: &Waveform, resolution_hz: f64) -> Result<Psd> {
    power_spectrum_with(w, resolution_hz, Execution::default())
}

pub fn power_spectrum_with(w: &Waveform, resolution_hz: f64, exec: Execution) -> Result<Psd> {
    if !(resolution_hz.is_finite() && resolution_hz > 0.0) {
        return Err(Error::InvalidParameter {
            name: "resolution_hz",
            reason: format!("must be positive, got {resolution_hz}"),
        });
    }
    let fs = w.sample_rate_hz();
    let seg = ((fs / resolution_hz).round() as usize).max(2);
    if w.len() < seg {
        return Err(Error::TooShort {
            needed: seg,
            got: w.len(),
        });
    }
    let hop = seg / 2;
    let starts: Vec<usize> = (0..=(w.len() - seg)).step_by(hop).collect();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(seg);
    let x = w.samples();

    let spectra = exec.map_slice(&starts, |&s| {
        let mut buf: Vec<Complex64> = x[s..s + seg].to_vec();
        fft.process(&mut buf);
        buf.iter().map(|c| c.norm_sqr()).collect::<Vec<f64>>()
    });
    let mut acc = vec![0.0; seg];
    for sp in &spectra {
        for (a, v) in acc.iter_mut().zip(sp) {
            *a += v;
        }
    }

    let half = (seg / 2) as i64;
    let order: Vec<usize> = (0..seg as i64)
        .map(|i| (i - half).rem_euclid(seg as i64) as usize)
        .collect();
    let max = acc.iter().copied().fold(0.0, f64::max);
    let freqs_hz = (0..seg as i64)
        .map(|i| (i - half) as f64 * fs / seg as f64)
        .collect();
    let power_db = order
        .iter()
        .map(|&k| {
            if max > 0.0 && acc[k] > 0.0 {
                (10.0 * (acc[k] / max).log10()).max(FLOOR_DB)
            } else {
                FLOOR_DB
            }
        })
        .collect();
    Ok(Psd { freqs_hz, power_db })
}

/// Depth a minimum must reach below the main lobe to count as a null.
const NULL_DEPTH_DB: f64 = -20.0;

/// First null above the main lobe and the peak level of the next lobe,
/// both on the non-negative frequency axis.
///
/// A null is the first local minimum at least 20 dB below the main lobe. The
/// sidelobe level is the maximum between that null and the following one (or
/// the end of the grid).
pub fn find_null_and_sidelobe(psd: &Psd) -> Result<(f64, f64)> {
    let start = psd
        .freqs_hz
        .iter()
        .position(|&f| f >= 0.0)
        .ok_or(Error::NoNull)?;
    let f = &psd.freqs_hz[start..];
    let p = &psd.power_db[start..];
    if p.len() < 3 {
        return Err(Error::NoNull);
    }
    let peak = (0..p.len()).fold(0, |b, i| if p[i] > p[b] { i } else { b });
    let main = p[peak];
    let is_null = |i: usize| {
        i + 1 < p.len() && p[i] <= p[i - 1] && p[i] < p[i + 1] && p[i] <= main + NULL_DEPTH_DB
    };
    let null = (peak + 1..p.len())
        .find(|&i| is_null(i))
        .ok_or(Error::NoNull)?;
    let mut side = FLOOR_DB;
    let mut i = null + 1;
    while i < p.len() {
        side = side.max(p[i]);
        if p[i] < side + NULL_DEPTH_DB && is_null(i) {
            break;
        }
        i += 1;
    }
    Ok((f[null], side - main))
}
