use num_complex::Complex64;

use crate::error::{Error, Result};

/// Uniformly sampled complex baseband signal. Real signals carry a zero
/// imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    samples: Vec<Complex64>,
    sample_rate_hz: f64,
}

impl Waveform {
    pub fn new(samples: Vec<Complex64>, sample_rate_hz: f64) -> Result<Self> {
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::InvalidParameter {
                name: "sample_rate_hz",
                reason: format!("must be positive, got {sample_rate_hz}"),
            });
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    pub fn from_real(samples: &[f64], sample_rate_hz: f64) -> Result<Self> {
        Self::new(
            samples.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            sample_rate_hz,
        )
    }

    /// All-zero waveform.
    pub fn zeros(len: usize, sample_rate_hz: f64) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); len], sample_rate_hz)
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn sample_period_s(&self) -> f64 {
        1.0 / self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// True when every imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.samples.iter().all(|s| s.im == 0.0)
    }

    /// In-phase component.
    pub fn real_part(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.re).collect()
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum()
    }

    /// Mean power per sample; zero for an empty waveform.
    pub fn power(&self) -> f64 {
        if self.samples.is_empty() {
            0.0
        } else {
            self.energy() / self.samples.len() as f64
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            samples: self.samples.iter().map(|s| s * c).collect(),
            sample_rate_hz: self.sample_rate_hz,
        }
    }

    /// Concatenates `times` copies of the waveform.
    pub fn repeat(&self, times: usize) -> Self {
        Self {
            samples: self.samples.repeat(times),
            sample_rate_hz: self.sample_rate_hz,
        }
    }

    /// `len` samples starting at `start`; `None` if out of range.
    pub fn slice(&self, start: usize, len: usize) -> Option<Self> {
        let end = start.checked_add(len)?;
        self.samples.get(start..end).map(|s| Self {
            samples: s.to_vec(),
            sample_rate_hz: self.sample_rate_hz,
        })
    }

    /// Sample-wise sum; the shorter operand is zero-extended.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.sample_rate_hz != other.sample_rate_hz {
            return Err(Error::InvalidParameter {
                name: "sample_rate_hz",
                reason: "waveforms have different sample rates".into(),
            });
        }
        let n = self.len().max(other.len());
        let zero = Complex64::new(0.0, 0.0);
        let samples = (0..n)
            .map(|i| {
                self.samples.get(i).copied().unwrap_or(zero)
                    + other.samples.get(i).copied().unwrap_or(zero)
            })
            .collect();
        Ok(Self {
            samples,
            sample_rate_hz: self.sample_rate_hz,
        })
    }

    /// Real parts sampled at the centre of each `oversample`-sample chip.
    pub fn chip_centers(&self, oversample: usize) -> Vec<f64> {
        self.samples
            .iter()
            .skip(oversample / 2)
            .step_by(oversample.max(1))
            .map(|s| s.re)
            .collect()
    }
}
