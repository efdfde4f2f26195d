//! Static tap-delay-line channel emulation with optional AWGN.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::sounder::Waveform;

/// One propagation path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultipathTap {
    pub delay_ns: f64,
    pub gain_db: f64,
    pub phase_rad: f64,
}

impl MultipathTap {
    pub fn new(delay_ns: f64, gain_db: f64, phase_rad: f64) -> Result<Self> {
        if !(delay_ns.is_finite() && delay_ns >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "delay_ns",
                reason: format!("must be nonnegative, got {delay_ns}"),
            });
        }
        if !(gain_db.is_finite() && gain_db <= 0.0) {
            return Err(Error::InvalidParameter {
                name: "gain_db",
                reason: format!("taps attenuate, need gain <= 0 dB, got {gain_db}"),
            });
        }
        if !phase_rad.is_finite() {
            return Err(Error::InvalidParameter {
                name: "phase_rad",
                reason: "must be finite".into(),
            });
        }
        Ok(Self {
            delay_ns,
            gain_db,
            phase_rad,
        })
    }

    /// Real-valued tap (zero phase).
    pub fn real(delay_ns: f64, gain_db: f64) -> Result<Self> {
        Self::new(delay_ns, gain_db, 0.0)
    }

    pub fn amplitude(&self) -> Complex64 {
        Complex64::from_polar(10f64.powf(self.gain_db / 20.0), self.phase_rad)
    }

    pub fn linear_power(&self) -> f64 {
        10f64.powf(self.gain_db / 10.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel {
    bulk_delay_ns: f64,
    taps: Vec<MultipathTap>,
    awgn_snr_db: Option<f64>,
    noise_seed: u64,
}

impl ChannelModel {
    /// Taps are sorted by delay; the earliest must sit at relative delay 0.
    pub fn new(bulk_delay_ns: f64, mut taps: Vec<MultipathTap>) -> Result<Self> {
        if !(bulk_delay_ns.is_finite() && bulk_delay_ns >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "bulk_delay_ns",
                reason: format!("must be nonnegative, got {bulk_delay_ns}"),
            });
        }
        if taps.is_empty() {
            return Err(Error::EmptyInput("channel taps"));
        }
        taps.sort_by(|a, b| a.delay_ns.total_cmp(&b.delay_ns));
        if taps[0].delay_ns != 0.0 {
            return Err(Error::InvalidParameter {
                name: "taps",
                reason: format!(
                    "earliest tap must have relative delay 0, got {} ns",
                    taps[0].delay_ns
                ),
            });
        }
        Ok(Self {
            bulk_delay_ns,
            taps,
            awgn_snr_db: None,
            noise_seed: 0,
        })
    }

    /// Single unattenuated path.
    pub fn identity() -> Self {
        Self::new(0.0, vec![MultipathTap::real(0.0, 0.0).expect("valid tap")])
            .expect("valid channel")
    }

    pub fn with_noise(mut self, snr_db: f64, seed: u64) -> Self {
        self.awgn_snr_db = Some(snr_db);
        self.noise_seed = seed;
        self
    }

    pub fn without_noise(mut self) -> Self {
        self.awgn_snr_db = None;
        self
    }

    pub fn bulk_delay_ns(&self) -> f64 {
        self.bulk_delay_ns
    }

    pub fn taps(&self) -> &[MultipathTap] {
        &self.taps
    }

    pub fn awgn_snr_db(&self) -> Option<f64> {
        self.awgn_snr_db
    }

    pub fn noise_seed(&self) -> u64 {
        self.noise_seed
    }

    /// Integer sample shift of every tap at `sample_rate_hz`, checking that
    /// no delay collapses under quantisation.
    pub fn sample_shifts(&self, sample_rate_hz: f64) -> Result<Vec<usize>> {
        let half_sample_ns = 0.5e9 / sample_rate_hz;
        let too_fine = |delay_ns: f64| Error::DelayTooFine {
            delay_ns,
            half_sample_ns,
        };
        if self.bulk_delay_ns > 0.0 && self.bulk_delay_ns < half_sample_ns {
            return Err(too_fine(self.bulk_delay_ns));
        }
        for w in self.taps.windows(2) {
            let gap = w[1].delay_ns - w[0].delay_ns;
            if gap < half_sample_ns {
                return Err(too_fine(gap));
            }
        }
        Ok(self
            .taps
            .iter()
            .map(|t| ((self.bulk_delay_ns + t.delay_ns) * 1e-9 * sample_rate_hz).round() as usize)
            .collect())
    }
}

/// Three-replica emulation of a line-of-sight path plus two echoes: bulk
/// delay 100 ns, relative delays 0, 1 and 3 ns, gains -4.5, -6 and -10.5 dB.
pub fn fig6_scenario() -> ChannelModel {
    let taps = [(0.0, -4.5), (1.0, -6.0), (3.0, -10.5)]
        .into_iter()
        .map(|(d, g)| MultipathTap::real(d, g).expect("valid preset tap"))
        .collect();
    ChannelModel::new(100.0, taps).expect("valid preset")
}

/// Passes `tx` through the tap line: `y[n] = sum_i a_i * tx[n - d_i]`, with
/// samples before the start of `tx` taken as zero. The output has the same
/// length as the input. AWGN is added last when the channel specifies it.
pub fn apply_channel(tx: &Waveform, ch: &ChannelModel) -> Result<Waveform> {
    let shifts = ch.sample_shifts(tx.sample_rate_hz())?;
    let x = tx.samples();
    let mut out = vec![Complex64::new(0.0, 0.0); x.len()];
    for (tap, &shift) in ch.taps.iter().zip(&shifts) {
        let a = tap.amplitude();
        if shift >= x.len() {
            continue;
        }
        for (o, &s) in out[shift..].iter_mut().zip(x) {
            *o += a * s;
        }
    }
    let clean = Waveform::new(out, tx.sample_rate_hz())?;
    match ch.awgn_snr_db {
        Some(snr) => add_awgn(&clean, snr, ch.noise_seed),
        None => Ok(clean),
    }
}

/// Adds white Gaussian noise at `snr_db` below the waveform's mean power.
/// Real waveforms get real noise, complex ones circular complex noise.
pub fn add_awgn(w: &Waveform, snr_db: f64, seed: u64) -> Result<Waveform> {
    let signal = w.power();
    if !(signal > 0.0) {
        return Err(Error::ZeroPower);
    }
    if !snr_db.is_finite() {
        return Err(Error::InvalidParameter {
            name: "snr_db",
            reason: "must be finite".into(),
        });
    }
    let noise_power = signal / 10f64.powf(snr_db / 10.0);
    let real = w.is_real();
    let sigma = if real {
        noise_power.sqrt()
    } else {
        (noise_power / 2.0).sqrt()
    };
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::InvalidParameter {
        name: "snr_db",
        reason: e.to_string(),
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = w
        .samples()
        .iter()
        .map(|&s| {
            let re = normal.sample(&mut rng);
            let im = if real { 0.0 } else { normal.sample(&mut rng) };
            s + Complex64::new(re, im)
        })
        .collect();
    Waveform::new(samples, w.sample_rate_hz())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(len: usize, fs: f64) -> Waveform {
        let v: Vec<f64> = (0..len).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect();
        Waveform::from_real(&v, fs).unwrap()
    }

    #[test]
    fn identity_channel() {
        let w = ramp(100, 10e9);
        assert_eq!(apply_channel(&w, &ChannelModel::identity()).unwrap(), w);
    }

    #[test]
    fn fig6_matches_shift_and_add() {
        let fs = 10e9;
        let w = ramp(500, fs);
        let ch = ChannelModel::new(0.0, fig6_scenario().taps().to_vec()).unwrap();
        let y = apply_channel(&w, &ch).unwrap();
        let x = w.real_part();
        let mut expect = vec![0.0; x.len()];
        for (shift, g) in [(0usize, -4.5f64), (10, -6.0), (30, -10.5)] {
            let a = 10f64.powf(g / 20.0);
            for n in shift..x.len() {
                expect[n] += a * x[n - shift];
            }
        }
        for (a, b) in y.real_part().iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(y.is_real());
    }

    #[test]
    fn bulk_delay_offsets_first_energy() {
        let fs = 10e9;
        let w = Waveform::from_real(&vec![1.0; 2000], fs).unwrap();
        let ch = ChannelModel::new(100.0, vec![MultipathTap::real(0.0, 0.0).unwrap()]).unwrap();
        let y = apply_channel(&w, &ch).unwrap();
        let first = y.samples().iter().position(|s| s.norm() > 0.0);
        assert_eq!(first, Some(1000));
    }

    #[test]
    fn fine_delays_rejected() {
        let taps = vec![
            MultipathTap::real(0.0, 0.0).unwrap(),
            MultipathTap::real(0.3, -3.0).unwrap(),
        ];
        let ch = ChannelModel::new(0.0, taps).unwrap();
        assert!(matches!(
            apply_channel(&ramp(10, 1e9), &ch),
            Err(Error::DelayTooFine { .. })
        ));
        assert!(apply_channel(&ramp(10, 10e9), &ch).is_ok());
    }

    #[test]
    fn preset_values() {
        let ch = fig6_scenario();
        assert_eq!(ch.taps().len(), 3);
        assert_eq!(ch.bulk_delay_ns(), 100.0);
        let d: Vec<f64> = ch.taps().iter().map(|t| t.delay_ns).collect();
        let g: Vec<f64> = ch.taps().iter().map(|t| t.gain_db).collect();
        assert_eq!(d, vec![0.0, 1.0, 3.0]);
        assert_eq!(g, vec![-4.5, -6.0, -10.5]);
        assert!(ch.awgn_snr_db().is_none());
    }

    #[test]
    fn invalid_models() {
        assert!(MultipathTap::real(-1.0, 0.0).is_err());
        assert!(MultipathTap::real(1.0, 0.5).is_err());
        assert!(ChannelModel::new(0.0, vec![]).is_err());
        assert!(ChannelModel::new(0.0, vec![MultipathTap::real(2.0, 0.0).unwrap()]).is_err());
        assert!(ChannelModel::new(-1.0, vec![MultipathTap::real(0.0, 0.0).unwrap()]).is_err());
    }

    #[test]
    fn awgn_power_at_zero_db() {
        let w = Waveform::from_real(&vec![1.0; 200_000], 1e9).unwrap();
        let y = add_awgn(&w, 0.0, 7).unwrap();
        let noise: f64 = y
            .samples()
            .iter()
            .zip(w.samples())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            / w.len() as f64;
        assert!((noise - 1.0).abs() < 0.05, "noise power {noise}");
        assert!(y.is_real());
    }

    #[test]
    fn complex_noise_for_complex_input() {
        let s = vec![Complex64::new(0.0, 1.0); 100_000];
        let w = Waveform::new(s, 1e9).unwrap();
        let y = add_awgn(&w, 0.0, 1).unwrap();
        let (mut pr, mut pi) = (0.0, 0.0);
        for (a, b) in y.samples().iter().zip(w.samples()) {
            let d = a - b;
            pr += d.re * d.re;
            pi += d.im * d.im;
        }
        let n = w.len() as f64;
        assert!((pr / n - 0.5).abs() < 0.03 && (pi / n - 0.5).abs() < 0.03);
    }

    #[test]
    fn awgn_high_snr_and_determinism() {
        let w = ramp(100_000, 1e9);
        let rms = w.power().sqrt();
        let y = add_awgn(&w, 60.0, 3).unwrap();
        let max_dev = y
            .samples()
            .iter()
            .zip(w.samples())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(max_dev < 0.01 * rms, "{max_dev} vs {rms}");
        assert_eq!(
            add_awgn(&w, 3.0, 11).unwrap(),
            add_awgn(&w, 3.0, 11).unwrap()
        );
        assert_ne!(
            add_awgn(&w, 3.0, 11).unwrap(),
            add_awgn(&w, 3.0, 12).unwrap()
        );
    }

    #[test]
    fn zero_power_rejected() {
        let w = Waveform::zeros(10, 1e9).unwrap();
        assert_eq!(add_awgn(&w, 0.0, 1), Err(Error::ZeroPower));
    }
}
