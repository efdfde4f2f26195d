use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub ptx_dbm: f64,
    pub gtx_dbi: f64,
    pub grx_dbi: f64,
    pub fc_hz: f64,
    pub distance_m: f64,
}

impl LinkBudget {
    pub fn new(
        ptx_dbm: f64,
        gtx_dbi: f64,
        grx_dbi: f64,
        fc_hz: f64,
        distance_m: f64,
    ) -> Result<Self> {
        positive("fc_hz", fc_hz)?;
        positive("distance_m", distance_m)?;
        Ok(Self {
            ptx_dbm,
            gtx_dbi,
            grx_dbi,
            fc_hz,
            distance_m,
        })
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be positive, got {v}"),
        })
    }
}

/// Path loss referenced to isotropic antennas:
/// `PL = Ptx - Prx + Gtx + Grx`.
pub fn path_loss(budget: &LinkBudget, prx_dbm: f64) -> f64 {
    budget.ptx_dbm - prx_dbm + budget.gtx_dbi + budget.grx_dbi
}

/// Friis free-space path loss, `20 log10(4 pi d f / c)`.
pub fn fspl(distance_m: f64, fc_hz: f64) -> Result<f64> {
    positive("distance_m", distance_m)?;
    positive("fc_hz", fc_hz)?;
    Ok(20.0 * (4.0 * std::f64::consts::PI * distance_m * fc_hz / SPEED_OF_LIGHT).log10())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PleFit {
    pub ple: f64,
    pub rmse_db: f64,
}

/// Close-in path-loss exponent fit anchored at free space at `d0_m`:
/// `PL(d) = FSPL(d0) + 10 n log10(d / d0)`, least squares in `n`.
pub fn fit_ple(records: &[(f64, f64)], d0_m: f64, fc_hz: f64) -> Result<PleFit> {
    let anchor = fspl(d0_m, fc_hz)?;
    if let Some(&(d, _)) = records.iter().find(|(d, _)| !(*d > d0_m)) {
        return Err(Error::InvalidParameter {
            name: "distance_m",
            reason: format!("every distance must exceed d0 = {d0_m} m, got {d}"),
        });
    }
    let mut distinct: Vec<f64> = records.iter().map(|r| r.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::InsufficientData {
            what: "distinct distances",
            needed: 2,
            got: distinct.len(),
        });
    }
    let xs: Vec<f64> = records
        .iter()
        .map(|(d, _)| 10.0 * (d / d0_m).log10())
        .collect();
    let sxy: f64 = xs
        .iter()
        .zip(records)
        .map(|(x, (_, pl))| x * (pl - anchor))
        .sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let ple = sxy / sxx;
    let sse: f64 = xs
        .iter()
        .zip(records)
        .map(|(x, (_, pl))| (pl - anchor - ple * x).powi(2))
        .sum();
    Ok(PleFit {
        ple,
        rmse_db: (sse / records.len() as f64).sqrt(),
    })
}

/// Co- and cross-polarised path loss measured at one distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XpdRecord {
    pub distance_m: f64,
    pub pl_vv_db: f64,
    pub pl_vh_db: f64,
}

impl XpdRecord {
    pub fn new(distance_m: f64, pl_vv_db: f64, pl_vh_db: f64) -> Self {
        Self {
            distance_m,
            pl_vv_db,
            pl_vh_db,
        }
    }

    /// Cross-polarised links lose at least as much as co-polarised ones.
    pub fn is_physical(&self) -> bool {
        self.pl_vh_db >= self.pl_vv_db
    }
}

/// Cross-polarisation discrimination, positive when the cross-polarised
/// path is weaker: `PL_VH - PL_VV`.
pub fn xpd(record: &XpdRecord) -> f64 {
    record.pl_vh_db - record.pl_vv_db
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XpdStats {
    pub mean_db: f64,
    /// Sample (n - 1) standard deviation.
    pub std_db: f64,
}

pub fn xpd_stats(records: &[XpdRecord]) -> Result<XpdStats> {
    if records.len() < 2 {
        return Err(Error::InsufficientData {
            what: "XPD records",
            needed: 2,
            got: records.len(),
        });
    }
    let n = records.len() as f64;
    let mean_db = records.iter().map(xpd).sum::<f64>() / n;
    let var = records
        .iter()
        .map(|r| (xpd(r) - mean_db).powi(2))
        .sum::<f64>()
        / (n - 1.0);
    Ok(XpdStats {
        mean_db,
        std_db: var.sqrt(),
    })
}

/// Receiver calibration sweep fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linearity {
    /// dB of output change per dB of input change; 1 in the linear range.
    pub slope: f64,
    pub intercept_dbm: f64,
    pub max_deviation_db: f64,
}

impl Linearity {
    pub fn is_linear(&self) -> bool {
        (0.95..=1.05).contains(&self.slope)
    }
}

/// Regresses measured output power on `-attenuation` for a sweep of
/// `(attenuation_db, measured_power_dbm)` points.
pub fn linearity_check(sweep: &[(f64, f64)]) -> Result<Linearity> {
    if sweep.len() < 3 {
        return Err(Error::InsufficientData {
            what: "sweep points",
            needed: 3,
            got: sweep.len(),
        });
    }
    let n = sweep.len() as f64;
    let mx = sweep.iter().map(|(a, _)| -a).sum::<f64>() / n;
    let my = sweep.iter().map(|(_, p)| p).sum::<f64>() / n;
    let sxx: f64 = sweep.iter().map(|(a, _)| (-a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter {
            name: "sweep",
            reason: "all attenuation values are equal".into(),
        });
    }
    let sxy: f64 = sweep.iter().map(|(a, p)| (-a - mx) * (p - my)).sum();
    let slope = sxy / sxx;
    let intercept_dbm = my - slope * mx;
    let max_deviation_db = sweep
        .iter()
        .map(|(a, p)| (p - (intercept_dbm - slope * a)).abs())
        .fold(0.0, f64::max);
    Ok(Linearity {
        slope,
        intercept_dbm,
        max_deviation_db,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const FC: f64 = 142e9;

    #[test]
    fn path_loss_examples() {
        let b = LinkBudget::new(0.0, 0.0, 0.0, FC, 1.0).unwrap();
        assert!((path_loss(&b, -75.49) - 75.49).abs() < 1e-12);
        let b = LinkBudget::new(10.0, 0.0, 0.0, FC, 1.0).unwrap();
        assert_eq!(path_loss(&b, 10.0), 0.0);
        let b = LinkBudget::new(0.0, 27.0, 27.0, FC, 3.0).unwrap();
        assert_eq!(path_loss(&b, -40.0), 94.0);
        assert!(LinkBudget::new(0.0, 0.0, 0.0, FC, 0.0).is_err());
    }

    #[test]
    fn fspl_examples() {
        // 20 log10(4 pi f / c) evaluated independently
        let one = 20.0 * (4.0 * std::f64::consts::PI * 142e9 / 299_792_458.0).log10();
        assert!((fspl(1.0, FC).unwrap() - one).abs() < 1e-12);
        assert!((fspl(1.0, FC).unwrap() - 75.49).abs() < 0.005);
        assert!((fspl(3.0, FC).unwrap() - 85.03).abs() < 0.01);
        let diff = fspl(8.0, FC).unwrap() - fspl(4.0, FC).unwrap();
        assert!((diff - 20.0 * 2f64.log10()).abs() < 1e-12);
        assert!(fspl(0.0, FC).is_err());
    }

    #[test]
    fn ple_fit_cases() {
        let ds = [3.0, 3.5, 4.0, 4.5, 5.0];
        let clean: Vec<_> = ds.iter().map(|&d| (d, fspl(d, FC).unwrap())).collect();
        let fit = fit_ple(&clean, 1.0, FC).unwrap();
        assert!((fit.ple - 2.0).abs() < 1e-9 && fit.rmse_db < 1e-9);

        let slope: Vec<_> = ds
            .iter()
            .map(|&d| (d, fspl(d, FC).unwrap() + 5.0 * d.log10()))
            .collect();
        assert!((fit_ple(&slope, 1.0, FC).unwrap().ple - 2.5).abs() < 1e-9);

        // +1 dB offset: n = 2 + sum(x) / sum(x^2), residual 1 - x * sum(x) / sum(x^2)
        let offset: Vec<_> = ds
            .iter()
            .map(|&d| (d, fspl(d, FC).unwrap() + 1.0))
            .collect();
        let xs: Vec<f64> = ds.iter().map(|d| 10.0 * d.log10()).collect();
        let (sx, sxx) = (
            xs.iter().sum::<f64>(),
            xs.iter().map(|x| x * x).sum::<f64>(),
        );
        let n = 2.0 + sx / sxx;
        let rmse = (xs.iter().map(|x| (1.0 - x * sx / sxx).powi(2)).sum::<f64>() / 5.0).sqrt();
        let fit = fit_ple(&offset, 1.0, FC).unwrap();
        assert!((fit.ple - n).abs() < 1e-9);
        assert!((fit.rmse_db - rmse).abs() < 1e-9);
        assert!((fit.ple - 2.165).abs() < 1e-3);

        assert!(fit_ple(&[(3.0, 85.0), (3.0, 85.1)], 1.0, FC).is_err());
        assert!(fit_ple(&[(0.5, 70.0), (3.0, 85.0)], 1.0, FC).is_err());
    }

    #[test]
    fn xpd_examples() {
        let r = XpdRecord::new(3.0, 85.03, 112.31);
        assert!((xpd(&r) - 27.28).abs() < 1e-9);
        assert!(r.is_physical());
        assert_eq!(xpd(&XpdRecord::new(3.0, 90.0, 90.0)), 0.0);
        assert!(!XpdRecord::new(3.0, 90.0, 89.0).is_physical());

        let recs: Vec<_> = (0..5)
            .map(|i| XpdRecord::new(3.0 + 0.5 * i as f64, 80.0 + i as f64, 107.28 + i as f64))
            .collect();
        let s = xpd_stats(&recs).unwrap();
        assert!((s.mean_db - 27.28).abs() < 1e-12);
        assert!(s.std_db < 1e-12);
        assert!(xpd_stats(&[]).is_err());
        assert!(xpd_stats(&recs[..1]).is_err());
    }

    #[test]
    fn linearity_examples() {
        let ideal = linearity_check(&[(0.0, -30.0), (10.0, -40.0), (20.0, -50.0)]).unwrap();
        assert!((ideal.slope - 1.0).abs() < 1e-12);
        assert!(ideal.max_deviation_db < 1e-12);
        assert!(ideal.is_linear());

        // three-point regression by hand: slope 180 / 200, residuals -1/3, 2/3, -1/3
        let comp = linearity_check(&[(0.0, -32.0), (10.0, -40.0), (20.0, -50.0)]).unwrap();
        assert!((comp.slope - 0.9).abs() < 1e-12);
        assert!((comp.max_deviation_db - 2.0 / 3.0).abs() < 1e-12);
        assert!(!comp.is_linear());

        let sat = linearity_check(&[(0.0, -30.0), (10.0, -30.0), (20.0, -30.0)]).unwrap();
        assert_eq!(sat.slope, 0.0);
        assert!(linearity_check(&[(0.0, -30.0), (10.0, -40.0)]).is_err());
    }
}
