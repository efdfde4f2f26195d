use proptest::prelude::*;
use sounderlab_core::analysis::{
    detect_peaks, find_null_and_sidelobe, fit_ple, fspl, power_spectrum, xpd_stats, XpdRecord,
};
use sounderlab_core::channel::{ChannelModel, MultipathTap};
use sounderlab_core::pipeline::measure;
use sounderlab_core::pnseq::PnConfig;
use sounderlab_core::sounder::{Correlator, SounderConfig};

proptest! {
    #[test]
    fn xpd_stats_recover_injected_values(
        base in proptest::collection::vec(60.0f64..110.0, 2..12),
        offsets in proptest::collection::vec(0.0f64..40.0, 12),
    ) {
        let recs: Vec<XpdRecord> = base
            .iter()
            .zip(&offsets)
            .enumerate()
            .map(|(i, (&vv, &x))| XpdRecord::new(1.0 + i as f64, vv, vv + x))
            .collect();
        let xs: Vec<f64> = recs.iter().map(|r| r.pl_vh_db - r.pl_vv_db).collect();
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let std = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let s = xpd_stats(&recs).unwrap();
        prop_assert!((s.mean_db - mean).abs() <= 1e-12 * mean.abs().max(1.0));
        prop_assert!((s.std_db - std).abs() <= 1e-12 * std.max(1.0));
    }

    #[test]
    fn free_space_data_fits_exponent_two(
        ds in proptest::collection::btree_set(2u32..400, 2..10),
        fc in 1e9f64..300e9,
    ) {
        let recs: Vec<(f64, f64)> = ds
            .iter()
            .map(|&d| {
                let d = f64::from(d) * 0.05;
                (d, fspl(d, fc).unwrap())
            })
            .filter(|(d, _)| *d > 1.0)
            .collect();
        prop_assume!(recs.len() >= 2);
        let fit = fit_ple(&recs, 1.0, fc).unwrap();
        prop_assert!((fit.ple - 2.0).abs() < 0.02);
        prop_assert!(fit.rmse_db < 1e-9);
    }
}

#[test]
fn first_null_tracks_chip_rate() {
    for rate in [0.4e9, 1e9, 2e9] {
        let cfg =
            SounderConfig::with_gamma(PnConfig::standard(7, rate).unwrap(), 100.0, 10).unwrap();
        let tx = cfg.transmit_waveform();
        let res = tx.sample_rate_hz() / tx.len() as f64;
        let psd = power_spectrum(&tx.repeat(4), res).unwrap();
        let (null, side) = find_null_and_sidelobe(&psd).unwrap();
        assert!((null - rate).abs() <= res, "{rate}: null at {null}");
        assert!((side + 13.3).abs() < 0.5, "{rate}: sidelobe {side}");
    }
}

fn soundness_case(gaps: &[u32], gains: &[f64]) {
    let cfg = SounderConfig::with_gamma(PnConfig::standard(7, 1e9).unwrap(), 100.0, 10).unwrap();
    let mut delay = 0;
    let mut taps = vec![MultipathTap::real(0.0, gains[0]).unwrap()];
    let mut expected = vec![0u32];
    for (&g, &gain) in gaps.iter().zip(&gains[1..]) {
        delay += g;
        expected.push(delay);
        taps.push(MultipathTap::real(f64::from(delay) * 0.1, gain).unwrap());
    }
    let ch = ChannelModel::new(12.0, taps).unwrap();
    let m = measure(&cfg, &ch, Correlator::Fast).unwrap();
    let peaks = detect_peaks(&m.aligned, -15.0, 0.5).unwrap();
    assert_eq!(peaks.len(), expected.len(), "{peaks:?}");
    for (p, k) in peaks.iter().zip(&expected) {
        let want = 12.0 + f64::from(*k) * 0.1;
        assert!(
            (p.delay_ns - want).abs() <= 0.05 + 1e-9,
            "{} vs {want}",
            p.delay_ns
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn every_tap_maps_to_one_estimate(
        gaps in proptest::collection::vec(20u32..60, 1..4),
        gains in proptest::collection::vec(-9.0f64..0.0, 4),
    ) {
        soundness_case(&gaps, &gains);
    }
}

#[test]
fn single_path_gives_single_peak() {
    soundness_case(&[], &[0.0]);
}
