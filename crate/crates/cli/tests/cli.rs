use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;

use proptest::prelude::*;
use serde_json::json;
use sounderlab::report::{num, parse_pdp_csv, parse_report_json, pdp_csv, report_json, Report};
use sounderlab::{execute, Experiment, RunOptions, ScenarioConfig};
use sounderlab_core::sounder::Pdp;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sounderlab"))
}

fn read_dir(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

const SMALL: &[(&str, &str)] = &[
    ("sequence", "pn.n_stages = 6\n"),
    ("spectrum", "pn.n_stages = 6\nsounder.alpha_hz = 1e9\n"),
    ("sync", "pn.n_stages = 5\nsounder.alpha_hz = 1e6\nsounder.gamma = 100\nsounder.correlator = direct\n"),
    (
        "pdp",
        "pn.n_stages = 6\nsounder.alpha_hz = 1e9\nsounder.gamma = 100\nchannel.taps = 0:0, 2:-3\nchannel.bulk_delay_ns = 5\nchannel.snr_db = 5\nchannel.noise_seed = 4\n",
    ),
    ("xpd", "xpd.dataset = bundled\n"),
    ("linearity", "linearity.sweep = 0:-30, 10:-40.2, 20:-50\n"),
];

#[test]
fn every_experiment_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for (exp, text) in SMALL {
        let cfg_path = dir.path().join(format!("{exp}.conf"));
        fs::write(&cfg_path, text).unwrap();
        let outs: Vec<_> = (0..2)
            .map(|i| {
                let out = dir.path().join(format!("{exp}-{i}"));
                let st = bin()
                    .args([exp, "--config"])
                    .arg(&cfg_path)
                    .arg("--out")
                    .arg(&out)
                    .status()
                    .unwrap();
                assert!(st.success(), "{exp}");
                read_dir(&out)
            })
            .collect();
        assert!(!outs[0].is_empty());
        assert_eq!(outs[0], outs[1], "{exp}");
    }
}

#[test]
fn sequence_from_published_words() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("seq.conf");
    fs::write(&cfg, "pn.s_word = 111\npn.sw_word = 000000101001\n").unwrap();
    let st = bin()
        .args(["sequence", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(st.success());
    let chips = fs::read_to_string(dir.path().join("sequence.txt")).unwrap();
    assert_eq!(chips.lines().count(), 4095);
    assert!(chips.lines().all(|l| l == "0" || l == "1"));
}

#[test]
fn sync_report_spacing() {
    let cfg = ScenarioConfig::from_text(SMALL[2].1, Some(Experiment::Sync)).unwrap();
    let a = execute(&cfg, RunOptions::default()).unwrap();
    let spacing = a.report.derived["sync_period_measured_s"].as_f64().unwrap();
    let step = a.report.derived["output_step_s"].as_f64().unwrap();
    assert!((spacing - 3.1e-3).abs() <= step);
    assert_eq!(a.report.results.len(), 3);
}

#[test]
fn dilated_flag_changes_only_the_time_axis() {
    let cfg = ScenarioConfig::from_text(SMALL[3].1, Some(Experiment::Pdp)).unwrap();
    let plain = execute(&cfg, RunOptions::default()).unwrap();
    let dil = execute(&cfg, RunOptions { dilated: true }).unwrap();
    let a = parse_pdp_csv(&plain.files[0].1).unwrap();
    let b = parse_pdp_csv(&dil.files[0].1).unwrap();
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!((x.1, x.2), (y.1, y.2));
        assert!((y.0 - 100.0 * x.0).abs() <= 1e-12 * y.0.max(1e-30));
    }
    assert_eq!(plain.report, dil.report);
}

#[test]
fn seed_flag_changes_noise_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("pdp.conf");
    fs::write(&cfg, SMALL[3].1).unwrap();
    let run = |seed: &str, sub: &str| {
        let out = dir.path().join(sub);
        let st = bin()
            .args(["pdp", "--seed", seed, "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(st.success());
        fs::read(out.join("pdp.csv")).unwrap()
    };
    assert_eq!(run("1", "a"), run("1", "b"));
    assert_ne!(run("1", "c"), run("2", "d"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        fs::write(&p, text).unwrap();
        p
    };
    let code = |exp: &str, cfg: &Path, out: &Path| {
        let o = bin()
            .args([exp, "--config"])
            .arg(cfg)
            .arg("--out")
            .arg(out)
            .output()
            .unwrap();
        (
            o.status.code().unwrap(),
            String::from_utf8_lossy(&o.stderr).into_owned(),
        )
    };
    let out = dir.path().join("out");

    let (c, err) = code(
        "sync",
        &write("bad.conf", "sounder.gamma = 100\nsounder.oversample = x\n"),
        &out,
    );
    assert_eq!(c, 2);
    assert!(
        err.contains("line 2") && err.contains("sounder.oversample"),
        "{err}"
    );

    // 31 chips x 2 samples over gamma 1000 slips less than one sample per period
    let coarse = write(
        "coarse.conf",
        "pn.n_stages = 5\nsounder.oversample = 2\nsounder.gamma = 1000\n",
    );
    let (c, err) = code("sync", &coarse, &out);
    assert_eq!(c, 3, "{err}");

    let file = write("file", "x");
    let (c, _) = code("xpd", &write("ok.conf", "\n"), &file.join("sub"));
    assert_eq!(c, 4);

    let (c, _) = code("xpd", &dir.path().join("missing.conf"), &out);
    assert_eq!(c, 4);

    let o = bin().args(["xpd", "--preset", "nope"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = bin().args(["bogus", "--preset", "fig9"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn presets_load_and_validate() {
    for name in sounderlab::presets::names() {
        let text = sounderlab::presets::preset(name).unwrap();
        let raw = sounderlab::config::RawConfig::parse(text).unwrap();
        let exp: Experiment = raw.get("experiment").unwrap().parse().unwrap();
        ScenarioConfig::from_text(text, Some(exp)).unwrap();
    }
}

proptest! {
    #[test]
    fn pdp_csv_round_trip(
        powers in proptest::collection::vec(0.0f64..1e3, 1..50),
        step in 1e-12f64..1e-3,
        gamma in 1.0f64..1e5,
    ) {
        let pdp = Pdp::new(powers.clone(), step, gamma, false).unwrap();
        let rows = parse_pdp_csv(&pdp_csv(&pdp)).unwrap();
        prop_assert_eq!(rows.len(), powers.len());
        for (i, (t, p, db)) in rows.into_iter().enumerate() {
            prop_assert_eq!(t, pdp.time_at(i));
            prop_assert_eq!(p, powers[i]);
            if p > 0.0 {
                prop_assert_eq!(db, (10.0 * p.log10()).max(-300.0));
            }
        }
    }

    #[test]
    fn report_json_round_trip(
        values in proptest::collection::vec(-1e300f64..1e300, 0..20),
        small in proptest::collection::vec(-1e-300f64..1e-300, 0..5),
        key in "[a-z_]{1,12}",
    ) {
        let results = values.iter().chain(&small).map(|&v| json!({ "value": num(v) })).collect();
        let mut derived = BTreeMap::new();
        derived.insert(key.clone(), num(values.first().copied().unwrap_or(0.5)));
        let mut echo = BTreeMap::new();
        echo.insert(key, "1e9".to_string());
        let r = Report { experiment: "pdp".into(), config_echo: echo, results, derived };
        let back = parse_report_json(&report_json(&r)).unwrap();
        prop_assert_eq!(&back, &r);
        for (a, b) in back.results.iter().zip(values.iter().chain(&small)) {
            prop_assert_eq!(a["value"].as_f64().unwrap(), *b);
        }
    }
}
