use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sounderlab_core::analysis::{
    detect_peaks, find_null_and_sidelobe, fit_ple, fspl, linearity_check, power_spectrum, xpd,
    xpd_stats,
};
use sounderlab_core::pipeline::{measure, SYNC_THRESHOLD};
use sounderlab_core::pnseq::{self, generate};
use sounderlab_core::sounder::{detect_sync, dilate, sliding_correlate, undilate, Pdp};

use crate::config::{Experiment, ScenarioConfig};
use crate::error::CliError;
use crate::report::{chips_text, emit_report_json, num, pdp_csv, write_atomic, Report};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Write profile times on the observed (dilated) axis.
    pub dilated: bool,
}

/// Everything an experiment produces, before it touches the filesystem.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub report: Report,
    /// Data files as `(file name, contents)`.
    pub files: Vec<(String, String)>,
}

pub fn execute(cfg: &ScenarioConfig, opts: RunOptions) -> Result<Artifacts, CliError> {
    let (results, derived, files) = match cfg.experiment {
        Experiment::Sequence => sequence(cfg),
        Experiment::Spectrum => spectrum(cfg)?,
        Experiment::Sync => sync(cfg, opts)?,
        Experiment::Pdp => pdp(cfg, opts)?,
        Experiment::Xpd => xpd_experiment(cfg)?,
        Experiment::Linearity => linearity(cfg)?,
    };
    let mut config_echo = cfg.raw.echo();
    config_echo.insert("mode".into(), cfg.mode.as_str().into());
    Ok(Artifacts {
        report: Report {
            experiment: cfg.experiment.as_str().into(),
            config_echo,
            results,
            derived,
        },
        files,
    })
}

/// Runs the experiment and writes `<experiment>.json` plus its data files
/// into `out_dir`. Returns the paths written.
pub fn run(
    cfg: &ScenarioConfig,
    out_dir: &Path,
    opts: RunOptions,
) -> Result<Vec<PathBuf>, CliError> {
    let artifacts = execute(cfg, opts)?;
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let mut written = Vec::new();
    for (name, body) in &artifacts.files {
        let p = out_dir.join(name);
        write_atomic(&p, body.as_bytes())?;
        written.push(p);
    }
    let p = out_dir.join(format!("{}.json", cfg.experiment.as_str()));
    emit_report_json(&artifacts.report, &p)?;
    written.push(p);
    Ok(written)
}

type Output = (Vec<Value>, BTreeMap<String, Value>, Vec<(String, String)>);

fn derived<const N: usize>(pairs: [(&str, Value); N]) -> BTreeMap<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn sequence(cfg: &ScenarioConfig) -> Output {
    let seq = generate(&cfg.pn);
    let n = cfg.pn.n_stages();
    let result = json!({
        "n_stages": n,
        "s_word": pnseq::length_word_from_stages(n).ok(),
        "taps": cfg.pn.taps(),
        "sw_word": pnseq::switch_word_from_taps(cfg.pn.taps(), n).ok(),
        "seed": cfg.pn.seed(),
        "length": seq.len(),
        "ones": seq.ones(),
        "zeros": seq.zeros(),
        "maximal": seq.is_maximal(),
    });
    let d = derived([
        ("chip_rate_hz", num(cfg.pn.chip_rate_hz())),
        ("period_s", num(seq.len() as f64 / cfg.pn.chip_rate_hz())),
    ]);
    (
        vec![result],
        d,
        vec![("sequence.txt".into(), chips_text(seq.chips()))],
    )
}

fn spectrum(cfg: &ScenarioConfig) -> Result<Output, CliError> {
    let tx = cfg.sounder.transmit_waveform();
    let fs = tx.sample_rate_hz();
    // default: one full PN period per segment, which resolves every spectral line
    let resolution = cfg.spectrum_resolution_hz.unwrap_or(fs / tx.len() as f64);
    let psd = power_spectrum(&tx.repeat(cfg.spectrum_periods), resolution)?;
    let (null_hz, sidelobe_db) = find_null_and_sidelobe(&psd)?;

    let mut csv = String::from("freq_hz,power_db\n");
    for (f, p) in psd.freqs_hz.iter().zip(&psd.power_db) {
        writeln!(csv, "{f},{p}").expect("writing to a String");
    }
    let d = derived([
        ("chip_rate_hz", num(cfg.pn.chip_rate_hz())),
        ("resolution_hz", num(psd.resolution_hz())),
        ("null_to_null_bandwidth_hz", num(2.0 * null_hz)),
    ]);
    let result = json!({ "first_null_hz": num(null_hz), "sidelobe_db": num(sidelobe_db) });
    Ok((vec![result], d, vec![("spectrum.csv".into(), csv)]))
}

fn profile_csv(pdp: &Pdp, opts: RunOptions) -> Result<String, CliError> {
    let out = match (pdp.is_dilated(), opts.dilated) {
        (true, false) => undilate(pdp)?,
        (false, true) => dilate(pdp, pdp.gamma())?,
        _ => pdp.clone(),
    };
    Ok(pdp_csv(&out))
}

fn sync(cfg: &ScenarioConfig, opts: RunOptions) -> Result<Output, CliError> {
    let trace = sliding_correlate(
        &cfg.sounder.transmit_waveform(),
        &cfg.sounder,
        cfg.correlator,
    )?;
    let info = detect_sync(&trace, SYNC_THRESHOLD)?;
    let results = info
        .pulse_times_s
        .iter()
        .enumerate()
        .map(|(i, t)| json!({ "pulse": i, "time_s": num(*t) }))
        .collect();
    let d = derived([
        ("gamma", num(cfg.sounder.gamma())),
        ("sync_period_expected_s", num(cfg.sounder.sync_period_s())),
        ("sync_period_measured_s", num(info.period_s)),
        ("max_jitter_s", num(info.max_jitter_s())),
        ("output_step_s", num(trace.time_step_s())),
    ]);
    Ok((
        results,
        d,
        vec![("sync.csv".into(), profile_csv(&trace, opts)?)],
    ))
}

fn pdp(cfg: &ScenarioConfig, opts: RunOptions) -> Result<Output, CliError> {
    let m = measure(&cfg.sounder, &cfg.channel, cfg.correlator)?;
    let peaks = detect_peaks(&m.aligned, cfg.threshold_db, cfg.min_separation_ns)?;
    let first = peaks.first().map_or(0.0, |p| p.delay_ns);
    let results = peaks
        .iter()
        .map(|p| {
            json!({
                "delay_ns": num(p.delay_ns),
                "relative_delay_ns": num(p.delay_ns - first),
                "relative_power_db": num(p.relative_power_db),
            })
        })
        .collect();
    let d = derived([
        ("gamma", num(cfg.sounder.gamma())),
        ("sync_period_expected_s", num(cfg.sounder.sync_period_s())),
        ("sync_period_measured_s", num(m.sync.period_s)),
        ("delay_step_ns", num(m.aligned.time_step_s() * 1e9)),
        ("first_path_delay_ns", num(first)),
        ("peak_count", json!(peaks.len())),
    ]);
    Ok((
        results,
        d,
        vec![("pdp.csv".into(), profile_csv(&m.aligned, opts)?)],
    ))
}

fn xpd_experiment(cfg: &ScenarioConfig) -> Result<Output, CliError> {
    let recs = &cfg.xpd_records;
    let stats = xpd_stats(recs)?;
    let co: Vec<(f64, f64)> = recs.iter().map(|r| (r.distance_m, r.pl_vv_db)).collect();
    let fit = fit_ple(&co, cfg.d0_m, cfg.fc_hz)?;
    let results = recs
        .iter()
        .map(|r| {
            Ok(json!({
                "distance_m": num(r.distance_m),
                "pl_vv_db": num(r.pl_vv_db),
                "pl_vh_db": num(r.pl_vh_db),
                "xpd_db": num(xpd(r)),
                "fspl_db": num(fspl(r.distance_m, cfg.fc_hz)?),
                "physical": r.is_physical(),
            }))
        })
        .collect::<Result<Vec<_>, sounderlab_core::Error>>()?;
    let d = derived([
        ("xpd_mean_db", num(stats.mean_db)),
        ("xpd_std_db", num(stats.std_db)),
        ("ple_vv", num(fit.ple)),
        ("ple_rmse_db", num(fit.rmse_db)),
        ("fc_hz", num(cfg.fc_hz)),
        ("d0_m", num(cfg.d0_m)),
    ]);
    Ok((results, d, Vec::new()))
}

fn linearity(cfg: &ScenarioConfig) -> Result<Output, CliError> {
    let fit = linearity_check(&cfg.sweep)?;
    let results = cfg
        .sweep
        .iter()
        .map(|&(a, p)| {
            json!({
                "attenuation_db": num(a),
                "power_dbm": num(p),
                "residual_db": num(p - (fit.intercept_dbm - fit.slope * a)),
            })
        })
        .collect();
    let d = derived([
        ("slope", num(fit.slope)),
        ("intercept_dbm", num(fit.intercept_dbm)),
        ("max_deviation_db", num(fit.max_deviation_db)),
        ("linear", json!(fit.is_linear())),
    ]);
    Ok((results, d, Vec::new()))
}
