//! Scenario files: one `key = value` per line, dotted keys for sections,
//! `#` starts a comment.
//!
//! ```text
//! experiment = pdp
//! pn.s_word = 110
//! sounder.alpha_hz = 1e9
//! sounder.gamma = 20000
//! channel.preset = fig6
//! ```

use std::collections::BTreeMap;
use std::str::FromStr;

use sounderlab_core::analysis::XpdRecord;
use sounderlab_core::channel::{fig6_scenario, ChannelModel, MultipathTap};
use sounderlab_core::pnseq::{self, PnConfig};
use sounderlab_core::sounder::{Correlator, SounderConfig};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Tx,
    Rx,
    Analyze,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Tx => "tx",
            Mode::Rx => "rx",
            Mode::Analyze => "analyze",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Sequence,
    Spectrum,
    Sync,
    Pdp,
    Xpd,
    Linearity,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Sequence,
        Experiment::Spectrum,
        Experiment::Sync,
        Experiment::Pdp,
        Experiment::Xpd,
        Experiment::Linearity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::Sequence => "sequence",
            Experiment::Spectrum => "spectrum",
            Experiment::Sync => "sync",
            Experiment::Pdp => "pdp",
            Experiment::Xpd => "xpd",
            Experiment::Linearity => "linearity",
        }
    }

    /// The side of the link an experiment runs on.
    pub fn mode(self) -> Mode {
        match self {
            Experiment::Sequence | Experiment::Spectrum => Mode::Tx,
            Experiment::Sync | Experiment::Pdp => Mode::Rx,
            Experiment::Xpd | Experiment::Linearity => Mode::Analyze,
        }
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Experiment::ALL.iter().map(|e| e.as_str()).collect();
                format!(
                    "unknown experiment `{s}`, expected one of {}",
                    names.join(", ")
                )
            })
    }
}

/// Raw key/value pairs with the line each came from.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, usize)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| {
                CliError::config(
                    Some(line),
                    "",
                    format!("expected `key = value`, got `{body}`"),
                )
            })?;
            let (key, value) = (key.trim(), value.trim());
            let valid = !key.is_empty()
                && key.split('.').all(|part| {
                    !part.is_empty() && part.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                });
            if !valid {
                return Err(CliError::config(Some(line), key, "malformed key"));
            }
            if value.is_empty() {
                return Err(CliError::config(Some(line), key, "missing value"));
            }
            if let Some((_, first)) = entries.get(key) {
                return Err(CliError::config(
                    Some(line),
                    key,
                    format!("duplicate key, first set on line {first}"),
                ));
            }
            entries.insert(key.to_string(), (value.to_string(), line));
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    pub fn line_of(&self, key: &str) -> Option<usize> {
        self.entries.get(key).map(|&(_, l)| l)
    }

    pub fn set(&mut self, key: &str, value: String) {
        let line = self.line_of(key).unwrap_or(0);
        self.entries.insert(key.to_string(), (value, line));
    }

    /// Every key and value, sorted by key.
    pub fn echo(&self) -> BTreeMap<String, String> {
        self.entries
            .iter()
            .map(|(k, (v, _))| (k.clone(), v.clone()))
            .collect()
    }

    fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    fn err(&self, key: &str, msg: impl Into<String>) -> CliError {
        CliError::config(self.line_of(key), key, msg)
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| self.err(key, format!("`{v}`: {e}")))
            })
            .transpose()
    }

    fn parsed_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.parsed(key)?.unwrap_or(default))
    }

    /// Comma-separated list of `a:b[:c]` tuples.
    fn tuples(&self, key: &str, min: usize, max: usize) -> Result<Option<Vec<Vec<f64>>>, CliError> {
        let Some(v) = self.get(key) else {
            return Ok(None);
        };
        v.split(',')
            .map(|item| {
                let fields: Result<Vec<f64>, _> =
                    item.split(':').map(|f| f.trim().parse::<f64>()).collect();
                match fields {
                    Ok(f) if (min..=max).contains(&f.len()) => Ok(f),
                    _ => Err(self.err(key, format!("bad entry `{}`", item.trim()))),
                }
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }
}

const KNOWN_KEYS: &[&str] = &[
    "mode",
    "experiment",
    "pn.n_stages",
    "pn.s_word",
    "pn.taps",
    "pn.sw_word",
    "pn.seed",
    "sounder.alpha_hz",
    "sounder.beta_hz",
    "sounder.gamma",
    "sounder.oversample",
    "sounder.lpf_cutoff_hz",
    "sounder.periods",
    "sounder.correlator",
    "channel.preset",
    "channel.bulk_delay_ns",
    "channel.taps",
    "channel.snr_db",
    "channel.noise_seed",
    "spectrum.resolution_hz",
    "spectrum.periods",
    "analysis.threshold_db",
    "analysis.min_separation_ns",
    "xpd.dataset",
    "xpd.fc_hz",
    "xpd.d0_m",
    "linearity.sweep",
];

/// Synthetic co/cross-polarised path loss at 142 GHz shipped with the tool.
pub const BUNDLED_XPD: &str = include_str!("../data/xpd_synthetic.csv");

#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub raw: RawConfig,
    pub mode: Mode,
    pub experiment: Experiment,
    pub pn: PnConfig,
    pub sounder: SounderConfig,
    pub correlator: Correlator,
    pub channel: ChannelModel,
    pub spectrum_resolution_hz: Option<f64>,
    pub spectrum_periods: usize,
    pub threshold_db: f64,
    pub min_separation_ns: f64,
    pub xpd_records: Vec<XpdRecord>,
    pub fc_hz: f64,
    pub d0_m: f64,
    pub sweep: Vec<(f64, f64)>,
}

impl ScenarioConfig {
    /// Parses and validates a scenario. `experiment` from the command line
    /// wins over the file but must agree with it when both are given.
    pub fn from_text(text: &str, experiment: Option<Experiment>) -> Result<Self, CliError> {
        Self::from_raw(RawConfig::parse(text)?, experiment)
    }

    pub fn from_raw(mut raw: RawConfig, cli: Option<Experiment>) -> Result<Self, CliError> {
        if let Some(unknown) = raw.keys().find(|k| !KNOWN_KEYS.contains(k)) {
            return Err(raw.err(unknown, "unknown key"));
        }
        let file: Option<Experiment> = raw
            .get("experiment")
            .map(|v| v.parse().map_err(|e: String| raw.err("experiment", e)))
            .transpose()?;
        let experiment = match (cli, file) {
            (Some(c), Some(f)) if c != f => {
                return Err(raw.err(
                    "experiment",
                    format!(
                        "file says `{}` but `{}` was requested",
                        f.as_str(),
                        c.as_str()
                    ),
                ))
            }
            (Some(e), _) | (None, Some(e)) => e,
            (None, None) => {
                return Err(CliError::config(None, "experiment", "no experiment given"))
            }
        };
        raw.set("experiment", experiment.as_str().to_string());

        let mode = match raw.get("mode") {
            None => experiment.mode(),
            Some(m) => {
                let mode = [Mode::Tx, Mode::Rx, Mode::Analyze]
                    .into_iter()
                    .find(|x| x.as_str() == m)
                    .ok_or_else(|| raw.err("mode", format!("`{m}`: expected tx, rx or analyze")))?;
                if mode != experiment.mode() {
                    return Err(raw.err(
                        "mode",
                        format!(
                            "experiment `{}` runs in {} mode, not {m}",
                            experiment.as_str(),
                            experiment.mode().as_str()
                        ),
                    ));
                }
                mode
            }
        };

        let pn = pn_config(&raw)?;
        let sounder = sounder_config(&raw, pn.clone())?;
        let correlator = match raw.get("sounder.correlator").unwrap_or("fast") {
            "fast" => Correlator::Fast,
            "direct" => Correlator::Direct,
            other => {
                return Err(raw.err(
                    "sounder.correlator",
                    format!("`{other}`: expected fast or direct"),
                ))
            }
        };
        let channel = channel_model(&raw)?;

        let spectrum_resolution_hz: Option<f64> = raw.parsed("spectrum.resolution_hz")?;
        if let Some(r) = spectrum_resolution_hz {
            if !(r > 0.0 && r.is_finite()) {
                return Err(raw.err("spectrum.resolution_hz", "must be positive"));
            }
        }
        let spectrum_periods = raw.parsed_or("spectrum.periods", 4usize)?;
        if spectrum_periods == 0 {
            return Err(raw.err("spectrum.periods", "must be at least 1"));
        }
        let threshold_db = raw.parsed_or("analysis.threshold_db", -20.0)?;
        if !(threshold_db < 0.0) {
            return Err(raw.err("analysis.threshold_db", "must be negative"));
        }
        let half_chip_ns = 0.5e9 / pn.chip_rate_hz();
        let min_separation_ns = raw.parsed_or("analysis.min_separation_ns", half_chip_ns)?;
        if !(min_separation_ns >= 0.0) {
            return Err(raw.err("analysis.min_separation_ns", "must be nonnegative"));
        }

        let fc_hz = raw.parsed_or("xpd.fc_hz", 142e9)?;
        let d0_m = raw.parsed_or("xpd.d0_m", 1.0)?;
        if !(fc_hz > 0.0 && d0_m > 0.0) {
            return Err(raw.err(
                "xpd.fc_hz",
                "carrier and reference distance must be positive",
            ));
        }
        let xpd_records = match raw.get("xpd.dataset") {
            None | Some("bundled") => {
                parse_xpd_csv(BUNDLED_XPD).map_err(|e| CliError::config(None, "xpd.dataset", e))?
            }
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                parse_xpd_csv(&text).map_err(|e| raw.err("xpd.dataset", format!("{path}: {e}")))?
            }
        };

        let sweep = match raw.tuples("linearity.sweep", 2, 2)? {
            Some(points) => points.into_iter().map(|p| (p[0], p[1])).collect(),
            None => Vec::new(),
        };
        if experiment == Experiment::Linearity && sweep.len() < 3 {
            return Err(raw.err(
                "linearity.sweep",
                "need at least 3 `attenuation_db:power_dbm` points",
            ));
        }

        Ok(Self {
            raw,
            mode,
            experiment,
            pn,
            sounder,
            correlator,
            channel,
            spectrum_resolution_hz,
            spectrum_periods,
            threshold_db,
            min_separation_ns,
            xpd_records,
            fc_hz,
            d0_m,
            sweep,
        })
    }

    /// Replaces the noise seed, as `--seed` does.
    pub fn with_noise_seed(mut self, seed: u64) -> Self {
        self.raw.set("channel.noise_seed", seed.to_string());
        self.channel = match self.channel.awgn_snr_db() {
            Some(snr) => self.channel.with_noise(snr, seed),
            None => self.channel,
        };
        self
    }
}

fn pn_config(raw: &RawConfig) -> Result<PnConfig, CliError> {
    fn core<'a>(
        raw: &'a RawConfig,
        key: &'a str,
    ) -> impl Fn(sounderlab_core::Error) -> CliError + 'a {
        move |e| raw.err(key, e.to_string())
    }
    let n = match (raw.get("pn.n_stages"), raw.get("pn.s_word")) {
        (Some(_), Some(_)) => {
            return Err(raw.err("pn.s_word", "give pn.n_stages or pn.s_word, not both"))
        }
        (None, Some(w)) => pnseq::stages_from_length_word(w).map_err(core(raw, "pn.s_word"))?,
        _ => raw.parsed_or("pn.n_stages", 5usize)?,
    };
    let taps = match (raw.get("pn.taps"), raw.get("pn.sw_word")) {
        (Some(_), Some(_)) => {
            return Err(raw.err("pn.sw_word", "give pn.taps or pn.sw_word, not both"))
        }
        (None, Some(w)) => pnseq::taps_from_switch_word(w, n).map_err(core(raw, "pn.sw_word"))?,
        (Some(list), None) => list
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| raw.err("pn.taps", format!("`{list}`: {e}")))?,
        (None, None) => pnseq::default_taps(n)
            .map_err(core(raw, "pn.n_stages"))?
            .to_vec(),
    };
    let seed = match raw.get("pn.seed") {
        None => pnseq::all_ones(n.min(32)),
        Some(s) => parse_seed(s).map_err(|e| raw.err("pn.seed", e))?,
    };
    let alpha = raw.parsed_or("sounder.alpha_hz", 1e9)?;
    let key = if raw.get("pn.sw_word").is_some() {
        "pn.sw_word"
    } else {
        "pn.taps"
    };
    let pn = PnConfig::new(n, &taps, seed, alpha).map_err(core(raw, key))?;
    if !pnseq::validate_maximal(pn.taps(), n).map_err(core(raw, key))? {
        return Err(raw.err(
            key,
            format!("taps {:?} do not give a maximal-length sequence", pn.taps()),
        ));
    }
    Ok(pn)
}

/// Decimal, or binary with a `0b` prefix.
fn parse_seed(s: &str) -> Result<u32, String> {
    match s.strip_prefix("0b") {
        Some(bits) => u32::from_str_radix(bits, 2),
        None => s.parse(),
    }
    .map_err(|e| format!("`{s}`: {e}"))
}

fn sounder_config(raw: &RawConfig, pn: PnConfig) -> Result<SounderConfig, CliError> {
    let oversample = raw.parsed_or("sounder.oversample", 10usize)?;
    let cfg = match (
        raw.parsed::<f64>("sounder.beta_hz")?,
        raw.parsed::<f64>("sounder.gamma")?,
    ) {
        (Some(_), Some(_)) => {
            return Err(raw.err(
                "sounder.gamma",
                "give sounder.beta_hz or sounder.gamma, not both",
            ))
        }
        (Some(beta), None) => SounderConfig::new(pn, beta, oversample)
            .map_err(|e| raw.err("sounder.beta_hz", e.to_string()))?,
        (None, gamma) => SounderConfig::with_gamma(pn, gamma.unwrap_or(100.0), oversample)
            .map_err(|e| raw.err("sounder.gamma", e.to_string()))?,
    };
    let cfg = match raw.parsed::<f64>("sounder.lpf_cutoff_hz")? {
        Some(hz) => cfg
            .lpf_cutoff(hz)
            .map_err(|e| raw.err("sounder.lpf_cutoff_hz", e.to_string()))?,
        None => cfg,
    };
    match raw.parsed::<usize>("sounder.periods")? {
        Some(p) => cfg
            .periods(p)
            .map_err(|e| raw.err("sounder.periods", e.to_string())),
        None => Ok(cfg),
    }
}

fn channel_model(raw: &RawConfig) -> Result<ChannelModel, CliError> {
    let base = match raw.get("channel.preset") {
        None | Some("identity") => None,
        Some("fig6") => Some(fig6_scenario()),
        Some(other) => {
            return Err(raw.err(
                "channel.preset",
                format!("`{other}`: expected fig6 or identity"),
            ))
        }
    };
    let bulk: Option<f64> = raw.parsed("channel.bulk_delay_ns")?;
    let taps = raw
        .tuples("channel.taps", 2, 3)?
        .map(|list| {
            list.into_iter()
                .map(|t| MultipathTap::new(t[0], t[1], t.get(2).copied().unwrap_or(0.0)))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| raw.err("channel.taps", e.to_string()))
        })
        .transpose()?;
    let ch = match (base, bulk, taps) {
        (Some(p), None, None) => p,
        (base, bulk, taps) => {
            let base = base.unwrap_or_else(ChannelModel::identity);
            let bulk = bulk.unwrap_or(base.bulk_delay_ns());
            let taps = taps.unwrap_or_else(|| base.taps().to_vec());
            ChannelModel::new(bulk, taps).map_err(|e| raw.err("channel.taps", e.to_string()))?
        }
    };
    let seed = raw.parsed_or("channel.noise_seed", 0u64)?;
    Ok(match raw.parsed::<f64>("channel.snr_db")? {
        Some(snr) if snr.is_finite() => ch.with_noise(snr, seed),
        Some(_) => return Err(raw.err("channel.snr_db", "must be finite")),
        None => ch,
    })
}

/// `distance_m,pl_vv_db,pl_vh_db` with a header line.
pub fn parse_xpd_csv(text: &str) -> Result<Vec<XpdRecord>, String> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == "distance_m,pl_vv_db,pl_vh_db" => {}
        _ => return Err("expected header `distance_m,pl_vv_db,pl_vh_db`".into()),
    }
    lines
        .map(|(i, l)| {
            let f: Vec<f64> = l
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| format!("line {}: {e}", i + 1))?;
            match f.as_slice() {
                &[d, vv, vh] => Ok(XpdRecord::new(d, vv, vh)),
                _ => Err(format!("line {}: expected 3 fields", i + 1)),
            }
        })
        .collect()
}
