use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use sounderlab::{presets, run, CliError, Experiment, RunOptions, ScenarioConfig};

/// Run a sliding-correlator experiment and write its report and data files.
#[derive(Debug, Parser)]
#[command(name = "sounderlab", version)]
struct Args {
    /// sequence, spectrum, sync, pdp, xpd or linearity
    experiment: Experiment,
    /// Scenario file of `key = value` lines
    #[arg(long, required_unless_present = "preset", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in scenario: fig4, fig5, fig6_7 or fig9
    #[arg(long)]
    preset: Option<String>,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Write profile times on the observed (dilated) axis
    #[arg(long)]
    dilated: bool,
    /// Noise seed, overriding `channel.noise_seed`
    #[arg(long)]
    seed: Option<u64>,
}

fn load(args: &Args) -> Result<ScenarioConfig, CliError> {
    let text = match (&args.config, &args.preset) {
        (Some(path), _) => std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?,
        (None, Some(name)) => presets::preset(name)
            .ok_or_else(|| {
                CliError::config(
                    None,
                    "--preset",
                    format!(
                        "unknown preset `{name}`, expected one of {}",
                        presets::names().join(", ")
                    ),
                )
            })?
            .to_string(),
        (None, None) => unreachable!("clap requires --config or --preset"),
    };
    let cfg = ScenarioConfig::from_text(&text, Some(args.experiment))?;
    Ok(match args.seed {
        Some(seed) => cfg.with_noise_seed(seed),
        None => cfg,
    })
}

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = load(&args).and_then(|cfg| {
        run(
            &cfg,
            &args.out,
            RunOptions {
                dilated: args.dilated,
            },
        )
    });
    match outcome {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("sounderlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
