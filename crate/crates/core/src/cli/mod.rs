//! Command-line front end.
//!
//! Flags override keys of the `--config` file; every override of a key that
//! the file sets explicitly is logged at `warn` level.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::analytic::Plane;
use crate::montecarlo::Model;
pub use config::{Axis, RunConfig};

/// Environment variable naming a directory that relative output paths are
/// resolved against.
pub const OUT_DIR_ENV: &str = "RIS_MISALIGN_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "ris-misalign",
    version,
    about = "SNR statistics of a RIS-aided THz link under beam misalignment"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Closed-form parameters, moments and zero-skew sigma for each sigma.
    Eval,
    /// Analytic PDF and CDF on a grid over the support.
    Dist,
    /// Monte-Carlo histogram, quantile table and summary.
    Mc,
    /// Mean and skewness over a sweep axis and sigma, plus the zero-skew locus.
    Sweep,
    /// Run the acceptance matrix; exit 1 if any check fails.
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Eval => "eval",
            Command::Dist => "dist",
            Command::Mc => "mc",
            Command::Sweep => "sweep",
            Command::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// JSON run configuration (unknown keys are rejected).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Error standard deviations in degrees, comma separated.
    #[arg(long, global = true, value_delimiter = ',', num_args = 1..)]
    pub sigma_deg: Option<Vec<f64>>,
    /// Sweep axis (default range unless the config sets one for this axis).
    #[arg(long, global = true, value_enum)]
    pub axis: Option<Axis>,
    /// Monte-Carlo sample count.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Monte-Carlo seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Histogram bins.
    #[arg(long, global = true)]
    pub bins: Option<usize>,
    /// Output file (or file prefix for `mc`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub model: Option<Model>,
    #[arg(long, global = true, value_enum)]
    pub regime: Option<Plane>,
    /// Multiply every closed-form alpha inside `validate` (detector check).
    #[arg(long, global = true, hide = true)]
    pub debug_alpha_scale: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Config(_) | CliError::Io { .. } => 2,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

fn notice(file_keys: &[String], key: &str, flag: &str) {
    if file_keys.iter().any(|k| k == key) {
        log::warn!("--{flag} overrides `{key}` from the config file");
    }
}

/// Read the config file (if any) and apply flag overrides.
pub fn effective_config(ov: &Overrides) -> Result<RunConfig, CliError> {
    let (mut cfg, file_keys, sampler_keys) = match &ov.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            let cfg = RunConfig::from_json(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let raw: serde_json::Value = serde_json::from_str(&text).expect("already parsed");
            let keys = |v: Option<&serde_json::Value>| -> Vec<String> {
                v.and_then(|v| v.as_object())
                    .map(|o| o.keys().cloned().collect())
                    .unwrap_or_default()
            };
            (cfg, keys(Some(&raw)), keys(raw.get("sampler")))
        }
        None => (RunConfig::default(), Vec::new(), Vec::new()),
    };

    if let Some(s) = &ov.sigma_deg {
        notice(&file_keys, "sigma_deg", "sigma-deg");
        notice(&file_keys, "sigma_range", "sigma-deg");
        cfg.sigma_deg = Some(s.clone());
    }
    if let Some(axis) = ov.axis {
        notice(&file_keys, "sweep", "axis");
        if cfg.sweep.map(|s| s.axis) != Some(axis) {
            cfg.sweep = Some(config::SweepSpec {
                axis,
                range: axis.default_range(),
            });
        }
    }
    if let Some(n) = ov.n {
        notice(&sampler_keys, "n", "n");
        cfg.sampler.n = n;
    }
    if let Some(seed) = ov.seed {
        notice(&sampler_keys, "seed", "seed");
        cfg.sampler.seed = seed;
    }
    if let Some(bins) = ov.bins {
        notice(&sampler_keys, "bins", "bins");
        cfg.sampler.bins = bins;
    }
    if let Some(model) = ov.model {
        notice(&sampler_keys, "model", "model");
        cfg.sampler.model = model;
    }
    if let Some(regime) = ov.regime {
        notice(&file_keys, "regime", "regime");
        cfg.regime = regime;
    }
    if let Some(out) = &ov.out {
        notice(&file_keys, "out", "out");
        cfg.out = Some(out.clone());
    }
    Ok(cfg)
}

/// Parse-independent entry point used by the binary and the tests.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = effective_config(&cli.overrides)?;
    let resolved = cfg.resolve().map_err(CliError::Config)?;
    match cli.command {
        Command::Eval => commands::eval(&cfg, &resolved),
        Command::Dist => commands::dist(&cfg, &resolved),
        Command::Mc => commands::mc(&cfg, &resolved),
        Command::Sweep => commands::sweep(&cfg, &resolved),
        Command::Validate => commands::validate(
            &cfg,
            &resolved,
            cli.overrides.debug_alpha_scale.unwrap_or(1.0),
        ),
    }
}

pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("ris-misalign").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_after_subcommand() {
        let cli = parse(&[
            "mc",
            "--sigma-deg",
            "1,2.5",
            "--model",
            "approx",
            "--regime",
            "normal",
            "--n",
            "5000",
        ]);
        assert_eq!(cli.command, Command::Mc);
        let cfg = effective_config(&cli.overrides).unwrap();
        assert_eq!(cfg.sigma_deg, Some(vec![1.0, 2.5]));
        assert_eq!(cfg.sampler.model, Model::Approx);
        assert_eq!(cfg.regime, Plane::NormalPlane);
        assert_eq!(cfg.sampler.n, 5000);
    }

    #[test]
    fn flags_win_over_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"sampler": {"seed": 1, "n": 2000}, "sweep": {"axis": "due", "min": 2, "max": 4, "steps": 3}}"#)
            .unwrap();
        let p = path.to_str().unwrap();
        let cfg =
            effective_config(&parse(&["sweep", "--config", p, "--seed", "9"]).overrides).unwrap();
        assert_eq!((cfg.sampler.seed, cfg.sampler.n), (9, 2000));
        assert_eq!(cfg.sweep.unwrap().range.steps, 3);

        let cfg = effective_config(&parse(&["sweep", "--config", p, "--axis", "theta"]).overrides)
            .unwrap();
        assert_eq!(cfg.sweep.unwrap().range, Axis::Theta.default_range());
    }

    #[test]
    fn error_classes() {
        assert_eq!(CliError::Validation("x".into()).exit_code(), 1);
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        let missing = parse(&["eval", "--config", "/nonexistent/c.json"]);
        assert_eq!(run(&missing).unwrap_err().exit_code(), 2);
    }
}
