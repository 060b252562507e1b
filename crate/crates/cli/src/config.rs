//! Run configuration: command-line flags layered over an optional
//! `key=value` file, with `EPPM_SEED` as the last fallback for the seed.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Ppm,
    Mppm,
    Eppm,
    Aeppm,
    Ook,
}

impl FromStr for SchemeArg {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as ValueEnum>::from_str(s, true).map_err(|_| CliError::Usage(format!("unknown scheme {s:?}")))
    }
}

/// Named four-scheme comparison sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// 8-ary PPM, 64-ary MPPM (12,2), 8-ary EPPM (11,5,2), 16-ary AEPPM (11,5,2).
    Small,
    /// 64-ary PPM, 64-ary MPPM (12,2), 64-ary EPPM (67,33,16), 128-ary AEPPM (67,33,16).
    Large,
}

impl FromStr for Preset {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as ValueEnum>::from_str(s, true).map_err(|_| CliError::Usage(format!("unknown preset {s:?}")))
    }
}

/// Flags shared by every subcommand. All are optional so that a config file
/// can supply them.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Plain `key=value` file; flags given on the command line take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub lambda: Option<usize>,
    /// Mapped symbol count (power of two).
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long = "gamma-start-db", allow_hyphen_values = true)]
    pub gamma_start_db: Option<f64>,
    #[arg(long = "gamma-stop-db", allow_hyphen_values = true)]
    pub gamma_stop_db: Option<f64>,
    #[arg(long = "gamma-step-db")]
    pub gamma_step_db: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "max-trials")]
    pub max_trials: Option<u64>,
    #[arg(long = "target-errors")]
    pub target_errors: Option<u64>,
    #[arg(long = "target-ber")]
    pub target_ber: Option<f64>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Difference-set file (`Q K LAMBDA : r1 ... rK`) for EPPM/AEPPM.
    #[arg(long = "design-file")]
    pub design_file: Option<PathBuf>,
}

/// Reads `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", i + 1)))?;
        out.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    Ok(out)
}

fn fill<T: FromStr>(slot: &mut Option<T>, file: &BTreeMap<String, String>, key: &str) -> Result<(), CliError> {
    if slot.is_none() {
        if let Some(v) = file.get(key) {
            let parsed = v.parse().map_err(|_| CliError::Usage(format!("config key {key}: bad value {v:?}")))?;
            *slot = Some(parsed);
        }
    }
    Ok(())
}

const KNOWN_KEYS: [&str; 17] = [
    "scheme",
    "preset",
    "q",
    "k",
    "lambda",
    "m",
    "gamma-start-db",
    "gamma-stop-db",
    "gamma-step-db",
    "seed",
    "max-trials",
    "target-errors",
    "target-ber",
    "workers",
    "out",
    "svg",
    "design-file",
];

impl CommonArgs {
    /// Fills unset flags from the config file, then the seed from `EPPM_SEED`.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        if let Some(path) = self.config.clone() {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
            self.merge_file(&parse_config_file(&text)?)?;
        }
        if self.seed.is_none() {
            if let Ok(v) = std::env::var("EPPM_SEED") {
                self.seed = Some(v.trim().parse().map_err(|_| CliError::Usage(format!("EPPM_SEED: bad value {v:?}")))?);
            }
        }
        Ok(self)
    }

    pub fn merge_file(&mut self, file: &BTreeMap<String, String>) -> Result<(), CliError> {
        if let Some(unknown) = file.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
            return Err(CliError::Usage(format!("unknown config key {unknown:?}")));
        }
        fill(&mut self.scheme, file, "scheme")?;
        fill(&mut self.preset, file, "preset")?;
        fill(&mut self.q, file, "q")?;
        fill(&mut self.k, file, "k")?;
        fill(&mut self.lambda, file, "lambda")?;
        fill(&mut self.m, file, "m")?;
        fill(&mut self.gamma_start_db, file, "gamma-start-db")?;
        fill(&mut self.gamma_stop_db, file, "gamma-stop-db")?;
        fill(&mut self.gamma_step_db, file, "gamma-step-db")?;
        fill(&mut self.seed, file, "seed")?;
        fill(&mut self.max_trials, file, "max-trials")?;
        fill(&mut self.target_errors, file, "target-errors")?;
        fill(&mut self.target_ber, file, "target-ber")?;
        fill(&mut self.workers, file, "workers")?;
        fill(&mut self.out, file, "out")?;
        fill(&mut self.svg, file, "svg")?;
        fill(&mut self.design_file, file, "design-file")?;
        Ok(())
    }

    pub fn design_file(&self) -> Option<&Path> {
        self.design_file.as_deref()
    }
}

/// Inclusive dB grid `start, start+step, ..., ≤ stop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaGrid {
    pub start_db: f64,
    pub stop_db: f64,
    pub step_db: f64,
}

impl GammaGrid {
    pub fn new(start_db: f64, stop_db: f64, step_db: f64) -> Result<Self, CliError> {
        if step_db.is_nan() || step_db <= 0.0 || !start_db.is_finite() || !stop_db.is_finite() {
            return Err(CliError::Usage("gamma step must be positive and bounds finite".into()));
        }
        if stop_db < start_db {
            return Err(CliError::Usage("gamma stop must not be below start".into()));
        }
        Ok(Self { start_db, stop_db, step_db })
    }

    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop_db - self.start_db) / self.step_db + 1e-9).floor() as usize + 1;
        (0..n)
            .map(|i| ((self.start_db + i as f64 * self.step_db) * 1e9).round() / 1e9)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points() {
        assert_eq!(GammaGrid::new(0.0, 1.0, 0.1).unwrap().points().len(), 11);
        assert_eq!(GammaGrid::new(0.0, 1.0, 0.1).unwrap().points()[3], 0.3);
        assert_eq!(GammaGrid::new(5.0, 5.0, 1.0).unwrap().points(), vec![5.0]);
        assert!(GammaGrid::new(0.0, 1.0, 0.0).is_err());
        assert!(GammaGrid::new(2.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = parse_config_file("# sweep\nscheme = eppm\nq=11\nseed=9\ngamma_step_db=0.5\n").unwrap();
        let mut args = CommonArgs { q: Some(7), ..Default::default() };
        args.merge_file(&file).unwrap();
        assert_eq!(args.q, Some(7));
        assert_eq!(args.scheme, Some(SchemeArg::Eppm));
        assert_eq!(args.seed, Some(9));
        assert_eq!(args.gamma_step_db, Some(0.5));
    }

    #[test]
    fn bad_config_lines() {
        assert!(parse_config_file("q 7").is_err());
        let mut args = CommonArgs::default();
        assert!(args.merge_file(&parse_config_file("color=red").unwrap()).is_err());
        assert!(args.merge_file(&parse_config_file("q=seven").unwrap()).is_err());
    }
}
