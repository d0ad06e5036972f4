//! Run configuration: built-in defaults, an optional flat `key = value`
//! config file, and command-line overrides that win over the file.
//!
//! The format is deliberately minimal so a run is reproducible from a
//! one-screen text file: one `key = value` per line, `#` starts a comment,
//! blank lines are ignored.  Keys mirror the CLI flags one-for-one
//! (`experiments`, `tol`, `out_dir`, `eps_ladder`, `lambda`, `max_m`,
//! `eps`, `seed`).  Unknown keys are rejected outright so a typo cannot
//! silently fall back to a default.

use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use crate::moments::MAX_COMB_ORDER;
use crate::pairing::LadderSpec;

/// The named experiments the CLI can run.  `all` on the command line
/// expands to every variant in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    VerifyDerivative,
    Moments,
    Identity1112,
    Semiclassical,
    SeriesAccuracy,
    EpsDecomposition,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::VerifyDerivative,
        Experiment::Moments,
        Experiment::Identity1112,
        Experiment::Semiclassical,
        Experiment::SeriesAccuracy,
        Experiment::EpsDecomposition,
    ];

    /// CLI-facing name.
    pub fn name(self) -> &'static str {
        match self {
            Experiment::VerifyDerivative => "verify-derivative",
            Experiment::Moments => "moments",
            Experiment::Identity1112 => "identity-11-12",
            Experiment::Semiclassical => "semiclassical",
            Experiment::SeriesAccuracy => "series-accuracy",
            Experiment::EpsDecomposition => "eps-decomposition",
        }
    }

    /// Parse one experiment name; `all` expands to the full suite.
    pub fn parse(name: &str) -> Option<Vec<Experiment>> {
        if name == "all" {
            return Some(Experiment::ALL.to_vec());
        }
        Experiment::ALL
            .iter()
            .find(|e| e.name() == name)
            .map(|e| vec![*e])
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything a run needs, with every field override-able from a config
/// file and again from the command line (flags win).
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Experiments to execute, in order.
    pub experiments: Vec<Experiment>,
    /// Global tolerance override.  When unset, every check uses its own
    /// documented default (they differ: identity checks are tighter than
    /// slope checks).
    pub tol: Option<f64>,
    /// Directory receiving `report.json` and the per-check CSV files.
    pub out_dir: PathBuf,
    /// Ladder of shift parameters for the `eps -> 0` extrapolations.
    pub eps_ladder: Vec<f64>,
    /// Thermal-time scale `lambda = pi kT / hbar` of the noise checks.
    pub lambda: f64,
    /// Highest moment order `m` used in comb and identity grids (`<= 3`).
    pub max_m: u32,
    /// Finite shift used by the moment table and the comb expansion.
    pub eps: f64,
    /// Seed for the probe-coefficient draws in the linearity check.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            experiments: Vec::new(),
            tol: None,
            out_dir: PathBuf::from("distpair-out"),
            eps_ladder: LadderSpec::default_eps().values,
            lambda: 5.0,
            max_m: 3,
            eps: 0.1,
            seed: 42,
        }
    }
}

impl RunConfig {
    /// The tolerance a check should use: the global override if given,
    /// otherwise the check's own default.
    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    /// The eps ladder as a validated `LadderSpec` (order capped at 5).
    pub fn eps_ladder_spec(&self) -> Result<LadderSpec, ConfigError> {
        let order = (self.eps_ladder.len().saturating_sub(1)).min(5);
        LadderSpec::new(self.eps_ladder.clone(), order.max(1))
            .map_err(|e| ConfigError::BadValue { key: "eps_ladder", reason: e.to_string() })
    }

    /// Read a config file into `self`, overriding current values.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let stripped = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if stripped.is_empty() {
                continue;
            }
            let (key, value) = stripped
                .split_once('=')
                .ok_or(ConfigError::Syntax { line })?;
            self.apply_kv(key.trim(), value.trim(), line)?;
        }
        Ok(())
    }

    fn apply_kv(&mut self, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
        match key {
            "experiments" => {
                let mut exps = Vec::new();
                for name in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let parsed = Experiment::parse(name).ok_or(ConfigError::BadValue {
                        key: "experiments",
                        reason: format!("unknown experiment '{name}'"),
                    })?;
                    exps.extend(parsed);
                }
                self.experiments = exps;
            }
            "tol" => self.tol = Some(parse_f64("tol", value)?),
            "out_dir" => self.out_dir = PathBuf::from(value),
            "eps_ladder" => {
                let mut ladder = Vec::new();
                for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    ladder.push(parse_f64("eps_ladder", item)?);
                }
                self.eps_ladder = ladder;
            }
            "lambda" => self.lambda = parse_f64("lambda", value)?,
            "max_m" => {
                self.max_m = value.parse().map_err(|_| ConfigError::BadValue {
                    key: "max_m",
                    reason: format!("not a non-negative integer: '{value}'"),
                })?
            }
            "eps" => self.eps = parse_f64("eps", value)?,
            "seed" => {
                self.seed = value.parse().map_err(|_| ConfigError::BadValue {
                    key: "seed",
                    reason: format!("not a u64: '{value}'"),
                })?
            }
            other => {
                return Err(ConfigError::UnknownKey { line, key: other.to_string() });
            }
        }
        Ok(())
    }

    /// Validate the assembled configuration before running anything.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(ConfigError::BadValue {
                    key: "tol",
                    reason: "must be positive and finite".into(),
                });
            }
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(ConfigError::BadValue {
                key: "lambda",
                reason: "must be positive and finite".into(),
            });
        }
        if self.max_m > MAX_COMB_ORDER {
            return Err(ConfigError::BadValue {
                key: "max_m",
                reason: format!("comb expansion is offered through m = {MAX_COMB_ORDER}"),
            });
        }
        if !(self.eps > 0.0 && self.eps < PI / 2.0) {
            return Err(ConfigError::BadValue {
                key: "eps",
                reason: "must lie in (0, pi/2)".into(),
            });
        }
        self.eps_ladder_spec()?;
        Ok(())
    }
}

fn parse_f64(key: &'static str, value: &str) -> Result<f64, ConfigError> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| ConfigError::BadValue {
            key,
            reason: format!("not a finite number: '{value}'"),
        })
}

/// Configuration errors; all of them map to the usage exit code.
#[derive(Debug)]
pub enum ConfigError {
    Io { path: PathBuf, source: std::io::Error },
    Syntax { line: usize },
    UnknownKey { line: usize, key: String },
    BadValue { key: &'static str, reason: String },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io { path, source } => {
                write!(f, "cannot read config '{}': {source}", path.display())
            }
            ConfigError::Syntax { line } => {
                write!(f, "config line {line}: expected 'key = value'")
            }
            ConfigError::UnknownKey { line, key } => {
                write!(f, "config line {line}: unknown key '{key}'")
            }
            ConfigError::BadValue { key, reason } => write!(f, "config key '{key}': {reason}"),
        }
    }
}

impl std::error::Error for ConfigError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            ConfigError::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn experiment_names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(Experiment::parse(e.name()), Some(vec![e]));
        }
        assert_eq!(Experiment::parse("all").unwrap().len(), 6);
        assert_eq!(Experiment::parse("no-such-thing"), None);
    }

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn file_parsing_and_overrides() {
        let dir = std::env::temp_dir().join(format!("distpair-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(
            &path,
            "# comment\n\
             lambda = 7.5   # inline comment\n\
             eps_ladder = 0.1, 0.05, 0.025\n\
             experiments = moments, verify-derivative\n\
             seed = 7\n",
        )
        .unwrap();
        let mut cfg = RunConfig::default();
        cfg.apply_file(&path).unwrap();
        assert_eq!(cfg.lambda, 7.5);
        assert_eq!(cfg.eps_ladder, vec![0.1, 0.05, 0.025]);
        assert_eq!(
            cfg.experiments,
            vec![Experiment::Moments, Experiment::VerifyDerivative]
        );
        assert_eq!(cfg.seed, 7);
        cfg.validate().unwrap();
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn bad_inputs_are_rejected() {
        let mut cfg = RunConfig::default();
        assert!(cfg.apply_kv("nope", "1", 3).is_err());
        assert!(cfg.apply_kv("lambda", "zero", 1).is_err());
        cfg.lambda = -1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.eps = 2.0;
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.max_m = 9;
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.eps_ladder = vec![0.1];
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.eps_ladder = vec![0.05, 0.1];
        assert!(cfg.validate().is_err());
    }
}
