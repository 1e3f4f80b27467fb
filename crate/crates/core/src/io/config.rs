use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ConfigError;
use crate::algorithms::{Fallback, Sampling};
use crate::experiments::{Algorithm, Mode, SweepConfig, DEFAULT_LAMBDA_DRAWS};

/// Commands a config file can drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Solve,
    Bon,
    Itp,
    SweepN,
    SweepBeta,
    Concentration,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Bon => "bon",
            Command::Itp => "itp",
            Command::SweepN => "sweep-n",
            Command::SweepBeta => "sweep-beta",
            Command::Concentration => "concentration",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

fn default_algorithms() -> Vec<Algorithm> {
    vec![Algorithm::Bon, Algorithm::Itp]
}
fn default_n_grid() -> Vec<u64> {
    vec![1, 4, 16, 64, 256]
}
fn default_beta_grid() -> Vec<f64> {
    vec![1.0]
}
fn default_replicates() -> usize {
    50
}
fn default_lambda_draws() -> usize {
    DEFAULT_LAMBDA_DRAWS
}
fn default_trials() -> usize {
    200
}
fn default_delta() -> f64 {
    0.05
}

/// A validated run description. Relative paths are resolved against the
/// directory of the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub instance: PathBuf,
    pub command: Command,
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "default_n_grid")]
    pub n_grid: Vec<u64>,
    #[serde(default = "default_beta_grid")]
    pub beta_grid: Vec<f64>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub fallback: Fallback,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default = "default_lambda_draws")]
    pub lambda_draws: usize,
    #[serde(default)]
    pub prompt: Option<String>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_delta")]
    pub delta: f64,
}

impl RunConfig {
    pub fn sweep(&self) -> SweepConfig {
        SweepConfig {
            algorithms: self.algorithms.clone(),
            n_grid: self.n_grid.clone(),
            beta_grid: self.beta_grid.clone(),
            replicates: self.replicates,
            seed: self.seed,
            mode: self.mode,
            fallback: self.fallback,
            sampling: self.sampling,
            lambda_draws: self.lambda_draws,
            prompt: self.prompt.clone(),
        }
    }

    /// The config with every default filled in, as pretty JSON.
    pub fn echo(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks every field; `file` labels error messages.
    pub fn validate(&self, file: &str) -> Result<(), ConfigError> {
        let invalid = |at: String, message: &str| ConfigError::Invalid {
            file: file.to_string(),
            at,
            message: message.to_string(),
        };
        if self.algorithms.is_empty() {
            return Err(invalid("algorithms".into(), "must not be empty"));
        }
        if self.n_grid.is_empty() {
            return Err(invalid("n_grid".into(), "must not be empty"));
        }
        if let Some(i) = self.n_grid.iter().position(|&n| n == 0) {
            return Err(invalid(format!("n_grid[{i}]"), "must be positive"));
        }
        if self.beta_grid.is_empty() {
            return Err(invalid("beta_grid".into(), "must not be empty"));
        }
        if let Some(i) = self.beta_grid.iter().position(|b| !(*b > 0.0 && b.is_finite())) {
            return Err(invalid(format!("beta_grid[{i}]"), "must be positive and finite"));
        }
        if self.replicates == 0 {
            return Err(invalid("replicates".into(), "must be at least 1"));
        }
        if self.lambda_draws == 0 {
            return Err(invalid("lambda_draws".into(), "must be at least 1"));
        }
        if self.trials == 0 {
            return Err(invalid("trials".into(), "must be at least 1"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(invalid("delta".into(), "must lie in (0, 1)"));
        }
        if !self.instance.is_file() {
            return Err(invalid(
                "instance".into(),
                &format!("file {} does not exist", self.instance.display()),
            ));
        }
        Ok(())
    }
}

/// Parses config text. `base` is the directory relative paths resolve
/// against; `file` labels error messages.
pub fn parse_config_str(text: &str, base: &Path, file: &str) -> Result<RunConfig, ConfigError> {
    let mut config: RunConfig = super::from_json(text).map_err(|(at, message)| ConfigError::Syntax {
        file: file.to_string(),
        at,
        message,
    })?;
    if config.instance.is_relative() {
        config.instance = base.join(&config.instance);
    }
    if let Some(out) = &config.out {
        if out.is_relative() {
            config.out = Some(base.join(out));
        }
    }
    config.validate(file)?;
    Ok(config)
}

pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config_str(&text, base, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_instance(body: &str) -> (tempfile::TempDir, String) {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("inst.json"), "{}").unwrap();
        (dir, body.to_string())
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let (dir, text) = with_instance(r#"{"instance": "inst.json", "command": "sweep-n"}"#);
        let c = parse_config_str(&text, dir.path(), "c.json").unwrap();
        assert_eq!(c.replicates, 50);
        assert_eq!(c.seed, 0);
        assert_eq!(c.format, Format::Csv);
        assert_eq!(c.instance, dir.path().join("inst.json"));
        assert!(c.echo().contains("\"replicates\": 50"));
    }

    #[test]
    fn unknown_key_is_named() {
        let (dir, text) =
            with_instance(r#"{"instance": "inst.json", "command": "sweep-n", "betaa": [1]}"#);
        let err = parse_config_str(&text, dir.path(), "c.json").unwrap_err();
        assert!(err.to_string().contains("betaa"), "{err}");
    }

    #[test]
    fn zero_replicates_rejected() {
        let (dir, text) =
            with_instance(r#"{"instance": "inst.json", "command": "bon", "replicates": 0}"#);
        let err = parse_config_str(&text, dir.path(), "c.json").unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { ref at, .. } if at == "replicates"));
    }

    #[test]
    fn type_mismatch_has_path() {
        let (dir, text) =
            with_instance(r#"{"instance": "inst.json", "command": "bon", "n_grid": [1, "x"]}"#);
        let err = parse_config_str(&text, dir.path(), "c.json").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { ref at, .. } if at == "n_grid[1]"), "{err}");
    }

    #[test]
    fn missing_field_reported() {
        let (dir, _) = with_instance("");
        let err = parse_config_str(r#"{"command": "bon"}"#, dir.path(), "c.json").unwrap_err();
        assert!(err.to_string().contains("instance"), "{err}");
    }

    #[test]
    fn missing_instance_file_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let err = parse_config_str(r#"{"instance": "nope.json", "command": "bon"}"#, dir.path(), "c.json")
            .unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { ref at, .. } if at == "instance"));
    }
}
