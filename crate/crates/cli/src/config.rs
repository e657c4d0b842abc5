//! Run options from flags and a flat `key = value` config file.

use clap::{Args, ValueEnum};
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// A usage error naming the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError {
    pub field: String,
    pub message: String,
}

impl UsageError {
    pub fn new(field: &str, message: impl Into<String>) -> Self {
        Self { field: field.to_string(), message: message.into() }
    }
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid {}: {}", self.field, self.message)
    }
}

impl std::error::Error for UsageError {}

/// Options shared by every subcommand; unset fields fall back to the config file, then to the
/// command defaults.
#[derive(Debug, Clone, Default, PartialEq, Args)]
pub struct RunConfig {
    /// Energy constraints, comma separated.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub e_grid: Option<Vec<f64>>,
    /// Beamsplitter angles of the contraction sweep.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub zeta: Option<Vec<f64>>,
    /// Amplifier squeezing parameters of the noise sweep.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub r: Option<Vec<f64>>,
    /// Classical noise levels tested by the threshold command.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub noise: Option<Vec<f64>>,
    /// Fock truncation of the superposition state.
    #[arg(long, global = true)]
    pub n_trunc: Option<usize>,
    /// Coherent amplitude fed to the amplifier in the noise sweep.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Energy of the superposition environment in the contraction sweep.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub env_e: Option<f64>,
    /// Points per axis of the classicality scan.
    #[arg(long, global = true)]
    pub grid_points: Option<usize>,
    /// Starting radial nodes of the plane quadrature.
    #[arg(long, global = true)]
    pub radial_nodes: Option<usize>,
    /// Starting angular nodes of the plane quadrature.
    #[arg(long, global = true)]
    pub angular_nodes: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Flat `key = value` file with keys named like the flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

fn number(field: &str, s: &str) -> Result<f64, UsageError> {
    s.trim().parse().map_err(|_| UsageError::new(field, format!("'{}' is not a number", s.trim())))
}

fn count(field: &str, s: &str) -> Result<usize, UsageError> {
    s.trim().parse().map_err(|_| UsageError::new(field, format!("'{}' is not a nonnegative integer", s.trim())))
}

fn list(field: &str, s: &str) -> Result<Vec<f64>, UsageError> {
    s.split(',').map(|v| number(field, v)).collect()
}

impl RunConfig {
    /// Parses a config file; blank lines and `#` comments are skipped.
    pub fn parse_file(text: &str) -> Result<Self, UsageError> {
        let mut c = RunConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(UsageError::new("config", format!("line {} is not key = value", i + 1)));
            };
            let (key, value) = (key.trim().replace('_', "-"), value.trim());
            match key.as_str() {
                "e-grid" => c.e_grid = Some(list(&key, value)?),
                "zeta" => c.zeta = Some(list(&key, value)?),
                "r" => c.r = Some(list(&key, value)?),
                "noise" => c.noise = Some(list(&key, value)?),
                "n-trunc" => c.n_trunc = Some(count(&key, value)?),
                "beta" => c.beta = Some(number(&key, value)?),
                "env-e" => c.env_e = Some(number(&key, value)?),
                "grid-points" => c.grid_points = Some(count(&key, value)?),
                "radial-nodes" => c.radial_nodes = Some(count(&key, value)?),
                "angular-nodes" => c.angular_nodes = Some(count(&key, value)?),
                "format" => {
                    c.format = Some(Format::from_str(value, true).map_err(|_| UsageError::new("format", format!("'{value}' is not csv or json")))?)
                }
                "out" => c.out = Some(PathBuf::from(value)),
                _ => return Err(UsageError::new(&key, "unknown config key")),
            }
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path).map_err(|e| UsageError::new("config", format!("{}: {e}", path.display())))?;
        Self::parse_file(&text)
    }

    /// Fields set here win over those of `lower`.
    pub fn over(self, lower: RunConfig) -> RunConfig {
        RunConfig {
            e_grid: self.e_grid.or(lower.e_grid),
            zeta: self.zeta.or(lower.zeta),
            r: self.r.or(lower.r),
            noise: self.noise.or(lower.noise),
            n_trunc: self.n_trunc.or(lower.n_trunc),
            beta: self.beta.or(lower.beta),
            env_e: self.env_e.or(lower.env_e),
            grid_points: self.grid_points.or(lower.grid_points),
            radial_nodes: self.radial_nodes.or(lower.radial_nodes),
            angular_nodes: self.angular_nodes.or(lower.angular_nodes),
            format: self.format.or(lower.format),
            out: self.out.or(lower.out),
            config: self.config.or(lower.config),
        }
    }

    /// Flags over the file named by `--config`, if any.
    pub fn resolve(self) -> Result<RunConfig, UsageError> {
        match self.config.clone() {
            Some(p) => Ok(self.over(RunConfig::load(&p)?)),
            None => Ok(self),
        }
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }
}

/// Checks every entry of a list against `ok`, naming the field on failure.
pub fn check_all(field: &str, values: &[f64], what: &str, ok: impl Fn(f64) -> bool) -> Result<(), UsageError> {
    if values.is_empty() {
        return Err(UsageError::new(field, "empty list"));
    }
    match values.iter().find(|v| !ok(**v)) {
        Some(v) => Err(UsageError::new(field, format!("{v} must be {what}"))),
        None => Ok(()),
    }
}

pub fn check_count(field: &str, value: Option<usize>, min: usize) -> Result<(), UsageError> {
    match value {
        Some(v) if v < min => Err(UsageError::new(field, format!("{v} must be at least {min}"))),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_values_parse_and_flags_win() {
        let file = RunConfig::parse_file("# sweep\ne-grid = 0.5, 1\nzeta=0.1\nformat = json\nn_trunc = 40\n").unwrap();
        assert_eq!(file.e_grid, Some(vec![0.5, 1.0]));
        assert_eq!(file.format, Some(Format::Json));
        assert_eq!(file.n_trunc, Some(40));
        let flags = RunConfig { zeta: Some(vec![0.2]), ..Default::default() };
        let merged = flags.over(file);
        assert_eq!(merged.zeta, Some(vec![0.2]));
        assert_eq!(merged.e_grid, Some(vec![0.5, 1.0]));
    }

    #[test]
    fn bad_entries_name_the_field() {
        assert_eq!(RunConfig::parse_file("zeta = x").unwrap_err().field, "zeta");
        assert_eq!(RunConfig::parse_file("colour = 1").unwrap_err().field, "colour");
        assert_eq!(RunConfig::parse_file("format = xml").unwrap_err().field, "format");
        assert_eq!(check_all("e-grid", &[1.0, -1.0], ">= 0", |e| e >= 0.0).unwrap_err().field, "e-grid");
    }
}
