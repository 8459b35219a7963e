//! TOML run configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::SolverConfig;
use crate::initial::InitialSpec;
use crate::stability::DEFAULT_M;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Simulate,
    Diagnose,
    Compare,
    MollifyStudy,
    Dispersion,
    Fields,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default = "default_energy")]
    pub energy_csv: String,
    /// Final checkpoint file name; empty disables it.
    #[serde(default = "default_final")]
    pub checkpoint: String,
    /// Also checkpoint every this many snapshots (0 disables).
    #[serde(default)]
    pub checkpoint_every: usize,
}

fn default_energy() -> String {
    "energy.csv".into()
}

fn default_final() -> String {
    "final.crwv".into()
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs { energy_csv: default_energy(), checkpoint: default_final(), checkpoint_every: 0 }
    }
}

/// Second solution for `compare`: two checkpoints, or the main initial data with Z̄ₜ rotated by
/// `e^{iη}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    pub a: Option<PathBuf>,
    pub b: Option<PathBuf>,
    #[serde(default)]
    pub eta: f64,
    #[serde(default = "default_m")]
    pub m: f64,
}

fn default_m() -> f64 {
    DEFAULT_M
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MollifyConfig {
    pub eps: Vec<f64>,
    #[serde(default = "default_m")]
    pub m: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersionConfig {
    pub modes: Vec<i64>,
    pub amplitude: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldsConfig {
    /// Explicit depths `y′ ≤ 0`; when empty the geometric grid `0, −2^{−1}, …, −2^{−levels}` is used.
    #[serde(default)]
    pub depths: Vec<f64>,
    #[serde(default = "default_levels")]
    pub levels: u32,
    /// Evaluate this checkpoint instead of the generated initial data.
    pub checkpoint: Option<PathBuf>,
}

fn default_levels() -> u32 {
    6
}

impl FieldsConfig {
    pub fn depth_grid(&self) -> Vec<f64> {
        if !self.depths.is_empty() {
            return self.depths.clone();
        }
        std::iter::once(0.0).chain((1..=self.levels).rev().map(|m| -(0.5f64).powi(m as i32))).collect()
    }
}

/// Optional checkpoint to diagnose in place of the generated initial data.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnoseConfig {
    pub checkpoint: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    /// When present, must match the subcommand.
    pub mode: Option<Mode>,
    pub solver: SolverConfig,
    pub initial_data: InitialSpec,
    #[serde(default)]
    pub outputs: Outputs,
    pub compare: Option<CompareConfig>,
    pub mollify: Option<MollifyConfig>,
    pub dispersion: Option<DispersionConfig>,
    pub fields: Option<FieldsConfig>,
    pub diagnose: Option<DiagnoseConfig>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let c: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if c.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!("schema_version {} not supported (expected {SCHEMA_VERSION})", c.schema_version)));
        }
        c.solver.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    /// Replaces the seed of random initial data.
    pub fn with_seed(mut self, seed: u64) -> Self {
        if let InitialSpec::RandomAnalytic { seed: s, .. } = &mut self.initial_data {
            *s = seed;
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
schema_version = 1
mode = "simulate"

[solver]
n = 64
dt = 0.01
t_end = 0.1

[initial_data]
kind = "random_analytic"
seed = 1
modes = 4
decay = 0.5
"#;

    #[test]
    fn parses_and_overrides_seed() {
        let c = RunConfig::from_toml(BASIC).unwrap();
        assert_eq!(c.mode, Some(Mode::Simulate));
        assert_eq!(c.outputs, Outputs::default());
        let c = c.with_seed(9);
        assert!(matches!(c.initial_data, InitialSpec::RandomAnalytic { seed: 9, .. }));
    }

    #[test]
    fn rejects_unknown_keys_and_versions() {
        assert!(RunConfig::from_toml(&BASIC.replace("t_end", "bogus = 1\nt_end")).is_err());
        assert!(RunConfig::from_toml(&BASIC.replace("decay = 0.5", "decay = 0.5\nextra = 2")).is_err());
        assert!(RunConfig::from_toml(&BASIC.replace("schema_version = 1", "schema_version = 2")).is_err());
    }

    #[test]
    fn geometric_depths() {
        let f = FieldsConfig { depths: vec![], levels: 3, checkpoint: None };
        assert_eq!(f.depth_grid(), vec![0.0, -0.125, -0.25, -0.5]);
    }
}
