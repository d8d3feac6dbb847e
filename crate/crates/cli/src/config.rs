//! Run configuration: JSON file, then environment, then command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use solwave::{BranchConfig, ContinuationSettings, ModeBasis, NewtonSettings, Parameters};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisConfig {
    pub half_period: f64,
    pub mode_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub gamma: f64,
    pub eps0: f64,
    pub basis: BasisConfig,
    pub newton: NewtonSettings,
    pub continuation: ContinuationSettings,
    pub output_dir: PathBuf,
    /// Only used by randomized checks.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            gamma: -1.0,
            eps0: 0.01,
            basis: BasisConfig {
                half_period: 64.0,
                mode_count: 128,
            },
            newton: NewtonSettings::default(),
            continuation: ContinuationSettings::default(),
            output_dir: PathBuf::from("solwave-out"),
            seed: 0,
        }
    }
}

/// Either the file could not be read, or its contents are unacceptable.
#[derive(Debug)]
pub enum ConfigError {
    Unreadable(String),
    Invalid(String),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Unreadable(m) | ConfigError::Invalid(m) => f.write_str(m),
        }
    }
}

/// Values that override the file, each settable by flag or `SOLWAVE_*` variable.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Vorticity γ
    #[arg(long, global = true, env = "SOLWAVE_GAMMA", allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Seed distance 1 - γ - α from the bifurcation point
    #[arg(long, global = true, env = "SOLWAVE_EPS0")]
    pub eps0: Option<f64>,
    /// Half period L of the computational cell
    #[arg(long, global = true, env = "SOLWAVE_HALF_PERIOD")]
    pub half_period: Option<f64>,
    /// Initial number of cosine modes N
    #[arg(long, global = true, env = "SOLWAVE_MODE_COUNT")]
    pub mode_count: Option<usize>,
    /// Largest N reached by refinement
    #[arg(long, global = true, env = "SOLWAVE_MAX_MODE_COUNT")]
    pub max_mode_count: Option<usize>,
    /// Continuation step limit
    #[arg(long, global = true, env = "SOLWAVE_MAX_STEPS")]
    pub max_steps: Option<usize>,
    /// Output directory
    #[arg(long = "out", global = true, env = "SOLWAVE_OUT")]
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| ConfigError::Invalid(format!("config is not valid JSON: {e}")))?;
        match value.get("schema_version").and_then(|v| v.as_u64()) {
            Some(v) if v == u64::from(SCHEMA_VERSION) => {}
            Some(v) => return Err(ConfigError::Invalid(format!("unsupported schema_version {v}"))),
            None => return Err(ConfigError::Invalid("config lacks an integer schema_version".into())),
        }
        serde_json::from_value(value).map_err(|e| ConfigError::Invalid(format!("bad config: {e}")))
    }

    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self, ConfigError> {
        let mut config = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| ConfigError::Unreadable(format!("cannot read {}: {e}", p.display())))?;
                Self::from_json(&text)?
            }
            None => Self::default(),
        };
        config.apply(overrides);
        config.validate()?;
        Ok(config)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.gamma {
            self.gamma = v;
        }
        if let Some(v) = o.eps0 {
            self.eps0 = v;
        }
        if let Some(v) = o.half_period {
            self.basis.half_period = v;
        }
        if let Some(v) = o.mode_count {
            self.basis.mode_count = v;
        }
        if let Some(v) = o.max_mode_count {
            self.continuation.max_mode_count = v;
        }
        if let Some(v) = o.max_steps {
            self.continuation.max_steps = v;
        }
        if let Some(v) = &o.output_dir {
            self.output_dir = v.clone();
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        let positive = [
            ("eps0", self.eps0),
            ("basis.half_period", self.basis.half_period),
            ("newton.tol", self.newton.tol),
            ("continuation.h0", self.continuation.h0),
            ("continuation.h_min", self.continuation.h_min),
            ("continuation.h_max", self.continuation.h_max),
            ("continuation.alpha_weight", self.continuation.alpha_weight),
            ("continuation.tail_tol", self.continuation.tail_tol),
            (
                "continuation.thresholds.monitor_min",
                self.continuation.thresholds.monitor_min,
            ),
            (
                "continuation.thresholds.alpha_min",
                self.continuation.thresholds.alpha_min,
            ),
            (
                "continuation.thresholds.froude_max",
                self.continuation.thresholds.froude_max,
            ),
            (
                "continuation.thresholds.gradient_max",
                self.continuation.thresholds.gradient_max,
            ),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if !self.gamma.is_finite() {
            return bad(format!("gamma must be finite, got {}", self.gamma));
        }
        if Parameters::critical_alpha(self.gamma) - self.eps0 <= 0.0 {
            return bad(format!(
                "eps0 = {} leaves no positive alpha below 1 - gamma = {}",
                self.eps0,
                Parameters::critical_alpha(self.gamma)
            ));
        }
        if self.basis.mode_count == 0 {
            return bad("basis.mode_count must be at least 1".into());
        }
        if self.continuation.max_mode_count < self.basis.mode_count {
            return bad("continuation.max_mode_count is below basis.mode_count".into());
        }
        let c = &self.continuation;
        if !(c.h_min <= c.h0 && c.h0 <= c.h_max) {
            return bad(format!(
                "need h_min <= h0 <= h_max, got {} {} {}",
                c.h_min, c.h0, c.h_max
            ));
        }
        if !(c.growth.is_finite() && c.growth >= 1.0) {
            return bad(format!("continuation.growth must be at least 1, got {}", c.growth));
        }
        if !(self.newton.damping > 0.0 && self.newton.damping < 1.0) {
            return bad(format!(
                "newton.damping must lie in (0, 1), got {}",
                self.newton.damping
            ));
        }
        Ok(())
    }

    pub fn branch_config(&self) -> Result<BranchConfig, ConfigError> {
        let basis = ModeBasis::new(self.basis.half_period, self.basis.mode_count)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(BranchConfig {
            gamma: self.gamma,
            eps0: self.eps0,
            basis,
            newton: self.newton,
            continuation: self.continuation,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        let c = RunConfig::default();
        c.validate().unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), c);
    }

    #[test]
    fn partial_files_fill_defaults() {
        let c =
            RunConfig::from_json(r#"{"schema_version": 1, "gamma": 0.0, "continuation": {"max_steps": 3}}"#).unwrap();
        assert_eq!(c.gamma, 0.0);
        assert_eq!(c.continuation.max_steps, 3);
        assert_eq!(c.continuation.h0, ContinuationSettings::default().h0);
    }

    #[test]
    fn rejects_bad_files() {
        for text in [
            "{",
            r#"{"gamma": 0.0}"#,
            r#"{"schema_version": 2}"#,
            r#"{"schema_version": 1, "gama": 0.0}"#,
            r#"{"schema_version": 1, "newton": {"tol": 1e-10, "extra": 1}}"#,
        ] {
            assert!(
                matches!(RunConfig::from_json(text), Err(ConfigError::Invalid(_))),
                "{text}"
            );
        }
        let c = RunConfig {
            eps0: 2.5,
            ..RunConfig::default()
        };
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.continuation.h_min = 1.0;
        assert!(c.validate().is_err());
    }
}
