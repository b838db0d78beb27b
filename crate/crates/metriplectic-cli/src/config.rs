//! JSON run configuration: schema, parsing, and validation down to the
//! library's parameter types.
//!
//! The schema is strict: unknown fields are rejected so that a typo like
//! `"lamda"` fails loudly instead of silently running defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};

use metriplectic::dynamics::{IntegratorOptions, Method};
use metriplectic::models::{observables, Generator, TopParams};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// Free rigid body: z = (L1, L2, L3).
    Frb,
    /// Symmetric heavy top: z = (L1, L2, L3, Gamma1, Gamma2, Gamma3).
    HeavyTop,
}

impl ModelKind {
    pub fn dim(self) -> usize {
        match self {
            ModelKind::Frb => 3,
            ModelKind::HeavyTop => 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKindConfig {
    Linear,
    Log,
    Quadratic,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub kind: GeneratorKindConfig,
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodConfig {
    Rk45,
    Rk4,
}

/// Integrator settings with the library defaults filled in, so a config
/// may specify only what it overrides.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    #[serde(default = "default_method")]
    pub method: MethodConfig,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_abs_tol")]
    pub abs_tol: f64,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_t_final")]
    pub t_final: f64,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    #[serde(default = "default_record_dt")]
    pub record_dt: f64,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
}

fn default_method() -> MethodConfig {
    MethodConfig::Rk45
}
fn default_dt() -> f64 {
    IntegratorOptions::default().dt
}
fn default_abs_tol() -> f64 {
    IntegratorOptions::default().abs_tol
}
fn default_rel_tol() -> f64 {
    IntegratorOptions::default().rel_tol
}
fn default_t_final() -> f64 {
    IntegratorOptions::default().t_final
}
fn default_record_every() -> usize {
    IntegratorOptions::default().record_every
}
fn default_record_dt() -> f64 {
    IntegratorOptions::default().record_dt
}
fn default_max_steps() -> usize {
    IntegratorOptions::default().max_steps
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            method: default_method(),
            dt: default_dt(),
            abs_tol: default_abs_tol(),
            rel_tol: default_rel_tol(),
            t_final: default_t_final(),
            record_every: default_record_every(),
            record_dt: default_record_dt(),
            max_steps: default_max_steps(),
        }
    }
}

impl IntegratorConfig {
    pub fn to_options(self) -> IntegratorOptions {
        IntegratorOptions {
            method: match self.method {
                MethodConfig::Rk45 => Method::Rk45Adaptive,
                MethodConfig::Rk4 => Method::Rk4Fixed,
            },
            dt: self.dt,
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            t_final: self.t_final,
            record_every: self.record_every,
            record_dt: self.record_dt,
            max_steps: self.max_steps,
        }
    }
}

/// Aligned-equilibrium override for `linearize`; without it the
/// equilibrium is derived from z0 via the conserved quantities.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquilibriumConfig {
    pub l3: f64,
    pub g3: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelKind,
    pub generator: GeneratorConfig,
    /// Transverse moment of inertia; the heavy top is symmetric, so
    /// I2 = I1 always (the free rigid body inherits the same restriction
    /// from this schema).
    pub i1: f64,
    /// Axial moment of inertia.
    pub i3: f64,
    /// Gravitational coupling; ignored by the free rigid body.
    pub xi: f64,
    /// Initial state: 6 reals for heavy-top, 3 for frb.
    pub z0: Vec<f64>,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equilibrium: Option<EquilibriumConfig>,
    /// Basename for emitted files; defaults to the config file's stem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_prefix: Option<String>,
}

/// A config that survived validation, with the library types built.
#[derive(Debug)]
pub struct Validated {
    pub params: TopParams,
    pub gen: Generator,
    pub z0: Vec<f64>,
    pub opts: IntegratorOptions,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<Validated, CliError> {
        let params = match self.model {
            ModelKind::Frb => TopParams::new(self.i1, self.i1, self.i3, self.xi),
            ModelKind::HeavyTop => TopParams::symmetric(self.i1, self.i3, self.xi),
        }
        .map_err(|e| CliError::Config(format!("i1/i3/xi: {e}")))?;

        let gen = match self.generator.kind {
            GeneratorKindConfig::Linear => Generator::linear(self.generator.lambda),
            GeneratorKindConfig::Log => Generator::log(self.generator.lambda),
            GeneratorKindConfig::Quadratic => Generator::quadratic(self.generator.lambda),
        }
        .map_err(|e| CliError::Config(format!("generator.lambda: {e}")))?;

        let dim = self.model.dim();
        if self.z0.len() != dim {
            return Err(CliError::Config(format!(
                "z0: expected {dim} entries for this model, got {}",
                self.z0.len()
            )));
        }
        if self.z0.iter().any(|v| !v.is_finite()) {
            return Err(CliError::Config("z0: entries must be finite".into()));
        }
        // Probing the observables exercises every domain restriction the
        // generator imposes on the initial state.
        observables(&params, &gen, &self.z0)
            .map_err(|e| CliError::Config(format!("z0: {e}")))?;

        let opts = self.integrator.to_options();
        opts.validate()
            .map_err(|e| CliError::Config(format!("integrator: {e}")))?;

        Ok(Validated {
            params,
            gen,
            z0: self.z0.clone(),
            opts,
        })
    }

    /// The config serialized back out, for preset round-trips.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(model: &str, z0: &str) -> String {
        format!(
            r#"{{"model": "{model}", "generator": {{"kind": "linear", "lambda": 0.1}},
                "i1": 1.0, "i3": 2.0, "xi": 1.0, "z0": {z0}}}"#
        )
    }

    #[test]
    fn defaults_fill_in_and_roundtrip() {
        let cfg: RunConfig =
            serde_json::from_str(&minimal("heavy-top", "[1, 0, 4.2, 1, 0, 2.8]")).unwrap();
        assert_eq!(cfg.integrator.method, MethodConfig::Rk45);
        assert_eq!(cfg.integrator.record_every, 100);
        let v = cfg.validate().unwrap();
        assert_eq!(v.z0.len(), 6);
        let again: RunConfig = serde_json::from_str(&cfg.to_json()).unwrap();
        assert_eq!(again.z0, cfg.z0);
    }

    #[test]
    fn unknown_fields_rejected() {
        let bad = r#"{"model": "heavy-top", "generator": {"kind": "linear", "lamda": 0.1},
                      "i1": 1.0, "i3": 2.0, "xi": 1.0, "z0": [0,0,5,0,0,3]}"#;
        let err = serde_json::from_str::<RunConfig>(bad).unwrap_err();
        assert!(err.to_string().contains("lamda"));
    }

    #[test]
    fn z0_length_checked_per_model() {
        let cfg: RunConfig = serde_json::from_str(&minimal("frb", "[1, 0, 4.2]")).unwrap();
        assert!(cfg.validate().is_ok());
        let cfg: RunConfig =
            serde_json::from_str(&minimal("frb", "[1, 0, 4.2, 1, 0, 2.8]")).unwrap();
        let err = cfg.validate().unwrap_err();
        assert!(matches!(err, CliError::Config(ref m) if m.contains("z0")));
    }

    #[test]
    fn log_domain_checked_at_validation() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{"model": "heavy-top", "generator": {"kind": "log", "lambda": 1.0},
                "i1": 1.0, "i3": 2.0, "xi": 1.0, "z0": [1, 0, 4.2, -1, 0, -2.8]}"#,
        )
        .unwrap();
        let err = cfg.validate().unwrap_err();
        assert!(matches!(err, CliError::Config(ref m) if m.contains("z0")));
    }
}
