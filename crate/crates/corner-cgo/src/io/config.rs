//! Experiment configuration: JSON ingestion with strict validation and
//! defaults matching the module design tables.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    CgoBuild,
    RateSweep,
    Constants,
    Verdict,
    Witness,
    VerifyLemma,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CgoBuild => "cgo-build",
            Command::RateSweep => "rate-sweep",
            Command::Constants => "constants",
            Command::Verdict => "verdict",
            Command::Witness => "witness",
            Command::VerifyLemma => "verify-lemma",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IncidentTermConfig {
    pub m: u32,
    #[serde(default)]
    pub a_re: f64,
    #[serde(default)]
    pub a_im: f64,
    #[serde(default)]
    pub b_re: f64,
    #[serde(default)]
    pub b_im: f64,
}

fn d_alpha() -> f64 {
    0.5
}
fn d_theta0() -> f64 {
    std::f64::consts::FRAC_PI_3
}
fn d_radius() -> f64 {
    1.0
}
fn d_h() -> f64 {
    0.1
}
fn d_h_grid() -> Vec<f64> {
    vec![0.16, 0.08, 0.04, 0.02]
}
fn d_grid_n() -> usize {
    96
}
fn d_k() -> f64 {
    1.0
}
fn d_c1() -> f64 {
    1.0
}
fn d_q() -> f64 {
    1.0
}
fn d_tol() -> f64 {
    1e-10
}
fn d_maxiter() -> usize {
    50
}
fn d_incident() -> Vec<IncidentTermConfig> {
    vec![IncidentTermConfig {
        m: 0,
        a_re: 1.0,
        a_im: 0.0,
        b_re: 0.0,
        b_im: 0.0,
    }]
}
fn d_a0() -> f64 {
    2.0
}
fn d_one() -> f64 {
    1.0
}
fn d_k12() -> u32 {
    1
}

/// Flat experiment configuration; unknown keys are rejected on load and
/// every embedded invariant is re-validated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default = "d_alpha")]
    pub alpha: f64,
    #[serde(default = "d_theta0")]
    pub theta0: f64,
    #[serde(default = "d_radius")]
    pub radius: f64,
    #[serde(default = "d_h")]
    pub h: f64,
    #[serde(default = "d_h_grid")]
    pub h_grid: Vec<f64>,
    #[serde(default = "d_grid_n")]
    pub nr: usize,
    #[serde(default = "d_grid_n")]
    pub ntheta: usize,
    /// Radial moment exponent of the rate sweep.
    #[serde(default)]
    pub beta: f64,
    /// Angular order of the constants table.
    #[serde(default)]
    pub n0: u32,
    #[serde(default = "d_c1")]
    pub c1: f64,
    #[serde(default)]
    pub c2: f64,
    #[serde(default = "d_one")]
    pub beta1: f64,
    #[serde(default = "d_one")]
    pub beta2: f64,
    /// Perturbation amplitudes; zero keeps the medium constant.
    #[serde(default)]
    pub amp1: f64,
    #[serde(default)]
    pub amp2: f64,
    #[serde(default = "d_k")]
    pub k: f64,
    /// Constant explicit potential for cgo-build (used unless
    /// `use_medium` is set).
    #[serde(default = "d_q")]
    pub q_const: f64,
    #[serde(default)]
    pub use_medium: bool,
    #[serde(default = "d_incident")]
    pub incident: Vec<IncidentTermConfig>,
    #[serde(default = "d_tol")]
    pub tol: f64,
    #[serde(default = "d_maxiter")]
    pub maxiter: usize,
    // rectangle-witness parameters
    #[serde(default = "d_k12")]
    pub k1: u32,
    #[serde(default = "d_k12")]
    pub k2: u32,
    #[serde(default = "d_a0")]
    pub a0: f64,
    #[serde(default = "d_one")]
    pub a1: f64,
    #[serde(default = "d_one")]
    pub a2: f64,
    #[serde(default)]
    pub output_path: Option<String>,
    /// 0 = all available cores.
    #[serde(default)]
    pub threads: usize,
}

impl ExperimentConfig {
    pub fn minimal(command: Command) -> Self {
        serde_json::from_str(&format!("{{\"command\": \"{}\"}}", command.name()))
            .expect("minimal config parses")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Config(format!(
                "alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        if !(self.theta0 > 0.0 && self.theta0 < std::f64::consts::PI) {
            return Err(Error::Config(format!(
                "theta0 must lie in (0, pi), got {}",
                self.theta0
            )));
        }
        if (self.theta0 - std::f64::consts::FRAC_PI_2).abs() < 1e-12 {
            return Err(Error::Config("theta0 must differ from pi/2".into()));
        }
        if !(self.radius > 0.0) {
            return Err(Error::Config(format!(
                "radius must be positive, got {}",
                self.radius
            )));
        }
        if !(self.h > 0.0) {
            return Err(Error::Config(format!("h must be positive, got {}", self.h)));
        }
        if self.h_grid.len() < 2
            || self.h_grid.iter().any(|&h| h <= 0.0)
            || self.h_grid.windows(2).any(|w| w[1] >= w[0])
        {
            return Err(Error::Config(
                "h_grid must hold at least two positive, strictly decreasing values".into(),
            ));
        }
        if self.nr < 8 || self.ntheta < 8 {
            return Err(Error::Config(format!(
                "grid resolution must be at least 8x8, got {}x{}",
                self.nr, self.ntheta
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.maxiter == 0 {
            return Err(Error::Config("maxiter must be at least 1".into()));
        }
        if !(self.k > 0.0) {
            return Err(Error::Config(format!(
                "wavenumber must be positive, got {}",
                self.k
            )));
        }
        if !(self.beta1 > 0.0 && self.beta2 > 0.0) {
            return Err(Error::Config(
                "perturbation orders beta1, beta2 must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Loads and validates a JSON config. Parse failures carry serde_json's
/// line/column diagnostics.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    let config: ExperimentConfig = serde_json::from_str(&text)?;
    config.validate()?;
    Ok(config)
}

/// Serializes a config so that `load_config(emit(config)) == config`.
pub fn emit_config(config: &ExperimentConfig) -> String {
    serde_json::to_string_pretty(config).expect("config serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_tmp(contents: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir();
        let path = dir.join(format!(
            "corner-cgo-config-{}-{}.json",
            std::process::id(),
            contents.len()
        ));
        std::fs::write(&path, contents).unwrap();
        path
    }

    #[test]
    fn minimal_config_fills_defaults() {
        let path = write_tmp(r#"{"command": "rate-sweep", "alpha": 0.5, "theta0": 1.0472}"#);
        let cfg = load_config(&path).unwrap();
        assert_eq!(cfg.command, Command::RateSweep);
        assert_eq!(cfg.nr, 96);
        assert_eq!(cfg.ntheta, 96);
        assert_eq!(cfg.h_grid, vec![0.16, 0.08, 0.04, 0.02]);
        assert_eq!(cfg.maxiter, 50);
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn right_angle_theta0_rejected() {
        let path = write_tmp(r#"{"command": "verdict", "theta0": 1.5707963267948966}"#);
        let err = load_config(&path).unwrap_err();
        assert!(err.to_string().contains("differ from pi/2"), "{err}");
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn alpha_out_of_range_rejected() {
        let path = write_tmp(r#"{"command": "cgo-build", "alpha": 2.0}"#);
        let err = load_config(&path).unwrap_err();
        assert!(err.to_string().contains("alpha"), "{err}");
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn unknown_keys_rejected() {
        let path = write_tmp(r#"{"command": "witness", "wavelength": 3.0}"#);
        let err = load_config(&path).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn emit_load_round_trip() {
        let mut cfg = ExperimentConfig::minimal(Command::Constants);
        cfg.alpha = 0.75;
        cfg.theta0 = 2.0 * std::f64::consts::PI / 5.0;
        cfg.h_grid = vec![0.2, 0.1, 0.05, 0.025];
        cfg.incident = vec![IncidentTermConfig {
            m: 2,
            a_re: 0.25,
            a_im: -1.5,
            b_re: 0.0,
            b_im: 0.125,
        }];
        let text = emit_config(&cfg);
        let path = write_tmp(&text);
        let reloaded = load_config(&path).unwrap();
        assert_eq!(cfg, reloaded);
        std::fs::remove_file(path).ok();
    }
}
