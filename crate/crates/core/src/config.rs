//! Run configuration files.
//!
//! Files are TOML written with dotted keys in human units:
//!
//! ```toml
//! roads.mu_per_km = 10
//! tier1.density_per_km2 = 0.5
//! tier1.power_dbm = 40
//! tier2.density_per_km = 4
//! tier2.power_dbm = 23
//! shadowing.sigma_1_db = 4
//! sweep.variable = "beta_db"
//! sweep.values = [-10, -5, 0, 5, 10]
//! ```
//!
//! Everything is converted to SI and linear scale on load. Unknown keys are
//! rejected.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::{db_to_linear, dbm_to_watts, NetworkParams};
use crate::error::Error;
use crate::geometry::SimWindow;
use crate::montecarlo::TrialConfig;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Syntax(String),
    #[error("`{key}` ({unit}): {reason}")]
    Invalid {
        key: &'static str,
        unit: &'static str,
        reason: String,
    },
}

fn invalid(key: &'static str, unit: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key,
        unit,
        reason: reason.into(),
    }
}

fn d_zero() -> f64 {
    0.0
}
fn d_fsr() -> f64 {
    20.0
}
fn d_qc() -> f64 {
    0.05
}
fn d_m() -> u32 {
    1
}
fn d_users() -> f64 {
    15.0
}
fn d_alpha() -> f64 {
    4.0
}
fn d_bw() -> f64 {
    10.0
}
fn d_sigma_1() -> f64 {
    4.0
}
fn d_sigma_20() -> f64 {
    2.0
}
fn d_sigma_21() -> f64 {
    4.0
}
fn d_target() -> f64 {
    10.0
}
fn d_seed() -> u64 {
    1
}
fn d_trials() -> u64 {
    20_000
}
fn d_tol_abs() -> f64 {
    0.015
}
fn d_quad() -> f64 {
    1e-8
}
fn d_trunc() -> f64 {
    1e-9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Roads {
    pub mu_per_km: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tier1Section {
    pub density_per_km2: f64,
    pub power_dbm: f64,
    #[serde(default = "d_zero")]
    pub bias_db: f64,
    #[serde(default = "d_zero")]
    pub main_lobe_gain_db: f64,
    #[serde(default = "d_fsr")]
    pub front_to_side_db: f64,
    /// Probability that an interferer's main lobe points at the receiver.
    #[serde(default = "d_qc")]
    pub main_lobe_prob: f64,
    #[serde(default = "d_m")]
    pub nakagami_m: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tier2Section {
    pub density_per_km: f64,
    pub power_dbm: f64,
    #[serde(default = "d_zero")]
    pub bias_db: f64,
    #[serde(default = "d_zero")]
    pub main_lobe_gain_db: f64,
    #[serde(default = "d_fsr")]
    pub front_to_side_db: f64,
    /// Fading order of nodes on the receiver's road.
    #[serde(default = "d_m")]
    pub nakagami_m_same_road: u32,
    #[serde(default = "d_m")]
    pub nakagami_m_other_roads: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Users {
    #[serde(default = "d_users")]
    pub density_per_km: f64,
}

impl Default for Users {
    fn default() -> Self {
        Self {
            density_per_km: d_users(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Channel {
    #[serde(default = "d_alpha")]
    pub alpha: f64,
    #[serde(default = "d_bw")]
    pub bandwidth_mhz: f64,
}

impl Default for Channel {
    fn default() -> Self {
        Self {
            alpha: d_alpha(),
            bandwidth_mhz: d_bw(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Shadowing {
    #[serde(default = "d_zero")]
    pub omega_1_db: f64,
    #[serde(default = "d_zero")]
    pub omega_20_db: f64,
    #[serde(default = "d_zero")]
    pub omega_21_db: f64,
    #[serde(default = "d_sigma_1")]
    pub sigma_1_db: f64,
    #[serde(default = "d_sigma_20")]
    pub sigma_20_db: f64,
    #[serde(default = "d_sigma_21")]
    pub sigma_21_db: f64,
}

impl Default for Shadowing {
    fn default() -> Self {
        Self {
            omega_1_db: 0.0,
            omega_20_db: 0.0,
            omega_21_db: 0.0,
            sigma_1_db: d_sigma_1(),
            sigma_20_db: d_sigma_20(),
            sigma_21_db: d_sigma_21(),
        }
    }
}

/// Quantity varied along a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    BetaDb,
    TargetMbps,
    B1Db,
    B2Db,
    Lambda1PerKm2,
    Lambda2PerKm,
    RadiusKm,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            Self::BetaDb => "beta_db",
            Self::TargetMbps => "target_mbps",
            Self::B1Db => "b1_db",
            Self::B2Db => "b2_db",
            Self::Lambda1PerKm2 => "lambda1_per_km2",
            Self::Lambda2PerKm => "lambda2_per_km",
            Self::RadiusKm => "radius_km",
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Analytic,
    Montecarlo,
    /// Both engines.
    #[default]
    Both,
    /// Both engines plus a tolerance check per point.
    Validate,
}

impl Mode {
    pub fn analytic(self) -> bool {
        self != Mode::Montecarlo
    }
    pub fn montecarlo(self) -> bool {
        self != Mode::Analytic
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Run {
    #[serde(default)]
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default = "d_seed")]
    pub seed: u64,
    #[serde(default = "d_trials")]
    pub trials: u64,
    /// Simulation window radius; the truncation heuristic when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_km: Option<f64>,
    #[serde(default)]
    pub window_check: bool,
    /// SIR threshold when it is not the sweep variable.
    #[serde(default = "d_zero")]
    pub beta_db: f64,
    /// Rate target when it is not the sweep variable.
    #[serde(default = "d_target")]
    pub target_mbps: f64,
}

impl Default for Run {
    fn default() -> Self {
        Self {
            mode: Mode::default(),
            output: None,
            seed: d_seed(),
            trials: d_trials(),
            window_km: None,
            window_check: false,
            beta_db: 0.0,
            target_mbps: d_target(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerance {
    /// Absolute analytic-vs-simulation tolerance in validate mode.
    #[serde(default = "d_tol_abs")]
    pub abs: f64,
    #[serde(default = "d_quad")]
    pub quad: f64,
    /// Tail mass left out of load PMFs.
    #[serde(default = "d_trunc")]
    pub load_tail: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: d_tol_abs(),
            quad: d_quad(),
            load_tail: d_trunc(),
        }
    }
}

/// A configuration file as written, in human units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub roads: Roads,
    pub tier1: Tier1Section,
    pub tier2: Tier2Section,
    #[serde(default)]
    pub users: Users,
    #[serde(default)]
    pub channel: Channel,
    #[serde(default)]
    pub shadowing: Shadowing,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    #[serde(default)]
    pub run: Run,
    #[serde(default)]
    pub tolerance: Tolerance,
}

impl ConfigFile {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))
    }

    /// Canonical text: every key present, defaults filled in.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn network_params(&self) -> Result<NetworkParams, ConfigError> {
        let p = NetworkParams {
            mu_l: self.roads.mu_per_km * 1e-3,
            lambda_1: self.tier1.density_per_km2 * 1e-6,
            lambda_2: self.tier2.density_per_km * 1e-3,
            lambda_r: self.users.density_per_km * 1e-3,
            alpha: self.channel.alpha,
            p1: dbm_to_watts(self.tier1.power_dbm),
            p2: dbm_to_watts(self.tier2.power_dbm),
            g1_main: db_to_linear(self.tier1.main_lobe_gain_db),
            g1_side: db_to_linear(self.tier1.main_lobe_gain_db - self.tier1.front_to_side_db),
            g2_main: db_to_linear(self.tier2.main_lobe_gain_db),
            g2_side: db_to_linear(self.tier2.main_lobe_gain_db - self.tier2.front_to_side_db),
            q_c: self.tier1.main_lobe_prob,
            b1: db_to_linear(self.tier1.bias_db),
            b2: db_to_linear(self.tier2.bias_db),
            m1: self.tier1.nakagami_m,
            m20: self.tier2.nakagami_m_same_road,
            m21: self.tier2.nakagami_m_other_roads,
            omega_1: self.shadowing.omega_1_db,
            omega_20: self.shadowing.omega_20_db,
            omega_21: self.shadowing.omega_21_db,
            sigma_1: self.shadowing.sigma_1_db,
            sigma_20: self.shadowing.sigma_20_db,
            sigma_21: self.shadowing.sigma_21_db,
            bandwidth: self.channel.bandwidth_mhz * 1e6,
        };
        p.validate().map_err(param_to_config)?;
        Ok(p)
    }
}

/// Config key and unit for a model parameter.
fn config_key(name: &str) -> (&'static str, &'static str) {
    match name {
        "alpha" => ("channel.alpha", "path-loss exponent, > 2"),
        "mu_l" => ("roads.mu_per_km", "km^-1"),
        "lambda_1" => ("tier1.density_per_km2", "nodes/km^2"),
        "lambda_2" => ("tier2.density_per_km", "nodes/km"),
        "lambda_r" => ("users.density_per_km", "users/km"),
        "p1" => ("tier1.power_dbm", "dBm"),
        "p2" => ("tier2.power_dbm", "dBm"),
        "g1_main" | "g1_side" => ("tier1.main_lobe_gain_db", "dB"),
        "g2_main" | "g2_side" => ("tier2.main_lobe_gain_db", "dB"),
        "q_c" => ("tier1.main_lobe_prob", "probability"),
        "b1" => ("tier1.bias_db", "dB"),
        "b2" => ("tier2.bias_db", "dB"),
        "m1" => ("tier1.nakagami_m", "integer >= 1"),
        "m20" => ("tier2.nakagami_m_same_road", "integer >= 1"),
        "m21" => ("tier2.nakagami_m_other_roads", "integer >= 1"),
        "omega_1" => ("shadowing.omega_1_db", "dB"),
        "omega_20" => ("shadowing.omega_20_db", "dB"),
        "omega_21" => ("shadowing.omega_21_db", "dB"),
        "sigma_1" => ("shadowing.sigma_1_db", "dB"),
        "sigma_20" => ("shadowing.sigma_20_db", "dB"),
        "sigma_21" => ("shadowing.sigma_21_db", "dB"),
        "bandwidth" => ("channel.bandwidth_mhz", "MHz"),
        _ => ("(model)", "-"),
    }
}

fn param_to_config(e: Error) -> ConfigError {
    match e {
        Error::Parameter { name, reason } => {
            let (key, unit) = config_key(name);
            invalid(key, unit, reason)
        }
        other => ConfigError::Syntax(other.to_string()),
    }
}

/// Validated run configuration in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: ConfigFile,
    pub params: NetworkParams,
    pub sweep: Option<Sweep>,
    pub mode: Mode,
    pub output: Option<PathBuf>,
    pub seed: u64,
    pub trials: u64,
    /// Window radius in meters, if fixed by the file.
    pub window_radius: Option<f64>,
    pub window_check: bool,
    /// Linear SIR threshold.
    pub beta: f64,
    /// Target rate, bit/s.
    pub target_rate: f64,
    pub tol_abs: f64,
    pub quad_tol: f64,
    pub load_tail: f64,
}

fn positive(key: &'static str, unit: &'static str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(key, unit, format!("must be finite and > 0, got {v}")))
    }
}

impl RunConfig {
    pub fn from_file_struct(source: ConfigFile) -> Result<Self, ConfigError> {
        let params = source.network_params()?;
        let run = &source.run;
        if run.trials == 0 {
            return Err(invalid("run.trials", "count", "must be >= 1"));
        }
        if let Some(w) = run.window_km {
            positive("run.window_km", "km", w)?;
        }
        if !run.beta_db.is_finite() {
            return Err(invalid("run.beta_db", "dB", "must be finite"));
        }
        positive("run.target_mbps", "Mbps", run.target_mbps)?;
        positive("tolerance.abs", "probability", source.tolerance.abs)?;
        let q = source.tolerance.quad;
        if !(q > 0.0 && q <= 1e-3) {
            return Err(invalid("tolerance.quad", "relative", format!("must lie in (0, 1e-3], got {q}")));
        }
        positive("tolerance.load_tail", "probability", source.tolerance.load_tail)?;
        if let Some(s) = &source.sweep {
            if s.values.is_empty() {
                return Err(invalid("sweep.values", "list", "must not be empty"));
            }
            if s.values.iter().any(|v| !v.is_finite()) {
                return Err(invalid("sweep.values", "list", "must be finite"));
            }
            let unit = match s.variable {
                SweepVariable::TargetMbps => Some("Mbps"),
                SweepVariable::Lambda1PerKm2 => Some("nodes/km^2"),
                SweepVariable::Lambda2PerKm => Some("nodes/km"),
                SweepVariable::RadiusKm => Some("km"),
                _ => None,
            };
            if let Some(unit) = unit {
                let bad_zero = matches!(s.variable, SweepVariable::TargetMbps | SweepVariable::RadiusKm);
                if s.values.iter().any(|&v| v < 0.0 || (bad_zero && v == 0.0)) {
                    return Err(invalid("sweep.values", unit, "out of range for the sweep variable"));
                }
            }
        }
        Ok(Self {
            params,
            sweep: source.sweep.clone(),
            mode: run.mode,
            output: run.output.clone(),
            seed: run.seed,
            trials: run.trials,
            window_radius: run.window_km.map(|w| w * 1e3),
            window_check: run.window_check,
            beta: db_to_linear(run.beta_db),
            target_rate: run.target_mbps * 1e6,
            tol_abs: source.tolerance.abs,
            quad_tol: q,
            load_tail: source.tolerance.load_tail,
            source,
        })
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Self::from_file_struct(ConfigFile::from_toml(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    /// Parameters, threshold and target at one sweep point.
    pub fn at(&self, x: f64) -> Result<Point, ConfigError> {
        let mut point = Point {
            params: self.params.clone(),
            beta: self.beta,
            target_rate: self.target_rate,
        };
        let Some(s) = &self.sweep else {
            return Ok(point);
        };
        match s.variable {
            SweepVariable::BetaDb => point.beta = db_to_linear(x),
            SweepVariable::TargetMbps => point.target_rate = x * 1e6,
            SweepVariable::B1Db => point.params.b1 = db_to_linear(x),
            SweepVariable::B2Db => point.params.b2 = db_to_linear(x),
            SweepVariable::Lambda1PerKm2 => point.params.lambda_1 = x * 1e-6,
            SweepVariable::Lambda2PerKm => point.params.lambda_2 = x * 1e-3,
            SweepVariable::RadiusKm => {}
        }
        point.params.validate().map_err(param_to_config)?;
        Ok(point)
    }

    /// Simulation settings for the given parameters.
    pub fn trial_config(&self, params: NetworkParams) -> Result<TrialConfig, ConfigError> {
        let mut cfg = TrialConfig::new(params, self.seed, self.trials).map_err(param_to_config)?;
        if let Some(r) = self.window_radius {
            cfg.window = SimWindow::new(r).map_err(param_to_config)?;
            cfg.allow_small_window = true;
        }
        cfg.truncation_check = self.window_check;
        Ok(cfg)
    }
}

/// Everything that varies along a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub params: NetworkParams,
    pub beta: f64,
    pub target_rate: f64,
}
