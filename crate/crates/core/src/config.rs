//! Run configuration: a flat document of dotted keys in dB/dBm units, with
//! a default for every key.
//!
//! ```toml
//! pathloss.alpha_c = 3.5
//! mode.xi_db = 10.0
//! sweep.parameter = "lambda"
//! sweep.grid = [1e-5, 5e-5, 1e-4]
//! ```

use crate::error::{Error, Result};
use crate::geometry::CellGeometry;
use crate::mode_selection::{db_to_linear, dbm_to_watts, ModeSelectionParams};
use crate::network::{FadingSpec, MgfMethod, NetworkConfig};
use crate::simulator::SimOptions;
use crate::specfun::QuadratureSettings;
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::str::FromStr;

/// How the mode selection threshold is given.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XiSpec {
    /// Decibels relative to `rho_d`.
    RelativeDb(f64),
    Watts(f64),
}

/// The swept coordinate of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    XiDb,
    D,
    Lambda,
    RhoDDbm,
}

impl SweepParameter {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::XiDb => "xi_db",
            SweepParameter::D => "d",
            SweepParameter::Lambda => "lambda",
            SweepParameter::RhoDDbm => "rho_d_dbm",
        }
    }
}

impl FromStr for SweepParameter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "xi_db" => Ok(SweepParameter::XiDb),
            "d" => Ok(SweepParameter::D),
            "lambda" => Ok(SweepParameter::Lambda),
            "rho_d_dbm" => Ok(SweepParameter::RhoDDbm),
            other => Err(Error::InvalidConfig(format!("unknown sweep parameter {other:?}"))),
        }
    }
}

/// Metrics that can be requested from `eval`, `sweep` and `validate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantityName {
    OutageBs,
    OutageDrx,
    MBar,
    MBarD2d,
    Tau,
    PD2d,
}

impl QuantityName {
    pub const ALL: [QuantityName; 6] = [
        QuantityName::OutageBs,
        QuantityName::OutageDrx,
        QuantityName::MBar,
        QuantityName::MBarD2d,
        QuantityName::Tau,
        QuantityName::PD2d,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            QuantityName::OutageBs => "outage_bs",
            QuantityName::OutageDrx => "outage_drx",
            QuantityName::MBar => "m_bar",
            QuantityName::MBarD2d => "m_bar_d2d",
            QuantityName::Tau => "tau",
            QuantityName::PD2d => "p_d2d",
        }
    }
}

impl FromStr for QuantityName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        QuantityName::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown quantity {s:?}")))
    }
}

/// Monte Carlo settings attached to a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McSpec {
    pub n_realizations: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub grid: Vec<f64>,
    pub quantities: Vec<QuantityName>,
    /// Target BS outage; when set, `xi` is re-solved at every grid point.
    pub qos_target: Option<f64>,
    pub monte_carlo: Option<McSpec>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::InvalidConfig("sweep.grid is empty".into()));
        }
        if self.grid.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("sweep.grid holds a non-finite value".into()));
        }
        let up = self.grid.windows(2).all(|w| w[1] > w[0]);
        let down = self.grid.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            return Err(Error::InvalidConfig("sweep.grid must be strictly monotone".into()));
        }
        if self.quantities.is_empty() {
            return Err(Error::InvalidConfig("sweep.quantities is empty".into()));
        }
        if let Some(t) = self.qos_target {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::InvalidConfig(format!("sweep.qos_target must lie in (0, 1), got {t}")));
            }
        }
        if self.parameter == SweepParameter::XiDb && self.qos_target.is_some() {
            return Err(Error::InvalidConfig("a QoS target fixes xi, so xi_db cannot be swept".into()));
        }
        Ok(())
    }
}

/// Every documented key with its value; see [`RunConfig::KEYS`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub cell_radius: f64,
    pub d2d_range: f64,
    pub lambda: f64,
    pub rho_bs_dbm: f64,
    pub rho_d_dbm: f64,
    pub alpha_c: f64,
    pub alpha_d: f64,
    pub xi: XiSpec,
    pub gamma_approx_n: u32,
    pub gamma_db: f64,
    pub m_cellular: u32,
    pub m_d2d: u32,
    pub probe_d: f64,
    pub qos_target: Option<f64>,
    pub mgf_method: MgfMethod,
    pub quadrature: QuadratureSettings,
    pub mc_runs: usize,
    pub mc_seed: u64,
    pub confine_drx: bool,
    pub sweep_parameter: SweepParameter,
    pub sweep_grid: Vec<f64>,
    pub sweep_quantities: Vec<QuantityName>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            cell_radius: 500.0,
            d2d_range: 35.0,
            lambda: 5e-5,
            rho_bs_dbm: -80.0,
            rho_d_dbm: -70.0,
            alpha_c: 4.0,
            alpha_d: 4.0,
            xi: XiSpec::RelativeDb(0.0),
            gamma_approx_n: 6,
            gamma_db: 0.0,
            m_cellular: 1,
            m_d2d: 1,
            probe_d: 250.0,
            qos_target: None,
            mgf_method: MgfMethod::ClosedForm,
            quadrature: QuadratureSettings::default(),
            mc_runs: 0,
            mc_seed: 0,
            confine_drx: true,
            sweep_parameter: SweepParameter::XiDb,
            sweep_grid: vec![-20.0, -10.0, 0.0, 10.0, 20.0],
            sweep_quantities: vec![QuantityName::OutageBs],
        }
    }
}

fn bad(key: &str, want: &str, got: &toml::Value) -> Error {
    Error::InvalidConfig(format!("{key}: expected {want}, got {got}"))
}

fn as_f64(key: &str, v: &toml::Value) -> Result<f64> {
    match v {
        toml::Value::Float(x) => Ok(*x),
        toml::Value::Integer(i) => Ok(*i as f64),
        _ => Err(bad(key, "a number", v)),
    }
}

fn as_u64(key: &str, v: &toml::Value) -> Result<u64> {
    match v {
        toml::Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        _ => Err(bad(key, "a non-negative integer", v)),
    }
}

fn as_str<'a>(key: &str, v: &'a toml::Value) -> Result<&'a str> {
    v.as_str().ok_or_else(|| bad(key, "a string", v))
}

fn as_array<'a>(key: &str, v: &'a toml::Value) -> Result<&'a Vec<toml::Value>> {
    v.as_array().ok_or_else(|| bad(key, "an array", v))
}

impl RunConfig {
    /// The accepted keys.
    pub const KEYS: [&'static str; 25] = [
        "geometry.cell_radius",
        "geometry.d2d_range",
        "network.lambda",
        "power.rho_bs_dbm",
        "power.rho_d_dbm",
        "pathloss.alpha_c",
        "pathloss.alpha_d",
        "mode.xi_db",
        "mode.xi_watts",
        "mode.gamma_approx_n",
        "sir.gamma_db",
        "fading.m_cellular",
        "fading.m_d2d",
        "probe.d",
        "qos.target",
        "mgf.method",
        "quadrature.rel_tol",
        "quadrature.abs_tol",
        "quadrature.max_subdivisions",
        "mc.runs",
        "mc.seed",
        "mc.confine_drx",
        "sweep.parameter",
        "sweep.grid",
        "sweep.quantities",
    ];

    /// Set one key.
    pub fn set(&mut self, key: &str, v: &toml::Value) -> Result<()> {
        match key {
            "geometry.cell_radius" => self.cell_radius = as_f64(key, v)?,
            "geometry.d2d_range" => self.d2d_range = as_f64(key, v)?,
            "network.lambda" => self.lambda = as_f64(key, v)?,
            "power.rho_bs_dbm" => self.rho_bs_dbm = as_f64(key, v)?,
            "power.rho_d_dbm" => self.rho_d_dbm = as_f64(key, v)?,
            "pathloss.alpha_c" => self.alpha_c = as_f64(key, v)?,
            "pathloss.alpha_d" => self.alpha_d = as_f64(key, v)?,
            "mode.xi_db" => self.xi = XiSpec::RelativeDb(as_f64(key, v)?),
            "mode.xi_watts" => self.xi = XiSpec::Watts(as_f64(key, v)?),
            "mode.gamma_approx_n" => {
                self.gamma_approx_n = u32::try_from(as_u64(key, v)?).map_err(|_| bad(key, "a small integer", v))?
            }
            "sir.gamma_db" => self.gamma_db = as_f64(key, v)?,
            "fading.m_cellular" => self.m_cellular = as_u64(key, v)?.min(u32::MAX as u64) as u32,
            "fading.m_d2d" => self.m_d2d = as_u64(key, v)?.min(u32::MAX as u64) as u32,
            "probe.d" => self.probe_d = as_f64(key, v)?,
            "qos.target" => self.qos_target = Some(as_f64(key, v)?),
            "mgf.method" => self.mgf_method = as_str(key, v)?.parse()?,
            "quadrature.rel_tol" => self.quadrature.rel_tol = as_f64(key, v)?,
            "quadrature.abs_tol" => self.quadrature.abs_tol = as_f64(key, v)?,
            "quadrature.max_subdivisions" => self.quadrature.max_subdivisions = as_u64(key, v)? as usize,
            "mc.runs" => self.mc_runs = as_u64(key, v)? as usize,
            "mc.seed" => self.mc_seed = as_u64(key, v)?,
            "mc.confine_drx" => self.confine_drx = v.as_bool().ok_or_else(|| bad(key, "a boolean", v))?,
            "sweep.parameter" => self.sweep_parameter = as_str(key, v)?.parse()?,
            "sweep.grid" => {
                self.sweep_grid = as_array(key, v)?.iter().map(|x| as_f64(key, x)).collect::<Result<_>>()?
            }
            "sweep.quantities" => {
                self.sweep_quantities =
                    as_array(key, v)?.iter().map(|x| as_str(key, x)?.parse()).collect::<Result<_>>()?
            }
            other => return Err(Error::InvalidConfig(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Apply a `key=value` override; the value uses TOML syntax, and bare
    /// words are read as strings.
    pub fn set_str(&mut self, assignment: &str) -> Result<()> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| Error::InvalidConfig(format!("expected key=value, got {assignment:?}")))?;
        let (key, raw) = (key.trim(), raw.trim());
        let value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
            Ok(mut t) => t.remove("v").expect("key present"),
            Err(_) => toml::Value::String(raw.to_string()),
        };
        self.set(key, &value)
    }

    /// Apply every key of a TOML document; nested tables and dotted keys
    /// are equivalent.
    pub fn merge_toml(&mut self, text: &str) -> Result<()> {
        let table: toml::Table = toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let mut flat = Vec::new();
        flatten("", &table, &mut flat);
        for (k, v) in flat {
            self.set(&k, &v)?;
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let mut c = RunConfig::default();
        c.merge_toml(text)?;
        Ok(c)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        RunConfig::from_toml(&text).map_err(|e| match e {
            Error::InvalidConfig(m) => Error::InvalidConfig(format!("{}: {m}", path.display())),
            e => e,
        })
    }

    pub fn rho_d(&self) -> f64 {
        dbm_to_watts(self.rho_d_dbm)
    }

    pub fn xi_watts(&self) -> f64 {
        match self.xi {
            XiSpec::RelativeDb(db) => self.rho_d() * db_to_linear(db),
            XiSpec::Watts(w) => w,
        }
    }

    pub fn gamma(&self) -> f64 {
        db_to_linear(self.gamma_db)
    }

    pub fn fading(&self) -> FadingSpec {
        FadingSpec { m_cellular: self.m_cellular, m_d2d: self.m_d2d }
    }

    pub fn sim_options(&self) -> SimOptions {
        SimOptions { confine_drx: self.confine_drx }
    }

    /// The Monte Carlo block, present when `mc.runs > 0`.
    pub fn monte_carlo(&self) -> Option<McSpec> {
        (self.mc_runs > 0).then_some(McSpec { n_realizations: self.mc_runs, seed: self.mc_seed })
    }

    /// The linear-unit model, validated.
    pub fn network(&self) -> Result<NetworkConfig> {
        let cfg = NetworkConfig {
            geometry: CellGeometry { cell_radius: self.cell_radius, d2d_range: self.d2d_range },
            mode: ModeSelectionParams {
                xi: self.xi_watts(),
                rho_d: self.rho_d(),
                rho_bs: dbm_to_watts(self.rho_bs_dbm),
                alpha_c: self.alpha_c,
                alpha_d: self.alpha_d,
                gamma_approx_n: self.gamma_approx_n,
            },
            lambda: self.lambda,
            quadrature: self.quadrature,
            mgf_method: self.mgf_method,
        };
        cfg.validate()?;
        self.fading().validate()?;
        if !(self.gamma_db.is_finite()) {
            return Err(Error::InvalidConfig(format!("sir.gamma_db must be finite, got {}", self.gamma_db)));
        }
        Ok(cfg)
    }

    pub fn sweep_spec(&self) -> SweepSpec {
        SweepSpec {
            parameter: self.sweep_parameter,
            grid: self.sweep_grid.clone(),
            quantities: self.sweep_quantities.clone(),
            qos_target: self.qos_target,
            monte_carlo: self.monte_carlo(),
        }
    }

    /// A copy with the swept coordinate set to `value`.
    pub fn with_parameter(&self, p: SweepParameter, value: f64) -> RunConfig {
        let mut c = self.clone();
        match p {
            SweepParameter::XiDb => c.xi = XiSpec::RelativeDb(value),
            SweepParameter::D => c.probe_d = value,
            SweepParameter::Lambda => c.lambda = value,
            SweepParameter::RhoDDbm => c.rho_d_dbm = value,
        }
        c
    }
}

/// Built-in example configurations.
pub const PRESETS: [(&str, &str); 5] = [
    ("fig2a", include_str!("../presets/fig2a.toml")),
    ("fig2b", include_str!("../presets/fig2b.toml")),
    ("fig3", include_str!("../presets/fig3.toml")),
    ("fig4", include_str!("../presets/fig4.toml")),
    ("fig5", include_str!("../presets/fig5.toml")),
];

pub fn preset(name: &str) -> Result<RunConfig> {
    let (_, text) = PRESETS.iter().find(|(n, _)| *n == name).ok_or_else(|| {
        let names: Vec<_> = PRESETS.iter().map(|(n, _)| *n).collect();
        Error::InvalidConfig(format!("unknown preset {name:?}; available: {}", names.join(", ")))
    })?;
    RunConfig::from_toml(text)
}

fn flatten(prefix: &str, t: &toml::Table, out: &mut Vec<(String, toml::Value)>) {
    for (k, v) in t {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            toml::Value::Table(inner) => flatten(&key, inner, out),
            other => out.push((key, other.clone())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_the_reference_parameters() {
        let c = RunConfig::default();
        let n = c.network().unwrap();
        assert!((n.mode.rho_bs - 1e-11).abs() < 1e-25);
        assert!((n.mode.rho_d - 1e-10).abs() < 1e-24);
        assert_eq!(n.mode.xi, n.mode.rho_d);
        assert_eq!(c.gamma(), 1.0);
        assert_eq!(n.lambda, 5e-5);
    }

    #[test]
    fn nested_and_dotted_keys_agree() {
        let a = RunConfig::from_toml("pathloss.alpha_c = 3.5\n[mode]\nxi_db = 10\n").unwrap();
        let b = RunConfig::from_toml("[pathloss]\nalpha_c = 3.5\n[mode]\nxi_db = 10.0\n").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.xi, XiSpec::RelativeDb(10.0));
    }

    #[test]
    fn unknown_and_mistyped_keys_fail() {
        assert!(matches!(RunConfig::from_toml("pathloss.alpha_x = 3"), Err(Error::InvalidConfig(_))));
        assert!(RunConfig::from_toml("pathloss.alpha_c = \"four\"").is_err());
        assert!(RunConfig::from_toml("sweep.quantities = [\"outage\"]").is_err());
    }

    #[test]
    fn overrides_parse_toml_values() {
        let mut c = RunConfig::default();
        c.set_str("sweep.grid = [1, 2.5]").unwrap();
        c.set_str("mgf.method=quadrature").unwrap();
        c.set_str("mode.xi_watts=2e-10").unwrap();
        assert_eq!(c.sweep_grid, vec![1.0, 2.5]);
        assert_eq!(c.mgf_method, MgfMethod::Quadrature);
        assert_eq!(c.xi_watts(), 2e-10);
        assert!(c.set_str("no-equals").is_err());
    }

    #[test]
    fn every_key_is_accepted() {
        let samples = [
            "1.0", "1.0", "1.0", "1.0", "1.0", "3.0", "4.0", "1.0", "1e-10", "6", "1.0", "2", "2", "10.0", "0.01",
            "\"direct\"", "1e-8", "1e-13", "100", "200", "3", "false", "\"d\"", "[1.0]", "[\"tau\"]",
        ];
        for (k, v) in RunConfig::KEYS.iter().zip(samples) {
            let mut c = RunConfig::default();
            c.set_str(&format!("{k}={v}")).unwrap_or_else(|e| panic!("{k}: {e}"));
        }
    }

    #[test]
    fn presets_parse_and_validate() {
        for (name, _) in PRESETS {
            let c = preset(name).unwrap();
            c.network().unwrap();
            c.sweep_spec().validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(preset("fig9").is_err());
    }

    #[test]
    fn sweep_spec_checks() {
        let mut s = RunConfig::default().sweep_spec();
        s.validate().unwrap();
        s.grid = vec![1.0, 1.0];
        assert!(s.validate().is_err());
        s.grid = vec![];
        assert!(s.validate().is_err());
        let mut s = RunConfig::default().sweep_spec();
        s.qos_target = Some(0.01);
        assert!(s.validate().is_err());
    }
}
