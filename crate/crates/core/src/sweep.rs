//! Parameter sweeps: analytic metrics per grid point, optionally next to
//! Monte Carlo estimates.

use crate::config::{QuantityName, RunConfig, SweepSpec};
use crate::error::{Error, Result};
use crate::mode_selection::{linear_to_db, p_d2d};
use crate::network::NetworkConfig;
use crate::outage::{
    avg_dues, avg_successful_transmissions, outage_bs, outage_drx, solve_xi_for_qos, spectrum_reuse_ratio,
    QosSolution, QOS_SEARCH_RANGE,
};
use crate::simulator::{estimate_metric, EstimatorResult, Quantity};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// One output row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    /// Name of the swept coordinate, or `point` for single evaluations.
    pub parameter: String,
    pub value: f64,
    pub quantity: String,
    pub analytic: Option<f64>,
    pub mc_mean: Option<f64>,
    pub mc_ci: Option<f64>,
    pub seed: Option<u64>,
    /// Threshold used at this point in dB relative to `rho_d`; `inf` when
    /// the QoS target is met with every user admitted.
    #[serde(with = "non_finite")]
    pub xi_db: f64,
    pub error: Option<String>,
}

/// Non-finite floats as the strings `inf`, `-inf` and `NaN`.
mod non_finite {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_str(&x.to_string())
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Round to nine significant digits, the precision of emitted files.
pub fn round_sig(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.8e}").parse().expect("formatted float parses")
    } else {
        x
    }
}

impl MetricRecord {
    fn rounded(mut self) -> Self {
        self.value = round_sig(self.value);
        self.analytic = self.analytic.map(round_sig);
        self.mc_mean = self.mc_mean.map(round_sig);
        self.mc_ci = self.mc_ci.map(round_sig);
        self.xi_db = round_sig(self.xi_db);
        self
    }
}

/// A point of the model after any QoS solve.
#[derive(Debug, Clone)]
pub struct ResolvedPoint {
    pub run: RunConfig,
    pub network: NetworkConfig,
    pub xi_db: f64,
}

/// Convert `run` to the linear model, solving for `xi` first when a QoS
/// target is given.
pub fn resolve_point(run: &RunConfig, qos_target: Option<f64>) -> Result<ResolvedPoint> {
    let mut network = run.network()?;
    let rho_d = network.mode.rho_d;
    let mut xi_db = linear_to_db(network.mode.xi / rho_d);
    if let Some(target) = qos_target {
        match solve_xi_for_qos(target, run.gamma(), &network, &run.fading())? {
            QosSolution::Solved { xi, .. } => {
                network.mode.xi = xi;
                xi_db = linear_to_db(xi / rho_d);
            }
            QosSolution::Saturated { .. } => {
                network.mode.xi = rho_d * QOS_SEARCH_RANGE.1;
                xi_db = f64::INFINITY;
            }
        }
    }
    Ok(ResolvedPoint { run: run.clone(), network, xi_db })
}

/// Analytic value of `q` at a resolved point.
pub fn analytic(q: QuantityName, p: &ResolvedPoint) -> Result<f64> {
    let (g, cfg, f) = (p.run.gamma(), &p.network, p.run.fading());
    let d = p.run.probe_d;
    match q {
        QuantityName::OutageBs => outage_bs(g, cfg, &f),
        QuantityName::OutageDrx => outage_drx(g, d, cfg, &f),
        QuantityName::MBar => avg_successful_transmissions(g, cfg, &f),
        QuantityName::MBarD2d => Ok(avg_dues(cfg)),
        QuantityName::Tau => spectrum_reuse_ratio(g, cfg, &f),
        QuantityName::PD2d => p_d2d(d, &cfg.mode, &cfg.geometry),
    }
}

/// The simulator quantity estimating `q`.
pub fn simulated_quantity(q: QuantityName, run: &RunConfig) -> Quantity {
    let (gamma, d) = (run.gamma(), run.probe_d);
    match q {
        QuantityName::OutageBs => Quantity::OutageBs { gamma },
        QuantityName::OutageDrx => Quantity::OutageDrx { gamma, d },
        QuantityName::MBar => Quantity::MBar { gamma },
        QuantityName::MBarD2d => Quantity::MBarD2d,
        QuantityName::Tau => Quantity::Tau { gamma },
        QuantityName::PD2d => Quantity::PD2d { d },
    }
}

/// Monte Carlo estimate of `q` at a resolved point.
pub fn simulate(q: QuantityName, p: &ResolvedPoint, runs: usize, seed: u64) -> Result<EstimatorResult> {
    let quantity = simulated_quantity(q, &p.run);
    estimate_metric(quantity, &p.network, &p.run.fading(), &p.run.sim_options(), runs, seed)
}

/// What a row should contain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Columns {
    AnalyticOnly,
    MonteCarloOnly,
    Both,
}

fn point_records(
    parameter: &str,
    value: f64,
    run: &RunConfig,
    spec: &SweepSpec,
    columns: Columns,
) -> Vec<MetricRecord> {
    let blank = |q: QuantityName| MetricRecord {
        parameter: parameter.to_string(),
        value,
        quantity: q.name().to_string(),
        analytic: None,
        mc_mean: None,
        mc_ci: None,
        seed: None,
        xi_db: linear_to_db(run.xi_watts() / run.rho_d()),
        error: None,
    };
    let point = match resolve_point(run, spec.qos_target) {
        Ok(p) => p,
        Err(e) => {
            return spec
                .quantities
                .iter()
                .map(|&q| MetricRecord { error: Some(e.to_string()), ..blank(q) }.rounded())
                .collect()
        }
    };
    spec.quantities
        .iter()
        .map(|&q| {
            let mut rec = MetricRecord { xi_db: point.xi_db, ..blank(q) };
            let mut errors = Vec::new();
            if columns != Columns::MonteCarloOnly {
                match analytic(q, &point) {
                    Ok(v) => rec.analytic = Some(v),
                    Err(e) => errors.push(format!("analytic: {e}")),
                }
            }
            if columns != Columns::AnalyticOnly {
                if let Some(mc) = spec.monte_carlo {
                    rec.seed = Some(mc.seed);
                    match simulate(q, &point, mc.n_realizations, mc.seed) {
                        Ok(est) => {
                            rec.mc_mean = Some(est.mean);
                            rec.mc_ci = Some(est.ci_halfwidth);
                        }
                        Err(e) => errors.push(format!("monte carlo: {e}")),
                    }
                }
            }
            if !errors.is_empty() {
                rec.error = Some(errors.join("; "));
            }
            rec.rounded()
        })
        .collect()
}

/// Evaluate every quantity at every grid point. Failures at a point are
/// reported in that row's `error` field.
pub fn run_sweep(spec: &SweepSpec, run: &RunConfig, columns: Columns) -> Result<Vec<MetricRecord>> {
    spec.validate()?;
    run.network()?;
    if columns == Columns::MonteCarloOnly && spec.monte_carlo.is_none() {
        return Err(Error::InvalidConfig("Monte Carlo output requested but mc.runs is 0".into()));
    }
    let rows: Vec<Vec<MetricRecord>> = spec
        .grid
        .par_iter()
        .map(|&v| point_records(spec.parameter.name(), v, &run.with_parameter(spec.parameter, v), spec, columns))
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// Evaluate `quantities` at the configured point.
pub fn run_point(run: &RunConfig, quantities: &[QuantityName], columns: Columns) -> Result<Vec<MetricRecord>> {
    if quantities.is_empty() {
        return Err(Error::InvalidConfig("no quantities requested".into()));
    }
    let spec = SweepSpec { grid: vec![0.0], quantities: quantities.to_vec(), ..run.sweep_spec() };
    if let Some(t) = spec.qos_target {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::InvalidConfig(format!("qos.target must lie in (0, 1), got {t}")));
        }
    }
    run.network()?;
    if columns == Columns::MonteCarloOnly && spec.monte_carlo.is_none() {
        return Err(Error::InvalidConfig("Monte Carlo output requested but mc.runs is 0".into()));
    }
    Ok(point_records("point", 0.0, run, &spec, columns))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SweepParameter;

    #[test]
    fn rows_are_grid_times_quantities() {
        let mut run = RunConfig::default();
        run.sweep_quantities = vec![QuantityName::OutageBs, QuantityName::MBarD2d, QuantityName::PD2d];
        let recs = run_sweep(&run.sweep_spec(), &run, Columns::Both).unwrap();
        assert_eq!(recs.len(), 5 * 3);
        assert!(recs.iter().all(|r| r.mc_mean.is_none() && r.analytic.is_some() && r.error.is_none()));
        assert_eq!(recs[3].value, -10.0);
        assert_eq!(recs[3].quantity, "outage_bs");
    }

    #[test]
    fn bs_outage_column_increases_along_xi() {
        let run = RunConfig::default();
        let recs = run_sweep(&run.sweep_spec(), &run, Columns::AnalyticOnly).unwrap();
        let col: Vec<f64> = recs.iter().map(|r| r.analytic.unwrap()).collect();
        assert!(col.windows(2).all(|w| w[1] >= w[0]), "{col:?}");
    }

    #[test]
    fn point_errors_stay_in_their_row() {
        let mut run = RunConfig::default();
        run.sweep_parameter = SweepParameter::D;
        run.sweep_grid = vec![100.0, 900.0];
        run.sweep_quantities = vec![QuantityName::OutageDrx];
        let recs = run_sweep(&run.sweep_spec(), &run, Columns::Both).unwrap();
        assert!(recs[0].error.is_none());
        assert!(recs[1].error.as_deref().unwrap().contains("analytic"));
    }

    #[test]
    fn qos_rows_carry_the_solved_threshold() {
        let mut run = RunConfig::default();
        run.qos_target = Some(0.01);
        run.sweep_parameter = SweepParameter::Lambda;
        run.sweep_grid = vec![1e-5, 5e-5];
        run.sweep_quantities = vec![QuantityName::OutageBs];
        let recs = run_sweep(&run.sweep_spec(), &run, Columns::AnalyticOnly).unwrap();
        for r in &recs {
            assert!((r.analytic.unwrap() - 0.01).abs() < 1e-4);
        }
        assert!(recs[0].xi_db > recs[1].xi_db);
    }

    #[test]
    fn rounding_keeps_nine_digits() {
        assert_eq!(round_sig(0.123456789123), 0.123456789);
        assert_eq!(round_sig(f64::INFINITY), f64::INFINITY);
    }
}
