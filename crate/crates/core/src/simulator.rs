//! Monte Carlo model of one cell: a PPP of potential D2D users with
//! displaced receivers, one uplink cellular user, channel-inversion power
//! control, mode selection and Rayleigh interfering links.
//!
//! Realization `i` of a run with master seed `seed` draws from its own
//! ChaCha8 stream `(seed, i)`, so results do not depend on thread count.

use crate::error::{Error, Result};
use crate::mode_selection::is_underlay;
use crate::network::{FadingSpec, NetworkConfig};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

/// Smallest run accepted by [`estimate_metric`].
pub const MIN_REALIZATIONS: usize = 100;

/// Probe transmitter draws attempted before a realization is skipped.
const MAX_PROBE_DRAWS: usize = 100_000;

pub type Point = [f64; 2];

fn norm(p: Point) -> f64 {
    p[0].hypot(p[1])
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Sampling switches that are not part of the analytic model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimOptions {
    /// Redraw receivers that land outside the cell.
    pub confine_drx: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions { confine_drx: true }
    }
}

/// One potential D2D pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PDue {
    pub tx: Point,
    pub rx: Point,
    pub r_d: f64,
    pub r_c: f64,
    pub underlay: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub seed: u64,
    pub index: u64,
    pub cue: Point,
    pub pdues: Vec<PDue>,
}

impl Realization {
    pub fn admitted(&self) -> impl Iterator<Item = &PDue> {
        self.pdues.iter().filter(|p| p.underlay)
    }
}

/// The random stream of realization `index`.
pub fn realization_stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn uniform_disk<R: Rng + ?Sized>(rng: &mut R, center: Point, radius: f64) -> Point {
    let r = radius * rng.random::<f64>().sqrt();
    let t = 2.0 * PI * rng.random::<f64>();
    [center[0] + r * t.cos(), center[1] + r * t.sin()]
}

fn exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}

/// Unit-mean Gamma power gain of shape `m`.
fn nakagami<R: Rng + ?Sized>(rng: &mut R, m: u32) -> f64 {
    if m == 1 {
        return exp1(rng);
    }
    Gamma::new(m as f64, 1.0 / m as f64).expect("shape is positive").sample(rng)
}

fn make_pdue(tx: Point, rx: Point, cfg: &NetworkConfig) -> PDue {
    let r_d = dist(tx, rx);
    let r_c = norm(tx);
    let underlay = is_underlay(r_d, r_c, &cfg.mode);
    debug_assert!(!underlay || cfg.mode.rho_d * r_d.powf(cfg.mode.alpha_d) * r_c.powf(-cfg.mode.alpha_c) <= cfg.mode.xi * (1.0 + 1e-12));
    PDue { tx, rx, r_d, r_c, underlay }
}

fn sample_pdue<R: Rng + ?Sized>(rng: &mut R, cfg: &NetworkConfig, opts: &SimOptions) -> PDue {
    let g = &cfg.geometry;
    let tx = uniform_disk(rng, [0.0, 0.0], g.cell_radius);
    let rx = loop {
        let rx = uniform_disk(rng, tx, g.d2d_range);
        if !opts.confine_drx || norm(rx) <= g.cell_radius {
            break rx;
        }
    };
    make_pdue(tx, rx, cfg)
}

/// Draw the users of one realization from `rng`.
pub fn sample_realization<R: Rng + ?Sized>(
    cfg: &NetworkConfig,
    opts: &SimOptions,
    rng: &mut R,
    seed: u64,
    index: u64,
) -> Realization {
    let mean = cfg.mean_pdue_count();
    let n = if mean > 0.0 { Poisson::new(mean).expect("positive mean").sample(rng) as usize } else { 0 };
    let pdues = (0..n).map(|_| sample_pdue(rng, cfg, opts)).collect();
    let cue = uniform_disk(rng, [0.0, 0.0], cfg.geometry.cell_radius);
    Realization { seed, index, cue, pdues }
}

/// Uplink SIR at the BS; `+inf` when no user is admitted.
pub fn sir_at_bs<R: Rng + ?Sized>(r: &Realization, cfg: &NetworkConfig, fading: &FadingSpec, rng: &mut R) -> f64 {
    let p = &cfg.mode;
    let signal = nakagami(rng, fading.m_cellular) * p.rho_bs;
    let interference: f64 = r
        .admitted()
        .map(|u| exp1(rng) * p.rho_d * u.r_d.powf(p.alpha_d) * u.r_c.powf(-p.alpha_c))
        .fold(0.0, |a, b| a + b);
    signal / interference
}

/// Interference at `at` from the cellular user and every admitted pair
/// except `skip`.
fn interference_at<R: Rng + ?Sized>(r: &Realization, at: Point, skip: Option<usize>, cfg: &NetworkConfig, rng: &mut R) -> f64 {
    let p = &cfg.mode;
    let cue = exp1(rng) * p.rho_bs * norm(r.cue).powf(p.alpha_c) * dist(r.cue, at).powf(-p.alpha_d);
    let d2d: f64 = r
        .pdues
        .iter()
        .enumerate()
        .filter(|&(i, u)| u.underlay && Some(i) != skip)
        .map(|(_, u)| exp1(rng) * p.rho_d * u.r_d.powf(p.alpha_d) * dist(u.tx, at).powf(-p.alpha_d))
        .fold(0.0, |a, b| a + b);
    cue + d2d
}

/// Draw a transmitter for a probe receiver at `rx`; `None` if it fails
/// mode selection.
pub fn sample_probe_tx<R: Rng + ?Sized>(rx: Point, cfg: &NetworkConfig, rng: &mut R) -> Option<PDue> {
    let tx = uniform_disk(rng, rx, cfg.geometry.d2d_range);
    let u = make_pdue(tx, rx, cfg);
    u.underlay.then_some(u)
}

/// SIR at a probe receiver `d` from the BS whose own transmitter is drawn
/// once; `None` when that transmitter is not admitted.
pub fn sir_at_probe_drx<R: Rng + ?Sized>(
    r: &Realization,
    d: f64,
    cfg: &NetworkConfig,
    fading: &FadingSpec,
    rng: &mut R,
) -> Option<f64> {
    let rx = [d, 0.0];
    sample_probe_tx(rx, cfg, rng)?;
    Some(probe_sir(r, rx, cfg, fading, rng))
}

fn probe_sir<R: Rng + ?Sized>(r: &Realization, rx: Point, cfg: &NetworkConfig, fading: &FadingSpec, rng: &mut R) -> f64 {
    let signal = nakagami(rng, fading.m_d2d) * cfg.mode.rho_d;
    signal / interference_at(r, rx, None, cfg, rng)
}

/// Quantities the simulator can estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "quantity", rename_all = "snake_case")]
pub enum Quantity {
    OutageBs { gamma: f64 },
    /// Conditional on the probe pair being admitted.
    OutageDrx { gamma: f64, d: f64 },
    MBar { gamma: f64 },
    MBarD2d,
    /// Ratio of the means of successes and admissions.
    Tau { gamma: f64 },
    /// Mean over realizations with at least one admission of their own ratio.
    TauPerRealization { gamma: f64 },
    PD2d { d: f64 },
    MgfSingleBs { s: f64 },
    MgfSingleDrx { s: f64, d: f64 },
    MgfCueDrx { s: f64, d: f64 },
}

/// Sample mean with a 95% normal-approximation half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorResult {
    pub mean: f64,
    pub ci_halfwidth: f64,
    pub n_samples: usize,
}

const Z95: f64 = 1.959_963_984_540_054;

fn pairwise_sum(x: &[f64]) -> f64 {
    if x.len() <= 32 {
        x.iter().sum()
    } else {
        let (a, b) = x.split_at(x.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

impl EstimatorResult {
    pub fn from_samples(x: &[f64]) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::InsufficientSamples { required: 1, got: 0 });
        }
        let n = x.len() as f64;
        let mean = pairwise_sum(x) / n;
        let dev: Vec<f64> = x.iter().map(|v| (v - mean) * (v - mean)).collect();
        let var = if x.len() > 1 { pairwise_sum(&dev) / (n - 1.0) } else { 0.0 };
        Ok(EstimatorResult { mean, ci_halfwidth: Z95 * (var / n).sqrt(), n_samples: x.len() })
    }

    /// Ratio of means with a delta-method half-width.
    fn ratio(num: &[f64], den: &[f64]) -> Result<Self> {
        let n = num.len() as f64;
        let dbar = pairwise_sum(den) / n;
        if !(dbar > 0.0) {
            return Err(Error::UndefinedMetric("no admissions in any realization".into()));
        }
        let tau = pairwise_sum(num) / pairwise_sum(den);
        let resid: Vec<f64> = num.iter().zip(den).map(|(a, b)| a - tau * b).collect();
        let spread = EstimatorResult::from_samples(&resid)?;
        Ok(EstimatorResult { mean: tau, ci_halfwidth: spread.ci_halfwidth / dbar, n_samples: num.len() })
    }

    /// Whether `value` lies within `k` half-widths or `rel` relative.
    pub fn agrees_with(&self, value: f64, k: f64, rel: f64) -> bool {
        let diff = (self.mean - value).abs();
        diff <= k * self.ci_halfwidth || diff <= rel * value.abs()
    }
}

/// Per-realization sample, or `None` when the realization carries no
/// sample for this quantity.
fn sample_one(q: &Quantity, cfg: &NetworkConfig, fading: &FadingSpec, opts: &SimOptions, seed: u64, i: u64) -> Option<(f64, f64)> {
    let mut rng = realization_stream(seed, i);
    let rng = &mut rng;
    let p = &cfg.mode;
    let cell = cfg.geometry.cell_radius;
    match *q {
        Quantity::MgfSingleBs { s } => {
            let u = sample_pdue(rng, cfg, opts);
            let i = if u.underlay { exp1(rng) * p.rho_d * u.r_d.powf(p.alpha_d) * u.r_c.powf(-p.alpha_c) } else { 0.0 };
            Some(((-s * i).exp(), 0.0))
        }
        Quantity::MgfSingleDrx { s, d } => {
            let u = sample_pdue(rng, cfg, opts);
            let i = if u.underlay {
                exp1(rng) * p.rho_d * u.r_d.powf(p.alpha_d) * dist(u.tx, [d, 0.0]).powf(-p.alpha_d)
            } else {
                0.0
            };
            Some(((-s * i).exp(), 0.0))
        }
        Quantity::MgfCueDrx { s, d } => {
            let z = uniform_disk(rng, [0.0, 0.0], cell);
            let i = exp1(rng) * p.rho_bs * norm(z).powf(p.alpha_c) * dist(z, [d, 0.0]).powf(-p.alpha_d);
            Some(((-s * i).exp(), 0.0))
        }
        Quantity::PD2d { d } => {
            let admitted = sample_probe_tx([d, 0.0], cfg, rng).is_some();
            Some((admitted as u8 as f64, 0.0))
        }
        _ => {
            let r = sample_realization(cfg, opts, rng, seed, i);
            match *q {
                Quantity::OutageBs { gamma } => Some(((sir_at_bs(&r, cfg, fading, rng) < gamma) as u8 as f64, 0.0)),
                Quantity::OutageDrx { gamma, d } => {
                    let rx = [d, 0.0];
                    (0..MAX_PROBE_DRAWS).find_map(|_| sample_probe_tx(rx, cfg, rng))?;
                    Some(((probe_sir(&r, rx, cfg, fading, rng) < gamma) as u8 as f64, 0.0))
                }
                Quantity::MBarD2d => Some((r.admitted().count() as f64, 0.0)),
                Quantity::MBar { gamma } | Quantity::Tau { gamma } | Quantity::TauPerRealization { gamma } => {
                    let (successes, admitted) = count_successes(&r, gamma, cfg, fading, rng);
                    match q {
                        Quantity::TauPerRealization { .. } if admitted == 0 => None,
                        Quantity::TauPerRealization { .. } => Some((successes as f64 / admitted as f64, 0.0)),
                        _ => Some((successes as f64, admitted as f64)),
                    }
                }
                _ => unreachable!(),
            }
        }
    }
}

/// Admitted pairs whose receiver SIR reaches `gamma`, and the number
/// admitted.
pub fn count_successes<R: Rng + ?Sized>(
    r: &Realization,
    gamma: f64,
    cfg: &NetworkConfig,
    fading: &FadingSpec,
    rng: &mut R,
) -> (usize, usize) {
    let mut ok = 0;
    let mut admitted = 0;
    for (j, u) in r.pdues.iter().enumerate().filter(|(_, u)| u.underlay) {
        admitted += 1;
        let signal = nakagami(rng, fading.m_d2d) * cfg.mode.rho_d;
        if signal >= gamma * interference_at(r, u.rx, Some(j), cfg, rng) {
            ok += 1;
        }
    }
    (ok, admitted)
}

/// Monte Carlo estimate of `q` from `n_realizations` independent streams.
pub fn estimate_metric(
    q: Quantity,
    cfg: &NetworkConfig,
    fading: &FadingSpec,
    opts: &SimOptions,
    n_realizations: usize,
    seed: u64,
) -> Result<EstimatorResult> {
    if n_realizations < MIN_REALIZATIONS {
        return Err(Error::InsufficientSamples { required: MIN_REALIZATIONS, got: n_realizations });
    }
    cfg.validate()?;
    fading.validate()?;
    let draws: Vec<(f64, f64)> = (0..n_realizations as u64)
        .into_par_iter()
        .filter_map(|i| sample_one(&q, cfg, fading, opts, seed, i))
        .collect();
    let (a, b): (Vec<f64>, Vec<f64>) = draws.into_iter().unzip();
    match q {
        Quantity::Tau { .. } => EstimatorResult::ratio(&a, &b),
        Quantity::TauPerRealization { .. } if a.is_empty() => {
            Err(Error::UndefinedMetric("no realization admitted a D2D user".into()))
        }
        _ if a.is_empty() => Err(Error::InsufficientSamples { required: 1, got: 0 }),
        _ => EstimatorResult::from_samples(&a),
    }
}

/// One annulus of [`drx_radial_histogram`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityBin {
    pub lo: f64,
    pub hi: f64,
    /// Receivers per square metre.
    pub density: EstimatorResult,
}

/// Empirical receiver intensity over the annuli delimited by `edges`.
pub fn drx_radial_histogram(
    cfg: &NetworkConfig,
    opts: &SimOptions,
    edges: &[f64],
    n_realizations: usize,
    seed: u64,
) -> Result<Vec<DensityBin>> {
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[1] > w[0])) || edges[0] < 0.0 {
        return Err(Error::InvalidConfig("histogram edges must be non-negative and increasing".into()));
    }
    if n_realizations < MIN_REALIZATIONS {
        return Err(Error::InsufficientSamples { required: MIN_REALIZATIONS, got: n_realizations });
    }
    let bins = edges.len() - 1;
    let counts: Vec<Vec<f64>> = (0..n_realizations as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = realization_stream(seed, i);
            let r = sample_realization(cfg, opts, &mut rng, seed, i);
            let mut c = vec![0.0; bins];
            for u in &r.pdues {
                let d = norm(u.rx);
                let k = edges.partition_point(|&e| e <= d);
                if k >= 1 && k <= bins {
                    c[k - 1] += 1.0;
                }
            }
            c
        })
        .collect();
    (0..bins)
        .map(|k| {
            let area = PI * (edges[k + 1].powi(2) - edges[k].powi(2));
            let x: Vec<f64> = counts.iter().map(|c| c[k] / area).collect();
            Ok(DensityBin { lo: edges[k], hi: edges[k + 1], density: EstimatorResult::from_samples(&x)? })
        })
        .collect()
}

/// Write realizations `0..n` as JSON lines.
///
/// Each line is one [`Realization`]: `seed`, `index`, `cue` as `[x, y]` in
/// metres, and `pdues`, each with `tx`, `rx`, `r_d`, `r_c`, `underlay`.
pub fn dump_realizations<W: Write>(out: &mut W, cfg: &NetworkConfig, opts: &SimOptions, n: usize, seed: u64) -> Result<()> {
    for i in 0..n as u64 {
        let mut rng = realization_stream(seed, i);
        let r = sample_realization(cfg, opts, &mut rng, seed, i);
        let line = serde_json::to_string(&r).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(out, "{line}")?;
    }
    Ok(())
}
