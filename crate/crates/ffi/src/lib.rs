//! C ABI over `d2d_underlay`.
//!
//! A `D2dConfig` handle holds a run configuration built from the same
//! dotted keys the CLI accepts. Every call returns a `D2dStatus`; on
//! failure `d2d_last_error()` describes the most recent error on the
//! calling thread.

use d2d_underlay::config::RunConfig;
use d2d_underlay::geometry::drx_density;
use d2d_underlay::mgf::{mgf, MgfTarget};
use d2d_underlay::mode_selection::p_d2d;
use d2d_underlay::outage::{
    avg_dues, avg_successful_transmissions, outage_bs, outage_drx, solve_xi_for_qos, spectrum_reuse_ratio,
    QosSolution,
};
use d2d_underlay::simulator::{estimate_metric, Quantity};
use d2d_underlay::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Opaque configuration handle.
pub struct D2dConfig {
    run: RunConfig,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum D2dStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidConfig = 3,
    Domain = 4,
    UnsupportedOrder = 5,
    NonConvergence = 6,
    UndefinedMetric = 7,
    BracketFailure = 8,
    InsufficientSamples = 9,
    Io = 10,
    Panic = 11,
    BufferTooSmall = 12,
}

/// Where an MGF is evaluated.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum D2dMgfTarget {
    SingleBs = 0,
    AggregateBs = 1,
    SingleDrx = 2,
    CueDrx = 3,
    AggregateDrx = 4,
}

/// Quantities the simulator estimates.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum D2dQuantity {
    OutageBs = 0,
    OutageDrx = 1,
    MBar = 2,
    MBarD2d = 3,
    Tau = 4,
    PD2d = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct D2dEstimate {
    pub mean: f64,
    pub ci_halfwidth: f64,
    pub n_samples: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn record(status: D2dStatus, message: &str) -> D2dStatus {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
    status
}

fn status_of(e: &Error) -> D2dStatus {
    match e {
        Error::InvalidConfig(_) => D2dStatus::InvalidConfig,
        Error::Domain { .. } => D2dStatus::Domain,
        Error::UnsupportedOrder(_) => D2dStatus::UnsupportedOrder,
        Error::NonConvergence { .. } => D2dStatus::NonConvergence,
        Error::UndefinedMetric(_) => D2dStatus::UndefinedMetric,
        Error::BracketFailure { .. } => D2dStatus::BracketFailure,
        Error::InsufficientSamples { .. } => D2dStatus::InsufficientSamples,
        Error::Io(_) => D2dStatus::Io,
    }
}

enum Fail {
    Status(D2dStatus, String),
    Model(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Model(e)
    }
}

/// Run `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> D2dStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => D2dStatus::Ok,
        Ok(Err(Fail::Status(s, m))) => record(s, &m),
        Ok(Err(Fail::Model(e))) => record(status_of(&e), &e.to_string()),
        Err(_) => record(D2dStatus::Panic, "internal panic"),
    }
}

unsafe fn config<'a>(cfg: *const D2dConfig) -> Result<&'a D2dConfig, Fail> {
    cfg.as_ref().ok_or_else(|| Fail::Status(D2dStatus::NullPointer, "null configuration handle".into()))
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(Fail::Status(D2dStatus::NullPointer, format!("null {what}")));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Fail::Status(D2dStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Status(D2dStatus::NullPointer, "null output pointer".into()));
    }
    out.write(v);
    Ok(())
}

/// New configuration holding the default parameters. Free with
/// `d2d_config_free`.
#[no_mangle]
pub extern "C" fn d2d_config_new() -> *mut D2dConfig {
    Box::into_raw(Box::new(D2dConfig { run: RunConfig::default() }))
}

/// # Safety
/// `cfg` must come from `d2d_config_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn d2d_config_free(cfg: *mut D2dConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Set one key; `value` uses TOML syntax (`3.5`, `"quadrature"`, `[1, 2]`).
///
/// # Safety
/// `cfg` must be a live handle; `key` and `value` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn d2d_config_set(cfg: *mut D2dConfig, key: *const c_char, value: *const c_char) -> D2dStatus {
    guard(|| {
        let cfg = cfg.as_mut().ok_or_else(|| Fail::Status(D2dStatus::NullPointer, "null configuration handle".into()))?;
        let assignment = format!("{}={}", text(key, "key")?, text(value, "value")?);
        let mut next = cfg.run.clone();
        next.set_str(&assignment)?;
        cfg.run = next;
        Ok(())
    })
}

/// Apply every key of a TOML document.
///
/// # Safety
/// `cfg` must be a live handle; `toml` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn d2d_config_load_toml(cfg: *mut D2dConfig, toml: *const c_char) -> D2dStatus {
    guard(|| {
        let cfg = cfg.as_mut().ok_or_else(|| Fail::Status(D2dStatus::NullPointer, "null configuration handle".into()))?;
        let mut next = cfg.run.clone();
        next.merge_toml(text(toml, "document")?)?;
        cfg.run = next;
        Ok(())
    })
}

/// Check the configuration without evaluating anything.
///
/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn d2d_config_validate(cfg: *const D2dConfig) -> D2dStatus {
    guard(|| {
        config(cfg)?.run.network()?;
        Ok(())
    })
}

/// BS outage at the configured SIR threshold.
///
/// # Safety
/// `cfg` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn d2d_outage_bs(cfg: *const D2dConfig, out: *mut f64) -> D2dStatus {
    guard(|| {
        let run = &config(cfg)?.run;
        write(out, outage_bs(run.gamma(), &run.network()?, &run.fading())?)
    })
}

/// Outage at an admitted D2D receiver `d` metres from the BS.
///
/// # Safety
/// `cfg` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn d2d_outage_drx(cfg: *const D2dConfig, d: f64, out: *mut f64) -> D2dStatus {
    guard(|| {
        let run = &config(cfg)?.run;
        write(out, outage_drx(run.gamma(), d, &run.network()?, &run.fading())?)
    })
}

/// Mean number of admitted D2D users per cell.
///
/// # Safety
/// `cfg` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn d2d_avg_dues(cfg: *const D2dConfig, out: *mut f64) -> D2dStatus {
    guard(|| write(out, avg_dues(&config(cfg)?.run.network()?)))
}

/// Mean number of successful D2D links per cell.
///
/// # Safety
/// `cfg` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn d2d_avg_successful_transmissions(cfg: *const D2dConfig, out: *mut f64) -> D2dStatus {
    guard(|| {
        let run = &config(cfg)?.run;
        write(out, avg_successful_transmissions(run.gamma(), &run.network()?, &run.fading())?)
    })
}

/// Fraction of admitted D2D links that succeed.
///
/// # Safety
/// `cfg` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn d2d_spectrum_reuse_ratio(cfg: *const D2dConfig, out: *mut f64) -> D2dStatus {
    guard(|| {
        let run = &config(cfg)?.run;
        write(out, spectrum_reuse_ratio(run.gamma(), &run.network()?, &run.fading())?)
    })
}

/// Admission probability of a pair whose receiver is `d` from the BS.
///
/// # Safety
/// `cfg` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn d2d_p_d2d(cfg: *const D2dConfig, d: f64, out: *mut f64) -> D2dStatus {
    guard(|| {
        let n = config(cfg)?.run.network()?;
        write(out, p_d2d(d, &n.mode, &n.geometry)?)
    })
}

/// Intensity of D2D receivers `d` from the BS.
///
/// # Safety
/// `cfg` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn d2d_drx_density(cfg: *const D2dConfig, d: f64, out: *mut f64) -> D2dStatus {
    guard(|| {
        let n = config(cfg)?.run.network()?;
        write(out, drx_density(n.lambda, &n.geometry, d)?)
    })
}

/// Largest `xi` (watts) whose BS outage equals `target`. When every user
/// can be admitted without reaching it, `*saturated` is set to 1 and
/// `*xi_out` to infinity.
///
/// # Safety
/// `cfg` must be a live handle; `xi_out` and `saturated` writable.
#[no_mangle]
pub unsafe extern "C" fn d2d_solve_xi(cfg: *const D2dConfig, target: f64, xi_out: *mut f64, saturated: *mut u8) -> D2dStatus {
    guard(|| {
        let run = &config(cfg)?.run;
        let sol = solve_xi_for_qos(target, run.gamma(), &run.network()?, &run.fading())?;
        write(saturated, matches!(sol, QosSolution::Saturated { .. }) as u8)?;
        write(xi_out, sol.xi())
    })
}

/// MGF and its derivatives `d^k M / ds^k`, `k = 0..=order`, written to
/// `out[0..=order]`. `d` is ignored for BS targets.
///
/// # Safety
/// `cfg` must be a live handle; `out` must hold `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn d2d_mgf(
    cfg: *const D2dConfig,
    target: D2dMgfTarget,
    s: f64,
    d: f64,
    order: usize,
    out: *mut f64,
    out_len: usize,
) -> D2dStatus {
    guard(|| {
        let run = &config(cfg)?.run;
        if out.is_null() {
            return Err(Fail::Status(D2dStatus::NullPointer, "null output pointer".into()));
        }
        if out_len <= order {
            return Err(Fail::Status(D2dStatus::BufferTooSmall, format!("need {} slots, got {out_len}", order + 1)));
        }
        let target = match target {
            D2dMgfTarget::SingleBs => MgfTarget::SingleBs,
            D2dMgfTarget::AggregateBs => MgfTarget::AggregateBs,
            D2dMgfTarget::SingleDrx => MgfTarget::SingleDrx { d },
            D2dMgfTarget::CueDrx => MgfTarget::CueDrx { d },
            D2dMgfTarget::AggregateDrx => MgfTarget::AggregateDrx { d },
        };
        let n = run.network()?;
        let m = mgf(target, s, order, &n, n.mgf_method)?;
        std::slice::from_raw_parts_mut(out, order + 1).copy_from_slice(&m.derivatives);
        Ok(())
    })
}

/// Monte Carlo estimate of `quantity`; `d` is the probe distance for the
/// receiver-side quantities.
///
/// # Safety
/// `cfg` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn d2d_estimate(
    cfg: *const D2dConfig,
    quantity: D2dQuantity,
    d: f64,
    n_realizations: u64,
    seed: u64,
    out: *mut D2dEstimate,
) -> D2dStatus {
    guard(|| {
        let run = &config(cfg)?.run;
        let gamma = run.gamma();
        let q = match quantity {
            D2dQuantity::OutageBs => Quantity::OutageBs { gamma },
            D2dQuantity::OutageDrx => Quantity::OutageDrx { gamma, d },
            D2dQuantity::MBar => Quantity::MBar { gamma },
            D2dQuantity::MBarD2d => Quantity::MBarD2d,
            D2dQuantity::Tau => Quantity::Tau { gamma },
            D2dQuantity::PD2d => Quantity::PD2d { d },
        };
        let e = estimate_metric(q, &run.network()?, &run.fading(), &run.sim_options(), n_realizations as usize, seed)?;
        write(out, D2dEstimate { mean: e.mean, ci_halfwidth: e.ci_halfwidth, n_samples: e.n_samples as u64 })
    })
}

/// Message of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next failing call on the thread.
#[no_mangle]
pub extern "C" fn d2d_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn d2d_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}
