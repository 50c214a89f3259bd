//! C interface to the cv2x engine.
//!
//! Models are opaque handles created by `cv2x_model_new` and released with
//! `cv2x_model_free`. Every fallible call returns a `Cv2xStatus`; on failure
//! `cv2x_last_error_message` describes the cause for the calling thread.
//! Output pointers are written only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;

use cv2x::analysis::{association_prob, coverage_probability, CoverageQuery, Event};
use cv2x::load::{rate_coverage_with, LoadModel, RateQuery};
use cv2x::montecarlo::{estimate_coverage, TrialConfig};
use cv2x::{equivalent_densities, EquivalentDensities, Error, NetworkParams};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cv2xStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Numeric = 3,
    /// Conditioning on an event of probability zero.
    Degenerate = 4,
    /// Parameters outside the regime the load model covers.
    Unsupported = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Model constants in SI units and linear scale; see `cv2x_params_default`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cv2xParams {
    pub mu_l: f64,
    pub lambda_1: f64,
    pub lambda_2: f64,
    pub lambda_r: f64,
    pub alpha: f64,
    pub p1: f64,
    pub p2: f64,
    pub g1_main: f64,
    pub g1_side: f64,
    pub g2_main: f64,
    pub g2_side: f64,
    pub q_c: f64,
    pub b1: f64,
    pub b2: f64,
    pub m1: u32,
    pub m20: u32,
    pub m21: u32,
    pub omega_1: f64,
    pub omega_20: f64,
    pub omega_21: f64,
    pub sigma_1: f64,
    pub sigma_20: f64,
    pub sigma_21: f64,
    pub bandwidth: f64,
}

impl From<&NetworkParams> for Cv2xParams {
    fn from(p: &NetworkParams) -> Self {
        Self {
            mu_l: p.mu_l,
            lambda_1: p.lambda_1,
            lambda_2: p.lambda_2,
            lambda_r: p.lambda_r,
            alpha: p.alpha,
            p1: p.p1,
            p2: p.p2,
            g1_main: p.g1_main,
            g1_side: p.g1_side,
            g2_main: p.g2_main,
            g2_side: p.g2_side,
            q_c: p.q_c,
            b1: p.b1,
            b2: p.b2,
            m1: p.m1,
            m20: p.m20,
            m21: p.m21,
            omega_1: p.omega_1,
            omega_20: p.omega_20,
            omega_21: p.omega_21,
            sigma_1: p.sigma_1,
            sigma_20: p.sigma_20,
            sigma_21: p.sigma_21,
            bandwidth: p.bandwidth,
        }
    }
}

impl From<&Cv2xParams> for NetworkParams {
    fn from(p: &Cv2xParams) -> Self {
        Self {
            mu_l: p.mu_l,
            lambda_1: p.lambda_1,
            lambda_2: p.lambda_2,
            lambda_r: p.lambda_r,
            alpha: p.alpha,
            p1: p.p1,
            p2: p.p2,
            g1_main: p.g1_main,
            g1_side: p.g1_side,
            g2_main: p.g2_main,
            g2_side: p.g2_side,
            q_c: p.q_c,
            b1: p.b1,
            b2: p.b2,
            m1: p.m1,
            m20: p.m20,
            m21: p.m21,
            omega_1: p.omega_1,
            omega_20: p.omega_20,
            omega_21: p.omega_21,
            sigma_1: p.sigma_1,
            sigma_20: p.sigma_20,
            sigma_21: p.sigma_21,
            bandwidth: p.bandwidth,
        }
    }
}

/// Validated parameters with cached derived quantities.
pub struct Cv2xModel {
    params: NetworkParams,
    eq: EquivalentDensities,
    loads: OnceLock<Result<LoadModel, Error>>,
}

impl Cv2xModel {
    fn loads(&self) -> Result<&LoadModel, Error> {
        self.loads
            .get_or_init(|| LoadModel::new(&self.params, &self.eq, 1e-9))
            .as_ref()
            .map_err(Clone::clone)
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> Cv2xStatus {
    match e {
        Error::Parameter { .. } => Cv2xStatus::InvalidParameter,
        Error::DegenerateConditioning { .. } => Cv2xStatus::Degenerate,
        Error::UnsupportedRegime(_) | Error::ModelRegime { .. } => Cv2xStatus::Unsupported,
        Error::Quadrature { .. } | Error::ZeroDistance | Error::BranchDomain(_) | Error::Truncation { .. } => {
            Cv2xStatus::Numeric
        }
    }
}

struct Fail(Cv2xStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(Cv2xStatus::NullPointer, format!("null pointer: {what}"))
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> Cv2xStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            Cv2xStatus::Ok
        }
        Ok(Err(Fail(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            Cv2xStatus::Panic
        }
    }
}

unsafe fn model_ref<'a>(m: *const Cv2xModel) -> Result<&'a Cv2xModel, Fail> {
    m.as_ref().ok_or_else(|| null("model"))
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn cv2x_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cv2x_version() -> *const c_char {
    static V: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    V.as_ptr()
}

/// Fills `out` with the baseline network.
///
/// # Safety
/// `out` must be null or point to writable memory for one `Cv2xParams`.
#[no_mangle]
pub unsafe extern "C" fn cv2x_params_default(out: *mut Cv2xParams) -> Cv2xStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = Cv2xParams::from(&NetworkParams::default());
        Ok(())
    })
}

/// Validates `params` and creates a model handle.
///
/// # Safety
/// `params` must point to a valid `Cv2xParams`; `out` to writable storage
/// for one pointer.
#[no_mangle]
pub unsafe extern "C" fn cv2x_model_new(params: *const Cv2xParams, out: *mut *mut Cv2xModel) -> Cv2xStatus {
    guard(|| {
        let p = params.as_ref().ok_or_else(|| null("params"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let params = NetworkParams::from(p);
        params.validate()?;
        let eq = equivalent_densities(&params)?;
        *out = Box::into_raw(Box::new(Cv2xModel {
            params,
            eq,
            loads: OnceLock::new(),
        }));
        Ok(())
    })
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` must be null or a handle from `cv2x_model_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cv2x_model_free(model: *mut Cv2xModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Probabilities of associating with tier 1 and with a tier-2 node on the
/// receiver's road.
///
/// # Safety
/// `model` must be a live handle; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn cv2x_association_prob(
    model: *const Cv2xModel,
    out_tier1: *mut f64,
    out_tier2: *mut f64,
) -> Cv2xStatus {
    guard(|| {
        let m = model_ref(model)?;
        let o1 = out_tier1.as_mut().ok_or_else(|| null("out_tier1"))?;
        let o2 = out_tier2.as_mut().ok_or_else(|| null("out_tier2"))?;
        *o1 = association_prob(&m.eq, Event::E1);
        *o2 = association_prob(&m.eq, Event::E2);
        Ok(())
    })
}

/// SIR coverage probability at the linear threshold `beta`.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cv2x_coverage(model: *const Cv2xModel, beta: f64, out: *mut f64) -> Cv2xStatus {
    guard(|| {
        let m = model_ref(model)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = coverage_probability(&m.params, &m.eq, CoverageQuery::new(beta))?.total;
        Ok(())
    })
}

/// Rate coverage at `target_bps`.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cv2x_rate_coverage(model: *const Cv2xModel, target_bps: f64, out: *mut f64) -> Cv2xStatus {
    guard(|| {
        let m = model_ref(model)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let loads = m.loads()?;
        *out = rate_coverage_with(&m.params, &m.eq, loads, RateQuery::new(target_bps))?;
        Ok(())
    })
}

/// Mean load of the tier-1 node serving the receiver.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cv2x_tier1_mean_load(model: *const Cv2xModel, out: *mut f64) -> Cv2xStatus {
    guard(|| {
        let m = model_ref(model)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = m.loads()?.tier1_mean_load;
        Ok(())
    })
}

/// Load PMF of the tier-2 node serving the receiver, indexed by load; entry 0
/// is always zero. `*out_len` receives the required length. When `capacity`
/// is smaller, nothing else is written and `BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// `model` must be a live handle; `out_probs` must be null or hold
/// `capacity` doubles; `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cv2x_tier2_load_pmf(
    model: *const Cv2xModel,
    out_probs: *mut f64,
    capacity: usize,
    out_len: *mut usize,
) -> Cv2xStatus {
    guard(|| {
        let m = model_ref(model)?;
        let len = out_len.as_mut().ok_or_else(|| null("out_len"))?;
        let probs = &m.loads()?.tier2_load.probs;
        *len = probs.len();
        if capacity < probs.len() || out_probs.is_null() {
            return Err(Fail(
                Cv2xStatus::BufferTooSmall,
                format!("need {} entries, have {capacity}", probs.len()),
            ));
        }
        std::slice::from_raw_parts_mut(out_probs, probs.len()).copy_from_slice(probs);
        Ok(())
    })
}

/// Simulated SIR coverage at `n_betas` linear thresholds, with 95%
/// half-widths. Uses the default simulation window.
///
/// # Safety
/// `model` must be a live handle; `betas`, `out_estimate` and `out_ci`
/// must each hold `n_betas` doubles (`out_ci` may be null).
#[no_mangle]
pub unsafe extern "C" fn cv2x_mc_coverage(
    model: *const Cv2xModel,
    seed: u64,
    n_trials: u64,
    betas: *const f64,
    n_betas: usize,
    out_estimate: *mut f64,
    out_ci: *mut f64,
) -> Cv2xStatus {
    guard(|| {
        let m = model_ref(model)?;
        if n_betas == 0 {
            return Ok(());
        }
        if betas.is_null() {
            return Err(null("betas"));
        }
        if out_estimate.is_null() {
            return Err(null("out_estimate"));
        }
        let b = std::slice::from_raw_parts(betas, n_betas);
        let cfg = TrialConfig::new(m.params.clone(), seed, n_trials)?;
        let run = estimate_coverage(&cfg, b)?;
        std::slice::from_raw_parts_mut(out_estimate, n_betas).copy_from_slice(&run.curve.estimate);
        if !out_ci.is_null() {
            std::slice::from_raw_parts_mut(out_ci, n_betas).copy_from_slice(&run.curve.ci_halfwidth);
        }
        Ok(())
    })
}
