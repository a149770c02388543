//! C ABI for the dynreg learners.
//!
//! Handles are opaque pointers created by `*_new` functions and released by
//! the matching `*_free`. Every fallible function returns a [`DynregStatus`];
//! on failure the message is kept per thread and read with
//! [`dynreg_last_error_message`]. Losses are supplied per round as a pair of
//! callbacks, so any language that can expose a C function pointer can drive a
//! learner. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, c_void};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use dynreg::bandit::OptimismMode;
use dynreg::experiment::{build_learner, Algorithm, Overrides};
use dynreg::learners::{OnlineLearner, Problem};
use dynreg::oracle::{Objective, OracleConstants, QueryCounter, SharedObjective};
use dynreg::{DecisionVector, Error, FeasibleDomain, SmoothConvexOracle};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DynregStatus {
    Ok = 0,
    NullPointer = 1,
    DimensionMismatch = 2,
    NonFinite = 3,
    InvalidDomain = 4,
    InvalidParameter = 5,
    RoundOutOfRange = 6,
    Unsupported = 7,
    Io = 8,
    Panic = 9,
}

/// Learner selector for [`dynreg_learner_new`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DynregAlgorithm {
    Ogd = 0,
    Oegd = 1,
    Ader = 2,
    Sword = 3,
    SwordPlusPlus = 4,
    SwordBanditVariation = 5,
    SwordBanditZero = 6,
    SwordBanditBest = 7,
}

impl From<DynregAlgorithm> for Algorithm {
    fn from(a: DynregAlgorithm) -> Self {
        match a {
            DynregAlgorithm::Ogd => Algorithm::Ogd,
            DynregAlgorithm::Oegd => Algorithm::Oegd,
            DynregAlgorithm::Ader => Algorithm::Ader,
            DynregAlgorithm::Sword => Algorithm::Sword,
            DynregAlgorithm::SwordPlusPlus => Algorithm::SwordPlusPlus,
            DynregAlgorithm::SwordBanditVariation => Algorithm::SwordBandit(OptimismMode::Variation),
            DynregAlgorithm::SwordBanditZero => Algorithm::SwordBandit(OptimismMode::Zero),
            DynregAlgorithm::SwordBanditBest => Algorithm::SwordBandit(OptimismMode::Best),
        }
    }
}

/// `f(x)` for `x` of length `dim`.
pub type DynregValueFn = Option<unsafe extern "C" fn(x: *const f64, dim: usize, user_data: *mut c_void) -> f64>;

/// Writes `∇f(x)` into `out`, both of length `dim`.
pub type DynregGradientFn =
    Option<unsafe extern "C" fn(x: *const f64, dim: usize, out: *mut f64, user_data: *mut c_void)>;

type ValueFn = unsafe extern "C" fn(*const f64, usize, *mut c_void) -> f64;
type GradientFn = unsafe extern "C" fn(*const f64, usize, *mut f64, *mut c_void);

/// Opaque feasible domain.
pub struct DynregDomain {
    inner: FeasibleDomain,
}

/// Opaque online learner with its run-wide query counter.
pub struct DynregLearner {
    learner: Box<dyn OnlineLearner>,
    counter: QueryCounter,
    constants: OracleConstants,
    dim: usize,
    t: usize,
    horizon: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> DynregStatus {
    match e {
        Error::DimensionMismatch { .. } => DynregStatus::DimensionMismatch,
        Error::NonFinite(_) => DynregStatus::NonFinite,
        Error::InvalidDomain(_) => DynregStatus::InvalidDomain,
        Error::InvalidParameter(_) | Error::Config(_) => DynregStatus::InvalidParameter,
        Error::RoundOutOfRange { .. } => DynregStatus::RoundOutOfRange,
        Error::Unsupported(_) => DynregStatus::Unsupported,
        Error::Input { .. } | Error::Io(_) => DynregStatus::Io,
    }
}

/// Runs `f`, converting errors and panics into a status and the last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> DynregStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DynregStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            DynregStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            DynregStatus::Panic
        }
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a>(p: *mut f64, len: usize, what: &'static str) -> Result<&'a mut [f64], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Copies the last error of this thread into `buf` (NUL-terminated,
/// truncated to `len − 1` bytes) and returns its full length in bytes.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn dynreg_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Euclidean ball of radius `radius` around `center[0..dim]`.
///
/// # Safety
/// `center` must point to `dim` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dynreg_domain_ball(
    center: *const f64,
    dim: usize,
    radius: f64,
    out: *mut *mut DynregDomain,
) -> DynregStatus {
    guard(|| {
        let c = DecisionVector::new(slice(center, dim, "center")?.to_vec())?;
        emit(out, DynregDomain { inner: FeasibleDomain::ball(c, radius)? })
    })
}

/// Axis-aligned box `[lower, upper]`.
///
/// # Safety
/// `lower` and `upper` must point to `dim` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dynreg_domain_box(
    lower: *const f64,
    upper: *const f64,
    dim: usize,
    out: *mut *mut DynregDomain,
) -> DynregStatus {
    guard(|| {
        let lo = DecisionVector::new(slice(lower, dim, "lower")?.to_vec())?;
        let hi = DecisionVector::new(slice(upper, dim, "upper")?.to_vec())?;
        emit(out, DynregDomain { inner: FeasibleDomain::bounded_box(lo, hi)? })
    })
}

/// # Safety
/// `domain` must be null or a handle from a `dynreg_domain_*` constructor not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dynreg_domain_free(domain: *mut DynregDomain) {
    if !domain.is_null() {
        drop(Box::from_raw(domain));
    }
}

/// Dimension of the domain, 0 for a null handle.
///
/// # Safety
/// `domain` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dynreg_domain_dim(domain: *const DynregDomain) -> usize {
    domain.as_ref().map_or(0, |d| d.inner.dim())
}

/// Euclidean diameter, NaN for a null handle.
///
/// # Safety
/// `domain` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dynreg_domain_diameter(domain: *const DynregDomain) -> f64 {
    domain.as_ref().map_or(f64::NAN, |d| d.inner.diameter())
}

/// Euclidean projection of `x` onto the domain, written to `out`.
///
/// # Safety
/// `x` and `out` must point to `dim` doubles; they may alias.
#[no_mangle]
pub unsafe extern "C" fn dynreg_domain_project(
    domain: *const DynregDomain,
    x: *const f64,
    out: *mut f64,
    dim: usize,
) -> DynregStatus {
    guard(|| {
        let d = domain.as_ref().ok_or(Failure::Null("domain"))?;
        let p = d.inner.project(slice(x, dim, "x")?)?;
        slice_mut(out, dim, "out")?.copy_from_slice(&p);
        Ok(())
    })
}

/// Learner tuned for domain, gradient bound `G`, smoothness `L` and horizon
/// `T` with default parameters. `seed` drives the bandit coordinate sampling
/// and is ignored otherwise. The domain is copied.
///
/// # Safety
/// `domain` must be a live handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dynreg_learner_new(
    algorithm: DynregAlgorithm,
    domain: *const DynregDomain,
    gradient_bound: f64,
    smoothness: f64,
    horizon: usize,
    seed: u64,
    out: *mut *mut DynregLearner,
) -> DynregStatus {
    guard(|| {
        let d = domain.as_ref().ok_or(Failure::Null("domain"))?;
        let problem = Problem::new(d.inner.clone(), gradient_bound, smoothness, horizon)?;
        let (learner, _) = build_learner(algorithm.into(), &problem, &Overrides::default(), seed)?;
        emit(
            out,
            DynregLearner {
                learner,
                counter: QueryCounter::new(),
                constants: OracleConstants { gradient_bound, smoothness, nonnegative: false },
                dim: d.inner.dim(),
                t: 0,
                horizon,
            },
        )
    })
}

/// # Safety
/// `learner` must be null or a handle from [`dynreg_learner_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dynreg_learner_free(learner: *mut DynregLearner) {
    if !learner.is_null() {
        drop(Box::from_raw(learner));
    }
}

/// Copies the decision the next round will play into `out`.
///
/// # Safety
/// `learner` must be live and `out` must point to `dim` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn dynreg_learner_decision(learner: *const DynregLearner, out: *mut f64, dim: usize) -> DynregStatus {
    guard(|| {
        let l = learner.as_ref().ok_or(Failure::Null("learner"))?;
        if dim != l.dim {
            return Err(Error::DimensionMismatch { expected: l.dim, actual: dim }.into());
        }
        slice_mut(out, dim, "out")?.copy_from_slice(l.learner.decision());
        Ok(())
    })
}

/// Loss supplied through C callbacks. The caller guarantees that the
/// callbacks and `user_data` stay valid for the duration of one round, which
/// is the only time the objective is reachable.
#[derive(Debug)]
struct CallbackObjective {
    value: ValueFn,
    gradient: GradientFn,
    user_data: *mut c_void,
    dim: usize,
    smoothness: f64,
}

// SAFETY: the objective lives only inside one `dynreg_learner_round` call on
// the caller's thread; learners never move it to another thread.
unsafe impl Send for CallbackObjective {}
unsafe impl Sync for CallbackObjective {}

impl Objective for CallbackObjective {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        // SAFETY: the caller of `dynreg_learner_round` vouches for the callback.
        unsafe { (self.value)(x.as_ptr(), self.dim, self.user_data) }
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        // SAFETY: as for `value`; `out` has `dim` entries.
        unsafe { (self.gradient)(x.as_ptr(), self.dim, out.as_mut_ptr(), self.user_data) }
    }

    fn smoothness(&self) -> f64 {
        self.smoothness
    }
}

/// Plays one round against the loss given by `value` and `gradient`.
/// Writes the played point to `played` (if non-null, `dim` doubles) and the
/// incurred loss to `loss` (if non-null).
///
/// # Safety
/// `learner` must be live; the callbacks must be valid for points of the
/// learner's dimension and must not call back into this learner.
#[no_mangle]
pub unsafe extern "C" fn dynreg_learner_round(
    learner: *mut DynregLearner,
    value: DynregValueFn,
    gradient: DynregGradientFn,
    user_data: *mut c_void,
    played: *mut f64,
    loss: *mut f64,
) -> DynregStatus {
    guard(|| {
        let l = learner.as_mut().ok_or(Failure::Null("learner"))?;
        let value = value.ok_or(Failure::Null("value callback"))?;
        let gradient = gradient.ok_or(Failure::Null("gradient callback"))?;
        if l.t >= l.horizon {
            return Err(Error::RoundOutOfRange { t: l.t + 1, horizon: l.horizon }.into());
        }
        let objective: SharedObjective =
            Arc::new(CallbackObjective { value, gradient, user_data, dim: l.dim, smoothness: l.constants.smoothness });
        let oracle = SmoothConvexOracle::new(objective, l.constants).with_counter(&l.counter);
        let out = l.learner.round(&oracle)?;
        l.t += 1;
        if !played.is_null() {
            slice_mut(played, l.dim, "played")?.copy_from_slice(&out.decision);
        }
        if let Some(p) = loss.as_mut() {
            *p = out.loss;
        }
        Ok(())
    })
}

/// Cumulative gradient and value queries made by the learner so far.
///
/// # Safety
/// `learner` must be live; the output pointers may be null.
#[no_mangle]
pub unsafe extern "C" fn dynreg_learner_queries(
    learner: *const DynregLearner,
    gradient_queries: *mut u64,
    value_queries: *mut u64,
) -> DynregStatus {
    guard(|| {
        let l = learner.as_ref().ok_or(Failure::Null("learner"))?;
        if let Some(g) = gradient_queries.as_mut() {
            *g = l.counter.gradient_queries();
        }
        if let Some(v) = value_queries.as_mut() {
            *v = l.counter.value_queries();
        }
        Ok(())
    })
}

/// Rounds played so far.
///
/// # Safety
/// `learner` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn dynreg_learner_rounds(learner: *const DynregLearner) -> usize {
    learner.as_ref().map_or(0, |l| l.t)
}
