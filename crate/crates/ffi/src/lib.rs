//! C ABI over the `kgpho` solvers.
//!
//! Objects are opaque handles created by `*_new` and released by `*_free`.
//! Every call returns a [`KgphoStatus`]; on failure the message is available
//! from [`kgpho_last_error_message`] on the same thread. Panics are caught
//! at the boundary and reported as [`KgphoStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use kgpho::oracle::{verify_level, OracleConfig};
use kgpho::spectra::{principal_level, solve_kg_energy};
use kgpho::{Branch, EnergyLevel, Error, LevelKind, Method, PhysicalSystem, QuantumState, RadialWaveFunction};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KgphoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    NoRoot = 4,
    Degenerate = 5,
    BufferTooSmall = 6,
    VerificationFailed = 7,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KgphoMethod {
    Positive = 0,
    Negative = 1,
    Free = 2,
    Nonrel = 3,
    KgPho = 4,
    KgHo = 5,
    NonrelHo = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KgphoLevelKind {
    Positive = 0,
    Negative = 1,
    FreeField = 2,
    NonrelFields = 3,
    NonrelPho = 4,
    KgPho = 5,
    KgHo = 6,
    NonrelHo = 7,
}

/// A solved level. `oracle_dev` is meaningful only when `has_oracle_dev`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KgphoLevel {
    pub energy: f64,
    pub residual: f64,
    pub m_eff: f64,
    pub oracle_dev: f64,
    pub n: u32,
    pub m: i32,
    pub kind: KgphoLevelKind,
    pub principal: bool,
    pub has_oracle_dev: bool,
}

/// Opaque system parameters.
pub struct KgphoSystem {
    inner: PhysicalSystem,
}

/// Opaque radial wave function.
pub struct KgphoWaveFunction {
    inner: RadialWaveFunction,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
    Ok(s) => s,
    Err(_) => panic!("version string"),
};

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::default());
}

fn status_of(e: &Error) -> KgphoStatus {
    match e {
        Error::NoRoot(_) => KgphoStatus::NoRoot,
        Error::Degenerate(_) => KgphoStatus::Degenerate,
        Error::InvalidOrder(_) | Error::NonFinite(_) | Error::UnsupportedOrder(_) => {
            KgphoStatus::InvalidArgument
        }
        Error::Domain(_) | Error::NotPolynomial(_) => KgphoStatus::Domain,
    }
}

/// Runs `f`, converting errors and panics to a status code.
fn guard<F>(f: F) -> KgphoStatus
where
    F: FnOnce() -> Result<(), (KgphoStatus, String)>,
{
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KgphoStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("panic: {msg}"));
            KgphoStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (KgphoStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (KgphoStatus, String) {
    (KgphoStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (KgphoStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

fn method_of(m: KgphoMethod) -> Method {
    match m {
        KgphoMethod::Positive => Method::Positive,
        KgphoMethod::Negative => Method::Negative,
        KgphoMethod::Free => Method::Free,
        KgphoMethod::Nonrel => Method::Nonrel,
        KgphoMethod::KgPho => Method::KgPho,
        KgphoMethod::KgHo => Method::KgHo,
        KgphoMethod::NonrelHo => Method::NonrelHo,
    }
}

impl From<LevelKind> for KgphoLevelKind {
    fn from(k: LevelKind) -> Self {
        match k {
            LevelKind::Positive => Self::Positive,
            LevelKind::Negative => Self::Negative,
            LevelKind::FreeField => Self::FreeField,
            LevelKind::NonrelFields => Self::NonrelFields,
            LevelKind::NonrelPho => Self::NonrelPho,
            LevelKind::KgPho => Self::KgPho,
            LevelKind::KgHo => Self::KgHo,
            LevelKind::NonrelHo => Self::NonrelHo,
        }
    }
}

impl From<KgphoLevelKind> for LevelKind {
    fn from(k: KgphoLevelKind) -> Self {
        match k {
            KgphoLevelKind::Positive => Self::Positive,
            KgphoLevelKind::Negative => Self::Negative,
            KgphoLevelKind::FreeField => Self::FreeField,
            KgphoLevelKind::NonrelFields => Self::NonrelFields,
            KgphoLevelKind::NonrelPho => Self::NonrelPho,
            KgphoLevelKind::KgPho => Self::KgPho,
            KgphoLevelKind::KgHo => Self::KgHo,
            KgphoLevelKind::NonrelHo => Self::NonrelHo,
        }
    }
}

impl From<&EnergyLevel> for KgphoLevel {
    fn from(l: &EnergyLevel) -> Self {
        Self {
            energy: l.energy,
            residual: l.residual,
            m_eff: l.state.m_eff,
            oracle_dev: l.oracle_dev.unwrap_or(0.0),
            n: l.state.n,
            m: l.state.m,
            kind: l.kind.into(),
            principal: l.principal,
            has_oracle_dev: l.oracle_dev.is_some(),
        }
    }
}

impl KgphoLevel {
    fn to_level(self, sys: &PhysicalSystem) -> EnergyLevel {
        EnergyLevel {
            energy: self.energy,
            kind: self.kind.into(),
            state: QuantumState::new(self.n, self.m, sys.flux_xi),
            residual: self.residual,
            principal: self.principal,
            oracle_dev: self.has_oracle_dev.then_some(self.oracle_dev),
        }
    }
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn kgpho_version() -> *const c_char {
    VERSION.as_ptr()
}

/// Message of the last failed call on this thread, or an empty string.
/// Valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn kgpho_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a system. `*out` receives a handle to release with
/// [`kgpho_system_free`].
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn kgpho_system_new(
    v0: f64,
    rho0: f64,
    b_field: f64,
    flux_xi: f64,
    out: *mut *mut KgphoSystem,
) -> KgphoStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = PhysicalSystem::new(v0, rho0, b_field, flux_xi).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(KgphoSystem { inner }));
        Ok(())
    })
}

/// # Safety
/// `sys` must come from [`kgpho_system_new`] and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn kgpho_system_free(sys: *mut KgphoSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Principal level of `(n, m)`.
///
/// # Safety
/// `sys` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kgpho_solve(
    sys: *const KgphoSystem,
    n: u32,
    m: i32,
    method: KgphoMethod,
    out: *mut KgphoLevel,
) -> KgphoStatus {
    guard(|| {
        let sys = &deref(sys, "sys")?.inner;
        if out.is_null() {
            return Err(null("out"));
        }
        let level = principal_level(sys, &sys.state(n, m), method_of(method)).map_err(lib_err)?;
        *out = KgphoLevel::from(&level);
        Ok(())
    })
}

/// Every root of the relativistic equation for `(n, m)`. `method` must be
/// `Positive` or `Negative`. `*count` receives the number of roots; at most
/// `capacity` are written to `out`, and `BufferTooSmall` is returned when
/// that is fewer than `*count`. `out` may be null when `capacity` is 0.
///
/// # Safety
/// `sys` must be a live handle, `count` valid for writes and `out` valid
/// for `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn kgpho_solve_all(
    sys: *const KgphoSystem,
    n: u32,
    m: i32,
    method: KgphoMethod,
    out: *mut KgphoLevel,
    capacity: usize,
    count: *mut usize,
) -> KgphoStatus {
    guard(|| {
        let sys = &deref(sys, "sys")?.inner;
        if count.is_null() {
            return Err(null("count"));
        }
        if out.is_null() && capacity > 0 {
            return Err(null("out"));
        }
        let branch = match method {
            KgphoMethod::Positive => Branch::Positive,
            KgphoMethod::Negative => Branch::Negative,
            other => {
                return Err((
                    KgphoStatus::InvalidArgument,
                    format!("solve_all needs the positive or negative method, got {other:?}"),
                ))
            }
        };
        let levels = solve_kg_energy(sys, &sys.state(n, m), branch).map_err(lib_err)?;
        *count = levels.len();
        for (i, l) in levels.iter().take(capacity).enumerate() {
            *out.add(i) = KgphoLevel::from(l);
        }
        if capacity < levels.len() {
            return Err((
                KgphoStatus::BufferTooSmall,
                format!("{} roots, capacity {capacity}", levels.len()),
            ));
        }
        Ok(())
    })
}

/// Checks `level` against the finite-difference oracle and stores the
/// relative deviation in it. `grid_n = 0` and `tol <= 0` select defaults.
/// Returns `VerificationFailed` when the deviation exceeds `tol`.
/// `convergence_ratio` may be null; the value written is NaN when the
/// refinement differences are at rounding level.
///
/// # Safety
/// `sys` must be a live handle and `level` valid for reads and writes.
#[no_mangle]
pub unsafe extern "C" fn kgpho_verify_level(
    sys: *const KgphoSystem,
    level: *mut KgphoLevel,
    grid_n: usize,
    tol: f64,
    convergence_ratio: *mut f64,
) -> KgphoStatus {
    guard(|| {
        let sys = &deref(sys, "sys")?.inner;
        let slot = level.as_mut().ok_or_else(|| null("level"))?;
        let mut cfg = OracleConfig::default();
        if grid_n > 0 {
            cfg.n_points = grid_n;
        }
        if tol > 0.0 {
            cfg.tol = tol;
        }
        let mut lvl = slot.to_level(sys);
        let v = verify_level(sys, &mut lvl, &cfg).map_err(lib_err)?;
        *slot = KgphoLevel::from(&lvl);
        if let Some(r) = convergence_ratio.as_mut() {
            *r = v.convergence_ratio;
        }
        if !(v.deviation <= cfg.tol) {
            return Err((
                KgphoStatus::VerificationFailed,
                format!("deviation {} exceeds tolerance {}", v.deviation, cfg.tol),
            ));
        }
        Ok(())
    })
}

/// Normalized radial function with explicit `(n, β, γ)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kgpho_wavefunction_new(
    n: u32,
    beta: f64,
    gamma: f64,
    out: *mut *mut KgphoWaveFunction,
) -> KgphoStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = RadialWaveFunction::new(n, beta, gamma).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(KgphoWaveFunction { inner }));
        Ok(())
    })
}

/// Radial function belonging to a solved level.
///
/// # Safety
/// `sys` must be a live handle, `level` valid for reads and `out` for writes.
#[no_mangle]
pub unsafe extern "C" fn kgpho_wavefunction_for_level(
    sys: *const KgphoSystem,
    level: *const KgphoLevel,
    out: *mut *mut KgphoWaveFunction,
) -> KgphoStatus {
    guard(|| {
        let sys = &deref(sys, "sys")?.inner;
        let level = deref(level, "level")?.to_level(sys);
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = RadialWaveFunction::for_level(sys, &level).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(KgphoWaveFunction { inner }));
        Ok(())
    })
}

/// `g(r)`; `r` must be finite and non-negative.
///
/// # Safety
/// `wf` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kgpho_wavefunction_eval(
    wf: *const KgphoWaveFunction,
    r: f64,
    out: *mut f64,
) -> KgphoStatus {
    guard(|| {
        let wf = &deref(wf, "wf")?.inner;
        if out.is_null() {
            return Err(null("out"));
        }
        if !(r >= 0.0 && r.is_finite()) {
            return Err((KgphoStatus::InvalidArgument, format!("r = {r} must be finite and >= 0")));
        }
        *out = wf.eval(r);
        Ok(())
    })
}

/// Parameters of a wave function. Any output pointer may be null.
///
/// # Safety
/// `wf` must be a live handle; non-null outputs must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kgpho_wavefunction_params(
    wf: *const KgphoWaveFunction,
    n: *mut u32,
    beta: *mut f64,
    gamma: *mut f64,
    norm: *mut f64,
) -> KgphoStatus {
    guard(|| {
        let wf = &deref(wf, "wf")?.inner;
        if let Some(p) = n.as_mut() {
            *p = wf.n;
        }
        if let Some(p) = beta.as_mut() {
            *p = wf.beta;
        }
        if let Some(p) = gamma.as_mut() {
            *p = wf.gamma;
        }
        if let Some(p) = norm.as_mut() {
            *p = wf.norm;
        }
        Ok(())
    })
}

/// # Safety
/// `wf` must come from a `kgpho_wavefunction_*` constructor. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn kgpho_wavefunction_free(wf: *mut KgphoWaveFunction) {
    if !wf.is_null() {
        drop(Box::from_raw(wf));
    }
}

/// Generalized Laguerre polynomial `L_n^(alpha)(x)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kgpho_laguerre(n: u32, alpha: f64, x: f64, out: *mut f64) -> KgphoStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = kgpho::specfun::laguerre(n, alpha, x).map_err(lib_err)?;
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guard_catches_panics() {
        let s = guard(|| panic!("boom"));
        assert_eq!(s, KgphoStatus::Panic);
        let msg = unsafe { CStr::from_ptr(kgpho_last_error_message()) };
        assert!(msg.to_str().unwrap().contains("boom"));
        assert_eq!(guard(|| Ok(())), KgphoStatus::Ok);
        let msg = unsafe { CStr::from_ptr(kgpho_last_error_message()) };
        assert!(msg.to_bytes().is_empty());
    }

    #[test]
    fn kind_round_trip() {
        for k in LevelKind::ALL {
            assert_eq!(LevelKind::from(KgphoLevelKind::from(k)), k);
        }
    }

    #[test]
    fn version_matches_crate() {
        let v = unsafe { CStr::from_ptr(kgpho_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }

    #[test]
    fn interior_nul_is_replaced() {
        set_error("a\0b");
        let msg = unsafe { CStr::from_ptr(kgpho_last_error_message()) };
        assert_eq!(msg.to_str().unwrap(), "a b");
    }
}
