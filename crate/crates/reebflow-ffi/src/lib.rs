//! C ABI for the reebflow library.
//!
//! Conventions:
//!
//! - Handles (`ReebflowLink`, `ReebflowSoliton`) are opaque; create them
//!   with `*_new` and release them with `*_free`.
//! - Functions return a [`ReebflowStatus`]; outputs go through pointers.
//! - On any non-OK status, `reebflow_last_error_message` returns a
//!   human-readable description (thread-local, valid until the next call
//!   on the same thread).
//! - Array arguments are `pointer + length`; the caller owns all buffers.

use std::cell::RefCell;
use std::ffi::{c_char, CString};

use reebflow::entropy::{best_fit_a, entropy_volume_bound, w_link, EntropyDatum};
use reebflow::flow::{minimize_volume_with_guard, run_flow, FlowOptions};
use reebflow::reeb::{normalize_to_slice, HyperplaneSlice, ReebVector, TangentVector};
use reebflow::soliton::{soliton_metric, soliton_residual, solve_soliton, SolitonMetric};
use reebflow::volume::{futaki, volume_report};
use reebflow::{Error, MomentumProfile, WeightedSphereLink};

/// Status codes returned by every fallible entry point.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReebflowStatus {
    Ok = 0,
    /// Null pointer, bad length, non-finite number, malformed input.
    InvalidArgument = 1,
    /// The Reeb vector is outside the (open) Reeb cone.
    NotInCone = 2,
    /// Too close to the cone boundary for the requested operation.
    BoundaryProximity = 3,
    /// An iteration failed to converge or a quadrature node blew up.
    NumericalFailure = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(message: &str) {
    let sanitized = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = sanitized);
}

fn status_of(err: &Error) -> ReebflowStatus {
    match err {
        Error::NotInCone { .. } | Error::NonPositiveCharge { .. } => ReebflowStatus::NotInCone,
        Error::BoundaryProximity { .. }
        | Error::BoundaryGuardTrip { .. }
        | Error::SingularNode { .. } => ReebflowStatus::BoundaryProximity,
        Error::StepFailure { .. }
        | Error::NewtonStalled { .. }
        | Error::BracketFailure { .. }
        | Error::NonPositiveProfile { .. } => ReebflowStatus::NumericalFailure,
        _ => ReebflowStatus::InvalidArgument,
    }
}

fn fail(err: &Error) -> ReebflowStatus {
    set_error(&err.to_string());
    status_of(err)
}

fn invalid(message: &str) -> ReebflowStatus {
    set_error(message);
    ReebflowStatus::InvalidArgument
}

/// Last error message for this thread; empty string if none.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn reebflow_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Opaque quadrature context for the weighted sphere `S^{2n+1}`.
pub struct ReebflowLink {
    link: WeightedSphereLink,
    guard: f64,
}

/// Create a link context. `points = 0` selects the per-dimension default
/// rule resolution and `mc_samples = 0` keeps the default sample count.
/// Returns null if `n` is outside `1..=3`.
#[no_mangle]
pub extern "C" fn reebflow_link_new(
    n: usize,
    points: usize,
    mc_samples: u64,
    mc_seed: u64,
) -> *mut ReebflowLink {
    if !(1..=3).contains(&n) || points > 4096 {
        set_error("reebflow_link_new: n must be in 1..=3 and points <= 4096");
        return std::ptr::null_mut();
    }
    let mut link = if points == 0 {
        WeightedSphereLink::new(n)
    } else {
        WeightedSphereLink::with_rule(n, points.max(4))
    };
    if mc_samples > 0 {
        link.set_mc_samples(mc_samples);
    }
    link.set_mc_seed(mc_seed);
    Box::into_raw(Box::new(ReebflowLink { link, guard: 1e-6 }))
}

/// Release a link context; null is accepted.
///
/// # Safety
/// `link` must come from `reebflow_link_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn reebflow_link_free(link: *mut ReebflowLink) {
    if !link.is_null() {
        drop(Box::from_raw(link));
    }
}

/// Plain-struct volume report; the gradient is returned separately.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ReebflowVolumeReport {
    pub volume: f64,
    pub relative_volume: f64,
    pub grad_norm: f64,
    /// min_i a_i, the distance proxy to the cone boundary.
    pub min_pairing: f64,
}

unsafe fn slice_arg<'a>(ptr: *const f64, len: usize) -> Option<&'a [f64]> {
    if ptr.is_null() || len < 2 {
        None
    } else {
        Some(std::slice::from_raw_parts(ptr, len))
    }
}

/// Volume report at the Reeb vector `reeb[0..len]` (`len = n + 1`).
/// If `grad_out` is non-null it receives the `len` slice-tangent gradient
/// components.
///
/// # Safety
/// `reeb` must point to `len` doubles; `grad_out` must be null or point to
/// `len` writable doubles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn reebflow_volume(
    link: *const ReebflowLink,
    reeb: *const f64,
    len: usize,
    out: *mut ReebflowVolumeReport,
    grad_out: *mut f64,
) -> ReebflowStatus {
    let Some(ctx) = link.as_ref() else {
        return invalid("reebflow_volume: null link");
    };
    let Some(coeffs) = slice_arg(reeb, len) else {
        return invalid("reebflow_volume: null or too-short reeb array");
    };
    if out.is_null() {
        return invalid("reebflow_volume: null out pointer");
    }
    let xi = match ReebVector::new(coeffs.to_vec()) {
        Ok(v) => v,
        Err(e) => return fail(&e),
    };
    match volume_report(&ctx.link, &xi) {
        Ok(r) => {
            *out = ReebflowVolumeReport {
                volume: r.volume,
                relative_volume: r.relative_volume,
                grad_norm: r.grad_norm,
                min_pairing: r.min_pairing,
            };
            if !grad_out.is_null() {
                std::slice::from_raw_parts_mut(grad_out, len).copy_from_slice(&r.grad);
            }
            ReebflowStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Futaki invariant at `reeb` against the tangent direction `y`
/// (components of `y` must sum to zero).
///
/// # Safety
/// `reeb` and `y` must point to `len` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn reebflow_futaki(
    link: *const ReebflowLink,
    reeb: *const f64,
    y: *const f64,
    len: usize,
    out: *mut f64,
) -> ReebflowStatus {
    let Some(ctx) = link.as_ref() else {
        return invalid("reebflow_futaki: null link");
    };
    let (Some(coeffs), Some(dir)) = (slice_arg(reeb, len), slice_arg(y, len)) else {
        return invalid("reebflow_futaki: null or too-short array");
    };
    if out.is_null() {
        return invalid("reebflow_futaki: null out pointer");
    }
    let result = ReebVector::new(coeffs.to_vec()).and_then(|xi| {
        let ty = TangentVector::new(dir.to_vec(), 1e-10)?;
        futaki(&ctx.link, &xi, &ty)
    });
    match result {
        Ok(v) => {
            *out = v;
            ReebflowStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Damped-Newton volume minimizer from `start` (normalized to the slice
/// first); writes the minimizing Reeb vector into `out[0..len]`.
///
/// # Safety
/// `start` must point to `len` doubles and `out` to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn reebflow_minimize(
    link: *const ReebflowLink,
    start: *const f64,
    len: usize,
    out: *mut f64,
) -> ReebflowStatus {
    let Some(ctx) = link.as_ref() else {
        return invalid("reebflow_minimize: null link");
    };
    let Some(coeffs) = slice_arg(start, len) else {
        return invalid("reebflow_minimize: null or too-short start array");
    };
    if out.is_null() {
        return invalid("reebflow_minimize: null out pointer");
    }
    let result = ReebVector::new(coeffs.to_vec()).and_then(|raw| {
        let slice = HyperplaneSlice::standard(raw.n());
        let start = normalize_to_slice(&raw, &slice)?;
        minimize_volume_with_guard(&ctx.link, &start, ctx.guard)
    });
    match result {
        Ok(min) => {
            std::slice::from_raw_parts_mut(out, len).copy_from_slice(min.coeffs());
            ReebflowStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Integrate the volume-decreasing flow from `start`; writes the final
/// Reeb vector into `out_final[0..len]` and the number of recorded states
/// into `out_states` (both may be null if unwanted).
///
/// # Safety
/// `start` must point to `len` doubles; `out_final` must be null or point
/// to `len` writable doubles; `out_states` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn reebflow_flow(
    link: *const ReebflowLink,
    start: *const f64,
    len: usize,
    dt0: f64,
    grad_tol: f64,
    t_max: f64,
    out_final: *mut f64,
    out_states: *mut usize,
) -> ReebflowStatus {
    let Some(ctx) = link.as_ref() else {
        return invalid("reebflow_flow: null link");
    };
    let Some(coeffs) = slice_arg(start, len) else {
        return invalid("reebflow_flow: null or too-short start array");
    };
    if !(dt0 > 0.0 && grad_tol > 0.0 && t_max > 0.0) {
        return invalid("reebflow_flow: dt0, grad_tol and t_max must be positive");
    }
    let opts = FlowOptions {
        dt0,
        grad_tol,
        t_max,
        boundary_guard: ctx.guard,
        attach_mu: false,
    };
    let result = ReebVector::new(coeffs.to_vec()).and_then(|raw| {
        let slice = HyperplaneSlice::standard(raw.n());
        let start = normalize_to_slice(&raw, &slice)?;
        run_flow(&ctx.link, &start, &opts)
    });
    match result {
        Ok(traj) => {
            if !out_final.is_null() {
                std::slice::from_raw_parts_mut(out_final, len)
                    .copy_from_slice(traj.final_reeb().coeffs());
            }
            if !out_states.is_null() {
                *out_states = traj.states.len();
            }
            ReebflowStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Opaque solved soliton (profile plus attached metric data).
pub struct ReebflowSoliton {
    profile: MomentumProfile,
    metric: SolitonMetric,
}

/// Headline numbers of a solved soliton profile.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ReebflowSolitonSummary {
    /// Soliton potential slope: f(x) = b x + const.
    pub b: f64,
    pub x_max: f64,
    pub lambda: f64,
    /// Minimum transverse curvature over the grid.
    pub kt_min: f64,
    /// Sup-norm ODE residual over the grid.
    pub residual: f64,
    /// Link entropy of the soliton.
    pub mu: f64,
}

/// Solve the n = 1 soliton for weights `(a0, a1)`; null on failure.
#[no_mangle]
pub extern "C" fn reebflow_soliton_new(a0: f64, a1: f64) -> *mut ReebflowSoliton {
    match solve_soliton(a0, a1).and_then(|profile| {
        let metric = soliton_metric(a0, a1)?;
        Ok(ReebflowSoliton { profile, metric })
    }) {
        Ok(s) => Box::into_raw(Box::new(s)),
        Err(e) => {
            set_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// Release a soliton handle; null is accepted.
///
/// # Safety
/// `soliton` must come from `reebflow_soliton_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn reebflow_soliton_free(soliton: *mut ReebflowSoliton) {
    if !soliton.is_null() {
        drop(Box::from_raw(soliton));
    }
}

/// Fill the summary struct for a solved soliton.
///
/// # Safety
/// `soliton` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn reebflow_soliton_summary(
    soliton: *const ReebflowSoliton,
    out: *mut ReebflowSolitonSummary,
) -> ReebflowStatus {
    let Some(s) = soliton.as_ref() else {
        return invalid("reebflow_soliton_summary: null soliton");
    };
    if out.is_null() {
        return invalid("reebflow_soliton_summary: null out pointer");
    }
    let kt_min = s
        .profile
        .grid()
        .iter()
        .map(|&x| s.profile.curvature_at(x))
        .fold(f64::INFINITY, f64::min);
    let mu = match w_link(&EntropyDatum::soliton(s.metric.clone())) {
        Ok(v) => v,
        Err(e) => return fail(&e),
    };
    *out = ReebflowSolitonSummary {
        b: s.profile.b(),
        x_max: s.profile.x_max(),
        lambda: s.profile.lambda(),
        kt_min,
        residual: soliton_residual(&s.profile),
        mu,
    };
    ReebflowStatus::Ok
}

/// Number of grid samples held by a soliton handle.
///
/// # Safety
/// `soliton` must be a live handle (null returns 0).
#[no_mangle]
pub unsafe extern "C" fn reebflow_soliton_grid_len(soliton: *const ReebflowSoliton) -> usize {
    soliton.as_ref().map_or(0, |s| s.profile.grid().len())
}

/// Copy the profile samples into caller buffers of capacity `cap`.
/// Any of `xs`, `phis`, `kts`, `fs` may be null to skip that column.
///
/// # Safety
/// Non-null buffers must hold at least `cap` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn reebflow_soliton_copy_grid(
    soliton: *const ReebflowSoliton,
    xs: *mut f64,
    phis: *mut f64,
    kts: *mut f64,
    fs: *mut f64,
    cap: usize,
) -> ReebflowStatus {
    let Some(s) = soliton.as_ref() else {
        return invalid("reebflow_soliton_copy_grid: null soliton");
    };
    let len = s.profile.grid().len();
    if cap < len {
        return invalid("reebflow_soliton_copy_grid: capacity below grid length");
    }
    for (i, (&x, &phi)) in s.profile.grid().iter().zip(s.profile.phi()).enumerate() {
        if !xs.is_null() {
            *xs.add(i) = x;
        }
        if !phis.is_null() {
            *phis.add(i) = phi;
        }
        if !kts.is_null() {
            *kts.add(i) = s.profile.curvature_at(x);
        }
        if !fs.is_null() {
            *fs.add(i) = s.metric.f_at(x);
        }
    }
    ReebflowStatus::Ok
}

/// Entropy report for one weight pair.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ReebflowEntropyReport {
    /// Link volume at the slice-normalized weights.
    pub v: f64,
    /// W entropy of the soliton datum.
    pub w: f64,
    /// mu entropy (equals W at the soliton minimizer).
    pub mu: f64,
    /// Best-fit constant of the minimizer equation.
    pub a: f64,
    /// 1 iff V >= exp(mu/(4(n+1)) - 2n).
    pub bound_ok: i32,
}

/// Soliton entropy data for weights `(a0, a1)` at n = 1.
///
/// # Safety
/// `link` must be a live n = 1 link handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn reebflow_entropy(
    link: *const ReebflowLink,
    a0: f64,
    a1: f64,
    out: *mut ReebflowEntropyReport,
) -> ReebflowStatus {
    let Some(ctx) = link.as_ref() else {
        return invalid("reebflow_entropy: null link");
    };
    if ctx.link.n() != 1 {
        return invalid("reebflow_entropy: entropy data needs an n = 1 link");
    }
    if out.is_null() {
        return invalid("reebflow_entropy: null out pointer");
    }
    let result = (|| {
        let metric = soliton_metric(a0, a1)?;
        let (w0, w1) = metric.profile().slice_weights();
        let v = reebflow::volume::volume(&ctx.link, &ReebVector::new(vec![w0, w1])?)?;
        let datum = EntropyDatum::soliton(metric);
        let w = w_link(&datum)?;
        let a = best_fit_a(&datum)?;
        Ok::<_, Error>((v, w, a))
    })();
    match result {
        Ok((v, w, a)) => {
            *out = ReebflowEntropyReport {
                v,
                w,
                mu: w,
                a,
                bound_ok: entropy_volume_bound(v, w, 1) as i32,
            };
            ReebflowStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn link_lifecycle_and_volume() {
        let link = reebflow_link_new(1, 0, 10_000, 7);
        assert!(!link.is_null());
        let reeb = [1.0, 2.0];
        let mut grad = [0.0; 2];
        let mut report = ReebflowVolumeReport {
            volume: 0.0,
            relative_volume: 0.0,
            grad_norm: 0.0,
            min_pairing: 0.0,
        };
        let status =
            unsafe { reebflow_volume(link, reeb.as_ptr(), 2, &mut report, grad.as_mut_ptr()) };
        assert_eq!(status, ReebflowStatus::Ok);
        let pi = std::f64::consts::PI;
        assert!((report.volume - pi * pi).abs() < 1e-9);
        assert!((report.relative_volume - 0.5).abs() < 1e-10);
        assert!((grad[0] + grad[1]).abs() < 1e-12);
        unsafe { reebflow_link_free(link) };
    }

    #[test]
    fn bad_inputs_set_the_error_message() {
        let link = reebflow_link_new(1, 0, 10_000, 7);
        let reeb = [-1.0, 2.0];
        let mut report = ReebflowVolumeReport {
            volume: 0.0,
            relative_volume: 0.0,
            grad_norm: 0.0,
            min_pairing: 0.0,
        };
        let status =
            unsafe { reebflow_volume(link, reeb.as_ptr(), 2, &mut report, std::ptr::null_mut()) };
        assert_eq!(status, ReebflowStatus::NotInCone);
        let msg = unsafe {
            std::ffi::CStr::from_ptr(reebflow_last_error_message())
                .to_string_lossy()
                .into_owned()
        };
        assert!(msg.contains("Reeb cone"), "message: {msg}");
        unsafe { reebflow_link_free(link) };
    }

    #[test]
    fn minimize_lands_on_the_symmetric_point() {
        let link = reebflow_link_new(2, 0, 10_000, 7);
        let start = [0.5, 1.0, 1.5];
        let mut out = [0.0; 3];
        let status = unsafe { reebflow_minimize(link, start.as_ptr(), 3, out.as_mut_ptr()) };
        assert_eq!(status, ReebflowStatus::Ok);
        for a in out {
            assert!((a - 1.0).abs() < 1e-7);
        }
        unsafe { reebflow_link_free(link) };
    }

    #[test]
    fn flow_reaches_the_critical_point() {
        let link = reebflow_link_new(1, 0, 10_000, 7);
        let start = [0.5, 1.5];
        let mut fin = [0.0; 2];
        let mut states = 0usize;
        let status = unsafe {
            reebflow_flow(
                link,
                start.as_ptr(),
                2,
                0.01,
                1e-8,
                1e3,
                fin.as_mut_ptr(),
                &mut states,
            )
        };
        assert_eq!(status, ReebflowStatus::Ok);
        assert!(states > 1);
        assert!((fin[0] - 1.0).abs() < 1e-6 && (fin[1] - 1.0).abs() < 1e-6);
        unsafe { reebflow_link_free(link) };
    }

    #[test]
    fn soliton_handle_roundtrip() {
        let s = reebflow_soliton_new(1.0, 2.0);
        assert!(!s.is_null());
        let mut summary = ReebflowSolitonSummary {
            b: 0.0,
            x_max: 0.0,
            lambda: 0.0,
            kt_min: 0.0,
            residual: 0.0,
            mu: 0.0,
        };
        let status = unsafe { reebflow_soliton_summary(s, &mut summary) };
        assert_eq!(status, ReebflowStatus::Ok);
        assert!(summary.b > 0.0);
        assert!(summary.kt_min > 0.0);
        assert!(summary.residual < 1e-10);
        assert_eq!(summary.lambda, 8.0);

        let len = unsafe { reebflow_soliton_grid_len(s) };
        assert!(len >= 9);
        let mut xs = vec![0.0; len];
        let mut phis = vec![0.0; len];
        let status = unsafe {
            reebflow_soliton_copy_grid(
                s,
                xs.as_mut_ptr(),
                phis.as_mut_ptr(),
                std::ptr::null_mut(),
                std::ptr::null_mut(),
                len,
            )
        };
        assert_eq!(status, ReebflowStatus::Ok);
        assert_eq!(xs[0], 0.0);
        assert!((xs[len - 1] - summary.x_max).abs() < 1e-15);
        assert!(phis[1] > 0.0);
        unsafe { reebflow_soliton_free(s) };

        assert!(reebflow_soliton_new(-1.0, 2.0).is_null());
    }

    #[test]
    fn entropy_report_satisfies_the_bound() {
        let link = reebflow_link_new(1, 0, 10_000, 7);
        let mut out = ReebflowEntropyReport {
            v: 0.0,
            w: 0.0,
            mu: 0.0,
            a: 0.0,
            bound_ok: 0,
        };
        let status = unsafe { reebflow_entropy(link, 1.0, 1.0, &mut out) };
        assert_eq!(status, ReebflowStatus::Ok);
        let pi = std::f64::consts::PI;
        assert!((out.v - 2.0 * pi * pi).abs() < 1e-8);
        let expect = 6.0 + 8.0 * (2.0 * pi * pi).ln();
        assert!((out.mu - expect).abs() < 1e-8);
        assert!((out.a - out.mu).abs() < 1e-6);
        assert_eq!(out.bound_ok, 1);
        unsafe { reebflow_link_free(link) };
    }
}
