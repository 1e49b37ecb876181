//! C ABI for the rodwheel dynamics library.
//!
//! Handles are opaque; every entry point takes/returns plain C types and
//! reports failures through [`RwStatus`]. States are length-10 arrays in the
//! canonical order `(c1, c2, phi, theta, psi, beta, dphi, dtheta, dpsi,
//! dbeta)`. The header `include/rodwheel.h` is generated by cbindgen at
//! build time.
//!
//! Ownership: everything returned as a pointer is freed by the matching
//! `rw_*_free`; out-parameters are caller-allocated.

use std::ffi::c_char;

use rodwheel::control::{ControlLaw, ControllerSpec, Gains};
use rodwheel::eom::{self, State};
use rodwheel::kinematics::Params;
use rodwheel::sim::{self, Scenario, Trajectory};

/// Status code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RwStatus {
    Ok = 0,
    /// A required pointer was null.
    NullPointer = 1,
    /// A value such as a parameter, step size or index was out of range.
    InvalidArgument = 2,
    /// The mass-matrix solve failed (configuration at or near θ = ±π/2).
    SingularMass = 3,
}

/// Controller selection for `rw_simulate` / `rw_control_torque`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RwControllerKind {
    None = 0,
    Case1 = 1,
    Case2 = 2,
    /// Gains supplied through `RwGains`.
    Custom = 3,
}

/// Gains of the generalized rod-balance law
/// `u = k_p(beta - beta0) + k_d*dbeta + k_theta*|theta|` with
/// `beta0 = amplitude * tanh(v_ref - dphi)`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RwGains {
    pub k_p: f64,
    pub k_d: f64,
    pub k_theta: f64,
    pub amplitude: f64,
    pub v_ref: f64,
}

/// Opaque physical model (parameters).
pub struct RwModel {
    params: Params,
}

/// Opaque recorded trajectory.
pub struct RwTrajectory {
    inner: Trajectory,
}

const VERSION: &[u8] = concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes();

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rw_version() -> *const c_char {
    VERSION.as_ptr() as *const c_char
}

/// New model with the reference parameter set
/// `(m, g, r, mu, ell) = (5, 9.81, 1, 1, 2)` and the physical potential.
#[no_mangle]
pub extern "C" fn rw_model_default() -> *mut RwModel {
    Box::into_raw(Box::new(RwModel {
        params: Params::default_set(),
    }))
}

/// New model from explicit parameters; all five must be strictly positive.
/// Returns null on invalid input. `legacy_potential` drops the gravity
/// factor on the rod potential term (the convention the tuned controller
/// gains assume).
#[no_mangle]
pub extern "C" fn rw_model_new(
    m: f64,
    g: f64,
    r: f64,
    mu: f64,
    ell: f64,
    legacy_potential: bool,
) -> *mut RwModel {
    match Params::new(m, g, r, mu, ell) {
        Ok(params) => Box::into_raw(Box::new(RwModel {
            params: params.with_legacy_potential(legacy_potential),
        })),
        Err(_) => std::ptr::null_mut(),
    }
}

/// Free a model. Null is ignored.
///
/// # Safety
/// `model` must come from `rw_model_new`/`rw_model_default` and not have
/// been freed already.
#[no_mangle]
pub unsafe extern "C" fn rw_model_free(model: *mut RwModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

unsafe fn read_state(state: *const f64) -> State {
    let mut x = [0.0; 10];
    std::ptr::copy_nonoverlapping(state, x.as_mut_ptr(), 10);
    State::from_array(x)
}

fn controller_of(kind: RwControllerKind, gains: *const RwGains) -> Option<ControllerSpec> {
    let law = match kind {
        RwControllerKind::None => ControlLaw::None,
        RwControllerKind::Case1 => ControlLaw::Case1,
        RwControllerKind::Case2 => ControlLaw::Case2,
        RwControllerKind::Custom => {
            if gains.is_null() {
                return None;
            }
            let g = unsafe { *gains };
            ControlLaw::Custom(Gains {
                k_p: g.k_p,
                k_d: g.k_d,
                k_theta: g.k_theta,
                amplitude: g.amplitude,
                v_ref: g.v_ref,
            })
        }
    };
    Some(ControllerSpec { law, u_max: None })
}

/// State derivative `xdot = f(x, u)`; `state` and `out_xdot` are length 10.
///
/// # Safety
/// `model` must be a live model handle; `state` must point at 10 readable
/// doubles and `out_xdot` at 10 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn rw_forward_dynamics(
    model: *const RwModel,
    state: *const f64,
    u: f64,
    out_xdot: *mut f64,
) -> RwStatus {
    if model.is_null() || state.is_null() || out_xdot.is_null() {
        return RwStatus::NullPointer;
    }
    let x = read_state(state);
    match eom::forward_dynamics(&x, u, &(*model).params) {
        Ok(xdot) => {
            std::ptr::copy_nonoverlapping(xdot.as_ptr(), out_xdot, 10);
            RwStatus::Ok
        }
        Err(eom::DynamicsError::NonFiniteInput) => RwStatus::InvalidArgument,
        Err(_) => RwStatus::SingularMass,
    }
}

/// Ground-reaction multipliers `(lambda1, lambda2)`; `out_lambda` is length 2.
///
/// # Safety
/// As `rw_forward_dynamics`, with `out_lambda` pointing at 2 doubles.
#[no_mangle]
pub unsafe extern "C" fn rw_ground_reaction(
    model: *const RwModel,
    state: *const f64,
    u: f64,
    out_lambda: *mut f64,
) -> RwStatus {
    if model.is_null() || state.is_null() || out_lambda.is_null() {
        return RwStatus::NullPointer;
    }
    let x = read_state(state);
    match eom::ground_reaction(&x, u, &(*model).params) {
        Ok((l1, l2)) => {
            *out_lambda = l1;
            *out_lambda.add(1) = l2;
            RwStatus::Ok
        }
        Err(eom::DynamicsError::NonFiniteInput) => RwStatus::InvalidArgument,
        Err(_) => RwStatus::SingularMass,
    }
}

/// Total mechanical energy of a state, with the center velocity
/// reconstructed from the rolling constraints.
///
/// # Safety
/// `model` live, `state` 10 readable doubles, `out_energy` writable.
#[no_mangle]
pub unsafe extern "C" fn rw_total_energy(
    model: *const RwModel,
    state: *const f64,
    out_energy: *mut f64,
) -> RwStatus {
    if model.is_null() || state.is_null() || out_energy.is_null() {
        return RwStatus::NullPointer;
    }
    let x = read_state(state);
    *out_energy = rodwheel::total_energy(&x, &(*model).params);
    RwStatus::Ok
}

/// Evaluate a feedback law at a state.
///
/// # Safety
/// `state` must point at 10 readable doubles and `out_u` be writable;
/// `gains` must be readable when `kind == Custom` (ignored otherwise).
#[no_mangle]
pub unsafe extern "C" fn rw_control_torque(
    kind: RwControllerKind,
    gains: *const RwGains,
    state: *const f64,
    out_u: *mut f64,
) -> RwStatus {
    if state.is_null() || out_u.is_null() {
        return RwStatus::NullPointer;
    }
    let Some(controller) = controller_of(kind, gains) else {
        return RwStatus::NullPointer;
    };
    *out_u = controller.torque(&read_state(state));
    RwStatus::Ok
}

/// Advance one fixed step of the second-order scheme with the torque held.
///
/// # Safety
/// As `rw_forward_dynamics`; `out_state` must point at 10 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn rw_rk2_step(
    model: *const RwModel,
    state: *const f64,
    u: f64,
    dt: f64,
    out_state: *mut f64,
) -> RwStatus {
    if model.is_null() || state.is_null() || out_state.is_null() {
        return RwStatus::NullPointer;
    }
    if !dt.is_finite() || dt <= 0.0 {
        return RwStatus::InvalidArgument;
    }
    let x = read_state(state);
    match sim::rk2_step(&x, u, dt, &(*model).params) {
        Ok(next) => {
            std::ptr::copy_nonoverlapping(next.to_array().as_ptr(), out_state, 10);
            RwStatus::Ok
        }
        Err(eom::DynamicsError::NonFiniteInput) => RwStatus::InvalidArgument,
        Err(_) => RwStatus::SingularMass,
    }
}

/// Run a closed-loop simulation and hand back an owned trajectory handle.
///
/// A run that ends in a fall still returns `Ok` with a trajectory; query
/// `rw_trajectory_fell` / `rw_trajectory_fall_time`.
///
/// # Safety
/// `model` live, `x0` 10 readable doubles, `out_trajectory` a writable
/// pointer slot; `gains` readable when `kind == Custom`.
#[no_mangle]
pub unsafe extern "C" fn rw_simulate(
    model: *const RwModel,
    x0: *const f64,
    kind: RwControllerKind,
    gains: *const RwGains,
    dt: f64,
    duration: f64,
    out_trajectory: *mut *mut RwTrajectory,
) -> RwStatus {
    if model.is_null() || x0.is_null() || out_trajectory.is_null() {
        return RwStatus::NullPointer;
    }
    let Some(controller) = controller_of(kind, gains) else {
        return RwStatus::NullPointer;
    };
    let scenario = Scenario {
        params: (*model).params,
        x0: read_state(x0),
        controller,
        dt,
        duration,
    };
    match sim::simulate(&scenario) {
        Ok(inner) => {
            *out_trajectory = Box::into_raw(Box::new(RwTrajectory { inner }));
            RwStatus::Ok
        }
        Err(_) => RwStatus::InvalidArgument,
    }
}

/// Number of recorded samples.
///
/// # Safety
/// `trajectory` must be a live trajectory handle.
#[no_mangle]
pub unsafe extern "C" fn rw_trajectory_len(trajectory: *const RwTrajectory) -> usize {
    if trajectory.is_null() {
        return 0;
    }
    (*trajectory).inner.samples.len()
}

/// Copy out sample `index`: time, the 10 state components, held torque,
/// total energy and the two multipliers. Any out-pointer may be null to
/// skip that field.
///
/// # Safety
/// `trajectory` live; non-null out-pointers must be writable (`out_state`
/// spans 10 doubles, `out_lambda` 2).
#[no_mangle]
pub unsafe extern "C" fn rw_trajectory_sample(
    trajectory: *const RwTrajectory,
    index: usize,
    out_t: *mut f64,
    out_state: *mut f64,
    out_u: *mut f64,
    out_energy: *mut f64,
    out_lambda: *mut f64,
) -> RwStatus {
    if trajectory.is_null() {
        return RwStatus::NullPointer;
    }
    let samples = &(*trajectory).inner.samples;
    let Some(s) = samples.get(index) else {
        return RwStatus::InvalidArgument;
    };
    if !out_t.is_null() {
        *out_t = s.t;
    }
    if !out_state.is_null() {
        std::ptr::copy_nonoverlapping(s.state.to_array().as_ptr(), out_state, 10);
    }
    if !out_u.is_null() {
        *out_u = s.u;
    }
    if !out_energy.is_null() {
        *out_energy = s.energy;
    }
    if !out_lambda.is_null() {
        *out_lambda = s.lambda1;
        *out_lambda.add(1) = s.lambda2;
    }
    RwStatus::Ok
}

/// Whether the run ended in a fall.
///
/// # Safety
/// `trajectory` must be a live trajectory handle.
#[no_mangle]
pub unsafe extern "C" fn rw_trajectory_fell(trajectory: *const RwTrajectory) -> bool {
    !trajectory.is_null() && (*trajectory).inner.fall.is_some()
}

/// Time of the fall event; `InvalidArgument` when the run completed.
///
/// # Safety
/// `trajectory` live, `out_t` writable.
#[no_mangle]
pub unsafe extern "C" fn rw_trajectory_fall_time(
    trajectory: *const RwTrajectory,
    out_t: *mut f64,
) -> RwStatus {
    if trajectory.is_null() || out_t.is_null() {
        return RwStatus::NullPointer;
    }
    match (*trajectory).inner.fall {
        Some(fall) => {
            *out_t = fall.t;
            RwStatus::Ok
        }
        None => RwStatus::InvalidArgument,
    }
}

/// Free a trajectory. Null is ignored.
///
/// # Safety
/// `trajectory` must come from `rw_simulate` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rw_trajectory_free(trajectory: *mut RwTrajectory) {
    if !trajectory.is_null() {
        drop(Box::from_raw(trajectory));
    }
}
