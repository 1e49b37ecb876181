//! Fixed-step time integration, trajectory recording and post-run audits.

use thiserror::Error;

use crate::control::ControllerSpec;
use crate::eom::{forward_dynamics, solve_dynamics, DynamicsError, State};
use crate::kinematics::Params;
use crate::lagrangian::total_energy;

/// Stand-angle magnitude treated as a fall. Strictly inside π/2 so the run
/// stops before the mass matrix degenerates.
pub const THETA_FALL_LIMIT: f64 = 1.4;

/// One recorded instant: state, the torque held over the following step,
/// total energy and the ground-reaction multipliers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub state: State,
    pub u: f64,
    pub energy: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FallReason {
    /// |θ| reached [`THETA_FALL_LIMIT`].
    ThetaLimit,
    /// The multiplier solve failed near the flat-wheel singularity.
    Singular,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FallEvent {
    pub t: f64,
    pub reason: FallReason,
}

/// Time-stamped simulation output. Samples are spaced exactly `dt` apart;
/// only a terminal fall sample may sit outside the validity domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub params: Params,
    pub dt: f64,
    pub samples: Vec<Sample>,
    pub fall: Option<FallEvent>,
}

impl Trajectory {
    pub fn final_state(&self) -> &State {
        &self.samples.last().expect("trajectory is never empty").state
    }

    pub fn max_abs_theta(&self) -> f64 {
        self.samples
            .iter()
            .fold(0.0f64, |m, s| m.max(s.state.theta.abs()))
    }
}

/// A complete simulation request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub params: Params,
    pub x0: State,
    pub controller: ControllerSpec,
    pub dt: f64,
    pub duration: f64,
}

impl Scenario {
    pub fn new(params: Params, x0: State) -> Self {
        Scenario {
            params,
            x0,
            controller: ControllerSpec::none(),
            dt: 0.01,
            duration: 8.0,
        }
    }

    pub fn with_controller(mut self, controller: ControllerSpec) -> Self {
        self.controller = controller;
        self
    }

    pub fn with_time(mut self, dt: f64, duration: f64) -> Self {
        self.dt = dt;
        self.duration = duration;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    Config(String),
}

/// One step of the two-stage second-order scheme
/// `x + dt·(¼·f(x) + ¾·f(x + ⅔·dt·f(x)))`, for any fixed-size system.
pub fn rk2_step_generic<const N: usize, E>(
    x: [f64; N],
    dt: f64,
    mut f: impl FnMut([f64; N]) -> Result<[f64; N], E>,
) -> Result<[f64; N], E> {
    let k1 = f(x)?;
    rk2_step_from_k1(x, k1, dt, f)
}

fn rk2_step_from_k1<const N: usize, E>(
    x: [f64; N],
    k1: [f64; N],
    dt: f64,
    mut f: impl FnMut([f64; N]) -> Result<[f64; N], E>,
) -> Result<[f64; N], E> {
    let mut mid = [0.0; N];
    for i in 0..N {
        mid[i] = x[i] + (2.0 / 3.0) * dt * k1[i];
    }
    let k2 = f(mid)?;
    let mut next = [0.0; N];
    for i in 0..N {
        next[i] = x[i] + dt * (0.25 * k1[i] + 0.75 * k2[i]);
    }
    Ok(next)
}

/// Advance the rodwheel one step with the torque held constant.
pub fn rk2_step(x: &State, u: f64, dt: f64, params: &Params) -> Result<State, DynamicsError> {
    let next = rk2_step_generic(x.to_array(), dt, |y| {
        forward_dynamics(&State::from_array(y), u, params)
    })?;
    Ok(State::from_array(next))
}

/// Run a scenario to its horizon, recording every step.
///
/// The controller is evaluated once per step and held. The run ends early
/// with a [`FallEvent`] when |θ| reaches the fall limit or the solve turns
/// singular; the offending sample is kept as the terminal record.
pub fn simulate(sc: &Scenario) -> Result<Trajectory, SimError> {
    if !sc.dt.is_finite() || sc.dt <= 0.0 {
        return Err(SimError::Config(format!("dt must be positive, got {}", sc.dt)));
    }
    if !sc.duration.is_finite() || sc.duration < sc.dt {
        return Err(SimError::Config(format!(
            "duration must be at least dt, got {}",
            sc.duration
        )));
    }
    if !sc.x0.is_finite() {
        return Err(SimError::Config("initial state is not finite".into()));
    }

    let n_steps = (sc.duration / sc.dt).round() as usize;
    let mut samples = Vec::with_capacity(n_steps + 1);
    let mut fall = None;
    let mut x = sc.x0;

    for i in 0..=n_steps {
        let t = i as f64 * sc.dt;
        let u = sc.controller.torque(&x);
        let energy = total_energy(&x, &sc.params);

        match solve_dynamics(&x, u, &sc.params) {
            Ok(d) => {
                samples.push(Sample {
                    t,
                    state: x,
                    u,
                    energy,
                    lambda1: d.accel.lambda1,
                    lambda2: d.accel.lambda2,
                });
                if x.theta.abs() >= THETA_FALL_LIMIT {
                    fall = Some(FallEvent {
                        t,
                        reason: FallReason::ThetaLimit,
                    });
                    break;
                }
                if i == n_steps {
                    break;
                }
                let k1 = d.state_derivative();
                match rk2_step_from_k1(x.to_array(), k1, sc.dt, |y| {
                    forward_dynamics(&State::from_array(y), u, &sc.params)
                }) {
                    Ok(next) => x = State::from_array(next),
                    Err(_) => {
                        fall = Some(FallEvent {
                            t,
                            reason: FallReason::Singular,
                        });
                        break;
                    }
                }
            }
            Err(_) => {
                samples.push(Sample {
                    t,
                    state: x,
                    u,
                    energy,
                    lambda1: f64::NAN,
                    lambda2: f64::NAN,
                });
                fall = Some(FallEvent {
                    t,
                    reason: FallReason::Singular,
                });
                break;
            }
        }
    }

    Ok(Trajectory {
        params: sc.params,
        dt: sc.dt,
        samples,
        fall,
    })
}

/// Energy bookkeeping of a recorded run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyAudit {
    /// `max_t |E(t) − E(0)| / max(|E(0)|, 1)`.
    pub max_rel_drift: f64,
    /// `max_t |E(t) − E(0) − W(t)|` where `W` accumulates the motor work
    /// `u·(φ̇ − β̇)` per step (trapezoidal in the rates, exact in the held
    /// torque).
    pub work_residual: f64,
}

pub fn audit_energy(traj: &Trajectory) -> EnergyAudit {
    let e0 = traj.samples[0].energy;
    let scale = e0.abs().max(1.0);
    let mut max_rel_drift = 0.0f64;
    let mut work_residual = 0.0f64;
    let mut work = 0.0;

    for (i, s) in traj.samples.iter().enumerate() {
        max_rel_drift = max_rel_drift.max((s.energy - e0).abs() / scale);
        work_residual = work_residual.max((s.energy - e0 - work).abs());
        if i + 1 < traj.samples.len() {
            let next = &traj.samples[i + 1];
            let rate_now = s.state.dphi - s.state.dbeta;
            let rate_next = next.state.dphi - next.state.dbeta;
            work += s.u * 0.5 * (rate_now + rate_next) * traj.dt;
        }
    }

    EnergyAudit {
        max_rel_drift,
        work_residual,
    }
}

/// Max acceleration-level constraint residual over the recorded samples,
/// re-solving the dynamics at each one. Per-evaluation, not accumulated.
pub fn audit_constraints(traj: &Trajectory) -> f64 {
    let mut worst = 0.0f64;
    for s in &traj.samples {
        if let Ok(d) = solve_dynamics(&s.state, s.u, &traj.params) {
            worst = worst.max(crate::eom::constraint_residual(&s.state, &d, &traj.params));
        }
    }
    worst
}
