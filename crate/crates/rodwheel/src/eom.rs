//! The multiplier-augmented equations of motion.
//!
//! Rolling without slipping ties the center velocity to the angle rates
//! through `A(q)·q̇ = 0`. Differentiating that constraint and appending it to
//! the Euler–Lagrange equations with ground-reaction multipliers gives the
//! square system
//!
//! ```text
//! M(q)·(λ₁, λ₂, c̈₁, c̈₂, φ̈, θ̈, ψ̈, β̈) = b(q, q̇) + b_u·u
//! ```
//!
//! solved densely with partial pivoting at every evaluation of the state
//! derivative.

use thiserror::Error;

use crate::ad::AD2;
use crate::kinematics::Params;
use crate::lagrangian::{assembly_blocks, GenPos};
use crate::linalg::{lu_solve, matvec, norm_inf, LinalgError};

/// The 10-dimensional state `(c1, c2, φ, θ, ψ, β, φ̇, θ̇, ψ̇, β̇)`.
///
/// `ċ1, ċ2` are not stored; the rolling constraints eliminate them. The
/// dynamics are valid for |θ| < π/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub c1: f64,
    pub c2: f64,
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
    pub beta: f64,
    pub dphi: f64,
    pub dtheta: f64,
    pub dpsi: f64,
    pub dbeta: f64,
}

impl State {
    pub fn from_array(x: [f64; 10]) -> Self {
        State {
            c1: x[0],
            c2: x[1],
            phi: x[2],
            theta: x[3],
            psi: x[4],
            beta: x[5],
            dphi: x[6],
            dtheta: x[7],
            dpsi: x[8],
            dbeta: x[9],
        }
    }

    pub fn to_array(self) -> [f64; 10] {
        [
            self.c1, self.c2, self.phi, self.theta, self.psi, self.beta, self.dphi, self.dtheta,
            self.dpsi, self.dbeta,
        ]
    }

    pub fn gen_pos(&self) -> GenPos {
        GenPos::new(self.c1, self.c2, self.phi, self.theta, self.psi, self.beta)
    }

    /// The four stored rates `(φ̇, θ̇, ψ̇, β̇)`.
    pub fn rates(&self) -> [f64; 4] {
        [self.dphi, self.dtheta, self.dpsi, self.dbeta]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }
}

/// Solution of the 8×8 system: ground-reaction multipliers plus the six
/// generalized accelerations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccelSolution {
    pub lambda1: f64,
    pub lambda2: f64,
    pub ddc1: f64,
    pub ddc2: f64,
    pub ddphi: f64,
    pub ddtheta: f64,
    pub ddpsi: f64,
    pub ddbeta: f64,
}

impl AccelSolution {
    fn from_vector(v: [f64; 8]) -> Self {
        AccelSolution {
            lambda1: v[0],
            lambda2: v[1],
            ddc1: v[2],
            ddc2: v[3],
            ddphi: v[4],
            ddtheta: v[5],
            ddpsi: v[6],
            ddbeta: v[7],
        }
    }

    pub fn to_vector(self) -> [f64; 8] {
        [
            self.lambda1,
            self.lambda2,
            self.ddc1,
            self.ddc2,
            self.ddphi,
            self.ddtheta,
            self.ddpsi,
            self.ddbeta,
        ]
    }
}

/// Force distribution of the motor torque over the unknown rows:
/// `+u` on the spin equation, `−u` on the rod equation.
pub const B_U: [f64; 8] = [0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, -1.0];

/// Relative residual bound enforced after every solve.
pub const SOLVE_RESIDUAL_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    /// Mass-matrix pivot collapsed; the configuration is at or near the
    /// θ = ±π/2 singularity. Callers abort the run with a diagnostic.
    #[error("singular mass matrix ({0})")]
    SingularMass(LinalgError),
    /// The solve succeeded but verification failed; treated like a
    /// singularity by the simulator.
    #[error("solve residual {residual:.3e} exceeds {bound:.3e}")]
    ResidualCheck { residual: f64, bound: f64 },
    #[error("non-finite state or control input")]
    NonFiniteInput,
}

/// Constraint rows over any scalar type (the α/β coefficients of the
/// no-slip conditions).
fn constraint_matrix_generic<T: crate::ad::Real>(theta: T, psi: T, r: f64) -> [[T; 6]; 2] {
    let r = T::from_f64(r);
    let (z, o) = (T::zero(), T::one());
    let (st, ct) = (theta.sin(), theta.cos());
    let (sp, cp) = (psi.sin(), psi.cos());
    [
        [o, z, -(r * sp), -(r * cp * ct), r * sp * st, z],
        [z, o, r * cp, -(r * sp * ct), -(r * cp * st), z],
    ]
}

/// `A(q)`: row 1 kills tangential sliding, row 2 lateral sliding; the rod
/// angle is unconstrained by the ground.
pub fn constraint_matrix(q: &GenPos, params: &Params) -> [[f64; 6]; 2] {
    constraint_matrix_generic(q.theta, q.psi, params.r)
}

/// Center velocity implied by the rolling constraints:
/// `ċ1 = r sinψ·φ̇ + r cosψ cosθ·θ̇ − r sinψ sinθ·ψ̇` and the lateral
/// counterpart, i.e. the solution of `A·q̇ = 0`.
pub fn constrained_velocities(q: &GenPos, rates: [f64; 3], params: &Params) -> (f64, f64) {
    let r = params.r;
    let (st, ct) = (q.theta.sin(), q.theta.cos());
    let (sp, cp) = (q.psi.sin(), q.psi.cos());
    let [dphi, dtheta, dpsi] = rates;
    let dc1 = r * sp * dphi + r * cp * ct * dtheta - r * sp * st * dpsi;
    let dc2 = -(r * cp) * dphi + r * sp * ct * dtheta + r * cp * st * dpsi;
    (dc1, dc2)
}

/// `(∂a/∂q)·q̇` for `a(q, q̇) = A(q)·q̇`, evaluated as one directional
/// derivative of the constraint rows along `q̇`.
fn constraint_rate_term(q6: &[f64; 6], dq6: &[f64; 6], params: &Params) -> [f64; 2] {
    let theta = AD2::seeded(q6[3], dq6[3], 0.0);
    let psi = AD2::seeded(q6[4], dq6[4], 0.0);
    let a = constraint_matrix_generic(theta, psi, params.r);
    let mut out = [0.0; 2];
    for (i, row) in a.iter().enumerate() {
        let mut acc = AD2::constant(0.0);
        for (k, entry) in row.iter().enumerate() {
            acc = acc + *entry * AD2::constant(dq6[k]);
        }
        out[i] = acc.d1;
    }
    out
}

struct Assembled {
    mass: [[f64; 8]; 8],
    rhs: [f64; 8],
    dc1: f64,
    dc2: f64,
}

/// Build `M(q)` and `b(q, q̇)` with `ċ1, ċ2` reconstructed from the
/// constraints. Row order: two differentiated constraints, then the six
/// Euler–Lagrange equations; column order `(λ₁, λ₂, q̈)`.
fn assemble(q: &GenPos, rates: &[f64; 4], params: &Params) -> Assembled {
    let (dc1, dc2) = constrained_velocities(q, [rates[0], rates[1], rates[2]], params);
    let q6 = q.to_array();
    let dq6 = [dc1, dc2, rates[0], rates[1], rates[2], rates[3]];

    let blocks = assembly_blocks(&q6, &dq6, params);
    let a = constraint_matrix(q, params);

    let mut mass = [[0.0; 8]; 8];
    for i in 0..2 {
        for j in 0..6 {
            mass[i][2 + j] = a[i][j];
        }
    }
    for i in 0..6 {
        mass[2 + i][0] = -a[0][i];
        mass[2 + i][1] = -a[1][i];
        for j in 0..6 {
            mass[2 + i][2 + j] = blocks.hess_dqdq[i][j];
        }
    }

    let da = constraint_rate_term(&q6, &dq6, params);
    let mut rhs = [0.0; 8];
    rhs[0] = -da[0];
    rhs[1] = -da[1];
    for i in 0..6 {
        rhs[2 + i] = blocks.grad_q[i] - blocks.hdqq_dq[i];
    }

    Assembled {
        mass,
        rhs,
        dc1,
        dc2,
    }
}

/// The 8×8 mass matrix. Depends on `q` only.
pub fn mass_matrix(q: &GenPos, params: &Params) -> [[f64; 8]; 8] {
    assemble(q, &[0.0; 4], params).mass
}

/// The right-hand side `b(q, q̇)` of the multiplier system, from the four
/// stored rates.
pub fn rhs_vector(q: &GenPos, rates: &[f64; 4], params: &Params) -> [f64; 8] {
    assemble(q, rates, params).rhs
}

/// One solved evaluation of the dynamics at `(x, u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dynamics {
    pub accel: AccelSolution,
    /// Constraint-consistent center velocity.
    pub dc1: f64,
    pub dc2: f64,
    rates: [f64; 4],
}

impl Dynamics {
    /// Assemble `ẋ` for the 10-dimensional state.
    pub fn state_derivative(&self) -> [f64; 10] {
        [
            self.dc1,
            self.dc2,
            self.rates[0],
            self.rates[1],
            self.rates[2],
            self.rates[3],
            self.accel.ddphi,
            self.accel.ddtheta,
            self.accel.ddpsi,
            self.accel.ddbeta,
        ]
    }
}

/// Assemble and solve the multiplier system at `(x, u)`.
pub fn solve_dynamics(x: &State, u: f64, params: &Params) -> Result<Dynamics, DynamicsError> {
    if !x.is_finite() || !u.is_finite() {
        return Err(DynamicsError::NonFiniteInput);
    }
    let q = x.gen_pos();
    let rates = x.rates();
    let sys = assemble(&q, &rates, params);

    let mut rhs = sys.rhs;
    for i in 0..8 {
        rhs[i] += B_U[i] * u;
    }

    let v = lu_solve(sys.mass, rhs).map_err(DynamicsError::SingularMass)?;

    let mv = matvec(&sys.mass, &v);
    let mut residual = [0.0; 8];
    for i in 0..8 {
        residual[i] = mv[i] - rhs[i];
    }
    let res_norm = norm_inf(&residual);
    let bound = SOLVE_RESIDUAL_RTOL * norm_inf(&rhs).max(1e-30);
    if res_norm > bound {
        return Err(DynamicsError::ResidualCheck {
            residual: res_norm,
            bound,
        });
    }

    Ok(Dynamics {
        accel: AccelSolution::from_vector(v),
        dc1: sys.dc1,
        dc2: sys.dc2,
        rates,
    })
}

/// State derivative `ẋ = f(x, u)`.
pub fn forward_dynamics(x: &State, u: f64, params: &Params) -> Result<[f64; 10], DynamicsError> {
    Ok(solve_dynamics(x, u, params)?.state_derivative())
}

/// Ground-reaction multipliers `(λ₁, λ₂)`; `τ = Aᵀλ` is the generalized
/// force the ground applies.
pub fn ground_reaction(x: &State, u: f64, params: &Params) -> Result<(f64, f64), DynamicsError> {
    let d = solve_dynamics(x, u, params)?;
    Ok((d.accel.lambda1, d.accel.lambda2))
}

/// Acceleration-level constraint residual `‖A(q)·q̈ + (∂a/∂q)·q̇‖∞` of a
/// solved evaluation; rows one and two of the system, recomputed.
pub fn constraint_residual(x: &State, d: &Dynamics, params: &Params) -> f64 {
    let q = x.gen_pos();
    let a = constraint_matrix(&q, params);
    let ddq = [
        d.accel.ddc1,
        d.accel.ddc2,
        d.accel.ddphi,
        d.accel.ddtheta,
        d.accel.ddpsi,
        d.accel.ddbeta,
    ];
    let q6 = q.to_array();
    let dq6 = [d.dc1, d.dc2, d.rates[0], d.rates[1], d.rates[2], d.rates[3]];
    let da = constraint_rate_term(&q6, &dq6, params);
    let mut worst = 0.0f64;
    for i in 0..2 {
        let mut acc = da[i];
        for k in 0..6 {
            acc += a[i][k] * ddq[k];
        }
        worst = worst.max(acc.abs());
    }
    worst
}
