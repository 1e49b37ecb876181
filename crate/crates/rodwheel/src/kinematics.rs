//! Orientation and position kinematics of the rodwheel.
//!
//! Euler angles follow the z-y-x product convention `R = Rz(ψ)·Ry(θ)·Rx(φ)`.
//! The same product with the rod angle β in the x slot orients the rod.

use thiserror::Error;

use crate::ad::{Dual, Real};
use crate::lagrangian::GenPos;
use crate::linalg::{mat3_mul, mat3_tmul, mat3_vec, Mat3, Vec3};

/// Euler angle triple: spin φ, stand θ, heading ψ (radians, unwrapped).
///
/// Angles are never normalized into (−π, π]; trajectories keep φ growing
/// monotonically while rolling. The dynamics are valid for |θ| < π/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAngles {
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
}

impl EulerAngles {
    pub fn new(phi: f64, theta: f64, psi: f64) -> Self {
        EulerAngles { phi, theta, psi }
    }
}

/// 3×3 orientation matrix (row-major).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix(pub Mat3<f64>);

impl RotationMatrix {
    /// Max deviation from orthonormality, `max |RᵀR − I|`.
    #[allow(clippy::needless_range_loop)]
    pub fn orthonormality_defect(&self) -> f64 {
        let rtr = mat3_tmul(&self.0, &self.0);
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((rtr[i][j] - expect).abs());
            }
        }
        worst
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }
}

/// Physical constants of the rodwheel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    /// Disk mass (kg).
    pub m: f64,
    /// Gravity (m/s²).
    pub g: f64,
    /// Disk radius (m).
    pub r: f64,
    /// Rod point-mass (kg).
    pub mu: f64,
    /// Rod length (m).
    pub ell: f64,
    /// Drop the gravity factor on the rod potential term (`μ·s₃` instead of
    /// the physically consistent `μ·g·s₃`). The tuned controller gain sets
    /// assume this lighter-rod convention.
    pub legacy_potential: bool,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("parameter {name} must be strictly positive, got {value}")]
pub struct ParamsError {
    pub name: &'static str,
    pub value: f64,
}

impl Params {
    pub fn new(m: f64, g: f64, r: f64, mu: f64, ell: f64) -> Result<Self, ParamsError> {
        for (name, value) in [("m", m), ("g", g), ("r", r), ("mu", mu), ("ell", ell)] {
            if !value.is_finite() || value <= 0.0 {
                return Err(ParamsError { name, value });
            }
        }
        Ok(Params {
            m,
            g,
            r,
            mu,
            ell,
            legacy_potential: false,
        })
    }

    /// The reference parameter set (m, g, r, μ, ℓ) = (5, 9.81, 1, 1, 2).
    pub fn default_set() -> Self {
        Params {
            m: 5.0,
            g: 9.81,
            r: 1.0,
            mu: 1.0,
            ell: 2.0,
            legacy_potential: false,
        }
    }

    pub fn with_legacy_potential(mut self, legacy: bool) -> Self {
        self.legacy_potential = legacy;
        self
    }
}

#[inline]
pub fn rot_x<T: Real>(a: T) -> Mat3<T> {
    let (s, c) = (a.sin(), a.cos());
    let (z, o) = (T::zero(), T::one());
    [[o, z, z], [z, c, -s], [z, s, c]]
}

#[inline]
pub fn rot_y<T: Real>(a: T) -> Mat3<T> {
    let (s, c) = (a.sin(), a.cos());
    let (z, o) = (T::zero(), T::one());
    [[c, z, s], [z, o, z], [-s, z, c]]
}

#[inline]
pub fn rot_z<T: Real>(a: T) -> Mat3<T> {
    let (s, c) = (a.sin(), a.cos());
    let (z, o) = (T::zero(), T::one());
    [[c, -s, z], [s, c, z], [z, z, o]]
}

/// `Rz(ψ)·Ry(θ)·Rx(φ)` over any scalar.
#[inline]
pub fn euler_matrix<T: Real>(phi: T, theta: T, psi: T) -> Mat3<T> {
    mat3_mul(&mat3_mul(&rot_z(psi), &rot_y(theta)), &rot_x(phi))
}

/// Orientation matrix of the disk.
pub fn euler_rotation(angles: &EulerAngles) -> RotationMatrix {
    RotationMatrix(euler_matrix(angles.phi, angles.theta, angles.psi))
}

/// Body-frame angular velocity `ω_r = unskew(Rᵀ·Ṙ)`.
///
/// `Ṙ` is obtained by differentiating the rotation along the angle rates
/// (tangent channel), so the contract is the matrix identity itself rather
/// than a hand-derived closed form.
pub fn body_angular_velocity(angles: &EulerAngles, rates: [f64; 3]) -> [f64; 3] {
    let r_dual = euler_matrix(
        Dual::lift(angles.phi, rates[0]),
        Dual::lift(angles.theta, rates[1]),
        Dual::lift(angles.psi, rates[2]),
    );
    let mut r = [[0.0; 3]; 3];
    let mut rdot = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            r[i][j] = r_dual[i][j].v;
            rdot[i][j] = r_dual[i][j].d;
        }
    }
    let w = mat3_tmul(&r, &rdot);
    [-w[1][2], w[0][2], -w[0][1]]
}

/// Wheel center `c = (c1, c2, r·cosθ)`.
pub fn wheel_center(q: &GenPos, params: &Params) -> Vec3<f64> {
    [q.c1, q.c2, params.r * q.theta.cos()]
}

/// Rod endpoint `s = c + R(β, θ, ψ)·(0, 0, ℓ)`.
pub fn rod_tip(q: &GenPos, params: &Params) -> Vec3<f64> {
    let c = wheel_center(q, params);
    let r = euler_matrix(q.beta, q.theta, q.psi);
    let arm = mat3_vec(&r, &[0.0, 0.0, params.ell]);
    [c[0] + arm[0], c[1] + arm[1], c[2] + arm[2]]
}
