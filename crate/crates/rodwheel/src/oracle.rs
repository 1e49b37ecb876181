//! Independent brute-force validators.
//!
//! Everything here recomputes the dynamics from the energy definitions using
//! plain `f64` arithmetic and divided differences — no code is shared with
//! the hyper-dual engine, so a bug cannot validate itself. Used by the test
//! suite and the `audit` subcommand.

use rand::Rng;

use crate::eom::State;
use crate::kinematics::Params;
use crate::lagrangian::{GenPos, GenVel};

/// Finite-difference settings: central differences with step `h`, compared
/// at relative tolerance `tol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConfig {
    pub step: f64,
    pub tol: f64,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig {
            step: 1e-5,
            tol: 1e-6,
        }
    }
}

/// Guarded relative difference `|a − b| / max(|a|, |b|, 1)`.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Central-difference gradient of a scalar function of `n` reals.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, point: &[f64], cfg: &FdConfig) -> Vec<f64> {
    let h = cfg.step;
    let mut x = point.to_vec();
    let mut grad = Vec::with_capacity(point.len());
    for i in 0..point.len() {
        let orig = x[i];
        x[i] = orig + h;
        let fp = f(&x);
        x[i] = orig - h;
        let fm = f(&x);
        x[i] = orig;
        grad.push((fp - fm) / (2.0 * h));
    }
    grad
}

/// The fully expanded closed form of the Lagrangian, written out term by
/// term as an independent check on the engine's energy construction.
///
/// With `legacy = true` the rod potential term is `μ(ℓcosβ + r)cosθ` (no
/// gravity factor); otherwise that term is multiplied by `g`.
pub fn closed_form_lagrangian(q: &GenPos, dq: &GenVel, p: &Params, legacy: bool) -> f64 {
    let (m, g, r, mu, ell) = (p.m, p.g, p.r, p.mu, p.ell);
    let (sphi, cphi) = (q.phi.sin(), q.phi.cos());
    let (sth, cth) = (q.theta.sin(), q.theta.cos());
    let (spsi, cpsi) = (q.psi.sin(), q.psi.cos());
    let (sb, cb) = (q.beta.sin(), q.beta.cos());
    let (dc1, dc2) = (dq.dc1, dq.dc2);
    let (dphi, dth, dpsi, db) = (dq.dphi, dq.dtheta, dq.dpsi, dq.dbeta);

    let sq = |x: f64| x * x;

    let disk_rot = m / 8.0 * r * r * sq(dth * sphi - dpsi * cth * cphi)
        + m / 8.0 * r * r * sq(dth * cphi + dpsi * sphi * cth)
        + m / 4.0 * r * r * sq(dphi - dpsi * sth);
    let disk_trans = m / 2.0 * (r * r * dth * dth * sth * sth + dc1 * dc1 + dc2 * dc2);

    let rod_pot_raw = mu * (ell * cb + r) * cth;
    let rod_pot = if legacy { rod_pot_raw } else { g * rod_pot_raw };

    let s2_dot = ell * spsi * cb * cth * dth + ell * (sb * spsi + sth * cb * cpsi) * dpsi
        - ell * (sb * sth * spsi + cb * cpsi) * db
        + dc2;
    let s1_dot = ell * cb * cth * cpsi * dth + ell * (sb * cpsi - sth * spsi * cb) * dpsi
        + ell * (spsi * cb - sb * sth * cpsi) * db
        + dc1;
    let s3_dot = ell * sb * cth * db + (ell * sth * cb + r * sth) * dth;
    let rod_kin = mu / 2.0 * (sq(s2_dot) + sq(s1_dot) + sq(s3_dot));

    disk_rot + disk_trans - rod_pot + rod_kin - g * m * r * cth
}

fn closed_form_arrays(q6: &[f64; 6], dq6: &[f64; 6], p: &Params) -> f64 {
    closed_form_lagrangian(
        &GenPos::from_array(*q6),
        &GenVel::from_array(*dq6),
        p,
        p.legacy_potential,
    )
}

/// `∂L/∂q̇ᵢ` by a unit-step central difference of the closed form. Exact up
/// to rounding because the kinetic energy is quadratic in the rates.
fn rate_gradient(q6: &[f64; 6], dq6: &[f64; 6], p: &Params) -> [f64; 6] {
    let mut grad = [0.0; 6];
    let mut dq = *dq6;
    for i in 0..6 {
        let orig = dq[i];
        dq[i] = orig + 1.0;
        let fp = closed_form_arrays(q6, &dq, p);
        dq[i] = orig - 1.0;
        let fm = closed_form_arrays(q6, &dq, p);
        dq[i] = orig;
        grad[i] = (fp - fm) / 2.0;
    }
    grad
}

/// Oracle transcription of the printed constraint rows.
fn oracle_constraint_matrix(q6: &[f64; 6], p: &Params) -> [[f64; 2]; 6] {
    let r = p.r;
    let (sth, cth) = (q6[3].sin(), q6[3].cos());
    let (spsi, cpsi) = (q6[4].sin(), q6[4].cos());
    // Stored transposed (columns of A) for convenient λ weighting.
    [
        [1.0, 0.0],
        [0.0, 1.0],
        [-r * spsi, r * cpsi],
        [-r * cpsi * cth, -r * spsi * cth],
        [r * spsi * sth, -r * cpsi * sth],
        [0.0, 0.0],
    ]
}

/// The stacked system residue `S(q, q̇, q̈, λ)`: differentiated constraints
/// on top, Euler–Lagrange rows minus ground forces below. `d/dt(∂L/∂q̇)` is
/// taken by central differences along the flow `(q̇, q̈)`.
fn stacked_system(
    q6: &[f64; 6],
    dq6: &[f64; 6],
    ddq: &[f64; 6],
    lambda: &[f64; 2],
    p: &Params,
    h: f64,
) -> [f64; 8] {
    let shift = |scale: f64| {
        let mut qs = [0.0; 6];
        let mut dqs = [0.0; 6];
        for k in 0..6 {
            qs[k] = q6[k] + scale * h * dq6[k];
            dqs[k] = dq6[k] + scale * h * ddq[k];
        }
        (qs, dqs)
    };
    let (qp, dqp) = shift(1.0);
    let (qm, dqm) = shift(-1.0);

    // d/dt(∂L/∂q̇) along the flow.
    let gp = rate_gradient(&qp, &dqp, p);
    let gm = rate_gradient(&qm, &dqm, p);
    let mut dgdt = [0.0; 6];
    for k in 0..6 {
        dgdt[k] = (gp[k] - gm[k]) / (2.0 * h);
    }

    // ∂L/∂q by plain central differences.
    let mut grad_q = [0.0; 6];
    let mut qs = *q6;
    for k in 0..6 {
        let orig = qs[k];
        qs[k] = orig + h;
        let fp = closed_form_arrays(&qs, dq6, p);
        qs[k] = orig - h;
        let fm = closed_form_arrays(&qs, dq6, p);
        qs[k] = orig;
        grad_q[k] = (fp - fm) / (2.0 * h);
    }

    // d/dt a(q, q̇) with a = A(q)·q̇, same flow differencing.
    let a_of = |qx: &[f64; 6], dqx: &[f64; 6]| {
        let at = oracle_constraint_matrix(qx, p);
        let mut a = [0.0; 2];
        for k in 0..6 {
            a[0] += at[k][0] * dqx[k];
            a[1] += at[k][1] * dqx[k];
        }
        a
    };
    let ap = a_of(&qp, &dqp);
    let am = a_of(&qm, &dqm);

    let at = oracle_constraint_matrix(q6, p);
    let mut s = [0.0; 8];
    s[0] = (ap[0] - am[0]) / (2.0 * h);
    s[1] = (ap[1] - am[1]) / (2.0 * h);
    for k in 0..6 {
        let tau_k = at[k][0] * lambda[0] + at[k][1] * lambda[1];
        s[2 + k] = dgdt[k] - grad_q[k] - tau_k;
    }
    s
}

/// Finite-difference assembly of the multiplier system: seed each unknown in
/// turn and extract the affine structure, mirroring the
/// jacobian-then-substitute-zero construction.
pub fn fd_mass_and_rhs(
    q: &GenPos,
    rates: &[f64; 4],
    p: &Params,
    cfg: &FdConfig,
) -> ([[f64; 8]; 8], [f64; 8]) {
    let q6 = q.to_array();
    let at = oracle_constraint_matrix(&q6, p);
    // ċ from A·q̇ = 0, written out with the transposed rows.
    let dc1 = -(at[2][0] * rates[0] + at[3][0] * rates[1] + at[4][0] * rates[2]);
    let dc2 = -(at[2][1] * rates[0] + at[3][1] * rates[1] + at[4][1] * rates[2]);
    let dq6 = [dc1, dc2, rates[0], rates[1], rates[2], rates[3]];

    let h = cfg.step;
    let base = stacked_system(&q6, &dq6, &[0.0; 6], &[0.0; 2], p, h);

    let mut mass = [[0.0; 8]; 8];
    for j in 0..8 {
        let mut lambda = [0.0; 2];
        let mut ddq = [0.0; 6];
        if j < 2 {
            lambda[j] = 1.0;
        } else {
            ddq[j - 2] = 1.0;
        }
        let seeded = stacked_system(&q6, &dq6, &ddq, &lambda, p, h);
        for i in 0..8 {
            mass[i][j] = seeded[i] - base[i];
        }
    }

    let mut rhs = [0.0; 8];
    for i in 0..8 {
        rhs[i] = -base[i];
    }
    (mass, rhs)
}

/// Random generalized position/velocity pair inside the validity domain.
pub fn sample_pos_vel(rng: &mut impl Rng, theta_max: f64) -> (GenPos, GenVel) {
    let q = GenPos::new(
        rng.gen_range(-5.0..5.0),
        rng.gen_range(-5.0..5.0),
        rng.gen_range(-3.2..3.2),
        rng.gen_range(-theta_max..theta_max),
        rng.gen_range(-3.2..3.2),
        rng.gen_range(-3.2..3.2),
    );
    let dq = GenVel::new(
        rng.gen_range(-4.0..4.0),
        rng.gen_range(-4.0..4.0),
        rng.gen_range(-4.0..4.0),
        rng.gen_range(-4.0..4.0),
        rng.gen_range(-4.0..4.0),
        rng.gen_range(-4.0..4.0),
    );
    (q, dq)
}

/// Random 10-dimensional state inside the validity domain.
pub fn sample_state(rng: &mut impl Rng, theta_max: f64) -> State {
    State::from_array([
        rng.gen_range(-5.0..5.0),
        rng.gen_range(-5.0..5.0),
        rng.gen_range(-3.2..3.2),
        rng.gen_range(-theta_max..theta_max),
        rng.gen_range(-3.2..3.2),
        rng.gen_range(-3.2..3.2),
        rng.gen_range(-4.0..4.0),
        rng.gen_range(-4.0..4.0),
        rng.gen_range(-4.0..4.0),
        rng.gen_range(-4.0..4.0),
    ])
}
