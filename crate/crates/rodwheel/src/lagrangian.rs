//! Energies and exact derivatives of the rodwheel Lagrangian.
//!
//! `L(q, q̇) = E_K − E_p` is evaluated generically over any [`Real`] scalar.
//! Velocities of the wheel center, the rod tip and the orientation matrix are
//! produced by the tangent channel of [`Dual`] numbers lifted along
//! `(q, q̇)`, so no closed-form expression is ever written down. Seeding the
//! twelve inputs with [`AD2`] then yields exact gradients and Hessian blocks.

use crate::ad::{Dual, Real, AD2};
use crate::eom::State;
use crate::kinematics::{euler_matrix, Params};
use crate::linalg::{dot3, mat3_tmul, mat3_vec};

/// The six generalized coordinates, in the fixed order
/// `(c1, c2, φ, θ, ψ, β)`. Indices matter for the constraint matrix and the
/// multiplier system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenPos {
    pub c1: f64,
    pub c2: f64,
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
    pub beta: f64,
}

impl GenPos {
    pub fn new(c1: f64, c2: f64, phi: f64, theta: f64, psi: f64, beta: f64) -> Self {
        GenPos {
            c1,
            c2,
            phi,
            theta,
            psi,
            beta,
        }
    }

    pub fn to_array(self) -> [f64; 6] {
        [self.c1, self.c2, self.phi, self.theta, self.psi, self.beta]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        GenPos::new(a[0], a[1], a[2], a[3], a[4], a[5])
    }
}

/// Generalized velocities, same ordering as [`GenPos`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenVel {
    pub dc1: f64,
    pub dc2: f64,
    pub dphi: f64,
    pub dtheta: f64,
    pub dpsi: f64,
    pub dbeta: f64,
}

impl GenVel {
    pub fn new(dc1: f64, dc2: f64, dphi: f64, dtheta: f64, dpsi: f64, dbeta: f64) -> Self {
        GenVel {
            dc1,
            dc2,
            dphi,
            dtheta,
            dpsi,
            dbeta,
        }
    }

    pub fn zero() -> Self {
        GenVel::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    }

    pub fn to_array(self) -> [f64; 6] {
        [
            self.dc1, self.dc2, self.dphi, self.dtheta, self.dpsi, self.dbeta,
        ]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        GenVel::new(a[0], a[1], a[2], a[3], a[4], a[5])
    }
}

/// Principal inertia of the disk about its body axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertiaTensor {
    pub diag: [f64; 3],
}

impl InertiaTensor {
    /// `diag(mr²/2, mr²/4, mr²/4)` for a thin disk spinning about x.
    pub fn disk(m: f64, r: f64) -> Self {
        let mr2 = m * r * r;
        InertiaTensor {
            diag: [0.5 * mr2, 0.25 * mr2, 0.25 * mr2],
        }
    }
}

/// Kinetic and potential energy over any scalar type.
///
/// Returns `(E_K, E_p)`. The kinetic part is
/// `½ ω_rᵀ I ω_r + ½ m ‖ċ‖² + ½ μ ‖ṡ‖²` with every velocity coming from the
/// tangent channel of the lifted coordinates; the potential is
/// `m·g·c₃ + μ·g·s₃` (or the legacy `μ·s₃` rod term when configured).
pub(crate) fn energies_generic<T: Real>(q: &[T; 6], dq: &[T; 6], p: &Params) -> (T, T) {
    let lift = |k: usize| Dual::lift(q[k], dq[k]);
    let (c1, c2, phi, theta, psi, beta) = (lift(0), lift(1), lift(2), lift(3), lift(4), lift(5));

    let r = Dual::constant(T::from_f64(p.r));
    let ell = Dual::constant(T::from_f64(p.ell));
    let zero = Dual::constant(T::zero());

    // Wheel center and rod tip, carried with their time derivatives.
    let c = [c1, c2, r * theta.cos()];
    let r_rod = euler_matrix(beta, theta, psi);
    let arm = mat3_vec(&r_rod, &[zero, zero, ell]);
    let s = [c[0] + arm[0], c[1] + arm[1], c[2] + arm[2]];

    // Body angular velocity from unskew(Rᵀ·Ṙ) on the disk orientation.
    let r_disk = euler_matrix(phi, theta, psi);
    let mut rv = [[T::zero(); 3]; 3];
    let mut rdot = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            rv[i][j] = r_disk[i][j].v;
            rdot[i][j] = r_disk[i][j].d;
        }
    }
    let w = mat3_tmul(&rv, &rdot);
    let omega = [-w[1][2], w[0][2], -w[0][1]];

    let dc = [c[0].d, c[1].d, c[2].d];
    let ds = [s[0].d, s[1].d, s[2].d];

    let inertia = InertiaTensor::disk(p.m, p.r);
    let half = T::from_f64(0.5);
    let rot = T::from_f64(inertia.diag[0]) * omega[0] * omega[0]
        + T::from_f64(inertia.diag[1]) * omega[1] * omega[1]
        + T::from_f64(inertia.diag[2]) * omega[2] * omega[2];
    let kinetic = half * rot
        + T::from_f64(0.5 * p.m) * dot3(&dc, &dc)
        + T::from_f64(0.5 * p.mu) * dot3(&ds, &ds);

    let rod_weight = if p.legacy_potential { p.mu } else { p.mu * p.g };
    let potential = T::from_f64(p.m * p.g) * c[2].v + T::from_f64(rod_weight) * s[2].v;

    (kinetic, potential)
}

/// Kinetic energy `E_K(q, q̇)`. All six rates are taken as given; no
/// constraint is applied here.
pub fn kinetic_energy(q: &GenPos, dq: &GenVel, p: &Params) -> f64 {
    energies_generic(&q.to_array(), &dq.to_array(), p).0
}

/// Potential energy `E_p(q)`.
pub fn potential_energy(q: &GenPos, p: &Params) -> f64 {
    energies_generic(&q.to_array(), &[0.0; 6], p).1
}

/// `L = E_K − E_p`.
pub fn lagrangian(q: &GenPos, dq: &GenVel, p: &Params) -> f64 {
    let (ek, ep) = energies_generic(&q.to_array(), &dq.to_array(), p);
    ek - ep
}

/// Total mechanical energy of a state, with `ċ1, ċ2` reconstructed from the
/// rolling constraints. Conserved along uncontrolled trajectories.
pub fn total_energy(x: &State, p: &Params) -> f64 {
    let q = x.gen_pos();
    let (dc1, dc2) =
        crate::eom::constrained_velocities(&q, [x.dphi, x.dtheta, x.dpsi], p);
    let dq = GenVel::new(dc1, dc2, x.dphi, x.dtheta, x.dpsi, x.dbeta);
    let (ek, ep) = energies_generic(&q.to_array(), &dq.to_array(), p);
    ek + ep
}

/// Gradients and Hessian blocks of `L` at `(q, q̇)`.
///
/// Everything `d/dt(∂L/∂q̇) − ∂L/∂q` needs once the affine-in-`q̈` structure
/// is used: `d/dt(∂L/∂q̇) = H_q̇q̇·q̈ + H_q̇q·q̇`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianPartials {
    /// ∂L/∂q.
    pub grad_q: [f64; 6],
    /// ∂L/∂q̇.
    pub grad_dq: [f64; 6],
    /// ∂²L/∂q̇∂q̇ (symmetric, depends on q only).
    pub hess_dqdq: [[f64; 6]; 6],
    /// ∂²L/∂q̇ᵢ∂qⱼ in entry `[i][j]`.
    pub hess_dqq: [[f64; 6]; 6],
}

/// Evaluate `L` with the twelve inputs seeded along two directions.
fn lagrangian_seeded(x: &[f64; 12], s1: &[f64; 12], s2: &[f64; 12], p: &Params) -> AD2 {
    let mut q = [AD2::constant(0.0); 6];
    let mut dq = [AD2::constant(0.0); 6];
    for k in 0..12 {
        let v = AD2::seeded(x[k], s1[k], s2[k]);
        if k < 6 {
            q[k] = v;
        } else {
            dq[k - 6] = v;
        }
    }
    let (ek, ep) = energies_generic(&q, &dq, p);
    ek - ep
}

fn unit12(k: usize) -> [f64; 12] {
    let mut e = [0.0; 12];
    e[k] = 1.0;
    e
}

/// All first and second partials needed by the equations of motion, via
/// pairwise hyper-dual seeding of the twelve inputs (57 evaluations).
pub fn lagrangian_partials(q: &GenPos, dq: &GenVel, p: &Params) -> LagrangianPartials {
    let mut x = [0.0; 12];
    x[..6].copy_from_slice(&q.to_array());
    x[6..].copy_from_slice(&dq.to_array());

    let mut out = LagrangianPartials {
        grad_q: [0.0; 6],
        grad_dq: [0.0; 6],
        hess_dqdq: [[0.0; 6]; 6],
        hess_dqq: [[0.0; 6]; 6],
    };

    for i in 0..6 {
        for j in 0..6 {
            let e = lagrangian_seeded(&x, &unit12(6 + i), &unit12(j), p);
            out.hess_dqq[i][j] = e.d12;
            out.grad_dq[i] = e.d1;
            out.grad_q[j] = e.d2;
        }
    }
    for i in 0..6 {
        for j in i..6 {
            let e = lagrangian_seeded(&x, &unit12(6 + i), &unit12(6 + j), p);
            out.hess_dqdq[i][j] = e.d12;
            out.hess_dqdq[j][i] = e.d12;
        }
    }
    out
}

/// The subset of partials the multiplier system assembly needs, with the
/// `H_q̇q·q̇` product taken as a single directional derivative per row
/// (30 evaluations instead of 57).
pub(crate) struct AssemblyBlocks {
    pub hess_dqdq: [[f64; 6]; 6],
    pub grad_q: [f64; 6],
    /// `(H_q̇q · q̇)ᵢ`, each entry one mixed directional derivative.
    pub hdqq_dq: [f64; 6],
}

pub(crate) fn assembly_blocks(q6: &[f64; 6], dq6: &[f64; 6], p: &Params) -> AssemblyBlocks {
    let mut x = [0.0; 12];
    x[..6].copy_from_slice(q6);
    x[6..].copy_from_slice(dq6);

    let mut blocks = AssemblyBlocks {
        hess_dqdq: [[0.0; 6]; 6],
        grad_q: [0.0; 6],
        hdqq_dq: [0.0; 6],
    };

    for i in 0..6 {
        for j in i..6 {
            let e = lagrangian_seeded(&x, &unit12(6 + i), &unit12(6 + j), p);
            blocks.hess_dqdq[i][j] = e.d12;
            blocks.hess_dqdq[j][i] = e.d12;
        }
    }

    // Direction q̇ over the position inputs: d12 gives Σⱼ ∂²L/∂q̇ᵢ∂qⱼ·q̇ⱼ.
    let mut qdot_dir = [0.0; 12];
    qdot_dir[..6].copy_from_slice(dq6);
    for i in 0..6 {
        let e = lagrangian_seeded(&x, &unit12(6 + i), &qdot_dir, p);
        blocks.hdqq_dq[i] = e.d12;
    }

    for pair in 0..3 {
        let e = lagrangian_seeded(&x, &unit12(2 * pair), &unit12(2 * pair + 1), p);
        blocks.grad_q[2 * pair] = e.d1;
        blocks.grad_q[2 * pair + 1] = e.d2;
    }
    blocks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn defaults() -> Params {
        Params::default_set()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1.0)
    }

    fn random_pos_vel(rng: &mut ChaCha8Rng, theta_max: f64) -> (GenPos, GenVel) {
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

    #[test]
    fn kinetic_energy_zero_at_rest() {
        let q = GenPos::new(1.0, -2.0, 0.3, 0.4, -0.7, 2.0);
        assert_eq!(kinetic_energy(&q, &GenVel::zero(), &defaults()), 0.0);
    }

    #[test]
    fn kinetic_energy_straight_roll() {
        // Upright, rolling with φ̇ = 1 and the matching center velocity
        // ċ = (0, −r): ½(mr²/2) + ½m r² + ½μ r² = 1.25 + 2.5 + 0.5.
        let q = GenPos::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        let dq = GenVel::new(0.0, -1.0, 1.0, 0.0, 0.0, 0.0);
        assert!((kinetic_energy(&q, &dq, &defaults()) - 4.25).abs() <= 1e-12);
    }

    #[test]
    fn kinetic_energy_quadratic_in_rates() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let (q, dq) = random_pos_vel(&mut rng, 1.4);
            let doubled = GenVel::from_array(dq.to_array().map(|v| 2.0 * v));
            let e1 = kinetic_energy(&q, &dq, &defaults());
            let e4 = kinetic_energy(&q, &doubled, &defaults());
            assert!(rel(e4, 4.0 * e1) <= 1e-12);
        }
    }

    #[test]
    fn potential_energy_examples() {
        let p = defaults();
        let upright = GenPos::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert!((potential_energy(&upright, &p) - 78.48).abs() <= 1e-10);

        let rod_down = GenPos::new(0.0, 0.0, 0.0, 0.0, 0.0, std::f64::consts::PI);
        assert!((potential_energy(&rod_down, &p) - 39.24).abs() <= 1e-10);

        let flat = GenPos::new(0.0, 0.0, 0.0, std::f64::consts::FRAC_PI_2, 0.0, 0.0);
        assert!(potential_energy(&flat, &p).abs() <= 1e-13);
        let legacy = p.with_legacy_potential(true);
        assert!(potential_energy(&flat, &legacy).abs() <= 1e-13);
    }

    #[test]
    fn lagrangian_is_kinetic_minus_potential() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let (q, dq) = random_pos_vel(&mut rng, 1.4);
            let l = lagrangian(&q, &dq, &defaults());
            let ek = kinetic_energy(&q, &dq, &defaults());
            let ep = potential_energy(&q, &defaults());
            assert_eq!(l + ep, ek - ep + ep); // same evaluation path
            assert!(rel(l, ek - ep) <= 1e-14);
        }
    }

    #[test]
    fn lagrangian_at_rest_is_minus_potential() {
        let q = GenPos::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert!((lagrangian(&q, &GenVel::zero(), &defaults()) + 78.48).abs() <= 1e-10);
    }

    #[test]
    fn translation_invariance_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let (q, dq) = random_pos_vel(&mut rng, 1.4);
            let shifted = GenPos::new(
                q.c1 + rng.gen_range(-10.0..10.0),
                q.c2 + rng.gen_range(-10.0..10.0),
                q.phi,
                q.theta,
                q.psi,
                q.beta,
            );
            assert_eq!(lagrangian(&q, &dq, &defaults()), lagrangian(&shifted, &dq, &defaults()));
        }
    }

    #[test]
    fn heading_covariance_of_kinetic_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let (q, dq) = random_pos_vel(&mut rng, 1.4);
            let delta: f64 = rng.gen_range(-3.0..3.0);
            let (s, c) = delta.sin_cos();
            let rotated_q =
                GenPos::new(q.c1, q.c2, q.phi, q.theta, q.psi + delta, q.beta);
            let rotated_dq = GenVel::new(
                c * dq.dc1 - s * dq.dc2,
                s * dq.dc1 + c * dq.dc2,
                dq.dphi,
                dq.dtheta,
                dq.dpsi,
                dq.dbeta,
            );
            let a = kinetic_energy(&q, &dq, &defaults());
            let b = kinetic_energy(&rotated_q, &rotated_dq, &defaults());
            assert!(rel(a, b) <= 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn hessian_block_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = defaults();
        for _ in 0..10 {
            let (q, dq) = random_pos_vel(&mut rng, 1.4);
            let parts = lagrangian_partials(&q, &dq, &p);
            // ċ1² carries (m+μ)/2 for every configuration.
            assert!(rel(parts.hess_dqdq[0][0], p.m + p.mu) <= 1e-12);
            // Translation invariance kills the c1, c2 gradient entries.
            assert_eq!(parts.grad_q[0], 0.0);
            assert_eq!(parts.grad_q[1], 0.0);
            for i in 0..6 {
                for j in 0..6 {
                    assert_eq!(parts.hess_dqdq[i][j], parts.hess_dqdq[j][i]);
                }
            }
        }
    }

    #[test]
    fn mass_block_depends_only_on_position() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let (q, dq_a) = random_pos_vel(&mut rng, 1.4);
            let (_, dq_b) = random_pos_vel(&mut rng, 1.4);
            let ha = lagrangian_partials(&q, &dq_a, &defaults()).hess_dqdq;
            let hb = lagrangian_partials(&q, &dq_b, &defaults()).hess_dqdq;
            assert_eq!(ha, hb);
        }
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn hessian_positive_definite_inside_validity_domain() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let (q, dq) = random_pos_vel(&mut rng, 1.4);
            let h = lagrangian_partials(&q, &dq, &defaults()).hess_dqdq;
            // Cholesky as the positive-definiteness witness.
            let mut l = [[0.0f64; 6]; 6];
            for i in 0..6 {
                for j in 0..=i {
                    let mut acc = h[i][j];
                    for k in 0..j {
                        acc -= l[i][k] * l[j][k];
                    }
                    if i == j {
                        assert!(acc > 0.0, "pivot {i} not positive: {acc} (θ={})", q.theta);
                        l[i][j] = acc.sqrt();
                    } else {
                        l[i][j] = acc / l[j][j];
                    }
                }
            }
        }
    }

    #[test]
    fn partials_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let p = defaults();
        let cfg = oracle::FdConfig::default();
        for _ in 0..25 {
            let (q, dq) = random_pos_vel(&mut rng, 1.2);
            let parts = lagrangian_partials(&q, &dq, &p);
            let mut x = [0.0; 12];
            x[..6].copy_from_slice(&q.to_array());
            x[6..].copy_from_slice(&dq.to_array());
            let grad = oracle::fd_gradient(
                |y| {
                    let mut qa = [0.0; 6];
                    let mut va = [0.0; 6];
                    qa.copy_from_slice(&y[..6]);
                    va.copy_from_slice(&y[6..]);
                    lagrangian(&GenPos::from_array(qa), &GenVel::from_array(va), &p)
                },
                &x,
                &cfg,
            );
            for k in 0..6 {
                assert!(rel(parts.grad_q[k], grad[k]) <= 1e-6);
                assert!(rel(parts.grad_dq[k], grad[6 + k]) <= 1e-6);
            }
        }
    }

    #[test]
    fn total_energy_case1_initial_state() {
        let x = State::from_array([4.0, 0.0, 0.0, 0.0, 0.0, std::f64::consts::PI, 0.0, 0.0, 0.0, 0.0]);
        assert!((total_energy(&x, &defaults()) - 39.24).abs() <= 1e-10);
    }

    #[test]
    fn total_energy_invariant_under_full_turns() {
        let x = State::from_array([4.0, 0.0, 0.0, 0.3, 0.0, -0.5, 6.0, -3.0, 0.0, 0.0]);
        let tau = 2.0 * std::f64::consts::PI;
        let mut shifted = x;
        shifted.phi += tau;
        assert!(rel(total_energy(&x, &defaults()), total_energy(&shifted, &defaults())) <= 1e-9);
        let mut turned = x;
        turned.psi += tau;
        assert!(rel(total_energy(&x, &defaults()), total_energy(&turned, &defaults())) <= 1e-9);
    }
}
