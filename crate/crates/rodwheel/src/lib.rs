//! Dynamics and batch simulation of the rodwheel: a disk rolling on a plane
//! without slipping, carrying a point-mass rod driven by a single motor
//! torque on the axle.
//!
//! The equations of motion are derived at runtime from the Lagrangian by
//! forward-mode automatic differentiation. Rolling without slipping is a
//! non-holonomic velocity constraint, enforced through two Lagrange
//! multipliers: every evaluation of the state derivative assembles the 8×8
//! multiplier-augmented linear system and solves it densely. On top of the
//! dynamics sit a fixed-step second-order integrator with fall detection,
//! the speed-tracking and precession-limiting feedback laws, independent
//! finite-difference oracles, and a scenario-driven CLI.
//!
//! Quick tour:
//! - [`ad`]: hyper-dual scalars ([`ad::AD2`]) and tangents ([`ad::Dual`]).
//! - [`kinematics`]: Euler rotations, angular velocity, wheel and rod
//!   geometry, [`kinematics::Params`].
//! - [`lagrangian`]: energies and exact derivative blocks of `L(q, q̇)`.
//! - [`eom`]: constraint matrix, mass matrix, forward dynamics.
//! - [`sim`]: RK2 stepping, trajectories, energy/constraint audits.
//! - [`control`]: the feedback laws.
//! - [`oracle`]: finite-difference validators kept independent of the AD
//!   engine.
//! - [`scenario`], [`cli`]: TOML scenarios, CSV export, subcommands.

pub mod ad;
pub mod cli;
pub mod control;
pub mod eom;
pub mod kinematics;
pub mod lagrangian;
pub mod linalg;
pub mod oracle;
pub mod scenario;
pub mod sim;

pub use control::{ControlLaw, ControllerSpec, Gains};
pub use eom::{forward_dynamics, ground_reaction, AccelSolution, DynamicsError, State};
pub use kinematics::{EulerAngles, Params, RotationMatrix};
pub use lagrangian::{total_energy, GenPos, GenVel};
pub use sim::{rk2_step, simulate, FallEvent, FallReason, Scenario, Trajectory};
