//! Feedback laws for the single motor torque.
//!
//! Both reference controllers drive the rod toward a speed-dependent target
//! angle `β₀ = a·tanh(v_ref − φ̇)`; leaning the rod makes the wheel
//! accelerate until the target speed is reached. The second law adds a
//! `k_θ·|θ|` term that speeds up whenever the stand angle drifts, which
//! suppresses precession. `|θ|` is continuous but not differentiable at
//! θ = 0; it is used as printed, not smoothed.

use serde::{Deserialize, Serialize};

use crate::eom::State;

/// Gains of the generalized rod-balance law
/// `u = k_p(β − β₀) + k_d·β̇ + k_θ·|θ|` with `β₀ = a·tanh(v_ref − φ̇)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gains {
    pub k_p: f64,
    pub k_d: f64,
    pub k_theta: f64,
    /// Rod-reference amplitude `a`; `|β₀| ≤ a` for all speeds.
    pub amplitude: f64,
    pub v_ref: f64,
}

impl Gains {
    /// Speed tracking at φ̇ = 2 with the rod upright.
    pub const CASE1: Gains = Gains {
        k_p: 20.0,
        k_d: 20.0,
        k_theta: 0.0,
        amplitude: 1.0,
        v_ref: 2.0,
    };

    /// Precession-limiting variant targeting φ̇ = 10.
    pub const CASE2: Gains = Gains {
        k_p: 5.0,
        k_d: 5.0,
        k_theta: 20.0,
        amplitude: 0.2,
        v_ref: 10.0,
    };
}

/// Which feedback law a scenario runs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ControlLaw {
    /// u ≡ 0.
    #[default]
    None,
    Case1,
    Case2,
    Custom(Gains),
}

/// Controller selection plus an optional experimentation-only torque clamp
/// (off by default and in every acceptance run).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControllerSpec {
    pub law: ControlLaw,
    pub u_max: Option<f64>,
}

impl ControllerSpec {
    pub fn none() -> Self {
        ControllerSpec::default()
    }

    pub fn case1() -> Self {
        ControllerSpec {
            law: ControlLaw::Case1,
            u_max: None,
        }
    }

    pub fn case2() -> Self {
        ControllerSpec {
            law: ControlLaw::Case2,
            u_max: None,
        }
    }

    pub fn custom(gains: Gains) -> Self {
        ControllerSpec {
            law: ControlLaw::Custom(gains),
            u_max: None,
        }
    }

    /// Evaluate the torque for a state (sample-and-hold over a step).
    pub fn torque(&self, x: &State) -> f64 {
        let raw = match self.law {
            ControlLaw::None => 0.0,
            ControlLaw::Case1 => control_case1(x),
            ControlLaw::Case2 => control_case2(x),
            ControlLaw::Custom(g) => control_custom(x, &g),
        };
        match self.u_max {
            Some(limit) => raw.clamp(-limit, limit),
            None => raw,
        }
    }
}

/// `u = k_p(β − β₀) + k_d·β̇ + k_θ·|θ|`, `β₀ = a·tanh(v_ref − φ̇)`.
pub fn control_custom(x: &State, gains: &Gains) -> f64 {
    let beta0 = gains.amplitude * (gains.v_ref - x.dphi).tanh();
    gains.k_p * (x.beta - beta0) + gains.k_d * x.dbeta + gains.k_theta * x.theta.abs()
}

/// `u = 20(β − β₀) + 20β̇` with `β₀ = tanh(2 − φ̇)`; no saturation.
pub fn control_case1(x: &State) -> f64 {
    control_custom(x, &Gains::CASE1)
}

/// `u = 5(β − β₀) + 5β̇ + 20|θ|` with `β₀ = 0.2·tanh(10 − φ̇)`.
pub fn control_case2(x: &State) -> f64 {
    control_custom(x, &Gains::CASE2)
}
