//! Lyapunov-based tracking controller.
//!
//! The control law is
//!
//! ```text
//! v_r     = v_d * cos(theta_e) - k1 * xe
//! omega_r = omega_d - k2 * v_d * sinc(theta_e) * ye - k3 * theta_e
//! ```
//!
//! where `sinc(x) = sin(x)/x` with the removable singularity handled. At zero
//! error the law passes the feedforward through exactly. The candidate
//! function `V = (xe^2 + ye^2 + theta_e^2) / 2` decreases along nominal
//! closed-loop transients for positive gains.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angles::sinc;
use crate::errframe::TrackingError;
use crate::steering::steering_from_heading_rate;
use crate::vehicle::ControlCommand;

/// Positive feedback gains of the control law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapGains {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

#[derive(Debug, Error)]
pub enum GainError {
    #[error("gain {name} must be positive and finite, got {value}")]
    NotPositive { name: &'static str, value: f64 },
}

impl LyapGains {
    /// Validated constructor; all gains must be positive and finite.
    pub fn new(k1: f64, k2: f64, k3: f64) -> Result<Self, GainError> {
        for (name, value) in [("k1", k1), ("k2", k2), ("k3", k3)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(GainError::NotPositive { name, value });
            }
        }
        Ok(Self { k1, k2, k3 })
    }

    /// Skip validation. Intended for experiments that deliberately probe
    /// out-of-range gains (e.g. sign-sensitivity studies).
    pub fn new_unchecked(k1: f64, k2: f64, k3: f64) -> Self {
        Self { k1, k2, k3 }
    }

    /// Gain set used for the bundled scenarios.
    pub fn nominal() -> Self {
        Self { k1: 0.9, k2: 1.1, k3: 3.0 }
    }
}

/// Reference feedforward consumed by the controllers at one sample.
#[derive(Debug, Clone, Copy, Default)]
pub struct Feedforward {
    pub v_d: f64,
    pub omega_d: f64,
    pub v_dot_d: f64,
    pub omega_dot_d: f64,
}

/// `(v_r, omega_r)` from the tracking error and feedforward.
pub fn lyap_control(err: &TrackingError, v_d: f64, omega_d: f64, gains: &LyapGains) -> (f64, f64) {
    let v_r = v_d * err.theta_e.cos() - gains.k1 * err.xe;
    let omega_r = omega_d - gains.k2 * v_d * sinc(err.theta_e) * err.ye - gains.k3 * err.theta_e;
    (v_r, omega_r)
}

/// Candidate function `V = (xe^2 + ye^2 + theta_e^2) / 2`.
pub fn lyapunov_value(err: &TrackingError) -> f64 {
    0.5 * (err.xe * err.xe + err.ye * err.ye + err.theta_e * err.theta_e)
}

/// Stateless controller wrapper that also maps the heading-rate output to a
/// steering command.
#[derive(Debug, Clone)]
pub struct LyapunovController {
    gains: LyapGains,
    wheelbase: f64,
    phi_max: f64,
}

impl LyapunovController {
    pub fn new(gains: LyapGains, wheelbase: f64, phi_max: f64) -> Self {
        Self { gains, wheelbase, phi_max }
    }

    /// Compute the command for one sample. The steering conversion uses the
    /// commanded speed (floored) as the speed in `atan(l * omega / v)`.
    pub fn step(&self, err: &TrackingError, ff: &Feedforward) -> ControlCommand {
        let (v_r, omega_r) = lyap_control(err, ff.v_d, ff.omega_d, &self.gains);
        let phi = steering_from_heading_rate(omega_r, v_r, self.wheelbase, self.phi_max);
        ControlCommand { v: v_r, phi }
    }

    pub fn gains(&self) -> &LyapGains {
        &self.gains
    }
}
