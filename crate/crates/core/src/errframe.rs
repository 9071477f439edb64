//! Tracking errors expressed in the reference (virtual car) frame.
//!
//! `compute_error` projects the world-frame pose difference onto the
//! reference heading: `xe` is the along-heading (longitudinal) component,
//! `ye` the cross-heading (lateral) component, and `theta_e = theta_r -
//! theta_d` the orientation mismatch. With the crate's heading convention
//! (motion direction `(sin theta, cos theta)`) the longitudinal axis is
//! `(sin theta_d, cos theta_d)` and the lateral axis `(cos theta_d,
//! -sin theta_d)`; both controllers rely on exactly this frame for their
//! stability arguments.

use serde::{Deserialize, Serialize};

use crate::angles::wrap_angle;

/// A 2-D pose in the crate's heading convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self { x, y, theta }
    }
}

/// Longitudinal, lateral and orientation errors in the reference frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackingError {
    /// Longitudinal error [m].
    pub xe: f64,
    /// Lateral error [m].
    pub ye: f64,
    /// Orientation error [rad], wrapped to `(-PI, PI]`.
    pub theta_e: f64,
}

impl TrackingError {
    pub fn new(xe: f64, ye: f64, theta_e: f64) -> Self {
        Self { xe, ye, theta_e }
    }

    pub fn zero() -> Self {
        Self { xe: 0.0, ye: 0.0, theta_e: 0.0 }
    }
}

/// Time derivatives of the tracking errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRates {
    pub xe_dot: f64,
    pub ye_dot: f64,
    pub theta_e_dot: f64,
}

/// Which lateral-rate model `error_rates` evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorModel {
    /// `ye' = -omega_r * xe + v_d * cos(theta_e)`. Kept available because it
    /// is the published form, but it does not vanish at perfect tracking;
    /// see the finite-difference checks for its measured residual.
    #[default]
    Verbatim,
    /// `ye' = -omega_r * xe + v_d * sin(theta_e)`, the form consistent with
    /// differentiating the error frame. Closed-loop scenarios for the
    /// sliding-mode controller should use this one.
    Derived,
}

/// Tracking error of `real` with respect to `desired`.
pub fn compute_error(real: Pose, desired: Pose) -> TrackingError {
    let dx = real.x - desired.x;
    let dy = real.y - desired.y;
    let (sin_d, cos_d) = desired.theta.sin_cos();
    TrackingError {
        xe: sin_d * dx + cos_d * dy,
        ye: cos_d * dx - sin_d * dy,
        theta_e: wrap_angle(real.theta - desired.theta),
    }
}

/// Error-dynamics rates for the given speeds and heading rates.
///
/// `v_r`/`omega_r` are the measured plant speed and heading rate,
/// `v_d`/`omega_d` the reference feedforward values.
pub fn error_rates(
    err: &TrackingError,
    v_r: f64,
    omega_r: f64,
    v_d: f64,
    omega_d: f64,
    model: ErrorModel,
) -> ErrorRates {
    let lateral = match model {
        ErrorModel::Verbatim => err.theta_e.cos(),
        ErrorModel::Derived => err.theta_e.sin(),
    };
    ErrorRates {
        xe_dot: v_r + omega_r * err.ye - v_d * err.theta_e.cos(),
        ye_dot: -omega_r * err.xe + v_d * lateral,
        theta_e_dot: omega_r - omega_d,
    }
}
