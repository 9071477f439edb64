//! Sliding-mode tracking controller.
//!
//! Two surfaces are driven to zero:
//!
//! ```text
//! s1 = xe' + k1 * xe
//! s2 = ye' + k2 * ye + k3 * theta_e
//! ```
//!
//! Each surface follows the reaching law `s' = -Q * s - P * sw(s)`, where
//! `sw` is the switching function (sign, saturation, or tanh). The speed
//! channel integrates a commanded acceleration
//!
//! ```text
//! v_c' = (-v_r * theta_e' * sin(theta_e) - ye' * omega_d - ye * omega_dot_d
//!         + v_dot_d - k1 * xe' - Q1 * s1 - P1 * sw(s1)) / cos(theta_e)
//! ```
//!
//! into the speed command `v_c` (rectangle rule, clamped to `[0, v_max]`),
//! and the steering channel produces a heading rate
//!
//! ```text
//! theta_c' = omega_d + (-Q2 * s2 - P2 * sw(s2) - k2 * ye' + omega_dot_d * xe
//!            + omega_d * xe' - v_c' * sin(theta_e)) / (v_r * sin(theta_e) + k3)
//! ```
//!
//! converted to a steering angle through `atan(l * theta_c' / v_r)`. The
//! leading terms of each numerator cancel the surface drift (equivalent
//! control); the `Q`/`P` terms steer trajectories back onto the surface
//! (corrective control).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::errframe::{ErrorRates, TrackingError};
use crate::lyapunov::Feedforward;
use crate::steering::steering_from_heading_rate;
use crate::vehicle::ControlCommand;

/// Switching function applied to a surface value; odd, zero at zero, and
/// bounded by 1 in magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SwitchMode {
    /// Discontinuous sign. Fast but chatters. Surface values at
    /// machine-noise level (below 1e-12) count as zero so integration
    /// round-off cannot fire full corrective kicks.
    Sign,
    /// Linear inside a boundary layer of the given width, then saturated.
    Saturation { width: f64 },
    /// `tanh(s / width)`; smooth everywhere.
    SmoothTanh { width: f64 },
}

/// Surface magnitudes below this are treated as exactly zero by the sign
/// switch.
const SIGN_DEAD_ZONE: f64 = 1e-12;

impl SwitchMode {
    /// Evaluate the switching function.
    pub fn eval(&self, s: f64) -> f64 {
        match *self {
            SwitchMode::Sign => {
                if s > SIGN_DEAD_ZONE {
                    1.0
                } else if s < -SIGN_DEAD_ZONE {
                    -1.0
                } else {
                    0.0
                }
            }
            SwitchMode::Saturation { width } => (s / width).clamp(-1.0, 1.0),
            SwitchMode::SmoothTanh { width } => (s / width).tanh(),
        }
    }
}

/// Which expression the steering-channel denominator uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmcDenominator {
    /// `v_r * sin(theta_e) + k3` (published form).
    #[default]
    Sin,
    /// `v_r * cos(theta_e) + k3`, the coefficient the s2 expansion yields.
    Cos,
}

/// Surface and reaching-law gains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmcParams {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub p1: f64,
    pub q1: f64,
    pub p2: f64,
    pub q2: f64,
    pub switch: SwitchMode,
    pub denominator: SmcDenominator,
}

#[derive(Debug, Error)]
pub enum SmcParamError {
    #[error("surface gain {name} must be positive and finite, got {value}")]
    NotPositive { name: &'static str, value: f64 },
    #[error("reaching gain {name} must be non-negative and finite, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("switch width must be positive, got {0}")]
    BadWidth(f64),
}

impl SmcParams {
    /// Validated constructor: surface gains positive, reaching gains
    /// non-negative, switch width positive where applicable.
    pub fn new(
        k1: f64,
        k2: f64,
        k3: f64,
        p1: f64,
        q1: f64,
        p2: f64,
        q2: f64,
        switch: SwitchMode,
        denominator: SmcDenominator,
    ) -> Result<Self, SmcParamError> {
        for (name, value) in [("k1", k1), ("k2", k2), ("k3", k3)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(SmcParamError::NotPositive { name, value });
            }
        }
        for (name, value) in [("p1", p1), ("q1", q1), ("p2", p2), ("q2", q2)] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(SmcParamError::Negative { name, value });
            }
        }
        match switch {
            SwitchMode::Saturation { width } | SwitchMode::SmoothTanh { width } if width <= 0.0 => {
                return Err(SmcParamError::BadWidth(width));
            }
            _ => {}
        }
        Ok(Self { k1, k2, k3, p1, q1, p2, q2, switch, denominator })
    }

    /// Gain set used for the bundled scenarios.
    pub fn nominal(switch: SwitchMode) -> Self {
        Self {
            k1: 0.22,
            k2: 2.0,
            k3: 2.55,
            p1: 0.48,
            q1: 0.048,
            p2: 3.7,
            q2: 0.3,
            switch,
            denominator: SmcDenominator::Sin,
        }
    }

    /// Discrete band the reaching law settles into at sample time `ts` with
    /// the sign switch: the fixed point of `band = ts * (P + Q * band)`.
    pub fn chatter_band(&self, ts: f64, channel: usize) -> f64 {
        let (p, q) = if channel == 1 { (self.p1, self.q1) } else { (self.p2, self.q2) };
        ts * p / (1.0 - ts * q)
    }
}

/// Per-run controller state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmcState {
    /// Integrated speed command [m/s].
    pub v_c: f64,
    /// Last evaluated surfaces, for diagnostics.
    pub s1: f64,
    pub s2: f64,
}

impl SmcState {
    pub fn new(initial_speed: f64) -> Self {
        Self { v_c: initial_speed, s1: 0.0, s2: 0.0 }
    }
}

/// Intermediate values exposed for traces and tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmcDiagnostics {
    pub s1: f64,
    pub s2: f64,
    pub v_c_dot: f64,
    pub theta_c_dot: f64,
}

#[derive(Debug, Error)]
pub enum SmcError {
    #[error("orientation error {theta_e} rad at or beyond PI/2; speed law singular")]
    OrientationSingularity { theta_e: f64 },
    #[error("non-finite intermediate value in {what}")]
    NonFinite { what: &'static str },
}

/// Sliding surface values for the given errors and rates.
pub fn surfaces(err: &TrackingError, rates: &ErrorRates, p: &SmcParams) -> (f64, f64) {
    (
        rates.xe_dot + p.k1 * err.xe,
        rates.ye_dot + p.k2 * err.ye + p.k3 * err.theta_e,
    )
}

/// Target surface rate `-Q * s - P * sw(s)`.
pub fn reaching_rate(s: f64, q: f64, p: f64, switch: SwitchMode) -> f64 {
    -q * s - p * switch.eval(s)
}

/// Minimum magnitude allowed for the steering-channel denominator; the
/// clamp preserves the sign.
const DEN_GUARD: f64 = 0.05;

/// Sliding-mode controller holding the speed integrator.
#[derive(Debug, Clone)]
pub struct SmcController {
    params: SmcParams,
    state: SmcState,
    wheelbase: f64,
    phi_max: f64,
    v_max: f64,
}

impl SmcController {
    pub fn new(params: SmcParams, initial_speed: f64, wheelbase: f64, phi_max: f64, v_max: f64) -> Self {
        Self {
            params,
            state: SmcState::new(initial_speed),
            wheelbase,
            phi_max,
            v_max,
        }
    }

    pub fn state(&self) -> &SmcState {
        &self.state
    }

    pub fn params(&self) -> &SmcParams {
        &self.params
    }

    /// Compute the command for one sample of duration `dt` and advance the
    /// speed integrator. `v_r` is the measured plant speed, used both in the
    /// control expressions and in the steering conversion.
    pub fn step(
        &mut self,
        err: &TrackingError,
        rates: &ErrorRates,
        ff: &Feedforward,
        v_r: f64,
        dt: f64,
    ) -> Result<(ControlCommand, SmcDiagnostics), SmcError> {
        let p = &self.params;
        if err.theta_e.abs() >= std::f64::consts::FRAC_PI_2 {
            return Err(SmcError::OrientationSingularity { theta_e: err.theta_e });
        }
        let (s1, s2) = surfaces(err, rates, p);
        let (sin_te, cos_te) = err.theta_e.sin_cos();

        // Speed channel: equivalent control plus reaching terms, divided by
        // the cos(theta_e) input gain.
        let v_c_dot = (-v_r * rates.theta_e_dot * sin_te
            - rates.ye_dot * ff.omega_d
            - err.ye * ff.omega_dot_d
            + ff.v_dot_d
            - p.k1 * rates.xe_dot
            + reaching_rate(s1, p.q1, p.p1, p.switch))
            / cos_te;
        if !v_c_dot.is_finite() {
            return Err(SmcError::NonFinite { what: "speed channel" });
        }

        // Steering channel.
        let den_raw = match p.denominator {
            SmcDenominator::Sin => v_r * sin_te + p.k3,
            SmcDenominator::Cos => v_r * cos_te + p.k3,
        };
        let den = if den_raw.abs() < DEN_GUARD {
            if den_raw < 0.0 {
                -DEN_GUARD
            } else {
                DEN_GUARD
            }
        } else {
            den_raw
        };
        let theta_c_dot = ff.omega_d
            + (reaching_rate(s2, p.q2, p.p2, p.switch) - p.k2 * rates.ye_dot
                + ff.omega_dot_d * err.xe
                + ff.omega_d * rates.xe_dot
                - v_c_dot * sin_te)
                / den;
        if !theta_c_dot.is_finite() {
            return Err(SmcError::NonFinite { what: "steering channel" });
        }

        // Rectangle-rule speed integration with saturation.
        self.state.v_c = (self.state.v_c + v_c_dot * dt).clamp(0.0, self.v_max);
        self.state.s1 = s1;
        self.state.s2 = s2;

        let phi = steering_from_heading_rate(theta_c_dot, v_r, self.wheelbase, self.phi_max);
        Ok((
            ControlCommand { v: self.state.v_c, phi },
            SmcDiagnostics { s1, s2, v_c_dot, theta_c_dot },
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_6;

    fn nominal() -> SmcParams {
        SmcParams::nominal(SwitchMode::Sign)
    }

    #[test]
    fn params_validation() {
        assert!(SmcParams::new(0.0, 2.0, 2.55, 0.48, 0.048, 3.7, 0.3, SwitchMode::Sign, SmcDenominator::Sin).is_err());
        assert!(SmcParams::new(0.22, 2.0, 2.55, -0.1, 0.048, 3.7, 0.3, SwitchMode::Sign, SmcDenominator::Sin).is_err());
        assert!(SmcParams::new(0.22, 2.0, 2.55, 0.48, 0.048, 3.7, 0.3, SwitchMode::SmoothTanh { width: 0.0 }, SmcDenominator::Sin).is_err());
        assert!(SmcParams::new(0.22, 2.0, 2.55, 0.48, 0.048, 3.7, 0.3, SwitchMode::Sign, SmcDenominator::Sin).is_ok());
    }

    #[test]
    fn surfaces_zero_at_equilibrium() {
        let s = surfaces(&TrackingError::zero(), &zero_rates(), &nominal());
        assert_eq!(s, (0.0, 0.0));
    }

    #[test]
    fn surface_one_substitution() {
        let err = TrackingError::new(1.0, 0.0, 0.0);
        let (s1, _) = surfaces(&err, &zero_rates(), &nominal());
        assert!((s1 - 0.22).abs() < 1e-15);
    }

    #[test]
    fn surface_two_substitution() {
        let err = TrackingError::new(0.0, 1.0, 0.5);
        let (_, s2) = surfaces(&err, &zero_rates(), &nominal());
        assert!((s2 - 3.275).abs() < 1e-12); // 2*1 + 2.55*0.5
    }

    #[test]
    fn reaching_rate_substitutions() {
        assert_eq!(reaching_rate(0.0, 0.048, 0.48, SwitchMode::Sign), 0.0);
        let r = reaching_rate(1.0, 0.048, 0.48, SwitchMode::Sign);
        assert!((r + 0.528).abs() < 1e-15);
        let r = reaching_rate(-1.0, 0.3, 3.7, SwitchMode::Sign);
        assert!((r - 4.0).abs() < 1e-15);
    }

    #[test]
    fn switch_function_contract() {
        for sw in [
            SwitchMode::Sign,
            SwitchMode::Saturation { width: 0.1 },
            SwitchMode::SmoothTanh { width: 0.1 },
        ] {
            assert_eq!(sw.eval(0.0), 0.0);
            for &s in &[0.01, 0.5, 3.0] {
                assert!(sw.eval(s) > 0.0);
                assert_eq!(sw.eval(-s), -sw.eval(s));
                assert!(sw.eval(s).abs() <= 1.0);
            }
        }
    }

    fn zero_rates() -> ErrorRates {
        ErrorRates { xe_dot: 0.0, ye_dot: 0.0, theta_e_dot: 0.0 }
    }

    #[test]
    fn equilibrium_passes_feedforward() {
        let mut ctl = SmcController::new(nominal(), 1.0, 2.5, FRAC_PI_6, 2.0);
        let ff = Feedforward { v_d: 1.0, omega_d: 0.0, v_dot_d: 0.0, omega_dot_d: 0.0 };
        let (cmd, diag) = ctl
            .step(&TrackingError::zero(), &zero_rates(), &ff, 1.0, 0.1)
            .unwrap();
        assert_eq!(diag.v_c_dot, 0.0);
        assert_eq!(diag.theta_c_dot, 0.0);
        assert_eq!(cmd.v, 1.0);
        assert_eq!(cmd.phi, 0.0);
    }

    /// Single-step hand substitution: xe = 1, everything else zero, v_r = 1.
    #[test]
    fn speed_channel_substitution() {
        let mut ctl = SmcController::new(nominal(), 1.0, 2.5, FRAC_PI_6, 2.0);
        let err = TrackingError::new(1.0, 0.0, 0.0);
        let (_, diag) = ctl
            .step(&err, &zero_rates(), &Feedforward::default(), 1.0, 0.1)
            .unwrap();
        assert!((diag.s1 - 0.22).abs() < 1e-15);
        // -(Q1 * 0.22 + P1) / cos(0)
        assert!((diag.v_c_dot + 0.49056).abs() < 1e-12);
        assert!((ctl.state().v_c - (1.0 - 0.049056)).abs() < 1e-12);
    }

    #[test]
    fn denominator_at_zero_error_is_k3() {
        // No guard is triggered: v_r * sin(0) + k3 = 2.55.
        let mut ctl = SmcController::new(nominal(), 1.0, 2.5, FRAC_PI_6, 2.0);
        let err = TrackingError::new(0.0, 1.0, 0.0);
        let (_, diag) = ctl
            .step(&err, &zero_rates(), &Feedforward::default(), 1.0, 0.1)
            .unwrap();
        // s2 = k2 * 1 = 2; theta_c_dot = (-Q2*2 - P2) / 2.55
        let expected = (-0.3 * 2.0 - 3.7) / 2.55;
        assert!((diag.theta_c_dot - expected).abs() < 1e-12);
    }

    #[test]
    fn orientation_singularity_rejected() {
        let mut ctl = SmcController::new(nominal(), 1.0, 2.5, FRAC_PI_6, 2.0);
        let err = TrackingError::new(0.0, 0.0, std::f64::consts::FRAC_PI_2);
        let res = ctl.step(&err, &zero_rates(), &Feedforward::default(), 1.0, 0.1);
        assert!(matches!(res, Err(SmcError::OrientationSingularity { .. })));
    }

    proptest! {
        /// With no angular feedforward, negating errors, rates, and the
        /// remaining reference signs (including the measured speed) negates
        /// the surfaces and the commanded acceleration exactly.
        #[test]
        fn odd_symmetry_without_angular_feedforward(
            xe in -2.0f64..2.0,
            ye in -2.0f64..2.0,
            te in -1.2f64..1.2,
            xed in -1.0f64..1.0,
            yed in -1.0f64..1.0,
            ted in -1.0f64..1.0,
            v_r in -2.0f64..2.0,
            v_d_dot in -1.0f64..1.0,
        ) {
            let p = nominal();
            let err = TrackingError::new(xe, ye, te);
            let rates = ErrorRates { xe_dot: xed, ye_dot: yed, theta_e_dot: ted };
            let neg_err = TrackingError::new(-xe, -ye, -te);
            let neg_rates = ErrorRates { xe_dot: -xed, ye_dot: -yed, theta_e_dot: -ted };

            let (s1, s2) = surfaces(&err, &rates, &p);
            let (n1, n2) = surfaces(&neg_err, &neg_rates, &p);
            prop_assert_eq!(n1, -s1);
            prop_assert_eq!(n2, -s2);

            let ff = Feedforward { v_d: 0.0, omega_d: 0.0, v_dot_d: v_d_dot, omega_dot_d: 0.0 };
            let neg_ff = Feedforward { v_dot_d: -v_d_dot, ..ff };
            let mut ctl_a = SmcController::new(p, 1.0, 2.5, FRAC_PI_6, 2.0);
            let mut ctl_b = SmcController::new(p, 1.0, 2.5, FRAC_PI_6, 2.0);
            let (_, da) = ctl_a.step(&err, &rates, &ff, v_r, 0.1).unwrap();
            let (_, db) = ctl_b.step(&neg_err, &neg_rates, &neg_ff, -v_r, 0.1).unwrap();
            prop_assert_eq!(db.s1, -da.s1);
            prop_assert_eq!(db.s2, -da.s2);
            prop_assert_eq!(db.v_c_dot, -da.v_c_dot);
        }
    }
}
