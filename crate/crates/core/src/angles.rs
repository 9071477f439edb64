//! Angle helpers shared across the crate.

use std::f64::consts::PI;

/// Wrap an angle to the half-open interval `(-PI, PI]`.
pub fn wrap_angle(angle: f64) -> f64 {
    let r = angle.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// `sin(x)/x` with the removable singularity handled.
///
/// Below `|x| < 1e-4` the Taylor polynomial `1 - x^2/6` is used, so the
/// function is exactly 1 at zero and smooth through it.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}
