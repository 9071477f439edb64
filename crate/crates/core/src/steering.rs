//! Conversion from a commanded heading rate to a steering angle.

/// Speed floor used in the heading-rate to steering conversion so the
/// mapping stays total at standstill.
pub const V_FLOOR: f64 = 0.1;

/// Steering angle realizing heading rate `omega` at speed `v_r`:
/// `phi = atan(l * omega / max(v_r, V_FLOOR))`, clamped to `phi_max`.
///
/// Inverts the plant relation `theta' = v / l * tan(phi)`.
pub fn steering_from_heading_rate(omega: f64, v_r: f64, wheelbase: f64, phi_max: f64) -> f64 {
    let v = v_r.max(V_FLOOR);
    (wheelbase * omega / v).atan().clamp(-phi_max, phi_max)
}
