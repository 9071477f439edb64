//! Waypoint planner: expands a sparse polyline into trajectory samples.
//!
//! Each pair of consecutive waypoints is a straight segment. Speeds follow a
//! trapezoidal profile bounded by `a_max` and `v_max`; exit speeds at
//! interior waypoints shrink with the turn angle so the vehicle slows into
//! corners. Samples are spaced exactly `ts` apart in time with position,
//! heading, speeds and accelerations at every sample; heading changes at
//! corners are spread over a short blend window so the angular rates stay
//! finite.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angles::wrap_angle;

/// A sparse path vertex. `v_target` caps the speed at this waypoint: on the
/// first waypoint it is the entry speed, on the last the final speed, and on
/// interior waypoints an upper bound for the corner speed (all default 0 /
/// unbounded respectively when absent).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub x: f64,
    pub y: f64,
    pub v_target: Option<f64>,
}

impl Waypoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y, v_target: None }
    }

    pub fn with_speed(x: f64, y: f64, v: f64) -> Self {
        Self { x, y, v_target: Some(v) }
    }
}

/// One dense sample of the planned trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub x: f64,
    pub y: f64,
    /// Desired heading [rad] in the crate convention (motion direction is
    /// `(sin theta, cos theta)`).
    pub theta_d: f64,
    /// Desired speed [m/s], always >= 0.
    pub v_d: f64,
    /// Desired heading rate [rad/s], forward-difference consistent with
    /// `theta_d`.
    pub omega_d: f64,
    /// Desired acceleration [m/s^2], forward-difference consistent with
    /// `v_d`.
    pub v_dot_d: f64,
    /// Desired angular acceleration [rad/s^2].
    pub omega_dot_d: f64,
    /// Sample time [s]; consecutive samples differ by exactly `ts`.
    pub t: f64,
}

/// Sampling and profile limits.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PlannerConfig {
    /// Sample period [s].
    pub ts: f64,
    /// Acceleration bound [m/s^2].
    pub a_max: f64,
    /// Cruise speed bound [m/s].
    pub v_max: f64,
    /// Corner speed scale in (0, 1].
    pub corner_slowdown: f64,
    /// Time window [s] over which a corner's heading change is spread.
    pub blend_window: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            ts: 0.1,
            a_max: 1.0,
            v_max: 2.0,
            corner_slowdown: 0.6,
            blend_window: 0.5,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<(), PlannerError> {
        if !(self.ts > 0.0) || !(self.a_max > 0.0) || !(self.v_max > 0.0) {
            return Err(PlannerError::InvalidConfig("ts, a_max and v_max must be positive"));
        }
        if !(self.corner_slowdown > 0.0 && self.corner_slowdown <= 1.0) {
            return Err(PlannerError::InvalidConfig("corner_slowdown must be in (0, 1]"));
        }
        if self.blend_window < 0.0 {
            return Err(PlannerError::InvalidConfig("blend_window must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum PlannerError {
    #[error("invalid planner config: {0}")]
    InvalidConfig(&'static str),
    #[error("at least two waypoints are required, got {0}")]
    TooFewWaypoints(usize),
    #[error("waypoints {0} and {1} coincide; consecutive waypoints must be distinct")]
    DuplicateWaypoint(usize, usize),
    #[error("segment {index}: entry speed {v_entry} m/s cannot brake to {v_exit} m/s within {length} m at {a_max} m/s^2")]
    InfeasibleEntrySpeed { index: usize, v_entry: f64, v_exit: f64, length: f64, a_max: f64 },
    #[error("segment {index}: exit speed {v_exit} m/s is unreachable from {v_entry} m/s within {length} m at {a_max} m/s^2")]
    UnreachableExitSpeed { index: usize, v_entry: f64, v_exit: f64, length: f64, a_max: f64 },
}

/// Parse a waypoint file: one `x,y[,v_target]` triple per line, `#` starts
/// a comment, blank lines are skipped.
pub fn parse_waypoints(text: &str) -> Result<Vec<Waypoint>, WaypointParseError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(WaypointParseError {
                line: lineno + 1,
                reason: "expected `x,y` or `x,y,v_target`",
            });
        }
        let parse = |s: &str| -> Result<f64, WaypointParseError> {
            s.parse().map_err(|_| WaypointParseError { line: lineno + 1, reason: "not a number" })
        };
        let x = parse(fields[0])?;
        let y = parse(fields[1])?;
        let v_target = if fields.len() == 3 { Some(parse(fields[2])?) } else { None };
        out.push(Waypoint { x, y, v_target });
    }
    Ok(out)
}

#[derive(Debug, Error)]
#[error("waypoint file line {line}: {reason}")]
pub struct WaypointParseError {
    pub line: usize,
    pub reason: &'static str,
}

/// Closed-form trapezoid through one segment.
#[derive(Debug, Clone, Copy)]
struct Profile {
    v_in: f64,
    v_peak: f64,
    v_out: f64,
    a: f64,
    t_acc: f64,
    t_cruise: f64,
    t_dec: f64,
    d_acc: f64,
    d_cruise: f64,
}

impl Profile {
    fn total_time(&self) -> f64 {
        self.t_acc + self.t_cruise + self.t_dec
    }

    /// Distance and speed at time `t` (clamped into the profile).
    fn eval(&self, t: f64) -> (f64, f64) {
        let t = t.clamp(0.0, self.total_time());
        if t <= self.t_acc {
            (self.v_in * t + 0.5 * self.a * t * t, self.v_in + self.a * t)
        } else if t <= self.t_acc + self.t_cruise {
            let tc = t - self.t_acc;
            (self.d_acc + self.v_peak * tc, self.v_peak)
        } else {
            let td = t - self.t_acc - self.t_cruise;
            (
                self.d_acc + self.d_cruise + self.v_peak * td - 0.5 * self.a * td * td,
                self.v_peak - self.a * td,
            )
        }
    }
}

fn build_profile(
    index: usize,
    length: f64,
    v_in: f64,
    v_out: f64,
    cfg: &PlannerConfig,
) -> Result<Profile, PlannerError> {
    let a = cfg.a_max;
    let feas = 2.0 * a * length + 1e-12;
    if v_in * v_in - v_out * v_out > feas {
        return Err(PlannerError::InfeasibleEntrySpeed {
            index,
            v_entry: v_in,
            v_exit: v_out,
            length,
            a_max: a,
        });
    }
    if v_out * v_out - v_in * v_in > feas {
        return Err(PlannerError::UnreachableExitSpeed {
            index,
            v_entry: v_in,
            v_exit: v_out,
            length,
            a_max: a,
        });
    }
    let v_peak = ((2.0 * a * length + v_in * v_in + v_out * v_out) / 2.0)
        .sqrt()
        .min(cfg.v_max)
        .max(v_in.max(v_out));
    let t_acc = (v_peak - v_in) / a;
    let t_dec = (v_peak - v_out) / a;
    let d_acc = (v_peak * v_peak - v_in * v_in) / (2.0 * a);
    let d_dec = (v_peak * v_peak - v_out * v_out) / (2.0 * a);
    let d_cruise = (length - d_acc - d_dec).max(0.0);
    let t_cruise = if v_peak > 0.0 { d_cruise / v_peak } else { 0.0 };
    Ok(Profile { v_in, v_peak, v_out, a, t_acc, t_cruise, t_dec, d_acc, d_cruise })
}

/// Number of `ts` intervals covering duration `t` (at least one).
fn intervals(t: f64, ts: f64) -> usize {
    ((t / ts - 1e-9).ceil().max(1.0)) as usize
}

/// Position/speed samples along one straight segment; the last sample is
/// snapped onto the end waypoint.
fn sample_segment(
    from: &Waypoint,
    to: &Waypoint,
    profile: &Profile,
    heading: f64,
    cfg: &PlannerConfig,
) -> Vec<(f64, f64, f64, f64)> {
    let total = profile.total_time();
    let n = intervals(total, cfg.ts);
    let (sin_h, cos_h) = heading.sin_cos();
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        if k == n {
            // Snap the final sample exactly onto the waypoint.
            out.push((to.x, to.y, profile.v_out, heading));
        } else {
            let (s, v) = profile.eval(k as f64 * cfg.ts);
            out.push((from.x + s * sin_h, from.y + s * cos_h, v, heading));
        }
    }
    out
}

/// Segment heading in the crate convention: the unit motion direction is
/// `(sin theta, cos theta)`.
fn segment_heading(from: &Waypoint, to: &Waypoint) -> f64 {
    (to.x - from.x).atan2(to.y - from.y)
}

fn segment_length(from: &Waypoint, to: &Waypoint) -> f64 {
    ((to.x - from.x).powi(2) + (to.y - from.y).powi(2)).sqrt()
}

/// Attach times and forward-difference derivatives to raw samples.
fn finalize(samples: Vec<(f64, f64, f64, f64)>, ts: f64) -> Vec<TrajectoryPoint> {
    let n = samples.len();
    let mut points: Vec<TrajectoryPoint> = samples
        .into_iter()
        .enumerate()
        .map(|(k, (x, y, v, theta))| TrajectoryPoint {
            x,
            y,
            theta_d: wrap_angle(theta),
            v_d: v,
            omega_d: 0.0,
            v_dot_d: 0.0,
            omega_dot_d: 0.0,
            t: k as f64 * ts,
        })
        .collect();
    for k in 0..n.saturating_sub(1) {
        points[k].omega_d = wrap_angle(points[k + 1].theta_d - points[k].theta_d) / ts;
        points[k].v_dot_d = (points[k + 1].v_d - points[k].v_d) / ts;
    }
    for k in 0..n.saturating_sub(1) {
        points[k].omega_dot_d = (points[k + 1].omega_d - points[k].omega_d) / ts;
    }
    points
}

/// Plan one straight segment from `v_entry` to `v_exit`.
pub fn plan_segment(
    from: &Waypoint,
    to: &Waypoint,
    v_entry: f64,
    v_exit: f64,
    cfg: &PlannerConfig,
) -> Result<Vec<TrajectoryPoint>, PlannerError> {
    cfg.validate()?;
    let length = segment_length(from, to);
    if length <= 1e-9 {
        return Err(PlannerError::DuplicateWaypoint(0, 1));
    }
    let profile = build_profile(0, length, v_entry, v_exit, cfg)?;
    let heading = segment_heading(from, to);
    Ok(finalize(sample_segment(from, to, &profile, heading, cfg), cfg.ts))
}

/// Plan a full waypoint path: concatenated segment profiles with corner
/// slowdown and heading blending.
pub fn plan_path(waypoints: &[Waypoint], cfg: &PlannerConfig) -> Result<Vec<TrajectoryPoint>, PlannerError> {
    cfg.validate()?;
    if waypoints.len() < 2 {
        return Err(PlannerError::TooFewWaypoints(waypoints.len()));
    }
    let n_seg = waypoints.len() - 1;
    let mut lengths = Vec::with_capacity(n_seg);
    let mut headings = Vec::with_capacity(n_seg);
    for i in 0..n_seg {
        let l = segment_length(&waypoints[i], &waypoints[i + 1]);
        if l <= 1e-9 {
            return Err(PlannerError::DuplicateWaypoint(i, i + 1));
        }
        lengths.push(l);
        headings.push(segment_heading(&waypoints[i], &waypoints[i + 1]));
    }

    let clamp_v = |v: f64| v.clamp(0.0, cfg.v_max);
    let v_start = clamp_v(waypoints[0].v_target.unwrap_or(0.0));
    let v_end = clamp_v(waypoints[n_seg].v_target.unwrap_or(0.0));

    // Corner exit speeds, capped by any per-waypoint target.
    let mut exits = vec![0.0; n_seg];
    for i in 0..n_seg - 1 {
        let turn = wrap_angle(headings[i + 1] - headings[i]).abs();
        let mut v = cfg.v_max * cfg.corner_slowdown * (turn / 2.0).cos();
        v = v.max(0.0);
        if let Some(target) = waypoints[i + 1].v_target {
            v = v.min(target);
        }
        exits[i] = clamp_v(v);
    }
    exits[n_seg - 1] = v_end;

    // Backward pass: every exit must be brakeable to the next one.
    for i in (0..n_seg - 1).rev() {
        let reachable = (exits[i + 1] * exits[i + 1] + 2.0 * cfg.a_max * lengths[i + 1]).sqrt();
        exits[i] = exits[i].min(reachable);
    }
    let first_brake = (exits[0] * exits[0] + 2.0 * cfg.a_max * lengths[0]).sqrt();
    if v_start > first_brake + 1e-12 {
        return Err(PlannerError::InfeasibleEntrySpeed {
            index: 0,
            v_entry: v_start,
            v_exit: exits[0],
            length: lengths[0],
            a_max: cfg.a_max,
        });
    }

    // Forward pass: every exit must be reachable from its entry.
    let mut entry = v_start;
    for i in 0..n_seg {
        let reachable = (entry * entry + 2.0 * cfg.a_max * lengths[i]).sqrt();
        exits[i] = exits[i].min(reachable);
        entry = exits[i];
    }

    // Sample all segments and merge, dropping duplicated junction samples.
    let mut samples: Vec<(f64, f64, f64, f64)> = Vec::new();
    let mut junction_indices = Vec::with_capacity(n_seg.saturating_sub(1));
    let mut entry = v_start;
    for i in 0..n_seg {
        let profile = build_profile(i, lengths[i], entry, exits[i], cfg)?;
        let seg = sample_segment(&waypoints[i], &waypoints[i + 1], &profile, headings[i], cfg);
        if i == 0 {
            samples.extend(seg);
        } else {
            samples.extend(seg.into_iter().skip(1));
        }
        if i < n_seg - 1 {
            junction_indices.push(samples.len() - 1);
        }
        entry = exits[i];
    }

    // Spread each corner's heading change over the blend window.
    let half = ((cfg.blend_window / (2.0 * cfg.ts)).round() as usize).max(1);
    for (j, &c) in junction_indices.iter().enumerate() {
        let turn = wrap_angle(headings[j + 1] - headings[j]);
        if turn == 0.0 {
            continue;
        }
        let lo_limit = if j == 0 { 0 } else { (junction_indices[j - 1] + c) / 2 + 1 };
        let hi_limit = if j + 1 < junction_indices.len() {
            (c + junction_indices[j + 1]) / 2
        } else {
            samples.len() - 1
        };
        let lo = c.saturating_sub(half).max(lo_limit);
        let hi = (c + half).min(hi_limit);
        if hi <= lo {
            continue;
        }
        for k in lo..=hi {
            let frac = (k - lo) as f64 / (hi - lo) as f64;
            samples[k].3 = wrap_angle(headings[j] + turn * frac);
        }
    }

    Ok(finalize(samples, cfg.ts))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> PlannerConfig {
        PlannerConfig { ts: 0.1, a_max: 1.0, v_max: 2.0, corner_slowdown: 0.6, blend_window: 0.5 }
    }

    /// 10 m segment from rest to rest at v_max 2, a_max 1: 2 s accel, 3 s
    /// cruise, 2 s decel; 71 samples.
    #[test]
    fn trapezoid_by_hand() {
        let plan = plan_segment(
            &Waypoint::new(0.0, 0.0),
            &Waypoint::new(0.0, 10.0),
            0.0,
            0.0,
            &cfg(),
        )
        .unwrap();
        assert_eq!(plan.len(), 71);
        assert!((plan.last().unwrap().t - 7.0).abs() < 1e-9);
        // End of the acceleration phase: t = 2 s, 2 m covered, at v_max.
        let p20 = &plan[20];
        assert!((p20.v_d - 2.0).abs() < 1e-9);
        assert!((p20.y - 2.0).abs() < 1e-9);
        // Cruise midpoint.
        assert!((plan[35].v_d - 2.0).abs() < 1e-9);
        // Back at rest on the waypoint.
        let last = plan.last().unwrap();
        assert_eq!(last.v_d, 0.0);
        assert!((last.y - 10.0).abs() < 1e-12);
    }

    /// Short segment: triangular profile peaking at sqrt(a * L).
    #[test]
    fn triangular_profile_peak() {
        let plan = plan_segment(
            &Waypoint::new(0.0, 0.0),
            &Waypoint::new(0.0, 2.0),
            0.0,
            0.0,
            &cfg(),
        )
        .unwrap();
        let peak = plan.iter().map(|p| p.v_d).fold(0.0f64, f64::max);
        assert!((peak - 2.0f64.sqrt()).abs() < 0.1, "peak {peak}");
        assert!(peak <= 2.0f64.sqrt() + 1e-9);
    }

    #[test]
    fn infeasible_entry_rejected() {
        let res = plan_segment(
            &Waypoint::new(0.0, 0.0),
            &Waypoint::new(0.0, 1.0),
            2.0,
            0.0,
            &cfg(),
        );
        assert!(matches!(res, Err(PlannerError::InfeasibleEntrySpeed { .. })));
    }

    #[test]
    fn zero_length_segment_rejected() {
        let res = plan_segment(&Waypoint::new(1.0, 1.0), &Waypoint::new(1.0, 1.0), 0.0, 0.0, &cfg());
        assert!(matches!(res, Err(PlannerError::DuplicateWaypoint(..))));
    }

    #[test]
    fn two_collinear_waypoints_match_single_segment() {
        let a = Waypoint::new(0.0, 0.0);
        let b = Waypoint::new(0.0, 10.0);
        let seg = plan_segment(&a, &b, 0.0, 0.0, &cfg()).unwrap();
        let path = plan_path(&[a, b], &cfg()).unwrap();
        assert_eq!(seg, path);
    }

    #[test]
    fn square_path_slows_at_corners() {
        let wps = [
            Waypoint::new(0.0, 0.0),
            Waypoint::new(0.0, 20.0),
            Waypoint::new(20.0, 20.0),
            Waypoint::new(20.0, 0.0),
            Waypoint::new(0.0, 0.0),
        ];
        let c = cfg();
        let plan = plan_path(&wps, &c).unwrap();
        // Quarter-turn corners: exit speed = v_max * slowdown * cos(45 deg).
        let expected_corner = 2.0 * 0.6 * (std::f64::consts::FRAC_PI_4).cos();
        let mut corner_speeds = Vec::new();
        for w in &wps[1..4] {
            let p = plan
                .iter()
                .min_by(|a, b| {
                    let da = (a.x - w.x).powi(2) + (a.y - w.y).powi(2);
                    let db = (b.x - w.x).powi(2) + (b.y - w.y).powi(2);
                    da.partial_cmp(&db).unwrap()
                })
                .unwrap();
            corner_speeds.push(p.v_d);
        }
        for v in corner_speeds {
            assert!((v - expected_corner).abs() < 1e-6, "corner speed {v} vs {expected_corner}");
        }
        // omega_d is nonzero only inside blend windows near corners.
        let windows: Vec<(f64, f64)> = plan
            .iter()
            .filter(|p| p.omega_d.abs() > 1e-9)
            .map(|p| (p.x, p.y))
            .collect();
        for (x, y) in windows {
            let near_corner = wps[1..4]
                .iter()
                .any(|w| ((x - w.x).powi(2) + (y - w.y).powi(2)).sqrt() < 2.0);
            assert!(near_corner, "omega_d away from corners at ({x}, {y})");
        }
    }

    #[test]
    fn time_axis_is_uniform() {
        let plan = plan_path(
            &[Waypoint::new(0.0, 0.0), Waypoint::new(0.0, 12.0), Waypoint::new(6.0, 20.0)],
            &cfg(),
        )
        .unwrap();
        for (k, p) in plan.iter().enumerate() {
            assert!((p.t - k as f64 * 0.1).abs() < 1e-12);
        }
    }

    #[test]
    fn acceleration_bound_holds() {
        let c = cfg();
        let plan = plan_path(
            &[
                Waypoint::new(0.0, 0.0),
                Waypoint::new(0.0, 15.0),
                Waypoint::new(10.0, 25.0),
                Waypoint::new(25.0, 25.0),
                Waypoint::new(30.0, 10.0),
            ],
            &c,
        )
        .unwrap();
        for pair in plan.windows(2) {
            let dv = (pair[1].v_d - pair[0].v_d).abs();
            assert!(dv / c.ts <= c.a_max + 1e-9, "dv/ts = {}", dv / c.ts);
        }
        for p in &plan {
            assert!(p.v_d >= 0.0);
            assert!(p.v_dot_d.abs() <= c.a_max + 1e-9);
        }
    }

    #[test]
    fn integrating_the_plan_recovers_waypoints() {
        let c = cfg();
        let wps = [
            Waypoint::new(0.0, 0.0),
            Waypoint::new(0.0, 15.0),
            Waypoint::new(8.0, 24.0),
            Waypoint::new(20.0, 26.0),
        ];
        let plan = plan_path(&wps, &c).unwrap();
        // Rectangle-rule world integration of the planned velocity must stay
        // close to the sampled positions, and in particular pass by every
        // waypoint.
        let (mut x, mut y) = (plan[0].x, plan[0].y);
        let mut worst = 0.0f64;
        for p in &plan {
            let drift = ((x - p.x).powi(2) + (y - p.y).powi(2)).sqrt();
            worst = worst.max(drift);
            x += p.v_d * p.theta_d.sin() * c.ts;
            y += p.v_d * p.theta_d.cos() * c.ts;
        }
        assert!(worst <= 2.0 * c.v_max * c.ts, "drift {worst}");
    }

    #[test]
    fn plans_are_deterministic() {
        let wps = [Waypoint::new(0.0, 0.0), Waypoint::new(3.0, 14.0), Waypoint::new(9.0, 22.0)];
        let a = plan_path(&wps, &cfg()).unwrap();
        let b = plan_path(&wps, &cfg()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn waypoint_file_parsing() {
        let text = "# demo path\n0, 0\n0, 35\n8, 55, 1.5\n\n  # trailing comment\n20, 60 # inline\n";
        let wps = parse_waypoints(text).unwrap();
        assert_eq!(wps.len(), 4);
        assert_eq!(wps[2], Waypoint::with_speed(8.0, 55.0, 1.5));
        assert_eq!(wps[3], Waypoint::new(20.0, 60.0));

        let err = parse_waypoints("1,2\nbogus line\n").unwrap_err();
        assert_eq!(err.line, 2);
        let err = parse_waypoints("1,2\n3,4,5,6\n").unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn constant_speed_segment_has_flat_profile() {
        let plan = plan_segment(
            &Waypoint::new(0.0, 0.0),
            &Waypoint::new(0.0, 10.0),
            2.0,
            2.0,
            &cfg(),
        )
        .unwrap();
        assert!(plan.iter().all(|p| (p.v_d - 2.0).abs() < 1e-12));
        assert_eq!(plan.len(), 51); // 5 s at 2 m/s
    }
}
