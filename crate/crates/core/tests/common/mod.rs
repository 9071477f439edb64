#![allow(dead_code)] // shared between test targets with different usage

//! Shared scenario builders for the integration tests.

use trackctl::planner::parse_waypoints;
use trackctl::{
    ControllerChoice, ErrorModel, NoiseSpec, PlannerConfig, PoseOffset, ScenarioConfig, Waypoint,
};

/// Bundled test course (long opening straight, then a loop of curves).
pub fn paper_like_waypoints() -> Vec<Waypoint> {
    let text = include_str!("../../../../paths/paper_like.txt");
    parse_waypoints(text).expect("bundled path parses")
}

/// Offset used by the convergence studies: half a meter in each axis and a
/// tenth of a radian in heading.
pub fn standard_offset() -> PoseOffset {
    PoseOffset { dx: 0.5, dy: 0.5, dtheta: 0.1 }
}

/// A straight 20 m leg along +y (heading 0 in the crate convention).
pub fn straight_waypoints(length: f64) -> Vec<Waypoint> {
    vec![Waypoint::new(0.0, 0.0), Waypoint::new(0.0, length)]
}

/// Planner settings used by the bundled course scenarios: mild corner
/// slowdown and a blend window long enough that the reference turn rate
/// stays within the car's steering envelope.
pub fn course_planner() -> PlannerConfig {
    PlannerConfig { corner_slowdown: 0.85, blend_window: 1.0, ..PlannerConfig::default() }
}

/// Noise-free scenario on the bundled course with actuator filters off.
pub fn nominal_scenario(controller: ControllerChoice) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::new("nominal", controller, paper_like_waypoints());
    cfg.noise = NoiseSpec::noiseless(1);
    cfg.vehicle.v_filter_tau = 0.0;
    cfg.vehicle.phi_filter_tau = 0.0;
    cfg.planner = course_planner();
    cfg.error_model = ErrorModel::Derived;
    cfg
}

/// Scenario with the default noise sigmas and actuator filters enabled.
pub fn noisy_scenario(controller: ControllerChoice, seed: u64) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::new("noisy", controller, paper_like_waypoints());
    cfg.noise.seed = seed;
    cfg.planner = course_planner();
    cfg.error_model = ErrorModel::Derived;
    cfg
}

/// Constant-speed straight scenario: feedforward is exact, so reaching and
/// band behavior can be observed without profile-ramp drift.
pub fn constant_speed_scenario(controller: ControllerChoice, length: f64, v: f64) -> ScenarioConfig {
    let wps = vec![Waypoint::with_speed(0.0, 0.0, v), Waypoint::with_speed(0.0, length, v)];
    let mut cfg = ScenarioConfig::new("constant-speed", controller, wps);
    cfg.noise = NoiseSpec::noiseless(1);
    cfg.vehicle.v_filter_tau = 0.0;
    cfg.vehicle.phi_filter_tau = 0.0;
    cfg.error_model = ErrorModel::Derived;
    cfg
}

