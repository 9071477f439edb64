//! Path tracking for a bicycle-model vehicle.
//!
//! The crate provides the pieces of a closed-loop tracking study and the
//! harness that wires them together:
//!
//! - [`vehicle`]: bicycle kinematics, fixed-step integration, actuator lag
//!   filters, and Gaussian disturbance injection;
//! - [`errframe`]: tracking errors in the reference frame and their rate
//!   model;
//! - [`lyapunov`]: a smooth nonlinear tracking law with a quadratic
//!   candidate function;
//! - [`smc`]: a sliding-mode law with configurable switching functions;
//! - [`planner`]: waypoint-to-trajectory expansion with trapezoidal speed
//!   profiles;
//! - [`sim`]: the closed-loop runner producing traces and summary metrics.
//!
//! Runs are deterministic: a scenario plus a seed always reproduces the same
//! trace bit for bit.

pub mod angles;
pub mod errframe;
pub mod lyapunov;
pub mod planner;
pub mod sim;
pub mod smc;
pub mod steering;
pub mod trace_io;
pub mod vehicle;

pub use errframe::{compute_error, error_rates, ErrorModel, ErrorRates, Pose, TrackingError};
pub use lyapunov::{lyap_control, lyapunov_value, Feedforward, LyapGains, LyapunovController};
pub use planner::{plan_path, plan_segment, PlannerConfig, TrajectoryPoint, Waypoint};
pub use sim::{
    compute_metrics, run, ControllerChoice, PoseOffset, RunMetrics, RunTrace, ScenarioConfig,
    SimError, StepDiag, TraceStep,
};
pub use smc::{
    reaching_rate, surfaces, SmcController, SmcDenominator, SmcDiagnostics, SmcParams, SmcState,
    SwitchMode,
};
pub use steering::steering_from_heading_rate;
pub use vehicle::{
    apply_command_noise, apply_pose_noise, filter_step, kinematics_deriv, step, ControlCommand,
    NoiseSpec, VehicleParams, VehicleState,
};
