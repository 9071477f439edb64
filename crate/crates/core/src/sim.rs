//! Closed-loop harness: planner, controller and plant wired together.
//!
//! The loop runs at the planner sample period `ts`. Every cycle the
//! controller reads a (possibly noise-perturbed) view of the plant pose,
//! computes errors against the current trajectory sample, and issues a
//! command. The command is held for the whole period (zero-order hold) while
//! the plant integrates in finer sub-steps. Sensor noise only affects what
//! the controller sees; actuation noise only affects what the plant
//! receives; the recorded trace carries the true pose and true errors.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::errframe::{compute_error, error_rates, ErrorModel, Pose};
use crate::lyapunov::{lyapunov_value, Feedforward, LyapGains, LyapunovController};
use crate::planner::{plan_path, PlannerConfig, PlannerError, Waypoint};
use crate::smc::{SmcController, SmcError, SmcParams};
use crate::vehicle::{
    apply_command_noise, apply_pose_noise, step as plant_step, NoiseSpec, VehicleError,
    VehicleParams, VehicleState,
};

/// Which control law drives the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ControllerChoice {
    Lyapunov,
    Smc,
}

/// World-frame offset applied to the vehicle's initial pose.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct PoseOffset {
    pub dx: f64,
    pub dy: f64,
    pub dtheta: f64,
}

/// Complete description of one experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub controller: ControllerChoice,
    pub lyap_gains: LyapGains,
    pub smc_params: SmcParams,
    pub vehicle: VehicleParams,
    /// Plant integration sub-steps per control period.
    pub sub_steps: u32,
    /// Clamp commanded speed at zero (no reversing).
    pub forward_only: bool,
    pub noise: NoiseSpec,
    pub planner: PlannerConfig,
    pub waypoints: Vec<Waypoint>,
    pub initial_offset: PoseOffset,
    /// Optional wall-clock cap on simulated time [s].
    pub duration_cap: Option<f64>,
    pub error_model: ErrorModel,
}

impl ScenarioConfig {
    /// A ready-to-run scenario with nominal gains and defaults; callers
    /// override fields as needed.
    pub fn new(name: impl Into<String>, controller: ControllerChoice, waypoints: Vec<Waypoint>) -> Self {
        Self {
            name: name.into(),
            controller,
            lyap_gains: LyapGains::nominal(),
            smc_params: SmcParams::nominal(crate::smc::SwitchMode::Sign),
            vehicle: VehicleParams::default(),
            sub_steps: 10,
            forward_only: true,
            noise: NoiseSpec::default(),
            planner: PlannerConfig::default(),
            waypoints,
            initial_offset: PoseOffset::default(),
            duration_cap: None,
            error_model: ErrorModel::Verbatim,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.vehicle.validate().map_err(|e| SimError::InvalidConfig(e.to_string()))?;
        self.noise.validate().map_err(|e| SimError::InvalidConfig(e.to_string()))?;
        self.planner.validate().map_err(|e| SimError::InvalidConfig(e.to_string()))?;
        if self.sub_steps == 0 {
            return Err(SimError::InvalidConfig("sub_steps must be >= 1".into()));
        }
        if self.waypoints.len() < 2 {
            return Err(SimError::InvalidConfig("at least two waypoints required".into()));
        }
        Ok(())
    }
}

/// Controller-specific extra columns of a trace row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StepDiag {
    /// Candidate-function value of the true errors.
    Lyapunov { v: f64 },
    /// Sliding surfaces as the controller evaluated them.
    Smc { s1: f64, s2: f64 },
}

/// One recorded control period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub t: f64,
    pub xd: f64,
    pub yd: f64,
    pub thetad: f64,
    pub vd: f64,
    pub omegad: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub xe: f64,
    pub ye: f64,
    pub thetae: f64,
    pub v_cmd: f64,
    pub phi_cmd: f64,
    pub diag: StepDiag,
}

/// Full record of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub controller: ControllerChoice,
    pub ts: f64,
    /// Length the plan would have run without a duration cap.
    pub plan_len: usize,
    pub steps: Vec<TraceStep>,
}

/// Summary statistics of a trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub max_xe: f64,
    pub rms_xe: f64,
    pub max_ye: f64,
    pub rms_ye: f64,
    pub max_thetae: f64,
    pub rms_thetae: f64,
    /// Total variation of the steering command.
    pub steering_tv: f64,
    /// Total variation of the speed command.
    pub speed_tv: f64,
    pub completed: bool,
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Planner(#[from] PlannerError),
    #[error("plant failed at step {step}: {source}")]
    Vehicle { step: usize, source: VehicleError },
    #[error("controller singular at step {step}: {source}")]
    Controller { step: usize, source: SmcError },
    #[error("invalid scenario: {0}")]
    InvalidConfig(String),
    #[error("metrics require a non-empty trace")]
    EmptyTrace,
}

enum ControllerImpl {
    Lyapunov(LyapunovController),
    Smc(SmcController),
}

/// Anti-windup ceiling for the integrated speed command, relative to the
/// planner cruise bound. Headroom above cruise lets the speed channel make
/// up lost ground while the clamp still prevents divergence when the
/// steering saturates.
const SPEED_HEADROOM: f64 = 1.25;

/// Execute a scenario and summarize it.
pub fn run(cfg: &ScenarioConfig) -> Result<(RunTrace, RunMetrics), SimError> {
    cfg.validate()?;
    let plan = plan_path(&cfg.waypoints, &cfg.planner)?;
    let plan_len = plan.len();
    let n_steps = match cfg.duration_cap {
        Some(cap) => plan_len.min((cap / cfg.planner.ts + 1e-9).floor() as usize + 1),
        None => plan_len,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.noise.seed);
    let first = &plan[0];
    let mut state = VehicleState::new(
        first.x + cfg.initial_offset.dx,
        first.y + cfg.initial_offset.dy,
        crate::angles::wrap_angle(first.theta_d + cfg.initial_offset.dtheta),
        first.v_d,
        0.0,
    );

    let mut controller = match cfg.controller {
        ControllerChoice::Lyapunov => ControllerImpl::Lyapunov(LyapunovController::new(
            cfg.lyap_gains,
            cfg.vehicle.wheelbase,
            cfg.vehicle.phi_max,
        )),
        ControllerChoice::Smc => ControllerImpl::Smc(SmcController::new(
            cfg.smc_params,
            first.v_d,
            cfg.vehicle.wheelbase,
            cfg.vehicle.phi_max,
            cfg.planner.v_max * SPEED_HEADROOM,
        )),
    };

    let sub_dt = cfg.planner.ts / cfg.sub_steps as f64;
    let mut steps = Vec::with_capacity(n_steps);

    for (k, target) in plan.iter().take(n_steps).enumerate() {
        let measured = apply_pose_noise(&state, &cfg.noise, &mut rng);
        let err_seen = compute_error(
            Pose::new(measured.x, measured.y, measured.theta),
            Pose::new(target.x, target.y, target.theta_d),
        );
        let ff = Feedforward {
            v_d: target.v_d,
            omega_d: target.omega_d,
            v_dot_d: target.v_dot_d,
            omega_dot_d: target.omega_dot_d,
        };

        let (mut cmd, diag) = match &mut controller {
            ControllerImpl::Lyapunov(ctl) => {
                let cmd = ctl.step(&err_seen, &ff);
                (cmd, None)
            }
            ControllerImpl::Smc(ctl) => {
                // Measured heading rate comes from the plant's actuator
                // states; pose noise does not touch v and phi.
                let omega_r = state.v / cfg.vehicle.wheelbase * state.phi.tan();
                let rates = error_rates(&err_seen, state.v, omega_r, ff.v_d, ff.omega_d, cfg.error_model);
                let (cmd, diag) = ctl
                    .step(&err_seen, &rates, &ff, state.v, cfg.planner.ts)
                    .map_err(|source| SimError::Controller { step: k, source })?;
                (cmd, Some(diag))
            }
        };
        if cfg.forward_only && cmd.v < 0.0 {
            cmd.v = 0.0;
        }
        cmd.phi = cmd.phi.clamp(-cfg.vehicle.phi_max, cfg.vehicle.phi_max);

        let err_true = compute_error(
            Pose::new(state.x, state.y, state.theta),
            Pose::new(target.x, target.y, target.theta_d),
        );
        steps.push(TraceStep {
            t: target.t,
            xd: target.x,
            yd: target.y,
            thetad: target.theta_d,
            vd: target.v_d,
            omegad: target.omega_d,
            x: state.x,
            y: state.y,
            theta: state.theta,
            xe: err_true.xe,
            ye: err_true.ye,
            thetae: err_true.theta_e,
            v_cmd: cmd.v,
            phi_cmd: cmd.phi,
            diag: match diag {
                Some(d) => StepDiag::Smc { s1: d.s1, s2: d.s2 },
                None => StepDiag::Lyapunov { v: lyapunov_value(&err_true) },
            },
        });

        // Zero-order hold: one noisy command applied for the whole period.
        let mut applied = apply_command_noise(cmd, &cfg.noise, &mut rng);
        if cfg.forward_only && applied.v < 0.0 {
            applied.v = 0.0;
        }
        applied.phi = applied.phi.clamp(-cfg.vehicle.phi_max, cfg.vehicle.phi_max);
        for _ in 0..cfg.sub_steps {
            state = plant_step(&state, applied, sub_dt, &cfg.vehicle)
                .map_err(|source| SimError::Vehicle { step: k, source })?;
        }
    }

    let trace = RunTrace { controller: cfg.controller, ts: cfg.planner.ts, plan_len, steps };
    let metrics = compute_metrics(&trace)?;
    Ok((trace, metrics))
}

/// Maxima, RMS values and command total variation of a trace.
pub fn compute_metrics(trace: &RunTrace) -> Result<RunMetrics, SimError> {
    if trace.steps.is_empty() {
        return Err(SimError::EmptyTrace);
    }
    let n = trace.steps.len() as f64;
    let mut m = RunMetrics {
        max_xe: 0.0,
        rms_xe: 0.0,
        max_ye: 0.0,
        rms_ye: 0.0,
        max_thetae: 0.0,
        rms_thetae: 0.0,
        steering_tv: 0.0,
        speed_tv: 0.0,
        completed: trace.steps.len() == trace.plan_len,
    };
    for s in &trace.steps {
        m.max_xe = m.max_xe.max(s.xe.abs());
        m.max_ye = m.max_ye.max(s.ye.abs());
        m.max_thetae = m.max_thetae.max(s.thetae.abs());
        m.rms_xe += s.xe * s.xe;
        m.rms_ye += s.ye * s.ye;
        m.rms_thetae += s.thetae * s.thetae;
    }
    m.rms_xe = (m.rms_xe / n).sqrt();
    m.rms_ye = (m.rms_ye / n).sqrt();
    m.rms_thetae = (m.rms_thetae / n).sqrt();
    for pair in trace.steps.windows(2) {
        m.steering_tv += (pair[1].phi_cmd - pair[0].phi_cmd).abs();
        m.speed_tv += (pair[1].v_cmd - pair[0].v_cmd).abs();
    }
    Ok(m)
}
