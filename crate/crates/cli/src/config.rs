//! Scenario configuration files.
//!
//! Scenarios are TOML with kebab-case keys; every field has a default, so a
//! minimal config only names a waypoint source. Waypoint file paths are
//! resolved relative to the config file's directory.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use trackctl::planner::parse_waypoints;
use trackctl::{
    ControllerChoice, ErrorModel, LyapGains, NoiseSpec, PlannerConfig, PoseOffset, ScenarioConfig,
    SmcDenominator, SmcParams, SwitchMode, VehicleParams, Waypoint,
};

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ScenarioFile {
    pub name: Option<String>,
    pub controller: Option<ControllerChoice>,
    pub seed: Option<u64>,
    /// Simulated-time cap [s].
    pub duration: Option<f64>,
    pub error_model: Option<ErrorModel>,
    pub path: PathSection,
    #[serde(default)]
    pub planner: PlannerSection,
    #[serde(default)]
    pub vehicle: VehicleSection,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub offset: OffsetSection,
    #[serde(default)]
    pub lyapunov: LyapunovSection,
    #[serde(default)]
    pub smc: SmcSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct PathSection {
    /// Waypoint file, relative to the config file.
    pub waypoints: Option<PathBuf>,
    /// Inline waypoints: `[x, y]` or `[x, y, v_target]` per entry.
    pub points: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct PlannerSection {
    pub ts: Option<f64>,
    pub a_max: Option<f64>,
    pub v_max: Option<f64>,
    pub corner_slowdown: Option<f64>,
    pub blend_window: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct VehicleSection {
    pub wheelbase: Option<f64>,
    pub phi_max: Option<f64>,
    pub v_filter_tau: Option<f64>,
    pub phi_filter_tau: Option<f64>,
    pub sub_steps: Option<u32>,
    pub forward_only: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct NoiseSection {
    pub sigma_pose: Option<f64>,
    pub sigma_theta: Option<f64>,
    pub sigma_actuation: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OffsetSection {
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub theta: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LyapunovSection {
    pub k1: Option<f64>,
    pub k2: Option<f64>,
    pub k3: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmcSection {
    pub k1: Option<f64>,
    pub k2: Option<f64>,
    pub k3: Option<f64>,
    pub p1: Option<f64>,
    pub q1: Option<f64>,
    pub p2: Option<f64>,
    pub q2: Option<f64>,
    /// `sign`, `sat:WIDTH`, or `tanh:WIDTH`.
    pub switch: Option<String>,
    /// `sin` or `cos`.
    pub denominator: Option<String>,
}

/// Parse a switch-mode spec like `sign`, `sat:0.1`, `tanh:0.8`.
pub fn parse_switch_mode(text: &str) -> Result<SwitchMode, CliError> {
    let bad = |reason: String| CliError::config(reason);
    match text.split_once(':') {
        None => match text {
            "sign" => Ok(SwitchMode::Sign),
            other => Err(bad(format!(
                "unknown switch mode {other:?}; expected sign, sat:WIDTH, or tanh:WIDTH"
            ))),
        },
        Some((kind, width)) => {
            let width: f64 = width
                .parse()
                .map_err(|_| bad(format!("switch width {width:?} is not a number")))?;
            if width <= 0.0 {
                return Err(bad("switch width must be positive".into()));
            }
            match kind {
                "sat" | "saturation" => Ok(SwitchMode::Saturation { width }),
                "tanh" | "smooth-tanh" => Ok(SwitchMode::SmoothTanh { width }),
                other => Err(bad(format!(
                    "unknown switch mode {other:?}; expected sign, sat:WIDTH, or tanh:WIDTH"
                ))),
            }
        }
    }
}

pub fn parse_denominator(text: &str) -> Result<SmcDenominator, CliError> {
    match text {
        "sin" => Ok(SmcDenominator::Sin),
        "cos" => Ok(SmcDenominator::Cos),
        other => Err(CliError::config(format!(
            "unknown smc denominator {other:?}; expected sin or cos"
        ))),
    }
}

/// Load and resolve a scenario file into a runnable configuration.
pub fn load_scenario(config_path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(config_path).map_err(|e| {
        CliError::config(format!("cannot read config {}: {e}", config_path.display()))
    })?;
    let file: ScenarioFile = toml::from_str(&text).map_err(|e| {
        CliError::config(format!("cannot parse config {}: {e}", config_path.display()))
    })?;
    resolve(file, config_path)
}

fn resolve(file: ScenarioFile, config_path: &Path) -> Result<ScenarioConfig, CliError> {
    let waypoints = load_waypoints(&file.path, config_path)?;
    let controller = file.controller.unwrap_or(ControllerChoice::Lyapunov);
    let mut cfg = ScenarioConfig::new(
        file.name.unwrap_or_else(|| {
            config_path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "scenario".into())
        }),
        controller,
        waypoints,
    );

    let p = &file.planner;
    let d = PlannerConfig::default();
    cfg.planner = PlannerConfig {
        ts: p.ts.unwrap_or(d.ts),
        a_max: p.a_max.unwrap_or(d.a_max),
        v_max: p.v_max.unwrap_or(d.v_max),
        corner_slowdown: p.corner_slowdown.unwrap_or(d.corner_slowdown),
        blend_window: p.blend_window.unwrap_or(d.blend_window),
    };

    let v = &file.vehicle;
    let d = VehicleParams::default();
    cfg.vehicle = VehicleParams {
        wheelbase: v.wheelbase.unwrap_or(d.wheelbase),
        phi_max: v.phi_max.unwrap_or(d.phi_max),
        v_filter_tau: v.v_filter_tau.unwrap_or(d.v_filter_tau),
        phi_filter_tau: v.phi_filter_tau.unwrap_or(d.phi_filter_tau),
    };
    if let Some(s) = v.sub_steps {
        cfg.sub_steps = s;
    }
    if let Some(f) = v.forward_only {
        cfg.forward_only = f;
    }

    let n = &file.noise;
    let d = NoiseSpec::default();
    cfg.noise = NoiseSpec {
        sigma_pose: n.sigma_pose.unwrap_or(d.sigma_pose),
        sigma_theta: n.sigma_theta.unwrap_or(d.sigma_theta),
        sigma_actuation: n.sigma_actuation.unwrap_or(d.sigma_actuation),
        seed: n.seed.unwrap_or(d.seed),
    };
    if let Some(seed) = file.seed {
        cfg.noise.seed = seed;
    }

    cfg.initial_offset = PoseOffset {
        dx: file.offset.x.unwrap_or(0.0),
        dy: file.offset.y.unwrap_or(0.0),
        dtheta: file.offset.theta.unwrap_or(0.0),
    };
    cfg.duration_cap = file.duration;
    cfg.error_model = file.error_model.unwrap_or_default();

    let g = &file.lyapunov;
    cfg.lyap_gains = LyapGains::new(
        g.k1.unwrap_or(0.9),
        g.k2.unwrap_or(1.1),
        g.k3.unwrap_or(3.0),
    )
    .map_err(|e| CliError::config(format!("lyapunov gains: {e}")))?;

    let s = &file.smc;
    let switch = match &s.switch {
        Some(text) => parse_switch_mode(text)?,
        None => SwitchMode::Sign,
    };
    let denominator = match &s.denominator {
        Some(text) => parse_denominator(text)?,
        None => SmcDenominator::Sin,
    };
    cfg.smc_params = SmcParams::new(
        s.k1.unwrap_or(0.22),
        s.k2.unwrap_or(2.0),
        s.k3.unwrap_or(2.55),
        s.p1.unwrap_or(0.48),
        s.q1.unwrap_or(0.048),
        s.p2.unwrap_or(3.7),
        s.q2.unwrap_or(0.3),
        switch,
        denominator,
    )
    .map_err(|e| CliError::config(format!("smc parameters: {e}")))?;

    cfg.validate().map_err(|e| CliError::config(e.to_string()))?;
    Ok(cfg)
}

fn load_waypoints(section: &PathSection, config_path: &Path) -> Result<Vec<Waypoint>, CliError> {
    match (&section.waypoints, &section.points) {
        (Some(_), Some(_)) => Err(CliError::config(
            "config provides both [path] waypoints and [path] points; pick one".into(),
        )),
        (None, None) => Err(CliError::config(
            "config needs [path] waypoints = \"file\" or [path] points = [[x, y], ...]".into(),
        )),
        (Some(rel), None) => {
            let base = config_path.parent().unwrap_or(Path::new("."));
            let full = base.join(rel);
            let text = std::fs::read_to_string(&full).map_err(|e| {
                CliError::config(format!("cannot read waypoint file {}: {e}", full.display()))
            })?;
            parse_waypoints(&text)
                .map_err(|e| CliError::config(format!("{}: {e}", full.display())))
        }
        (None, Some(rows)) => {
            let mut out = Vec::with_capacity(rows.len());
            for (i, row) in rows.iter().enumerate() {
                match row.as_slice() {
                    [x, y] => out.push(Waypoint::new(*x, *y)),
                    [x, y, v] => out.push(Waypoint::with_speed(*x, *y, *v)),
                    _ => {
                        return Err(CliError::config(format!(
                            "[path] points entry {i} must have 2 or 3 numbers"
                        )))
                    }
                }
            }
            Ok(out)
        }
    }
}
