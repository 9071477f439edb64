//! Text reports for single runs and controller comparisons.

use trackctl::{RunMetrics, ScenarioConfig};

/// metrics.txt body for one run.
pub fn metrics_text(cfg: &ScenarioConfig, m: &RunMetrics) -> String {
    format!(
        "scenario: {}\n\
         controller: {:?}\n\
         seed: {}\n\
         completed: {}\n\
         max |xe|: {:.6e} m\n\
         rms xe: {:.6e} m\n\
         max |ye|: {:.6e} m\n\
         rms ye: {:.6e} m\n\
         max |theta_e|: {:.6e} rad\n\
         rms theta_e: {:.6e} rad\n\
         steering total variation: {:.6e} rad\n\
         speed total variation: {:.6e} m/s\n",
        cfg.name,
        cfg.controller,
        cfg.noise.seed,
        m.completed,
        m.max_xe,
        m.rms_xe,
        m.max_ye,
        m.rms_ye,
        m.max_thetae,
        m.rms_thetae,
        m.steering_tv,
        m.speed_tv,
    )
}

/// Side-by-side comparison with a per-metric winner column. Both runs used
/// the same path, seed, and plant parameters.
pub fn comparison_text(cfg: &ScenarioConfig, lyap: &RunMetrics, smc: &RunMetrics) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "comparison: {} (seed {}, identical path, noise sequence and plant)\n\n",
        cfg.name, cfg.noise.seed
    ));
    out.push_str(&format!(
        "{:<28} {:>14} {:>14}   {}\n",
        "metric", "lyapunov", "smc", "winner"
    ));
    let rows: Vec<(&str, f64, f64)> = vec![
        ("max |xe| [m]", lyap.max_xe, smc.max_xe),
        ("rms xe [m]", lyap.rms_xe, smc.rms_xe),
        ("max |ye| [m]", lyap.max_ye, smc.max_ye),
        ("rms ye [m]", lyap.rms_ye, smc.rms_ye),
        ("max |theta_e| [rad]", lyap.max_thetae, smc.max_thetae),
        ("rms theta_e [rad]", lyap.rms_thetae, smc.rms_thetae),
        ("steering TV [rad]", lyap.steering_tv, smc.steering_tv),
        ("speed TV [m/s]", lyap.speed_tv, smc.speed_tv),
    ];
    for (name, a, b) in rows {
        let winner = if a < b { "lyapunov" } else if b < a { "smc" } else { "tie" };
        out.push_str(&format!("{name:<28} {a:>14.6e} {b:>14.6e}   {winner}\n"));
    }
    out.push_str(&format!(
        "\ncompleted: lyapunov {}, smc {}\n",
        lyap.completed, smc.completed
    ));

    out.push_str("\n# resolved configuration\n");
    match toml::to_string(cfg) {
        Ok(echo) => {
            for line in echo.lines() {
                out.push_str("# ");
                out.push_str(line);
                out.push('\n');
            }
        }
        Err(_) => out.push_str("# (unavailable)\n"),
    }
    out
}
