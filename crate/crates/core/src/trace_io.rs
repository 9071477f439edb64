//! CSV serialization of run traces.
//!
//! The column layout depends on the controller that produced the trace:
//!
//! ```text
//! t,xd,yd,thetad,vd,omegad,x,y,theta,xe,ye,thetae,v_cmd,phi_cmd,V        (lyapunov)
//! t,xd,yd,thetad,vd,omegad,x,y,theta,xe,ye,thetae,v_cmd,phi_cmd,s1,s2   (smc)
//! ```
//!
//! Numbers are written with 9 significant digits, so a parsed trace matches
//! the original to serialization precision (metrics agree to ~1e-9
//! relative).

use thiserror::Error;

use crate::sim::{ControllerChoice, RunTrace, StepDiag, TraceStep};

const COMMON_HEADER: &str = "t,xd,yd,thetad,vd,omegad,x,y,theta,xe,ye,thetae,v_cmd,phi_cmd";

/// Header row for a trace of the given controller.
pub fn header(controller: ControllerChoice) -> String {
    match controller {
        ControllerChoice::Lyapunov => format!("{COMMON_HEADER},V"),
        ControllerChoice::Smc => format!("{COMMON_HEADER},s1,s2"),
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.8e}")
}

/// Render a trace as CSV text.
pub fn to_csv(trace: &RunTrace) -> String {
    let mut out = String::with_capacity(64 * (trace.steps.len() + 1));
    out.push_str(&header(trace.controller));
    out.push('\n');
    for s in &trace.steps {
        let mut fields = vec![
            fmt(s.t),
            fmt(s.xd),
            fmt(s.yd),
            fmt(s.thetad),
            fmt(s.vd),
            fmt(s.omegad),
            fmt(s.x),
            fmt(s.y),
            fmt(s.theta),
            fmt(s.xe),
            fmt(s.ye),
            fmt(s.thetae),
            fmt(s.v_cmd),
            fmt(s.phi_cmd),
        ];
        match s.diag {
            StepDiag::Lyapunov { v } => fields.push(fmt(v)),
            StepDiag::Smc { s1, s2 } => {
                fields.push(fmt(s1));
                fields.push(fmt(s2));
            }
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Error)]
pub enum TraceParseError {
    #[error("empty trace file")]
    Empty,
    #[error("unrecognized trace header: {0}")]
    BadHeader(String),
    #[error("trace line {line}: expected {expected} fields, got {got}")]
    FieldCount { line: usize, expected: usize, got: usize },
    #[error("trace line {line}: invalid number {value:?}")]
    BadNumber { line: usize, value: String },
}

/// Parse CSV text produced by [`to_csv`]. The re-read trace is marked
/// complete (the file does not carry the original plan length).
pub fn from_csv(text: &str) -> Result<RunTrace, TraceParseError> {
    let mut lines = text.lines().enumerate();
    let (_, head) = lines.next().ok_or(TraceParseError::Empty)?;
    let controller = if head == header(ControllerChoice::Lyapunov) {
        ControllerChoice::Lyapunov
    } else if head == header(ControllerChoice::Smc) {
        ControllerChoice::Smc
    } else {
        return Err(TraceParseError::BadHeader(head.to_string()));
    };
    let expected = match controller {
        ControllerChoice::Lyapunov => 15,
        ControllerChoice::Smc => 16,
    };

    let mut steps = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != expected {
            return Err(TraceParseError::FieldCount {
                line: idx + 1,
                expected,
                got: fields.len(),
            });
        }
        let num = |i: usize| -> Result<f64, TraceParseError> {
            fields[i].trim().parse().map_err(|_| TraceParseError::BadNumber {
                line: idx + 1,
                value: fields[i].to_string(),
            })
        };
        let diag = match controller {
            ControllerChoice::Lyapunov => StepDiag::Lyapunov { v: num(14)? },
            ControllerChoice::Smc => StepDiag::Smc { s1: num(14)?, s2: num(15)? },
        };
        steps.push(TraceStep {
            t: num(0)?,
            xd: num(1)?,
            yd: num(2)?,
            thetad: num(3)?,
            vd: num(4)?,
            omegad: num(5)?,
            x: num(6)?,
            y: num(7)?,
            theta: num(8)?,
            xe: num(9)?,
            ye: num(10)?,
            thetae: num(11)?,
            v_cmd: num(12)?,
            phi_cmd: num(13)?,
            diag,
        });
    }
    let ts = if steps.len() >= 2 { steps[1].t - steps[0].t } else { 0.1 };
    Ok(RunTrace { controller, ts, plan_len: steps.len(), steps })
}
