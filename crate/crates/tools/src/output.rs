//! CSV and JSON renderings of trajectory records and comparisons.

use std::fmt::Write as _;

use serde_json::{json, Value};

use sdre_core::simulate::{residual_trace, Comparison, RunStatus, TrajectoryRecord};

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_f64(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    format!("{v:.16e}")
}

fn header(record: &TrajectoryRecord) -> Vec<String> {
    let d = record.x0.len();
    let m = record.controls.first().map_or(0, Vec::len);
    let n = record.alphas.first().map_or(0, Vec::len);
    let mut cols = vec!["t".to_string()];
    cols.extend((1..=d).map(|i| format!("x_{i}")));
    cols.extend((1..=m).map(|i| format!("u_{i}")));
    cols.push("E_sq".into());
    cols.extend((1..=n).map(|i| format!("alpha_{i}")));
    cols.push("running_cost".into());
    cols.push("cache_hit".into());
    cols
}

/// `t, x_1..x_d, u_1..u_m, E_sq, alpha_1..alpha_N, running_cost, cache_hit`
pub fn trajectory_csv(record: &TrajectoryRecord) -> String {
    let mut out = header(record).join(",");
    out.push('\n');
    for i in 0..record.len() {
        let mut row: Vec<String> = vec![format_f64(record.times[i])];
        row.extend(record.states[i].iter().map(|v| format_f64(*v)));
        row.extend(record.controls[i].iter().map(|v| format_f64(*v)));
        row.push(format_f64(record.residuals_sq[i]));
        row.extend(record.alphas[i].iter().map(|v| format_f64(*v)));
        row.push(format_f64(record.running_cost[i]));
        row.push(if record.cache_hits[i] { "1" } else { "0" }.into());
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn residual_trace_csv(record: &TrajectoryRecord) -> String {
    let mut out = String::from("t,E_sq\n");
    for (t, e) in residual_trace(record) {
        let _ = writeln!(out, "{},{}", format_f64(t), format_f64(e));
    }
    out
}

fn status_json(status: &RunStatus) -> (Value, Value) {
    (json!(status.name()), json!(status.failure_time()))
}

pub fn summary_json(record: &TrajectoryRecord) -> Value {
    let (status, failure_time) = status_json(&record.status);
    json!({
        "label": record.label,
        "problem": record.problem,
        "strategy": record.strategy.name(),
        "x0": record.x0,
        "status": status,
        "failure_time": failure_time,
        "total_cost": record.total_cost,
        "total_residual": record.total_residual,
        "wall_time": record.wall_time,
        "evaluation_count": record.evaluation_count,
        "steps": record.len(),
        "cache_hits": record.cache_hits.iter().filter(|h| **h).count(),
        "final_state": record.final_state(),
    })
}

pub fn comparison_json(cmp: &Comparison) -> Value {
    let rows: Vec<Value> = cmp
        .rows
        .iter()
        .map(|r| {
            let (status, failure_time) = status_json(&r.status);
            json!({
                "label": r.label,
                "strategy": r.strategy.name(),
                "total_cost": r.total_cost,
                "total_residual": r.total_residual,
                "wall_time": r.wall_time,
                "evaluation_count": r.evaluation_count,
                "status": status,
                "failure_time": failure_time,
                "cost_improvement": r.cost_improvement,
                "slowdown": r.slowdown,
            })
        })
        .collect();
    json!({ "problem": cmp.problem, "x0": cmp.x0, "runs": rows })
}
