use std::fs;
use std::path::PathBuf;

use sdre_core::optimizer::Strategy;
use sdre_tools::{parse_config, run_experiment, FixedChoice, Registry};

fn shipped(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn lorenz_config() {
    let cfg = parse_config(&shipped("lorenz-table1.toml")).unwrap();
    assert_eq!(cfg.problem, "lorenz");
    assert_eq!(cfg.x0, vec![-1.0, -1.0, -1.0]);
    assert_eq!(cfg.simulation.residual_tol, 1e-12);
    assert_eq!(cfg.strategies, vec![Strategy::FixedAlpha, Strategy::FullDimensional]);
    assert_eq!(cfg.params.get("rho"), Some(&2.0));
    assert_eq!(cfg.params.get("q_scale"), Some(&100.0));
}

#[test]
fn pendulum_configs() {
    let cfg = parse_config(&shipped("pendulum-table2.toml")).unwrap();
    assert_eq!(cfg.problem, "inverted-pendulum");
    assert_eq!(cfg.x0, vec![-0.2, -0.2, 0.0, 0.0]);
    assert_eq!(cfg.simulation.residual_tol, 1e-9);

    let cfg = parse_config(&shipped("pendulum-dichotomy.toml")).unwrap();
    assert_eq!(cfg.x0, vec![0.0, 3.0, 0.0, 0.0]);
    assert_eq!(cfg.strategies, vec![Strategy::FixedAlpha, Strategy::RestrictedOneDim]);
    match cfg.fixed {
        FixedChoice::Member(p) => assert_eq!(p.one_based(), (2, 2, 4, -1.0)),
        other => panic!("expected a member, got {other:?}"),
    }
}

#[test]
fn summary_round_trips_the_record() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        "problem = \"inverted-pendulum\"\nx0 = [-0.2, -0.2, 0.0, 0.0]\nstrategies = [\"fixed\", \"full\"]\n\
         output_dir = {:?}\n[simulation]\nn_steps = 40\nresidual_tol = 1e-9\n",
        dir.path().to_str().unwrap()
    );
    let cfg = parse_config(&text).unwrap();
    let report = run_experiment(&cfg, &Registry::with_defaults()).unwrap();
    assert_eq!(report.exit_code(), 0);
    for rec in &report.records {
        let sub = report.output_dir.join(&rec.label);
        let summary: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(sub.join("summary.json")).unwrap()).unwrap();
        assert_eq!(summary["total_cost"].as_f64(), Some(rec.total_cost));
        assert_eq!(summary["total_residual"].as_f64(), Some(rec.total_residual));
        assert_eq!(summary["wall_time"].as_f64(), Some(rec.wall_time));
        assert_eq!(summary["evaluation_count"].as_u64(), Some(rec.evaluation_count as u64));
        assert_eq!(summary["status"].as_str(), Some(rec.status.name()));

        let csv = fs::read_to_string(sub.join("trajectory.csv")).unwrap();
        let mut lines = csv.lines();
        let mut expected = vec!["t", "x_1", "x_2", "x_3", "x_4", "u_1", "E_sq"];
        let alphas: Vec<String> = (1..=48).map(|i| format!("alpha_{i}")).collect();
        expected.extend(alphas.iter().map(String::as_str));
        expected.extend(["running_cost", "cache_hit"]);
        assert_eq!(lines.next().unwrap(), expected.join(","));
        // numeric cells parse back to the exact values
        for (row, line) in lines.enumerate() {
            let cells: Vec<&str> = line.split(',').collect();
            assert_eq!(cells.len(), expected.len());
            assert_eq!(cells[0].parse::<f64>().unwrap(), rec.times[row]);
            assert_eq!(cells[6].parse::<f64>().unwrap(), rec.residuals_sq[row]);
            assert_eq!(cells[55].parse::<f64>().unwrap(), rec.running_cost[row]);
        }
        let trace = fs::read_to_string(sub.join("residual_trace.csv")).unwrap();
        assert_eq!(trace.lines().count(), rec.len() + 1);
    }
    let cmp: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(report.output_dir.join("comparison.json")).unwrap()).unwrap();
    assert_eq!(cmp["runs"].as_array().unwrap().len(), 2);
}
