use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sdre_tools::{parse_config_with, run_experiment, Registry};

/// Optimized semilinear representations for SDRE feedback control.
#[derive(Parser)]
#[command(name = "sdre", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every strategy of an experiment config and write the outputs.
    Run {
        config: PathBuf,
        /// Output directory, overriding the config and the environment.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// List registered problems with their dimensions and parameters.
    ListProblems,
    /// Parse and validate a config without running it.
    Validate { config: PathBuf },
}

fn load(path: &PathBuf, registry: &Registry) -> Result<sdre_tools::ExperimentConfig, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_config_with(&text, registry).map_err(|e| format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let registry = Registry::with_defaults();
    match cli.command {
        Command::ListProblems => {
            for p in registry.list() {
                let params: Vec<String> =
                    p.defaults.iter().map(|(k, v)| format!("{k}={v}")).collect();
                println!(
                    "{}\td={}\tm={}\t{}",
                    p.name,
                    p.state_dim,
                    p.input_dim,
                    params.join(" ")
                );
            }
            ExitCode::SUCCESS
        }
        Command::Validate { config } => match load(&config, &registry) {
            Ok(cfg) => {
                println!(
                    "ok: {} x0={:?} strategies={:?}",
                    cfg.problem,
                    cfg.x0,
                    cfg.strategies.iter().map(|s| s.name()).collect::<Vec<_>>()
                );
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{e}");
                ExitCode::from(1)
            }
        },
        Command::Run { config, output_dir } => {
            let mut cfg = match load(&config, &registry) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(1);
                }
            };
            if let Some(dir) = output_dir {
                std::env::remove_var(sdre_tools::OUTPUT_DIR_ENV);
                cfg.output_dir = dir;
            }
            match run_experiment(&cfg, &registry) {
                Ok(report) => {
                    println!(
                        "{:<14} {:<16} {:>14} {:>14} {:>10} {:>10}",
                        "run", "status", "total_cost", "total_residual", "wall_s", "evals"
                    );
                    for r in &report.records {
                        println!(
                            "{:<14} {:<16} {:>14.6e} {:>14.6e} {:>10.3} {:>10}",
                            r.label,
                            r.status.to_string(),
                            r.total_cost,
                            r.total_residual,
                            r.wall_time,
                            r.evaluation_count
                        );
                    }
                    if let Some(cmp) = &report.comparison {
                        for row in cmp.rows.iter().skip(1) {
                            println!(
                                "{} vs {}: cost improvement {:.2}%, slowdown {:.2}x",
                                row.label,
                                cmp.rows[0].label,
                                100.0 * row.cost_improvement,
                                row.slowdown
                            );
                        }
                    }
                    println!("outputs in {}", report.output_dir.display());
                    ExitCode::from(report.exit_code() as u8)
                }
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(1)
                }
            }
        }
    }
}
