//! Command-line entry point for the planning pipeline.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gridx::domain::TechKind;
use gridx::lp::write_mps;
use gridx::pipeline;
use gridx::planner::{build_model, write_row_provenance};
use gridx::report::sweep_csv;

#[derive(Parser)]
#[command(name = "gridx", about = "Multi-year grid capacity expansion planning", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a small self-consistent example input set.
    InitExample {
        /// Target directory.
        #[arg(long, default_value = "example")]
        dir: PathBuf,
    },
    /// Cluster the year into weighted representative days.
    Cluster {
        #[arg(long)]
        scenario: PathBuf,
        /// Directory holding the CSV inputs.
        #[arg(long)]
        data: PathBuf,
        /// Output JSON (representative days + diagnostics).
        #[arg(long, default_value = "repdays.json")]
        out: PathBuf,
    },
    /// Synthesize the demand cube and print the annual summary.
    Demand {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "demand.json")]
        out: PathBuf,
    },
    /// Build the planning LP and write it as MPS.
    Build {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "model.mps")]
        out: PathBuf,
        #[arg(long)]
        stats: Option<PathBuf>,
        /// Row provenance sidecar (JSON lines).
        #[arg(long)]
        rows: Option<PathBuf>,
    },
    /// Build and solve, writing the solution summary.
    Solve {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "solution.json")]
        out: PathBuf,
    },
    /// Render report files from a solution summary.
    Report {
        #[arg(long)]
        solution: PathBuf,
        #[arg(long, default_value = "reports")]
        out_dir: PathBuf,
    },
    /// Re-solve while varying one technology's construction time.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Technology whose lead time is swept.
        #[arg(long)]
        tech: String,
        /// Comma-separated lead times in years, e.g. 3,4,5,6.
        #[arg(long)]
        omega: String,
        #[arg(long, default_value = "sweep.csv")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    match cli.command {
        Command::InitExample { dir } => {
            gridx::synth::write_demo_inputs(&dir)?;
            println!("wrote example inputs to {}", dir.display());
        }
        Command::Cluster { scenario, data, out } => {
            let prepared = pipeline::prepare(&scenario, &data)?;
            let payload = serde_json::json!({
                "days": prepared.days,
                "diagnostics": prepared.diagnostics,
            });
            std::fs::write(&out, serde_json::to_string_pretty(&payload)?)?;
            println!(
                "{} representative days, inertia {:.4}, silhouette {:.4} -> {}",
                prepared.days.len(),
                prepared.diagnostics.inertia,
                prepared.diagnostics.silhouette,
                out.display()
            );
        }
        Command::Demand { scenario, data, out } => {
            let prepared = pipeline::prepare(&scenario, &data)?;
            let summary = prepared.demand_summary();
            std::fs::write(&out, serde_json::to_string_pretty(&summary)?)?;
            for (i, year) in summary.years.iter().enumerate() {
                println!(
                    "{year}: base {:.2} TWh, dc {:.2} TWh, em {:.2} TWh, peak {:.2} GW",
                    summary.base_twh[i], summary.dc_twh[i], summary.em_twh[i], summary.peak_gw[i]
                );
            }
        }
        Command::Build { scenario, data, out, stats, rows } => {
            let prepared = pipeline::prepare(&scenario, &data)?;
            let (model, _, metas, model_stats) = build_model(&prepared.planner_inputs())?;
            let mut f = std::io::BufWriter::new(std::fs::File::create(&out)?);
            write_mps(&model, &mut f)?;
            if let Some(path) = stats {
                std::fs::write(&path, serde_json::to_string_pretty(&model_stats)?)?;
            }
            if let Some(path) = rows {
                let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
                write_row_provenance(&metas, &model, &mut f)?;
            }
            println!(
                "model: {} vars, {} constraints, {} nonzeros -> {}",
                model_stats.n_vars,
                model_stats.n_constraints,
                model_stats.n_nonzeros,
                out.display()
            );
        }
        Command::Solve { scenario, data, out } => {
            let (prepared, output) = pipeline::run(&scenario, &data)?;
            let file = pipeline::solution_file(&prepared, &output)?;
            std::fs::write(&out, serde_json::to_string_pretty(&file)?)?;
            println!(
                "objective {:.6e} after {} iterations -> {}",
                output.solution.objective,
                output.solution.iterations,
                out.display()
            );
        }
        Command::Report { solution, out_dir } => {
            let text = std::fs::read_to_string(&solution)?;
            let file: pipeline::SolutionFile = serde_json::from_str(&text)?;
            pipeline::write_reports(&file, &out_dir)?;
            println!("reports written to {}", out_dir.display());
        }
        Command::Sweep { scenario, data, tech, omega, out } => {
            let tech = TechKind::parse(&tech)
                .ok_or_else(|| format!("unknown technology '{tech}'"))?;
            let omegas: Vec<u32> = omega
                .split(',')
                .map(|s| s.trim().parse::<u32>())
                .collect::<Result<_, _>>()?;
            let prepared = pipeline::prepare(&scenario, &data)?;
            let rows = pipeline::sweep_construction_time(&prepared, tech, &omegas);
            std::fs::write(&out, sweep_csv(&rows))?;
            for row in &rows {
                println!("omega {}: {}", row.omega, row.status);
            }
        }
    }
    Ok(())
}
