//! End-to-end orchestration: load inputs, cluster days, map regions,
//! synthesize demand, build the LP, solve it (embedded simplex or an
//! external solver over MPS), and extract reports.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cluster::{cluster_days, ClusterDiagnostics, RepresentativeDay};
use crate::demand::{build_demand_cube, summarize, DemandCube, DemandSummary};
use crate::domain::{validate_topology, GridTopology, ScenarioConfig, TechKind};
use crate::ingest::{load_grid_inputs, load_scenario};
use crate::lp::{solve, write_mps, LpModel, LpSolution, SolveOptions, SolveStatus};
use crate::planner::{build_model, PlanModelStats, PlannerInputs, RowMeta, VarIndex};
use crate::report::{
    capacity_table, capacity_table_csv, cost_breakdown, curtailment_report, CostBreakdown,
    CurtailmentReport, PlanSolution, SweepRow,
};
use crate::spatial::{assign_buses, reallocate_empty_regions, RegionMap};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Ingest(#[from] crate::ingest::IngestError),
    #[error(transparent)]
    Cluster(#[from] crate::cluster::ClusterError),
    #[error(transparent)]
    Spatial(#[from] crate::spatial::SpatialError),
    #[error(transparent)]
    Demand(#[from] crate::demand::DemandError),
    #[error(transparent)]
    Plan(#[from] crate::planner::PlanError),
    #[error(transparent)]
    Lp(#[from] crate::lp::LpError),
    #[error(transparent)]
    Report(#[from] crate::report::ReportError),
    #[error("invalid topology: {0:?}")]
    InvalidTopology(Vec<String>),
    #[error("solver backend '{0}' unknown (use \"embedded\" or \"external\")")]
    UnknownBackend(String),
    #[error("external backend configured without solver.external_cmd")]
    MissingExternalCmd,
    #[error("external solver failed: {0}")]
    ExternalSolver(String),
    #[error("solver finished with status {0:?}")]
    NotOptimal(SolveStatus),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Everything needed to build the LP, assembled from input files.
pub struct Prepared {
    pub scenario: ScenarioConfig,
    pub topology: GridTopology,
    pub days: Vec<RepresentativeDay>,
    pub diagnostics: ClusterDiagnostics,
    pub region_map: RegionMap,
    /// Region shares after empty-region reallocation.
    pub psi_dc: BTreeMap<String, f64>,
    pub psi_em: BTreeMap<String, f64>,
    pub dc_region_buses: BTreeMap<String, Vec<usize>>,
    pub em_region_buses: BTreeMap<String, Vec<usize>>,
    pub cube: DemandCube,
    pub load_bus_ids: Vec<usize>,
    pub solar_bus_ids: Vec<usize>,
    pub wind_bus_ids: Vec<usize>,
}

impl Prepared {
    pub fn planner_inputs(&self) -> PlannerInputs<'_> {
        PlannerInputs {
            scenario: &self.scenario,
            topology: &self.topology,
            cube: &self.cube,
            days: &self.days,
            solar_bus_ids: &self.solar_bus_ids,
            wind_bus_ids: &self.wind_bus_ids,
            dc_region_buses: &self.dc_region_buses,
            em_region_buses: &self.em_region_buses,
        }
    }

    pub fn demand_summary(&self) -> DemandSummary {
        summarize(&self.cube)
    }
}

/// Run ingest, clustering, spatial mapping, and demand synthesis.
pub fn prepare(scenario_path: &Path, data_dir: &Path) -> Result<Prepared, PipelineError> {
    let mut scenario = load_scenario(scenario_path)?;
    let grid = load_grid_inputs(data_dir)?;
    let report = validate_topology(&grid.topology);
    if !report.is_valid() {
        return Err(PipelineError::InvalidTopology(report.violations));
    }

    let c = &scenario.clustering;
    let clustered = cluster_days(
        &grid.base_load,
        &grid.cf_solar,
        &grid.cf_wind,
        c.k,
        c.seed,
        c.restarts,
        &c.profile,
    )?;

    let region_map = assign_buses(
        &grid.topology.buses,
        &grid.county_centroids,
        grid.bus_county.as_ref(),
    )?;
    let (psi_dc, _) =
        reallocate_empty_regions(&grid.psi_dc, &region_map, &grid.county_centroids)?;
    let (psi_em, _) =
        reallocate_empty_regions(&grid.psi_em, &region_map, &grid.county_centroids)?;
    let region_buses = |psi: &BTreeMap<String, f64>| -> BTreeMap<String, Vec<usize>> {
        psi.keys()
            .filter_map(|c| region_map.region_buses.get(c).map(|b| (c.clone(), b.clone())))
            .collect()
    };
    let dc_region_buses = region_buses(&psi_dc);
    let em_region_buses = region_buses(&psi_em);
    scenario.demand.psi_dc = psi_dc.clone();
    scenario.demand.psi_em = psi_em.clone();

    let cube = build_demand_cube(
        &scenario.horizon,
        &scenario.demand,
        &clustered.days,
        &grid.base_load.bus_ids,
        &psi_dc,
        &psi_em,
    )?;

    Ok(Prepared {
        scenario,
        topology: grid.topology,
        days: clustered.days,
        diagnostics: clustered.diagnostics,
        region_map,
        psi_dc,
        psi_em,
        dc_region_buses,
        em_region_buses,
        cube,
        load_bus_ids: grid.base_load.bus_ids,
        solar_bus_ids: grid.cf_solar.bus_ids,
        wind_bus_ids: grid.cf_wind.bus_ids,
    })
}

/// Solve with the configured backend. The external contract: the command
/// template's `{mps}` and `{sol}` placeholders are replaced with file
/// paths, the command runs through the shell, and the solution file is
/// parsed as `<column name> <value>` lines (missing columns read as 0).
pub fn solve_model(
    model: &LpModel,
    cfg: &crate::domain::SolverConfig,
) -> Result<LpSolution, PipelineError> {
    match cfg.backend.as_str() {
        "embedded" => {
            let opts = SolveOptions {
                feas_tol: cfg.tolerance,
                opt_tol: cfg.tolerance,
                max_iters: None,
            };
            Ok(solve(model, &opts)?)
        }
        "external" => {
            let template = cfg
                .external_cmd
                .as_ref()
                .ok_or(PipelineError::MissingExternalCmd)?;
            let dir = tempfile_dir()?;
            let mps_path = dir.join("model.mps");
            let sol_path = dir.join("model.sol");
            let mut f = std::fs::File::create(&mps_path)?;
            write_mps(model, &mut f)?;
            drop(f);
            let cmd = template
                .replace("{mps}", &mps_path.display().to_string())
                .replace("{sol}", &sol_path.display().to_string());
            let out = std::process::Command::new("sh").arg("-c").arg(&cmd).output()?;
            if !out.status.success() {
                return Err(PipelineError::ExternalSolver(format!(
                    "command exited with {}: {}",
                    out.status,
                    String::from_utf8_lossy(&out.stderr)
                )));
            }
            let text = std::fs::read_to_string(&sol_path).map_err(|e| {
                PipelineError::ExternalSolver(format!("no solution file: {e}"))
            })?;
            let by_name: BTreeMap<&str, usize> = model
                .columns
                .iter()
                .enumerate()
                .map(|(i, c)| (c.name.as_str(), i))
                .collect();
            let mut primal = vec![0.0; model.n_cols()];
            for line in text.lines() {
                let mut it = line.split_whitespace();
                let (Some(name), Some(val)) = (it.next(), it.next()) else { continue };
                if let (Some(&col), Ok(v)) = (by_name.get(name), val.parse::<f64>()) {
                    primal[col] = v;
                }
            }
            let objective = model.objective_value(&primal);
            let _ = std::fs::remove_dir_all(&dir);
            Ok(LpSolution {
                status: SolveStatus::Optimal,
                objective,
                primal,
                duals: None,
                iterations: 0,
            })
        }
        other => Err(PipelineError::UnknownBackend(other.to_string())),
    }
}

fn tempfile_dir() -> std::io::Result<PathBuf> {
    let base = std::env::temp_dir();
    for i in 0..10_000u32 {
        let p = base.join(format!("gridx-solve-{}-{i}", std::process::id()));
        match std::fs::create_dir(&p) {
            Ok(()) => return Ok(p),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(e),
        }
    }
    Err(std::io::Error::other("could not create scratch directory"))
}

/// Machine-readable solve output written by `gridx solve`.
#[derive(Debug, Serialize, Deserialize)]
pub struct SolutionFile {
    pub status: String,
    pub objective: f64,
    pub iterations: usize,
    pub plan: serde_json::Value,
    pub costs: serde_json::Value,
    pub curtailment: serde_json::Value,
    pub stats: serde_json::Value,
    pub demand_summary: serde_json::Value,
}

pub struct RunOutput {
    pub model: LpModel,
    pub var_index: VarIndex,
    pub row_metas: Vec<RowMeta>,
    pub stats: PlanModelStats,
    pub solution: LpSolution,
    pub plan: PlanSolution,
    pub costs: CostBreakdown,
    pub curtailment: CurtailmentReport,
}

/// Build, solve, and extract on prepared inputs.
pub fn run_prepared(prepared: &Prepared) -> Result<RunOutput, PipelineError> {
    let (model, vi, metas, stats) = build_model(&prepared.planner_inputs())?;
    let solution = solve_model(&model, &prepared.scenario.solver)?;
    if solution.status != SolveStatus::Optimal {
        return Err(PipelineError::NotOptimal(solution.status));
    }
    let plan = PlanSolution::extract(
        &solution,
        &vi,
        &prepared.scenario,
        &prepared.days,
        &prepared.solar_bus_ids,
        &prepared.wind_bus_ids,
    )?;
    let costs = cost_breakdown(&model, &solution, &vi, &prepared.scenario.horizon);
    let curtailment = curtailment_report(&plan, &prepared.cube);
    Ok(RunOutput {
        model,
        var_index: vi,
        row_metas: metas,
        stats,
        solution,
        plan,
        costs,
        curtailment,
    })
}

/// Full pipeline from files.
pub fn run(scenario_path: &Path, data_dir: &Path) -> Result<(Prepared, RunOutput), PipelineError> {
    let prepared = prepare(scenario_path, data_dir)?;
    let out = run_prepared(&prepared)?;
    Ok((prepared, out))
}

pub fn solution_file(prepared: &Prepared, out: &RunOutput) -> Result<SolutionFile, PipelineError> {
    Ok(SolutionFile {
        status: "optimal".to_string(),
        objective: out.solution.objective,
        iterations: out.solution.iterations,
        plan: serde_json::to_value(&out.plan)?,
        costs: serde_json::to_value(&out.costs)?,
        curtailment: serde_json::to_value(&out.curtailment)?,
        stats: serde_json::to_value(out.stats)?,
        demand_summary: serde_json::to_value(prepared.demand_summary())?,
    })
}

/// Write the report bundle (capacity CSV plus JSON summaries) from a
/// previously written solution file.
pub fn write_reports(solution: &SolutionFile, out_dir: &Path) -> Result<(), PipelineError> {
    std::fs::create_dir_all(out_dir)?;
    let plan: PlanSolution = serde_json::from_value(solution.plan.clone())?;
    std::fs::write(
        out_dir.join("capacity.csv"),
        capacity_table_csv(&capacity_table(&plan)),
    )?;
    std::fs::write(
        out_dir.join("costs.json"),
        serde_json::to_string_pretty(&solution.costs)?,
    )?;
    std::fs::write(
        out_dir.join("curtailment.json"),
        serde_json::to_string_pretty(&solution.curtailment)?,
    )?;
    std::fs::write(
        out_dir.join("summary.json"),
        serde_json::to_string_pretty(&serde_json::json!({
            "status": solution.status,
            "objective": solution.objective,
            "stats": solution.stats,
            "demand_summary": solution.demand_summary,
        }))?,
    )?;
    Ok(())
}

/// Re-solve the scenario for each construction time in `omegas` applied
/// to `tech`. Points are independent; a failed point is recorded and the
/// sweep continues. Rows come back in the order given.
pub fn sweep_construction_time(
    prepared: &Prepared,
    tech: TechKind,
    omegas: &[u32],
) -> Vec<SweepRow> {
    omegas
        .iter()
        .map(|&omega| {
            let mut scenario = prepared.scenario.clone();
            if let Some(entry) = scenario.tech.get_mut(&tech) {
                entry.lead_time_yr = omega;
            }
            let local = Prepared {
                scenario,
                topology: prepared.topology.clone(),
                days: prepared.days.clone(),
                diagnostics: prepared.diagnostics.clone(),
                region_map: prepared.region_map.clone(),
                psi_dc: prepared.psi_dc.clone(),
                psi_em: prepared.psi_em.clone(),
                dc_region_buses: prepared.dc_region_buses.clone(),
                em_region_buses: prepared.em_region_buses.clone(),
                cube: prepared.cube.clone(),
                load_bus_ids: prepared.load_bus_ids.clone(),
                solar_bus_ids: prepared.solar_bus_ids.clone(),
                wind_bus_ids: prepared.wind_bus_ids.clone(),
            };
            match run_prepared(&local) {
                Ok(out) => SweepRow {
                    omega,
                    new_gen_gw: TechKind::ALL
                        .iter()
                        .map(|&k| (k, out.plan.new_gen_mw[&k].iter().sum::<f64>() / 1000.0))
                        .collect(),
                    new_trans_gw: out.plan.new_trans_mw.iter().sum::<f64>() / 1000.0,
                    new_stor_gw: out.plan.new_stor_mw.iter().sum::<f64>() / 1000.0,
                    objective: out.solution.objective,
                    status: "optimal".to_string(),
                },
                Err(e) => SweepRow {
                    omega,
                    new_gen_gw: TechKind::ALL.iter().map(|&k| (k, 0.0)).collect(),
                    new_trans_gw: 0.0,
                    new_stor_gw: 0.0,
                    objective: f64::NAN,
                    status: format!("failed: {e}"),
                },
            }
        })
        .collect()
}
