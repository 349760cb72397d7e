//! Result extraction and reporting: capacity tables, cost breakdowns,
//! curtailment accounting, and realized capacity factors, all derived
//! from a solved planning LP.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cluster::{RepresentativeDay, HOURS_PER_DAY, HYDRO_CF};
use crate::demand::DemandCube;
use crate::domain::{ScenarioConfig, TechClass, TechKind};
use crate::lp::{LpModel, LpSolution, SolveStatus};
use crate::planner::{VarIndex, VarKind};

const H: usize = HOURS_PER_DAY;
const HOURS_PER_YEAR: f64 = 8760.0;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("solution status is {0:?}, expected Optimal")]
    NotOptimal(SolveStatus),
    #[error("missing capacity-factor column for bus {0}")]
    MissingCf(usize),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Physical summary of a solved plan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanSolution {
    pub years: Vec<i32>,
    pub objective: f64,
    /// Available capacity per (tech, year), MW.
    pub capacity_mw: BTreeMap<TechKind, Vec<f64>>,
    /// Available capacity per (bus, tech) site over years, MW.
    pub bus_capacity_mw: Vec<BusTechCapacity>,
    /// New investment decided per (tech, year), MW.
    pub new_gen_mw: BTreeMap<TechKind, Vec<f64>>,
    /// Total transmission capacity per year, MW.
    pub trans_capacity_mw: Vec<f64>,
    /// New transmission investment per year, MW.
    pub new_trans_mw: Vec<f64>,
    /// Total storage power capacity per year, MW.
    pub stor_capacity_mw: Vec<f64>,
    /// New storage investment per year, MW.
    pub new_stor_mw: Vec<f64>,
    /// Weighted annual generation per (tech, year), MWh (net of nothing;
    /// thermal dispatch, renewable availability).
    pub generation_mwh: BTreeMap<TechKind, Vec<f64>>,
    /// Weighted annual generation curtailment per (tech, year), MWh.
    pub gen_curtail_mwh: BTreeMap<TechKind, Vec<f64>>,
    /// Weighted annual demand curtailment per year, MWh.
    pub dem_curtail_mwh: Vec<f64>,
    /// Weighted annual charge / discharge energy per year, MWh.
    pub charge_mwh: Vec<f64>,
    pub discharge_mwh: Vec<f64>,
    /// Realized capacity factor per (tech, year).
    pub realized_cf: BTreeMap<TechKind, Vec<f64>>,
}

/// One generator site's capacity trajectory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BusTechCapacity {
    pub bus: usize,
    pub tech: TechKind,
    pub capacity_mw: Vec<f64>,
}

impl PlanSolution {
    /// Pull every reported quantity out of the raw primal vector.
    pub fn extract(
        sol: &LpSolution,
        vi: &VarIndex,
        scenario: &ScenarioConfig,
        days: &[RepresentativeDay],
        solar_bus_ids: &[usize],
        wind_bus_ids: &[usize],
    ) -> Result<PlanSolution, ReportError> {
        if sol.status != SolveStatus::Optimal {
            return Err(ReportError::NotOptimal(sol.status));
        }
        let nt = vi.n_years;
        let nd = vi.n_days;
        let years = scenario.horizon.clone();
        let weights: Vec<f64> = days.iter().map(|d| d.weight).collect();
        let solar_pos: BTreeMap<usize, usize> =
            solar_bus_ids.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        let wind_pos: BTreeMap<usize, usize> =
            wind_bus_ids.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        let cf = |bus: usize, tech: TechKind, d: usize, h: usize| -> Result<f64, ReportError> {
            Ok(match tech {
                TechKind::Solar => {
                    days[d].cf_solar[*solar_pos.get(&bus).ok_or(ReportError::MissingCf(bus))?][h]
                }
                TechKind::Wind => {
                    days[d].cf_wind[*wind_pos.get(&bus).ok_or(ReportError::MissingCf(bus))?][h]
                }
                TechKind::Hydro => HYDRO_CF,
                _ => unreachable!(),
            })
        };

        let zero = || vec![0.0; nt];
        let mut capacity_mw: BTreeMap<TechKind, Vec<f64>> = BTreeMap::new();
        let mut bus_capacity_mw = Vec::new();
        let mut new_gen_mw: BTreeMap<TechKind, Vec<f64>> = BTreeMap::new();
        let mut generation_mwh: BTreeMap<TechKind, Vec<f64>> = BTreeMap::new();
        let mut gen_curtail_mwh: BTreeMap<TechKind, Vec<f64>> = BTreeMap::new();
        for k in TechKind::ALL {
            capacity_mw.insert(k, zero());
            new_gen_mw.insert(k, zero());
            generation_mwh.insert(k, zero());
            gen_curtail_mwh.insert(k, zero());
        }
        let x = &sol.primal;
        for (g, &(bus, tech)) in vi.sites.iter().enumerate() {
            let mut per_bus = zero();
            for t in 0..nt {
                let cap = x[vi.cap_gen(g, t)];
                capacity_mw.get_mut(&tech).unwrap()[t] += cap;
                per_bus[t] = cap;
                new_gen_mw.get_mut(&tech).unwrap()[t] += x[vi.c_gen(g, t)];
                let mut energy = 0.0;
                let mut curt = 0.0;
                for d in 0..nd {
                    for h in 0..H {
                        curt += weights[d] * x[vi.p_curt_gen(g, t, d, h)];
                        if tech.class() == TechClass::Thermal {
                            energy += weights[d] * x[vi.p_gen(g, t, d, h)];
                        } else {
                            energy += weights[d] * cf(bus, tech, d, h)? * cap;
                        }
                    }
                }
                generation_mwh.get_mut(&tech).unwrap()[t] += energy;
                gen_curtail_mwh.get_mut(&tech).unwrap()[t] += curt;
            }
            bus_capacity_mw.push(BusTechCapacity { bus, tech, capacity_mw: per_bus });
        }
        let mut trans_capacity_mw = zero();
        let mut new_trans_mw = zero();
        for l in 0..vi.lines.len() {
            for t in 0..nt {
                trans_capacity_mw[t] += x[vi.cap_trans(l, t)];
                new_trans_mw[t] += x[vi.c_trans(l, t)];
            }
        }
        let mut stor_capacity_mw = zero();
        let mut new_stor_mw = zero();
        let mut dem_curtail_mwh = zero();
        let mut charge_mwh = zero();
        let mut discharge_mwh = zero();
        for n in 0..vi.buses.len() {
            for t in 0..nt {
                stor_capacity_mw[t] += x[vi.cap_stor(n, t)];
                new_stor_mw[t] += x[vi.c_stor(n, t)];
                for d in 0..nd {
                    for h in 0..H {
                        dem_curtail_mwh[t] += weights[d] * x[vi.p_curt_dem(n, t, d, h)];
                        charge_mwh[t] += weights[d] * x[vi.p_charge(n, t, d, h)];
                        discharge_mwh[t] += weights[d] * x[vi.p_disch(n, t, d, h)];
                    }
                }
            }
        }
        let mut realized_cf = BTreeMap::new();
        for k in TechKind::ALL {
            let caps = &capacity_mw[&k];
            let cf_row: Vec<f64> = (0..nt)
                .map(|t| {
                    if caps[t] > 1e-9 {
                        generation_mwh[&k][t] / (HOURS_PER_YEAR * caps[t])
                    } else {
                        0.0
                    }
                })
                .collect();
            realized_cf.insert(k, cf_row);
        }
        Ok(PlanSolution {
            years,
            objective: sol.objective,
            capacity_mw,
            bus_capacity_mw,
            new_gen_mw,
            trans_capacity_mw,
            new_trans_mw,
            stor_capacity_mw,
            new_stor_mw,
            generation_mwh,
            gen_curtail_mwh,
            dem_curtail_mwh,
            charge_mwh,
            discharge_mwh,
            realized_cf,
        })
    }
}

/// Capacity table: one row per technology plus transmission and storage,
/// one column per calendar year, values in GW rounded to 2 decimals.
#[derive(Debug, Clone, Serialize)]
pub struct CapacityTable {
    pub years: Vec<i32>,
    /// (row label, GW per year).
    pub rows: Vec<(String, Vec<f64>)>,
}

pub fn capacity_table(plan: &PlanSolution) -> CapacityTable {
    let gw2 = |v: f64| (v / 1000.0 * 100.0).round() / 100.0;
    let mut rows = Vec::new();
    for k in TechKind::ALL {
        rows.push((
            k.name().to_string(),
            plan.capacity_mw[&k].iter().map(|&v| gw2(v)).collect(),
        ));
    }
    rows.push((
        "transmission".to_string(),
        plan.trans_capacity_mw.iter().map(|&v| gw2(v)).collect(),
    ));
    rows.push((
        "storage".to_string(),
        plan.stor_capacity_mw.iter().map(|&v| gw2(v)).collect(),
    ));
    CapacityTable { years: plan.years.clone(), rows }
}

pub fn capacity_table_csv(table: &CapacityTable) -> String {
    let mut out = String::from("technology");
    for y in &table.years {
        out.push_str(&format!(",{y}"));
    }
    out.push('\n');
    for (label, vals) in &table.rows {
        out.push_str(label);
        for v in vals {
            out.push_str(&format!(",{v:.2}"));
        }
        out.push('\n');
    }
    out
}

/// Discounted cost components per year; they sum to the LP objective.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub years: Vec<i32>,
    pub capex: Vec<f64>,
    pub opex: Vec<f64>,
    pub total: f64,
}

/// Split the objective by column kind and year. Investment columns carry
/// CAPEX, everything else with a cost coefficient is OPEX; because the
/// split just regroups objective terms, the components sum to the
/// objective exactly (up to float addition order).
pub fn cost_breakdown(model: &LpModel, sol: &LpSolution, vi: &VarIndex, years: &[i32]) -> CostBreakdown {
    let nt = years.len();
    let mut capex = vec![0.0; nt];
    let mut opex = vec![0.0; nt];
    for (c, col) in model.columns.iter().enumerate() {
        if col.objective == 0.0 {
            continue;
        }
        let term = col.objective * sol.primal[c];
        let (kind, t) = vi.col_kind_year(c);
        match kind {
            VarKind::CGen | VarKind::CTrans | VarKind::CStor => capex[t] += term,
            _ => opex[t] += term,
        }
    }
    let total = capex.iter().sum::<f64>() + opex.iter().sum::<f64>();
    CostBreakdown { years: years.to_vec(), capex, opex, total }
}

/// Per-year demand curtailment and its share of total annual demand.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurtailmentReport {
    pub years: Vec<i32>,
    pub curtailed_mwh: Vec<f64>,
    pub demand_mwh: Vec<f64>,
    pub percent: Vec<f64>,
}

pub fn curtailment_report(plan: &PlanSolution, cube: &DemandCube) -> CurtailmentReport {
    let nt = plan.years.len();
    let mut demand_mwh = Vec::with_capacity(nt);
    for t in 0..nt {
        let d = cube.base_energy_mwh(t)
            + (cube.dc_total_mw(t) + cube.em_total_mw(t)) * HOURS_PER_YEAR;
        demand_mwh.push(d);
    }
    let percent = plan
        .dem_curtail_mwh
        .iter()
        .zip(&demand_mwh)
        .map(|(&c, &d)| if d > 0.0 { 100.0 * c / d } else { 0.0 })
        .collect();
    CurtailmentReport {
        years: plan.years.clone(),
        curtailed_mwh: plan.dem_curtail_mwh.clone(),
        demand_mwh,
        percent,
    }
}

/// One sweep point: construction time and the resulting new builds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub omega: u32,
    /// Total new generation investment per tech over the horizon, GW.
    pub new_gen_gw: BTreeMap<TechKind, f64>,
    pub new_trans_gw: f64,
    pub new_stor_gw: f64,
    pub objective: f64,
    /// "optimal" or a failure description; failed points keep zeros.
    pub status: String,
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("omega");
    for k in TechKind::ALL {
        out.push_str(&format!(",new_{}_gw", k.name()));
    }
    out.push_str(",new_transmission_gw,new_storage_gw,objective,status\n");
    for row in rows {
        out.push_str(&row.omega.to_string());
        for k in TechKind::ALL {
            out.push_str(&format!(",{:.4}", row.new_gen_gw.get(&k).copied().unwrap_or(0.0)));
        }
        out.push_str(&format!(
            ",{:.4},{:.4},{:.6e},{}\n",
            row.new_trans_gw, row.new_stor_gw, row.objective, row.status
        ));
    }
    out
}
