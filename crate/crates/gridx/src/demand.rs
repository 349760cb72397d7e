//! Demand synthesis: combine the clustered base-load days with the
//! scenario's growth trajectory, data-center buildout, and manufacturing
//! electrification into the load cube the planner consumes.
//!
//! Three components:
//! - base: the representative-day bus profiles plus a uniform increment
//!   spreading each year's annual energy growth over all buses and hours;
//! - data centers: flat (load factor times peak) blocks split across
//!   regions by share;
//! - electrified manufacturing: flat blocks sized by heat duty, the
//!   electrification fraction, and heater efficiency, split by share.
//!
//! Power is carried in MW throughout; scenario inputs arrive in GW/TWh.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::cluster::RepresentativeDay;
#[cfg(test)]
use crate::cluster::HOURS_PER_DAY;
use crate::domain::DemandScenario;

#[derive(Debug, Error)]
pub enum DemandError {
    #[error("scenario missing demand entry for year {0}")]
    MissingYear(i32),
    #[error("representative day list is empty")]
    NoDays,
    #[error("region shares empty for {0}")]
    NoShares(&'static str),
}

/// Full demand specification over (year, bus, day, hour) plus flat
/// regional large-load blocks and the annual coincident peak.
#[derive(Debug, Clone, Serialize)]
pub struct DemandCube {
    /// Planning years, ascending.
    pub years: Vec<i32>,
    /// Bus ids in load-matrix column order.
    pub bus_ids: Vec<usize>,
    /// Representative-day weights (days per year).
    pub day_weights: Vec<f64>,
    /// base[t][n][d][h], MW.
    pub base_mw: Vec<Vec<Vec<Vec<f64>>>>,
    /// Data-center block per (year, region), MW, constant over (d, h).
    pub dc_mw: Vec<BTreeMap<String, f64>>,
    /// Manufacturing block per (year, region), MW, constant over (d, h).
    pub em_mw: Vec<BTreeMap<String, f64>>,
    /// Coincident system peak per year, MW.
    pub peak_mw: Vec<f64>,
}

impl DemandCube {
    pub fn n_years(&self) -> usize {
        self.years.len()
    }

    /// Total data-center demand in year index `t`, MW.
    pub fn dc_total_mw(&self, t: usize) -> f64 {
        self.dc_mw[t].values().sum()
    }

    pub fn em_total_mw(&self, t: usize) -> f64 {
        self.em_mw[t].values().sum()
    }

    /// Weighted annual base energy in year index `t`, MWh.
    pub fn base_energy_mwh(&self, t: usize) -> f64 {
        let mut total = 0.0;
        for (d, &w) in self.day_weights.iter().enumerate() {
            for col in &self.base_mw[t] {
                total += w * col[d].iter().sum::<f64>();
            }
        }
        total
    }
}

/// Annual energy components in TWh, for reporting and cross-checks.
#[derive(Debug, Clone, Serialize)]
pub struct DemandSummary {
    pub years: Vec<i32>,
    pub base_twh: Vec<f64>,
    pub dc_twh: Vec<f64>,
    pub em_twh: Vec<f64>,
    pub total_twh: Vec<f64>,
    pub peak_gw: Vec<f64>,
}

const HOURS_PER_YEAR_F: f64 = 8760.0;

/// Data-center power in year `year`, MW (peak times load factor).
pub fn dc_power_mw(scenario: &DemandScenario, year: i32) -> f64 {
    scenario.p_dc_gw.get(&year).copied().unwrap_or(0.0) * scenario.lf_dc * 1000.0
}

/// Electrified-manufacturing power in year `year`, MW.
pub fn em_power_mw(scenario: &DemandScenario, year: i32) -> f64 {
    scenario.q_m_gw * scenario.phi.get(&year).copied().unwrap_or(0.0) / scenario.eta_elec * 1000.0
}

/// Coincident peak in year `year`, MW: base peak plus data-center peak
/// (at full nameplate) plus the manufacturing block.
pub fn peak_mw(scenario: &DemandScenario, year: i32) -> Result<f64, DemandError> {
    let base = scenario
        .p_base_peak_gw
        .get(&year)
        .copied()
        .ok_or(DemandError::MissingYear(year))?;
    let dc = scenario.p_dc_gw.get(&year).copied().unwrap_or(0.0);
    let em = scenario.q_m_gw * scenario.phi.get(&year).copied().unwrap_or(0.0) / scenario.eta_elec;
    Ok((base + dc + em) * 1000.0)
}

/// Build the demand cube for the given horizon from clustered days and
/// the scenario trajectory. `psi_dc`/`psi_em` must already be reallocated
/// onto regions that contain buses.
pub fn build_demand_cube(
    horizon: &[i32],
    scenario: &DemandScenario,
    days: &[RepresentativeDay],
    bus_ids: &[usize],
    psi_dc: &BTreeMap<String, f64>,
    psi_em: &BTreeMap<String, f64>,
) -> Result<DemandCube, DemandError> {
    if days.is_empty() {
        return Err(DemandError::NoDays);
    }
    let n_bus = bus_ids.len();
    let base_year = horizon[0];
    let e0 = *scenario
        .e_base_twh
        .get(&base_year)
        .ok_or(DemandError::MissingYear(base_year))?;

    let mut base_mw = Vec::with_capacity(horizon.len());
    let mut dc_mw = Vec::with_capacity(horizon.len());
    let mut em_mw = Vec::with_capacity(horizon.len());
    let mut peaks = Vec::with_capacity(horizon.len());
    for &year in horizon {
        let e_t = *scenario
            .e_base_twh
            .get(&year)
            .ok_or(DemandError::MissingYear(year))?;
        // Spread annual growth uniformly: TWh -> MWh -> MW per bus.
        let increment = (e_t - e0) * 1.0e6 / (n_bus as f64 * HOURS_PER_YEAR_F);
        let year_cube: Vec<Vec<Vec<f64>>> = (0..n_bus)
            .map(|n| {
                days.iter()
                    .map(|day| day.load[n].iter().map(|&v| v + increment).collect())
                    .collect()
            })
            .collect();
        base_mw.push(year_cube);

        let dc_total = dc_power_mw(scenario, year);
        let em_total = em_power_mw(scenario, year);
        if dc_total > 0.0 && psi_dc.is_empty() {
            return Err(DemandError::NoShares("data-center shares"));
        }
        if em_total > 0.0 && psi_em.is_empty() {
            return Err(DemandError::NoShares("manufacturing shares"));
        }
        dc_mw.push(psi_dc.iter().map(|(c, &s)| (c.clone(), s * dc_total)).collect());
        em_mw.push(psi_em.iter().map(|(c, &s)| (c.clone(), s * em_total)).collect());
        peaks.push(peak_mw(scenario, year)?);
    }

    Ok(DemandCube {
        years: horizon.to_vec(),
        bus_ids: bus_ids.to_vec(),
        day_weights: days.iter().map(|d| d.weight).collect(),
        base_mw,
        dc_mw,
        em_mw,
        peak_mw: peaks,
    })
}

/// Annual energy summary of a cube, TWh and GW.
pub fn summarize(cube: &DemandCube) -> DemandSummary {
    let mut base_twh = Vec::new();
    let mut dc_twh = Vec::new();
    let mut em_twh = Vec::new();
    let mut total_twh = Vec::new();
    for t in 0..cube.n_years() {
        let b = cube.base_energy_mwh(t) / 1.0e6;
        let d = cube.dc_total_mw(t) * HOURS_PER_YEAR_F / 1.0e6;
        let e = cube.em_total_mw(t) * HOURS_PER_YEAR_F / 1.0e6;
        base_twh.push(b);
        dc_twh.push(d);
        em_twh.push(e);
        total_twh.push(b + d + e);
    }
    DemandSummary {
        years: cube.years.clone(),
        base_twh,
        dc_twh,
        em_twh,
        total_twh,
        peak_gw: cube.peak_mw.iter().map(|&p| p / 1000.0).collect(),
    }
}
