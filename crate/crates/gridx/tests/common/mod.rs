//! Shared fixtures for the integration suites.
#![allow(dead_code)]

pub mod lp_fixtures;
pub mod mps_read;
pub mod oracle;

use std::collections::BTreeMap;

use gridx::cluster::RepresentativeDay;
use gridx::demand::{build_demand_cube, DemandCube};
use gridx::domain::{
    Bus, DemandScenario, EconParams, Generator, GridTopology, Line, ScenarioConfig, TechKind,
};
use gridx::synth::{default_catalog, default_storage};

/// Owned planner-input bundle for a small three-bus system: NG at bus 0,
/// solar at bus 1, wind at bus 2, a two-line path, one DC and one EM
/// region.
pub struct Toy {
    pub scenario: ScenarioConfig,
    pub topology: GridTopology,
    pub days: Vec<RepresentativeDay>,
    pub cube: DemandCube,
    pub solar_bus_ids: Vec<usize>,
    pub wind_bus_ids: Vec<usize>,
    pub dc_region_buses: BTreeMap<String, Vec<usize>>,
    pub em_region_buses: BTreeMap<String, Vec<usize>>,
}

impl Toy {
    pub fn planner_inputs(&self) -> gridx::planner::PlannerInputs<'_> {
        gridx::planner::PlannerInputs {
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
}

pub fn flat_days(n_days: usize, load_mw: f64) -> Vec<RepresentativeDay> {
    (0..n_days)
        .map(|d| RepresentativeDay {
            weight: 365.0 / n_days as f64,
            medoid_day: d,
            load: vec![
                (0..24).map(|h| load_mw + ((h + d) % 4) as f64).collect();
                3
            ],
            cf_solar: vec![(0..24)
                .map(|h| {
                    if (7..19).contains(&h) {
                        0.7 * (std::f64::consts::PI * (h as f64 - 7.0) / 12.0).sin()
                    } else {
                        0.0
                    }
                })
                .collect()],
            cf_wind: vec![(0..24)
                .map(|h| 0.4 + 0.2 * (2.0 * std::f64::consts::PI * h as f64 / 24.0).sin())
                .collect()],
        })
        .collect()
}

/// `n_days` representative days; `load_mw` flat-ish base load per bus.
pub fn toy(n_days: usize, load_mw: f64) -> Toy {
    let horizon = vec![2025, 2026];
    let mut demand = DemandScenario {
        e_base_twh: [(2025, 1.05), (2026, 1.15)].into(),
        p_dc_gw: [(2025, 0.0), (2026, 0.03)].into(),
        lf_dc: 0.9,
        psi_dc: BTreeMap::new(),
        q_m_gw: 0.1,
        phi: [(2025, 0.0), (2026, 0.1)].into(),
        eta_elec: 0.97,
        psi_em: BTreeMap::new(),
        p_base_peak_gw: [(2025, 0.14), (2026, 0.16)].into(),
    };
    let psi_dc: BTreeMap<String, f64> = [("travis".to_string(), 1.0)].into();
    let psi_em: BTreeMap<String, f64> = [("dallas".to_string(), 1.0)].into();
    demand.psi_dc = psi_dc.clone();
    demand.psi_em = psi_em.clone();

    let topology = GridTopology {
        buses: vec![
            Bus { id: 0, latitude: 30.2672, longitude: -97.7431, county: None },
            Bus { id: 1, latitude: 29.7604, longitude: -95.3698, county: None },
            Bus { id: 2, latitude: 32.7767, longitude: -96.7970, county: None },
        ],
        generators: vec![
            Generator { bus: 0, tech: TechKind::NaturalGas, initial_capacity_mw: 150.0 },
            Generator { bus: 1, tech: TechKind::Solar, initial_capacity_mw: 50.0 },
            Generator { bus: 2, tech: TechKind::Wind, initial_capacity_mw: 50.0 },
        ],
        lines: vec![
            Line { from: 0, to: 1, reactance_pu: 0.08, initial_capacity_mw: 120.0, length_mi: 146.0 },
            Line { from: 1, to: 2, reactance_pu: 0.10, initial_capacity_mw: 120.0, length_mi: 225.0 },
        ],
        initial_storage_mw: BTreeMap::new(),
    };

    let scenario = ScenarioConfig {
        horizon: horizon.clone(),
        tech: default_catalog(&horizon),
        storage: default_storage(&horizon),
        econ: EconParams { interest_rate: 0.05, ..Default::default() },
        demand: demand.clone(),
        clustering: Default::default(),
        solver: Default::default(),
        planner: Default::default(),
        trans_lead_time_yr: 3,
    };
    let days = flat_days(n_days, load_mw);
    let cube = build_demand_cube(&horizon, &demand, &days, &[0, 1, 2], &psi_dc, &psi_em).unwrap();
    Toy {
        scenario,
        topology,
        days,
        cube,
        solar_bus_ids: vec![1],
        wind_bus_ids: vec![2],
        dc_region_buses: [("travis".to_string(), vec![0])].into(),
        em_region_buses: [("dallas".to_string(), vec![2])].into(),
    }
}
