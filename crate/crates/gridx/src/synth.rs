//! Deterministic synthetic fixtures: a small three-bus demo input set
//! (written to disk for the CLI's `init-example` and the end-to-end
//! tests) and an in-memory system at full ERCOT-like dimensions for
//! model-size checks.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cluster::{RepresentativeDay, HOURS_PER_DAY};
use crate::demand::{build_demand_cube, DemandCube};
use crate::domain::{
    Bus, DemandScenario, EconParams, Generator, GridTopology, Line, ScenarioConfig, StorageParams,
    TechCatalogEntry, TechKind, TechYearCosts,
};

/// Reference seven-year load-growth trajectory: annual base energy and
/// peaks, data-center buildout, and staged manufacturing electrification.
pub fn load_growth_scenario() -> (Vec<i32>, DemandScenario) {
    let horizon: Vec<i32> = (2025..=2031).collect();
    let m = |vals: &[f64]| -> BTreeMap<i32, f64> {
        horizon.iter().copied().zip(vals.iter().copied()).collect()
    };
    let demand = DemandScenario {
        e_base_twh: m(&[485.90, 538.94, 595.63, 685.31, 747.59, 808.97, 846.99]),
        p_dc_gw: m(&[0.0, 2.43, 6.66, 13.90, 18.00, 22.18, 24.20]),
        lf_dc: 0.9,
        psi_dc: BTreeMap::new(),
        q_m_gw: 18.97,
        phi: m(&[0.0, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30]),
        eta_elec: 0.97,
        psi_em: BTreeMap::new(),
        p_base_peak_gw: m(&[85.76, 92.22, 97.63, 107.64, 110.86, 116.77, 120.33]),
    };
    (horizon, demand)
}

fn tech_entry(
    horizon: &[i32],
    lead: u32,
    f_min: f64,
    f_max: f64,
    ramp: f64,
    earliest: i32,
    capex_per_mw: f64,
    fom: f64,
    vom: f64,
    fuel: f64,
    hr: f64,
) -> TechCatalogEntry {
    TechCatalogEntry {
        lead_time_yr: lead,
        f_min,
        f_max,
        ramp,
        earliest_build_year: earliest,
        years: horizon
            .iter()
            .map(|&y| {
                (
                    y,
                    TechYearCosts {
                        capex_per_mw,
                        fom_per_mw_yr: fom,
                        vom_per_mwh: vom,
                        fuel_per_mmbtu: fuel,
                        heat_rate: hr,
                    },
                )
            })
            .collect(),
    }
}

/// Standard technology catalog used by both fixtures.
pub fn default_catalog(horizon: &[i32]) -> BTreeMap<TechKind, TechCatalogEntry> {
    let y0 = horizon[0];
    let mut tech = BTreeMap::new();
    tech.insert(
        TechKind::Nuclear,
        tech_entry(horizon, 6, 0.7, 1.0, 0.05, 2029, 6_000_000.0, 120_000.0, 2.0, 0.7, 10.5),
    );
    tech.insert(
        TechKind::Coal,
        tech_entry(horizon, 5, 0.3, 0.95, 0.3, y0, 3_500_000.0, 60_000.0, 4.0, 2.0, 10.0),
    );
    tech.insert(
        TechKind::NaturalGas,
        tech_entry(horizon, 3, 0.1, 0.95, 0.6, y0, 1_000_000.0, 20_000.0, 2.0, 3.5, 7.0),
    );
    tech.insert(
        TechKind::Solar,
        tech_entry(horizon, 1, 0.0, 1.0, 1.0, y0, 1_100_000.0, 15_000.0, 0.0, 0.0, 0.0),
    );
    tech.insert(
        TechKind::Wind,
        tech_entry(horizon, 3, 0.0, 1.0, 1.0, y0, 1_400_000.0, 25_000.0, 0.0, 0.0, 0.0),
    );
    tech.insert(
        TechKind::Hydro,
        tech_entry(horizon, 3, 0.0, 1.0, 1.0, y0, 3_000_000.0, 40_000.0, 0.0, 0.0, 0.0),
    );
    tech
}

/// Storage parameters with a flat cost trajectory over `horizon`.
pub fn default_storage(horizon: &[i32]) -> StorageParams {
    let mut s = StorageParams::default();
    for &y in horizon {
        s.capex_per_mw.insert(y, 900_000.0);
        s.fom_per_mw_yr.insert(y, 18_000.0);
    }
    s
}

// ---------------------------------------------------------------------------
// Three-bus demo input directory
// ---------------------------------------------------------------------------

fn write(dir: &Path, name: &str, content: &str) -> std::io::Result<()> {
    let mut f = std::fs::File::create(dir.join(name))?;
    f.write_all(content.as_bytes())
}

/// Write a complete, self-consistent demo input set (scenario plus CSVs)
/// into `dir`. Fully deterministic.
pub fn write_demo_inputs(dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let scenario = r#"{
  "horizon": [2025, 2026],
  "econ": { "interest_rate": 0.05, "base_year": 2022 },
  "storage": {
    "capex": { "2025": 900, "2026": 880 },
    "fom": { "2025": 18, "2026": 18 }
  },
  "tech": {
    "nuclear": { "lead_time": 6, "f_min": 0.7, "f_max": 1.0, "ramp": 0.05, "earliest_build_year": 2029,
      "2025": { "capex": 6000, "fom": 120, "vom": 2.0, "fuel": 0.7, "heat_rate": 10.5 },
      "2026": { "capex": 6000, "fom": 120, "vom": 2.0, "fuel": 0.7, "heat_rate": 10.5 } },
    "coal": { "lead_time": 5, "f_min": 0.3, "f_max": 0.95, "ramp": 0.3,
      "2025": { "capex": 3500, "fom": 60, "vom": 4.0, "fuel": 2.0, "heat_rate": 10.0 },
      "2026": { "capex": 3500, "fom": 60, "vom": 4.0, "fuel": 2.0, "heat_rate": 10.0 } },
    "natural_gas": { "lead_time": 3, "f_min": 0.1, "f_max": 0.95, "ramp": 0.6,
      "2025": { "capex": 1000, "fom": 20, "vom": 2.0, "fuel": 3.5, "heat_rate": 7.0 },
      "2026": { "capex": 1000, "fom": 20, "vom": 2.0, "fuel": 3.5, "heat_rate": 7.0 } },
    "solar": { "lead_time": 1,
      "2025": { "capex": 1100, "fom": 15 },
      "2026": { "capex": 1050, "fom": 15 } },
    "wind": { "lead_time": 3,
      "2025": { "capex": 1400, "fom": 25 },
      "2026": { "capex": 1380, "fom": 25 } },
    "hydro": { "lead_time": 3,
      "2025": { "capex": 3000, "fom": 40 },
      "2026": { "capex": 3000, "fom": 40 } }
  },
  "demand": {
    "E_base": { "2025": 1.05, "2026": 1.25 },
    "P_DC": { "2025": 0.0, "2026": 0.05 },
    "LF_DC": 0.9,
    "Q_M": 0.2,
    "phi": { "2025": 0.0, "2026": 0.1 },
    "eta_elec": 0.97,
    "P_base_peak": { "2025": 0.15, "2026": 0.17 }
  },
  "clustering": { "k": 1, "seed": 7, "restarts": 3 },
  "solver": { "backend": "embedded", "tolerance": 1e-7 }
}
"#;
    write(dir, "scenario.json", scenario)?;
    write(
        dir,
        "buses.csv",
        "id,lat,lon,county\n0,30.2672,-97.7431,\n1,29.7604,-95.3698,\n2,32.7767,-96.7970,\n",
    )?;
    write(
        dir,
        "generators.csv",
        "bus,tech,capacity_mw\n0,natural_gas,150\n1,solar,50\n2,wind,50\n",
    )?;
    write(
        dir,
        "lines.csv",
        "from,to,reactance_pu,capacity_mw,length_mi\n0,1,0.08,120,146\n1,2,0.10,120,225\n",
    )?;
    write(
        dir,
        "county_centroids.csv",
        "county,lat,lon\ntravis,30.2672,-97.7431\nharris,29.7604,-95.3698\ndallas,32.7767,-96.7970\n",
    )?;
    write(dir, "psi_dc.csv", "county,share\ntravis,0.6\nharris,0.4\n")?;
    write(dir, "psi_em.csv", "county,share\ndallas,1.0\n")?;

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut base = String::from("0,1,2\n");
    let mut solar = String::from("0,1,2\n");
    let mut wind = String::from("0,1,2\n");
    for hour in 0..8760usize {
        let day = (hour / 24) as f64;
        let h = (hour % 24) as f64;
        let season = (2.0 * std::f64::consts::PI * day / 365.0).cos();
        let diurnal = (2.0 * std::f64::consts::PI * (h - 15.0) / 24.0).cos();
        let mut brow = Vec::new();
        let mut srow = Vec::new();
        let mut wrow = Vec::new();
        for b in 0..3 {
            let noise: f64 = rng.gen::<f64>() - 0.5;
            let load = 40.0 + 4.0 * season + 6.0 * diurnal + 2.0 * noise + b as f64;
            brow.push(format!("{:.3}", load));
            let s = if (7.0..19.0).contains(&h) {
                let x = (std::f64::consts::PI * (h - 7.0) / 12.0).sin();
                (0.75 * x * (1.0 - 0.1 * rng.gen::<f64>())).clamp(0.0, 1.0)
            } else {
                0.0
            };
            srow.push(format!("{:.4}", s));
            let w = (0.35 + 0.2 * (2.0 * std::f64::consts::PI * (h + day) / 24.0).sin()
                + 0.15 * (rng.gen::<f64>() - 0.5))
                .clamp(0.0, 1.0);
            wrow.push(format!("{:.4}", w));
        }
        base.push_str(&brow.join(","));
        base.push('\n');
        solar.push_str(&srow.join(","));
        solar.push('\n');
        wind.push_str(&wrow.join(","));
        wind.push('\n');
    }
    write(dir, "base_load.csv", &base)?;
    write(dir, "cf_solar.csv", &solar)?;
    write(dir, "cf_wind.csv", &wind)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Full-scale in-memory fixture
// ---------------------------------------------------------------------------

/// Owned bundle mirroring the planner's borrowed input set.
pub struct ScaleFixture {
    pub scenario: ScenarioConfig,
    pub topology: GridTopology,
    pub days: Vec<RepresentativeDay>,
    pub cube: DemandCube,
    pub solar_bus_ids: Vec<usize>,
    pub wind_bus_ids: Vec<usize>,
    pub dc_region_buses: BTreeMap<String, Vec<usize>>,
    pub em_region_buses: BTreeMap<String, Vec<usize>>,
}

/// Synthetic system at full planning scale: 123 buses, 151 generator
/// sites, 173 lines, 7 years, 5 representative days, 38 data-center and
/// 10 manufacturing regions.
pub fn scale_fixture() -> ScaleFixture {
    let (horizon, mut demand) = load_growth_scenario();
    let n_bus = 123usize;
    let mut rng = ChaCha8Rng::seed_from_u64(42);

    let buses: Vec<Bus> = (0..n_bus)
        .map(|i| Bus {
            id: i,
            latitude: 26.0 + 10.0 * rng.gen::<f64>(),
            longitude: -106.0 + 12.0 * rng.gen::<f64>(),
            county: None,
        })
        .collect();

    // 151 generator sites: 89 thermal (50 NG, 25 coal, 14 nuclear) and
    // 62 renewable (30 solar, 25 wind, 7 hydro), spread over buses with
    // at most one site per (bus, tech).
    let mut generators = Vec::new();
    let plan: [(TechKind, usize); 6] = [
        (TechKind::NaturalGas, 50),
        (TechKind::Coal, 25),
        (TechKind::Nuclear, 14),
        (TechKind::Solar, 30),
        (TechKind::Wind, 25),
        (TechKind::Hydro, 7),
    ];
    let mut cursor = 0usize;
    for (tech, count) in plan {
        for k in 0..count {
            let bus = (cursor + k * 7) % n_bus;
            generators.push(Generator {
                bus,
                tech,
                initial_capacity_mw: 300.0 + 50.0 * ((bus % 5) as f64),
            });
            cursor += 1;
        }
    }
    // Dedup (bus, tech) collisions by shifting to the next free bus.
    let mut seen = std::collections::BTreeSet::new();
    for g in &mut generators {
        while !seen.insert((g.bus, g.tech)) {
            g.bus = (g.bus + 1) % n_bus;
        }
    }
    assert_eq!(generators.len(), 151);

    // 173 lines: a ring for connectivity plus deterministic chords.
    let mut lines = Vec::new();
    let mut line_set = std::collections::BTreeSet::new();
    for i in 0..n_bus {
        let j = (i + 1) % n_bus;
        let (a, b) = (i.min(j), i.max(j));
        line_set.insert((a, b));
        lines.push(Line {
            from: a,
            to: b,
            reactance_pu: 0.05 + 0.1 * rng.gen::<f64>(),
            initial_capacity_mw: 800.0,
            length_mi: 40.0 + 60.0 * rng.gen::<f64>(),
        });
    }
    while lines.len() < 173 {
        let a = rng.gen_range(0..n_bus);
        let b = rng.gen_range(0..n_bus);
        if a == b {
            continue;
        }
        let key = (a.min(b), a.max(b));
        if !line_set.insert(key) {
            continue;
        }
        lines.push(Line {
            from: key.0,
            to: key.1,
            reactance_pu: 0.05 + 0.1 * rng.gen::<f64>(),
            initial_capacity_mw: 600.0,
            length_mi: 60.0 + 200.0 * rng.gen::<f64>(),
        });
    }
    let topology = GridTopology {
        buses,
        generators,
        lines,
        initial_storage_mw: BTreeMap::new(),
    };

    // Five representative days with weights summing to 365.
    let weights = [100.0, 80.0, 75.0, 60.0, 50.0];
    let solar_bus_ids: Vec<usize> = topology
        .generators
        .iter()
        .filter(|g| g.tech == TechKind::Solar)
        .map(|g| g.bus)
        .collect();
    let wind_bus_ids: Vec<usize> = topology
        .generators
        .iter()
        .filter(|g| g.tech == TechKind::Wind)
        .map(|g| g.bus)
        .collect();
    let days: Vec<RepresentativeDay> = weights
        .iter()
        .enumerate()
        .map(|(d, &w)| {
            let load = (0..n_bus)
                .map(|n| {
                    (0..HOURS_PER_DAY)
                        .map(|h| {
                            450.0
                                + 40.0 * (d as f64)
                                + 60.0
                                    * (2.0 * std::f64::consts::PI * (h as f64 - 15.0) / 24.0).cos()
                                + (n % 7) as f64 * 5.0
                        })
                        .collect()
                })
                .collect();
            let cf_solar = (0..solar_bus_ids.len())
                .map(|_| {
                    (0..HOURS_PER_DAY)
                        .map(|h| {
                            if (7..19).contains(&h) {
                                0.7 * (std::f64::consts::PI * (h as f64 - 7.0) / 12.0).sin()
                            } else {
                                0.0
                            }
                        })
                        .collect()
                })
                .collect();
            let cf_wind = (0..wind_bus_ids.len())
                .map(|k| {
                    (0..HOURS_PER_DAY)
                        .map(|h| {
                            (0.4 + 0.2
                                * (2.0 * std::f64::consts::PI * (h + k + d) as f64 / 24.0).sin())
                            .clamp(0.0, 1.0)
                        })
                        .collect()
                })
                .collect();
            RepresentativeDay { weight: w, medoid_day: d, load, cf_solar, cf_wind }
        })
        .collect();

    // 38 single-bus data-center regions and 10 manufacturing regions.
    let mut dc_region_buses = BTreeMap::new();
    let mut psi_dc = BTreeMap::new();
    for i in 0..38usize {
        let name = format!("dc{i:02}");
        dc_region_buses.insert(name.clone(), vec![i * 3 % n_bus]);
        psi_dc.insert(name, 1.0 / 38.0);
    }
    let mut em_region_buses = BTreeMap::new();
    let mut psi_em = BTreeMap::new();
    for i in 0..10usize {
        let name = format!("em{i}");
        em_region_buses.insert(name.clone(), vec![(7 + i * 11) % n_bus]);
        psi_em.insert(name, 0.1);
    }
    demand.psi_dc = psi_dc.clone();
    demand.psi_em = psi_em.clone();

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
    let bus_ids: Vec<usize> = (0..n_bus).collect();
    let cube = build_demand_cube(&horizon, &demand, &days, &bus_ids, &psi_dc, &psi_em).unwrap();
    ScaleFixture {
        scenario,
        topology,
        days,
        cube,
        solar_bus_ids,
        wind_bus_ids,
        dc_region_buses,
        em_region_buses,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn demo_inputs_load_cleanly() {
        let dir = tempfile::tempdir().unwrap();
        write_demo_inputs(dir.path()).unwrap();
        let scenario = crate::ingest::load_scenario(&dir.path().join("scenario.json")).unwrap();
        assert_eq!(scenario.horizon, vec![2025, 2026]);
        let grid = crate::ingest::load_grid_inputs(dir.path()).unwrap();
        assert_eq!(grid.topology.buses.len(), 3);
        assert_eq!(grid.topology.generators.len(), 3);
        let report = crate::domain::validate_topology(&grid.topology);
        assert!(report.is_valid(), "{report:?}");
    }

    #[test]
    fn demo_inputs_are_deterministic() {
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        write_demo_inputs(d1.path()).unwrap();
        write_demo_inputs(d2.path()).unwrap();
        for name in ["base_load.csv", "cf_solar.csv", "cf_wind.csv", "scenario.json"] {
            let a = std::fs::read(d1.path().join(name)).unwrap();
            let b = std::fs::read(d2.path().join(name)).unwrap();
            assert_eq!(a, b, "{name}");
        }
    }

    #[test]
    fn scale_fixture_dimensions() {
        let f = scale_fixture();
        assert_eq!(f.topology.buses.len(), 123);
        assert_eq!(f.topology.generators.len(), 151);
        assert_eq!(f.topology.lines.len(), 173);
        assert_eq!(f.scenario.n_years(), 7);
        assert_eq!(f.days.len(), 5);
        assert_eq!(f.dc_region_buses.len(), 38);
        assert_eq!(f.em_region_buses.len(), 10);
        let w: f64 = f.days.iter().map(|d| d.weight).sum();
        assert!((w - 365.0).abs() < 1e-9);
        let report = crate::domain::validate_topology(&f.topology);
        assert!(report.is_valid(), "{report:?}");
    }
}
