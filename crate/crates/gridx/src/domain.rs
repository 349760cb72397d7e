//! Core value types shared by every stage of the planning pipeline.
//!
//! All quantities are stored in a single unit system: capacities in MW,
//! energy in MWh, costs in USD. Inputs given in $/kW are converted on
//! ingest (x1000 per MW). Calendar years are kept alongside 1-based model
//! indices; lead-time arithmetic always uses model indices.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DomainError {
    #[error("mixed reactance signs on parallel lines between bus {0} and bus {1}")]
    MixedReactanceSigns(usize, usize),
    #[error("line endpoints must differ, got bus {0} twice")]
    SelfLoop(usize),
    #[error("nonpositive reactance {x} on line {from}-{to}")]
    NonpositiveReactance { from: usize, to: usize, x: f64 },
}

/// Generation technology. Nuclear, coal, and natural gas are thermal;
/// solar, wind, and hydro are renewable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TechKind {
    Nuclear,
    Coal,
    NaturalGas,
    Solar,
    Wind,
    Hydro,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TechClass {
    Thermal,
    Renewable,
}

impl TechKind {
    pub const ALL: [TechKind; 6] = [
        TechKind::Nuclear,
        TechKind::Coal,
        TechKind::NaturalGas,
        TechKind::Solar,
        TechKind::Wind,
        TechKind::Hydro,
    ];

    pub fn class(self) -> TechClass {
        match self {
            TechKind::Nuclear | TechKind::Coal | TechKind::NaturalGas => TechClass::Thermal,
            TechKind::Solar | TechKind::Wind | TechKind::Hydro => TechClass::Renewable,
        }
    }

    pub fn is_thermal(self) -> bool {
        self.class() == TechClass::Thermal
    }

    pub fn name(self) -> &'static str {
        match self {
            TechKind::Nuclear => "nuclear",
            TechKind::Coal => "coal",
            TechKind::NaturalGas => "natural_gas",
            TechKind::Solar => "solar",
            TechKind::Wind => "wind",
            TechKind::Hydro => "hydro",
        }
    }

    pub fn parse(s: &str) -> Option<TechKind> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nuclear" => Some(TechKind::Nuclear),
            "coal" => Some(TechKind::Coal),
            "natural_gas" | "naturalgas" | "ng" | "gas" => Some(TechKind::NaturalGas),
            "solar" => Some(TechKind::Solar),
            "wind" => Some(TechKind::Wind),
            "hydro" => Some(TechKind::Hydro),
            _ => None,
        }
    }
}

/// A node of the transmission network.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Bus {
    pub id: usize,
    pub latitude: f64,
    pub longitude: f64,
    /// Region identifier; optional in input, resolved by the spatial module.
    pub county: Option<String>,
}

/// Aggregated generator: at most one per (bus, tech) pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Generator {
    pub bus: usize,
    pub tech: TechKind,
    pub initial_capacity_mw: f64,
}

/// Bidirectional transmission line, stored with `from < to`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Line {
    pub from: usize,
    pub to: usize,
    pub reactance_pu: f64,
    pub initial_capacity_mw: f64,
    pub length_mi: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct GridTopology {
    pub buses: Vec<Bus>,
    pub generators: Vec<Generator>,
    pub lines: Vec<Line>,
    /// Initial storage power capacity per bus, MW. Empty map means zero everywhere.
    #[serde(default)]
    pub initial_storage_mw: BTreeMap<usize, f64>,
}

/// Per-year cost block of a technology, already converted to per-MW units.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TechYearCosts {
    /// Capital cost, $/MW.
    pub capex_per_mw: f64,
    /// Fixed O&M, $/MW-yr.
    pub fom_per_mw_yr: f64,
    /// Variable O&M, $/MWh (thermal only, zero otherwise).
    pub vom_per_mwh: f64,
    /// Fuel cost, $/MMBtu (thermal only).
    pub fuel_per_mmbtu: f64,
    /// Heat rate, MMBtu/MWh (thermal only).
    pub heat_rate: f64,
}

impl TechYearCosts {
    /// Total variable operating cost in $/MWh: VOM plus fuel burn.
    pub fn variable_cost_per_mwh(&self) -> f64 {
        self.vom_per_mwh + self.fuel_per_mmbtu * self.heat_rate
    }
}

/// Full per-tech catalog entry: time-invariant operating limits plus
/// per-year cost blocks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TechCatalogEntry {
    pub lead_time_yr: u32,
    /// Minimum thermal capacity factor (0 for renewables).
    pub f_min: f64,
    /// Maximum thermal capacity factor (1 for renewables).
    pub f_max: f64,
    /// Hourly ramping limit as a fraction of available capacity (thermal only).
    pub ramp: f64,
    /// First calendar year a new build may be decided.
    pub earliest_build_year: i32,
    /// Calendar year -> costs.
    pub years: BTreeMap<i32, TechYearCosts>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StorageParams {
    /// Calendar year -> capital cost, $/MW.
    pub capex_per_mw: BTreeMap<i32, f64>,
    /// Calendar year -> fixed O&M, $/MW-yr.
    pub fom_per_mw_yr: BTreeMap<i32, f64>,
    pub lead_time_yr: u32,
    pub duration_hours: f64,
    pub eta_charge: f64,
    pub eta_discharge: f64,
}

impl StorageParams {
    pub fn round_trip_efficiency(&self) -> f64 {
        self.eta_charge * self.eta_discharge
    }
}

impl Default for StorageParams {
    fn default() -> Self {
        let rte: f64 = 0.85;
        StorageParams {
            capex_per_mw: BTreeMap::new(),
            fom_per_mw_yr: BTreeMap::new(),
            lead_time_yr: 1,
            duration_hours: 4.0,
            eta_charge: rte.sqrt(),
            eta_discharge: rte.sqrt(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EconParams {
    /// Interest rate, fraction per year.
    pub interest_rate: f64,
    /// Financial base year for discounting.
    pub base_year: i32,
    /// Demand curtailment penalty, $/MWh.
    pub demand_curtail_cost: f64,
    /// Generation curtailment penalty, $/MWh.
    pub gen_curtail_cost: f64,
    /// Transmission capital cost, $/MW-mile.
    pub trans_capex_per_mw_mile: f64,
    /// System base power, MVA.
    pub s_base: f64,
    /// Upper bound on a single new generation investment, MW.
    pub cap_gen_mw: f64,
    /// Upper bound on a single new transmission investment, MW.
    pub cap_trans_mw: f64,
    /// Upper bound on a single new storage investment, MW.
    pub cap_stor_mw: f64,
}

impl Default for EconParams {
    fn default() -> Self {
        EconParams {
            interest_rate: 0.0,
            base_year: 2022,
            demand_curtail_cost: 5000.0,
            gen_curtail_cost: 100.0,
            trans_capex_per_mw_mile: 0.93,
            s_base: 100.0,
            cap_gen_mw: 1e6,
            cap_trans_mw: 1e6,
            cap_stor_mw: 1e6,
        }
    }
}

/// Demand growth scenario over the planning horizon.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DemandScenario {
    /// Annual base demand per calendar year, TWh/yr.
    pub e_base_twh: BTreeMap<i32, f64>,
    /// Data center peak per calendar year, GW.
    pub p_dc_gw: BTreeMap<i32, f64>,
    /// Data center load factor.
    pub lf_dc: f64,
    /// Region -> share of data center demand.
    pub psi_dc: BTreeMap<String, f64>,
    /// Total manufacturing heat duty, GW.
    pub q_m_gw: f64,
    /// Electrification fraction per calendar year.
    pub phi: BTreeMap<i32, f64>,
    /// Joule heating efficiency.
    pub eta_elec: f64,
    /// Region -> share of electrified manufacturing demand.
    pub psi_em: BTreeMap<String, f64>,
    /// Base peak load per calendar year, GW.
    pub p_base_peak_gw: BTreeMap<i32, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ClusteringConfig {
    pub k: usize,
    pub seed: u64,
    pub restarts: usize,
    /// "mean" or "medoid".
    pub profile: String,
}

impl Default for ClusteringConfig {
    fn default() -> Self {
        ClusteringConfig { k: 5, seed: 0, restarts: 10, profile: "mean".into() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// "embedded" or "external".
    pub backend: String,
    pub tolerance: f64,
    /// Command template for the external backend; `{mps}` and `{sol}`
    /// placeholders are substituted with file paths.
    pub external_cmd: Option<String>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { backend: "embedded".into(), tolerance: 1e-7, external_cmd: None }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerConfig {
    /// When set, investments whose completion falls beyond the horizon are
    /// fixed to zero instead of merely carrying cost.
    pub forbid_stranded_investment: bool,
}

/// Complete scenario: horizon, technology catalog, economics, demand,
/// clustering, and solver settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioConfig {
    /// Calendar years of the planning horizon, ascending.
    pub horizon: Vec<i32>,
    pub tech: BTreeMap<TechKind, TechCatalogEntry>,
    pub storage: StorageParams,
    pub econ: EconParams,
    pub demand: DemandScenario,
    pub clustering: ClusteringConfig,
    pub solver: SolverConfig,
    pub planner: PlannerConfig,
    /// Transmission construction lead time, years.
    pub trans_lead_time_yr: u32,
}

impl ScenarioConfig {
    pub fn n_years(&self) -> usize {
        self.horizon.len()
    }

    pub fn discount_factor(&self, year: i32) -> f64 {
        1.0 / (1.0 + self.econ.interest_rate).powi(year - self.econ.base_year)
    }
}

/// Report-style list of topology violations; empty means valid.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Structural validation of a parsed topology: duplicate generators,
/// dangling line endpoints, nonpositive reactance, disconnected buses,
/// out-of-range coordinates.
pub fn validate_topology(topology: &GridTopology) -> ValidationReport {
    let mut v = Vec::new();
    let ids: BTreeSet<usize> = topology.buses.iter().map(|b| b.id).collect();
    if ids.len() != topology.buses.len() {
        v.push("duplicate bus ids".to_string());
    }
    for (i, b) in topology.buses.iter().enumerate() {
        if b.id != i {
            v.push(format!("bus ids not dense 0..N-1: position {i} has id {}", b.id));
            break;
        }
    }
    for b in &topology.buses {
        if b.latitude.abs() > 90.0 || b.longitude.abs() > 180.0 {
            v.push(format!("bus {} has out-of-range coordinates", b.id));
        }
    }
    let mut seen = BTreeSet::new();
    for g in &topology.generators {
        if !ids.contains(&g.bus) {
            v.push(format!("generator references unknown bus {}", g.bus));
        }
        if !seen.insert((g.bus, g.tech)) {
            v.push(format!("duplicate (bus,tech) generator: ({}, {})", g.bus, g.tech.name()));
        }
        if g.initial_capacity_mw < 0.0 {
            v.push(format!("negative capacity on generator ({}, {})", g.bus, g.tech.name()));
        }
    }
    let mut seen_lines = BTreeSet::new();
    for l in &topology.lines {
        for end in [l.from, l.to] {
            if !ids.contains(&end) {
                v.push(format!("line references unknown bus {end}"));
            }
        }
        if l.from == l.to {
            v.push(format!("self-loop line at bus {}", l.from));
        }
        if l.from > l.to {
            v.push(format!("line {}-{} not stored with from < to", l.from, l.to));
        }
        if l.reactance_pu <= 0.0 {
            v.push(format!("nonpositive reactance on line {}-{}", l.from, l.to));
        }
        if !seen_lines.insert((l.from.min(l.to), l.from.max(l.to))) {
            v.push(format!("duplicate line {}-{}", l.from, l.to));
        }
    }
    // Connectivity: every bus reachable from bus 0 through lines.
    if !topology.buses.is_empty() && !topology.lines.is_empty() {
        let n = topology.buses.len();
        let mut adj = vec![Vec::new(); n];
        for l in &topology.lines {
            if l.from < n && l.to < n {
                adj[l.from].push(l.to);
                adj[l.to].push(l.from);
            }
        }
        let mut reach = vec![false; n];
        let mut stack = vec![0usize];
        reach[0] = true;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !reach[w] {
                    reach[w] = true;
                    stack.push(w);
                }
            }
        }
        for (i, r) in reach.iter().enumerate() {
            if !r {
                v.push(format!("bus {i} is disconnected"));
            }
        }
    }
    ValidationReport { violations: v }
}

/// Merge raw generator and line records into the aggregated topology:
/// per-(bus,tech) capacities are summed; parallel lines are merged with
/// summed capacity and parallel-combined reactance (1/X = sum 1/Xi).
pub fn aggregate_raw_grid(
    buses: Vec<Bus>,
    raw_generators: &[Generator],
    raw_lines: &[Line],
) -> Result<GridTopology, DomainError> {
    let mut gens: BTreeMap<(usize, TechKind), f64> = BTreeMap::new();
    for g in raw_generators {
        *gens.entry((g.bus, g.tech)).or_insert(0.0) += g.initial_capacity_mw;
    }
    let generators = gens
        .into_iter()
        .map(|((bus, tech), cap)| Generator { bus, tech, initial_capacity_mw: cap })
        .collect();

    // (capacity sum, sum of 1/X, length, count, any negative X)
    let mut lines: BTreeMap<(usize, usize), (f64, f64, f64, usize, bool, bool)> = BTreeMap::new();
    for l in raw_lines {
        if l.from == l.to {
            return Err(DomainError::SelfLoop(l.from));
        }
        let key = (l.from.min(l.to), l.from.max(l.to));
        if l.reactance_pu == 0.0 {
            return Err(DomainError::NonpositiveReactance { from: key.0, to: key.1, x: 0.0 });
        }
        let e = lines.entry(key).or_insert((0.0, 0.0, 0.0, 0, false, false));
        e.0 += l.initial_capacity_mw;
        e.1 += 1.0 / l.reactance_pu;
        e.2 = e.2.max(l.length_mi);
        e.3 += 1;
        if l.reactance_pu > 0.0 {
            e.4 = true;
        } else {
            e.5 = true;
        }
    }
    let mut merged = Vec::new();
    for ((from, to), (cap, inv_x, length, _count, pos, neg)) in lines {
        if pos && neg {
            return Err(DomainError::MixedReactanceSigns(from, to));
        }
        let x = 1.0 / inv_x;
        if x <= 0.0 {
            return Err(DomainError::NonpositiveReactance { from, to, x });
        }
        merged.push(Line {
            from,
            to,
            reactance_pu: x,
            initial_capacity_mw: cap,
            length_mi: length,
        });
    }
    Ok(GridTopology { buses, generators, lines: merged, initial_storage_mw: BTreeMap::new() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bus(id: usize) -> Bus {
        Bus { id, latitude: 30.0, longitude: -97.0, county: None }
    }

    fn well_formed() -> GridTopology {
        GridTopology {
            buses: vec![bus(0), bus(1), bus(2)],
            generators: vec![Generator {
                bus: 0,
                tech: TechKind::NaturalGas,
                initial_capacity_mw: 100.0,
            }],
            lines: vec![
                Line { from: 0, to: 1, reactance_pu: 0.1, initial_capacity_mw: 100.0, length_mi: 10.0 },
                Line { from: 1, to: 2, reactance_pu: 0.1, initial_capacity_mw: 100.0, length_mi: 10.0 },
            ],
            initial_storage_mw: BTreeMap::new(),
        }
    }

    #[test]
    fn valid_fixture_yields_empty_report() {
        assert!(validate_topology(&well_formed()).is_valid());
    }

    #[test]
    fn unknown_bus_reported() {
        let mut t = well_formed();
        t.lines.push(Line { from: 0, to: 99, reactance_pu: 0.1, initial_capacity_mw: 1.0, length_mi: 1.0 });
        let r = validate_topology(&t);
        assert!(r.violations.iter().any(|v| v.contains("unknown bus 99")), "{:?}", r);
    }

    #[test]
    fn duplicate_generator_reported() {
        let mut t = well_formed();
        t.generators.push(Generator { bus: 0, tech: TechKind::NaturalGas, initial_capacity_mw: 1.0 });
        let r = validate_topology(&t);
        assert!(r.violations.iter().any(|v| v.contains("duplicate (bus,tech)")), "{:?}", r);
    }

    #[test]
    fn disconnected_bus_reported() {
        let mut t = well_formed();
        t.buses.push(bus(3));
        let r = validate_topology(&t);
        assert!(r.violations.iter().any(|v| v.contains("disconnected")), "{:?}", r);
    }

    #[test]
    fn aggregation_sums_generator_capacity() {
        let buses = vec![bus(0), bus(1), bus(2), bus(3)];
        let raw = vec![
            Generator { bus: 3, tech: TechKind::NaturalGas, initial_capacity_mw: 50.0 },
            Generator { bus: 3, tech: TechKind::NaturalGas, initial_capacity_mw: 50.0 },
        ];
        let t = aggregate_raw_grid(buses, &raw, &[]).unwrap();
        assert_eq!(t.generators.len(), 1);
        assert_eq!(t.generators[0].initial_capacity_mw, 100.0);
    }

    #[test]
    fn parallel_lines_merge_capacity_and_reactance() {
        let buses = vec![bus(0), bus(1)];
        let raw = vec![
            Line { from: 0, to: 1, reactance_pu: 0.1, initial_capacity_mw: 300.0, length_mi: 5.0 },
            Line { from: 1, to: 0, reactance_pu: 0.1, initial_capacity_mw: 200.0, length_mi: 5.0 },
        ];
        let t = aggregate_raw_grid(buses, &[], &raw).unwrap();
        assert_eq!(t.lines.len(), 1);
        assert!((t.lines[0].initial_capacity_mw - 500.0).abs() < 1e-12);
        // Parallel impedance oracle: 1/(1/0.1 + 1/0.1) = 0.05.
        assert!((t.lines[0].reactance_pu - 0.05).abs() < 1e-12);
    }

    #[test]
    fn single_line_unchanged() {
        let buses = vec![bus(0), bus(1)];
        let raw = vec![Line { from: 0, to: 1, reactance_pu: 0.2, initial_capacity_mw: 300.0, length_mi: 5.0 }];
        let t = aggregate_raw_grid(buses, &[], &raw).unwrap();
        assert!((t.lines[0].reactance_pu - 0.2).abs() < 1e-15);
        assert!((t.lines[0].initial_capacity_mw - 300.0).abs() < 1e-15);
    }

    #[test]
    fn aggregation_is_idempotent_and_conserves_mw() {
        let buses: Vec<Bus> = (0..4).map(bus).collect();
        let raw_g = vec![
            Generator { bus: 0, tech: TechKind::Solar, initial_capacity_mw: 10.0 },
            Generator { bus: 0, tech: TechKind::Solar, initial_capacity_mw: 15.0 },
            Generator { bus: 1, tech: TechKind::Wind, initial_capacity_mw: 7.5 },
        ];
        let raw_l = vec![
            Line { from: 0, to: 1, reactance_pu: 0.1, initial_capacity_mw: 100.0, length_mi: 2.0 },
            Line { from: 0, to: 1, reactance_pu: 0.3, initial_capacity_mw: 50.0, length_mi: 2.0 },
            Line { from: 2, to: 3, reactance_pu: 0.2, initial_capacity_mw: 80.0, length_mi: 4.0 },
        ];
        let once = aggregate_raw_grid(buses.clone(), &raw_g, &raw_l).unwrap();
        let twice = aggregate_raw_grid(buses, &once.generators, &once.lines).unwrap();
        assert_eq!(once.generators.len(), twice.generators.len());
        assert!(once.generators.len() <= raw_g.len());
        let total = |gs: &[Generator]| gs.iter().map(|g| g.initial_capacity_mw).sum::<f64>();
        assert_eq!(total(&once.generators), total(&raw_g));
        for (a, b) in once.lines.iter().zip(twice.lines.iter()) {
            assert!((a.reactance_pu - b.reactance_pu).abs() < 1e-15);
            assert!((a.initial_capacity_mw - b.initial_capacity_mw).abs() < 1e-12);
        }
    }

    #[test]
    fn mixed_reactance_signs_rejected() {
        let buses = vec![bus(0), bus(1)];
        let raw = vec![
            Line { from: 0, to: 1, reactance_pu: 0.1, initial_capacity_mw: 1.0, length_mi: 1.0 },
            Line { from: 0, to: 1, reactance_pu: -0.1, initial_capacity_mw: 1.0, length_mi: 1.0 },
        ];
        assert!(aggregate_raw_grid(buses, &[], &raw).is_err());
    }
}
