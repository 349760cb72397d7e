//! Input parsing: one JSON scenario file for scalars and per-tech tables,
//! CSVs for the topology, hourly profile matrices, and region shares.
//!
//! File formats:
//! - `scenario.json`: `horizon`, `econ`, `storage`, `tech.<kind>`, `demand`,
//!   `clustering`, `solver`, `planner` (see the serde structs below).
//! - `buses.csv`: `id,lat,lon[,county]`
//! - `generators.csv`: `bus,tech,capacity_mw`
//! - `lines.csv`: `from,to,reactance_pu,capacity_mw[,length_mi]`
//! - `base_load.csv`, `cf_solar.csv`, `cf_wind.csv`: bus-id header row,
//!   8760 data rows.
//! - `psi_dc.csv`, `psi_em.csv`: `county,share`
//! - `county_centroids.csv`: `county,lat,lon`
//! - `bus_county.csv` (optional): `bus,county`

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::domain::{
    aggregate_raw_grid, Bus, ClusteringConfig, DemandScenario, EconParams, Generator,
    GridTopology, Line, PlannerConfig, ScenarioConfig, SolverConfig, StorageParams,
    TechCatalogEntry, TechKind, TechYearCosts,
};

pub const HOURS_PER_YEAR: usize = 8760;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("io error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error in {path}: {msg}")]
    Parse { path: String, msg: String },
    #[error("missing required key: {0}")]
    MissingKey(String),
    #[error("region weights sum {found:.6}, expected 1 in {what}")]
    BadWeightSum { what: String, found: f64 },
    #[error("capacity factor out of range: {0}")]
    CfOutOfRange(f64),
    #[error("expected {expected} values, got {got} in {path}")]
    WrongRowCount { path: String, expected: usize, got: usize },
    #[error("unknown bus id {0} in {1}")]
    UnknownBus(usize, String),
    #[error("unknown technology '{0}'")]
    UnknownTech(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("year lists inconsistent: {0}")]
    InconsistentYears(String),
    #[error("topology aggregation failed: {0}")]
    Domain(#[from] crate::domain::DomainError),
}

fn io_err(path: &Path, source: std::io::Error) -> IngestError {
    IngestError::Io { path: path.display().to_string(), source }
}

/// Hourly matrix keyed by bus id: one 8760-value column per bus.
#[derive(Debug, Clone, Default)]
pub struct ProfileMatrix {
    pub bus_ids: Vec<usize>,
    /// values[k][h] for bus_ids[k], h in 0..8760.
    pub values: Vec<Vec<f64>>,
}

impl ProfileMatrix {
    pub fn column(&self, bus: usize) -> Option<&[f64]> {
        self.bus_ids.iter().position(|&b| b == bus).map(|k| self.values[k].as_slice())
    }
}

// ---------------------------------------------------------------------------
// scenario.json
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct RawScenario {
    horizon: Vec<i32>,
    #[serde(default)]
    econ: RawEcon,
    #[serde(default)]
    storage: RawStorage,
    tech: BTreeMap<String, RawTech>,
    demand: RawDemand,
    #[serde(default)]
    clustering: ClusteringConfig,
    #[serde(default)]
    solver: SolverConfig,
    #[serde(default)]
    planner: PlannerConfig,
    #[serde(default = "default_trans_lead")]
    trans_lead_time_yr: u32,
}

fn default_trans_lead() -> u32 {
    3
}

#[derive(Deserialize, Default)]
#[serde(default)]
struct RawEcon {
    interest_rate: Option<f64>,
    base_year: Option<i32>,
    demand_curtail_cost: Option<f64>,
    gen_curtail_cost: Option<f64>,
    trans_capex_per_mw_mile: Option<f64>,
    s_base: Option<f64>,
    cap_gen_mw: Option<f64>,
    cap_trans_mw: Option<f64>,
    cap_stor_mw: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(default)]
struct RawStorage {
    /// $/kW by calendar year.
    capex: BTreeMap<String, f64>,
    /// $/kW-yr by calendar year.
    fom: BTreeMap<String, f64>,
    lead_time: Option<u32>,
    duration_hours: Option<f64>,
    eta_charge: Option<f64>,
    eta_discharge: Option<f64>,
}

#[derive(Deserialize, Default)]
struct RawTechYear {
    /// $/kW.
    #[serde(default)]
    capex: f64,
    /// $/kW-yr.
    #[serde(default)]
    fom: f64,
    /// $/MWh, thermal only.
    #[serde(default)]
    vom: f64,
    /// $/MMBtu, thermal only.
    #[serde(default)]
    fuel: f64,
    /// MMBtu/MWh, thermal only.
    #[serde(default)]
    heat_rate: f64,
}

#[derive(Deserialize)]
struct RawTech {
    lead_time: u32,
    #[serde(default)]
    f_min: f64,
    #[serde(default = "one")]
    f_max: f64,
    #[serde(default = "one")]
    ramp: f64,
    earliest_build_year: Option<i32>,
    /// Remaining keys are calendar years mapping to cost blocks.
    #[serde(flatten)]
    years: BTreeMap<String, RawTechYear>,
}

fn one() -> f64 {
    1.0
}

#[derive(Deserialize)]
struct RawDemand {
    /// TWh by calendar year.
    #[serde(rename = "E_base")]
    e_base: BTreeMap<String, f64>,
    /// GW by calendar year.
    #[serde(rename = "P_DC")]
    p_dc: BTreeMap<String, f64>,
    /// Defaults to 0.9.
    #[serde(rename = "LF_DC")]
    lf_dc: Option<f64>,
    /// GW.
    #[serde(rename = "Q_M", default)]
    q_m: f64,
    /// Fraction by calendar year.
    #[serde(default)]
    phi: BTreeMap<String, f64>,
    #[serde(default = "default_eta_elec")]
    eta_elec: f64,
    /// GW by calendar year.
    #[serde(rename = "P_base_peak")]
    p_base_peak: BTreeMap<String, f64>,
}

fn default_eta_elec() -> f64 {
    0.97
}

fn year_map(raw: &BTreeMap<String, f64>, what: &str) -> Result<BTreeMap<i32, f64>, IngestError> {
    raw.iter()
        .map(|(k, &v)| {
            k.parse::<i32>()
                .map(|y| (y, v))
                .map_err(|_| IngestError::InconsistentYears(format!("bad year key '{k}' in {what}")))
        })
        .collect()
}

/// Parse and validate the scenario file, applying documented defaults.
pub fn load_scenario(config_path: &Path) -> Result<ScenarioConfig, IngestError> {
    let text = std::fs::read_to_string(config_path).map_err(|e| io_err(config_path, e))?;
    let raw: RawScenario = serde_json::from_str(&text).map_err(|e| IngestError::Parse {
        path: config_path.display().to_string(),
        msg: e.to_string(),
    })?;
    if raw.horizon.is_empty() {
        return Err(IngestError::MissingKey("horizon".into()));
    }

    let e = raw.econ;
    let d = EconParams::default();
    let econ = EconParams {
        interest_rate: e.interest_rate.unwrap_or(d.interest_rate),
        base_year: e.base_year.unwrap_or(d.base_year),
        demand_curtail_cost: e.demand_curtail_cost.unwrap_or(d.demand_curtail_cost),
        gen_curtail_cost: e.gen_curtail_cost.unwrap_or(d.gen_curtail_cost),
        trans_capex_per_mw_mile: e.trans_capex_per_mw_mile.unwrap_or(d.trans_capex_per_mw_mile),
        s_base: e.s_base.unwrap_or(d.s_base),
        cap_gen_mw: e.cap_gen_mw.unwrap_or(d.cap_gen_mw),
        cap_trans_mw: e.cap_trans_mw.unwrap_or(d.cap_trans_mw),
        cap_stor_mw: e.cap_stor_mw.unwrap_or(d.cap_stor_mw),
    };

    let s = raw.storage;
    let ds = StorageParams::default();
    let storage = StorageParams {
        capex_per_mw: year_map(&s.capex, "storage.capex")?
            .into_iter()
            .map(|(y, v)| (y, v * 1000.0))
            .collect(),
        fom_per_mw_yr: year_map(&s.fom, "storage.fom")?
            .into_iter()
            .map(|(y, v)| (y, v * 1000.0))
            .collect(),
        lead_time_yr: s.lead_time.unwrap_or(ds.lead_time_yr),
        duration_hours: s.duration_hours.unwrap_or(ds.duration_hours),
        eta_charge: s.eta_charge.unwrap_or(ds.eta_charge),
        eta_discharge: s.eta_discharge.unwrap_or(ds.eta_discharge),
    };

    let mut tech = BTreeMap::new();
    for (name, rt) in &raw.tech {
        let kind = TechKind::parse(name).ok_or_else(|| IngestError::UnknownTech(name.clone()))?;
        let mut years = BTreeMap::new();
        for (ystr, yc) in &rt.years {
            let y: i32 = ystr.parse().map_err(|_| {
                IngestError::InconsistentYears(format!("bad year key '{ystr}' under tech.{name}"))
            })?;
            years.insert(
                y,
                TechYearCosts {
                    capex_per_mw: yc.capex * 1000.0,
                    fom_per_mw_yr: yc.fom * 1000.0,
                    vom_per_mwh: yc.vom,
                    fuel_per_mmbtu: yc.fuel,
                    heat_rate: yc.heat_rate,
                },
            );
        }
        for &y in &raw.horizon {
            if !years.contains_key(&y) {
                return Err(IngestError::InconsistentYears(format!(
                    "tech.{name} missing cost block for year {y}"
                )));
            }
        }
        tech.insert(
            kind,
            TechCatalogEntry {
                lead_time_yr: rt.lead_time,
                f_min: rt.f_min,
                f_max: rt.f_max,
                ramp: rt.ramp,
                earliest_build_year: rt.earliest_build_year.unwrap_or(raw.horizon[0]),
                years,
            },
        );
    }
    for (kind, entry) in &tech {
        if entry.f_min > entry.f_max {
            return Err(IngestError::InconsistentYears(format!(
                "tech.{}: f_min {} > f_max {}",
                kind.name(),
                entry.f_min,
                entry.f_max
            )));
        }
    }

    let rd = raw.demand;
    let demand = DemandScenario {
        e_base_twh: year_map(&rd.e_base, "demand.E_base")?,
        p_dc_gw: year_map(&rd.p_dc, "demand.P_DC")?,
        lf_dc: rd.lf_dc.unwrap_or(0.9),
        psi_dc: BTreeMap::new(),
        q_m_gw: rd.q_m,
        phi: year_map(&rd.phi, "demand.phi")?,
        eta_elec: rd.eta_elec,
        psi_em: BTreeMap::new(),
        p_base_peak_gw: year_map(&rd.p_base_peak, "demand.P_base_peak")?,
    };
    for &y in &raw.horizon {
        if !demand.e_base_twh.contains_key(&y) {
            return Err(IngestError::InconsistentYears(format!("demand.E_base missing year {y}")));
        }
    }
    if !(demand.lf_dc > 0.0 && demand.lf_dc <= 1.0) {
        return Err(IngestError::Parse {
            path: config_path.display().to_string(),
            msg: format!("LF_DC {} outside (0, 1]", demand.lf_dc),
        });
    }
    // phi must be non-decreasing over the horizon.
    let mut prev = f64::NEG_INFINITY;
    for &y in &raw.horizon {
        let p = demand.phi.get(&y).copied().unwrap_or(0.0);
        if p < prev - 1e-12 {
            return Err(IngestError::InconsistentYears(format!("phi decreases at year {y}")));
        }
        prev = p;
    }

    Ok(ScenarioConfig {
        horizon: raw.horizon,
        tech,
        storage,
        econ,
        demand,
        clustering: raw.clustering,
        solver: raw.solver,
        planner: raw.planner,
        trans_lead_time_yr: raw.trans_lead_time_yr,
    })
}

// ---------------------------------------------------------------------------
// CSVs
// ---------------------------------------------------------------------------

fn csv_reader(path: &Path) -> Result<csv::Reader<std::fs::File>, IngestError> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(false)
        .from_path(path)
        .map_err(|e| IngestError::Parse { path: path.display().to_string(), msg: e.to_string() })
}

pub fn load_buses(path: &Path) -> Result<Vec<Bus>, IngestError> {
    let mut rdr = csv_reader(path)?;
    let mut buses = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| IngestError::Parse {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        let id: usize = field(&rec, 0, path)?;
        let lat: f64 = field(&rec, 1, path)?;
        let lon: f64 = field(&rec, 2, path)?;
        let county = rec.get(3).filter(|s| !s.is_empty()).map(|s| s.to_string());
        buses.push(Bus { id, latitude: lat, longitude: lon, county });
    }
    Ok(buses)
}

pub fn load_generators(path: &Path) -> Result<Vec<Generator>, IngestError> {
    let mut rdr = csv_reader(path)?;
    let mut gens = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| IngestError::Parse {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        let bus: usize = field(&rec, 0, path)?;
        let tech_str = rec.get(1).unwrap_or("");
        let tech = TechKind::parse(tech_str)
            .ok_or_else(|| IngestError::UnknownTech(tech_str.to_string()))?;
        let cap: f64 = field(&rec, 2, path)?;
        gens.push(Generator { bus, tech, initial_capacity_mw: cap });
    }
    Ok(gens)
}

pub fn load_lines(path: &Path) -> Result<Vec<Line>, IngestError> {
    let mut rdr = csv_reader(path)?;
    let mut lines = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| IngestError::Parse {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        let from: usize = field(&rec, 0, path)?;
        let to: usize = field(&rec, 1, path)?;
        let x: f64 = field(&rec, 2, path)?;
        let cap: f64 = field(&rec, 3, path)?;
        let length: f64 = match rec.get(4).filter(|s| !s.is_empty()) {
            Some(s) => s.parse().map_err(|_| IngestError::Parse {
                path: path.display().to_string(),
                msg: format!("bad length '{s}'"),
            })?,
            None => 0.0,
        };
        lines.push(Line {
            from: from.min(to),
            to: from.max(to),
            reactance_pu: x,
            initial_capacity_mw: cap,
            length_mi: length,
        });
    }
    Ok(lines)
}

fn field<T: std::str::FromStr>(
    rec: &csv::StringRecord,
    idx: usize,
    path: &Path,
) -> Result<T, IngestError> {
    let s = rec.get(idx).ok_or_else(|| IngestError::Parse {
        path: path.display().to_string(),
        msg: format!("missing column {idx}"),
    })?;
    s.parse().map_err(|_| IngestError::Parse {
        path: path.display().to_string(),
        msg: format!("bad value '{s}' in column {idx}"),
    })
}

/// Load an hourly matrix: header row of bus ids, 8760 data rows.
/// When `is_cf` is set, values are validated against [0, 1.0001] and
/// clamped into [0, 1].
pub fn load_profile_matrix(path: &Path, is_cf: bool) -> Result<ProfileMatrix, IngestError> {
    let mut rdr = csv_reader(path)?;
    let headers = rdr
        .headers()
        .map_err(|e| IngestError::Parse { path: path.display().to_string(), msg: e.to_string() })?
        .clone();
    let bus_ids: Vec<usize> = headers
        .iter()
        .map(|h| {
            h.parse::<usize>().map_err(|_| IngestError::Parse {
                path: path.display().to_string(),
                msg: format!("header '{h}' is not a bus id"),
            })
        })
        .collect::<Result<_, _>>()?;
    let mut values = vec![Vec::with_capacity(HOURS_PER_YEAR); bus_ids.len()];
    let mut rows = 0usize;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| IngestError::Parse {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        if rec.len() != bus_ids.len() {
            return Err(IngestError::Parse {
                path: path.display().to_string(),
                msg: format!("row {} has {} fields, expected {}", rows + 1, rec.len(), bus_ids.len()),
            });
        }
        for (k, s) in rec.iter().enumerate() {
            let v: f64 = s.parse().map_err(|_| IngestError::Parse {
                path: path.display().to_string(),
                msg: format!("bad value '{s}'"),
            })?;
            if !v.is_finite() {
                return Err(IngestError::NonFinite(path.display().to_string()));
            }
            let v = if is_cf {
                if !(0.0..=1.0001).contains(&v) {
                    return Err(IngestError::CfOutOfRange(v));
                }
                v.min(1.0)
            } else {
                v
            };
            values[k].push(v);
        }
        rows += 1;
    }
    if rows != HOURS_PER_YEAR {
        return Err(IngestError::WrongRowCount {
            path: path.display().to_string(),
            expected: HOURS_PER_YEAR,
            got: rows,
        });
    }
    Ok(ProfileMatrix { bus_ids, values })
}

/// Load the region share file (`county,share`). The sum must be 1 within
/// 1e-9; regions absent from the file simply carry zero share.
pub fn load_psi(path: &Path) -> Result<BTreeMap<String, f64>, IngestError> {
    let mut rdr = csv_reader(path)?;
    let mut psi = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| IngestError::Parse {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        let county = rec.get(0).unwrap_or("").to_string();
        let share: f64 = field(&rec, 1, path)?;
        *psi.entry(county).or_insert(0.0) += share;
    }
    let total: f64 = psi.values().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(IngestError::BadWeightSum {
            what: path.display().to_string(),
            found: total,
        });
    }
    Ok(psi)
}

pub fn load_county_centroids(path: &Path) -> Result<BTreeMap<String, (f64, f64)>, IngestError> {
    let mut rdr = csv_reader(path)?;
    let mut out = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| IngestError::Parse {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        let county = rec.get(0).unwrap_or("").to_string();
        let lat: f64 = field(&rec, 1, path)?;
        let lon: f64 = field(&rec, 2, path)?;
        out.insert(county, (lat, lon));
    }
    Ok(out)
}

pub fn load_bus_county(path: &Path) -> Result<BTreeMap<usize, String>, IngestError> {
    let mut rdr = csv_reader(path)?;
    let mut out = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| IngestError::Parse {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        let bus: usize = field(&rec, 0, path)?;
        let county = rec.get(1).unwrap_or("").to_string();
        out.insert(bus, county);
    }
    Ok(out)
}

/// All grid input files loaded from one directory.
pub struct GridInputs {
    pub topology: GridTopology,
    pub base_load: ProfileMatrix,
    pub cf_solar: ProfileMatrix,
    pub cf_wind: ProfileMatrix,
    pub psi_dc: BTreeMap<String, f64>,
    pub psi_em: BTreeMap<String, f64>,
    pub county_centroids: BTreeMap<String, (f64, f64)>,
    pub bus_county: Option<BTreeMap<usize, String>>,
}

/// Load, aggregate, and cross-validate everything under `dir`.
pub fn load_grid_inputs(dir: &Path) -> Result<GridInputs, IngestError> {
    let buses = load_buses(&dir.join("buses.csv"))?;
    let generators = load_generators(&dir.join("generators.csv"))?;
    let lines = load_lines(&dir.join("lines.csv"))?;
    let topology = aggregate_raw_grid(buses, &generators, &lines)?;

    let base_load = load_profile_matrix(&dir.join("base_load.csv"), false)?;
    let cf_solar = load_profile_matrix(&dir.join("cf_solar.csv"), true)?;
    let cf_wind = load_profile_matrix(&dir.join("cf_wind.csv"), true)?;
    let known: std::collections::BTreeSet<usize> = topology.buses.iter().map(|b| b.id).collect();
    for (mat, name) in [(&base_load, "base_load.csv"), (&cf_solar, "cf_solar.csv"), (&cf_wind, "cf_wind.csv")] {
        for &b in &mat.bus_ids {
            if !known.contains(&b) {
                return Err(IngestError::UnknownBus(b, name.to_string()));
            }
        }
    }

    let psi_dc = load_psi(&dir.join("psi_dc.csv"))?;
    let psi_em = load_psi(&dir.join("psi_em.csv"))?;
    let county_centroids = load_county_centroids(&dir.join("county_centroids.csv"))?;
    let bus_county_path = dir.join("bus_county.csv");
    let bus_county =
        if bus_county_path.exists() { Some(load_bus_county(&bus_county_path)?) } else { None };

    Ok(GridInputs {
        topology,
        base_load,
        cf_solar,
        cf_wind,
        psi_dc,
        psi_em,
        county_centroids,
        bus_county,
    })
}
