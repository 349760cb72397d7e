//! Multi-period expansion LP generation.
//!
//! Variables, in column order: investment (c_gen, c_trans, c_stor),
//! accumulated capacity (C_gen, C_trans, C_stor), thermal dispatch p_gen,
//! generation curtailment p_curt_gen, demand curtailment p_curt_dem, line
//! flow p_trans, storage p_charge/p_disch/e, regional large loads
//! p_DC/p_EOR, and bus angles theta. Renewable dispatch is substituted
//! out: a renewable site's output is the capacity-factor expression
//! F·C_gen, which enters the balance rows directly; its curtailment
//! variable is capped by the same expression.
//!
//! Constraint families, in row order: investment caps, capacity
//! accumulation, peak adequacy, nodal balance, flow definition, regional
//! data-center and manufacturing satisfaction, thermal dispatch limits,
//! curtailment caps, intra- and inter-day ramping, line flow limits,
//! storage energy balance, day linking, energy capacity, and charge /
//! discharge power limits. Every row carries a (tag, coords) provenance
//! record for the `rows.jsonl` sidecar.
//!
//! Counting for a fixture with B buses, G generator sites (G_th thermal),
//! L lines, T years, D days, H=24 hours, and B_dc/B_em large-load buses:
//! columns = (G+L+B)·2T + G_th·TDH + G·TDH + B·TDH·4 + L·TDH
//!           + B·T·D·(H+1) + (B_dc+B_em)·TDH
//! rows    = (G+L+B)·2T + T + B·TDH + L·TDH·3 + (R_dc+R_em)·TDH/H... see
//! the structure test, which pins the closed form per family.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::cluster::{RepresentativeDay, HOURS_PER_DAY, HYDRO_CF};
use crate::demand::DemandCube;
use crate::domain::{GridTopology, Line, ScenarioConfig, TechClass, TechKind};
use crate::lp::{LpModel, Sense, INF};
use crate::spatial::haversine_miles;

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("horizon must be non-empty")]
    EmptyHorizon,
    #[error("no representative days")]
    NoDays,
    #[error("missing cost entry for {0} in year {1}")]
    MissingCost(&'static str, i32),
    #[error("technology {0} absent from catalog")]
    MissingTech(&'static str),
    #[error("no capacity-factor profile for bus {0} ({1})")]
    MissingCf(usize, &'static str),
    #[error("bus {0} missing from demand cube")]
    MissingBusLoad(usize),
    #[error("region '{0}' has no buses")]
    EmptyRegion(String),
    #[error("lp error: {0}")]
    Lp(#[from] crate::lp::LpError),
}

/// Row provenance: equation family tag plus human-readable coordinates.
#[derive(Debug, Clone, Serialize)]
pub struct RowMeta {
    pub tag: &'static str,
    pub coords: String,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PlanModelStats {
    pub n_vars: usize,
    pub n_constraints: usize,
    pub n_nonzeros: usize,
}

/// All model inputs, borrowed.
pub struct PlannerInputs<'a> {
    pub scenario: &'a ScenarioConfig,
    pub topology: &'a GridTopology,
    pub cube: &'a DemandCube,
    pub days: &'a [RepresentativeDay],
    /// Bus ids of the solar / wind CF columns in each representative day.
    pub solar_bus_ids: &'a [usize],
    pub wind_bus_ids: &'a [usize],
    /// Active region -> sorted member buses (shares already reallocated).
    pub dc_region_buses: &'a BTreeMap<String, Vec<usize>>,
    pub em_region_buses: &'a BTreeMap<String, Vec<usize>>,
}

/// Bijective map from (variable kind, coordinates) to LP column id.
///
/// Coordinates are dense indices into the sorted entity lists held here,
/// not raw bus ids; `t` is the horizon index, `d` the representative-day
/// index, `h` the hour 0..24 (or 0..=24 for storage energy).
pub struct VarIndex {
    pub buses: Vec<usize>,
    /// Generator sites, sorted by (bus, tech).
    pub sites: Vec<(usize, TechKind)>,
    /// Indices into `sites` that are thermal, ascending.
    pub thermal_sites: Vec<usize>,
    pub lines: Vec<Line>,
    /// Buses carrying p_DC columns, sorted.
    pub dc_buses: Vec<usize>,
    /// Buses carrying p_EOR columns, sorted.
    pub em_buses: Vec<usize>,
    pub n_years: usize,
    pub n_days: usize,
    // Column block offsets.
    off_c_gen: usize,
    off_c_trans: usize,
    off_c_stor: usize,
    off_cap_gen: usize,
    off_cap_trans: usize,
    off_cap_stor: usize,
    off_p_gen: usize,
    off_p_curt_gen: usize,
    off_p_curt_dem: usize,
    off_p_trans: usize,
    off_p_charge: usize,
    off_p_disch: usize,
    off_e: usize,
    off_p_dc: usize,
    off_p_eor: usize,
    off_theta: usize,
    pub n_cols: usize,
    /// site index -> dense thermal index, usize::MAX for renewables.
    thermal_pos: Vec<usize>,
    bus_pos: BTreeMap<usize, usize>,
    dc_bus_pos: BTreeMap<usize, usize>,
    em_bus_pos: BTreeMap<usize, usize>,
}

const H: usize = HOURS_PER_DAY;

impl VarIndex {
    fn new(inputs: &PlannerInputs) -> Self {
        let mut buses: Vec<usize> = inputs.topology.buses.iter().map(|b| b.id).collect();
        buses.sort_unstable();
        let mut sites: Vec<(usize, TechKind)> = inputs
            .topology
            .generators
            .iter()
            .map(|g| (g.bus, g.tech))
            .collect();
        sites.sort_unstable();
        let thermal_sites: Vec<usize> = sites
            .iter()
            .enumerate()
            .filter(|(_, (_, k))| k.class() == TechClass::Thermal)
            .map(|(i, _)| i)
            .collect();
        let mut thermal_pos = vec![usize::MAX; sites.len()];
        for (dense, &s) in thermal_sites.iter().enumerate() {
            thermal_pos[s] = dense;
        }
        let mut lines = inputs.topology.lines.clone();
        lines.sort_by(|a, b| (a.from, a.to).cmp(&(b.from, b.to)));
        let mut dc_buses: Vec<usize> =
            inputs.dc_region_buses.values().flatten().copied().collect();
        dc_buses.sort_unstable();
        dc_buses.dedup();
        let mut em_buses: Vec<usize> =
            inputs.em_region_buses.values().flatten().copied().collect();
        em_buses.sort_unstable();
        em_buses.dedup();

        let (nb, ng, nl) = (buses.len(), sites.len(), lines.len());
        let (nt, nd) = (inputs.scenario.n_years(), inputs.days.len());
        let tdh = nt * nd * H;
        let mut off = 0usize;
        let mut take = |len: usize| {
            let o = off;
            off += len;
            o
        };
        let off_c_gen = take(ng * nt);
        let off_c_trans = take(nl * nt);
        let off_c_stor = take(nb * nt);
        let off_cap_gen = take(ng * nt);
        let off_cap_trans = take(nl * nt);
        let off_cap_stor = take(nb * nt);
        let off_p_gen = take(thermal_sites.len() * tdh);
        let off_p_curt_gen = take(ng * tdh);
        let off_p_curt_dem = take(nb * tdh);
        let off_p_trans = take(nl * tdh);
        let off_p_charge = take(nb * tdh);
        let off_p_disch = take(nb * tdh);
        let off_e = take(nb * nt * nd * (H + 1));
        let off_p_dc = take(dc_buses.len() * tdh);
        let off_p_eor = take(em_buses.len() * tdh);
        let off_theta = take(nb * tdh);

        let bus_pos = buses.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        let dc_bus_pos = dc_buses.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        let em_bus_pos = em_buses.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        VarIndex {
            buses,
            sites,
            thermal_sites,
            lines,
            dc_buses,
            em_buses,
            n_years: nt,
            n_days: nd,
            off_c_gen,
            off_c_trans,
            off_c_stor,
            off_cap_gen,
            off_cap_trans,
            off_cap_stor,
            off_p_gen,
            off_p_curt_gen,
            off_p_curt_dem,
            off_p_trans,
            off_p_charge,
            off_p_disch,
            off_e,
            off_p_dc,
            off_p_eor,
            off_theta,
            n_cols: off,
            thermal_pos,
            bus_pos,
            dc_bus_pos,
            em_bus_pos,
        }
    }

    fn tdh(&self) -> usize {
        self.n_years * self.n_days * H
    }

    fn at(&self, t: usize, d: usize, h: usize) -> usize {
        debug_assert!(h < H);
        (t * self.n_days + d) * H + h
    }

    pub fn bus_index(&self, bus: usize) -> Option<usize> {
        self.bus_pos.get(&bus).copied()
    }

    pub fn c_gen(&self, g: usize, t: usize) -> usize {
        self.off_c_gen + g * self.n_years + t
    }
    pub fn c_trans(&self, l: usize, t: usize) -> usize {
        self.off_c_trans + l * self.n_years + t
    }
    pub fn c_stor(&self, n: usize, t: usize) -> usize {
        self.off_c_stor + n * self.n_years + t
    }
    pub fn cap_gen(&self, g: usize, t: usize) -> usize {
        self.off_cap_gen + g * self.n_years + t
    }
    pub fn cap_trans(&self, l: usize, t: usize) -> usize {
        self.off_cap_trans + l * self.n_years + t
    }
    pub fn cap_stor(&self, n: usize, t: usize) -> usize {
        self.off_cap_stor + n * self.n_years + t
    }
    /// Thermal dispatch; `g` is a site index that must be thermal.
    pub fn p_gen(&self, g: usize, t: usize, d: usize, h: usize) -> usize {
        let dense = self.thermal_pos[g];
        debug_assert!(dense != usize::MAX);
        self.off_p_gen + dense * self.tdh() + self.at(t, d, h)
    }
    pub fn p_curt_gen(&self, g: usize, t: usize, d: usize, h: usize) -> usize {
        self.off_p_curt_gen + g * self.tdh() + self.at(t, d, h)
    }
    pub fn p_curt_dem(&self, n: usize, t: usize, d: usize, h: usize) -> usize {
        self.off_p_curt_dem + n * self.tdh() + self.at(t, d, h)
    }
    pub fn p_trans(&self, l: usize, t: usize, d: usize, h: usize) -> usize {
        self.off_p_trans + l * self.tdh() + self.at(t, d, h)
    }
    pub fn p_charge(&self, n: usize, t: usize, d: usize, h: usize) -> usize {
        self.off_p_charge + n * self.tdh() + self.at(t, d, h)
    }
    pub fn p_disch(&self, n: usize, t: usize, d: usize, h: usize) -> usize {
        self.off_p_disch + n * self.tdh() + self.at(t, d, h)
    }
    /// Storage energy; `h` runs 0..=24, h=0 is the pre-day state.
    pub fn e_stor(&self, n: usize, t: usize, d: usize, h: usize) -> usize {
        debug_assert!(h <= H);
        self.off_e + ((n * self.n_years + t) * self.n_days + d) * (H + 1) + h
    }
    pub fn p_dc(&self, bus: usize, t: usize, d: usize, h: usize) -> usize {
        self.off_p_dc + self.dc_bus_pos[&bus] * self.tdh() + self.at(t, d, h)
    }
    pub fn p_eor(&self, bus: usize, t: usize, d: usize, h: usize) -> usize {
        self.off_p_eor + self.em_bus_pos[&bus] * self.tdh() + self.at(t, d, h)
    }
    pub fn theta(&self, n: usize, t: usize, d: usize, h: usize) -> usize {
        self.off_theta + n * self.tdh() + self.at(t, d, h)
    }

    /// Decode a column id into (variable kind, horizon index).
    pub fn col_kind_year(&self, col: usize) -> (VarKind, usize) {
        let nt = self.n_years;
        let tdh = self.tdh();
        let per_day = self.n_days * H;
        let blocks: [(usize, VarKind, usize); 16] = [
            (self.off_c_gen, VarKind::CGen, nt),
            (self.off_c_trans, VarKind::CTrans, nt),
            (self.off_c_stor, VarKind::CStor, nt),
            (self.off_cap_gen, VarKind::CapGen, nt),
            (self.off_cap_trans, VarKind::CapTrans, nt),
            (self.off_cap_stor, VarKind::CapStor, nt),
            (self.off_p_gen, VarKind::PGen, tdh),
            (self.off_p_curt_gen, VarKind::PCurtGen, tdh),
            (self.off_p_curt_dem, VarKind::PCurtDem, tdh),
            (self.off_p_trans, VarKind::PTrans, tdh),
            (self.off_p_charge, VarKind::PCharge, tdh),
            (self.off_p_disch, VarKind::PDisch, tdh),
            (self.off_e, VarKind::EStor, self.n_days * (H + 1) * nt),
            (self.off_p_dc, VarKind::PDc, tdh),
            (self.off_p_eor, VarKind::PEor, tdh),
            (self.off_theta, VarKind::Theta, tdh),
        ];
        for i in (0..blocks.len()).rev() {
            let (off, kind, stride) = blocks[i];
            if col >= off {
                let within = (col - off) % stride;
                let t = match kind {
                    VarKind::CGen
                    | VarKind::CTrans
                    | VarKind::CStor
                    | VarKind::CapGen
                    | VarKind::CapTrans
                    | VarKind::CapStor => within,
                    VarKind::EStor => within / (self.n_days * (H + 1)),
                    _ => within / per_day,
                };
                return (kind, t);
            }
        }
        unreachable!("column id out of range")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VarKind {
    CGen,
    CTrans,
    CStor,
    CapGen,
    CapTrans,
    CapStor,
    PGen,
    PCurtGen,
    PCurtDem,
    PTrans,
    PCharge,
    PDisch,
    EStor,
    PDc,
    PEor,
    Theta,
}

struct Builder<'a> {
    inputs: &'a PlannerInputs<'a>,
    vi: VarIndex,
    model: LpModel,
    metas: Vec<RowMeta>,
    /// cube bus-id -> cube column index.
    cube_pos: BTreeMap<usize, usize>,
    solar_pos: BTreeMap<usize, usize>,
    wind_pos: BTreeMap<usize, usize>,
}

impl<'a> Builder<'a> {
    fn new(inputs: &'a PlannerInputs<'a>) -> Result<Self, PlanError> {
        if inputs.scenario.horizon.is_empty() {
            return Err(PlanError::EmptyHorizon);
        }
        if inputs.days.is_empty() {
            return Err(PlanError::NoDays);
        }
        let vi = VarIndex::new(inputs);
        let cube_pos: BTreeMap<usize, usize> =
            inputs.cube.bus_ids.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        for &b in &vi.buses {
            if !cube_pos.contains_key(&b) {
                return Err(PlanError::MissingBusLoad(b));
            }
        }
        let solar_pos =
            inputs.solar_bus_ids.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        let wind_pos =
            inputs.wind_bus_ids.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        Ok(Builder {
            inputs,
            vi,
            model: LpModel::new(),
            metas: Vec::new(),
            cube_pos,
            solar_pos,
            wind_pos,
        })
    }

    fn year(&self, t: usize) -> i32 {
        self.inputs.scenario.horizon[t]
    }

    fn row(&mut self, name: String, sense: Sense, rhs: f64, tag: &'static str, coords: String) -> usize {
        self.metas.push(RowMeta { tag, coords });
        self.model.add_row(name, sense, rhs)
    }

    /// Capacity factor of a renewable site at (d, h).
    fn renewable_cf(&self, g: usize, d: usize, h: usize) -> Result<f64, PlanError> {
        let (bus, tech) = self.vi.sites[g];
        let day = &self.inputs.days[d];
        match tech {
            TechKind::Solar => {
                let &k = self.solar_pos.get(&bus).ok_or(PlanError::MissingCf(bus, "solar"))?;
                Ok(day.cf_solar[k][h])
            }
            TechKind::Wind => {
                let &k = self.wind_pos.get(&bus).ok_or(PlanError::MissingCf(bus, "wind"))?;
                Ok(day.cf_wind[k][h])
            }
            TechKind::Hydro => Ok(HYDRO_CF),
            _ => unreachable!("thermal site has no CF"),
        }
    }

    fn line_length(&self, l: usize) -> f64 {
        let line = &self.vi.lines[l];
        if line.length_mi > 0.0 {
            return line.length_mi;
        }
        let find = |id: usize| self.inputs.topology.buses.iter().find(|b| b.id == id);
        match (find(line.from), find(line.to)) {
            (Some(a), Some(b)) => {
                haversine_miles(a.latitude, a.longitude, b.latitude, b.longitude)
            }
            _ => 0.0,
        }
    }

    // -- columns ------------------------------------------------------------

    fn add_columns(&mut self) -> Result<(), PlanError> {
        let s = self.inputs.scenario;
        let (nt, nd) = (self.vi.n_years, self.vi.n_days);
        let last_year = *s.horizon.last().unwrap();
        // Investment variables. Bounds encode the build-year rules; the
        // caps themselves are rows so relaxing them is a row edit.
        for g in 0..self.vi.sites.len() {
            let (bus, tech) = self.vi.sites[g];
            let cat = s.tech.get(&tech).ok_or(PlanError::MissingTech(tech.name()))?;
            for t in 0..nt {
                let year = s.horizon[t];
                let blocked = year < cat.earliest_build_year
                    || (s.planner.forbid_stranded_investment
                        && year + cat.lead_time_yr as i32 > last_year);
                let up = if blocked { 0.0 } else { INF };
                self.model.add_col(format!("cg_{bus}_{}_{year}", tech.name()), 0.0, up, 0.0);
            }
        }
        for l in 0..self.vi.lines.len() {
            for t in 0..nt {
                let year = s.horizon[t];
                let blocked = s.planner.forbid_stranded_investment
                    && year + s.trans_lead_time_yr as i32 > last_year;
                let up = if blocked { 0.0 } else { INF };
                self.model.add_col(format!("ct_{l}_{year}"), 0.0, up, 0.0);
            }
        }
        for &bus in &self.vi.buses.clone() {
            for t in 0..nt {
                let year = s.horizon[t];
                let blocked = s.planner.forbid_stranded_investment
                    && year + s.storage.lead_time_yr as i32 > last_year;
                let up = if blocked { 0.0 } else { INF };
                self.model.add_col(format!("cs_{bus}_{year}"), 0.0, up, 0.0);
            }
        }
        // Accumulated capacities, free above zero; pinned by equalities.
        for g in 0..self.vi.sites.len() {
            let (bus, tech) = self.vi.sites[g];
            for t in 0..nt {
                self.model.add_col(
                    format!("Cg_{bus}_{}_{}", tech.name(), s.horizon[t]),
                    0.0,
                    INF,
                    0.0,
                );
            }
        }
        for l in 0..self.vi.lines.len() {
            for t in 0..nt {
                self.model.add_col(format!("Ct_{l}_{}", s.horizon[t]), 0.0, INF, 0.0);
            }
        }
        for &bus in &self.vi.buses.clone() {
            for t in 0..nt {
                self.model.add_col(format!("Cs_{bus}_{}", s.horizon[t]), 0.0, INF, 0.0);
            }
        }
        // Dispatch blocks.
        let tdh_cols = |prefix: &str, key: String, model: &mut LpModel| {
            for t in 0..nt {
                for d in 0..nd {
                    for h in 0..H {
                        model.add_col(format!("{prefix}_{key}_{t}_{d}_{h}"), 0.0, INF, 0.0);
                    }
                }
            }
        };
        let thermal = self.vi.thermal_sites.clone();
        for &g in &thermal {
            let (bus, tech) = self.vi.sites[g];
            tdh_cols("pg", format!("{bus}_{}", tech.name()), &mut self.model);
        }
        for g in 0..self.vi.sites.len() {
            let (bus, tech) = self.vi.sites[g];
            tdh_cols("pcg", format!("{bus}_{}", tech.name()), &mut self.model);
        }
        for &bus in &self.vi.buses.clone() {
            tdh_cols("pcd", bus.to_string(), &mut self.model);
        }
        for l in 0..self.vi.lines.len() {
            // Flow may be negative.
            for t in 0..nt {
                for d in 0..nd {
                    for h in 0..H {
                        self.model.add_col(format!("pt_{l}_{t}_{d}_{h}"), -INF, INF, 0.0);
                    }
                }
            }
        }
        for &bus in &self.vi.buses.clone() {
            tdh_cols("pch", bus.to_string(), &mut self.model);
        }
        for &bus in &self.vi.buses.clone() {
            tdh_cols("pdh", bus.to_string(), &mut self.model);
        }
        for &bus in &self.vi.buses.clone() {
            for t in 0..nt {
                for d in 0..nd {
                    for h in 0..=H {
                        self.model.add_col(format!("e_{bus}_{t}_{d}_{h}"), 0.0, INF, 0.0);
                    }
                }
            }
        }
        for &bus in &self.vi.dc_buses.clone() {
            tdh_cols("pdc", bus.to_string(), &mut self.model);
        }
        for &bus in &self.vi.em_buses.clone() {
            tdh_cols("peor", bus.to_string(), &mut self.model);
        }
        // Angles: [-pi, pi]; reference bus (lowest id) fixed at 0.
        use std::f64::consts::PI;
        let ref_bus = self.vi.buses[0];
        for &bus in &self.vi.buses.clone() {
            let (lo, up) = if bus == ref_bus { (0.0, 0.0) } else { (-PI, PI) };
            for t in 0..nt {
                for d in 0..nd {
                    for h in 0..H {
                        self.model.add_col(format!("th_{bus}_{t}_{d}_{h}"), lo, up, 0.0);
                    }
                }
            }
        }
        debug_assert_eq!(self.model.n_cols(), self.vi.n_cols);
        Ok(())
    }

    // -- rows ---------------------------------------------------------------

    fn add_investment_and_accumulation(&mut self) {
        let s = self.inputs.scenario;
        let nt = self.vi.n_years;
        let econ = &s.econ;
        // Caps (one row per investment variable).
        for g in 0..self.vi.sites.len() {
            let (bus, tech) = self.vi.sites[g];
            for t in 0..nt {
                let r = self.row(
                    format!("eq1g_{bus}_{}_{t}", tech.name()),
                    Sense::Le,
                    econ.cap_gen_mw,
                    "eq1",
                    format!("kind=gen,bus={bus},tech={},t={}", tech.name(), self.inputs.scenario.horizon[t]),
                );
                let c = self.vi.c_gen(g, t);
                self.model.add_coeff(r, c, 1.0);
            }
        }
        for l in 0..self.vi.lines.len() {
            for t in 0..nt {
                let r = self.row(
                    format!("eq1t_{l}_{t}"),
                    Sense::Le,
                    econ.cap_trans_mw,
                    "eq1",
                    format!("kind=trans,line={l},t={}", self.inputs.scenario.horizon[t]),
                );
                let c = self.vi.c_trans(l, t);
                self.model.add_coeff(r, c, 1.0);
            }
        }
        for (n, &bus) in self.vi.buses.clone().iter().enumerate() {
            for t in 0..nt {
                let r = self.row(
                    format!("eq1s_{bus}_{t}"),
                    Sense::Le,
                    econ.cap_stor_mw,
                    "eq1",
                    format!("kind=stor,bus={bus},t={}", self.inputs.scenario.horizon[t]),
                );
                let c = self.vi.c_stor(n, t);
                self.model.add_coeff(r, c, 1.0);
            }
        }
        // Accumulation: C_t - sum of completed investments = initial.
        let horizon = s.horizon.clone();
        for g in 0..self.vi.sites.len() {
            let (bus, tech) = self.vi.sites[g];
            let lead = s.tech[&tech].lead_time_yr as i32;
            let c0 = self
                .inputs
                .topology
                .generators
                .iter()
                .find(|gen| gen.bus == bus && gen.tech == tech)
                .map_or(0.0, |gen| gen.initial_capacity_mw);
            for t in 0..nt {
                let r = self.row(
                    format!("eq2g_{bus}_{}_{t}", tech.name()),
                    Sense::Eq,
                    c0,
                    "eq2",
                    format!("kind=gen,bus={bus},tech={},t={}", tech.name(), horizon[t]),
                );
                let cap = self.vi.cap_gen(g, t);
                self.model.add_coeff(r, cap, 1.0);
                for tau in 0..nt {
                    if horizon[t] - horizon[tau] >= lead {
                        let c = self.vi.c_gen(g, tau);
                        self.model.add_coeff(r, c, -1.0);
                    }
                }
            }
        }
        let trans_lead = s.trans_lead_time_yr as i32;
        for l in 0..self.vi.lines.len() {
            let c0 = self.vi.lines[l].initial_capacity_mw;
            for t in 0..nt {
                let r = self.row(
                    format!("eq2t_{l}_{t}"),
                    Sense::Eq,
                    c0,
                    "eq2",
                    format!("kind=trans,line={l},t={}", horizon[t]),
                );
                let cap = self.vi.cap_trans(l, t);
                self.model.add_coeff(r, cap, 1.0);
                for tau in 0..nt {
                    if horizon[t] - horizon[tau] >= trans_lead {
                        let c = self.vi.c_trans(l, tau);
                        self.model.add_coeff(r, c, -1.0);
                    }
                }
            }
        }
        let stor_lead = s.storage.lead_time_yr as i32;
        for (n, &bus) in self.vi.buses.clone().iter().enumerate() {
            let c0 = self.inputs.topology.initial_storage_mw.get(&bus).copied().unwrap_or(0.0);
            for t in 0..nt {
                let r = self.row(
                    format!("eq2s_{bus}_{t}"),
                    Sense::Eq,
                    c0,
                    "eq2",
                    format!("kind=stor,bus={bus},t={}", horizon[t]),
                );
                let cap = self.vi.cap_stor(n, t);
                self.model.add_coeff(r, cap, 1.0);
                for tau in 0..nt {
                    if horizon[t] - horizon[tau] >= stor_lead {
                        let c = self.vi.c_stor(n, tau);
                        self.model.add_coeff(r, c, -1.0);
                    }
                }
            }
        }
    }

    fn add_peak_adequacy(&mut self) {
        for t in 0..self.vi.n_years {
            let peak = self.inputs.cube.peak_mw[t];
            let r = self.row(
                format!("eq3_{t}"),
                Sense::Ge,
                peak,
                "eq3",
                format!("t={}", self.year(t)),
            );
            for g in 0..self.vi.sites.len() {
                let cap = self.vi.cap_gen(g, t);
                self.model.add_coeff(r, cap, 1.0);
            }
        }
    }

    fn add_power_balance(&mut self) -> Result<(), PlanError> {
        let (nt, nd) = (self.vi.n_years, self.vi.n_days);
        let buses = self.vi.buses.clone();
        // Sites / lines touching each bus, precomputed.
        let mut bus_sites: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (g, &(bus, _)) in self.vi.sites.iter().enumerate() {
            bus_sites.entry(bus).or_default().push(g);
        }
        let mut bus_lines: BTreeMap<usize, Vec<(usize, f64)>> = BTreeMap::new();
        for (l, line) in self.vi.lines.iter().enumerate() {
            // Positive flow leaves `from`, arrives at `to`.
            bus_lines.entry(line.from).or_default().push((l, -1.0));
            bus_lines.entry(line.to).or_default().push((l, 1.0));
        }
        for (n, &bus) in buses.iter().enumerate() {
            let cube_n = self.cube_pos[&bus];
            let site_list = bus_sites.get(&bus).cloned().unwrap_or_default();
            let line_list = bus_lines.get(&bus).cloned().unwrap_or_default();
            let has_dc = self.vi.dc_bus_pos.contains_key(&bus);
            let has_em = self.vi.em_bus_pos.contains_key(&bus);
            for t in 0..nt {
                for d in 0..nd {
                    for h in 0..H {
                        let base = self.inputs.cube.base_mw[t][cube_n][d][h];
                        let r = self.row(
                            format!("eq4_{bus}_{t}_{d}_{h}"),
                            Sense::Eq,
                            base,
                            "eq4",
                            format!("bus={bus},t={},d={d},h={h}", self.year(t)),
                        );
                        for &g in &site_list {
                            let (_, tech) = self.vi.sites[g];
                            if tech.class() == TechClass::Thermal {
                                let p = self.vi.p_gen(g, t, d, h);
                                self.model.add_coeff(r, p, 1.0);
                            } else {
                                // Renewable output is F·C, substituted in.
                                let cf = self.renewable_cf(g, d, h)?;
                                let cap = self.vi.cap_gen(g, t);
                                self.model.add_coeff(r, cap, cf);
                            }
                            let pc = self.vi.p_curt_gen(g, t, d, h);
                            self.model.add_coeff(r, pc, -1.0);
                        }
                        for &(l, sign) in &line_list {
                            let p = self.vi.p_trans(l, t, d, h);
                            self.model.add_coeff(r, p, sign);
                        }
                        let dis = self.vi.p_disch(n, t, d, h);
                        self.model.add_coeff(r, dis, 1.0);
                        let ch = self.vi.p_charge(n, t, d, h);
                        self.model.add_coeff(r, ch, -1.0);
                        let pcd = self.vi.p_curt_dem(n, t, d, h);
                        self.model.add_coeff(r, pcd, 1.0);
                        if has_dc {
                            let p = self.vi.p_dc(bus, t, d, h);
                            self.model.add_coeff(r, p, -1.0);
                        }
                        if has_em {
                            let p = self.vi.p_eor(bus, t, d, h);
                            self.model.add_coeff(r, p, -1.0);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn add_dcopf(&mut self) {
        let (nt, nd) = (self.vi.n_years, self.vi.n_days);
        let s_base = self.inputs.scenario.econ.s_base;
        for l in 0..self.vi.lines.len() {
            let line = self.vi.lines[l].clone();
            let b = s_base / line.reactance_pu;
            let n_from = self.vi.bus_pos[&line.from];
            let n_to = self.vi.bus_pos[&line.to];
            for t in 0..nt {
                for d in 0..nd {
                    for h in 0..H {
                        let r = self.row(
                            format!("eq5_{l}_{t}_{d}_{h}"),
                            Sense::Eq,
                            0.0,
                            "eq5",
                            format!("line={l},t={},d={d},h={h}", self.year(t)),
                        );
                        let p = self.vi.p_trans(l, t, d, h);
                        self.model.add_coeff(r, p, 1.0);
                        let th_f = self.vi.theta(n_from, t, d, h);
                        self.model.add_coeff(r, th_f, -b);
                        let th_t = self.vi.theta(n_to, t, d, h);
                        self.model.add_coeff(r, th_t, b);
                        // Flow limits.
                        let cap = self.vi.cap_trans(l, t);
                        let r_up = self.row(
                            format!("eq12u_{l}_{t}_{d}_{h}"),
                            Sense::Le,
                            0.0,
                            "eq12",
                            format!("line={l},t={},d={d},h={h},side=up", self.year(t)),
                        );
                        self.model.add_coeff(r_up, p, 1.0);
                        self.model.add_coeff(r_up, cap, -1.0);
                        let r_lo = self.row(
                            format!("eq12l_{l}_{t}_{d}_{h}"),
                            Sense::Ge,
                            0.0,
                            "eq12",
                            format!("line={l},t={},d={d},h={h},side=lo", self.year(t)),
                        );
                        self.model.add_coeff(r_lo, p, 1.0);
                        self.model.add_coeff(r_lo, cap, 1.0);
                    }
                }
            }
        }
    }

    fn add_regional_large_loads(&mut self) -> Result<(), PlanError> {
        let (nt, nd) = (self.vi.n_years, self.vi.n_days);
        let dc: Vec<(String, Vec<usize>)> = self
            .inputs
            .dc_region_buses
            .iter()
            .map(|(c, b)| (c.clone(), b.clone()))
            .collect();
        for (region, buses) in &dc {
            if buses.is_empty() {
                return Err(PlanError::EmptyRegion(region.clone()));
            }
            for t in 0..nt {
                let demand = self.inputs.cube.dc_mw[t].get(region).copied().unwrap_or(0.0);
                for d in 0..nd {
                    for h in 0..H {
                        let r = self.row(
                            format!("eq6_{region}_{t}_{d}_{h}"),
                            Sense::Eq,
                            demand,
                            "eq6",
                            format!("region={region},t={},d={d},h={h}", self.year(t)),
                        );
                        for &bus in buses {
                            let p = self.vi.p_dc(bus, t, d, h);
                            self.model.add_coeff(r, p, 1.0);
                        }
                    }
                }
            }
        }
        let em: Vec<(String, Vec<usize>)> = self
            .inputs
            .em_region_buses
            .iter()
            .map(|(c, b)| (c.clone(), b.clone()))
            .collect();
        for (region, buses) in &em {
            if buses.is_empty() {
                return Err(PlanError::EmptyRegion(region.clone()));
            }
            for t in 0..nt {
                let demand = self.inputs.cube.em_mw[t].get(region).copied().unwrap_or(0.0);
                for d in 0..nd {
                    for h in 0..H {
                        let r = self.row(
                            format!("eq7_{region}_{t}_{d}_{h}"),
                            Sense::Eq,
                            demand,
                            "eq7",
                            format!("region={region},t={},d={d},h={h}", self.year(t)),
                        );
                        for &bus in buses {
                            let p = self.vi.p_eor(bus, t, d, h);
                            self.model.add_coeff(r, p, 1.0);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn add_dispatch_limits(&mut self) -> Result<(), PlanError> {
        let (nt, nd) = (self.vi.n_years, self.vi.n_days);
        let s = self.inputs.scenario;
        for g in 0..self.vi.sites.len() {
            let (bus, tech) = self.vi.sites[g];
            let name = tech.name();
            if tech.class() == TechClass::Thermal {
                let (f_min, f_max) = {
                    let cat = &s.tech[&tech];
                    (cat.f_min, cat.f_max)
                };
                for t in 0..nt {
                    for d in 0..nd {
                        for h in 0..H {
                            let p = self.vi.p_gen(g, t, d, h);
                            let cap = self.vi.cap_gen(g, t);
                            let r_max = self.row(
                                format!("eq8u_{bus}_{name}_{t}_{d}_{h}"),
                                Sense::Le,
                                0.0,
                                "eq8",
                                format!("bus={bus},tech={name},t={},d={d},h={h},side=max", self.year(t)),
                            );
                            self.model.add_coeff(r_max, p, 1.0);
                            self.model.add_coeff(r_max, cap, -f_max);
                            let r_min = self.row(
                                format!("eq8l_{bus}_{name}_{t}_{d}_{h}"),
                                Sense::Ge,
                                0.0,
                                "eq8",
                                format!("bus={bus},tech={name},t={},d={d},h={h},side=min", self.year(t)),
                            );
                            self.model.add_coeff(r_min, p, 1.0);
                            self.model.add_coeff(r_min, cap, -f_min);
                            // Curtailment cannot exceed output.
                            let pc = self.vi.p_curt_gen(g, t, d, h);
                            let r_c = self.row(
                                format!("eq9t_{bus}_{name}_{t}_{d}_{h}"),
                                Sense::Le,
                                0.0,
                                "eq9",
                                format!("bus={bus},tech={name},t={},d={d},h={h}", self.year(t)),
                            );
                            self.model.add_coeff(r_c, pc, 1.0);
                            self.model.add_coeff(r_c, p, -1.0);
                        }
                    }
                }
            } else {
                for t in 0..nt {
                    for d in 0..nd {
                        for h in 0..H {
                            // Curtailment capped by the renewable output F·C.
                            let cf = self.renewable_cf(g, d, h)?;
                            let pc = self.vi.p_curt_gen(g, t, d, h);
                            let cap = self.vi.cap_gen(g, t);
                            let r = self.row(
                                format!("eq9r_{bus}_{name}_{t}_{d}_{h}"),
                                Sense::Le,
                                0.0,
                                "eq9",
                                format!("bus={bus},tech={name},t={},d={d},h={h}", self.year(t)),
                            );
                            self.model.add_coeff(r, pc, 1.0);
                            self.model.add_coeff(r, cap, -cf);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn add_ramping(&mut self) {
        let (nt, nd) = (self.vi.n_years, self.vi.n_days);
        let s = self.inputs.scenario;
        let thermal = self.vi.thermal_sites.clone();
        for &g in &thermal {
            let (bus, tech) = self.vi.sites[g];
            let name = tech.name();
            let ramp = s.tech[&tech].ramp;
            for t in 0..nt {
                for d in 0..nd {
                    for h in 1..H {
                        let p1 = self.vi.p_gen(g, t, d, h);
                        let p0 = self.vi.p_gen(g, t, d, h - 1);
                        let cap = self.vi.cap_gen(g, t);
                        let r_up = self.row(
                            format!("eq10u_{bus}_{name}_{t}_{d}_{h}"),
                            Sense::Le,
                            0.0,
                            "eq10",
                            format!("bus={bus},tech={name},t={},d={d},h={h},side=up", self.year(t)),
                        );
                        self.model.add_coeff(r_up, p1, 1.0);
                        self.model.add_coeff(r_up, p0, -1.0);
                        self.model.add_coeff(r_up, cap, -ramp);
                        let r_dn = self.row(
                            format!("eq10d_{bus}_{name}_{t}_{d}_{h}"),
                            Sense::Ge,
                            0.0,
                            "eq10",
                            format!("bus={bus},tech={name},t={},d={d},h={h},side=down", self.year(t)),
                        );
                        self.model.add_coeff(r_dn, p1, 1.0);
                        self.model.add_coeff(r_dn, p0, -1.0);
                        self.model.add_coeff(r_dn, cap, ramp);
                    }
                    // Link day d's first hour to day d-1's last hour.
                    if d >= 1 {
                        let p1 = self.vi.p_gen(g, t, d, 0);
                        let p0 = self.vi.p_gen(g, t, d - 1, H - 1);
                        let cap = self.vi.cap_gen(g, t);
                        let r_up = self.row(
                            format!("eq11u_{bus}_{name}_{t}_{d}"),
                            Sense::Le,
                            0.0,
                            "eq11",
                            format!("bus={bus},tech={name},t={},d={d},side=up", self.year(t)),
                        );
                        self.model.add_coeff(r_up, p1, 1.0);
                        self.model.add_coeff(r_up, p0, -1.0);
                        self.model.add_coeff(r_up, cap, -ramp);
                        let r_dn = self.row(
                            format!("eq11d_{bus}_{name}_{t}_{d}"),
                            Sense::Ge,
                            0.0,
                            "eq11",
                            format!("bus={bus},tech={name},t={},d={d},side=down", self.year(t)),
                        );
                        self.model.add_coeff(r_dn, p1, 1.0);
                        self.model.add_coeff(r_dn, p0, -1.0);
                        self.model.add_coeff(r_dn, cap, ramp);
                    }
                }
            }
        }
    }

    fn add_storage(&mut self) {
        let (nt, nd) = (self.vi.n_years, self.vi.n_days);
        let sp = self.inputs.scenario.storage.clone();
        let buses = self.vi.buses.clone();
        for (n, &bus) in buses.iter().enumerate() {
            for t in 0..nt {
                for d in 0..nd {
                    for h in 1..=H {
                        // Energy balance over hour h.
                        let r = self.row(
                            format!("eq13_{bus}_{t}_{d}_{h}"),
                            Sense::Eq,
                            0.0,
                            "eq13",
                            format!("bus={bus},t={},d={d},h={h}", self.year(t)),
                        );
                        let e1 = self.vi.e_stor(n, t, d, h);
                        self.model.add_coeff(r, e1, 1.0);
                        let e0 = self.vi.e_stor(n, t, d, h - 1);
                        self.model.add_coeff(r, e0, -1.0);
                        let ch = self.vi.p_charge(n, t, d, h - 1);
                        self.model.add_coeff(r, ch, -sp.eta_charge);
                        let dis = self.vi.p_disch(n, t, d, h - 1);
                        self.model.add_coeff(r, dis, 1.0 / sp.eta_discharge);
                    }
                    // Day linking: state carried over between clustered days.
                    if d >= 1 {
                        let r = self.row(
                            format!("eq14_{bus}_{t}_{d}"),
                            Sense::Eq,
                            0.0,
                            "eq14",
                            format!("bus={bus},t={},d={d}", self.year(t)),
                        );
                        let e_start = self.vi.e_stor(n, t, d, 0);
                        self.model.add_coeff(r, e_start, 1.0);
                        let e_prev = self.vi.e_stor(n, t, d - 1, H);
                        self.model.add_coeff(r, e_prev, -1.0);
                    }
                    for h in 0..=H {
                        // Energy capacity: e <= duration * power capacity.
                        let r = self.row(
                            format!("eq15_{bus}_{t}_{d}_{h}"),
                            Sense::Le,
                            0.0,
                            "eq15",
                            format!("bus={bus},t={},d={d},h={h}", self.year(t)),
                        );
                        let e = self.vi.e_stor(n, t, d, h);
                        self.model.add_coeff(r, e, 1.0);
                        let cap = self.vi.cap_stor(n, t);
                        self.model.add_coeff(r, cap, -sp.duration_hours);
                    }
                    for h in 0..H {
                        let cap = self.vi.cap_stor(n, t);
                        let r16 = self.row(
                            format!("eq16_{bus}_{t}_{d}_{h}"),
                            Sense::Le,
                            0.0,
                            "eq16",
                            format!("bus={bus},t={},d={d},h={h}", self.year(t)),
                        );
                        let ch = self.vi.p_charge(n, t, d, h);
                        self.model.add_coeff(r16, ch, 1.0);
                        self.model.add_coeff(r16, cap, -1.0);
                        let r17 = self.row(
                            format!("eq17_{bus}_{t}_{d}_{h}"),
                            Sense::Le,
                            0.0,
                            "eq17",
                            format!("bus={bus},t={},d={d},h={h}", self.year(t)),
                        );
                        let dis = self.vi.p_disch(n, t, d, h);
                        self.model.add_coeff(r17, dis, 1.0);
                        self.model.add_coeff(r17, cap, -1.0);
                    }
                }
            }
        }
    }

    fn build_objective(&mut self) -> Result<(), PlanError> {
        let s = self.inputs.scenario;
        let (nt, nd) = (self.vi.n_years, self.vi.n_days);
        let weights: Vec<f64> = self.inputs.days.iter().map(|d| d.weight).collect();
        for t in 0..nt {
            let year = s.horizon[t];
            let disc = s.discount_factor(year);
            for g in 0..self.vi.sites.len() {
                let (_, tech) = self.vi.sites[g];
                let costs = s.tech[&tech]
                    .years
                    .get(&year)
                    .ok_or(PlanError::MissingCost(tech.name(), year))?;
                let c = self.vi.c_gen(g, t);
                self.model.set_objective(c, disc * costs.capex_per_mw);
                let cap = self.vi.cap_gen(g, t);
                self.model.set_objective(cap, disc * costs.fom_per_mw_yr);
                if tech.class() == TechClass::Thermal {
                    let gamma = costs.variable_cost_per_mwh();
                    for d in 0..nd {
                        for h in 0..H {
                            let p = self.vi.p_gen(g, t, d, h);
                            self.model.set_objective(p, disc * weights[d] * gamma);
                        }
                    }
                }
                for d in 0..nd {
                    for h in 0..H {
                        let pc = self.vi.p_curt_gen(g, t, d, h);
                        self.model.set_objective(pc, disc * weights[d] * s.econ.gen_curtail_cost);
                    }
                }
            }
            for l in 0..self.vi.lines.len() {
                let len = self.line_length(l);
                let c = self.vi.c_trans(l, t);
                self.model
                    .set_objective(c, disc * s.econ.trans_capex_per_mw_mile * len);
            }
            let stor_capex = s.storage.capex_per_mw.get(&year).copied().unwrap_or(0.0);
            let stor_fom = s.storage.fom_per_mw_yr.get(&year).copied().unwrap_or(0.0);
            for n in 0..self.vi.buses.len() {
                let c = self.vi.c_stor(n, t);
                self.model.set_objective(c, disc * stor_capex);
                let cap = self.vi.cap_stor(n, t);
                self.model.set_objective(cap, disc * stor_fom);
                for d in 0..nd {
                    for h in 0..H {
                        let pcd = self.vi.p_curt_dem(n, t, d, h);
                        self.model
                            .set_objective(pcd, disc * weights[d] * s.econ.demand_curtail_cost);
                    }
                }
            }
        }
        Ok(())
    }
}

/// Build the complete planning LP.
pub fn build_model(
    inputs: &PlannerInputs,
) -> Result<(LpModel, VarIndex, Vec<RowMeta>, PlanModelStats), PlanError> {
    let mut b = Builder::new(inputs)?;
    b.add_columns()?;
    b.add_investment_and_accumulation();
    b.add_peak_adequacy();
    b.add_power_balance()?;
    b.add_dcopf();
    b.add_regional_large_loads()?;
    b.add_dispatch_limits()?;
    b.add_ramping();
    b.add_storage();
    b.build_objective()?;
    b.model.finalize()?;
    let stats = PlanModelStats {
        n_vars: b.model.n_cols(),
        n_constraints: b.model.n_rows(),
        n_nonzeros: b.model.n_nonzeros(),
    };
    Ok((b.model, b.vi, b.metas, stats))
}

/// Write the `rows.jsonl` provenance sidecar: one JSON object per row.
pub fn write_row_provenance<W: std::io::Write>(
    metas: &[RowMeta],
    model: &LpModel,
    w: &mut W,
) -> std::io::Result<()> {
    for (i, meta) in metas.iter().enumerate() {
        writeln!(
            w,
            "{}",
            serde_json::json!({
                "row": i,
                "name": model.rows[i].name,
                "tag": meta.tag,
                "coords": meta.coords,
            })
        )?;
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::domain::{Bus, Generator};
    use std::collections::BTreeMap;

    // A 1-bus fixture with one NG plant and one solar plant, T years, D days.
    pub(crate) fn tiny_inputs(nt: usize) -> (ScenarioConfig, GridTopology) {
        let horizon: Vec<i32> = (0..nt as i32).map(|i| 2025 + i).collect();
        let mut tech = BTreeMap::new();
        let mk_years = |capex: f64| -> BTreeMap<i32, crate::domain::TechYearCosts> {
            horizon
                .iter()
                .map(|&y| {
                    (
                        y,
                        crate::domain::TechYearCosts {
                            capex_per_mw: capex,
                            fom_per_mw_yr: 10_000.0,
                            vom_per_mwh: 2.0,
                            fuel_per_mmbtu: 3.0,
                            heat_rate: 7.0,
                        },
                    )
                })
                .collect()
        };
        tech.insert(
            TechKind::NaturalGas,
            crate::domain::TechCatalogEntry {
                lead_time_yr: 1,
                f_min: 0.0,
                f_max: 0.95,
                ramp: 1.0,
                earliest_build_year: horizon[0],
                years: mk_years(1_000_000.0),
            },
        );
        tech.insert(
            TechKind::Solar,
            crate::domain::TechCatalogEntry {
                lead_time_yr: 1,
                f_min: 0.0,
                f_max: 1.0,
                ramp: 1.0,
                earliest_build_year: horizon[0],
                years: mk_years(800_000.0),
            },
        );
        let scenario = ScenarioConfig {
            horizon: horizon.clone(),
            tech,
            storage: Default::default(),
            econ: Default::default(),
            demand: crate::domain::DemandScenario {
                e_base_twh: horizon.iter().map(|&y| (y, 1.0)).collect(),
                p_dc_gw: horizon.iter().map(|&y| (y, 0.0)).collect(),
                lf_dc: 0.9,
                psi_dc: BTreeMap::new(),
                q_m_gw: 0.0,
                phi: BTreeMap::new(),
                eta_elec: 0.97,
                psi_em: BTreeMap::new(),
                p_base_peak_gw: horizon.iter().map(|&y| (y, 0.05)).collect(),
            },
            clustering: Default::default(),
            solver: Default::default(),
            planner: Default::default(),
            trans_lead_time_yr: 3,
        };
        let topology = GridTopology {
            buses: vec![Bus { id: 0, latitude: 30.0, longitude: -97.0, county: None }],
            generators: vec![
                Generator { bus: 0, tech: TechKind::NaturalGas, initial_capacity_mw: 100.0 },
                Generator { bus: 0, tech: TechKind::Solar, initial_capacity_mw: 20.0 },
            ],
            lines: vec![],
            initial_storage_mw: BTreeMap::new(),
        };
        (scenario, topology)
    }

    pub(crate) fn tiny_days(nd: usize, load_mw: f64) -> Vec<RepresentativeDay> {
        (0..nd)
            .map(|i| RepresentativeDay {
                weight: 365.0 / nd as f64,
                medoid_day: i,
                load: vec![vec![load_mw; H]],
                cf_solar: vec![(0..H)
                    .map(|h| if (6..18).contains(&h) { 0.5 } else { 0.0 })
                    .collect()],
                cf_wind: vec![vec![0.3; H]],
            })
            .collect()
    }

    fn build_tiny(nt: usize, nd: usize) -> (LpModel, VarIndex, Vec<RowMeta>, PlanModelStats) {
        let (scenario, topology) = tiny_inputs(nt);
        let days = tiny_days(nd, 40.0);
        let cube = crate::demand::build_demand_cube(
            &scenario.horizon,
            &scenario.demand,
            &days,
            &[0],
            &BTreeMap::new(),
            &BTreeMap::new(),
        )
        .unwrap();
        let empty = BTreeMap::new();
        let inputs = PlannerInputs {
            scenario: &scenario,
            topology: &topology,
            cube: &cube,
            days: &days,
            solar_bus_ids: &[0],
            wind_bus_ids: &[0],
            dc_region_buses: &empty,
            em_region_buses: &empty,
        };
        build_model(&inputs).unwrap()
    }

    #[test]
    fn column_count_matches_closed_form() {
        let (nt, nd) = (2usize, 2usize);
        let (model, vi, _, stats) = build_tiny(nt, nd);
        // 1 bus, 2 sites (1 thermal), 0 lines.
        let tdh = nt * nd * H;
        let expect = 2 * nt * 2      // c_gen + C_gen
            + 1 * nt * 2             // c_stor + C_stor
            + 1 * tdh                // p_gen thermal
            + 2 * tdh                // p_curt_gen
            + 1 * tdh                // p_curt_dem
            + 2 * tdh                // charge + discharge
            + nt * nd * (H + 1)      // e
            + 1 * tdh; // theta
        assert_eq!(model.n_cols(), expect);
        assert_eq!(vi.n_cols, expect);
        assert_eq!(stats.n_vars, expect);
        assert_eq!(stats.n_constraints, model.n_rows());
    }

    #[test]
    fn accumulation_respects_lead_time() {
        let (model, vi, metas, _) = build_tiny(4, 1);
        // NG lead 1: investment in year index tau enters C at t >= tau+1.
        let g = vi
            .sites
            .iter()
            .position(|&(_, k)| k == TechKind::NaturalGas)
            .unwrap();
        let c_y0 = vi.c_gen(g, 0);
        for t in 0..4 {
            let row_name = format!("eq2g_0_natural_gas_{t}");
            let r = model.rows.iter().position(|row| row.name == row_name).unwrap();
            assert_eq!(metas[r].tag, "eq2");
            let has = model.triplets.iter().any(|&(rr, cc, v)| rr == r && cc == c_y0 && v == -1.0);
            assert_eq!(has, t >= 1, "t={t}");
            // Initial capacity on the rhs.
            assert_eq!(model.rows[r].rhs, 100.0);
        }
    }

    #[test]
    fn earliest_build_year_fixes_investment_to_zero() {
        let (mut scenario, topology) = tiny_inputs(4);
        scenario.tech.get_mut(&TechKind::Solar).unwrap().earliest_build_year = 2027;
        let days = tiny_days(1, 40.0);
        let cube = crate::demand::build_demand_cube(
            &scenario.horizon,
            &scenario.demand,
            &days,
            &[0],
            &BTreeMap::new(),
            &BTreeMap::new(),
        )
        .unwrap();
        let empty = BTreeMap::new();
        let inputs = PlannerInputs {
            scenario: &scenario,
            topology: &topology,
            cube: &cube,
            days: &days,
            solar_bus_ids: &[0],
            wind_bus_ids: &[0],
            dc_region_buses: &empty,
            em_region_buses: &empty,
        };
        let (model, vi, _, _) = build_model(&inputs).unwrap();
        let g = vi.sites.iter().position(|&(_, k)| k == TechKind::Solar).unwrap();
        for (t, &year) in scenario.horizon.iter().enumerate() {
            let col = &model.columns[vi.c_gen(g, t)];
            if year < 2027 {
                assert_eq!((col.lower, col.upper), (0.0, 0.0), "year {year}");
            } else {
                assert!(col.upper.is_infinite());
            }
        }
    }

    #[test]
    fn tiny_model_solves_feasible() {
        let (model, vi, _, _) = build_tiny(2, 1);
        let sol = crate::lp::solve(&model, &crate::lp::SolveOptions::default()).unwrap();
        assert_eq!(sol.status, crate::lp::SolveStatus::Optimal);
        assert!(model.max_residual(&sol.primal) < 1e-6);
        // 40 MW flat demand, 100 MW NG: no investment needed.
        for t in 0..2 {
            let g = vi.sites.iter().position(|&(_, k)| k == TechKind::NaturalGas).unwrap();
            assert!(sol.primal[vi.c_gen(g, t)] < 1e-6);
        }
        assert!(sol.objective > 0.0);
    }

    #[test]
    fn deterministic_mps_output() {
        let (m1, _, _, _) = build_tiny(2, 2);
        let (m2, _, _, _) = build_tiny(2, 2);
        let mut a = Vec::new();
        let mut b = Vec::new();
        crate::lp::write_mps(&m1, &mut a).unwrap();
        crate::lp::write_mps(&m2, &mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn provenance_covers_every_row() {
        let (model, _, metas, _) = build_tiny(2, 2);
        assert_eq!(metas.len(), model.n_rows());
        let mut out = Vec::new();
        write_row_provenance(&metas, &model, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), model.n_rows());
        let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(first["row"], 0);
        assert!(first["tag"].as_str().unwrap().starts_with("eq"));
    }

    #[test]
    fn empty_horizon_rejected() {
        let (mut scenario, topology) = tiny_inputs(1);
        scenario.horizon.clear();
        let days = tiny_days(1, 40.0);
        let cube = crate::demand::build_demand_cube(
            &[2025],
            &crate::planner::tests::tiny_inputs(1).0.demand,
            &days,
            &[0],
            &BTreeMap::new(),
            &BTreeMap::new(),
        )
        .unwrap();
        let empty = BTreeMap::new();
        let inputs = PlannerInputs {
            scenario: &scenario,
            topology: &topology,
            cube: &cube,
            days: &days,
            solar_bus_ids: &[0],
            wind_bus_ids: &[0],
            dc_region_buses: &empty,
            em_region_buses: &empty,
        };
        assert!(matches!(build_model(&inputs), Err(PlanError::EmptyHorizon)));
    }
}
