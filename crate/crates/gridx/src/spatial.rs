//! Geographic mapping of buses to load regions.
//!
//! Regions are counties carrying shares of the data-center and
//! manufacturing load. Each bus is assigned to at most one region: an
//! explicit `bus_county.csv` entry wins, otherwise the nearest county
//! centroid by great-circle distance. Regions that end up with a share
//! but no buses have their share moved to the nearest region that does
//! have buses.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::domain::Bus;

/// Mean Earth radius in statute miles.
const EARTH_RADIUS_MI: f64 = 3958.761;

#[derive(Debug, Error)]
pub enum SpatialError {
    #[error("bus {0} maps to unknown county '{1}'")]
    UnknownCounty(usize, String),
    #[error("no county centroids available")]
    NoCentroids,
    #[error("no region with assigned buses to absorb share of '{0}'")]
    NoHost(String),
}

/// Great-circle distance between two (lat, lon) points in degrees.
pub fn haversine_miles(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let (phi1, phi2) = (lat1.to_radians(), lat2.to_radians());
    let dphi = (lat2 - lat1).to_radians();
    let dlam = (lon2 - lon1).to_radians();
    let a = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlam / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_MI * a.sqrt().asin()
}

/// Bus-to-region assignment plus the per-region bus lists.
#[derive(Debug, Clone, Serialize)]
pub struct RegionMap {
    /// Bus id -> county name.
    pub bus_region: BTreeMap<usize, String>,
    /// County name -> bus ids (sorted), only counties with at least one bus.
    pub region_buses: BTreeMap<String, Vec<usize>>,
}

/// Assign every bus to a region. Explicit assignments take precedence;
/// remaining buses go to the nearest centroid. Distance ties break toward
/// the lexicographically smaller county name (BTreeMap iteration order).
pub fn assign_buses(
    buses: &[Bus],
    centroids: &BTreeMap<String, (f64, f64)>,
    explicit: Option<&BTreeMap<usize, String>>,
) -> Result<RegionMap, SpatialError> {
    if centroids.is_empty() {
        return Err(SpatialError::NoCentroids);
    }
    let mut bus_region = BTreeMap::new();
    for bus in buses {
        let county = match explicit.and_then(|m| m.get(&bus.id)) {
            Some(c) => {
                if !centroids.contains_key(c) {
                    return Err(SpatialError::UnknownCounty(bus.id, c.clone()));
                }
                c.clone()
            }
            None => {
                let mut best: Option<(&String, f64)> = None;
                for (name, &(lat, lon)) in centroids {
                    let d = haversine_miles(bus.latitude, bus.longitude, lat, lon);
                    if best.map_or(true, |(_, bd)| d < bd) {
                        best = Some((name, d));
                    }
                }
                best.unwrap().0.clone()
            }
        };
        bus_region.insert(bus.id, county);
    }
    let mut region_buses: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (&b, c) in &bus_region {
        region_buses.entry(c.clone()).or_default().push(b);
    }
    for v in region_buses.values_mut() {
        v.sort_unstable();
    }
    Ok(RegionMap { bus_region, region_buses })
}

/// One share move produced by [`reallocate_empty_regions`].
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Reallocation {
    pub from: String,
    pub to: String,
    pub share: f64,
    pub distance_mi: f64,
}

/// Move shares of bus-less regions to the nearest region that has buses
/// (single hop: the destination is always a populated region, never
/// another empty one). Ties on distance break toward the
/// lexicographically smaller destination name. Total share is conserved.
pub fn reallocate_empty_regions(
    psi: &BTreeMap<String, f64>,
    region_map: &RegionMap,
    centroids: &BTreeMap<String, (f64, f64)>,
) -> Result<(BTreeMap<String, f64>, Vec<Reallocation>), SpatialError> {
    let mut out: BTreeMap<String, f64> = BTreeMap::new();
    let mut moves = Vec::new();
    for (county, &share) in psi {
        if share == 0.0 {
            continue;
        }
        if region_map.region_buses.contains_key(county) {
            *out.entry(county.clone()).or_insert(0.0) += share;
            continue;
        }
        let &(lat, lon) = centroids
            .get(county)
            .ok_or_else(|| SpatialError::UnknownCounty(usize::MAX, county.clone()))?;
        let mut best: Option<(&String, f64)> = None;
        for name in region_map.region_buses.keys() {
            let &(hlat, hlon) = match centroids.get(name) {
                Some(c) => c,
                None => continue,
            };
            let d = haversine_miles(lat, lon, hlat, hlon);
            if best.map_or(true, |(_, bd)| d < bd - 1e-12) {
                best = Some((name, d));
            }
        }
        let (host, dist) = best.ok_or_else(|| SpatialError::NoHost(county.clone()))?;
        *out.entry(host.clone()).or_insert(0.0) += share;
        moves.push(Reallocation {
            from: county.clone(),
            to: host.clone(),
            share,
            distance_mi: dist,
        });
    }
    Ok((out, moves))
}
