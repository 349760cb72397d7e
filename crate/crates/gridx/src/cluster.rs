//! Representative-day selection.
//!
//! The 365 days of hourly data are clustered with weighted k-means into a
//! handful of representative days; each cluster's weight is its member
//! count so annual totals survive (weights sum to 365). Features per day
//! concatenate, per bus: the z-normalized 24-hour load shape, the raw
//! solar capacity factors, and the raw wind capacity factors. CF blocks
//! stay un-normalized so calm/overcast days keep their distance from
//! windy/sunny ones.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::ingest::ProfileMatrix;

pub const DAYS_PER_YEAR: usize = 365;
pub const HOURS_PER_DAY: usize = 24;

/// Constant run-of-river hydro capacity factor.
pub const HYDRO_CF: f64 = 0.41;

#[derive(Debug, Error)]
pub enum ClusterError {
    #[error("k = {0} must be between 1 and 365")]
    BadK(usize),
    #[error("profile for bus {0} missing")]
    MissingProfile(usize),
    #[error("capacity-weighted CF requested with zero total capacity")]
    ZeroCapacity,
    #[error("profile shorter than {0} hours")]
    ShortProfile(usize),
}

/// Capacity-weighted average of per-bus hourly CF columns.
///
/// `capacity[k]` weights `profiles.values[k]`; buses with zero capacity
/// contribute nothing. Errors when the total capacity is zero.
pub fn compute_renewable_cf(
    profiles: &ProfileMatrix,
    capacity: &[f64],
) -> Result<Vec<f64>, ClusterError> {
    let total: f64 = capacity.iter().sum();
    if total <= 0.0 {
        return Err(ClusterError::ZeroCapacity);
    }
    let hours = profiles.values.first().map_or(0, |v| v.len());
    let mut out = vec![0.0; hours];
    for (col, &cap) in profiles.values.iter().zip(capacity) {
        for (h, &v) in col.iter().enumerate() {
            out[h] += cap * v;
        }
    }
    for v in &mut out {
        *v = (*v / total).clamp(0.0, 1.0);
    }
    Ok(out)
}

/// One representative day: weight in days plus hourly profiles restored
/// to physical units (load in MW per bus, CF dimensionless).
#[derive(Debug, Clone, Serialize)]
pub struct RepresentativeDay {
    /// Number of calendar days this cluster stands for.
    pub weight: f64,
    /// Calendar day index (0-based) of the medoid member.
    pub medoid_day: usize,
    /// Per-bus 24-hour load, MW; ordered like the input matrix.
    pub load: Vec<Vec<f64>>,
    /// Per-bus 24-hour solar CF.
    pub cf_solar: Vec<Vec<f64>>,
    /// Per-bus 24-hour wind CF.
    pub cf_wind: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterDiagnostics {
    pub inertia: f64,
    pub silhouette: f64,
    /// Cluster index per calendar day.
    pub labels: Vec<usize>,
    pub restarts_run: usize,
    pub best_restart: usize,
}

#[derive(Debug)]
pub struct ClusterResult {
    pub days: Vec<RepresentativeDay>,
    pub diagnostics: ClusterDiagnostics,
}

fn day_slice(col: &[f64], day: usize) -> &[f64] {
    &col[day * HOURS_PER_DAY..(day + 1) * HOURS_PER_DAY]
}

/// Build the feature matrix: one row per day.
fn build_features(
    load: &ProfileMatrix,
    cf_solar: &ProfileMatrix,
    cf_wind: &ProfileMatrix,
) -> Result<Vec<Vec<f64>>, ClusterError> {
    for m in [load, cf_solar, cf_wind] {
        for col in &m.values {
            if col.len() < DAYS_PER_YEAR * HOURS_PER_DAY {
                return Err(ClusterError::ShortProfile(DAYS_PER_YEAR * HOURS_PER_DAY));
            }
        }
    }
    // Per-bus annual mean/std of load for z-normalization.
    let stats: Vec<(f64, f64)> = load
        .values
        .iter()
        .map(|col| {
            let n = (DAYS_PER_YEAR * HOURS_PER_DAY) as f64;
            let mean = col[..DAYS_PER_YEAR * HOURS_PER_DAY].iter().sum::<f64>() / n;
            let var = col[..DAYS_PER_YEAR * HOURS_PER_DAY]
                .iter()
                .map(|&v| (v - mean) * (v - mean))
                .sum::<f64>()
                / n;
            (mean, var.sqrt().max(1e-9))
        })
        .collect();
    let mut feats = Vec::with_capacity(DAYS_PER_YEAR);
    for d in 0..DAYS_PER_YEAR {
        let mut row = Vec::new();
        for (k, col) in load.values.iter().enumerate() {
            let (mean, sd) = stats[k];
            row.extend(day_slice(col, d).iter().map(|&v| (v - mean) / sd));
        }
        for col in &cf_solar.values {
            row.extend_from_slice(day_slice(col, d));
        }
        for col in &cf_wind.values {
            row.extend_from_slice(day_slice(col, d));
        }
        feats.push(row);
    }
    Ok(feats)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

/// k-means++ seeding.
fn seed_centroids(feats: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = feats.len();
    let first = rng.gen_range(0..n);
    let mut centroids = vec![feats[first].clone()];
    let mut d2: Vec<f64> = feats.iter().map(|f| sq_dist(f, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total <= 0.0 {
            rng.gen_range(0..n)
        } else {
            let mut target = rng.gen::<f64>() * total;
            let mut idx = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    idx = i;
                    break;
                }
                target -= w;
            }
            idx
        };
        centroids.push(feats[pick].clone());
        for (i, f) in feats.iter().enumerate() {
            d2[i] = d2[i].min(sq_dist(f, centroids.last().unwrap()));
        }
    }
    centroids
}

/// One full k-means run; returns (labels, inertia).
fn kmeans_once(feats: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> (Vec<usize>, f64) {
    let n = feats.len();
    let dim = feats[0].len();
    let mut centroids = seed_centroids(feats, k, rng);
    let mut labels = vec![0usize; n];
    for _iter in 0..300 {
        let mut changed = false;
        for (i, f) in feats.iter().enumerate() {
            let mut best = (0usize, f64::INFINITY);
            for (c, cen) in centroids.iter().enumerate() {
                let d = sq_dist(f, cen);
                if d < best.1 {
                    best = (c, d);
                }
            }
            if labels[i] != best.0 {
                labels[i] = best.0;
                changed = true;
            }
        }
        // Rebuild centroids; reseed empty clusters to the farthest point.
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (i, f) in feats.iter().enumerate() {
            counts[labels[i]] += 1;
            for (s, &v) in sums[labels[i]].iter_mut().zip(f) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                let far = (0..n)
                    .max_by(|&a, &b| {
                        let da = sq_dist(&feats[a], &centroids[labels[a]]);
                        let db = sq_dist(&feats[b], &centroids[labels[b]]);
                        da.partial_cmp(&db).unwrap()
                    })
                    .unwrap();
                centroids[c] = feats[far].clone();
                labels[far] = c;
                changed = true;
            } else {
                for (j, s) in sums[c].iter().enumerate() {
                    centroids[c][j] = s / counts[c] as f64;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let inertia = feats
        .iter()
        .zip(&labels)
        .map(|(f, &l)| sq_dist(f, &centroids[l]))
        .sum();
    (labels, inertia)
}

/// Mean silhouette coefficient over all points (0 when k == 1).
fn silhouette(feats: &[Vec<f64>], labels: &[usize], k: usize) -> f64 {
    if k < 2 {
        return 0.0;
    }
    let n = feats.len();
    let mut counts = vec![0usize; k];
    for &l in labels {
        counts[l] += 1;
    }
    let mut total = 0.0;
    for i in 0..n {
        let mut sums = vec![0.0; k];
        for j in 0..n {
            if i != j {
                sums[labels[j]] += sq_dist(&feats[i], &feats[j]).sqrt();
            }
        }
        let own = labels[i];
        if counts[own] <= 1 {
            continue;
        }
        let a = sums[own] / (counts[own] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != own && counts[c] > 0)
            .map(|c| sums[c] / counts[c] as f64)
            .fold(f64::INFINITY, f64::min);
        total += (b - a) / a.max(b).max(1e-300);
    }
    total / n as f64
}

/// Cluster the 365 days into `k` representative days.
///
/// `profile` selects the reported hourly shapes: `"mean"` averages the
/// member days, `"medoid"` copies the member day nearest the centroid.
/// Across restarts, the lowest inertia wins; exact ties keep the earliest
/// restart, so results are reproducible for a given seed.
pub fn cluster_days(
    load: &ProfileMatrix,
    cf_solar: &ProfileMatrix,
    cf_wind: &ProfileMatrix,
    k: usize,
    seed: u64,
    restarts: usize,
    profile: &str,
) -> Result<ClusterResult, ClusterError> {
    if k == 0 || k > DAYS_PER_YEAR {
        return Err(ClusterError::BadK(k));
    }
    let feats = build_features(load, cf_solar, cf_wind)?;
    let restarts = restarts.max(1);
    let mut best: Option<(Vec<usize>, f64, usize)> = None;
    for r in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(r as u64));
        let (labels, inertia) = kmeans_once(&feats, k, &mut rng);
        if best.as_ref().map_or(true, |&(_, bi, _)| inertia < bi) {
            best = Some((labels, inertia, r));
        }
    }
    let (labels, inertia, best_restart) = best.unwrap();

    // Medoid of each cluster: member minimizing summed distance to members.
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (d, &l) in labels.iter().enumerate() {
        members[l].push(d);
    }
    let mut days = Vec::with_capacity(k);
    for c in 0..k {
        let mem = &members[c];
        debug_assert!(!mem.is_empty());
        let medoid = *mem
            .iter()
            .min_by(|&&a, &&b| {
                let da: f64 = mem.iter().map(|&m| sq_dist(&feats[a], &feats[m])).sum();
                let db: f64 = mem.iter().map(|&m| sq_dist(&feats[b], &feats[m])).sum();
                da.partial_cmp(&db).unwrap().then(a.cmp(&b))
            })
            .unwrap();
        let extract = |mat: &ProfileMatrix| -> Vec<Vec<f64>> {
            mat.values
                .iter()
                .map(|col| {
                    if profile == "medoid" {
                        day_slice(col, medoid).to_vec()
                    } else {
                        let mut avg = vec![0.0; HOURS_PER_DAY];
                        for &m in mem {
                            for (h, &v) in day_slice(col, m).iter().enumerate() {
                                avg[h] += v;
                            }
                        }
                        for v in &mut avg {
                            *v /= mem.len() as f64;
                        }
                        avg
                    }
                })
                .collect()
        };
        days.push(RepresentativeDay {
            weight: mem.len() as f64,
            medoid_day: medoid,
            load: extract(load),
            cf_solar: extract(cf_solar),
            cf_wind: extract(cf_wind),
        });
    }
    let sil = silhouette(&feats, &labels, k);
    Ok(ClusterResult {
        days,
        diagnostics: ClusterDiagnostics {
            inertia,
            silhouette: sil,
            labels,
            restarts_run: restarts,
            best_restart,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix_from_days(day_profiles: &[(usize, [f64; 24])], buses: usize) -> ProfileMatrix {
        // day_profiles: (repeat count, 24h shape); concatenated to 365 days.
        let mut col = Vec::with_capacity(8760);
        for &(n, shape) in day_profiles {
            for _ in 0..n {
                col.extend_from_slice(&shape);
            }
        }
        assert_eq!(col.len(), 8760);
        ProfileMatrix { bus_ids: (0..buses).collect(), values: vec![col; buses] }
    }

    fn flat_cf(v: f64) -> ProfileMatrix {
        ProfileMatrix { bus_ids: vec![0], values: vec![vec![v; 8760]] }
    }

    #[test]
    fn two_distinct_day_types_recovered_exactly() {
        let mut a = [10.0; 24];
        a[18] = 30.0;
        let b = [50.0; 24];
        let load = matrix_from_days(&[(200, a), (165, b)], 1);
        let res = cluster_days(&load, &flat_cf(0.2), &flat_cf(0.3), 2, 7, 3, "mean").unwrap();
        let mut weights: Vec<f64> = res.days.iter().map(|d| d.weight).collect();
        weights.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_eq!(weights, vec![165.0, 200.0]);
        // Mean profile of a pure cluster equals the member day exactly.
        for day in &res.days {
            if day.weight == 165.0 {
                assert!((day.load[0][0] - 50.0).abs() < 1e-9);
            } else {
                assert!((day.load[0][18] - 30.0).abs() < 1e-9);
            }
        }
        assert!(res.diagnostics.inertia < 1e-9);
        assert!(res.diagnostics.silhouette > 0.9);
    }

    #[test]
    fn weights_always_sum_to_365() {
        let mut shapes = Vec::new();
        for i in 0..5usize {
            let mut s = [20.0 + i as f64 * 7.0; 24];
            s[12] += i as f64 * 3.0;
            shapes.push((73usize, s));
        }
        let load = matrix_from_days(&shapes, 2);
        let res = cluster_days(&load, &flat_cf(0.25), &flat_cf(0.35), 3, 42, 5, "mean").unwrap();
        let total: f64 = res.days.iter().map(|d| d.weight).sum();
        assert!((total - 365.0).abs() < 1e-12);
    }

    #[test]
    fn annual_energy_conserved_within_two_percent() {
        // Smoothly varying seasonal load.
        let mut col = Vec::with_capacity(8760);
        for h in 0..8760usize {
            let day = (h / 24) as f64;
            let hour = (h % 24) as f64;
            col.push(
                100.0
                    + 30.0 * (2.0 * std::f64::consts::PI * day / 365.0).sin()
                    + 15.0 * (2.0 * std::f64::consts::PI * hour / 24.0).sin(),
            );
        }
        let load = ProfileMatrix { bus_ids: vec![0], values: vec![col.clone()] };
        let res = cluster_days(&load, &flat_cf(0.2), &flat_cf(0.3), 5, 1, 10, "mean").unwrap();
        let actual: f64 = col.iter().sum();
        let approx: f64 = res
            .days
            .iter()
            .map(|d| d.weight * d.load[0].iter().sum::<f64>())
            .sum();
        assert!(
            (approx - actual).abs() / actual < 0.02,
            "energy error {}",
            (approx - actual).abs() / actual
        );
    }

    #[test]
    fn same_seed_reproduces_labels() {
        let mut a = [10.0; 24];
        a[8] = 25.0;
        let b = [40.0; 24];
        let load = matrix_from_days(&[(100, a), (265, b)], 1);
        let r1 = cluster_days(&load, &flat_cf(0.2), &flat_cf(0.3), 2, 99, 4, "mean").unwrap();
        let r2 = cluster_days(&load, &flat_cf(0.2), &flat_cf(0.3), 2, 99, 4, "mean").unwrap();
        assert_eq!(r1.diagnostics.labels, r2.diagnostics.labels);
        assert_eq!(r1.diagnostics.best_restart, r2.diagnostics.best_restart);
    }

    #[test]
    fn medoid_profile_is_an_actual_day() {
        let mut a = [10.0; 24];
        a[6] = 18.0;
        let b = [33.0; 24];
        let load = matrix_from_days(&[(180, a), (185, b)], 1);
        let res = cluster_days(&load, &flat_cf(0.2), &flat_cf(0.3), 2, 5, 3, "medoid").unwrap();
        for day in &res.days {
            let is_a = day.load[0] == a.to_vec();
            let is_b = day.load[0] == b.to_vec();
            assert!(is_a || is_b);
        }
    }

    #[test]
    fn capacity_weighted_cf() {
        let m = ProfileMatrix {
            bus_ids: vec![0, 1],
            values: vec![vec![0.2; 4], vec![0.8; 4]],
        };
        let cf = compute_renewable_cf(&m, &[3.0, 1.0]).unwrap();
        assert!((cf[0] - 0.35).abs() < 1e-12);
        assert!(matches!(
            compute_renewable_cf(&m, &[0.0, 0.0]),
            Err(ClusterError::ZeroCapacity)
        ));
    }

    #[test]
    fn bad_k_rejected() {
        let load = matrix_from_days(&[(365, [1.0; 24])], 1);
        assert!(matches!(
            cluster_days(&load, &flat_cf(0.1), &flat_cf(0.1), 0, 0, 1, "mean"),
            Err(ClusterError::BadK(0))
        ));
        assert!(cluster_days(&load, &flat_cf(0.1), &flat_cf(0.1), 366, 0, 1, "mean").is_err());
    }
}
