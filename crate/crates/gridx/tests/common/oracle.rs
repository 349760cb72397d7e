//! Brute-force LP oracle: enumerate candidate vertices by activating
//! every n-subset of constraint/bound hyperplanes, solve the square
//! system, keep feasible points, and return the best objective. Only
//! usable for tiny instances (n <= ~10).

use gridx::lp::{LpModel, Sense};

const FEAS_TOL: f64 = 1e-7;

struct Plane {
    coeffs: Vec<f64>,
    rhs: f64,
}

/// Minimum objective over all basic feasible points, with an argmin.
/// Returns None when no feasible vertex exists (infeasible, or the
/// optimum is unbounded / not at a vertex — don't feed it such models).
pub fn brute_force_min(model: &LpModel) -> Option<(f64, Vec<f64>)> {
    let n = model.n_cols();
    assert!(n <= 10, "oracle is exponential; {n} columns is too many");

    // Dense row matrix.
    let mut rows = vec![vec![0.0; n]; model.n_rows()];
    for &(r, c, v) in &model.triplets {
        rows[r][c] += v;
    }

    let mut planes: Vec<Plane> = Vec::new();
    for (i, row) in model.rows.iter().enumerate() {
        planes.push(Plane { coeffs: rows[i].clone(), rhs: row.rhs });
    }
    for (j, col) in model.columns.iter().enumerate() {
        let mut unit = vec![0.0; n];
        unit[j] = 1.0;
        if col.lower.is_finite() {
            planes.push(Plane { coeffs: unit.clone(), rhs: col.lower });
        }
        if col.upper.is_finite() && col.upper != col.lower {
            planes.push(Plane { coeffs: unit, rhs: col.upper });
        }
    }

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut pick = vec![0usize; n];
    enumerate(&planes, n, 0, 0, &mut pick, &mut |subset| {
        if let Some(x) = solve_square(&planes, subset, n) {
            if is_feasible(model, &rows, &x) {
                let obj = model.objective_value(&x);
                if best.as_ref().map_or(true, |(b, _)| obj < *b - 0.0) {
                    best = Some((obj, x));
                }
            }
        }
    });
    best
}

fn enumerate(
    planes: &[Plane],
    n: usize,
    start: usize,
    depth: usize,
    pick: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]),
) {
    if depth == n {
        f(pick);
        return;
    }
    for i in start..planes.len() {
        pick[depth] = i;
        enumerate(planes, n, i + 1, depth + 1, pick, f);
    }
}

/// Gaussian elimination with partial pivoting; None when singular.
fn solve_square(planes: &[Plane], subset: &[usize], n: usize) -> Option<Vec<f64>> {
    let mut a: Vec<Vec<f64>> = subset.iter().map(|&i| planes[i].coeffs.clone()).collect();
    let mut b: Vec<f64> = subset.iter().map(|&i| planes[i].rhs).collect();
    for k in 0..n {
        let (p, mag) = (k..n)
            .map(|r| (r, a[r][k].abs()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .unwrap();
        if mag < 1e-10 {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        for r in k + 1..n {
            let f = a[r][k] / a[k][k];
            if f == 0.0 {
                continue;
            }
            for c in k..n {
                a[r][c] -= f * a[k][c];
            }
            b[r] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let mut s = b[k];
        for c in k + 1..n {
            s -= a[k][c] * x[c];
        }
        x[k] = s / a[k][k];
    }
    Some(x)
}

fn is_feasible(model: &LpModel, rows: &[Vec<f64>], x: &[f64]) -> bool {
    for (j, col) in model.columns.iter().enumerate() {
        if x[j] < col.lower - FEAS_TOL * (1.0 + col.lower.abs()) {
            return false;
        }
        if x[j] > col.upper + FEAS_TOL * (1.0 + col.upper.abs()) {
            return false;
        }
    }
    for (i, row) in model.rows.iter().enumerate() {
        let act: f64 = rows[i].iter().zip(x).map(|(a, b)| a * b).sum();
        let tol = FEAS_TOL * (1.0 + row.rhs.abs());
        let ok = match row.sense {
            Sense::Le => act <= row.rhs + tol,
            Sense::Ge => act >= row.rhs - tol,
            Sense::Eq => (act - row.rhs).abs() <= tol,
        };
        if !ok {
            return false;
        }
    }
    true
}
