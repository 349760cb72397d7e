//! Bounded-variable revised simplex with a dense basis inverse.
//!
//! The model is converted to computational standard form by appending one
//! slack column per row (Ax + s = b, slack bounds encode the row sense).
//! Phase 1 drives bound violations of the slack basis to zero with the
//! classic composite infeasibility costs; phase 2 uses Dantzig pricing
//! with a Bland's-rule fallback when degenerate steps accumulate. The
//! basis inverse is refactorized every 100 pivots.

use super::{LpError, LpModel, LpSolution, Sense, SolveStatus};

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub feas_tol: f64,
    pub opt_tol: f64,
    /// Defaults to 10 * (rows + cols) when None.
    pub max_iters: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { feas_tol: 1e-7, opt_tol: 1e-7, max_iters: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum VStat {
    Basic(usize),
    AtLower,
    AtUpper,
    Free,
}

const REFACTOR_EVERY: usize = 100;
const PIVOT_TOL: f64 = 1e-9;

struct Tableau {
    m: usize,
    n_struct: usize,
    nt: usize,
    lb: Vec<f64>,
    ub: Vec<f64>,
    cost: Vec<f64>,
    cols: Vec<Vec<(usize, f64)>>,
    b: Vec<f64>,
    basis: Vec<usize>,
    stat: Vec<VStat>,
    x: Vec<f64>,
    binv: Vec<f64>,
    feas_tol: f64,
    opt_tol: f64,
    pivots_since_refactor: usize,
}

impl Tableau {
    fn new(model: &LpModel, opts: &SolveOptions) -> Tableau {
        let m = model.n_rows();
        let n = model.n_cols();
        let nt = n + m;
        let mut lb = Vec::with_capacity(nt);
        let mut ub = Vec::with_capacity(nt);
        let mut cost = vec![0.0; nt];
        for (j, c) in model.columns.iter().enumerate() {
            lb.push(c.lower);
            ub.push(c.upper);
            cost[j] = c.objective;
        }
        let mut cols = model.columns_sparse();
        cols.reserve(m);
        let mut b = Vec::with_capacity(m);
        for (i, row) in model.rows.iter().enumerate() {
            let (l, u) = match row.sense {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
                Sense::Eq => (0.0, 0.0),
            };
            lb.push(l);
            ub.push(u);
            cols.push(vec![(i, 1.0)]);
            b.push(row.rhs);
        }
        let mut stat = Vec::with_capacity(nt);
        let mut x = vec![0.0; nt];
        for j in 0..n {
            if lb[j].is_finite() {
                stat.push(VStat::AtLower);
                x[j] = lb[j];
            } else if ub[j].is_finite() {
                stat.push(VStat::AtUpper);
                x[j] = ub[j];
            } else {
                stat.push(VStat::Free);
                x[j] = 0.0;
            }
        }
        let mut basis = Vec::with_capacity(m);
        for i in 0..m {
            stat.push(VStat::Basic(i));
            basis.push(n + i);
        }
        let mut t = Tableau {
            m,
            n_struct: n,
            nt,
            lb,
            ub,
            cost,
            cols,
            b,
            basis,
            stat,
            x,
            binv: identity(m),
            feas_tol: opts.feas_tol,
            opt_tol: opts.opt_tol,
            pivots_since_refactor: 0,
        };
        t.recompute_basic_values();
        t
    }

    fn recompute_basic_values(&mut self) {
        // xB = Binv * (b - N xN)
        let m = self.m;
        let mut rhs = self.b.clone();
        for j in 0..self.nt {
            if matches!(self.stat[j], VStat::Basic(_)) {
                continue;
            }
            let xj = self.x[j];
            if xj != 0.0 {
                for &(r, v) in &self.cols[j] {
                    rhs[r] -= v * xj;
                }
            }
        }
        for i in 0..m {
            let mut acc = 0.0;
            let row = &self.binv[i * m..(i + 1) * m];
            for k in 0..m {
                acc += row[k] * rhs[k];
            }
            self.x[self.basis[i]] = acc;
        }
    }

    fn refactorize(&mut self) -> Result<(), LpError> {
        let m = self.m;
        // Build B column-major dense, then Gauss-Jordan invert.
        let mut bmat = vec![0.0; m * m];
        for (pos, &j) in self.basis.iter().enumerate() {
            for &(r, v) in &self.cols[j] {
                bmat[r * m + pos] = v;
            }
        }
        let mut inv = identity(m);
        for col in 0..m {
            // partial pivot
            let mut piv = col;
            let mut best = bmat[col * m + col].abs();
            for r in (col + 1)..m {
                let a = bmat[r * m + col].abs();
                if a > best {
                    best = a;
                    piv = r;
                }
            }
            if best < 1e-12 {
                return Err(LpError::SingularBasis);
            }
            if piv != col {
                for k in 0..m {
                    bmat.swap(col * m + k, piv * m + k);
                    inv.swap(col * m + k, piv * m + k);
                }
            }
            let d = bmat[col * m + col];
            for k in 0..m {
                bmat[col * m + k] /= d;
                inv[col * m + k] /= d;
            }
            for r in 0..m {
                if r == col {
                    continue;
                }
                let f = bmat[r * m + col];
                if f != 0.0 {
                    for k in 0..m {
                        bmat[r * m + k] -= f * bmat[col * m + k];
                        inv[r * m + k] -= f * inv[col * m + k];
                    }
                }
            }
        }
        self.binv = inv;
        self.pivots_since_refactor = 0;
        self.recompute_basic_values();
        Ok(())
    }

    fn violation(&self, j: usize) -> f64 {
        let xj = self.x[j];
        if xj < self.lb[j] {
            self.lb[j] - xj
        } else if xj > self.ub[j] {
            xj - self.ub[j]
        } else {
            0.0
        }
    }

    fn total_infeasibility(&self) -> f64 {
        self.basis.iter().map(|&j| self.violation(j)).sum()
    }

    fn var_feas_tol(&self, j: usize) -> f64 {
        self.feas_tol * (1.0 + self.x[j].abs())
    }

    /// y = cB^T Binv for the given basic cost vector.
    fn duals_for(&self, cb: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for i in 0..m {
            let ci = cb[i];
            if ci != 0.0 {
                let row = &self.binv[i * m..(i + 1) * m];
                for k in 0..m {
                    y[k] += ci * row[k];
                }
            }
        }
        y
    }

    fn reduced_cost(&self, j: usize, y: &[f64], phase1: bool) -> f64 {
        let cj = if phase1 { 0.0 } else { self.cost[j] };
        let mut r = cj;
        for &(row, v) in &self.cols[j] {
            r -= y[row] * v;
        }
        r
    }

    fn direction(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let mut d = vec![0.0; m];
        for &(row, v) in &self.cols[j] {
            let vr = v;
            for i in 0..m {
                d[i] += self.binv[i * m + row] * vr;
            }
        }
        d
    }

    fn pivot_update_binv(&mut self, r: usize, d: &[f64]) {
        let m = self.m;
        let piv = d[r];
        let start = r * m;
        for k in 0..m {
            self.binv[start + k] /= piv;
        }
        for i in 0..m {
            if i == r {
                continue;
            }
            let f = d[i];
            if f != 0.0 {
                let ri = i * m;
                for k in 0..m {
                    self.binv[ri + k] -= f * self.binv[start + k];
                }
            }
        }
        self.pivots_since_refactor += 1;
    }
}

fn identity(m: usize) -> Vec<f64> {
    let mut v = vec![0.0; m * m];
    for i in 0..m {
        v[i * m + i] = 1.0;
    }
    v
}

pub fn solve(model: &LpModel, opts: &SolveOptions) -> Result<LpSolution, LpError> {
    if !model.is_finalized() {
        return Err(LpError::NotFinalized);
    }
    let m = model.n_rows();
    let n = model.n_cols();
    if m == 0 {
        // No rows: every variable sits at its cheapest bound.
        let mut x = vec![0.0; n];
        for (j, c) in model.columns.iter().enumerate() {
            x[j] = if c.objective > 0.0 {
                c.lower
            } else if c.objective < 0.0 {
                c.upper
            } else if c.lower.is_finite() {
                c.lower
            } else if c.upper.is_finite() {
                c.upper
            } else {
                0.0
            };
            if !x[j].is_finite() {
                return Ok(LpSolution {
                    status: SolveStatus::Unbounded,
                    objective: f64::NEG_INFINITY,
                    primal: vec![0.0; n],
                    duals: None,
                    iterations: 0,
                });
            }
        }
        let obj = model.objective_value(&x);
        return Ok(LpSolution {
            status: SolveStatus::Optimal,
            objective: obj,
            primal: x,
            duals: Some(Vec::new()),
            iterations: 0,
        });
    }

    let mut t = Tableau::new(model, opts);
    let max_iters = opts.max_iters.unwrap_or(10 * (m + n + m)).max(100);
    let mut iterations = 0usize;
    let mut degen_streak = 0usize;
    let degen_limit = 40 + m;
    let mut use_bland = false;

    loop {
        if iterations >= max_iters {
            return Ok(finish(model, &t, SolveStatus::IterationLimit, iterations));
        }
        iterations += 1;
        if t.pivots_since_refactor >= REFACTOR_EVERY {
            t.refactorize()?;
        }

        let infeas = t.total_infeasibility();
        let phase1 = infeas > t.feas_tol * (1.0 + l1(&t.b));

        // Basic costs for pricing: violation signs in phase 1, true costs in phase 2.
        let cb: Vec<f64> = t
            .basis
            .iter()
            .map(|&j| {
                if phase1 {
                    if t.x[j] > t.ub[j] + t.var_feas_tol(j) {
                        1.0
                    } else if t.x[j] < t.lb[j] - t.var_feas_tol(j) {
                        -1.0
                    } else {
                        0.0
                    }
                } else {
                    t.cost[j]
                }
            })
            .collect();
        let y = t.duals_for(&cb);

        // Entering selection.
        let mut entering: Option<(usize, f64, i8)> = None; // (var, reduced cost, sigma)
        for j in 0..t.nt {
            let (can_up, can_down) = match t.stat[j] {
                VStat::Basic(_) => continue,
                VStat::AtLower => (t.ub[j] > t.lb[j], false),
                VStat::AtUpper => (false, t.ub[j] > t.lb[j]),
                VStat::Free => (true, true),
            };
            if !can_up && !can_down {
                continue;
            }
            let r = t.reduced_cost(j, &y, phase1);
            let (eligible, sigma) = if can_up && r < -t.opt_tol {
                (true, 1i8)
            } else if can_down && r > t.opt_tol {
                (true, -1i8)
            } else {
                (false, 0)
            };
            if !eligible {
                continue;
            }
            if use_bland {
                entering = Some((j, r, sigma));
                break;
            }
            match entering {
                Some((_, rb, _)) if r.abs() <= rb.abs() => {}
                _ => entering = Some((j, r, sigma)),
            }
        }

        let (j_in, _r_in, sigma) = match entering {
            Some(e) => e,
            None => {
                if phase1 {
                    return Ok(finish(model, &t, SolveStatus::Infeasible, iterations));
                }
                return Ok(finish(model, &t, SolveStatus::Optimal, iterations));
            }
        };
        let sigma = sigma as f64;

        let d = t.direction(j_in);

        // Own-range limit of the entering variable.
        let own_range = if t.lb[j_in].is_finite() && t.ub[j_in].is_finite() {
            t.ub[j_in] - t.lb[j_in]
        } else {
            f64::INFINITY
        };

        // Ratio test.
        let mut t_best = own_range;
        let mut leaving: Option<(usize, f64, bool)> = None; // (basis pos, |pivot|, leaves at upper)
        for i in 0..t.m {
            let g = -sigma * d[i];
            if g.abs() <= PIVOT_TOL {
                continue;
            }
            let jb = t.basis[i];
            let xi = t.x[jb];
            let tol = t.var_feas_tol(jb);
            // A variable already violating a bound in the direction it is
            // moving never blocks; it only grows more infeasible (phase 1
            // prices that into the composite costs).
            let (target, at_upper) = if g > 0.0 {
                if xi < t.lb[jb] - tol {
                    (t.lb[jb], false)
                } else if xi > t.ub[jb] + tol {
                    continue;
                } else {
                    (t.ub[jb], true)
                }
            } else if xi > t.ub[jb] + tol {
                (t.ub[jb], true)
            } else if xi < t.lb[jb] - tol {
                continue;
            } else {
                (t.lb[jb], false)
            };
            if !target.is_finite() {
                continue;
            }
            let ratio = ((target - xi) / g).max(0.0);
            if ratio < t_best - 1e-12 {
                t_best = ratio;
                leaving = Some((i, d[i].abs(), at_upper));
            } else if ratio <= t_best + 1e-12 {
                // Tie: prefer the larger pivot magnitude for stability.
                let replace = match leaving {
                    Some((_, piv, _)) => d[i].abs() > piv,
                    None => true,
                };
                if replace {
                    t_best = t_best.min(ratio);
                    leaving = Some((i, d[i].abs(), at_upper));
                }
            }
        }

        if t_best.is_infinite() {
            if phase1 {
                // Cannot happen with a correct pricing step; treat as numeric failure.
                return Err(LpError::SingularBasis);
            }
            return Ok(finish(model, &t, SolveStatus::Unbounded, iterations));
        }

        if t_best <= PIVOT_TOL {
            degen_streak += 1;
            if degen_streak > degen_limit {
                use_bland = true;
            }
        } else {
            degen_streak = 0;
            use_bland = false;
        }

        // Apply the step.
        let step = sigma * t_best;
        for i in 0..t.m {
            if d[i] != 0.0 {
                let jb = t.basis[i];
                t.x[jb] -= step * d[i];
            }
        }
        t.x[j_in] += step;

        match leaving {
            None => {
                // Bound flip of the entering variable.
                t.stat[j_in] = match t.stat[j_in] {
                    VStat::AtLower => VStat::AtUpper,
                    VStat::AtUpper => VStat::AtLower,
                    s => s,
                };
                // Snap to the exact bound.
                t.x[j_in] = match t.stat[j_in] {
                    VStat::AtLower => t.lb[j_in],
                    VStat::AtUpper => t.ub[j_in],
                    _ => t.x[j_in],
                };
            }
            Some((pos, _, at_upper)) => {
                let j_out = t.basis[pos];
                t.x[j_out] = if at_upper { t.ub[j_out] } else { t.lb[j_out] };
                t.stat[j_out] = if at_upper { VStat::AtUpper } else { VStat::AtLower };
                t.basis[pos] = j_in;
                t.stat[j_in] = VStat::Basic(pos);
                t.pivot_update_binv(pos, &d);
            }
        }
    }
}

fn l1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

fn finish(model: &LpModel, t: &Tableau, status: SolveStatus, iterations: usize) -> LpSolution {
    let n = t.n_struct;
    let mut primal: Vec<f64> = t.x[..n].to_vec();
    if status == SolveStatus::Optimal {
        // Snap tiny bound violations introduced by floating point.
        for (j, x) in primal.iter_mut().enumerate() {
            let (l, u) = (model.columns[j].lower, model.columns[j].upper);
            if *x < l {
                *x = l;
            }
            if *x > u {
                *x = u;
            }
            if x.abs() < 1e-11 {
                *x = 0.0;
            }
        }
    }
    let objective = model.objective_value(&primal);
    let duals = if status == SolveStatus::Optimal {
        let cb: Vec<f64> = t.basis.iter().map(|&j| t.cost[j]).collect();
        Some(t.duals_for(&cb))
    } else {
        None
    };
    LpSolution { status, objective, primal, duals, iterations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{LpModel, Sense, INF};

    fn solve_model(m: &mut LpModel) -> LpSolution {
        m.finalize().unwrap();
        solve(m, &SolveOptions::default()).unwrap()
    }

    #[test]
    fn maximize_single_bounded_variable() {
        // min -x s.t. x <= 1  ->  x = 1, obj -1
        let mut m = LpModel::new();
        m.add_col("x", 0.0, INF, -1.0);
        let c = m.columns.len() - 1;
        let r = m.add_row("r", Sense::Le, 1.0);
        m.add_coeff(r, c, 1.0);
        let s = solve_model(&mut m);
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.objective + 1.0).abs() < 1e-9);
        assert!((s.primal[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_optimal_face() {
        // min x + y s.t. x + y >= 2, x,y >= 0 -> obj 2
        let mut m = LpModel::new();
        let x = m.add_col("x", 0.0, INF, 1.0);
        let y = m.add_col("y", 0.0, INF, 1.0);
        let r = m.add_row("r", Sense::Ge, 2.0);
        m.add_coeff(r, x, 1.0);
        m.add_coeff(r, y, 1.0);
        let s = solve_model(&mut m);
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.objective - 2.0).abs() < 1e-9);
        assert!((s.primal[0] + s.primal[1] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_detected() {
        // x <= 1 and x >= 2
        let mut m = LpModel::new();
        let x = m.add_col("x", 0.0, INF, 1.0);
        let r1 = m.add_row("r1", Sense::Le, 1.0);
        let r2 = m.add_row("r2", Sense::Ge, 2.0);
        m.add_coeff(r1, x, 1.0);
        m.add_coeff(r2, x, 1.0);
        let s = solve_model(&mut m);
        assert_eq!(s.status, SolveStatus::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        let mut m = LpModel::new();
        let x = m.add_col("x", 0.0, INF, -1.0);
        let r = m.add_row("r", Sense::Ge, 0.0);
        m.add_coeff(r, x, 1.0);
        let s = solve_model(&mut m);
        assert_eq!(s.status, SolveStatus::Unbounded);
    }

    #[test]
    fn equality_rows_and_free_variables() {
        // min x + 2y s.t. x + y = 3, x - y = 1, x free, y free -> x=2, y=1
        let mut m = LpModel::new();
        let x = m.add_col("x", -INF, INF, 1.0);
        let y = m.add_col("y", -INF, INF, 2.0);
        let r1 = m.add_row("r1", Sense::Eq, 3.0);
        let r2 = m.add_row("r2", Sense::Eq, 1.0);
        m.add_coeff(r1, x, 1.0);
        m.add_coeff(r1, y, 1.0);
        m.add_coeff(r2, x, 1.0);
        m.add_coeff(r2, y, -1.0);
        let s = solve_model(&mut m);
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.primal[0] - 2.0).abs() < 1e-8, "{:?}", s.primal);
        assert!((s.primal[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn negative_bounds_handled() {
        // min x s.t. x >= -5, -10 <= x <= 10 -> x = -5
        let mut m = LpModel::new();
        let x = m.add_col("x", -10.0, 10.0, 1.0);
        let r = m.add_row("r", Sense::Ge, -5.0);
        m.add_coeff(r, x, 1.0);
        let s = solve_model(&mut m);
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.primal[0] + 5.0).abs() < 1e-9);
    }

    #[test]
    fn residuals_within_tolerance() {
        let mut m = LpModel::new();
        let x = m.add_col("x", 0.0, 4.0, -2.0);
        let y = m.add_col("y", 0.0, 4.0, -3.0);
        let r1 = m.add_row("r1", Sense::Le, 6.0);
        let r2 = m.add_row("r2", Sense::Le, 5.0);
        m.add_coeff(r1, x, 1.0);
        m.add_coeff(r1, y, 2.0);
        m.add_coeff(r2, x, 2.0);
        m.add_coeff(r2, y, 1.0);
        let s = solve_model(&mut m);
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!(m.max_residual(&s.primal) <= 1e-7);
    }
}
