//! Solver- and format-agnostic linear program representation.
//!
//! An [`LpModel`] is a set of named bounded columns, named rows with a
//! sense and right-hand side, and sparse coefficient triplets. Models are
//! built incrementally, then [`LpModel::finalize`]d: duplicate triplets
//! are summed, triplets are sorted canonically, and the model becomes
//! immutable. Finalized models can be written as free-format MPS or
//! solved with the embedded bounded simplex.

mod mps;
mod simplex;

pub use mps::write_mps;
pub use simplex::{solve, SolveOptions};

use thiserror::Error;

pub const INF: f64 = f64::INFINITY;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("coefficient at (row {row}, col {col}) is not finite")]
    NonFiniteCoefficient { row: usize, col: usize },
    #[error("column {0} has non-finite objective coefficient")]
    NonFiniteObjective(usize),
    #[error("row {0} has non-finite rhs")]
    NonFiniteRhs(usize),
    #[error("column {0} has lower bound {1} above upper bound {2}")]
    InvertedBounds(usize, f64, f64),
    #[error("model already finalized")]
    AlreadyFinalized,
    #[error("model must be finalized first")]
    NotFinalized,
    #[error("triplet references out-of-range row {0} or col {1}")]
    IndexOutOfRange(usize, usize),
    #[error("numerically singular basis")]
    SingularBasis,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Column {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub objective: f64,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub name: String,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, Default)]
pub struct LpModel {
    pub columns: Vec<Column>,
    pub rows: Vec<Row>,
    /// After finalize: sorted by (col, row), unique, summed.
    pub triplets: Vec<(usize, usize, f64)>,
    finalized: bool,
}

impl LpModel {
    pub fn new() -> Self {
        LpModel::default()
    }

    pub fn add_col(&mut self, name: impl Into<String>, lower: f64, upper: f64, objective: f64) -> usize {
        self.columns.push(Column { name: name.into(), lower, upper, objective });
        self.columns.len() - 1
    }

    pub fn add_row(&mut self, name: impl Into<String>, sense: Sense, rhs: f64) -> usize {
        self.rows.push(Row { name: name.into(), sense, rhs });
        self.rows.len() - 1
    }

    pub fn add_coeff(&mut self, row: usize, col: usize, value: f64) {
        if value != 0.0 {
            self.triplets.push((row, col, value));
        }
    }

    pub fn set_objective(&mut self, col: usize, value: f64) {
        self.columns[col].objective = value;
    }

    pub fn set_bounds(&mut self, col: usize, lower: f64, upper: f64) {
        self.columns[col].lower = lower;
        self.columns[col].upper = upper;
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_nonzeros(&self) -> usize {
        self.triplets.len()
    }

    pub fn is_finalized(&self) -> bool {
        self.finalized
    }

    /// Canonicalize the model: duplicate (row, col) triplets are summed,
    /// triplets sorted by (col, row), bounds and coefficients validated.
    pub fn finalize(&mut self) -> Result<(), LpError> {
        if self.finalized {
            return Err(LpError::AlreadyFinalized);
        }
        for (i, c) in self.columns.iter().enumerate() {
            if !c.objective.is_finite() {
                return Err(LpError::NonFiniteObjective(i));
            }
            if c.lower > c.upper {
                return Err(LpError::InvertedBounds(i, c.lower, c.upper));
            }
            if c.lower.is_nan() || c.upper.is_nan() {
                return Err(LpError::InvertedBounds(i, c.lower, c.upper));
            }
        }
        for (i, r) in self.rows.iter().enumerate() {
            if !r.rhs.is_finite() {
                return Err(LpError::NonFiniteRhs(i));
            }
        }
        for &(r, c, v) in &self.triplets {
            if r >= self.rows.len() || c >= self.columns.len() {
                return Err(LpError::IndexOutOfRange(r, c));
            }
            if !v.is_finite() {
                return Err(LpError::NonFiniteCoefficient { row: r, col: c });
            }
        }
        self.triplets.sort_by_key(|&(r, c, _)| (c, r));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(self.triplets.len());
        for &(r, c, v) in &self.triplets {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|&(_, _, v)| v != 0.0);
        self.triplets = merged;
        self.finalized = true;
        Ok(())
    }

    /// Column-major view of the coefficient matrix; requires finalize.
    pub(crate) fn columns_sparse(&self) -> Vec<Vec<(usize, f64)>> {
        let mut cols = vec![Vec::new(); self.columns.len()];
        for &(r, c, v) in &self.triplets {
            cols[c].push((r, v));
        }
        cols
    }

    /// Objective value of a primal point.
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.columns.iter().zip(x).map(|(c, &xi)| c.objective * xi).sum()
    }

    /// Maximum scaled primal residual of `x` over all rows:
    /// |violation| / (1 + |rhs|).
    pub fn max_residual(&self, x: &[f64]) -> f64 {
        let mut act = vec![0.0; self.rows.len()];
        for &(r, c, v) in &self.triplets {
            act[r] += v * x[c];
        }
        let mut worst: f64 = 0.0;
        for (i, row) in self.rows.iter().enumerate() {
            let viol = match row.sense {
                Sense::Le => (act[i] - row.rhs).max(0.0),
                Sense::Ge => (row.rhs - act[i]).max(0.0),
                Sense::Eq => (act[i] - row.rhs).abs(),
            };
            worst = worst.max(viol / (1.0 + row.rhs.abs()));
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: SolveStatus,
    pub objective: f64,
    /// Primal value per column.
    pub primal: Vec<f64>,
    /// Dual value per row, when available.
    pub duals: Option<Vec<f64>>,
    pub iterations: usize,
}
