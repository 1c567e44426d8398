//! Dense primal simplex for `max c·y  s.t.  M·y <= b, y >= 0` with `b >= 0`.
//!
//! The origin is always a basic feasible solution (slack basis), so no phase
//! one is needed. Pivoting follows Bland's rule: the entering column is the
//! lowest-index column with positive reduced cost and ties in the ratio test go
//! to the lowest-index basic variable. This terminates on degenerate problems
//! and makes the sequence of pivots, and therefore the returned vertex, a pure
//! function of the input.

use std::ops::ControlFlow;

use crate::error::{Error, Result};

/// Reduced-cost and pivot tolerance.
pub const TOLERANCE: f64 = 1e-9;

/// Snapshot handed to the progress callback after every pivot.
#[derive(Clone, Copy, Debug)]
pub struct Progress {
    pub iterations: usize,
    pub objective: f64,
}

#[derive(Clone, Debug)]
pub struct StandardForm {
    /// Row-major constraint matrix, `rows × cols`.
    pub matrix: Vec<f64>,
    pub rows: usize,
    pub cols: usize,
    pub rhs: Vec<f64>,
    pub objective: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct Vertex {
    pub y: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Optimal,
    Unbounded,
}

struct Tableau {
    width: usize,
    cells: Vec<f64>,
    reduced: Vec<f64>,
    value: f64,
    basis: Vec<usize>,
    rows: usize,
}

impl Tableau {
    fn new(p: &StandardForm) -> Self {
        let width = p.cols + p.rows + 1;
        let mut cells = vec![0.0; p.rows * width];
        for r in 0..p.rows {
            let row = &mut cells[r * width..(r + 1) * width];
            row[..p.cols].copy_from_slice(&p.matrix[r * p.cols..(r + 1) * p.cols]);
            row[p.cols + r] = 1.0;
            row[width - 1] = p.rhs[r];
        }
        let mut reduced = vec![0.0; width - 1];
        reduced[..p.cols].copy_from_slice(&p.objective);
        Tableau { width, cells, reduced, value: 0.0, basis: (p.cols..p.cols + p.rows).collect(), rows: p.rows }
    }

    fn entering(&self) -> Option<usize> {
        self.reduced.iter().position(|&r| r > TOLERANCE)
    }

    fn leaving(&self, col: usize) -> Option<usize> {
        let w = self.width;
        let mut best: Option<(usize, f64)> = None;
        for r in 0..self.rows {
            let a = self.cells[r * w + col];
            if a <= TOLERANCE {
                continue;
            }
            let ratio = self.cells[r * w + w - 1].max(0.0) / a;
            best = match best {
                None => Some((r, ratio)),
                Some((br, bratio)) => {
                    let tie = (ratio - bratio).abs() <= 1e-12 * bratio.abs().max(1.0);
                    if ratio < bratio && !tie || tie && self.basis[r] < self.basis[br] {
                        Some((r, ratio))
                    } else {
                        Some((br, bratio))
                    }
                }
            };
        }
        best.map(|(r, _)| r)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width;
        let p = self.cells[row * w + col];
        let pivot_row: Vec<f64> = self.cells[row * w..(row + 1) * w].iter().map(|v| v / p).collect();
        for r in 0..self.rows {
            let target = &mut self.cells[r * w..(r + 1) * w];
            if r == row {
                target.copy_from_slice(&pivot_row);
                continue;
            }
            let f = target[col];
            if f != 0.0 {
                for (t, pv) in target.iter_mut().zip(&pivot_row) {
                    *t -= f * pv;
                }
                target[col] = 0.0;
            }
        }
        let f = self.reduced[col];
        for (t, pv) in self.reduced.iter_mut().zip(&pivot_row) {
            *t -= f * pv;
        }
        self.reduced[col] = 0.0;
        self.value += f * pivot_row[w - 1];
        self.basis[row] = col;
    }
}

/// Runs the simplex method. The callback sees every pivot and may stop the
/// solve by returning `ControlFlow::Break`.
pub fn maximize(
    p: &StandardForm,
    max_iterations: usize,
    mut on_pivot: impl FnMut(Progress) -> ControlFlow<()>,
) -> Result<(Outcome, Vertex)> {
    if p.matrix.len() != p.rows * p.cols || p.rhs.len() != p.rows || p.objective.len() != p.cols {
        return Err(Error::NumericFailure("inconsistent problem dimensions".into()));
    }
    if let Some(b) = p.rhs.iter().find(|b| !(b.is_finite() && **b >= 0.0)) {
        return Err(Error::NumericFailure(format!("right-hand side {b} is not >= 0")));
    }
    let mut t = Tableau::new(p);
    let mut iterations = 0;
    let outcome = loop {
        let Some(col) = t.entering() else { break Outcome::Optimal };
        let Some(row) = t.leaving(col) else { break Outcome::Unbounded };
        t.pivot(row, col);
        iterations += 1;
        if !t.value.is_finite() {
            return Err(Error::NumericFailure(format!("objective diverged after {iterations} pivots")));
        }
        if iterations >= max_iterations {
            return Err(Error::NumericFailure(format!(
                "no convergence within {max_iterations} pivots"
            )));
        }
        if on_pivot(Progress { iterations, objective: t.value }).is_break() {
            return Err(Error::Interrupted { iterations });
        }
    };
    let mut y = vec![0.0; p.cols];
    for (r, &var) in t.basis.iter().enumerate() {
        if var < p.cols {
            y[var] = t.cells[r * t.width + t.width - 1];
        }
    }
    Ok((outcome, Vertex { y, objective: t.value, iterations }))
}
