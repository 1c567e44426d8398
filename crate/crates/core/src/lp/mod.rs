//! Modified critical constants from a linear program.
//!
//! Given an associated matrix `A` and a feasible floor `c`, the program
//!
//! ```text
//! maximize    a·ξ,            a_j = Σ_i w_i A_ij
//! subject to  A_i·ξ <= 1            i = 1..n
//!             ξ_{i-1} - ξ_i <= 0    i = 1..n, ξ_0 = 0
//!             c_i - ξ_i <= 0        i = 1..n
//! ```
//!
//! yields constants `ξ >= c` that stay inside the feasible set and are
//! therefore at least as powerful as `c` while controlling the same error rate.
//! With uniform weights the objective is the sum of the row bounds `(A·ξ)_i`.

pub mod simplex;

use std::fmt;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::constants::{ConstantParams, CriticalVector, Family};
use crate::error::{Error, Result};
use crate::matrices::{self, AssociatedMatrix};

pub use simplex::Progress;

/// Tolerance used for the floor check and the post-solve feasibility check.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Tag stored with cached solutions; bump whenever the pivot rule or the
/// post-processing changes the returned vertex.
pub const SOLVER_VERSION: &str = "bland-dense-simplex/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    NumericFailure,
}

impl fmt::Display for LpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LpStatus::Optimal => "OPTIMAL",
            LpStatus::Infeasible => "INFEASIBLE",
            LpStatus::NumericFailure => "NUMERIC_FAILURE",
        })
    }
}

/// One inequality `coefficients·ξ <= rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Inequality {
    pub coefficients: Vec<f64>,
    pub rhs: f64,
}

#[derive(Clone, Debug)]
pub struct LpProblem {
    matrix: AssociatedMatrix,
    floor: CriticalVector,
    weights: Vec<f64>,
    cap: Option<f64>,
}

/// Validates inputs and assembles the program. `weights` defaults to all ones.
pub fn build_problem(
    matrix: &AssociatedMatrix,
    floor: &CriticalVector,
    weights: Option<Vec<f64>>,
) -> Result<LpProblem> {
    let n = matrix.n();
    if floor.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: floor.len() });
    }
    let weights = weights.unwrap_or_else(|| vec![1.0; n]);
    if weights.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: weights.len() });
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || weights.iter().sum::<f64>() <= 0.0 {
        return Err(Error::InvalidParameter(
            "weights must be nonnegative with a positive sum".into(),
        ));
    }
    let max_bound = matrices::max_bound(matrix, floor)?;
    if max_bound > 1.0 + FEASIBILITY_TOL {
        return Err(Error::InfeasibleFloor { max_bound });
    }
    Ok(LpProblem { matrix: matrix.clone(), floor: floor.clone(), weights, cap: None })
}

impl LpProblem {
    /// Adds `ξ_n <= cap` (and hence `ξ_i <= cap` for all `i`).
    pub fn with_cap(mut self, cap: f64) -> Result<Self> {
        let top = self.floor.get(self.floor.len());
        if !(cap.is_finite() && cap >= top) {
            return Err(Error::InvalidParameter(format!(
                "cap {cap} must be finite and at least the largest floor constant {top}"
            )));
        }
        self.cap = Some(cap);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn matrix(&self) -> &AssociatedMatrix {
        &self.matrix
    }

    pub fn floor(&self) -> &CriticalVector {
        &self.floor
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn cap(&self) -> Option<f64> {
        self.cap
    }

    /// `a_j = Σ_i w_i A_ij`.
    pub fn objective_coefficients(&self) -> Vec<f64> {
        self.matrix
            .weighted_column_sums(&self.weights)
            .expect("weights validated at construction")
    }

    pub fn objective(&self, xi: &[f64]) -> f64 {
        self.objective_coefficients().iter().zip(xi).map(|(a, x)| a * x).sum()
    }

    /// The `3n` inequalities of the program in the original variables, in the
    /// order row bounds, monotonicity, floor (plus the cap, if set).
    pub fn constraints(&self) -> Vec<Inequality> {
        let n = self.n();
        let mut out: Vec<Inequality> = self
            .matrix
            .rows()
            .map(|r| Inequality { coefficients: r.to_vec(), rhs: 1.0 })
            .collect();
        for i in 0..n {
            let mut coefficients = vec![0.0; n];
            coefficients[i] = -1.0;
            if i > 0 {
                coefficients[i - 1] = 1.0;
            }
            out.push(Inequality { coefficients, rhs: 0.0 });
        }
        for i in 0..n {
            let mut coefficients = vec![0.0; n];
            coefficients[i] = -1.0;
            out.push(Inequality { coefficients, rhs: -self.floor.values()[i] });
        }
        if let Some(cap) = self.cap {
            let mut coefficients = vec![0.0; n];
            coefficients[n - 1] = 1.0;
            out.push(Inequality { coefficients, rhs: cap });
        }
        out
    }

    /// Shifted form in `y = ξ − c >= 0`, which makes the floor constraints
    /// variable bounds and every right-hand side nonnegative.
    fn standard_form(&self) -> simplex::StandardForm {
        let n = self.n();
        let c = self.floor.values();
        let ac = self.matrix.mul_vec(c).expect("dimensions validated");
        let rows = 2 * n + usize::from(self.cap.is_some());
        let mut matrix = vec![0.0; rows * n];
        let mut rhs = Vec::with_capacity(rows);
        for (i, row) in self.matrix.rows().enumerate() {
            matrix[i * n..(i + 1) * n].copy_from_slice(row);
            rhs.push((1.0 - ac[i]).max(0.0));
        }
        // ξ_{i-1} − ξ_i <= 0  <=>  y_{i-1} − y_i <= c_i − c_{i-1}
        for i in 0..n {
            let r = n + i;
            matrix[r * n + i] = -1.0;
            if i > 0 {
                matrix[r * n + i - 1] = 1.0;
                rhs.push(c[i] - c[i - 1]);
            } else {
                rhs.push(c[0]);
            }
        }
        if let Some(cap) = self.cap {
            matrix[2 * n * n + n - 1] = 1.0;
            rhs.push(cap - c[n - 1]);
        }
        simplex::StandardForm { matrix, rows, cols: n, rhs, objective: self.objective_coefficients() }
    }
}

/// Objective values and improvement ratios for a floor and a modified vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub floor_objective: f64,
    pub objective: f64,
    /// `max ξ_i / c_i` over `c_i > 0`.
    pub m1: Option<f64>,
    /// `max (A·ξ)_i / (A·c)_i` over rows with `(A·c)_i > 0`.
    pub m2: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub xi: CriticalVector,
    pub objective: f64,
    pub floor_objective: f64,
    pub m1: Option<f64>,
    pub m2: Option<f64>,
    pub status: LpStatus,
    pub iterations: usize,
}

impl LpSolution {
    pub fn diagnostics(&self) -> Diagnostics {
        Diagnostics {
            floor_objective: self.floor_objective,
            objective: self.objective,
            m1: self.m1,
            m2: self.m2,
        }
    }
}

fn max_ratio(num: &[f64], den: &[f64]) -> Option<f64> {
    num.iter()
        .zip(den)
        .filter(|(_, d)| **d > 0.0)
        .map(|(x, d)| x / d)
        .fold(None, |acc, r| Some(acc.map_or(r, |a: f64| a.max(r))))
}

/// Objective values and ratios with uniform weights.
pub fn diagnostics(a: &AssociatedMatrix, floor: &CriticalVector, xi: &CriticalVector) -> Result<Diagnostics> {
    weighted_diagnostics(a, floor, xi, &vec![1.0; a.n()])
}

pub fn weighted_diagnostics(
    a: &AssociatedMatrix,
    floor: &CriticalVector,
    xi: &CriticalVector,
    weights: &[f64],
) -> Result<Diagnostics> {
    let coeffs = a.weighted_column_sums(weights)?;
    let ac = a.mul_vec(floor.values())?;
    let ax = a.mul_vec(xi.values())?;
    let dot = |v: &[f64]| coeffs.iter().zip(v).map(|(a, x)| a * x).sum::<f64>();
    Ok(Diagnostics {
        floor_objective: dot(floor.values()),
        objective: dot(xi.values()),
        m1: max_ratio(xi.values(), floor.values()),
        m2: max_ratio(&ax, &ac),
    })
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub max_iterations: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { max_iterations: 1_000_000 }
    }
}

pub fn solve(problem: &LpProblem) -> Result<LpSolution> {
    solve_with(problem, SolveOptions::default(), |_| ControlFlow::Continue(()))
}

/// Solves the program, reporting each pivot to `on_pivot`, which may abort
/// the solve. Never returns a point that violates the constraints by more
/// than [`FEASIBILITY_TOL`].
pub fn solve_with(
    problem: &LpProblem,
    options: SolveOptions,
    on_pivot: impl FnMut(Progress) -> ControlFlow<()>,
) -> Result<LpSolution> {
    let form = problem.standard_form();
    let (outcome, vertex) = simplex::maximize(&form, options.max_iterations, on_pivot)?;
    if outcome == simplex::Outcome::Unbounded {
        // Every matrix row with support on column n bounds ξ, so this means a
        // degenerate user-supplied matrix.
        return Err(Error::NumericFailure(
            "program is unbounded; the matrix does not constrain the largest constant".into(),
        ));
    }
    log::debug!("simplex finished after {} pivots, objective {}", vertex.iterations, vertex.objective);

    let floor = problem.floor.values();
    let mut xi = Vec::with_capacity(floor.len());
    let mut prev = 0.0f64;
    for (j, (&y, &c)) in vertex.y.iter().zip(floor).enumerate() {
        if y < -FEASIBILITY_TOL {
            return Err(Error::NumericFailure(format!("ξ_{} fell below its floor by {}", j + 1, -y)));
        }
        let mut v = (c + y).max(c);
        if v < prev - FEASIBILITY_TOL {
            return Err(Error::NumericFailure(format!("ξ is not monotone at index {}", j + 1)));
        }
        v = v.max(prev);
        xi.push(v);
        prev = v;
    }
    let bound = problem
        .matrix
        .mul_vec(&xi)?
        .into_iter()
        .fold(0.0, f64::max);
    if bound > 1.0 + FEASIBILITY_TOL {
        return Err(Error::NumericFailure(format!("solution violates ‖A·ξ‖∞ <= 1 (got {bound})")));
    }
    if let Some(cap) = problem.cap {
        if xi[xi.len() - 1] > cap + FEASIBILITY_TOL {
            return Err(Error::NumericFailure("solution exceeds the cap".into()));
        }
    }

    let params = ConstantParams {
        parent: Some(problem.floor.family()),
        ..*problem.floor.params()
    };
    let xi = CriticalVector::new(xi, Family::Modified, params)?;
    let diag = weighted_diagnostics(&problem.matrix, &problem.floor, &xi, &problem.weights)?;
    Ok(LpSolution {
        xi,
        objective: diag.objective,
        floor_objective: diag.floor_objective,
        m1: diag.m1,
        m2: diag.m2,
        status: LpStatus::Optimal,
        iterations: vertex.iterations,
    })
}
