//! Associated matrices for the four generalized error rates.
//!
//! Row `i` of an associated matrix corresponds to `|I| = i` true hypotheses and
//! column `j` to the critical constant `c_j`; the product `(A·c)_i` is the
//! generalized Bonferroni bound on the error rate of the procedure with
//! constants `c` when exactly `i` hypotheses are true. A vector `c` for which
//! `‖A·c‖∞ ≤ 1` therefore gives a procedure `α·c` that controls the error rate
//! at level `α` under arbitrary dependence of the p-values.
//!
//! All public indices (rows, columns, auxiliary maps) are 1-based.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::constants::CriticalVector;
use crate::error::{Error, Result};

/// Step-up or step-down.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "su")]
    StepUp,
    #[serde(rename = "sd")]
    StepDown,
}

impl Direction {
    pub fn abbrev(self) -> &'static str {
        match self {
            Direction::StepUp => "SU",
            Direction::StepDown => "SD",
        }
    }
}

/// Error rate and stepping direction targeted by a matrix or procedure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ErrorRate {
    #[serde(rename = "kfwer-su")]
    KfwerSu,
    #[serde(rename = "kfwer-sd")]
    KfwerSd,
    #[serde(rename = "fdp-su")]
    FdpSu,
    #[serde(rename = "fdp-sd")]
    FdpSd,
}

impl ErrorRate {
    pub fn direction(self) -> Direction {
        match self {
            ErrorRate::KfwerSu | ErrorRate::FdpSu => Direction::StepUp,
            ErrorRate::KfwerSd | ErrorRate::FdpSd => Direction::StepDown,
        }
    }

    pub fn is_kfwer(self) -> bool {
        matches!(self, ErrorRate::KfwerSu | ErrorRate::KfwerSd)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorRate::KfwerSu => "kfwer-su",
            ErrorRate::KfwerSd => "kfwer-sd",
            ErrorRate::FdpSu => "fdp-su",
            ErrorRate::FdpSd => "fdp-sd",
        }
    }
}

impl fmt::Display for ErrorRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ErrorRate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kfwer-su" => Ok(ErrorRate::KfwerSu),
            "kfwer-sd" => Ok(ErrorRate::KfwerSd),
            "fdp-su" => Ok(ErrorRate::FdpSu),
            "fdp-sd" => Ok(ErrorRate::FdpSd),
            other => Err(Error::InvalidParameter(format!("unknown error rate `{other}`"))),
        }
    }
}

/// Which error rate a matrix targets, together with `n` and either `k` or `γ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRateSpec {
    pub rate: ErrorRate,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

impl ErrorRateSpec {
    pub fn kfwer(direction: Direction, n: usize, k: usize) -> Result<Self> {
        let rate = match direction {
            Direction::StepUp => ErrorRate::KfwerSu,
            Direction::StepDown => ErrorRate::KfwerSd,
        };
        let spec = ErrorRateSpec { rate, n, k: Some(k), gamma: None };
        spec.validate()?;
        Ok(spec)
    }

    pub fn fdp(direction: Direction, n: usize, gamma: f64) -> Result<Self> {
        let rate = match direction {
            Direction::StepUp => ErrorRate::FdpSu,
            Direction::StepDown => ErrorRate::FdpSd,
        };
        let spec = ErrorRateSpec { rate, n, k: None, gamma: Some(gamma) };
        spec.validate()?;
        Ok(spec)
    }

    /// Builds a spec from a rate plus whichever parameter it needs.
    pub fn new(rate: ErrorRate, n: usize, k: Option<usize>, gamma: Option<f64>) -> Result<Self> {
        let spec = if rate.is_kfwer() {
            let k = k.ok_or_else(|| Error::InvalidParameter(format!("{rate} requires k")))?;
            ErrorRateSpec { rate, n, k: Some(k), gamma: None }
        } else {
            let gamma =
                gamma.ok_or_else(|| Error::InvalidParameter(format!("{rate} requires gamma")))?;
            ErrorRateSpec { rate, n, k: None, gamma: Some(gamma) }
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        if self.rate.is_kfwer() {
            match self.k {
                Some(k) if (1..=self.n).contains(&k) => Ok(()),
                Some(k) => Err(Error::InvalidParameter(format!(
                    "k = {k} must satisfy 1 <= k <= n = {}",
                    self.n
                ))),
                None => Err(Error::InvalidParameter(format!("{} requires k", self.rate))),
            }
        } else {
            match self.gamma {
                Some(g) => check_gamma(g),
                None => Err(Error::InvalidParameter(format!("{} requires gamma", self.rate))),
            }
        }
    }

    pub fn direction(&self) -> Direction {
        self.rate.direction()
    }

    /// `k=..` or `gamma=..`, whichever applies.
    pub fn param_label(&self) -> String {
        match (self.k, self.gamma) {
            (Some(k), _) => format!("k={k}"),
            (_, Some(g)) => format!("gamma={g}"),
            _ => String::new(),
        }
    }
}

impl fmt::Display for ErrorRateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rate={} n={} {}", self.rate, self.n, self.param_label())
    }
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && (0.0..1.0).contains(&gamma) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("gamma = {gamma} must lie in [0, 1)")))
    }
}

// `γ` arrives as a decimal literal, so `γ·l` is often an integer that the
// binary product misses by one ulp (0.29·100 = 28.999999999999996). Values
// within this relative distance of an integer are snapped to it.
const SNAP_TOL: f64 = 1e-9;

fn snap(x: f64) -> Option<f64> {
    let r = x.round();
    ((x - r).abs() <= SNAP_TOL * r.abs().max(1.0)).then_some(r)
}

pub(crate) fn floor_snapped(x: f64) -> usize {
    snap(x).unwrap_or_else(|| x.floor()) as usize
}

fn ceil_snapped(x: f64) -> usize {
    snap(x).unwrap_or_else(|| x.ceil()) as usize
}

/// `m(l) = ⌊γ·l⌋ + 1`, the number of false rejections needed before the FDP
/// among `l` rejections exceeds `γ`.
pub fn min_false_rejections(gamma: f64, l: usize) -> usize {
    floor_snapped(gamma * l as f64) + 1
}

/// `i·(1/k − 1/(k+1))`, evaluated without cancellation.
fn telescoping_coefficient(i: usize, k: usize) -> f64 {
    i as f64 / (k as f64 * (k as f64 + 1.0))
}

/// A dense `n×n` nonnegative matrix together with the error rate it encodes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssociatedMatrix {
    spec: ErrorRateSpec,
    #[serde(with = "rows_serde")]
    entries: Vec<f64>,
}

mod rows_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(entries: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let n = (entries.len() as f64).sqrt().round() as usize;
        let rows: Vec<&[f64]> = if n == 0 { Vec::new() } else { entries.chunks(n).collect() };
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(serde::de::Error::custom("matrix rows must all have length n"));
        }
        Ok(rows.into_iter().flatten().collect())
    }
}

impl AssociatedMatrix {
    /// Builds the matrix described by `spec`.
    pub fn build(spec: &ErrorRateSpec) -> Result<Self> {
        spec.validate()?;
        match spec.rate {
            ErrorRate::KfwerSu => kfwer_su_matrix(spec.n, spec.k.unwrap_or(1)),
            ErrorRate::KfwerSd => kfwer_sd_matrix(spec.n, spec.k.unwrap_or(1)),
            ErrorRate::FdpSu => fdp_su_matrix(spec.n, spec.gamma.unwrap_or(0.0)),
            ErrorRate::FdpSd => fdp_sd_matrix(spec.n, spec.gamma.unwrap_or(0.0)),
        }
    }

    /// Wraps explicit entries (row-major). Used when reading matrices back from disk.
    pub fn from_rows(spec: ErrorRateSpec, rows: Vec<Vec<f64>>) -> Result<Self> {
        spec.validate()?;
        if rows.len() != spec.n {
            return Err(Error::DimensionMismatch { expected: spec.n, actual: rows.len() });
        }
        let mut entries = Vec::with_capacity(spec.n * spec.n);
        for row in rows {
            if row.len() != spec.n {
                return Err(Error::DimensionMismatch { expected: spec.n, actual: row.len() });
            }
            if let Some(v) = row.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                return Err(Error::InvalidParameter(format!("matrix entry {v} is not >= 0")));
            }
            entries.extend(row);
        }
        Ok(AssociatedMatrix { spec, entries })
    }

    fn zeros(spec: ErrorRateSpec) -> Self {
        AssociatedMatrix { entries: vec![0.0; spec.n * spec.n], spec }
    }

    fn set(&mut self, i: usize, j: usize, value: f64) {
        let n = self.spec.n;
        self.entries[(i - 1) * n + (j - 1)] = value;
    }

    fn add(&mut self, i: usize, j: usize, value: f64) {
        let n = self.spec.n;
        self.entries[(i - 1) * n + (j - 1)] += value;
    }

    pub fn spec(&self) -> &ErrorRateSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    /// Entry `A_ij`, 1-based.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        assert!((1..=self.n()).contains(&i) && (1..=self.n()).contains(&j), "index out of range");
        self.entries[(i - 1) * self.n() + (j - 1)]
    }

    /// Row for `|I| = i` true hypotheses, 1-based.
    pub fn row(&self, i: usize) -> &[f64] {
        assert!((1..=self.n()).contains(&i), "row index out of range");
        let n = self.n();
        &self.entries[(i - 1) * n..i * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.entries.chunks(self.n())
    }

    /// 1-based columns with a nonzero entry in row `i`.
    pub fn support(&self, i: usize) -> Vec<usize> {
        self.row(i)
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(j, _)| j + 1)
            .collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.rows().map(|r| r.iter().sum()).collect()
    }

    /// `Σ_i w_i A_ij` for each column `j`.
    pub fn weighted_column_sums(&self, weights: &[f64]) -> Result<Vec<f64>> {
        if weights.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), actual: weights.len() });
        }
        let mut sums = vec![0.0; self.n()];
        for (row, &w) in self.rows().zip(weights) {
            if w == 0.0 {
                continue;
            }
            for (s, a) in sums.iter_mut().zip(row) {
                *s += w * a;
            }
        }
        Ok(sums)
    }

    /// `A·x` for an arbitrary vector.
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), actual: x.len() });
        }
        Ok(self.rows().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect())
    }
}

/// Matrix for kFWER control by a step-up procedure.
pub fn kfwer_su_matrix(n: usize, k: usize) -> Result<AssociatedMatrix> {
    let spec = ErrorRateSpec::kfwer(Direction::StepUp, n, k)?;
    let mut a = AssociatedMatrix::zeros(spec);
    for i in k..=n {
        // Columns n+k-i .. n-1 carry i(1/q - 1/(q+1)) with q = j-n+i.
        for j in (n + k - i)..n {
            a.set(i, j, telescoping_coefficient(i, j + i - n));
        }
        // i·(1/i)
        a.set(i, n, 1.0);
    }
    Ok(a)
}

/// Matrix for kFWER control by a step-down procedure: a single entry `i/k`
/// at column `n-i+k` for every row `i >= k`.
pub fn kfwer_sd_matrix(n: usize, k: usize) -> Result<AssociatedMatrix> {
    let spec = ErrorRateSpec::kfwer(Direction::StepDown, n, k)?;
    let mut a = AssociatedMatrix::zeros(spec);
    for i in k..=n {
        a.set(i, n - i + k, i as f64 / k as f64);
    }
    Ok(a)
}

/// Index functions behind row `i` of the FDP step-up matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FdpSuAux {
    pub i: usize,
    /// Largest `l <= n` with `m(l) <= i`.
    pub m_tilde: usize,
    /// `g_i(m_tilde)`: number of distinct order statistics involved.
    pub m: usize,
    /// `t_1(i) < … < t_M(i)`: the column paired with the `k`-th null order statistic.
    pub t: Vec<usize>,
    /// `g_i(1) … g_i(m_tilde)`.
    pub g: Vec<usize>,
}

pub fn fdp_su_aux(n: usize, gamma: f64, i: usize) -> Result<FdpSuAux> {
    check_gamma(gamma)?;
    if !(1..=n).contains(&i) {
        return Err(Error::InvalidParameter(format!("row {i} outside 1..={n}")));
    }
    let m_tilde = (1..=n)
        .rev()
        .find(|&l| min_false_rejections(gamma, l) <= i)
        .expect("m(1) = 1 <= i");
    // i - n + l may be negative; m(l) >= 1 dominates in that case.
    let g: Vec<usize> = (1..=m_tilde)
        .map(|l| ((i + l).saturating_sub(n)).max(min_false_rejections(gamma, l)))
        .collect();
    let m = g[m_tilde - 1];
    let mut t = vec![0usize; m];
    for (idx, &gl) in g.iter().enumerate() {
        t[gl - 1] = idx + 1;
    }
    Ok(FdpSuAux { i, m_tilde, m, t, g })
}

/// Matrix for control of `P(FDP > γ)` by a step-up procedure.
pub fn fdp_su_matrix(n: usize, gamma: f64) -> Result<AssociatedMatrix> {
    let spec = ErrorRateSpec::fdp(Direction::StepUp, n, gamma)?;
    let mut a = AssociatedMatrix::zeros(spec);
    for i in 1..=n {
        let aux = fdp_su_aux(n, gamma, i)?;
        let m = aux.m;
        for (k, &col) in aux.t.iter().enumerate().map(|(idx, c)| (idx + 1, c)) {
            let value = if k < m {
                telescoping_coefficient(i, k)
            } else {
                i as f64 / m as f64
            };
            a.set(i, col, value);
        }
    }
    Ok(a)
}

/// Index functions behind row `i` of the FDP step-down matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FdpSdAux {
    pub i: usize,
    /// `k_i(1) … k_i(⌊γn⌋+1)`: column assigned to each order statistic.
    pub kmap: Vec<usize>,
    /// `N(i)`: number of order statistics entering the bound.
    pub n_terms: usize,
    /// Distinct values of `kmap`, ascending.
    pub column_set: BTreeSet<usize>,
}

pub fn fdp_sd_aux(n: usize, gamma: f64, i: usize) -> Result<FdpSdAux> {
    check_gamma(gamma)?;
    if !(1..=n).contains(&i) {
        return Err(Error::InvalidParameter(format!("row {i} outside 1..={n}")));
    }
    let len = floor_snapped(gamma * n as f64) + 1;
    let kmap: Vec<usize> = (1..=len)
        .map(|l| {
            let base = n.min(n + l - i);
            if gamma > 0.0 {
                base.min(ceil_snapped(l as f64 / gamma) - 1)
            } else {
                base
            }
        })
        .collect();
    let tail = floor_snapped(gamma * ((n - i) as f64 / (1.0 - gamma) + 1.0)) + 1;
    let n_terms = len.min(i).min(tail);
    let column_set = kmap.iter().copied().collect();
    Ok(FdpSdAux { i, kmap, n_terms, column_set })
}

/// Matrix for control of `P(FDP > γ)` by a step-down procedure.
pub fn fdp_sd_matrix(n: usize, gamma: f64) -> Result<AssociatedMatrix> {
    let spec = ErrorRateSpec::fdp(Direction::StepDown, n, gamma)?;
    let mut a = AssociatedMatrix::zeros(spec);
    for i in 1..=n {
        let aux = fdp_sd_aux(n, gamma, i)?;
        let terms = aux.n_terms;
        // Row i of the intermediate matrix is nonzero only in columns 1..=N(i),
        // which are then redistributed onto the columns k_i(l).
        for l in 1..=terms {
            let value = if l < terms {
                telescoping_coefficient(i, l)
            } else {
                i as f64 / terms as f64
            };
            a.add(i, aux.kmap[l - 1], value);
        }
    }
    Ok(a)
}

/// `A·c`: component `i` bounds the error rate when `|I| = i`.
pub fn bound_vector(a: &AssociatedMatrix, c: &CriticalVector) -> Result<Vec<f64>> {
    a.mul_vec(c.values())
}

/// `‖A·c‖∞`.
pub fn max_bound(a: &AssociatedMatrix, c: &CriticalVector) -> Result<f64> {
    Ok(bound_vector(a, c)?.into_iter().fold(0.0, f64::max))
}

/// Whether `c` lies in the feasible set `{c nondecreasing, c >= 0, ‖A·c‖∞ <= 1}`.
pub fn is_feasible(a: &AssociatedMatrix, c: &CriticalVector, tol: f64) -> Result<bool> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be >= 0")));
    }
    // CriticalVector already guarantees monotonicity and nonnegativity.
    Ok(max_bound(a, c)? <= 1.0 + tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(a: &AssociatedMatrix) -> Vec<Vec<f64>> {
        a.rows().map(|r| r.to_vec()).collect()
    }

    #[test]
    fn kfwer_su_small_cases() {
        assert_eq!(rows(&kfwer_su_matrix(1, 1).unwrap()), vec![vec![1.0]]);
        assert_eq!(
            rows(&kfwer_su_matrix(3, 1).unwrap()),
            vec![vec![0.0, 0.0, 1.0], vec![0.0, 1.0, 1.0], vec![1.5, 0.5, 1.0]]
        );
    }

    #[test]
    fn kfwer_rejects_bad_k() {
        assert!(kfwer_su_matrix(5, 0).is_err());
        assert!(kfwer_su_matrix(5, 6).is_err());
        assert!(kfwer_sd_matrix(5, 0).is_err());
        assert!(kfwer_sd_matrix(0, 1).is_err());
    }

    #[test]
    fn kfwer_sd_small_cases() {
        let a = kfwer_sd_matrix(10, 1).unwrap();
        for i in 1..=10 {
            for j in 1..=10 {
                let expected = if j == 11 - i { i as f64 } else { 0.0 };
                assert_eq!(a.entry(i, j), expected);
            }
        }
        let a = kfwer_sd_matrix(5, 3).unwrap();
        assert!(a.row(1).iter().chain(a.row(2)).all(|v| *v == 0.0));
        assert_eq!(a.entry(3, 5), 1.0);
        assert_eq!(a.entry(4, 4), 4.0 / 3.0);
        assert_eq!(a.entry(5, 3), 5.0 / 3.0);
        assert_eq!(a.support(4), vec![4]);
    }

    #[test]
    fn fdp_su_aux_examples() {
        let aux = fdp_su_aux(50, 0.05, 1).unwrap();
        assert_eq!((aux.m_tilde, aux.m, aux.t.clone()), (19, 1, vec![19]));

        let aux = fdp_su_aux(50, 0.05, 32).unwrap();
        assert_eq!(aux.m, 32);
        assert_eq!(aux.t[0], 19);
        for k in 2..=32 {
            assert_eq!(aux.t[k - 1], 18 + k);
        }

        let aux = fdp_su_aux(10, 0.0, 5).unwrap();
        assert_eq!(aux.m_tilde, 10);
        assert_eq!(aux.m, 5);
        assert_eq!(aux.t, vec![6, 7, 8, 9, 10]);
        let expected_g: Vec<usize> = (1..=10usize).map(|l| l.saturating_sub(5).max(1)).collect();
        assert_eq!(aux.g, expected_g);
    }

    #[test]
    fn fdp_sd_aux_examples() {
        let aux = fdp_sd_aux(10, 0.05, 4).unwrap();
        assert_eq!((aux.kmap.clone(), aux.n_terms), (vec![7], 1));
        let aux = fdp_sd_aux(10, 0.0, 4).unwrap();
        assert_eq!((aux.kmap.clone(), aux.n_terms), (vec![7], 1));
        let aux = fdp_sd_aux(50, 0.05, 50).unwrap();
        assert_eq!(aux.kmap, vec![1, 2, 3]);
        assert_eq!(aux.n_terms, 1);
        assert_eq!(aux.column_set.iter().copied().collect::<Vec<_>>(), vec![1, 2, 3]);
    }

    #[test]
    fn aux_rejects_out_of_range_rows() {
        assert!(fdp_su_aux(10, 0.05, 0).is_err());
        assert!(fdp_su_aux(10, 0.05, 11).is_err());
        assert!(fdp_sd_aux(10, 1.0, 3).is_err());
        assert!(fdp_sd_aux(10, -0.1, 3).is_err());
    }

    #[test]
    fn fdp_su_row_32_support() {
        let a = fdp_su_matrix(50, 0.05).unwrap();
        assert_eq!(a.support(32), (19..=50).collect::<Vec<_>>());
    }

    #[test]
    fn fdp_sd_reduces_to_holm_matrix() {
        let a = fdp_sd_matrix(10, 0.05).unwrap();
        assert_eq!(a, AssociatedMatrix { spec: *a.spec(), entries: kfwer_sd_matrix(10, 1).unwrap().entries });
        assert_eq!(rows(&fdp_sd_matrix(1, 0.0).unwrap()), vec![vec![1.0]]);
    }

    #[test]
    fn snapping_handles_decimal_gamma() {
        assert_eq!(min_false_rejections(0.29, 100), 30);
        assert_eq!(min_false_rejections(0.05, 20), 2);
        assert_eq!(min_false_rejections(0.05, 19), 1);
        assert_eq!(ceil_snapped(3.0 / 0.1), 30);
    }

    #[test]
    fn zero_vector_is_feasible() {
        let a = fdp_su_matrix(7, 0.1).unwrap();
        let zero = CriticalVector::custom(vec![0.0; 7]).unwrap();
        assert_eq!(bound_vector(&a, &zero).unwrap(), vec![0.0; 7]);
        assert!(is_feasible(&a, &zero, 0.0).unwrap());
        assert!(is_feasible(&a, &zero, -1.0).is_err());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = kfwer_sd_matrix(4, 1).unwrap();
        let c = CriticalVector::custom(vec![0.1; 3]).unwrap();
        assert!(matches!(
            bound_vector(&a, &c),
            Err(Error::DimensionMismatch { expected: 4, actual: 3 })
        ));
    }

    #[test]
    fn spec_parsing_and_validation() {
        assert_eq!("FDP-SU".parse::<ErrorRate>().unwrap(), ErrorRate::FdpSu);
        assert!("fwer".parse::<ErrorRate>().is_err());
        assert!(ErrorRateSpec::new(ErrorRate::FdpSd, 5, None, None).is_err());
        assert!(ErrorRateSpec::new(ErrorRate::KfwerSu, 5, Some(2), None).is_ok());
        let json = serde_json::to_string(&ErrorRateSpec::fdp(Direction::StepUp, 3, 0.1).unwrap())
            .unwrap();
        assert_eq!(json, r#"{"rate":"fdp-su","n":3,"gamma":0.1}"#);
    }
}
