//! Step-up and step-down procedures, rejection sets and adjusted p-values.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cache::SolutionCache;
use crate::constants::{
    bh_constants, by_constants, gr_sd_constants, lr_fdp_constants, lr_kfwer_constants, rescale,
    CriticalVector,
};
use crate::error::{Error, Result};
use crate::lp;
use crate::matrices::{AssociatedMatrix, Direction, ErrorRate, ErrorRateSpec};

/// Observed p-values with optional labels and, for simulation, the truth.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PValueVector {
    values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    /// `true` where the null hypothesis is true.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    truth: Option<Vec<bool>>,
}

impl PValueVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(Error::PValueOutOfRange { position: i + 1, value: *v });
        }
        Ok(PValueVector { values, labels: None, truth: None })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.values.len() {
            return Err(Error::DimensionMismatch { expected: self.values.len(), actual: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_truth(mut self, truth: Vec<bool>) -> Result<Self> {
        if truth.len() != self.values.len() {
            return Err(Error::DimensionMismatch { expected: self.values.len(), actual: truth.len() });
        }
        self.truth = Some(truth);
        Ok(self)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn truth(&self) -> Option<&[bool]> {
        self.truth.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Original (0-based) indices in ascending p-value order; ties keep input order.
    pub fn order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.values.len()).collect();
        idx.sort_by(|&a, &b| self.values[a].total_cmp(&self.values[b]).then(a.cmp(&b)));
        idx
    }

    pub fn sorted(&self) -> Vec<f64> {
        self.order().into_iter().map(|i| self.values[i]).collect()
    }
}

/// Outcome of applying a procedure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionSet {
    /// 0-based indices into the input p-value vector.
    pub rejected: BTreeSet<usize>,
    /// Number of leading order statistics rejected.
    pub cutoff_index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub false_rejections: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fdp: Option<f64>,
}

impl DecisionSet {
    pub fn rejections(&self) -> usize {
        self.cutoff_index
    }
}

/// Adjusted p-values in sorted p-value order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdjustedPValues {
    pub values: Vec<f64>,
    /// Original index of each sorted position.
    pub order: Vec<usize>,
}

impl AdjustedPValues {
    /// Adjusted values rearranged into the input order.
    pub fn in_input_order(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.values.len()];
        for (&orig, &v) in self.order.iter().zip(&self.values) {
            out[orig] = v;
        }
        out
    }
}

fn check_lengths(p: &PValueVector, c: &CriticalVector) -> Result<()> {
    if p.len() != c.len() {
        return Err(Error::DimensionMismatch { expected: c.len(), actual: p.len() });
    }
    Ok(())
}

/// Number of hypotheses rejected by the step-up rule on sorted p-values:
/// `max{i : p_(i) <= c_i}`, or 0.
pub fn step_up_count(sorted: &[f64], c: &[f64]) -> usize {
    sorted
        .iter()
        .zip(c)
        .rposition(|(p, t)| *p <= t.min(1.0))
        .map_or(0, |i| i + 1)
}

/// Number of hypotheses rejected by the step-down rule on sorted p-values:
/// the length of the longest prefix with `p_(j) <= c_j`.
pub fn step_down_count(sorted: &[f64], c: &[f64]) -> usize {
    sorted.iter().zip(c).take_while(|(p, t)| **p <= t.min(1.0)).count()
}

fn decide(p: &PValueVector, c: &CriticalVector, direction: Direction) -> Result<DecisionSet> {
    check_lengths(p, c)?;
    let order = p.order();
    let sorted: Vec<f64> = order.iter().map(|&i| p.values[i]).collect();
    let k = match direction {
        Direction::StepUp => step_up_count(&sorted, c.values()),
        Direction::StepDown => step_down_count(&sorted, c.values()),
    };
    let rejected: BTreeSet<usize> = order[..k].iter().copied().collect();
    let mut d = DecisionSet { rejected, cutoff_index: k, false_rejections: None, fdp: None };
    if let Some(truth) = p.truth() {
        let (v, _, fdp) = fdp_stats(&d, truth)?;
        d.false_rejections = Some(v);
        d.fdp = Some(fdp);
    }
    Ok(d)
}

pub fn step_up(p: &PValueVector, c: &CriticalVector) -> Result<DecisionSet> {
    decide(p, c, Direction::StepUp)
}

pub fn step_down(p: &PValueVector, c: &CriticalVector) -> Result<DecisionSet> {
    decide(p, c, Direction::StepDown)
}

pub fn apply(p: &PValueVector, c: &CriticalVector, direction: Direction) -> Result<DecisionSet> {
    decide(p, c, direction)
}

/// `min(p/c, 1)`, with `p/0` read as `+∞` except `0/0`, which is 0 so that a
/// zero p-value stays rejectable by a zero threshold.
fn ratio(p: f64, c: f64) -> f64 {
    if c > 0.0 {
        (p / c).min(1.0)
    } else if p == 0.0 {
        0.0
    } else {
        1.0
    }
}

/// Adjusted p-values for the family `α·c`: hypothesis `H_(i)` is rejected at
/// level `α < 1` exactly when its adjusted value is `<= α`.
pub fn adjusted_pvalues(p: &PValueVector, c: &CriticalVector, direction: Direction) -> Result<AdjustedPValues> {
    check_lengths(p, c)?;
    let order = p.order();
    let raw: Vec<f64> = order.iter().zip(c.values()).map(|(&i, &cj)| ratio(p.values[i], cj)).collect();
    let mut values = raw.clone();
    match direction {
        Direction::StepUp => {
            for i in (0..values.len().saturating_sub(1)).rev() {
                values[i] = values[i].min(values[i + 1]);
            }
        }
        Direction::StepDown => {
            for i in 1..values.len() {
                values[i] = values[i].max(values[i - 1]);
            }
        }
    }
    Ok(AdjustedPValues { values, order })
}

/// `(V, R, FDP)` for a decision set given which hypotheses are true nulls.
pub fn fdp_stats(d: &DecisionSet, truth: &[bool]) -> Result<(usize, usize, f64)> {
    if let Some(&max) = d.rejected.iter().next_back() {
        if max >= truth.len() {
            return Err(Error::DimensionMismatch { expected: max + 1, actual: truth.len() });
        }
    }
    let r = d.rejected.len();
    let v = d.rejected.iter().filter(|&&i| truth[i]).count();
    let fdp = if r == 0 { 0.0 } else { v as f64 / r as f64 };
    Ok((v, r, fdp))
}

/// Base constant family of a procedure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProcedureFamily {
    /// Benjamini–Hochberg constants rescaled by the associated matrix.
    Bh,
    /// Lehmann–Romano constants (FDP or kFWER form) rescaled by the associated matrix.
    Rs,
    /// Benjamini–Yekutieli step-up FDR procedure.
    By,
    /// Guo–Rao step-down FDR procedure.
    Gr,
}

impl ProcedureFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            ProcedureFamily::Bh => "bh",
            ProcedureFamily::Rs => "rs",
            ProcedureFamily::By => "by",
            ProcedureFamily::Gr => "gr",
        }
    }

    /// BY and GR control the FDR directly and have no associated matrix.
    pub fn is_fdr(self) -> bool {
        matches!(self, ProcedureFamily::By | ProcedureFamily::Gr)
    }
}

impl std::str::FromStr for ProcedureFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bh" => Ok(ProcedureFamily::Bh),
            "rs" | "lr" => Ok(ProcedureFamily::Rs),
            "by" => Ok(ProcedureFamily::By),
            "gr" => Ok(ProcedureFamily::Gr),
            other => Err(Error::InvalidParameter(format!("unknown family `{other}`"))),
        }
    }
}

/// Everything needed to turn a family of constants into a procedure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProcedureSpec {
    /// Error rate and direction. For BY and GR only the direction is used.
    pub rate: ErrorRate,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    pub family: ProcedureFamily,
    pub modified: bool,
    pub alpha: f64,
}

impl ProcedureSpec {
    /// Median-FDP style spec: `P(FDP > γ) <= α`.
    pub fn fdp(direction: Direction, n: usize, gamma: f64, family: ProcedureFamily, modified: bool, alpha: f64) -> Self {
        let rate = match direction {
            Direction::StepUp => ErrorRate::FdpSu,
            Direction::StepDown => ErrorRate::FdpSd,
        };
        ProcedureSpec { rate, n, k: None, gamma: Some(gamma), family, modified, alpha }
    }

    /// FDR procedure at level `q`: BY for step-up, GR for step-down.
    pub fn fdr(direction: Direction, n: usize, q: f64) -> Self {
        let (rate, family) = match direction {
            Direction::StepUp => (ErrorRate::FdpSu, ProcedureFamily::By),
            Direction::StepDown => (ErrorRate::FdpSd, ProcedureFamily::Gr),
        };
        ProcedureSpec { rate, n, k: None, gamma: None, family, modified: false, alpha: q }
    }

    pub fn direction(&self) -> Direction {
        self.rate.direction()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidProcedure(format!("alpha = {} must lie in (0, 1)", self.alpha)));
        }
        match (self.family, self.direction()) {
            (ProcedureFamily::By, Direction::StepDown) => {
                return Err(Error::InvalidProcedure("BY is a step-up procedure".into()))
            }
            (ProcedureFamily::Gr, Direction::StepUp) => {
                return Err(Error::InvalidProcedure("GR is a step-down procedure".into()))
            }
            _ => {}
        }
        if self.family.is_fdr() {
            if self.modified {
                return Err(Error::InvalidProcedure(format!(
                    "{} has no associated matrix and cannot be modified",
                    self.family.as_str().to_uppercase()
                )));
            }
            if self.n == 0 {
                return Err(Error::InvalidParameter("n must be at least 1".into()));
            }
            return Ok(());
        }
        self.matrix_spec().map(|_| ())
    }

    pub fn matrix_spec(&self) -> Result<ErrorRateSpec> {
        ErrorRateSpec::new(self.rate, self.n, self.k, self.gamma)
    }

    /// Short name such as `FDP-BH-SU (mod)` or `FDR-BY-SU`.
    pub fn name(&self) -> String {
        let rate = if self.family.is_fdr() {
            "FDR"
        } else if self.rate.is_kfwer() {
            "kFWER"
        } else {
            "FDP"
        };
        let base = format!(
            "{rate}-{}-{}",
            self.family.as_str().to_uppercase(),
            self.direction().abbrev()
        );
        if self.modified {
            format!("{base} (mod)")
        } else {
            base
        }
    }
}

impl fmt::Display for ProcedureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Feasible (unit-level) constants of a procedure, before multiplication by `α`.
/// Family constants are rescaled by `D = ‖A·c‖∞` and, if requested, replaced
/// by the LP-modified vector.
pub fn unit_constants(spec: &ProcedureSpec) -> Result<CriticalVector> {
    unit_constants_cached(spec, None)
}

/// [`unit_constants`] with the LP step served from `cache` when possible.
pub fn unit_constants_cached(spec: &ProcedureSpec, cache: Option<&SolutionCache>) -> Result<CriticalVector> {
    spec.validate()?;
    let n = spec.n;
    match spec.family {
        ProcedureFamily::By => return by_constants(n),
        ProcedureFamily::Gr => return gr_sd_constants(n),
        _ => {}
    }
    let mspec = spec.matrix_spec()?;
    let a = AssociatedMatrix::build(&mspec)?;
    let base = match (spec.family, mspec.k, mspec.gamma) {
        (ProcedureFamily::Bh, _, _) => bh_constants(n)?,
        (ProcedureFamily::Rs, Some(k), _) => lr_kfwer_constants(n, k)?,
        (ProcedureFamily::Rs, None, Some(g)) => lr_fdp_constants(n, g)?,
        _ => unreachable!("validated above"),
    };
    let (rescaled, _) = rescale(&base, &a)?;
    if !spec.modified {
        return Ok(rescaled);
    }
    let problem = lp::build_problem(&a, &rescaled, None)?;
    match cache {
        Some(cache) => Ok(cache.solve(&problem, spec.family.as_str())?.0.xi),
        None => Ok(lp::solve(&problem)?.xi),
    }
}

/// Applies a procedure to observed p-values. Adjusted p-values refer to the
/// unit-level constants, so `adjusted <= α` matches the decisions.
pub fn run_procedure(p: &PValueVector, spec: &ProcedureSpec) -> Result<(DecisionSet, AdjustedPValues)> {
    if p.len() != spec.n {
        return Err(Error::DimensionMismatch { expected: spec.n, actual: p.len() });
    }
    let unit = unit_constants(spec)?;
    run_with_constants(p, &unit, spec.alpha, spec.direction())
}

/// Same as [`run_procedure`] for precomputed unit-level constants.
pub fn run_with_constants(
    p: &PValueVector,
    unit: &CriticalVector,
    alpha: f64,
    direction: Direction,
) -> Result<(DecisionSet, AdjustedPValues)> {
    let scaled = unit.scaled(alpha)?;
    let decisions = apply(p, &scaled, direction)?;
    let adjusted = adjusted_pvalues(p, unit, direction)?;
    Ok((decisions, adjusted))
}
