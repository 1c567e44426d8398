//! Monte Carlo power study under equicorrelated Gaussian test statistics.
//!
//! Statistics are drawn as `T_i = √ρ·Z_0 + √(1−ρ)·Z_i + μ_i`, which has unit
//! variances and pairwise correlation `ρ`. The first `true_count` hypotheses
//! are true nulls (`μ_i = 0`), the rest have mean `d`. Two-sided p-values are
//! fed to every procedure of the roster, and per cell the study reports the
//! average power, `P(FDP > γ)` and the FDR.
//!
//! Replication `r` of a cell always draws from the same ChaCha stream, so a
//! study is reproducible bit for bit regardless of how many threads run it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::CriticalVector;
use crate::error::{Error, Result};
use crate::matrices::Direction;
use crate::procedures::{step_down_count, step_up_count, unit_constants, ProcedureFamily, ProcedureSpec};

/// Two-sided Gaussian p-value `2(1 − Φ(|t|))`, evaluated as `erfc(|t|/√2)`
/// to keep full relative accuracy in the tail.
pub fn two_sided_p(t: f64) -> f64 {
    libm::erfc(t.abs() / std::f64::consts::SQRT_2).min(1.0)
}

/// One draw of the `n` test statistics.
pub fn sample_statistics<R: rand::Rng + ?Sized>(
    n: usize,
    true_count: usize,
    d: f64,
    rho: f64,
    rng: &mut R,
) -> Vec<f64> {
    let common: f64 = StandardNormal.sample(rng);
    let shared = rho.sqrt() * common;
    let own = (1.0 - rho).sqrt();
    (0..n)
        .map(|i| {
            let z: f64 = StandardNormal.sample(rng);
            let mu = if i < true_count { 0.0 } else { d };
            shared + own * z + mu
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n: usize,
    /// Numbers of true null hypotheses to simulate.
    pub true_counts: Vec<usize>,
    /// Nonzero means of the false hypotheses.
    pub effects: Vec<f64>,
    pub rho: f64,
    pub reps: usize,
    /// Level of the FDP procedures; 0.5 is median-FDP control.
    pub alpha: f64,
    pub gamma: f64,
    /// Level of the FDR comparators.
    pub fdr_level: f64,
    pub seed: u64,
    pub procedures: Vec<ProcedureSpec>,
    /// Keep per-replication rejection counts in the report.
    #[serde(default)]
    pub trace: bool,
}

/// `{0, n/4, n/2, 3n/4, n}`, rounded and deduplicated.
pub fn default_true_counts(n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = [0.0, 0.25, 0.5, 0.75, 1.0]
        .iter()
        .map(|f| (f * n as f64).round() as usize)
        .collect();
    v.dedup();
    v
}

/// The eight FDP procedures (BH and RS, both directions, original and
/// modified) followed by FDR-BY-SU and FDR-GR-SD.
pub fn default_roster(n: usize, gamma: f64, alpha: f64, fdr_level: f64) -> Vec<ProcedureSpec> {
    let mut out = Vec::new();
    for direction in [Direction::StepUp, Direction::StepDown] {
        for family in [ProcedureFamily::Bh, ProcedureFamily::Rs] {
            for modified in [false, true] {
                out.push(ProcedureSpec::fdp(direction, n, gamma, family, modified, alpha));
            }
        }
    }
    out.push(ProcedureSpec::fdr(Direction::StepUp, n, fdr_level));
    out.push(ProcedureSpec::fdr(Direction::StepDown, n, fdr_level));
    out
}

impl SimConfig {
    /// Defaults of the reference study: `ρ = 1/2`, 20000 replications,
    /// median-FDP control at `γ = 0.05`, FDR comparators at 0.05.
    pub fn with_defaults(n: usize, seed: u64) -> Self {
        SimConfig {
            n,
            true_counts: default_true_counts(n),
            effects: vec![0.1, 1.0, 3.0],
            rho: 0.5,
            reps: 20_000,
            alpha: 0.5,
            gamma: 0.05,
            fdr_level: 0.05,
            seed,
            procedures: default_roster(n, 0.05, 0.5, 0.05),
            trace: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if let Some(t) = self.true_counts.iter().find(|&&t| t > self.n) {
            return bad(format!("true count {t} exceeds n = {}", self.n));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return bad(format!("rho = {} must lie in [0, 1)", self.rho));
        }
        if self.reps == 0 {
            return bad("reps must be at least 1".into());
        }
        if let Some(d) = self.effects.iter().find(|d| !d.is_finite()) {
            return bad(format!("effect {d} is not finite"));
        }
        if let Some(p) = self.procedures.iter().find(|p| p.n != self.n) {
            return bad(format!("procedure {} is configured for n = {}", p.name(), p.n));
        }
        Ok(())
    }
}

/// Estimates for one procedure in one cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimRow {
    pub n: usize,
    pub true_count: usize,
    pub d: f64,
    pub procedure: String,
    /// Mean proportion of false hypotheses rejected; `None` when every
    /// hypothesis is a true null.
    pub avg_power: Option<f64>,
    /// Empirical `P(FDP > γ)`.
    pub tail_fdp: f64,
    /// Mean FDP.
    pub fdr: f64,
    pub se_power: Option<f64>,
    pub se_tail_fdp: f64,
    pub se_fdr: f64,
}

/// Per-replication check that a modified procedure rejects everything its
/// original does.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContainmentCheck {
    pub n: usize,
    pub true_count: usize,
    pub d: f64,
    pub original: String,
    pub modified: String,
    pub violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProcedureFailure {
    pub procedure: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub true_count: usize,
    pub d: f64,
    pub rep: usize,
    pub procedure: String,
    pub rejections: usize,
    pub false_rejections: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub reps: usize,
    pub seed: u64,
    pub rows: Vec<SimRow>,
    pub containment: Vec<ContainmentCheck>,
    pub failures: Vec<ProcedureFailure>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceRow>>,
}

fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for replication `rep` of the cell `(n, true_count, d)`.
pub fn replication_rng(seed: u64, n: usize, true_count: usize, d: f64, rep: usize) -> ChaCha8Rng {
    let cell = mix64(mix64(mix64(n as u64) ^ true_count as u64) ^ d.to_bits());
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ cell);
    rng.set_stream(rep as u64);
    rng
}

struct Prepared {
    name: String,
    direction: Direction,
    thresholds: Vec<f64>,
}

struct RepOutcome {
    /// `(rejections, false rejections)` per procedure.
    counts: Vec<(usize, usize)>,
}

fn mean_and_se(xs: impl Iterator<Item = f64>, reps: usize) -> (f64, f64) {
    let values: Vec<f64> = xs.collect();
    let r = reps as f64;
    let mean = values.iter().sum::<f64>() / r;
    if reps < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (r - 1.0);
    (mean, (var / r).sqrt())
}

/// Runs the full study. Each procedure's constants are computed once; a
/// procedure whose constants cannot be computed is reported under
/// `failures` and skipped.
pub fn run_study(config: &SimConfig) -> Result<SimReport> {
    config.validate()?;
    let n = config.n;

    let constants: Vec<(ProcedureSpec, Result<CriticalVector>)> = config
        .procedures
        .par_iter()
        .map(|p| (*p, unit_constants(p).and_then(|c| c.scaled(p.alpha))))
        .collect();
    let mut prepared = Vec::new();
    let mut specs = Vec::new();
    let mut failures = Vec::new();
    for (spec, result) in constants {
        match result {
            Ok(c) => {
                prepared.push(Prepared {
                    name: spec.name(),
                    direction: spec.direction(),
                    thresholds: c.into_values(),
                });
                specs.push(spec);
            }
            Err(e) => failures.push(ProcedureFailure { procedure: spec.name(), message: e.to_string() }),
        }
    }
    let pairs: Vec<(usize, usize)> = specs
        .iter()
        .enumerate()
        .filter(|(_, s)| s.modified)
        .filter_map(|(m, s)| {
            specs
                .iter()
                .position(|o| !o.modified && ProcedureSpec { modified: true, ..*o } == *s)
                .map(|o| (o, m))
        })
        .collect();

    let mut rows = Vec::new();
    let mut containment = Vec::new();
    let mut trace = config.trace.then(Vec::new);
    for &d in &config.effects {
        for &true_count in &config.true_counts {
            let outcomes: Vec<RepOutcome> = (0..config.reps)
                .into_par_iter()
                .map(|rep| {
                    let mut rng = replication_rng(config.seed, n, true_count, d, rep);
                    let t = sample_statistics(n, true_count, d, config.rho, &mut rng);
                    let p: Vec<f64> = t.iter().map(|&x| two_sided_p(x)).collect();
                    let mut order: Vec<usize> = (0..n).collect();
                    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]).then(a.cmp(&b)));
                    let sorted: Vec<f64> = order.iter().map(|&i| p[i]).collect();
                    let counts = prepared
                        .iter()
                        .map(|proc| {
                            let k = match proc.direction {
                                Direction::StepUp => step_up_count(&sorted, &proc.thresholds),
                                Direction::StepDown => step_down_count(&sorted, &proc.thresholds),
                            };
                            let v = order[..k].iter().filter(|&&i| i < true_count).count();
                            (k, v)
                        })
                        .collect();
                    RepOutcome { counts }
                })
                .collect();

            let false_count = n - true_count;
            for (j, proc) in prepared.iter().enumerate() {
                let fdp = |o: &RepOutcome| {
                    let (r, v) = o.counts[j];
                    if r == 0 { 0.0 } else { v as f64 / r as f64 }
                };
                let (fdr, se_fdr) = mean_and_se(outcomes.iter().map(fdp), config.reps);
                let (tail, se_tail) = mean_and_se(
                    outcomes.iter().map(|o| if fdp(o) > config.gamma { 1.0 } else { 0.0 }),
                    config.reps,
                );
                let (avg_power, se_power) = if false_count == 0 {
                    (None, None)
                } else {
                    let (m, s) = mean_and_se(
                        outcomes.iter().map(|o| {
                            let (r, v) = o.counts[j];
                            (r - v) as f64 / false_count as f64
                        }),
                        config.reps,
                    );
                    (Some(m), Some(s))
                };
                rows.push(SimRow {
                    n,
                    true_count,
                    d,
                    procedure: proc.name.clone(),
                    avg_power,
                    tail_fdp: tail,
                    fdr,
                    se_power,
                    se_tail_fdp: se_tail,
                    se_fdr,
                });
            }
            for &(o, m) in &pairs {
                // Both rejection sets are prefixes of the same p-value order.
                let violations = outcomes.iter().filter(|r| r.counts[o].0 > r.counts[m].0).count();
                containment.push(ContainmentCheck {
                    n,
                    true_count,
                    d,
                    original: prepared[o].name.clone(),
                    modified: prepared[m].name.clone(),
                    violations,
                });
            }
            if let Some(trace) = trace.as_mut() {
                for (rep, o) in outcomes.iter().enumerate() {
                    for (proc, &(r, v)) in prepared.iter().zip(&o.counts) {
                        trace.push(TraceRow {
                            true_count,
                            d,
                            rep,
                            procedure: proc.name.clone(),
                            rejections: r,
                            false_rejections: v,
                        });
                    }
                }
            }
        }
    }
    Ok(SimReport { reps: config.reps, seed: config.seed, rows, containment, failures, trace })
}
