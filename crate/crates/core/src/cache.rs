//! On-disk cache of LP solutions, one JSON file per key.

use std::fs;
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::lp::{self, LpProblem, LpSolution, SolveOptions, SOLVER_VERSION};

/// Everything that determines a solved `ξ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheKey {
    pub rate: String,
    pub n: usize,
    pub k: Option<usize>,
    /// Bit pattern of `γ`, so that keys never depend on decimal formatting.
    pub gamma_bits: Option<u64>,
    pub floor_family: String,
    /// Hash of the floor values, the weights and the cap.
    pub inputs_sha256: String,
    pub solver: String,
}

impl CacheKey {
    pub fn for_problem(problem: &LpProblem, floor_family: &str) -> Self {
        let spec = problem.matrix().spec();
        let mut h = Sha256::new();
        for c in problem.floor().values() {
            h.update(c.to_le_bytes());
        }
        h.update(b"weights");
        for w in problem.weights() {
            h.update(w.to_le_bytes());
        }
        if let Some(cap) = problem.cap() {
            h.update(b"cap");
            h.update(cap.to_le_bytes());
        }
        CacheKey {
            rate: spec.rate.to_string(),
            n: spec.n,
            k: spec.k,
            gamma_bits: spec.gamma.map(f64::to_bits),
            floor_family: floor_family.to_string(),
            inputs_sha256: hex::encode(h.finalize()),
            solver: SOLVER_VERSION.to_string(),
        }
    }

    pub fn digest(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("key serializes");
        hex::encode(Sha256::digest(&canonical))
    }
}

#[derive(Serialize, Deserialize)]
struct Entry {
    key: CacheKey,
    solution: LpSolution,
}

#[derive(Clone, Debug)]
pub struct SolutionCache {
    dir: PathBuf,
}

impl SolutionCache {
    pub fn open(dir: impl AsRef<Path>) -> Result<Self> {
        fs::create_dir_all(dir.as_ref())?;
        Ok(SolutionCache { dir: dir.as_ref().to_path_buf() })
    }

    fn path(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(format!("{}.json", key.digest()))
    }

    /// Cached solution for `key`, if present and written by this solver version.
    pub fn get(&self, key: &CacheKey) -> Option<LpSolution> {
        let text = fs::read(self.path(key)).ok()?;
        let entry: Entry = serde_json::from_slice(&text).ok()?;
        (entry.key == *key && entry.key.solver == SOLVER_VERSION).then_some(entry.solution)
    }

    pub fn put(&self, key: &CacheKey, solution: &LpSolution) -> Result<()> {
        let entry = Entry { key: key.clone(), solution: solution.clone() };
        let tmp = self.dir.join(format!(".{}.tmp", key.digest()));
        fs::write(&tmp, serde_json::to_vec_pretty(&entry)?)?;
        fs::rename(tmp, self.path(key))?;
        Ok(())
    }

    /// Returns the cached solution or solves and stores it. The flag is true on a hit.
    pub fn solve(&self, problem: &LpProblem, floor_family: &str) -> Result<(LpSolution, bool)> {
        self.solve_with(problem, floor_family, SolveOptions::default())
    }

    pub fn solve_with(
        &self,
        problem: &LpProblem,
        floor_family: &str,
        options: SolveOptions,
    ) -> Result<(LpSolution, bool)> {
        let key = CacheKey::for_problem(problem, floor_family);
        if let Some(hit) = self.get(&key) {
            log::debug!("cache hit {}", key.digest());
            return Ok((hit, true));
        }
        let solution = lp::solve_with(problem, options, |_| ControlFlow::Continue(()))?;
        self.put(&key, &solution)?;
        Ok((solution, false))
    }
}
