//! Classical critical-constant families and rescaling.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrices::{self, check_gamma, floor_snapped, AssociatedMatrix};

/// Where a vector of critical constants came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Benjamini–Hochberg, `i/n`.
    Bh,
    /// Lehmann–Romano FDP constants.
    LrFdp,
    /// Lehmann–Romano kFWER constants.
    LrKfwer,
    /// Benjamini–Yekutieli, BH divided by the harmonic number.
    By,
    /// Guo–Rao step-down rescaling of BH.
    GrSd,
    Rescaled,
    Modified,
    Custom,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Bh => "bh",
            Family::LrFdp => "lr_fdp",
            Family::LrKfwer => "lr_kfwer",
            Family::By => "by",
            Family::GrSd => "gr_sd",
            Family::Rescaled => "rescaled",
            Family::Modified => "modified",
            Family::Custom => "custom",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Parameters recorded alongside a vector of constants.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConstantParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Family the vector was derived from, for rescaled and modified vectors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<Family>,
    /// Rescaling constant `D` that was divided out, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

/// A nondecreasing, nonnegative vector of critical constants `c_1 <= … <= c_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCriticalVector")]
pub struct CriticalVector {
    values: Vec<f64>,
    family: Family,
    #[serde(default)]
    params: ConstantParams,
}

#[derive(Deserialize)]
struct RawCriticalVector {
    values: Vec<f64>,
    family: Family,
    #[serde(default)]
    params: ConstantParams,
}

impl TryFrom<RawCriticalVector> for CriticalVector {
    type Error = Error;

    fn try_from(raw: RawCriticalVector) -> Result<Self> {
        CriticalVector::new(raw.values, raw.family, raw.params)
    }
}

impl CriticalVector {
    pub fn new(values: Vec<f64>, family: Family, params: ConstantParams) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidConstants("empty vector".into()));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidConstants(format!("c_{} = {v}", i + 1)));
        }
        if let Some(i) = values.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::InvalidConstants(format!(
                "c_{} = {} > c_{} = {}",
                i + 1,
                values[i],
                i + 2,
                values[i + 1]
            )));
        }
        Ok(CriticalVector { values, family, params })
    }

    pub fn custom(values: Vec<f64>) -> Result<Self> {
        Self::new(values, Family::Custom, ConstantParams::default())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> &ConstantParams {
        &self.params
    }

    /// Constant `c_i`, 1-based.
    pub fn get(&self, i: usize) -> f64 {
        self.values[i - 1]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    /// `α·c`, keeping the provenance and recording `α`.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::InvalidParameter(format!("scale factor {alpha} must be >= 0")));
        }
        let params = ConstantParams { alpha: Some(alpha), ..self.params };
        Self::new(self.values.iter().map(|v| v * alpha).collect(), self.family, params)
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidParameter("n must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `1 + 1/2 + … + 1/m`, summed from the smallest term.
pub fn harmonic(m: usize) -> f64 {
    (1..=m).rev().map(|j| 1.0 / j as f64).sum()
}

/// Benjamini–Hochberg constants `i/n`.
pub fn bh_constants(n: usize) -> Result<CriticalVector> {
    check_n(n)?;
    let values = (1..=n).map(|i| i as f64 / n as f64).collect();
    CriticalVector::new(values, Family::Bh, ConstantParams::default())
}

/// Lehmann–Romano FDP constants `(⌊γi⌋+1)/(n+⌊γi⌋+1−i)`.
pub fn lr_fdp_constants(n: usize, gamma: f64) -> Result<CriticalVector> {
    check_n(n)?;
    check_gamma(gamma)?;
    let values = (1..=n)
        .map(|i| {
            let m = floor_snapped(gamma * i as f64) + 1;
            m as f64 / (n + m - i) as f64
        })
        .collect();
    let params = ConstantParams { gamma: Some(gamma), ..Default::default() };
    CriticalVector::new(values, Family::LrFdp, params)
}

/// Lehmann–Romano kFWER constants `k/(n+k−i)` for `i >= k`, held at `k/n` below `k`.
pub fn lr_kfwer_constants(n: usize, k: usize) -> Result<CriticalVector> {
    check_n(n)?;
    if !(1..=n).contains(&k) {
        return Err(Error::InvalidParameter(format!("k = {k} must satisfy 1 <= k <= n = {n}")));
    }
    let values = (1..=n)
        .map(|i| if i >= k { k as f64 / (n + k - i) as f64 } else { k as f64 / n as f64 })
        .collect();
    let params = ConstantParams { k: Some(k), ..Default::default() };
    CriticalVector::new(values, Family::LrKfwer, params)
}

/// Benjamini–Yekutieli constants `(i/n)/H_n`.
pub fn by_constants(n: usize) -> Result<CriticalVector> {
    check_n(n)?;
    let d = harmonic(n);
    let values = (1..=n).map(|i| (i as f64 / n as f64) / d).collect();
    let params = ConstantParams { parent: Some(Family::Bh), scale: Some(d), ..Default::default() };
    CriticalVector::new(values, Family::By, params)
}

/// Normalizer of the Guo–Rao step-down FDR procedure:
/// `max_i (i/n){H_{n−i+1} + (n−i)/(n−i+1) − (n−i)/n}`.
pub fn gr_sd_normalizer(n: usize) -> f64 {
    let nf = n as f64;
    (1..=n)
        .map(|i| {
            let r = (n - i) as f64;
            (i as f64 / nf) * (harmonic(n - i + 1) + r / (r + 1.0) - r / nf)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Guo–Rao step-down constants: BH divided by [`gr_sd_normalizer`].
pub fn gr_sd_constants(n: usize) -> Result<CriticalVector> {
    check_n(n)?;
    let d = gr_sd_normalizer(n);
    let values = (1..=n).map(|i| (i as f64 / n as f64) / d).collect();
    let params = ConstantParams { parent: Some(Family::Bh), scale: Some(d), ..Default::default() };
    CriticalVector::new(values, Family::GrSd, params)
}

/// Divides `c` by `D = ‖A·c‖∞`, so that the result lies on the boundary of the
/// feasible set. Returns the rescaled vector and `D`.
pub fn rescale(c: &CriticalVector, a: &AssociatedMatrix) -> Result<(CriticalVector, f64)> {
    let d = matrices::max_bound(a, c)?;
    if d <= 0.0 {
        return Err(Error::ZeroBound);
    }
    let spec = a.spec();
    let params = ConstantParams {
        gamma: spec.gamma.or(c.params.gamma),
        k: spec.k.or(c.params.k),
        alpha: None,
        parent: Some(c.family),
        scale: Some(d),
    };
    let values = c.values.iter().map(|v| v / d).collect();
    Ok((CriticalVector::new(values, Family::Rescaled, params)?, d))
}
