//! Soft-margin RBF support vector machine trained by sequential minimal
//! optimization, with one-vs-one voting for multiclass problems.

mod grid;
mod kernel;
mod model;
mod smo;

pub use grid::{grid_search, stratified_folds};
pub use kernel::rbf_kernel;
pub use model::{BinaryMachine, SvmModel, MODEL_FORMAT, MODEL_VERSION};
pub use smo::{solve_binary, BinarySolution};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    /// Box constraint.
    pub c: f64,
    /// RBF width; `None` resolves to `1 / (d * mean feature variance)` on the
    /// scaled training features.
    pub gamma: Option<f64>,
    /// Stopping tolerance on the maximal KKT violation.
    pub tol: f64,
    /// Iteration cap, in multiples of the binary problem size.
    pub max_passes: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            c: 100.0,
            gamma: None,
            tol: 1e-3,
            max_passes: 1000,
        }
    }
}

impl SvmParams {
    pub fn with_c(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma);
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.c) {
            return Err(Error::InvalidParameter(format!("C must be positive, got {}", self.c)));
        }
        if let Some(g) = self.gamma {
            if !positive(g) {
                return Err(Error::InvalidParameter(format!("gamma must be positive, got {g}")));
            }
        }
        if !positive(self.tol) {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_passes == 0 {
            return Err(Error::InvalidParameter("max_passes must be positive".into()));
        }
        Ok(())
    }
}

/// Per-feature min–max scaling to `[0, 1]` fitted on training data.
/// Constant features map to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(samples: &[Vec<f64>]) -> Result<Self> {
        let d = samples.first().ok_or(Error::Empty)?.len();
        let mut min = vec![f64::INFINITY; d];
        let mut max = vec![f64::NEG_INFINITY; d];
        for (i, s) in samples.iter().enumerate() {
            if s.len() != d {
                return Err(Error::LengthMismatch { left: s.len(), right: d });
            }
            for (j, &v) in s.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite(i * d + j));
                }
                min[j] = min[j].min(v);
                max[j] = max[j].max(v);
            }
        }
        Ok(Self { min, max })
    }

    pub fn dims(&self) -> usize {
        self.min.len()
    }

    pub fn transform(&self, sample: &[f64]) -> Result<Vec<f64>> {
        if sample.len() != self.dims() {
            return Err(Error::LengthMismatch {
                left: sample.len(),
                right: self.dims(),
            });
        }
        Ok(sample
            .iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(&v, (&lo, &hi))| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 })
            .collect())
    }
}

/// `1 / (d * v)` with `v` the mean per-feature variance; `1 / d` when every
/// feature is constant.
pub fn default_gamma(scaled: &[Vec<f64>]) -> f64 {
    let d = scaled.first().map_or(1, Vec::len).max(1);
    let n = scaled.len() as f64;
    let mut total_var = 0.0;
    for j in 0..d {
        let mean = scaled.iter().map(|s| s[j]).sum::<f64>() / n;
        total_var += scaled.iter().map(|s| (s[j] - mean).powi(2)).sum::<f64>() / n;
    }
    let mean_var = total_var / d as f64;
    if mean_var > 0.0 {
        1.0 / (d as f64 * mean_var)
    } else {
        1.0 / d as f64
    }
}
