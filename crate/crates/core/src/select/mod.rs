//! Greedy forward band selection.
//!
//! Every method starts from the band with the largest relevance
//! `MI(B_i, GT)`. Each later step scores all remaining bands with the
//! configured criterion and adds the maximizer (lowest index on ties). MRMS
//! and MIBF also maintain the running estimate `G_est`, reset to the first
//! band and updated as `(G_est + B*) / 2` after every pick, then quantized
//! afresh before the next step.

mod engine;
pub mod scores;

pub use engine::{select, select_prepared, BandTable};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Relevance ranking.
    Mim,
    /// Relevance ranking with an interaction-threshold redundancy filter.
    Mibf,
    Mifs,
    Mrmr,
    Nmifs,
    Jmi,
    Disr,
    /// Max relevance, max synergy.
    Mrms,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Mim,
        Method::Mibf,
        Method::Mifs,
        Method::Mrmr,
        Method::Nmifs,
        Method::Jmi,
        Method::Disr,
        Method::Mrms,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Mim => "mim",
            Method::Mibf => "mibf",
            Method::Mifs => "mifs",
            Method::Mrmr => "mrmr",
            Method::Nmifs => "nmifs",
            Method::Jmi => "jmi",
            Method::Disr => "disr",
            Method::Mrms => "mrms",
        }
    }

    /// Whether the method consults the running band-average estimate.
    pub fn uses_estimate(self) -> bool {
        matches!(self, Method::Mrms | Method::Mibf)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        Method::ALL
            .into_iter()
            .find(|m| m.name() == lower)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown method `{s}` (expected one of mim, mibf, mifs, mrmr, nmifs, jmi, disr, mrms)"
                ))
            })
    }
}

pub const DEFAULT_BETA: f64 = 0.5;
pub const DEFAULT_THRESHOLD: f64 = -0.02;
pub const DEFAULT_LEVELS: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct SelectorConfig {
    pub method: Method,
    pub k: usize,
    /// Redundancy weight for MIFS and NMIFS.
    pub beta: f64,
    /// MIBF rejects a candidate whose interaction with the estimate falls
    /// below this.
    pub threshold: f64,
    pub levels: usize,
}

impl SelectorConfig {
    pub fn new(method: Method, k: usize) -> Self {
        Self {
            method,
            k,
            beta: DEFAULT_BETA,
            threshold: DEFAULT_THRESHOLD,
            levels: DEFAULT_LEVELS,
        }
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn with_levels(mut self, levels: usize) -> Self {
        self.levels = levels;
        self
    }

    pub fn validate(&self, bands: usize) -> Result<()> {
        if self.k == 0 || self.k > bands {
            return Err(Error::InvalidParameter(format!(
                "k must be in 1..={bands}, got {}",
                self.k
            )));
        }
        if !(self.beta >= 0.0) || !self.beta.is_finite() {
            return Err(Error::InvalidParameter(format!("beta must be >= 0, got {}", self.beta)));
        }
        if self.threshold.is_nan() {
            return Err(Error::InvalidParameter("threshold is NaN".into()));
        }
        if self.levels == 0 || self.levels > crate::cube::MAX_LEVELS {
            return Err(Error::InvalidParameter(format!(
                "levels must be in 1..={}, got {}",
                crate::cube::MAX_LEVELS,
                self.levels
            )));
        }
        Ok(())
    }
}

/// One greedy step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub band: usize,
    /// Criterion value of the chosen band (its relevance for the first pick).
    pub score: f64,
    /// `MI(B*, GT)`.
    pub relevance: f64,
    /// `I(B*, G_est, GT)` for MRMS and MIBF steps after the first.
    pub interaction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionTrace {
    pub method: Method,
    pub levels: usize,
    pub steps: Vec<StepRecord>,
}

impl SelectionTrace {
    pub fn bands(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.band).collect()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Trace truncated to its first `k` steps.
    pub fn prefix(&self, k: usize) -> SelectionTrace {
        SelectionTrace {
            method: self.method,
            levels: self.levels,
            steps: self.steps.iter().take(k).cloned().collect(),
        }
    }
}
