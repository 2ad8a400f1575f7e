use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::rbf_unchecked;
use super::smo::solve_binary;
use super::{default_gamma, MinMaxScaler, SvmParams};
use crate::error::{Error, Result};

pub const MODEL_FORMAT: &str = "bandsel-svm";
pub const MODEL_VERSION: u32 = 1;

const TIE_EPS: f64 = 1e-12;

/// One pairwise machine. A nonnegative decision value votes for `positive`,
/// which is always the lower class id of the pair. Values within rounding
/// noise of zero count as zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryMachine {
    pub positive: u16,
    pub negative: u16,
    /// Support vectors in scaled feature space.
    pub support: Vec<Vec<f64>>,
    /// `α_i y_i` for each support vector.
    pub coef: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl BinaryMachine {
    /// Decision value for an already scaled sample.
    pub fn decision(&self, scaled: &[f64], gamma: f64) -> f64 {
        self.support
            .iter()
            .zip(&self.coef)
            .map(|(sv, &c)| c * rbf_unchecked(sv, scaled, gamma))
            .sum::<f64>()
            + self.bias
    }

    pub fn vote(&self, scaled: &[f64], gamma: f64) -> u16 {
        let scale: f64 = self.coef.iter().map(|c| c.abs()).sum::<f64>() + self.bias.abs();
        if self.decision(scaled, gamma) >= -TIE_EPS * scale {
            self.positive
        } else {
            self.negative
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub format: String,
    pub version: u32,
    pub c: f64,
    pub gamma: f64,
    pub tol: f64,
    /// Sorted class ids seen in training.
    pub classes: Vec<u16>,
    pub scaler: MinMaxScaler,
    /// Machines ordered by `(positive, negative)`.
    pub machines: Vec<BinaryMachine>,
}

impl SvmModel {
    /// Trains one machine per class pair on min–max scaled features.
    pub fn train(samples: &[Vec<f64>], labels: &[u16], params: &SvmParams) -> Result<Self> {
        params.validate()?;
        if samples.len() != labels.len() {
            return Err(Error::LengthMismatch {
                left: samples.len(),
                right: labels.len(),
            });
        }
        let scaler = MinMaxScaler::fit(samples)?;
        let scaled = samples
            .iter()
            .map(|s| scaler.transform(s))
            .collect::<Result<Vec<_>>>()?;
        let mut classes = labels.to_vec();
        classes.sort_unstable();
        classes.dedup();
        if classes.len() < 2 {
            return Err(Error::DegenerateGroundTruth(classes.len()));
        }
        let gamma = params.gamma.unwrap_or_else(|| default_gamma(&scaled));

        let pairs: Vec<(u16, u16)> = classes
            .iter()
            .enumerate()
            .flat_map(|(i, &a)| classes[i + 1..].iter().map(move |&b| (a, b)))
            .collect();
        let machines = pairs
            .par_iter()
            .map(|&(pos, neg)| train_pair(&scaled, labels, pos, neg, gamma, params))
            .collect::<Result<Vec<_>>>()?;

        Ok(Self {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            c: params.c,
            gamma,
            tol: params.tol,
            classes,
            scaler,
            machines,
        })
    }

    pub fn dims(&self) -> usize {
        self.scaler.dims()
    }

    /// Decision value of every machine, in machine order.
    pub fn decision_values(&self, sample: &[f64]) -> Result<Vec<f64>> {
        let scaled = self.scaler.transform(sample)?;
        Ok(self.machines.iter().map(|m| m.decision(&scaled, self.gamma)).collect())
    }

    /// Majority vote; ties go to the lower class id.
    pub fn predict(&self, sample: &[f64]) -> Result<u16> {
        let scaled = self.scaler.transform(sample)?;
        let mut votes = vec![0usize; self.classes.len()];
        for m in &self.machines {
            let winner = m.vote(&scaled, self.gamma);
            let slot = self.classes.binary_search(&winner).expect("machine classes are model classes");
            votes[slot] += 1;
        }
        let mut best = 0;
        for (i, &v) in votes.iter().enumerate() {
            if v > votes[best] {
                best = i;
            }
        }
        Ok(self.classes[best])
    }

    pub fn predict_many(&self, samples: &[Vec<f64>]) -> Result<Vec<u16>> {
        samples.par_iter().map(|s| self.predict(s)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: Self = serde_json::from_str(text)?;
        if model.format != MODEL_FORMAT {
            return Err(Error::InvalidParameter(format!("not a model file: format {:?}", model.format)));
        }
        if model.version != MODEL_VERSION {
            return Err(Error::InvalidParameter(format!(
                "unsupported model version {} (expected {MODEL_VERSION})",
                model.version
            )));
        }
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::io::write_atomic(path, self.to_json()?.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

fn train_pair(
    scaled: &[Vec<f64>],
    labels: &[u16],
    pos: u16,
    neg: u16,
    gamma: f64,
    params: &SvmParams,
) -> Result<BinaryMachine> {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (s, &l) in scaled.iter().zip(labels) {
        if l == pos || l == neg {
            x.push(s.clone());
            y.push(if l == pos { 1i8 } else { -1 });
        }
    }
    let max_iterations = params.max_passes.saturating_mul(x.len());
    let sol = solve_binary(&x, &y, params.c, gamma, params.tol, max_iterations)?;
    let balance: f64 = sol.alpha.iter().zip(&y).map(|(a, &yi)| a * f64::from(yi)).sum();
    debug_assert!(sol.alpha.iter().all(|&a| (0.0..=params.c).contains(&a)));
    debug_assert!(balance.abs() <= params.tol.max(1e-9) * params.c * x.len() as f64);

    let mut support = Vec::new();
    let mut coef = Vec::new();
    for ((xi, &yi), &a) in x.into_iter().zip(&y).zip(&sol.alpha) {
        if a > 0.0 {
            support.push(xi);
            coef.push(a * f64::from(yi));
        }
    }
    Ok(BinaryMachine {
        positive: pos,
        negative: neg,
        support,
        coef,
        bias: sol.bias,
        iterations: sol.iterations,
        converged: sol.converged,
    })
}
