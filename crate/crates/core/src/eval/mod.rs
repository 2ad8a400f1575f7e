//! Confusion matrices, accuracy metrics, and classification maps.

mod map;

pub use map::{palette_color, render_map, render_labels, PALETTE};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Counts indexed by `(true class, predicted class)` over the sorted set of
/// class ids that occur in either stream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    classes: Vec<u16>,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    /// Builds a matrix over explicit classes; `counts` is row-major.
    pub fn from_counts(classes: Vec<u16>, counts: Vec<u64>) -> Result<Self> {
        let c = classes.len();
        if counts.len() != c * c {
            return Err(Error::LengthMismatch {
                left: counts.len(),
                right: c * c,
            });
        }
        if classes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("class ids must be strictly increasing".into()));
        }
        if classes.contains(&0) {
            return Err(Error::Labels("class 0 is background".into()));
        }
        Ok(Self { classes, counts })
    }

    pub fn classes(&self) -> &[u16] {
        &self.classes
    }

    pub fn size(&self) -> usize {
        self.classes.len()
    }

    pub fn get(&self, truth: usize, predicted: usize) -> u64 {
        self.counts[truth * self.size() + predicted]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn row_sum(&self, c: usize) -> u64 {
        (0..self.size()).map(|j| self.get(c, j)).sum()
    }

    pub fn col_sum(&self, c: usize) -> u64 {
        (0..self.size()).map(|i| self.get(i, c)).sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.size()).map(|c| self.get(c, c)).sum()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.size()).all(|i| (0..self.size()).all(|j| i == j || self.get(i, j) == 0))
    }

    fn nonempty(&self) -> Result<f64> {
        match self.total() {
            0 => Err(Error::Empty),
            t => Ok(t as f64),
        }
    }
}

pub fn confusion(predicted: &[u16], truth: &[u16]) -> Result<ConfusionMatrix> {
    if predicted.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: predicted.len(),
            right: truth.len(),
        });
    }
    if predicted.contains(&0) || truth.contains(&0) {
        return Err(Error::Labels("label 0 (background) in evaluation streams".into()));
    }
    let mut classes: Vec<u16> = predicted.iter().chain(truth).copied().collect();
    classes.sort_unstable();
    classes.dedup();
    let c = classes.len();
    let mut counts = vec![0u64; c * c];
    let slot = |v: u16| classes.binary_search(&v).expect("class collected above");
    for (&p, &t) in predicted.iter().zip(truth) {
        counts[slot(t) * c + slot(p)] += 1;
    }
    Ok(ConfusionMatrix { classes, counts })
}

pub fn overall_accuracy(cm: &ConfusionMatrix) -> Result<f64> {
    Ok(cm.trace() as f64 / cm.nonempty()?)
}

/// Accuracy of each class in `cm.classes()` order; `None` for classes with no
/// true samples.
pub fn per_class_accuracy(cm: &ConfusionMatrix) -> Result<Vec<Option<f64>>> {
    cm.nonempty()?;
    Ok((0..cm.size())
        .map(|c| match cm.row_sum(c) {
            0 => None,
            n => Some(cm.get(c, c) as f64 / n as f64),
        })
        .collect())
}

/// Mean per-class accuracy over classes with nonzero support.
pub fn average_accuracy(cm: &ConfusionMatrix) -> Result<f64> {
    let ica: Vec<f64> = per_class_accuracy(cm)?.into_iter().flatten().collect();
    Ok(ica.iter().sum::<f64>() / ica.len() as f64)
}

/// Cohen's kappa. When chance agreement is 1 the value is 1 for perfect
/// agreement and undefined otherwise.
pub fn kappa(cm: &ConfusionMatrix) -> Result<f64> {
    let total = cm.nonempty()?;
    let p_o = cm.trace() as f64 / total;
    let p_e = (0..cm.size())
        .map(|c| cm.row_sum(c) as f64 * cm.col_sum(c) as f64)
        .sum::<f64>()
        / (total * total);
    if p_e >= 1.0 {
        return if cm.trace() == cm.total() {
            Ok(1.0)
        } else {
            Err(Error::UndefinedMetric("kappa with chance agreement 1".into()))
        };
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

/// One-vs-rest `TN / (TN + FP)` averaged over classes with `TN + FP > 0`.
pub fn specificity(cm: &ConfusionMatrix) -> Result<f64> {
    let total = cm.total();
    cm.nonempty()?;
    let mut sum = 0.0;
    let mut used = 0;
    for c in 0..cm.size() {
        let negatives = total - cm.row_sum(c);
        if negatives == 0 {
            continue;
        }
        let fp = cm.col_sum(c) - cm.get(c, c);
        sum += (negatives - fp) as f64 / negatives as f64;
        used += 1;
    }
    if used == 0 {
        return Err(Error::UndefinedMetric("specificity needs at least two true classes".into()));
    }
    Ok(sum / used as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub oa: f64,
    pub aa: f64,
    pub kappa: f64,
    pub specificity: f64,
    /// `(class id, accuracy)`; `None` when the class has no true samples.
    pub ica: Vec<(u16, Option<f64>)>,
}

impl Metrics {
    pub fn from_matrix(cm: &ConfusionMatrix) -> Result<Self> {
        Ok(Self {
            oa: overall_accuracy(cm)?,
            aa: average_accuracy(cm)?,
            kappa: kappa(cm)?,
            specificity: specificity(cm)?,
            ica: cm.classes().iter().copied().zip(per_class_accuracy(cm)?).collect(),
        })
    }

    pub fn from_streams(predicted: &[u16], truth: &[u16]) -> Result<Self> {
        Self::from_matrix(&confusion(predicted, truth)?)
    }
}
