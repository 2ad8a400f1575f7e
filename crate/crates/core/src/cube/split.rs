use std::collections::BTreeMap;

use super::{GroundTruth, LabeledPixels};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, ShiftRng};

/// Stratified train/test partition of the labeled pixels, as positions into
/// [`LabeledPixels`]. Both lists are sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub fraction: f64,
    pub seed: u64,
}

/// Per class, `max(1, round(fraction * n))` pixels go to training (capped at
/// `n - 1` so the test side is never empty); the rest go to test.
///
/// Classes are visited in ascending id order and each class's positions are
/// shuffled with a [`ShiftRng`] seeded by `derive_seed(seed, "split")`.
pub fn stratified_split(gt: &GroundTruth, fraction: f64, seed: u64) -> Result<Split> {
    split_labeled(&gt.labeled(), fraction, seed)
}

pub fn split_labeled(labeled: &LabeledPixels, fraction: f64, seed: u64) -> Result<Split> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "training fraction must be in (0, 1), got {fraction}"
        )));
    }
    if labeled.is_empty() {
        return Err(Error::NoLabeledPixels);
    }
    let mut by_class: BTreeMap<u16, Vec<usize>> = BTreeMap::new();
    for (i, &label) in labeled.labels().iter().enumerate() {
        by_class.entry(label).or_default().push(i);
    }
    if let Some((&class, members)) = by_class.iter().find(|(_, m)| m.len() < 2) {
        return Err(Error::ClassTooSmall {
            class,
            count: members.len(),
        });
    }

    let mut rng = ShiftRng::new(derive_seed(seed, "split"));
    let mut train = Vec::new();
    let mut test = Vec::new();
    for members in by_class.values_mut() {
        let n = members.len();
        let n_train = ((fraction * n as f64).round() as usize).clamp(1, n - 1);
        rng.shuffle(members);
        train.extend_from_slice(&members[..n_train]);
        test.extend_from_slice(&members[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(Split {
        train,
        test,
        fraction,
        seed,
    })
}
