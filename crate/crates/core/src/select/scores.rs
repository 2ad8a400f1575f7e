//! Scoring criteria, each evaluated from scratch for one candidate band.
//!
//! The greedy driver keeps running sums instead of recomputing these, but it
//! accumulates the same per-term quantities in the same order, so its scores
//! agree with these functions exactly.

use crate::cube::{quantize_estimate, EstimateBand, QuantizedBand};
use crate::error::Result;
use crate::info::{
    interaction_info, joint_entropy3, joint_pair_class_mi, mutual_info, normalized_mi_min,
};

/// Relevance `MI(b, gt)`.
pub fn score_mim(b: &QuantizedBand, gt: &QuantizedBand) -> Result<f64> {
    mutual_info(b, gt)
}

fn redundancy_sum(b: &QuantizedBand, selected: &[&QuantizedBand]) -> Result<f64> {
    selected.iter().try_fold(0.0, |acc, s| Ok(acc + mutual_info(b, s)?))
}

/// `MI(b, gt) - beta * Σ_s MI(b, s)`.
pub fn score_mifs(b: &QuantizedBand, gt: &QuantizedBand, selected: &[&QuantizedBand], beta: f64) -> Result<f64> {
    Ok(score_mim(b, gt)? - beta * redundancy_sum(b, selected)?)
}

/// `MI(b, gt) - (1/|S|) Σ_s MI(b, s)`; plain relevance when `S` is empty.
pub fn score_mrmr(b: &QuantizedBand, gt: &QuantizedBand, selected: &[&QuantizedBand]) -> Result<f64> {
    let relevance = score_mim(b, gt)?;
    if selected.is_empty() {
        return Ok(relevance);
    }
    Ok(relevance - redundancy_sum(b, selected)? / selected.len() as f64)
}

/// `MI(b, gt) - beta * Σ_s NI(b, s)` with `NI = MI / min(H(b), H(s))`.
pub fn score_nmifs(b: &QuantizedBand, gt: &QuantizedBand, selected: &[&QuantizedBand], beta: f64) -> Result<f64> {
    let penalty = selected
        .iter()
        .try_fold(0.0, |acc, s| Ok::<_, crate::Error>(acc + normalized_mi_min(b, s)?))?;
    Ok(score_mim(b, gt)? - beta * penalty)
}

/// `Σ_s I((b, s); gt)`; relevance when `S` is empty.
pub fn score_jmi(b: &QuantizedBand, gt: &QuantizedBand, selected: &[&QuantizedBand]) -> Result<f64> {
    if selected.is_empty() {
        return score_mim(b, gt);
    }
    selected
        .iter()
        .try_fold(0.0, |acc, s| Ok(acc + joint_pair_class_mi(b, s, gt)?))
}

/// Symmetric relevance of one pair: `I((b, s); gt) / H(b, s, gt)`, 0 when the
/// triple is jointly constant.
pub fn disr_term(b: &QuantizedBand, s: &QuantizedBand, gt: &QuantizedBand) -> Result<f64> {
    let joint = joint_entropy3(b, s, gt)?;
    if joint <= 0.0 {
        return Ok(0.0);
    }
    Ok(joint_pair_class_mi(b, s, gt)? / joint)
}

/// `Σ_s I((b, s); gt) / H(b, s, gt)`; `MI(b, gt) / H(b, gt)` when `S` is empty.
pub fn score_disr(b: &QuantizedBand, gt: &QuantizedBand, selected: &[&QuantizedBand]) -> Result<f64> {
    if selected.is_empty() {
        let joint = crate::info::joint_entropy(b, gt)?;
        return Ok(if joint > 0.0 { score_mim(b, gt)? / joint } else { 0.0 });
    }
    selected
        .iter()
        .try_fold(0.0, |acc, s| Ok(acc + disr_term(b, s, gt)?))
}

/// MRMS against an already quantized estimate:
/// `MI(b, gt) + I(b, est, gt)`.
pub fn score_mrms_quantized(b: &QuantizedBand, gt: &QuantizedBand, est: &QuantizedBand) -> Result<f64> {
    Ok(score_mim(b, gt)? + interaction_info(b, est, gt)?)
}

/// MRMS: relevance plus interaction information with the running estimate,
/// which is re-quantized to `levels` first.
pub fn score_mrms(b: &QuantizedBand, gt: &QuantizedBand, est: &EstimateBand, levels: usize) -> Result<f64> {
    score_mrms_quantized(b, gt, &quantize_estimate(est, levels)?)
}

/// Outcome of the MIBF redundancy test for one candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MibfDecision {
    pub accepted: bool,
    /// Relevance `MI(b, gt)`; candidates are ranked by it.
    pub score: f64,
    pub interaction: f64,
}

pub fn mibf_decision_quantized(
    b: &QuantizedBand,
    gt: &QuantizedBand,
    est: &QuantizedBand,
    threshold: f64,
) -> Result<MibfDecision> {
    let interaction = interaction_info(b, est, gt)?;
    Ok(MibfDecision {
        accepted: !(interaction < threshold),
        score: score_mim(b, gt)?,
        interaction,
    })
}

/// Rejects the candidate when `I(b, est, gt) < threshold`.
pub fn score_mibf(
    b: &QuantizedBand,
    gt: &QuantizedBand,
    est: &EstimateBand,
    levels: usize,
    threshold: f64,
) -> Result<MibfDecision> {
    mibf_decision_quantized(b, gt, &quantize_estimate(est, levels)?, threshold)
}
