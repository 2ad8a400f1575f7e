//! Explicit joint PMFs of one to three discrete variables and exact
//! information measures computed from their analytic definitions. Serves as
//! the reference the histogram estimators are checked against.

use crate::cube::QuantizedBand;
use crate::error::{Error, Result};

const NORMALIZATION_TOL: f64 = 1e-12;

/// Dense row-major probability table; the last variable varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    dims: Vec<usize>,
    probs: Vec<f64>,
}

impl JointPmf {
    pub fn new(dims: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if dims.is_empty() || dims.len() > 3 {
            return Err(Error::InvalidPmf(format!(
                "expected 1 to 3 variables, got {}",
                dims.len()
            )));
        }
        if dims.iter().any(|&d| d == 0 || d > crate::cube::MAX_LEVELS) {
            return Err(Error::InvalidPmf(format!("bad alphabet sizes {dims:?}")));
        }
        let cells: usize = dims.iter().product();
        if probs.len() != cells {
            return Err(Error::InvalidPmf(format!(
                "{} probabilities for {cells} cells",
                probs.len()
            )));
        }
        if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidPmf("negative or non-finite entry".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidPmf(format!("probabilities sum to {total}")));
        }
        Ok(Self { dims, probs })
    }

    /// Normalizes nonnegative integer counts.
    pub fn from_counts(dims: Vec<usize>, counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::InvalidPmf("all counts are zero".into()));
        }
        let mut probs = counts.iter().map(|&c| c as f64 / total as f64).collect::<Vec<_>>();
        // Renormalizing by an exact integer total can drift by an ulp per
        // cell; fold the residue into the largest cell.
        let drift = 1.0 - probs.iter().sum::<f64>();
        if let Some(max) = probs.iter_mut().max_by(|a, b| a.total_cmp(b)) {
            *max += drift;
        }
        Self::new(dims, probs)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn arity(&self) -> usize {
        self.dims.len()
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.dims[i + 1];
        }
        strides
    }

    fn unravel(&self, mut cell: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dims.len()];
        for (i, s) in self.strides().into_iter().enumerate() {
            idx[i] = cell / s;
            cell %= s;
        }
        idx
    }

    /// Marginal over the listed variables, in the listed order.
    pub fn marginal(&self, axes: &[usize]) -> Result<JointPmf> {
        if axes.is_empty() || axes.iter().any(|&a| a >= self.arity()) {
            return Err(Error::InvalidPmf(format!("bad marginal axes {axes:?}")));
        }
        let dims: Vec<usize> = axes.iter().map(|&a| self.dims[a]).collect();
        let mut out = vec![0.0; dims.iter().product()];
        for (cell, &p) in self.probs.iter().enumerate() {
            let idx = self.unravel(cell);
            let mut flat = 0;
            for (&a, &d) in axes.iter().zip(&dims) {
                flat = flat * d + idx[a];
            }
            out[flat] += p;
        }
        Ok(JointPmf { dims, probs: out })
    }

    /// `-Σ p log2 p` with `0 log 0 = 0`.
    pub fn entropy(&self) -> f64 {
        -self
            .probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.log2())
            .sum::<f64>()
    }

    fn marginal_entropy(&self, axes: &[usize]) -> Result<f64> {
        Ok(self.marginal(axes)?.entropy())
    }

    /// `Σ p(a,b) log2(p(a,b) / (p(a) p(b)))` between two groups of variables.
    fn divergence_mi(&self, a: &[usize], b: &[usize]) -> Result<f64> {
        let pa = self.marginal(a)?;
        let pb = self.marginal(b)?;
        let mut all = a.to_vec();
        all.extend_from_slice(b);
        let pab = self.marginal(&all)?;
        let nb: usize = pb.dims.iter().product();
        let mut total = 0.0;
        for (cell, &p) in pab.probs.iter().enumerate() {
            if p > 0.0 {
                let (ia, ib) = (cell / nb, cell % nb);
                total += p * (p / (pa.probs[ia] * pb.probs[ib])).log2();
            }
        }
        Ok(total)
    }

    /// One sample stream per variable whose empirical distribution is exactly
    /// this PMF. Requires `p * length` to be an integer for every cell.
    pub fn sample_streams(&self, length: usize) -> Result<Vec<QuantizedBand>> {
        let mut streams = vec![Vec::with_capacity(length); self.arity()];
        let mut emitted = 0usize;
        for (cell, &p) in self.probs.iter().enumerate() {
            let exact = p * length as f64;
            let count = exact.round();
            if (exact - count).abs() > 1e-9 {
                return Err(Error::InvalidPmf(format!(
                    "probability {p} is not a multiple of 1/{length}"
                )));
            }
            let idx = self.unravel(cell);
            for _ in 0..count as usize {
                for (stream, &s) in streams.iter_mut().zip(&idx) {
                    stream.push(s as u16);
                }
            }
            emitted += count as usize;
        }
        if emitted != length {
            return Err(Error::InvalidPmf(format!(
                "emitted {emitted} samples for length {length}"
            )));
        }
        streams
            .into_iter()
            .zip(&self.dims)
            .map(|(symbols, &levels)| QuantizedBand::new(levels, symbols, 0.0, (levels - 1) as f64))
            .collect()
    }
}

/// Exact information measures of a 1–3 variable PMF over variables
/// `(X, Y, Z)`. Fields that need more variables than present are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleMeasures {
    /// Marginal entropy of each variable.
    pub entropy: Vec<f64>,
    /// Entropy of the full joint.
    pub joint_entropy: f64,
    /// `H(X,Y)`.
    pub joint_entropy_xy: Option<f64>,
    /// `MI(X,Y)`, `MI(X,Z)`, `MI(Y,Z)` by divergence from independence.
    pub mi_xy: Option<f64>,
    pub mi_xz: Option<f64>,
    pub mi_yz: Option<f64>,
    /// `MI(X,Y) / min(H(X), H(Y))` (0 when the minimum is 0).
    pub normalized_mi_min_xy: Option<f64>,
    /// `(H(X) + H(Y)) / H(X,Y)`.
    pub normalized_mi_joint_xy: Option<f64>,
    /// `I((X,Y); Z)`.
    pub pair_class_mi: Option<f64>,
    /// Interaction via conditional entropies:
    /// `[H(X|Z)+H(Y|Z)-H(X,Y|Z)] - [H(X)+H(Y)-H(X,Y)]`, i.e.
    /// `I(X;Y|Z) - I(X;Y)`, positive for synergy.
    pub interaction_conditional: Option<f64>,
    /// Interaction via joint MI: `I((X,Y);Z) - MI(X,Z) - MI(Y,Z)`.
    pub interaction_joint: Option<f64>,
}

/// Computes every measure the estimators provide by direct summation.
pub fn oracle_measures(pmf: &JointPmf) -> Result<OracleMeasures> {
    let k = pmf.arity();
    let entropy = (0..k)
        .map(|a| pmf.marginal_entropy(&[a]))
        .collect::<Result<Vec<_>>>()?;
    let joint_entropy = pmf.entropy();
    let mut m = OracleMeasures {
        entropy,
        joint_entropy,
        joint_entropy_xy: None,
        mi_xy: None,
        mi_xz: None,
        mi_yz: None,
        normalized_mi_min_xy: None,
        normalized_mi_joint_xy: None,
        pair_class_mi: None,
        interaction_conditional: None,
        interaction_joint: None,
    };
    if k >= 2 {
        let hxy = pmf.marginal_entropy(&[0, 1])?;
        let mi_xy = pmf.divergence_mi(&[0], &[1])?;
        let floor = m.entropy[0].min(m.entropy[1]);
        m.joint_entropy_xy = Some(hxy);
        m.mi_xy = Some(mi_xy);
        m.normalized_mi_min_xy = Some(if floor > 0.0 { mi_xy / floor } else { 0.0 });
        m.normalized_mi_joint_xy = (hxy > 0.0).then(|| (m.entropy[0] + m.entropy[1]) / hxy);
    }
    if k == 3 {
        let mi_xz = pmf.divergence_mi(&[0], &[2])?;
        let mi_yz = pmf.divergence_mi(&[1], &[2])?;
        let pair = pmf.divergence_mi(&[0, 1], &[2])?;
        let hz = m.entropy[2];
        let h_x_given_z = pmf.marginal_entropy(&[0, 2])? - hz;
        let h_y_given_z = pmf.marginal_entropy(&[1, 2])? - hz;
        let h_xy_given_z = joint_entropy - hz;
        let hxy = m.joint_entropy_xy.expect("set for k >= 2");
        m.mi_xz = Some(mi_xz);
        m.mi_yz = Some(mi_yz);
        m.pair_class_mi = Some(pair);
        m.interaction_conditional = Some(
            (h_x_given_z + h_y_given_z - h_xy_given_z) - (m.entropy[0] + m.entropy[1] - hxy),
        );
        m.interaction_joint = Some(pair - mi_xz - mi_yz);
    }
    Ok(m)
}
