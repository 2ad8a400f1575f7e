//! Plug-in (maximum-likelihood) histogram estimators of information measures
//! over quantized streams, in bits.
//!
//! Joint histograms are keyed by the mixed-radix combination of the input
//! symbols. Key spaces of up to [`DENSE_CELLS`] cells are counted in a dense
//! table; larger spaces (typically band × band × class at 256 levels) are
//! counted by sorting the keys. The occupied-cell counts are summed in
//! ascending count order, so the result depends only on the multiset of
//! counts: both backends agree bit for bit, and permuting the arguments of a
//! joint entropy never changes its value.
//!
//! Mutual information is clamped at zero; interaction information is signed
//! and is never clamped.

mod pmf;

pub use pmf::{oracle_measures, JointPmf, OracleMeasures};

use crate::cube::QuantizedBand;
use crate::error::{Error, Result};

/// Largest key space counted with a dense table.
pub const DENSE_CELLS: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) enum Backend {
    Auto,
    Dense,
    Sorted,
}

fn check_len(a: &QuantizedBand, b: &QuantizedBand) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

/// `log2(n) - (1/n) Σ c log2 c` over occupied cells.
fn entropy_from_counts(counts: impl Iterator<Item = u64>, n: usize) -> f64 {
    let mut occupied: Vec<u64> = counts.filter(|&c| c > 0).collect();
    occupied.sort_unstable();
    let n = n as f64;
    let weighted: f64 = occupied
        .into_iter()
        .map(|c| {
            let c = c as f64;
            c * c.log2()
        })
        .sum();
    (n.log2() - weighted / n).max(0.0)
}

pub(crate) fn entropy_of_keys(keys: &[u64], space: u64, backend: Backend) -> Result<f64> {
    if keys.is_empty() {
        return Err(Error::Empty);
    }
    let dense = match backend {
        Backend::Auto => space <= DENSE_CELLS,
        Backend::Dense => true,
        Backend::Sorted => false,
    };
    if dense {
        let mut table = vec![0u64; space as usize];
        for &k in keys {
            table[k as usize] += 1;
        }
        Ok(entropy_from_counts(table.into_iter(), keys.len()))
    } else {
        let mut sorted = keys.to_vec();
        sorted.sort_unstable();
        let runs = sorted.chunk_by(|a, b| a == b).map(|run| run.len() as u64);
        Ok(entropy_from_counts(runs, keys.len()))
    }
}

fn keys2(x: &QuantizedBand, y: &QuantizedBand) -> (Vec<u64>, u64) {
    let ly = y.levels() as u64;
    let keys = x
        .symbols()
        .iter()
        .zip(y.symbols())
        .map(|(&a, &b)| u64::from(a) * ly + u64::from(b))
        .collect();
    (keys, x.levels() as u64 * ly)
}

fn keys3(x: &QuantizedBand, y: &QuantizedBand, z: &QuantizedBand) -> (Vec<u64>, u64) {
    let ly = y.levels() as u64;
    let lz = z.levels() as u64;
    let keys = x
        .symbols()
        .iter()
        .zip(y.symbols())
        .zip(z.symbols())
        .map(|((&a, &b), &c)| (u64::from(a) * ly + u64::from(b)) * lz + u64::from(c))
        .collect();
    (keys, x.levels() as u64 * ly * lz)
}

/// `H(X) = -Σ p log2 p` from symbol frequencies.
pub fn entropy(x: &QuantizedBand) -> Result<f64> {
    let keys: Vec<u64> = x.symbols().iter().map(|&s| u64::from(s)).collect();
    entropy_of_keys(&keys, x.levels() as u64, Backend::Auto)
}

pub fn joint_entropy(x: &QuantizedBand, y: &QuantizedBand) -> Result<f64> {
    check_len(x, y)?;
    let (keys, space) = keys2(x, y);
    entropy_of_keys(&keys, space, Backend::Auto)
}

pub fn joint_entropy3(x: &QuantizedBand, y: &QuantizedBand, z: &QuantizedBand) -> Result<f64> {
    joint_entropy3_with(x, y, z, Backend::Auto)
}

pub(crate) fn joint_entropy3_with(
    x: &QuantizedBand,
    y: &QuantizedBand,
    z: &QuantizedBand,
    backend: Backend,
) -> Result<f64> {
    check_len(x, y)?;
    check_len(x, z)?;
    let (keys, space) = keys3(x, y, z);
    entropy_of_keys(&keys, space, backend)
}

/// `MI(X,Y) = H(X) + H(Y) - H(X,Y)`, clamped at 0.
pub fn mutual_info(x: &QuantizedBand, y: &QuantizedBand) -> Result<f64> {
    check_len(x, y)?;
    Ok((entropy(x)? + entropy(y)? - joint_entropy(x, y)?).max(0.0))
}

/// `MI(X,Y) / min(H(X), H(Y))`; defined as 0 when either input is constant.
pub fn normalized_mi_min(x: &QuantizedBand, y: &QuantizedBand) -> Result<f64> {
    check_len(x, y)?;
    let floor = entropy(x)?.min(entropy(y)?);
    if floor <= 0.0 {
        return Ok(0.0);
    }
    Ok((mutual_info(x, y)? / floor).clamp(0.0, 1.0))
}

/// `(H(B) + H(GT)) / H(B, GT)`, in `[1, 2]`.
pub fn normalized_mi_joint(b: &QuantizedBand, gt: &QuantizedBand) -> Result<f64> {
    let joint = joint_entropy(b, gt)?;
    if joint <= 0.0 {
        return Err(Error::UndefinedMetric(
            "normalized MI of jointly constant inputs".into(),
        ));
    }
    Ok(((entropy(b)? + entropy(gt)?) / joint).clamp(1.0, 2.0))
}

/// `I((X,Y); C) = H(X,Y) + H(C) - H(X,Y,C)`, clamped at 0.
pub fn joint_pair_class_mi(x: &QuantizedBand, y: &QuantizedBand, c: &QuantizedBand) -> Result<f64> {
    check_len(x, y)?;
    check_len(x, c)?;
    Ok((joint_entropy(x, y)? + entropy(c)? - joint_entropy3(x, y, c)?).max(0.0))
}

/// Signed interaction information `I((X,Y);C) - MI(X,C) - MI(Y,C)`:
/// positive for synergy, negative for redundancy, zero for independence.
pub fn interaction_info(x: &QuantizedBand, y: &QuantizedBand, c: &QuantizedBand) -> Result<f64> {
    Ok(joint_pair_class_mi(x, y, c)? - (mutual_info(x, c)? + mutual_info(y, c)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(symbols: &[u16]) -> QuantizedBand {
        QuantizedBand::from_symbols(symbols.to_vec()).unwrap()
    }

    fn q_levels(levels: usize, symbols: &[u16]) -> QuantizedBand {
        QuantizedBand::new(levels, symbols.to_vec(), 0.0, 1.0).unwrap()
    }

    const EPS: f64 = 1e-12;

    #[test]
    fn entropy_examples() {
        assert!((entropy(&q(&[0, 1, 0, 1])).unwrap() - 1.0).abs() < EPS);
        assert_eq!(entropy(&q(&[3, 3, 3])).unwrap(), 0.0);
        // p = (0.25, 0.75): 0.25*2 + 0.75*log2(4/3)
        let expected = 0.5 + 0.75 * (4.0f64 / 3.0).log2();
        assert!((entropy(&q(&[0, 1, 1, 1])).unwrap() - expected).abs() < EPS);
        assert!((expected - 0.811278).abs() < 1e-6);
        assert!(matches!(entropy(&QuantizedBand::new(2, vec![], 0.0, 0.0).unwrap()), Err(Error::Empty)));
    }

    #[test]
    fn joint_entropy_examples() {
        let x = q(&[0, 1, 0, 1]);
        assert!((joint_entropy(&x, &x).unwrap() - 1.0).abs() < EPS);
        let y = q(&[0, 0, 1, 1]);
        assert!((joint_entropy(&x, &y).unwrap() - 2.0).abs() < EPS);
        // 0.4/0.1/0.1/0.4 over ten samples.
        let a = q(&[0, 0, 0, 0, 0, 1, 1, 1, 1, 1]);
        let b = q(&[0, 0, 0, 0, 1, 1, 1, 1, 1, 0]);
        let expected = -(2.0 * 0.4 * 0.4f64.log2() + 2.0 * 0.1 * 0.1f64.log2());
        assert!((joint_entropy(&a, &b).unwrap() - expected).abs() < EPS);
        assert!((expected - 1.721928).abs() < 1e-6);
        assert!(matches!(
            joint_entropy(&x, &q(&[0, 1])),
            Err(Error::LengthMismatch { left: 4, right: 2 })
        ));
    }

    #[test]
    fn mutual_info_examples() {
        let x = q(&[0, 1, 0, 1]);
        let y = q(&[0, 0, 1, 1]);
        assert!((mutual_info(&x, &x).unwrap() - 1.0).abs() < EPS);
        assert_eq!(mutual_info(&x, &y).unwrap(), 0.0);
        let a = q(&[0, 0, 0, 0, 0, 1, 1, 1, 1, 1]);
        let b = q(&[0, 0, 0, 0, 1, 1, 1, 1, 1, 0]);
        let mi = mutual_info(&a, &b).unwrap();
        assert!((mi - 0.278072).abs() < 1e-6);
        assert!((normalized_mi_min(&a, &b).unwrap() - mi).abs() < EPS);
        assert!((normalized_mi_joint(&a, &b).unwrap() - 1.161489).abs() < 1e-6);
    }

    #[test]
    fn normalized_measures_edge_cases() {
        let x = q(&[0, 1, 2, 1]);
        let y = q(&[0, 0, 1, 1]);
        let y2 = q(&[1, 0, 1, 0]);
        assert!((normalized_mi_min(&x, &x).unwrap() - 1.0).abs() < EPS);
        assert_eq!(normalized_mi_min(&y, &y2).unwrap(), 0.0);
        let constant = q_levels(2, &[0, 0, 0, 0]);
        assert_eq!(normalized_mi_min(&constant, &constant).unwrap(), 0.0);
        assert_eq!(normalized_mi_min(&constant, &x).unwrap(), 0.0);
        assert!((normalized_mi_joint(&y, &y).unwrap() - 2.0).abs() < EPS);
        assert!((normalized_mi_joint(&y, &y2).unwrap() - 1.0).abs() < EPS);
        assert!(normalized_mi_joint(&constant, &constant).is_err());
    }

    #[test]
    fn pair_class_and_interaction_examples() {
        let x = q(&[0, 0, 1, 1]);
        let y = q(&[0, 1, 0, 1]);
        let xor = q(&[0, 1, 1, 0]);
        assert!((joint_pair_class_mi(&x, &y, &xor).unwrap() - 1.0).abs() < EPS);
        assert!((interaction_info(&x, &y, &xor).unwrap() - 1.0).abs() < EPS);

        // c independent of (x, y): eight samples over all (x, y, c) triples.
        let x8 = q(&[0, 0, 0, 0, 1, 1, 1, 1]);
        let y8 = q(&[0, 0, 1, 1, 0, 0, 1, 1]);
        let c8 = q(&[0, 1, 0, 1, 0, 1, 0, 1]);
        assert_eq!(joint_pair_class_mi(&x8, &y8, &c8).unwrap(), 0.0);
        assert_eq!(interaction_info(&x8, &c8, &y8).unwrap(), 0.0);

        assert!((joint_pair_class_mi(&x, &x, &x).unwrap() - 1.0).abs() < EPS);
        assert!((interaction_info(&x, &x, &x).unwrap() + 1.0).abs() < EPS);
    }

    #[test]
    fn duplicate_input_is_pure_redundancy() {
        let x = q(&[0, 1, 2, 2, 1, 0, 3, 3, 1]);
        let c = q(&[0, 0, 1, 1, 1, 0, 1, 0, 0]);
        assert_eq!(interaction_info(&x, &x, &c).unwrap(), -mutual_info(&x, &c).unwrap());
    }

    #[test]
    fn dense_and_sorted_backends_agree_exactly() {
        let x = q_levels(50, &[3, 7, 7, 49, 0, 3, 12, 7, 3, 3, 0]);
        let y = q_levels(40, &[1, 1, 2, 39, 0, 1, 5, 2, 1, 0, 0]);
        let z = q_levels(30, &[0, 1, 1, 29, 0, 0, 2, 1, 0, 0, 1]);
        let dense = joint_entropy3_with(&x, &y, &z, Backend::Dense).unwrap();
        let sorted = joint_entropy3_with(&x, &y, &z, Backend::Sorted).unwrap();
        assert_eq!(dense.to_bits(), sorted.to_bits());
    }

    #[test]
    fn mutual_info_is_symmetric() {
        let x = q(&[0, 1, 2, 3, 1, 2, 0, 0, 3]);
        let y = q(&[1, 1, 0, 0, 1, 1, 0, 1, 0]);
        assert_eq!(mutual_info(&x, &y).unwrap(), mutual_info(&y, &x).unwrap());
    }
}
