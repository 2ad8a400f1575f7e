use super::{HyperCube, LabeledPixels};
use crate::error::{Error, Result};

/// Running pixel-wise average of the selected bands, held in raw values over
/// the labeled pixels. Each update halves the existing weights and gives the
/// new band weight 1/2.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateBand {
    values: Vec<f64>,
    weights: Vec<(usize, f64)>,
}

impl EstimateBand {
    /// Starts the estimate from a single band's values.
    pub fn from_values(band: usize, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::NoLabeledPixels);
        }
        Ok(Self {
            values,
            weights: vec![(band, 1.0)],
        })
    }

    pub fn init(cube: &HyperCube, labeled: &LabeledPixels, band: usize) -> Result<Self> {
        Self::from_values(band, labeled.band_values(cube, band)?)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Weight carried by each contributing band, in selection order.
    pub fn weights(&self) -> &[(usize, f64)] {
        &self.weights
    }

    /// `est <- (est + band) / 2`, pixel-wise.
    pub fn update_with_values(&mut self, band: usize, values: &[f64]) -> Result<()> {
        if values.len() != self.values.len() {
            return Err(Error::LengthMismatch {
                left: self.values.len(),
                right: values.len(),
            });
        }
        for (e, &v) in self.values.iter_mut().zip(values) {
            *e = (*e + v) / 2.0;
        }
        for (_, w) in &mut self.weights {
            *w /= 2.0;
        }
        self.weights.push((band, 0.5));
        Ok(())
    }

    pub fn update(&self, cube: &HyperCube, labeled: &LabeledPixels, band: usize) -> Result<EstimateBand> {
        let mut next = self.clone();
        next.update_with_values(band, &labeled.band_values(cube, band)?)?;
        Ok(next)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::GroundTruth;

    #[test]
    fn averaging_with_itself_is_a_fixed_point() {
        let values = vec![0.25, 3.0, -7.5];
        let mut est = EstimateBand::from_values(0, values.clone()).unwrap();
        est.update_with_values(0, &values).unwrap();
        assert_eq!(est.values(), values.as_slice());
    }

    #[test]
    fn zero_estimate_halves_the_band() {
        let mut est = EstimateBand::from_values(0, vec![0.0; 3]).unwrap();
        est.update_with_values(1, &[2.0, 4.0, -6.0]).unwrap();
        assert_eq!(est.values(), &[1.0, 2.0, -3.0]);
    }

    #[test]
    fn three_step_weights_unroll_the_recursion() {
        let b1 = vec![1.0, 0.0];
        let b2 = vec![0.0, 8.0];
        let b3 = vec![4.0, 4.0];
        let mut est = EstimateBand::from_values(1, b1.clone()).unwrap();
        est.update_with_values(2, &b2).unwrap();
        est.update_with_values(3, &b3).unwrap();
        assert_eq!(est.weights(), &[(1, 0.25), (2, 0.25), (3, 0.5)]);
        for p in 0..2 {
            assert_eq!(est.values()[p], 0.25 * b1[p] + 0.25 * b2[p] + 0.5 * b3[p]);
        }
    }

    #[test]
    fn weights_stay_convex_for_eight_steps() {
        let mut est = EstimateBand::from_values(0, vec![1.0]).unwrap();
        for step in 1..8 {
            est.update_with_values(step, &[step as f64]).unwrap();
            // Dyadic weights are exact in binary floating point.
            let total: f64 = est.weights().iter().map(|(_, w)| w).sum();
            assert_eq!(total, 1.0);
            let expected: f64 = est
                .weights()
                .iter()
                .map(|&(b, w)| w * if b == 0 { 1.0 } else { b as f64 })
                .sum();
            assert!((est.values()[0] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn update_checks_dimensions() {
        let mut est = EstimateBand::from_values(0, vec![1.0, 2.0]).unwrap();
        assert!(matches!(
            est.update_with_values(1, &[1.0]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn update_from_cube_ignores_background() {
        let cube = HyperCube::new(1, 3, 2, vec![9.0, 9.0, 1.0, 3.0, 2.0, 6.0]).unwrap();
        let gt = GroundTruth::new(1, 3, vec![0, 1, 2]).unwrap();
        let labeled = gt.labeled();
        let est = EstimateBand::init(&cube, &labeled, 0).unwrap();
        let est = est.update(&cube, &labeled, 1).unwrap();
        assert_eq!(est.values(), &[2.0, 4.0]);
    }
}
