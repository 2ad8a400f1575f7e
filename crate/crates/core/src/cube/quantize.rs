use super::{EstimateBand, GroundTruth, HyperCube};
use crate::error::{Error, Result};

/// Largest supported alphabet; symbols are stored as `u16`.
pub const MAX_LEVELS: usize = 1 << 16;

/// Relative guard added to the value range so the maximum lands inside the
/// top bin instead of on its upper edge.
const RANGE_GUARD: f64 = 1e-12;

/// A band (or estimate) reduced to `levels` discrete symbols, one per labeled
/// pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedBand {
    levels: usize,
    symbols: Vec<u16>,
    source_min: f64,
    source_max: f64,
}

impl QuantizedBand {
    pub fn new(levels: usize, symbols: Vec<u16>, source_min: f64, source_max: f64) -> Result<Self> {
        check_levels(levels)?;
        if let Some(&bad) = symbols.iter().find(|&&s| usize::from(s) >= levels) {
            return Err(Error::InvalidParameter(format!(
                "symbol {bad} outside alphabet of {levels} levels"
            )));
        }
        Ok(Self {
            levels,
            symbols,
            source_min,
            source_max,
        })
    }

    /// Symbols taken verbatim; the alphabet is `max + 1`.
    pub fn from_symbols(symbols: Vec<u16>) -> Result<Self> {
        let max = symbols.iter().copied().max().ok_or(Error::Empty)?;
        let levels = usize::from(max) + 1;
        Self::new(levels, symbols, 0.0, f64::from(max))
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn symbols(&self) -> &[u16] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn source_min(&self) -> f64 {
        self.source_min
    }

    pub fn source_max(&self) -> f64 {
        self.source_max
    }
}

fn check_levels(levels: usize) -> Result<()> {
    if levels == 0 || levels > MAX_LEVELS {
        return Err(Error::InvalidParameter(format!(
            "quantization levels must be in 1..={MAX_LEVELS}, got {levels}"
        )));
    }
    Ok(())
}

/// Uniform min–max binning: `floor((v - min) * L / (range * (1 + 1e-12)))`,
/// clamped to `[0, L-1]`. A constant input maps to symbol 0.
pub fn quantize_values(values: &[f64], levels: usize) -> Result<QuantizedBand> {
    check_levels(levels)?;
    if values.is_empty() {
        return Err(Error::NoLabeledPixels);
    }
    if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(pos));
    }
    let (min, max) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let range = max - min;
    let top = (levels - 1) as f64;
    let symbols = if range > 0.0 {
        let scale = levels as f64 / (range * (1.0 + RANGE_GUARD));
        values
            .iter()
            .map(|&v| ((v - min) * scale).floor().clamp(0.0, top) as u16)
            .collect()
    } else {
        vec![0; values.len()]
    };
    QuantizedBand::new(levels, symbols, min, max)
}

/// Quantizes one band over the labeled pixels of `gt`.
pub fn quantize_band(
    cube: &HyperCube,
    gt: &GroundTruth,
    band_index: usize,
    levels: usize,
) -> Result<QuantizedBand> {
    gt.check_matches(cube)?;
    cube.check_band(band_index)?;
    gt.labeled().quantize_band(cube, band_index, levels)
}

/// Quantizes an estimate over its own min–max range.
pub fn quantize_estimate(est: &EstimateBand, levels: usize) -> Result<QuantizedBand> {
    quantize_values(est.values(), levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Bin lookup by walking explicit half-open edges `min + i * width`.
    fn bin_by_edges(v: f64, min: f64, max: f64, levels: usize) -> u16 {
        if max == min {
            return 0;
        }
        let width = (max - min) * (1.0 + RANGE_GUARD) / levels as f64;
        let mut bin = 0;
        for i in 1..levels {
            if v >= min + i as f64 * width {
                bin = i;
            }
        }
        bin as u16
    }

    #[test]
    fn constant_band_is_all_zero() {
        let q = quantize_values(&[3.5; 10], 256).unwrap();
        assert!(q.symbols().iter().all(|&s| s == 0));
    }

    #[test]
    fn byte_values_bin_to_themselves() {
        let values: Vec<f64> = (0..=255).map(f64::from).collect();
        let q = quantize_values(&values, 256).unwrap();
        let expected: Vec<u16> = (0..=255).collect();
        assert_eq!(q.symbols(), expected.as_slice());
    }

    #[test]
    fn midpoint_falls_in_lower_bin() {
        let values = [0.0, 0.5, 1.0];
        let q = quantize_values(&values, 2).unwrap();
        assert_eq!(q.symbols(), &[0, 0, 1]);
        let by_edges: Vec<u16> = values.iter().map(|&v| bin_by_edges(v, 0.0, 1.0, 2)).collect();
        assert_eq!(by_edges, vec![0, 0, 1]);
    }

    #[test]
    fn estimate_of_two_binary_bands_has_three_symbols() {
        // Pixel averages of two {0,1} bands: 0, 0.5 and 1.
        let values = [0.0, 0.5, 1.0, 0.5, 0.0];
        let q = quantize_values(&values, 4).unwrap();
        assert_eq!(q.symbols(), &[0, 1, 3, 1, 0]);
    }

    #[test]
    fn rejects_bad_levels_and_empty_input() {
        assert!(quantize_values(&[1.0], 0).is_err());
        assert!(quantize_values(&[1.0], MAX_LEVELS + 1).is_err());
        assert!(matches!(quantize_values(&[], 4), Err(Error::NoLabeledPixels)));
    }

    #[test]
    fn quantize_band_uses_labeled_pixels_only() {
        let cube = HyperCube::new(1, 4, 1, vec![1000.0, 0.0, 1.0, 2.0]).unwrap();
        let gt = GroundTruth::new(1, 4, vec![0, 1, 1, 2]).unwrap();
        let q = quantize_band(&cube, &gt, 0, 3).unwrap();
        assert_eq!(q.symbols(), &[0, 1, 2]);
        assert_eq!(q.source_max(), 2.0);
        assert!(quantize_band(&cube, &gt, 1, 3).is_err());
        let empty = GroundTruth::new(1, 4, vec![0; 4]).unwrap();
        assert!(matches!(quantize_band(&cube, &empty, 0, 3), Err(Error::NoLabeledPixels)));
    }

    proptest! {
        #[test]
        fn binning_matches_edge_enumeration(
            values in prop::collection::vec(-1e3f64..1e3, 1..40),
            levels in 1usize..20,
        ) {
            let q = quantize_values(&values, levels).unwrap();
            let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            for (v, &s) in values.iter().zip(q.symbols()) {
                let e = bin_by_edges(*v, min, max, levels);
                // Edge arithmetic and the scaled floor may disagree by one
                // only for values sitting on an edge to within rounding.
                prop_assert!((i32::from(s) - i32::from(e)).abs() <= 1);
                prop_assert!(usize::from(s) < levels);
            }
        }

        #[test]
        fn binning_is_monotone(
            values in prop::collection::vec(-1e6f64..1e6, 2..60),
            levels in 1usize..300,
        ) {
            let q = quantize_values(&values, levels).unwrap();
            let mut pairs: Vec<(f64, u16)> = values.iter().copied().zip(q.symbols().iter().copied()).collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            for w in pairs.windows(2) {
                prop_assert!(w[0].1 <= w[1].1);
            }
        }
    }
}
