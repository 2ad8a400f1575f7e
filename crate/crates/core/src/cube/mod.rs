//! Hyperspectral cube, ground truth and the per-labeled-pixel views derived
//! from them.

mod estimate;
mod quantize;
mod split;

pub use estimate::EstimateBand;
pub use quantize::{quantize_band, quantize_estimate, quantize_values, QuantizedBand, MAX_LEVELS};
pub use split::{split_labeled, stratified_split, Split};

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Reflectance cube stored pixel-interleaved: value `(row, col, band)` lives
/// at `(row * cols + col) * bands + band`.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperCube {
    rows: usize,
    cols: usize,
    bands: usize,
    values: Vec<f32>,
}

impl HyperCube {
    pub fn new(rows: usize, cols: usize, bands: usize, values: Vec<f32>) -> Result<Self> {
        if rows == 0 || cols == 0 || bands == 0 {
            return Err(Error::Dimensions(format!(
                "cube dimensions must be positive, got {rows}x{cols}x{bands}"
            )));
        }
        let expected = rows * cols * bands;
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: expected,
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        Ok(Self {
            rows,
            cols,
            bands,
            values,
        })
    }

    /// Builds a cube from a generator called with `(row, col, band)`.
    pub fn from_fn(
        rows: usize,
        cols: usize,
        bands: usize,
        mut f: impl FnMut(usize, usize, usize) -> f32,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(rows * cols * bands);
        for r in 0..rows {
            for c in 0..cols {
                for b in 0..bands {
                    values.push(f(r, c, b));
                }
            }
        }
        Self::new(rows, cols, bands, values)
    }

    /// Builds a cube from per-band rasters, each of length `rows * cols`.
    pub fn from_bands(rows: usize, cols: usize, bands: &[Vec<f32>]) -> Result<Self> {
        let pixels = rows * cols;
        for band in bands {
            if band.len() != pixels {
                return Err(Error::LengthMismatch {
                    left: band.len(),
                    right: pixels,
                });
            }
        }
        let n_bands = bands.len();
        let mut values = vec![0.0; pixels * n_bands];
        for (b, band) in bands.iter().enumerate() {
            for (p, &v) in band.iter().enumerate() {
                values[p * n_bands + b] = v;
            }
        }
        Self::new(rows, cols, n_bands, values)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn bands(&self) -> usize {
        self.bands
    }

    pub fn pixels(&self) -> usize {
        self.rows * self.cols
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize, band: usize) -> f32 {
        self.values[(row * self.cols + col) * self.bands + band]
    }

    /// Spectrum of the pixel at row-major index `pixel`.
    pub fn spectrum(&self, pixel: usize) -> &[f32] {
        &self.values[pixel * self.bands..(pixel + 1) * self.bands]
    }

    pub fn check_band(&self, band: usize) -> Result<()> {
        if band >= self.bands {
            return Err(Error::BandOutOfRange {
                index: band,
                bands: self.bands,
            });
        }
        Ok(())
    }

    /// Values of one band at the given row-major pixel indices.
    pub fn band_values(&self, band: usize, pixels: &[usize]) -> Result<Vec<f64>> {
        self.check_band(band)?;
        Ok(pixels
            .iter()
            .map(|&p| f64::from(self.values[p * self.bands + band]))
            .collect())
    }

    /// Whole band as a row-major raster.
    pub fn band_raster(&self, band: usize) -> Result<Vec<f32>> {
        self.check_band(band)?;
        Ok(self.values.iter().skip(band).step_by(self.bands).copied().collect())
    }

    /// A cube with `sources` appended as extra bands, in the given order.
    pub fn with_appended_copies(&self, sources: &[usize]) -> Result<HyperCube> {
        let mut rasters = Vec::with_capacity(self.bands + sources.len());
        for b in 0..self.bands {
            rasters.push(self.band_raster(b)?);
        }
        for &s in sources {
            rasters.push(self.band_raster(s)?);
        }
        HyperCube::from_bands(self.rows, self.cols, &rasters)
    }

    /// Applies `f(band, value)` to every sample.
    pub fn map_values(&self, mut f: impl FnMut(usize, f32) -> f32) -> Result<HyperCube> {
        let bands = self.bands;
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| f(i % bands, v))
            .collect();
        HyperCube::new(self.rows, self.cols, self.bands, values)
    }
}

/// Per-pixel class labels; 0 marks unlabeled background.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    rows: usize,
    cols: usize,
    labels: Vec<u16>,
    class_names: Option<Vec<String>>,
}

impl GroundTruth {
    pub fn new(rows: usize, cols: usize, labels: Vec<u16>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimensions(format!(
                "ground truth dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if labels.len() != rows * cols {
            return Err(Error::LengthMismatch {
                left: labels.len(),
                right: rows * cols,
            });
        }
        Ok(Self {
            rows,
            cols,
            labels,
            class_names: None,
        })
    }

    pub fn with_class_names(mut self, names: Vec<String>) -> Self {
        self.class_names = Some(names);
        self
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn labels(&self) -> &[u16] {
        &self.labels
    }

    pub fn class_names(&self) -> Option<&[String]> {
        self.class_names.as_deref()
    }

    /// Sorted distinct nonzero labels.
    pub fn classes(&self) -> Vec<u16> {
        self.labels
            .iter()
            .copied()
            .filter(|&l| l != 0)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn check_matches(&self, cube: &HyperCube) -> Result<()> {
        if self.rows != cube.rows() || self.cols != cube.cols() {
            return Err(Error::Dimensions(format!(
                "ground truth is {}x{} but cube is {}x{}",
                self.rows,
                self.cols,
                cube.rows(),
                cube.cols()
            )));
        }
        Ok(())
    }

    /// Labeled pixels in row-major order.
    pub fn labeled(&self) -> LabeledPixels {
        let (pixels, labels) = self
            .labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l != 0)
            .map(|(p, &l)| (p, l))
            .unzip();
        LabeledPixels { pixels, labels }
    }
}

/// The labeled pixels of a ground truth in a fixed (row-major) order. Every
/// quantized band, estimate and split is indexed by position in this list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledPixels {
    pixels: Vec<usize>,
    labels: Vec<u16>,
}

impl LabeledPixels {
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    /// Row-major pixel index of each labeled pixel.
    pub fn pixels(&self) -> &[usize] {
        &self.pixels
    }

    pub fn labels(&self) -> &[u16] {
        &self.labels
    }

    pub fn classes(&self) -> Vec<u16> {
        self.labels
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// Class stream as symbols `0..C` (classes ranked by id).
    pub fn class_symbols(&self) -> Result<QuantizedBand> {
        if self.is_empty() {
            return Err(Error::NoLabeledPixels);
        }
        let classes = self.classes();
        let max_label = *classes.last().expect("nonempty");
        let mut rank = vec![0u16; usize::from(max_label) + 1];
        for (i, &c) in classes.iter().enumerate() {
            rank[usize::from(c)] = i as u16;
        }
        let symbols = self.labels.iter().map(|&l| rank[usize::from(l)]).collect();
        QuantizedBand::new(
            classes.len(),
            symbols,
            f64::from(classes[0]),
            f64::from(max_label),
        )
    }

    pub fn band_values(&self, cube: &HyperCube, band: usize) -> Result<Vec<f64>> {
        cube.band_values(band, &self.pixels)
    }

    pub fn quantize_band(&self, cube: &HyperCube, band: usize, levels: usize) -> Result<QuantizedBand> {
        if self.is_empty() {
            return Err(Error::NoLabeledPixels);
        }
        quantize_values(&self.band_values(cube, band)?, levels)
    }

    /// Feature rows for the given positions (into this list) restricted to `bands`.
    pub fn features(&self, cube: &HyperCube, positions: &[usize], bands: &[usize]) -> Result<Vec<Vec<f64>>> {
        for &b in bands {
            cube.check_band(b)?;
        }
        Ok(positions
            .iter()
            .map(|&i| {
                let spectrum = cube.spectrum(self.pixels[i]);
                bands.iter().map(|&b| f64::from(spectrum[b])).collect()
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cube() -> HyperCube {
        HyperCube::from_fn(2, 3, 4, |r, c, b| (r * 100 + c * 10 + b) as f32).unwrap()
    }

    #[test]
    fn cube_indexing_is_row_col_band() {
        let cube = small_cube();
        assert_eq!(cube.get(1, 2, 3), 123.0);
        assert_eq!(cube.spectrum(4), &[110.0, 111.0, 112.0, 113.0]);
        assert_eq!(cube.band_raster(2).unwrap(), vec![2.0, 12.0, 22.0, 102.0, 112.0, 122.0]);
    }

    #[test]
    fn cube_rejects_bad_input() {
        assert!(HyperCube::new(0, 1, 1, vec![]).is_err());
        assert!(HyperCube::new(1, 1, 2, vec![1.0]).is_err());
        assert!(matches!(
            HyperCube::new(1, 1, 2, vec![1.0, f32::NAN]),
            Err(Error::NonFinite(1))
        ));
        assert!(matches!(
            small_cube().band_values(4, &[0]),
            Err(Error::BandOutOfRange { index: 4, bands: 4 })
        ));
    }

    #[test]
    fn from_bands_round_trips_rasters() {
        let cube = small_cube();
        let rasters: Vec<_> = (0..4).map(|b| cube.band_raster(b).unwrap()).collect();
        assert_eq!(HyperCube::from_bands(2, 3, &rasters).unwrap(), cube);
        let extended = cube.with_appended_copies(&[1]).unwrap();
        assert_eq!(extended.bands(), 5);
        assert_eq!(extended.band_raster(4).unwrap(), cube.band_raster(1).unwrap());
    }

    #[test]
    fn labeled_pixels_skip_background() {
        let gt = GroundTruth::new(2, 3, vec![0, 2, 0, 5, 2, 0]).unwrap();
        let labeled = gt.labeled();
        assert_eq!(labeled.pixels(), &[1, 3, 4]);
        assert_eq!(labeled.labels(), &[2, 5, 2]);
        assert_eq!(gt.classes(), vec![2, 5]);
        let symbols = labeled.class_symbols().unwrap();
        assert_eq!(symbols.levels(), 2);
        assert_eq!(symbols.symbols(), &[0, 1, 0]);
    }

    #[test]
    fn ground_truth_dimension_check() {
        let gt = GroundTruth::new(3, 2, vec![1; 6]).unwrap();
        assert!(gt.check_matches(&small_cube()).is_err());
        let gt = GroundTruth::new(2, 3, vec![1; 6]).unwrap();
        assert!(gt.check_matches(&small_cube()).is_ok());
    }

    #[test]
    fn features_follow_band_order() {
        let cube = small_cube();
        let gt = GroundTruth::new(2, 3, vec![1, 0, 0, 0, 0, 2]).unwrap();
        let labeled = gt.labeled();
        let feats = labeled.features(&cube, &[1, 0], &[3, 0]).unwrap();
        assert_eq!(feats, vec![vec![123.0, 120.0], vec![3.0, 0.0]]);
    }
}
