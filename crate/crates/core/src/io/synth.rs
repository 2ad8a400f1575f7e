//! Synthetic cubes with planted class structure.
//!
//! Classes come from a balanced factorial design: with factor alphabet sizes
//! `f_0, f_1, …` every combination of factor values occurs equally often
//! (up to the remainder when the pixel count is not a multiple of the
//! product), pixels are shuffled, and the class id is `1 +` the mixed-radix
//! index of the combination. Factors are therefore exactly independent of one
//! another on the full raster.
//!
//! When the plan contains a synergy pair the factors are ignored and the
//! class is `1 + (a XOR b)` for the pair's bits `a`, `b`. The first bit is
//! exactly balanced; the second has a fixed number of ones inside each group
//! of the first, so the two are independent on the raster.
//!
//! Randomness comes from [`ShiftRng`] streams derived from the seed with the
//! tags `synth-classes`, `synth-synergy` and `synth-bands`.

use serde::{Deserialize, Serialize};

use crate::cube::{GroundTruth, HyperCube};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, ShiftRng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BandPlan {
    /// `scale` times the value of class factor `factor`, plus noise.
    Informative { factor: usize, scale: f64 },
    /// Copy of an earlier band plus noise.
    DuplicateOf(usize),
    /// One member of the synergy pair: a 0/1 band with the given fraction of
    /// ones. No noise is added.
    Synergy { ones_fraction: f64 },
    /// Independent fair 0/1 bits.
    Noise,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub rows: usize,
    pub cols: usize,
    /// Extra noise bands appended after the planned ones.
    pub noise_bands: usize,
    pub plan: Vec<BandPlan>,
    /// Standard deviation of the Gaussian noise on informative and duplicate
    /// bands.
    pub noise_level: f64,
    pub seed: u64,
    /// Alphabet size of each class factor.
    pub factors: Vec<usize>,
}

impl SynthSpec {
    pub fn bands(&self) -> usize {
        self.plan.len() + self.noise_bands
    }

    /// 10×10×20 cube: bands 3 and 4 form a synergy pair (band 3 balanced,
    /// band 4 with 24% ones, so band 3 alone carries about 0.2 bits about the
    /// class and band 4 none), bands 5 and 6 copy band 3, all others are noise.
    pub fn xor_benchmark(seed: u64) -> Self {
        let mut plan = vec![BandPlan::Noise; 3];
        plan.push(BandPlan::Synergy { ones_fraction: 0.5 });
        plan.push(BandPlan::Synergy { ones_fraction: 0.24 });
        plan.push(BandPlan::DuplicateOf(3));
        plan.push(BandPlan::DuplicateOf(3));
        Self {
            rows: 10,
            cols: 10,
            noise_bands: 13,
            plan,
            noise_level: 0.0,
            seed,
            factors: vec![],
        }
    }

    /// Four balanced classes planted in band 2 of eight; the rest is noise.
    pub fn informative(seed: u64) -> Self {
        let mut plan = vec![BandPlan::Noise; 2];
        plan.push(BandPlan::Informative { factor: 0, scale: 1.0 });
        Self {
            rows: 12,
            cols: 12,
            noise_bands: 5,
            plan,
            noise_level: 0.0,
            seed,
            factors: vec![4],
        }
    }

    /// Four balanced classes planted in all six bands with small Gaussian
    /// noise; linearly separable on any subset of bands.
    pub fn separable(seed: u64) -> Self {
        Self {
            rows: 12,
            cols: 12,
            noise_bands: 0,
            plan: (1..=6)
                .map(|s| BandPlan::Informative {
                    factor: 0,
                    scale: s as f64,
                })
                .collect(),
            noise_level: 0.02,
            seed,
            factors: vec![4],
        }
    }

    /// Twelve classes from factors of size 3, 2 and 2 planted in bands 0–2,
    /// five noise bands, then exact copies of bands 0–2 as bands 8–10.
    pub fn redundancy(seed: u64) -> Self {
        let mut plan = vec![
            BandPlan::Informative { factor: 0, scale: 1.0 },
            BandPlan::Informative { factor: 1, scale: 5.0 },
            BandPlan::Informative { factor: 2, scale: 20.0 },
        ];
        plan.extend(vec![BandPlan::Noise; 5]);
        plan.extend((0..3).map(BandPlan::DuplicateOf));
        Self {
            rows: 24,
            cols: 24,
            noise_bands: 0,
            plan,
            noise_level: 0.0,
            seed,
            factors: vec![3, 2, 2],
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.plan.is_empty() {
            return bad("synthetic plan is empty".into());
        }
        if self.rows == 0 || self.cols == 0 {
            return bad("synthetic raster needs positive dimensions".into());
        }
        if !(self.noise_level >= 0.0 && self.noise_level.is_finite()) {
            return bad(format!("noise level must be >= 0, got {}", self.noise_level));
        }
        let synergy = self.plan.iter().filter(|p| matches!(p, BandPlan::Synergy { .. })).count();
        let informative = self.plan.iter().any(|p| matches!(p, BandPlan::Informative { .. }));
        if synergy != 0 && synergy != 2 {
            return bad(format!("synergy bands come in a pair, found {synergy}"));
        }
        if synergy == 2 && informative {
            return bad("a plan cannot mix synergy and informative bands".into());
        }
        if synergy == 0 && self.factors.is_empty() {
            return bad("need class factors or a synergy pair".into());
        }
        if self.factors.iter().any(|&f| f < 2) {
            return bad("class factors need at least 2 values".into());
        }
        let classes: usize = self.factors.iter().product();
        if synergy == 0 && (classes > usize::from(u16::MAX) || classes > self.rows * self.cols) {
            return bad(format!("{classes} classes do not fit the raster"));
        }
        for (i, p) in self.plan.iter().enumerate() {
            match *p {
                BandPlan::Informative { factor, scale } => {
                    if factor >= self.factors.len() {
                        return bad(format!("band {i}: factor {factor} does not exist"));
                    }
                    if !scale.is_finite() {
                        return bad(format!("band {i}: scale must be finite"));
                    }
                }
                BandPlan::DuplicateOf(src) if src >= i => {
                    return bad(format!("band {i}: can only duplicate an earlier band"));
                }
                BandPlan::Synergy { ones_fraction } if !(0.0..=1.0).contains(&ones_fraction) => {
                    return bad(format!("band {i}: ones fraction outside [0, 1]"));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Indices `0..n` with exactly `ones` of them set, in random order.
fn exact_bits(n: usize, ones: usize, rng: &mut ShiftRng) -> Vec<bool> {
    let mut bits: Vec<bool> = (0..n).map(|i| i < ones).collect();
    rng.shuffle(&mut bits);
    bits
}

pub fn synth_cube(spec: &SynthSpec) -> Result<(HyperCube, GroundTruth)> {
    spec.validate()?;
    let n = spec.rows * spec.cols;
    let synergy_fractions: Vec<f64> = spec
        .plan
        .iter()
        .filter_map(|p| match p {
            BandPlan::Synergy { ones_fraction } => Some(*ones_fraction),
            _ => None,
        })
        .collect();

    let mut factor_values: Vec<Vec<usize>> = Vec::new();
    let mut synergy_bits: Vec<Vec<bool>> = Vec::new();
    let labels: Vec<u16> = if synergy_fractions.is_empty() {
        let classes: usize = spec.factors.iter().product();
        let mut design: Vec<usize> = (0..n).map(|i| i % classes).collect();
        ShiftRng::new(derive_seed(spec.seed, "synth-classes")).shuffle(&mut design);
        let mut radix = 1;
        for &f in spec.factors.iter().rev() {
            factor_values.push(design.iter().map(|&t| (t / radix) % f).collect());
            radix *= f;
        }
        factor_values.reverse();
        design.iter().map(|&t| t as u16 + 1).collect()
    } else {
        let mut rng = ShiftRng::new(derive_seed(spec.seed, "synth-synergy"));
        let a = exact_bits(n, (synergy_fractions[0] * n as f64).round() as usize, &mut rng);
        let mut b = vec![false; n];
        for group in [false, true] {
            let members: Vec<usize> = (0..n).filter(|&i| a[i] == group).collect();
            let ones = (synergy_fractions[1] * members.len() as f64).round() as usize;
            for (bit, &i) in exact_bits(members.len(), ones, &mut rng).into_iter().zip(&members) {
                b[i] = bit;
            }
        }
        let labels = a.iter().zip(&b).map(|(&x, &y)| 1 + u16::from(x ^ y)).collect();
        synergy_bits = vec![a, b];
        labels
    };

    let mut rng = ShiftRng::new(derive_seed(spec.seed, "synth-bands"));
    let mut bands: Vec<Vec<f32>> = Vec::with_capacity(spec.bands());
    let mut synergy_seen = 0;
    for p in &spec.plan {
        let band: Vec<f32> = match *p {
            BandPlan::Informative { factor, scale } => factor_values[factor]
                .iter()
                .map(|&v| (v as f64 * scale + spec.noise_level * rng.normal()) as f32)
                .collect(),
            BandPlan::DuplicateOf(src) => {
                let source = bands[src].clone();
                source
                    .iter()
                    .map(|&v| (f64::from(v) + spec.noise_level * rng.normal()) as f32)
                    .collect()
            }
            BandPlan::Synergy { .. } => {
                synergy_seen += 1;
                synergy_bits[synergy_seen - 1].iter().map(|&b| f32::from(u8::from(b))).collect()
            }
            BandPlan::Noise => noise_band(n, &mut rng),
        };
        bands.push(band);
    }
    for _ in 0..spec.noise_bands {
        bands.push(noise_band(n, &mut rng));
    }
    let cube = HyperCube::from_bands(spec.rows, spec.cols, &bands)?;
    let gt = GroundTruth::new(spec.rows, spec.cols, labels)?;
    Ok((cube, gt))
}

fn noise_band(n: usize, rng: &mut ShiftRng) -> Vec<f32> {
    (0..n).map(|_| f32::from(u8::from(rng.bernoulli(0.5)))).collect()
}
