use std::collections::HashMap;

use crate::error::{Error, Result};

/// `exp(-gamma * ||x - y||^2)`.
pub fn rbf_kernel(x: &[f64], y: &[f64], gamma: f64) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(rbf_unchecked(x, y, gamma))
}

#[inline]
pub(crate) fn rbf_unchecked(x: &[f64], y: &[f64], gamma: f64) -> f64 {
    let sq: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    (-gamma * sq).exp()
}

/// Kernel rows computed on demand and kept in a bounded least-recently-used
/// cache.
pub(crate) struct KernelRows<'a> {
    samples: &'a [Vec<f64>],
    gamma: f64,
    capacity: usize,
    rows: HashMap<usize, (u64, Vec<f64>)>,
    clock: u64,
}

/// Cache budget in matrix entries (~256 MiB of f64).
const CACHE_ENTRIES: usize = 32 << 20;

impl<'a> KernelRows<'a> {
    pub(crate) fn new(samples: &'a [Vec<f64>], gamma: f64) -> Self {
        let n = samples.len().max(1);
        Self {
            samples,
            gamma,
            capacity: (CACHE_ENTRIES / n).clamp(2, n.max(2)),
            rows: HashMap::new(),
            clock: 0,
        }
    }

    pub(crate) fn row(&mut self, i: usize) -> &[f64] {
        self.clock += 1;
        let clock = self.clock;
        if !self.rows.contains_key(&i) {
            if self.rows.len() >= self.capacity {
                let oldest = self
                    .rows
                    .iter()
                    .min_by_key(|(_, (used, _))| *used)
                    .map(|(&k, _)| k)
                    .expect("cache is nonempty");
                self.rows.remove(&oldest);
            }
            let xi = &self.samples[i];
            let row = self.samples.iter().map(|xj| rbf_unchecked(xi, xj, self.gamma)).collect();
            self.rows.insert(i, (clock, row));
        }
        let entry = self.rows.get_mut(&i).expect("just inserted");
        entry.0 = clock;
        &entry.1
    }
}
