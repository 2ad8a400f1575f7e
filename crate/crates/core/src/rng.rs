//! Portable pseudo-random numbers.
//!
//! Every random draw in the crate (synthetic cubes, stratified splits, CV
//! folds) goes through [`ShiftRng`], an xorshift64* generator, so fixtures are
//! bit-identical across platforms and easy to re-implement elsewhere:
//!
//! * seeding: `state = splitmix64(seed)`, replaced by
//!   `0x9E3779B97F4A7C15` if that yields 0;
//! * step: `x ^= x >> 12; x ^= x << 25; x ^= x >> 27;`
//!   output `x * 0x2545F4914F6CDD1D` (wrapping);
//! * `uniform()` = `(next >> 11) * 2^-53`;
//! * `below(n)` = high 64 bits of the 128-bit product `next * n`;
//! * `normal()` = Box–Muller cosine branch on two uniforms `u1, u2` with
//!   `u1` replaced by `2^-53` when zero: `sqrt(-2 ln u1) * cos(2π u2)`.
//!
//! Sub-seeds are derived from a master seed and a purpose tag with
//! [`derive_seed`]: `splitmix64(seed ^ fnv1a64(tag))`.

const SPLITMIX_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const XORSHIFT_MULTIPLIER: u64 = 0x2545_F491_4F6C_DD1D;

/// One SplitMix64 finalization round applied to `x + gamma`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(SPLITMIX_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xCBF2_9CE4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01B3);
    }
    hash
}

/// Derives an independent sub-seed for one purpose (e.g. `"split"`).
pub fn derive_seed(seed: u64, tag: &str) -> u64 {
    splitmix64(seed ^ fnv1a64(tag.as_bytes()))
}

#[derive(Debug, Clone)]
pub struct ShiftRng {
    state: u64,
}

impl ShiftRng {
    pub fn new(seed: u64) -> Self {
        let state = match splitmix64(seed) {
            0 => SPLITMIX_GAMMA,
            s => s,
        };
        Self { state }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(XORSHIFT_MULTIPLIER)
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)`; `n` must be nonzero.
    pub fn below(&mut self, n: u64) -> u64 {
        ((u128::from(self.next_u64()) * u128::from(n)) >> 64) as u64
    }

    pub fn normal(&mut self) -> f64 {
        let mut u1 = self.uniform();
        if u1 == 0.0 {
            u1 = 1.0 / (1u64 << 53) as f64;
        }
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// In-place Fisher–Yates shuffle, walking from the last element down.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}
