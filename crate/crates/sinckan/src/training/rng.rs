//! Small deterministic PRNG.
//!
//! Initialization, batch sampling, and coordinate sampling all need draws
//! that are bit-stable across runs and toolchain updates, so the generator
//! is pinned here rather than pulled from a crate whose stream might change
//! between versions. SplitMix64 core, Box-Muller for normals.

#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
    cached_normal: Option<f64>,
}

impl Rng {
    pub fn seed_from(seed: u64) -> Self {
        Rng { state: seed, cached_normal: None }
    }

    /// Derive an independent stream for a named purpose.
    pub fn derive(seed: u64, stream: u64) -> Self {
        let mut r = Rng::seed_from(seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        // burn one output so nearby seeds decorrelate
        r.next_u64();
        r
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    #[inline]
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in [0, n).
    #[inline]
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        (self.next_u64() % n as u64) as usize
    }

    /// Standard normal via Box-Muller, one cached mate per pair.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.cached_normal.take() {
            return z;
        }
        let mut u1 = self.uniform();
        if u1 <= f64::MIN_POSITIVE {
            u1 = f64::MIN_POSITIVE;
        }
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        let (s, c) = theta.sin_cos();
        self.cached_normal = Some(r * s);
        r * c
    }

    /// `k` distinct indices from [0, n), uniform without replacement
    /// (partial Fisher-Yates over an index table).
    pub fn sample_distinct(&mut self, n: usize, k: usize, scratch: &mut Vec<usize>) -> Vec<usize> {
        debug_assert!(k <= n);
        scratch.clear();
        scratch.extend(0..n);
        let mut out = Vec::with_capacity(k);
        for i in 0..k {
            let j = i + self.below(n - i);
            scratch.swap(i, j);
            out.push(scratch[i]);
        }
        out
    }
}
