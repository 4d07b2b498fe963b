//! Counter-based random numbers for reproducible, shard-independent
//! Monte Carlo.
//!
//! Ordinary sequential generators make parallel estimates depend on how the
//! sample range was split across threads.  Here every variate is a pure
//! function of `(seed, stream, index)`: the generator keeps no mutable state,
//! so sample `i` has the same value whether it is drawn first, last, or on
//! another thread.  The construction is the SplitMix64 output function
//! applied to a Weyl sequence with the golden-ratio increment, which is the
//! standard stateless form of that generator.

/// Golden-ratio increment of the Weyl sequence (`2^64 / phi`).
const WEYL: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A keyed, stateless generator: one instance per logical stream.
#[derive(Clone, Copy, Debug)]
pub struct CounterRng {
    key: u64,
}

impl CounterRng {
    /// Derive a stream key from a user seed and a stream label.  Distinct
    /// `(seed, stream)` pairs give statistically independent sequences.
    pub fn new(seed: u64, stream: u64) -> Self {
        let key = mix(seed ^ mix(stream.wrapping_mul(WEYL) ^ 0x6A09_E667_F3BC_C909));
        Self { key }
    }

    /// The `index`-th raw 64-bit word of the stream.
    #[inline]
    pub fn u64_at(&self, index: u64) -> u64 {
        mix(self.key.wrapping_add(index.wrapping_mul(WEYL)))
    }

    /// The `index`-th uniform variate in `[0, 1)` (53-bit resolution).
    #[inline]
    pub fn uniform_at(&self, index: u64) -> f64 {
        (self.u64_at(index) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// The `index`-th uniform variate in `[lo, hi)`.
    #[inline]
    pub fn uniform_in(&self, index: u64, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform_at(index)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_function_of_index() {
        let r = CounterRng::new(0x5EED, 3);
        let a: Vec<u64> = (0..16).map(|i| r.u64_at(i)).collect();
        let b: Vec<u64> = (0..16).rev().map(|i| r.u64_at(i)).collect();
        let b: Vec<u64> = b.into_iter().rev().collect();
        assert_eq!(a, b);
    }

    #[test]
    fn streams_differ() {
        let r0 = CounterRng::new(7, 0);
        let r1 = CounterRng::new(7, 1);
        let same = (0..256).filter(|&i| r0.u64_at(i) == r1.u64_at(i)).count();
        assert_eq!(same, 0);
    }

    #[test]
    fn seeds_differ() {
        let r0 = CounterRng::new(1, 0);
        let r1 = CounterRng::new(2, 0);
        let same = (0..256).filter(|&i| r0.u64_at(i) == r1.u64_at(i)).count();
        assert_eq!(same, 0);
    }

    #[test]
    fn uniform_moments_are_sane() {
        let r = CounterRng::new(0x5EED, 0);
        let n = 100_000u64;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for i in 0..n {
            let x = r.uniform_at(i);
            assert!((0.0..1.0).contains(&x));
            sum += x;
            sumsq += x * x;
        }
        let mean = sum / n as f64;
        let var = sumsq / n as f64 - mean * mean;
        // Exact values 1/2 and 1/12; tolerances ~ 5 sigma.
        assert!((mean - 0.5).abs() < 5.0 * (1.0f64 / 12.0 / n as f64).sqrt());
        assert!((var - 1.0 / 12.0).abs() < 0.002);
    }

    #[test]
    fn equidistribution_across_bins() {
        let r = CounterRng::new(42, 9);
        let mut bins = [0u32; 16];
        let n = 64_000;
        for i in 0..n {
            bins[(r.uniform_at(i) * 16.0) as usize] += 1;
        }
        // chi-square with 15 dof; 99.9% quantile ~ 37.7
        let expect = n as f64 / 16.0;
        let chi2: f64 = bins
            .iter()
            .map(|&c| (c as f64 - expect).powi(2) / expect)
            .sum();
        assert!(chi2 < 37.7, "chi2 = {chi2}");
    }

    #[test]
    fn output_words_are_frozen() {
        // Pin the mapping (seed, stream, index) -> word so that published
        // results remain reproducible across refactors.
        let r = CounterRng::new(0x5EED, 0);
        assert_eq!(r.u64_at(0), 11_685_410_699_560_856_042);
        assert_eq!(r.u64_at(1), 12_600_400_802_332_287_275);
        let r2 = CounterRng::new(1, 2);
        assert_eq!(r2.u64_at(0), 15_339_917_004_275_543_888);
    }
}
