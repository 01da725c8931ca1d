//! Counter-based pseudo-random generator.
//!
//! Every experiment in this crate must replay bit-exactly from a 64-bit
//! seed, on any platform. The generator is a Weyl counter (increment
//! 0x9E3779B97F4A7C15, the 64-bit golden ratio) whose output is whitened
//! by two xor-multiply rounds (0xBF58476D1CE4E5B9, 0x94D049BB133111EB),
//! the SplitMix64 finalizer. State is one `u64`; the draw sequence is a
//! pure function of the seed.

use crate::scalar::Scalar;

const WEYL_INCREMENT: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX_MULT_1: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX_MULT_2: u64 = 0x94D0_49BB_1331_11EB;

/// Seeded, counter-based generator with reproducible draws.
#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
    cached_normal: Option<f64>,
}

impl Rng {
    /// Generator whose whole draw sequence is determined by `seed`.
    pub fn new(seed: u64) -> Self {
        Rng {
            state: seed,
            cached_normal: None,
        }
    }

    /// Independent stream derived from this generator's current position.
    pub fn split(&mut self) -> Rng {
        Rng::new(self.next_u64())
    }

    /// Next 64 uniformly distributed bits.
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(WEYL_INCREMENT);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(MIX_MULT_1);
        z = (z ^ (z >> 27)).wrapping_mul(MIX_MULT_2);
        z ^ (z >> 31)
    }

    /// Uniform draw in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 * SCALE
    }

    /// Uniform draw in `[lo, hi)`.
    pub fn uniform<T: Scalar>(&mut self, lo: T, hi: T) -> T {
        let u = self.next_f64();
        let lo64 = lo.to_f64_lossy();
        let hi64 = hi.to_f64_lossy();
        T::from_f64_lossy(lo64 + u * (hi64 - lo64))
    }

    /// Standard normal draw via the Box-Muller transform. Pairs are
    /// generated together and the second member cached, so draws stay a
    /// deterministic function of seed and call count.
    pub fn normal<T: Scalar>(&mut self) -> T {
        if let Some(v) = self.cached_normal.take() {
            return T::from_f64_lossy(v);
        }
        // 1 - u in (0, 1] keeps the log argument nonzero.
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.cached_normal = Some(r * theta.sin());
        T::from_f64_lossy(r * theta.cos())
    }

    /// Normal draw with the given mean and standard deviation.
    pub fn normal_scaled<T: Scalar>(&mut self, mean: T, std: T) -> T {
        mean + std * self.normal::<T>()
    }

    /// Integer draw uniform on `[0, bound)` by rejection, bias-free.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "below(0) is meaningless");
        let zone = u64::MAX - (u64::MAX - bound + 1) % bound;
        loop {
            let v = self.next_u64();
            if v <= zone {
                return v % bound;
            }
        }
    }

    /// Fisher-Yates shuffle driven by this generator.
    pub fn shuffle<E>(&mut self, items: &mut [E]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_sequence() {
        let mut a = Rng::new(42);
        let mut b = Rng::new(42);
        for _ in 0..10_000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn different_seeds_diverge() {
        let mut a = Rng::new(1);
        let mut b = Rng::new(2);
        let same = (0..100).filter(|_| a.next_u64() == b.next_u64()).count();
        assert_eq!(same, 0);
    }

    #[test]
    fn uniform_stays_in_range() {
        let mut rng = Rng::new(7);
        for _ in 0..10_000 {
            let v: f64 = rng.uniform(-0.25, 0.25);
            assert!((-0.25..0.25).contains(&v));
        }
    }

    #[test]
    fn normal_moments_are_sane() {
        let mut rng = Rng::new(11);
        let n = 100_000;
        let draws: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 1.0).abs() < 0.03, "var {var}");
    }

    #[test]
    fn below_is_unbiased_at_edges() {
        let mut rng = Rng::new(3);
        let mut counts = [0usize; 3];
        for _ in 0..30_000 {
            counts[rng.below(3) as usize] += 1;
        }
        for c in counts {
            assert!((c as f64 - 10_000.0).abs() < 500.0, "counts {counts:?}");
        }
    }

    #[test]
    fn f32_and_f64_draws_come_from_same_bits() {
        let mut a = Rng::new(5);
        let mut b = Rng::new(5);
        for _ in 0..100 {
            let x: f32 = a.uniform(0.0f32, 1.0f32);
            let y: f64 = b.uniform(0.0f64, 1.0f64);
            assert_eq!(x, y as f32);
        }
    }
}
