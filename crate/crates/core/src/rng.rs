//! Seeded random streams.
//!
//! Every Monte Carlo loop draws from a [`RandomStream`] obtained with
//! [`substream`], so a result depends only on `(seed, index)` and never on
//! how work is scheduled across threads.

use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::scalar::{CVector, Real};

pub type RandomStream = ChaCha8Rng;

/// Independent stream number `index` under `seed`.
pub fn substream(seed: u64, index: u64) -> RandomStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Derives a child seed from a parent seed and a label, for nesting streams
/// (placement -> slot -> draw).
pub fn derive_seed(seed: u64, label: u64) -> u64 {
    // splitmix64 finalizer over the combined words
    let mut z = seed ^ label.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One draw of CN(0, 1).
#[inline]
pub fn complex_normal<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Complex::new(T::lit(re * s), T::lit(im * s))
}

/// One draw of CN(0, variance).
#[inline]
pub fn complex_normal_scaled<T: Real, R: Rng + ?Sized>(rng: &mut R, variance: T) -> Complex<T> {
    complex_normal::<T, R>(rng) * variance.sqrt()
}

/// A length-`n` vector of i.i.d. CN(0, 1) entries.
pub fn complex_normal_vector<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector<T> {
    CVector::from_fn(n, |_, _| complex_normal(rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substreams_are_reproducible_and_distinct() {
        let a: u64 = substream(7, 3).random();
        let b: u64 = substream(7, 3).random();
        let c: u64 = substream(7, 4).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn complex_normal_has_unit_power() {
        let mut rng = substream(1, 0);
        let n = 200_000;
        let power: f64 = (0..n)
            .map(|_| complex_normal::<f64, _>(&mut rng).norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((power - 1.0).abs() < 0.01, "power {power}");
    }
}
