//! Deterministic uniform sources.
//!
//! Every mechanism draws its randomness through [`UniformSource`], which
//! yields reals in the open interval (0, 1). [`RngStream`] is the seeded
//! production source; [`ScriptedUniforms`] replays a fixed list of draws so
//! closed-form examples can be checked exactly.

use alloc::vec::Vec;

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

/// Source of uniform reals in the open interval (0, 1).
pub trait UniformSource {
    fn next_open01(&mut self) -> f64;
}

impl<U: UniformSource + ?Sized> UniformSource for &mut U {
    fn next_open01(&mut self) -> f64 {
        (**self).next_open01()
    }
}

/// Seeded pseudo-random stream. Identical seeds yield identical streams.
#[derive(Debug, Clone)]
pub struct RngStream {
    inner: Xoshiro256PlusPlus,
}

impl RngStream {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            inner: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    /// Independent substream for trial `(a, b)` of a run seeded with `master`.
    ///
    /// The derivation depends only on its arguments, so trials can run in any
    /// order (or concurrently) without changing their draws.
    pub fn substream(master: u64, a: u64, b: u64) -> Self {
        Self::from_seed(derive_seed(master, a, b))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }
}

impl UniformSource for RngStream {
    fn next_open01(&mut self) -> f64 {
        loop {
            // 53 random mantissa bits; 0 is rejected and 1 is unreachable.
            let u = (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            if u > 0.0 && u < 1.0 {
                return u;
            }
        }
    }
}

/// Mixes `(master, a, b)` into a single seed with the SplitMix64 finalizer.
pub fn derive_seed(master: u64, a: u64, b: u64) -> u64 {
    let mut h = mix64(master ^ 0x6a09_e667_f3bc_c908);
    h = mix64(h ^ a.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    mix64(h ^ b.wrapping_mul(0xbf58_476d_1ce4_e5b9))
}

fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Replays a fixed sequence of uniform draws, cycling when exhausted.
///
/// Values outside (0, 1) are skipped, matching the rejection rule of
/// [`RngStream`].
#[derive(Debug, Clone)]
pub struct ScriptedUniforms {
    draws: Vec<f64>,
    pos: usize,
}

impl ScriptedUniforms {
    /// Panics if `draws` holds no value inside (0, 1).
    pub fn new(draws: impl Into<Vec<f64>>) -> Self {
        let draws = draws.into();
        assert!(
            draws.iter().any(|u| *u > 0.0 && *u < 1.0),
            "scripted draws must contain a value in (0, 1)"
        );
        Self { draws, pos: 0 }
    }

    pub fn single(u: f64) -> Self {
        Self::new(alloc::vec![u])
    }
}

impl UniformSource for ScriptedUniforms {
    fn next_open01(&mut self) -> f64 {
        loop {
            let u = self.draws[self.pos % self.draws.len()];
            self.pos += 1;
            if u > 0.0 && u < 1.0 {
                return u;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = RngStream::from_seed(7);
        let mut b = RngStream::from_seed(7);
        for _ in 0..1000 {
            assert_eq!(a.next_open01().to_bits(), b.next_open01().to_bits());
        }
    }

    #[test]
    fn draws_stay_in_open_interval() {
        let mut r = RngStream::from_seed(1);
        for _ in 0..100_000 {
            let u = r.next_open01();
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn substreams_differ_by_index() {
        let mut a = RngStream::substream(42, 0, 0);
        let mut b = RngStream::substream(42, 0, 1);
        let mut c = RngStream::substream(42, 1, 0);
        let (x, y, z) = (a.next_u64(), b.next_u64(), c.next_u64());
        assert_ne!(x, y);
        assert_ne!(x, z);
        assert_ne!(y, z);
    }

    #[test]
    fn scripted_skips_endpoints() {
        let mut s = ScriptedUniforms::new([0.0, 0.25, 1.0, 0.75]);
        assert_eq!(s.next_open01(), 0.25);
        assert_eq!(s.next_open01(), 0.75);
        assert_eq!(s.next_open01(), 0.25);
    }
}
