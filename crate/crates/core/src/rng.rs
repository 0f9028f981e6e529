//! Counter-based random numbers.
//!
//! Every draw is a pure function of `(master_seed, path, counter, lane)`, so
//! a path's noise does not depend on which thread advances it or on how many
//! other paths exist. The mixing function is the SplitMix64 finalizer applied
//! to a key folded from the four inputs. Normals come from the ziggurat
//! sampler fed lane by lane from one counter.

use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Disjoint stream for one path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathStream {
    key: u64,
}

/// Counter domain for the initial-position draw, well away from step indices.
pub const INIT_COUNTER: u64 = u64::MAX;

impl PathStream {
    pub fn new(master_seed: u64, path: u64) -> Self {
        let k = mix64(master_seed.wrapping_add(GOLDEN));
        Self {
            key: mix64(k ^ mix64(path.wrapping_mul(GOLDEN).wrapping_add(0x632b_e59b_d9b4_e019))),
        }
    }

    #[inline]
    pub fn bits(&self, counter: u64, lane: u64) -> u64 {
        let c = mix64(counter.wrapping_mul(GOLDEN) ^ lane.wrapping_mul(0xd1b5_4a32_d192_ed03));
        mix64(self.key ^ c)
    }

    /// Uniform on the open interval (0, 1).
    #[inline]
    pub fn uniform(&self, counter: u64, lane: u64) -> f64 {
        ((self.bits(counter, lane) >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal for `counter`.
    #[inline]
    pub fn normal(&self, counter: u64) -> f64 {
        StandardNormal.sample(&mut CounterBits {
            stream: self,
            counter,
            lane: 0,
        })
    }
}

/// Words `bits(counter, 0), bits(counter, 1), ...` for samplers that consume
/// a variable number of them.
struct CounterBits<'a> {
    stream: &'a PathStream,
    counter: u64,
    lane: u64,
}

impl RngCore for CounterBits<'_> {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        let b = self.stream.bits(self.counter, self.lane);
        self.lane += 1;
        b
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        for chunk in dest.chunks_mut(8) {
            let b = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&b[..chunk.len()]);
        }
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.fill_bytes(dest);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_pure_functions() {
        let a = PathStream::new(42, 7);
        let b = PathStream::new(42, 7);
        assert_eq!(a.normal(123), b.normal(123));
        assert_ne!(PathStream::new(42, 8).normal(123), a.normal(123));
        assert_ne!(PathStream::new(43, 7).normal(123), a.normal(123));
    }

    #[test]
    fn uniform_is_in_open_unit_interval() {
        let s = PathStream::new(1, 2);
        for c in 0..10_000 {
            let u = s.uniform(c, 0);
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn normal_moments() {
        let n = 1_000_000u64;
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        let mut sum4 = 0.0;
        for p in 0..1000u64 {
            let s = PathStream::new(9, p);
            for c in 0..n / 1000 {
                let z = s.normal(c);
                sum += z;
                sum2 += z * z;
                sum4 += z.powi(4);
            }
        }
        let nf = n as f64;
        let mean = sum / nf;
        let var = sum2 / nf - mean * mean;
        assert!(mean.abs() < 4.0 / nf.sqrt(), "mean {mean}");
        assert!((var - 1.0).abs() < 0.01, "var {var}");
        assert!((sum4 / nf - 3.0).abs() < 0.05);
    }

    #[test]
    fn adjacent_counters_are_uncorrelated() {
        let s = PathStream::new(5, 0);
        let n = 200_000;
        let lag: f64 = (0..n).map(|c| s.normal(c) * s.normal(c + 1)).sum::<f64>() / n as f64;
        assert!(lag.abs() < 4.0 / (n as f64).sqrt());
    }
}
