use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::flow::Point;
use crate::scalar::Real;

/// SplitMix64 finalizer, used to derive independent stream seeds.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A deterministic generator for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix_seed(seed, stream))
}

/// One point uniform with respect to area.
pub fn sample_point<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Point<T> {
    let u: f64 = rng.gen();
    let v: f64 = rng.gen();
    Point::polar(T::lit(u.sqrt()), T::lit(v))
}

/// `count` i.i.d. area-uniform points of the unit disk.
pub fn sample_disk<T: Real>(seed: u64, count: usize) -> Vec<Point<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| sample_point(&mut rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_radius_is_two_thirds() {
        let pts = sample_disk::<f64>(42, 1000);
        let mean = pts.iter().map(|p| p.norm()).sum::<f64>() / 1000.0;
        assert!((mean - 2.0 / 3.0).abs() < 0.02, "{mean}");
    }

    #[test]
    fn single_point_lies_in_disk() {
        for seed in 0..50 {
            let p = sample_disk::<f64>(seed, 1)[0];
            assert!(p.norm() <= 1.0);
        }
    }

    #[test]
    fn same_seed_same_sequence() {
        assert_eq!(sample_disk::<f64>(7, 64), sample_disk::<f64>(7, 64));
        assert_ne!(sample_disk::<f64>(7, 8), sample_disk::<f64>(8, 8));
    }

    #[test]
    fn mixed_streams_differ() {
        assert_ne!(mix_seed(1, 0), mix_seed(1, 1));
        assert_ne!(mix_seed(1, 0), mix_seed(2, 0));
    }
}
