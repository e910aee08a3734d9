//! Deterministic seeding.
//!
//! Every random quantity in this crate is produced by the SplitMix64
//! generator, seeded through [`derive_seed`]. The exact constants are spelled
//! out below so that results are bit-reproducible across machines, versions,
//! and thread counts: callers parallelize by deriving one child seed per task
//! and never share a stream.

/// Root or derived seed for a deterministic random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed(pub u64);

/// Weyl-sequence increment of SplitMix64: the odd integer nearest to 2^64/phi.
pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer (Stafford "Mix13" variant): an invertible
/// xor-shift/multiply avalanche on 64 bits.
#[inline]
pub fn mix64(z: u64) -> u64 {
    let z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    let z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the child seed for task `index` under `root`.
///
/// Defined as `mix64(root XOR mix64(index + GOLDEN_GAMMA))` (wrapping
/// arithmetic). `mix64` is a bijection on `u64`, so for a fixed root the map
/// is injective in `index`: two distinct task indices can never collide.
#[inline]
pub fn derive_seed(root: Seed, index: u64) -> Seed {
    Seed(mix64(root.0 ^ mix64(index.wrapping_add(GOLDEN_GAMMA))))
}

/// SplitMix64 stream.
///
/// Output `i` (0-based) equals `mix64(seed + (i + 1) * GOLDEN_GAMMA)` with
/// wrapping arithmetic, which makes any position addressable in O(1) via
/// [`SplitMix64::at`].
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: Seed) -> Self {
        SplitMix64 { state: seed.0 }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` using the top 53 bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Output `index` of the stream seeded with `seed`, without constructing
    /// the stream.
    #[inline]
    pub fn at(seed: Seed, index: u64) -> u64 {
        mix64(
            seed.0
                .wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derive_seed_is_deterministic() {
        let root = Seed(42);
        for i in [0, 1, 17, u64::MAX] {
            assert_eq!(derive_seed(root, i), derive_seed(root, i));
        }
    }

    #[test]
    fn derive_seed_distinguishes_indices() {
        assert_ne!(derive_seed(Seed(7), 0), derive_seed(Seed(7), 1));
    }

    #[test]
    fn derive_seed_no_collisions_in_first_million_indices() {
        let root = Seed(0xDEAD_BEEF);
        let mut outs: Vec<u64> = (0..1_000_000u64).map(|i| derive_seed(root, i).0).collect();
        outs.sort_unstable();
        let before = outs.len();
        outs.dedup();
        assert_eq!(outs.len(), before, "collision among derived seeds");
    }

    #[test]
    fn distinct_roots_give_disjoint_streams() {
        let a: Vec<u64> = (0..10_000u64).map(|i| derive_seed(Seed(1), i).0).collect();
        let mut b: Vec<u64> = (0..10_000u64).map(|i| derive_seed(Seed(2), i).0).collect();
        b.sort_unstable();
        let overlap = a.iter().filter(|x| b.binary_search(x).is_ok()).count();
        assert_eq!(overlap, 0);
    }

    #[test]
    fn random_access_matches_sequential() {
        let seed = Seed(12345);
        let mut stream = SplitMix64::new(seed);
        for i in 0..100 {
            assert_eq!(stream.next_u64(), SplitMix64::at(seed, i));
        }
    }

    #[test]
    fn next_f64_in_unit_interval() {
        let mut stream = SplitMix64::new(Seed(9));
        for _ in 0..10_000 {
            let x = stream.next_f64();
            assert!((0.0..1.0).contains(&x));
        }
    }

    #[test]
    fn value_stability() {
        // First outputs for seed 0 match the published SplitMix64 reference
        // vectors; derived seeds are pinned so refactors cannot silently
        // change every downstream experiment.
        let mut stream = SplitMix64::new(Seed(0));
        assert_eq!(stream.next_u64(), 0xe220a8397b1dcdaf);
        assert_eq!(stream.next_u64(), 0x6e789e6aa1b965f4);
        assert_eq!(stream.next_u64(), 0x06c45d188009454f);
        assert_eq!(derive_seed(Seed(0), 0).0, 0x48218226ff3cd4bf);
        assert_eq!(derive_seed(Seed(1), 7).0, 0x0524257c04fcf117);
    }
}
