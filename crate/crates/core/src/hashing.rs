//! Deterministic hashing for point stores.

use core::hash::{BuildHasher, Hasher};

/// Hasher folding input words through a fixed 64-bit mixer (splitmix64 finalizer).
#[derive(Clone, Copy, Default)]
pub struct MixHasher {
    state: u64,
}

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Hasher for MixHasher {
    #[inline]
    fn finish(&self) -> u64 {
        mix64(self.state)
    }

    fn write(&mut self, bytes: &[u8]) {
        let mut chunks = bytes.chunks_exact(8);
        for c in &mut chunks {
            let mut w = [0u8; 8];
            w.copy_from_slice(c);
            self.write_u64(u64::from_le_bytes(w));
        }
        let rest = chunks.remainder();
        if !rest.is_empty() {
            let mut w = [0u8; 8];
            w[..rest.len()].copy_from_slice(rest);
            self.write_u64(u64::from_le_bytes(w) ^ ((rest.len() as u64) << 56));
        }
    }

    #[inline]
    fn write_u64(&mut self, i: u64) {
        self.state = mix64(self.state.rotate_left(23) ^ i).wrapping_add(0x9e37_79b9_7f4a_7c15);
    }

    #[inline]
    fn write_u32(&mut self, i: u32) {
        self.write_u64(i as u64);
    }

    #[inline]
    fn write_usize(&mut self, i: usize) {
        self.write_u64(i as u64);
    }

    #[inline]
    fn write_u8(&mut self, i: u8) {
        self.write_u64(i as u64);
    }
}

#[derive(Clone, Copy, Default)]
pub struct MixState;

impl BuildHasher for MixState {
    type Hasher = MixHasher;
    fn build_hasher(&self) -> MixHasher {
        MixHasher::default()
    }
}

pub type HashMap<K, V> = hashbrown::HashMap<K, V, MixState>;
pub type HashSet<K> = hashbrown::HashSet<K, MixState>;

pub fn new_map<K, V>() -> HashMap<K, V> {
    HashMap::with_hasher(MixState)
}

pub fn new_set<K>() -> HashSet<K> {
    HashSet::with_hasher(MixState)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::hash::Hash;

    fn h<T: Hash>(x: &T) -> u64 {
        MixState.hash_one(x)
    }

    #[test]
    fn hashing_is_stable_across_calls() {
        assert_eq!(h(&[1u64, 2, 3]), h(&[1u64, 2, 3]));
        assert_ne!(h(&[1u64, 2, 3]), h(&[1u64, 3, 2]));
    }

    #[test]
    fn mixer_spreads_small_inputs() {
        let a = mix64(1);
        let b = mix64(2);
        assert!((a ^ b).count_ones() > 16);
    }
}
