use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seeded, splittable random stream.
///
/// `split` derives a child stream from this stream's identity and a key. The
/// child depends only on the parent seed and the key, never on how many draws
/// the parent has made, so work can be fanned out over threads without
/// changing results.
#[derive(Clone, Debug)]
pub struct AuditRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl AuditRng {
    pub fn new(seed: u64) -> Self {
        AuditRng {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// The 64-bit identity this stream was created from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn split(&self, key: u64) -> AuditRng {
        AuditRng::new(mix64(mix64(self.seed) ^ mix64(key ^ 0xD6E8_FEB8_6659_FD93)))
    }

    /// Convenience for nested splits, e.g. `(repetition, pair, stage)`.
    pub fn split_path(&self, keys: &[u64]) -> AuditRng {
        keys.iter().fold(self.clone(), |r, &k| r.split(k))
    }

    /// Uniform draw from the open interval `(0, 1)`: `(k + 1/2) / 2^53`.
    #[inline]
    pub fn open_unit(&mut self) -> f64 {
        ((self.inner.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

impl RngCore for AuditRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
