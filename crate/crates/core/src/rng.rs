use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// A reproducible random stream identified by `(seed, stream_id)`.
///
/// Streams with the same seed but different ids are independent ChaCha20
/// streams over the same key.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha20Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self { seed, stream_id, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Derive a child stream; used to hand out sub-streams for train/test or
    /// per-replication work without overlapping the parent.
    pub fn substream(seed: u64, parts: &[u64]) -> Self {
        Self::new(seed, stream_id_for(parts))
    }
}

/// Hash a path of indices (e.g. `[replication, role]`) into a stream id.
pub fn stream_id_for(parts: &[u64]) -> u64 {
    let mut id: u64 = 0x9E37_79B9_7F4A_7C15;
    for &p in parts {
        id ^= p
            .wrapping_add(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(id << 6)
            .wrapping_add(id >> 2);
        id = splitmix(id);
    }
    id
}

fn splitmix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngCore for RngStream {
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
