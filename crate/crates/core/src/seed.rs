//! Stable seed derivation, independent of platform and toolchain hashing.

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Incremental builder: `SeedMixer::new(base).str("map").u64(3).finish()`.
#[derive(Clone, Copy, Debug)]
pub struct SeedMixer(u64);

impl SeedMixer {
    pub fn new(base: u64) -> Self {
        SeedMixer(splitmix64(base ^ FNV_OFFSET))
    }

    pub fn bytes(mut self, data: &[u8]) -> Self {
        let mut h = FNV_OFFSET;
        for &b in data {
            h ^= b as u64;
            h = h.wrapping_mul(FNV_PRIME);
        }
        // length-prefix so ("ab","c") and ("a","bc") differ
        self.0 = splitmix64(self.0 ^ h ^ (data.len() as u64).rotate_left(32));
        self
    }

    pub fn str(self, s: &str) -> Self {
        self.bytes(s.as_bytes())
    }

    pub fn u64(mut self, v: u64) -> Self {
        self.0 = splitmix64(self.0.rotate_left(17) ^ v);
        self
    }

    pub fn finish(self) -> u64 {
        splitmix64(self.0)
    }
}
