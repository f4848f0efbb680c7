//! Counter-based random bits.
//!
//! Walk increments come from Philox4x32-10 keyed by the 64-bit walk seed. Block
//! `b` of the stream is the Philox output for counter `(b_lo, b_hi, 0, 0)` and
//! supplies the 128 increments `128*b .. 128*b + 128`, so any step can be
//! regenerated without replaying the ones before it.

/// Identifies the bit stream layout. Reports carry this string; change it
/// whenever generated paths would change.
pub const PRNG_VERSION: &str = "philox4x32-10/walk-v1";

/// Identifies the replica seed derivation scheme.
pub const SEED_SCHEME_VERSION: &str = "fmix64-xor/v1";

const PHILOX_M0: u32 = 0xD251_1F53;
const PHILOX_M1: u32 = 0xCD9E_8D57;
const PHILOX_W0: u32 = 0x9E37_79B9;
const PHILOX_W1: u32 = 0xBB67_AE85;

#[inline]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = u64::from(a) * u64::from(b);
    ((p >> 32) as u32, p as u32)
}

/// Philox4x32 with 10 rounds (Salmon et al., Random123).
pub fn philox4x32_10(counter: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let mut ctr = counter;
    let mut key = key;
    for round in 0..10 {
        if round > 0 {
            key[0] = key[0].wrapping_add(PHILOX_W0);
            key[1] = key[1].wrapping_add(PHILOX_W1);
        }
        let (hi0, lo0) = mulhilo(PHILOX_M0, ctr[0]);
        let (hi1, lo1) = mulhilo(PHILOX_M1, ctr[2]);
        ctr = [hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0];
    }
    ctr
}

/// MurmurHash3 64-bit finalizer. A bijection on `u64`.
#[inline]
pub fn fmix64(mut x: u64) -> u64 {
    x ^= x >> 33;
    x = x.wrapping_mul(0xff51_afd7_ed55_8ccd);
    x ^= x >> 33;
    x = x.wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    x ^= x >> 33;
    x
}

/// Seed for replica `replica_id` of an experiment seeded with `master_seed`.
///
/// For a fixed master seed this is a composition of bijections of the replica
/// id, so distinct replicas never share a seed.
pub fn derive_seed(master_seed: u64, replica_id: u64) -> u64 {
    fmix64(master_seed ^ fmix64(replica_id))
}

/// A source of ±1 walk increments addressed by block.
///
/// Bit `j` of word `w` in block `b` is the increment for step
/// `128*b + 32*w + j`; a set bit means +1.
pub trait StepSource {
    fn block(&self, index: u64) -> [u32; 4];

    fn step(&self, step: u64) -> bool {
        let words = self.block(step / 128);
        let within = (step % 128) as usize;
        (words[within / 32] >> (within % 32)) & 1 == 1
    }
}

/// The production step source: Philox keyed by the walk seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhiloxSteps {
    key: [u32; 2],
}

impl PhiloxSteps {
    pub fn new(seed: u64) -> Self {
        Self {
            key: [seed as u32, (seed >> 32) as u32],
        }
    }
}

impl StepSource for PhiloxSteps {
    fn block(&self, index: u64) -> [u32; 4] {
        philox4x32_10([index as u32, (index >> 32) as u32, 0, 0], self.key)
    }
}

/// Every increment fixed to the same sign. Used to build extreme paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstantSteps(pub bool);

impl StepSource for ConstantSteps {
    fn block(&self, _index: u64) -> [u32; 4] {
        if self.0 {
            [u32::MAX; 4]
        } else {
            [0; 4]
        }
    }
}
