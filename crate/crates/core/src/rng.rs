//! Counter-based derivation of independent random streams.
//!
//! A stream is identified by the master seed, the drop index and a purpose
//! tag (plus optional sub-indices such as a link). Streams are derived by
//! hashing that tuple, so a drop never observes anything about which other
//! drops ran, on which thread, or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// What a stream is used for within a drop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Placement,
    Shadowing,
    LinkState,
    Fading,
    Planning,
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::Placement => 0x01,
            Purpose::Shadowing => 0x02,
            Purpose::LinkState => 0x03,
            Purpose::Fading => 0x04,
            Purpose::Planning => 0x05,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds the identifying tuple into a single 64-bit seed.
pub fn derive_seed(master_seed: u64, drop_index: u64, purpose: Purpose, sub: &[u64]) -> u64 {
    let mut h = splitmix64(master_seed);
    for word in [drop_index, purpose.tag()].iter().chain(sub) {
        h = splitmix64(h ^ word);
    }
    h
}

pub fn stream(master_seed: u64, drop_index: u64, purpose: Purpose, sub: &[u64]) -> SimRng {
    SimRng::seed_from_u64(derive_seed(master_seed, drop_index, purpose, sub))
}
