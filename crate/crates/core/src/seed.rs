//! Seed derivation.
//!
//! Every random stream in a run is derived from the master seed with
//! [`mix`], which hashes a domain tag and an index into the master seed
//! using two SplitMix64 finalizer passes:
//!
//! ```text
//! mix(master, domain, id) = splitmix64(master ^ splitmix64(domain * 2^32 + id))
//! ```
//!
//! Distinct domains keep, for example, client 3's seed apart from round 3's.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seed domains.
pub mod domain {
    pub const CLIENT: u64 = 1;
    pub const ROUND: u64 = 2;
    pub const INIT: u64 = 3;
    pub const DATA: u64 = 4;
    pub const PARTITION: u64 = 5;
    pub const SPLIT: u64 = 6;
    pub const EPOCH: u64 = 7;
}

/// SplitMix64 output function.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from `master` for `(domain, id)`.
pub fn mix(master: u64, domain: u64, id: u64) -> u64 {
    splitmix64(master ^ splitmix64((domain << 32).wrapping_add(id)))
}

/// Per-client seed.
pub fn client_seed(master: u64, client: usize) -> u64 {
    mix(master, domain::CLIENT, client as u64)
}

/// Per-round seed (client sampling).
pub fn round_seed(master: u64, round: usize) -> u64 {
    mix(master, domain::ROUND, round as u64)
}

/// The generator used everywhere in this crate.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_reference_values() {
        // First outputs of the reference SplitMix64 generator seeded with 0.
        assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(
            splitmix64(0x9E37_79B9_7F4A_7C15),
            0x6E78_9E6A_A1B9_65F4
        );
    }

    #[test]
    fn domains_do_not_collide() {
        assert_ne!(client_seed(42, 3), round_seed(42, 3));
        assert_ne!(client_seed(42, 3), client_seed(43, 3));
        assert_eq!(client_seed(42, 3), client_seed(42, 3));
    }
}
