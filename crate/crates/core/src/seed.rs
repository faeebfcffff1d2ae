//! Deterministic seed derivation.
//!
//! Every random stream in a tournament is derived from the master seed by
//! hashing a path of indices, so simulations can run in any order (or in
//! parallel) and still reproduce.

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Combines a parent seed with a child index.
pub fn derive(parent: u64, index: u64) -> u64 {
    splitmix64(parent ^ splitmix64(index.wrapping_add(0xD1B5_4A32_D192_ED03)))
}

/// Seed for one round's match; simulations derive from it by sim index.
pub fn match_seed(master_seed: u64, round_index: u32) -> u64 {
    derive(derive(master_seed, 0x006d_6174_6368), u64::from(round_index))
}

/// Seed for shuffling the player order of one round.
pub fn order_seed(master_seed: u64, round_index: u32) -> u64 {
    derive(derive(master_seed, 0x006f_7264_6572), u64::from(round_index))
}

/// Seed for the `sim_index`-th simulation of a match.
pub fn sim_seed(match_seed: u64, sim_index: u64) -> u64 {
    derive(match_seed, sim_index)
}
