//! Deterministic seed derivation.
//!
//! Every training run draws its randomness from a seed derived here, so the
//! order in which runs execute never affects their results. Derivation is a
//! splitmix64 chain over the base seed and the run's identifying salts.

/// One splitmix64 output step.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix a base seed with a sequence of salts into one derived seed.
pub fn mix(base: u64, salts: &[u64]) -> u64 {
    let mut s = splitmix64(base);
    for &salt in salts {
        s = splitmix64(s ^ salt);
    }
    s
}

/// FNV-1a over bytes, for salting with string identifiers (charger ids).
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}
