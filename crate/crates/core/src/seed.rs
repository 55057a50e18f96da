//! Counter-based derivation of sub-stream seeds.
//!
//! Reproducible parallel simulation needs one independent RNG stream per
//! (trial, column) without sharing mutable state. A derived seed is
//!
//! ```text
//! derive(master, stream, index)
//!   = mix(mix(master + PHI * (stream + 1)) + PHI * (index + 1))
//! ```
//!
//! where `mix` is the SplitMix64 finalizer and `PHI` is the 64-bit golden
//! ratio constant; all arithmetic wraps. The same master seed therefore
//! always yields the same seed for a given (stream, index) pair, no matter
//! in which order or on how many threads the sub-streams are consumed.

const PHI: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the seed for sub-stream `index` of stream `stream`.
pub fn derive(master: u64, stream: u64, index: u64) -> u64 {
    let a = mix(master.wrapping_add(PHI.wrapping_mul(stream.wrapping_add(1))));
    mix(a.wrapping_add(PHI.wrapping_mul(index.wrapping_add(1))))
}
