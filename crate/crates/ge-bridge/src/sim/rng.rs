//! Counter-based random numbers for reproducible, order-independent
//! replicates.
//!
//! Each variate is a pure function of (seed, rep, slot), so replicates can
//! be generated in any order or in parallel and still match the sequential
//! run bit for bit. The mixer is the splitmix64 finalizer, whose avalanche
//! quality is well studied; chaining it three times decorrelates the
//! structured (seed, rep, slot) lattice.

use crate::special;

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// 64 uniform bits for the (rep, slot) cell of a seeded experiment.
pub(crate) fn counter_u64(seed: u64, rep: u64, slot: u64) -> u64 {
    let h = mix(seed.wrapping_add(GAMMA));
    let h = mix(h ^ rep.wrapping_mul(GAMMA).wrapping_add(1));
    mix(h ^ slot.wrapping_mul(GAMMA).wrapping_add(2))
}

/// Uniform on (0, 1), strictly inside: 53 mantissa bits, offset by half an
/// ulp so 0 and 1 are unreachable and the normal quantile below stays
/// finite.
pub(crate) fn uniform(seed: u64, rep: u64, slot: u64) -> f64 {
    let x = counter_u64(seed, rep, slot);
    ((x >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
}

/// Standard normal via the inverse CDF. One uniform per normal keeps the
/// counter layout trivial (slot index = variate index).
pub(crate) fn standard_normal(seed: u64, rep: u64, slot: u64) -> f64 {
    special::quantile(uniform(seed, rep, slot))
}
