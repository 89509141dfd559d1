//! Counter-based deterministic randomness.
//!
//! Every random quantity in the crate is a pure function of
//! `(seed, tag, index)`, giving O(1) random access to any draw and results
//! that are independent of query order and thread schedule. The pipeline is
//! pinned down to the bit so that independent implementations agree:
//!
//! 1. stream key: the splitmix64 output sequence seeded with
//!    `seed XOR tag XOR index`;
//! 2. word generator: xoshiro256++ whose 256-bit state is the first four
//!    splitmix64 outputs;
//! 3. uniform residue mod p: take 64-bit words u, reject while
//!    `u >= p * floor(2^64 / p)`, then reduce mod p;
//! 4. Bernoulli(q): accept iff the first word is `< floor(q * 2^64)`.
//!
//! Tags are short ASCII labels packed little-endian into a u64.

/// Pack an ASCII label of up to 8 bytes, zero padded, little endian.
pub const fn tag(label: &str) -> u64 {
    let bytes = label.as_bytes();
    assert!(bytes.len() <= 8);
    let mut out = [0u8; 8];
    let mut i = 0;
    while i < bytes.len() {
        out[i] = bytes[i];
        i += 1;
    }
    u64::from_le_bytes(out)
}

/// Residue-class draws a_p.
pub const TAG_RESIDUE: u64 = tag("res");
/// Bernoulli membership draws.
pub const TAG_BERNOULLI: u64 = tag("bern");

/// One step of the splitmix64 sequence.
#[inline]
pub fn splitmix64_next(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// First splitmix64 output for a given initial state.
#[inline]
pub fn splitmix64(x: u64) -> u64 {
    let mut s = x;
    splitmix64_next(&mut s)
}

/// xoshiro256++ stream keyed by a single 64-bit value.
#[derive(Debug, Clone)]
pub struct Stream {
    s: [u64; 4],
}

impl Stream {
    pub fn new(key: u64) -> Self {
        let mut sm = key;
        Self {
            s: [
                splitmix64_next(&mut sm),
                splitmix64_next(&mut sm),
                splitmix64_next(&mut sm),
                splitmix64_next(&mut sm),
            ],
        }
    }

    /// Stream for a tagged, indexed draw.
    pub fn keyed(seed: u64, tag: u64, index: u64) -> Self {
        Self::new(seed ^ tag ^ index)
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[0]
            .wrapping_add(self.s[3])
            .rotate_left(23)
            .wrapping_add(self.s[0]);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Unbiased uniform value in [0, p) by rejection sampling.
    pub fn next_below(&mut self, p: u64) -> u64 {
        debug_assert!(p >= 1);
        let zone = ((1u128 << 64) / p as u128) * p as u128;
        loop {
            let u = self.next_u64();
            if (u as u128) < zone {
                return u % p;
            }
        }
    }
}

/// The uniform residue a_p derived from (seed, p).
pub fn residue_draw(seed: u64, p: u64) -> u64 {
    Stream::keyed(seed, TAG_RESIDUE, p).next_below(p)
}

/// The Bernoulli(q) draw for integer m: accept iff the first stream word is
/// below floor(q * 2^64). The floor rounding biases by at most 2^-64.
pub fn bernoulli_draw(seed: u64, m: u64, q: f64) -> bool {
    if q <= 0.0 {
        return false;
    }
    if q >= 1.0 {
        return true;
    }
    let threshold = (q * 18_446_744_073_709_551_616.0) as u128;
    let word = Stream::keyed(seed, TAG_BERNOULLI, m).next_u64();
    (word as u128) < threshold
}

/// Per-trial seed derivation; appending trials never reshuffles earlier ones.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ index)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_are_distinct_and_padded() {
        assert_eq!(TAG_RESIDUE, u64::from_le_bytes(*b"res\0\0\0\0\0"));
        assert_eq!(TAG_BERNOULLI, u64::from_le_bytes(*b"bern\0\0\0\0"));
        assert_ne!(TAG_RESIDUE, TAG_BERNOULLI);
    }

    #[test]
    fn splitmix_reference_values() {
        // reference sequence for seed 0 (Vigna's splitmix64.c)
        let mut s = 0u64;
        assert_eq!(splitmix64_next(&mut s), 0xE220_A839_7B1D_CDAF);
        assert_eq!(splitmix64_next(&mut s), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(splitmix64_next(&mut s), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn draws_are_deterministic() {
        for &(seed, p) in &[(0u64, 2u64), (1, 3), (99, 101), (u64::MAX, 13)] {
            assert_eq!(residue_draw(seed, p), residue_draw(seed, p));
            assert!(residue_draw(seed, p) < p);
        }
        assert_eq!(bernoulli_draw(7, 1000, 0.5), bernoulli_draw(7, 1000, 0.5));
    }

    #[test]
    fn bernoulli_extremes() {
        for m in 0..100 {
            assert!(!bernoulli_draw(3, m, 0.0));
            assert!(bernoulli_draw(3, m, 1.0));
        }
    }

    #[test]
    fn residue_mod_2_is_balanced() {
        // binomial check: over 10^4 seeds, the fraction with a_2 = 0 is
        // within 3 sigma = 0.015 of 1/2
        let zeros = (1..=10_000u64)
            .filter(|&seed| residue_draw(seed, 2) == 0)
            .count();
        let frac = zeros as f64 / 10_000.0;
        assert!((frac - 0.5).abs() < 0.015, "fraction {frac}");
    }

    #[test]
    fn bernoulli_rate_tracks_q() {
        let q = 0.32;
        let hits = (0..20_000u64).filter(|&m| bernoulli_draw(8, m, q)).count();
        let frac = hits as f64 / 20_000.0;
        // 4 sigma of binomial(20000, 0.32)
        assert!((frac - q).abs() < 4.0 * (q * (1.0 - q) / 20_000.0f64).sqrt());
    }

    #[test]
    fn trial_seeds_are_stable_under_extension() {
        let first: Vec<u64> = (0..10).map(|i| trial_seed(42, i)).collect();
        let extended: Vec<u64> = (0..20).map(|i| trial_seed(42, i)).collect();
        assert_eq!(first, extended[..10]);
    }
}
