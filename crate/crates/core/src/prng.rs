//! Seeded xorshift64* generator.
//!
//! The recipe is fixed so keys are portable: any implementation that follows
//! it reproduces the same permutation for the same seed.

/// Replacement state for a zero seed; the all-zero state is a fixed point.
pub const ZERO_SEED_REPLACEMENT: u64 = 0x9E37_79B9_7F4A_7C15;

const MULTIPLIER: u64 = 0x2545_F491_4F6C_DD1D;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prng64 {
    state: u64,
}

impl Prng64 {
    pub fn new(seed: u64) -> Self {
        let state = if seed == 0 { ZERO_SEED_REPLACEMENT } else { seed };
        Self { state }
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(MULTIPLIER)
    }

    /// Uniform draw in `[0, 1)` from the top 53 bits of one word.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Top bit of one word.
    pub fn next_bit(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }

    /// Unbiased draw in `[0, bound)` by rejecting the incomplete top bucket.
    ///
    /// Panics if `bound` is zero.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "next_below bound must be positive");
        // 2^64 mod bound
        let rem = (u64::MAX % bound + 1) % bound;
        let limit = u64::MAX - rem;
        loop {
            let x = self.next_u64();
            if rem == 0 || x <= limit {
                return x % bound;
            }
        }
    }
}
