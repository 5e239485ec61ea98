//! One-dimensional elementary cellular automata with periodic boundary.

use crate::error::{Error, Result};
use crate::prng::Prng64;

/// Rule 7: the scrambling default.
pub const DEFAULT_RULE: u8 = 7;

/// Next-state lookup for the eight three-cell neighborhoods.
///
/// The neighborhood value is `left * 4 + center * 2 + right`, and
/// `outputs[k]` is bit `k` of the Wolfram rule number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleTable {
    outputs: [bool; 8],
    rule: u8,
}

impl RuleTable {
    pub fn new(rule: u8) -> Self {
        let mut outputs = [false; 8];
        for (k, out) in outputs.iter_mut().enumerate() {
            *out = (rule >> k) & 1 == 1;
        }
        Self { outputs, rule }
    }

    pub fn rule(&self) -> u8 {
        self.rule
    }

    pub fn outputs(&self) -> &[bool; 8] {
        &self.outputs
    }

    #[inline]
    pub fn apply(&self, left: bool, center: bool, right: bool) -> bool {
        self.outputs[(usize::from(left) << 2) | (usize::from(center) << 1) | usize::from(right)]
    }
}

/// Builds the table for a rule number, rejecting anything outside `0..=255`.
pub fn rule_table(rule: u32) -> Result<RuleTable> {
    u8::try_from(rule)
        .map(RuleTable::new)
        .map_err(|_| Error::InvalidRule(rule))
}

/// CA state: an ordered row of binary cells.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct BitVector {
    bits: Vec<bool>,
}

impl BitVector {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zeros(len: usize) -> Self {
        Self { bits: vec![false; len] }
    }

    pub fn ones(len: usize) -> Self {
        Self { bits: vec![true; len] }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn into_inner(self) -> Vec<bool> {
        self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

impl From<Vec<bool>> for BitVector {
    fn from(bits: Vec<bool>) -> Self {
        Self { bits }
    }
}

impl FromIterator<bool> for BitVector {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self { bits: iter.into_iter().collect() }
    }
}

/// Advances the automaton one generation, wrapping at both ends.
pub fn ca_step(state: &BitVector, rule: &RuleTable) -> BitVector {
    let mut next = BitVector::zeros(state.len());
    ca_step_into(state.as_slice(), rule, &mut next.bits);
    next
}

/// `ca_step` writing into a caller-owned buffer of the same length.
pub(crate) fn ca_step_into(cells: &[bool], rule: &RuleTable, out: &mut [bool]) {
    debug_assert_eq!(cells.len(), out.len());
    let n = cells.len();
    if n == 0 {
        return;
    }
    for (i, slot) in out.iter_mut().enumerate() {
        let left = cells[(i + n - 1) % n];
        let right = cells[(i + 1) % n];
        *slot = rule.apply(left, cells[i], right);
    }
}

/// Deterministic initial state: bits of successive generator words, MSB first.
pub fn seed_state(seed: u64, length: usize) -> BitVector {
    let mut rng = Prng64::new(seed);
    let mut bits = Vec::with_capacity(length);
    while bits.len() < length {
        let word = rng.next_u64();
        let take = (length - bits.len()).min(64);
        bits.extend((0..take).map(|b| (word >> (63 - b)) & 1 == 1));
    }
    BitVector::new(bits)
}
