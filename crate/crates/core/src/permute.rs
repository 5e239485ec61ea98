//! Carriers and the CA-driven scramble permutation.

use crate::ca::{ca_step_into, rule_table, seed_state, BitVector, DEFAULT_RULE};
use crate::error::{Error, Result};

pub const DEFAULT_GENERATIONS: u32 = 20;

/// A bijection on `0..len`, stored as the gather map `J`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    /// Validates that `map` contains every index in `0..map.len()` once.
    pub fn from_vec(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for (k, &j) in map.iter().enumerate() {
            if j >= n {
                return Err(Error::NotBijective(format!(
                    "entry {k} is {j}, out of range for length {n}"
                )));
            }
            if std::mem::replace(&mut seen[j], true) {
                return Err(Error::NotBijective(format!("index {j} appears twice")));
            }
        }
        Ok(Self { map })
    }

    pub fn identity(len: usize) -> Self {
        Self { map: (0..len).collect() }
    }

    pub fn reversal(len: usize) -> Self {
        Self { map: (0..len).rev().collect() }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(k, &j)| k == j)
    }

    // Only for maps that are bijective by construction.
    pub(crate) fn from_vec_unchecked(map: Vec<usize>) -> Self {
        debug_assert!(Self::from_vec(map.clone()).is_ok());
        Self { map }
    }
}

/// 8-bit samples, optionally carrying a row-major image shape.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Carrier {
    samples: Vec<u8>,
    shape: Option<(usize, usize)>,
}

impl Carrier {
    /// A flat byte stream with no 2-D interpretation.
    pub fn from_samples(samples: Vec<u8>) -> Self {
        Self { samples, shape: None }
    }

    pub fn with_shape(samples: Vec<u8>, height: usize, width: usize) -> Result<Self> {
        if height.checked_mul(width) != Some(samples.len()) {
            return Err(Error::Dimension(format!(
                "{height}x{width} shape does not fit {} samples",
                samples.len()
            )));
        }
        Ok(Self { samples, shape: Some((height, width)) })
    }

    pub fn filled(height: usize, width: usize, value: u8) -> Self {
        Self { samples: vec![value; height * width], shape: Some((height, width)) }
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<u8> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `(height, width)` if this carrier is an image.
    pub fn shape(&self) -> Option<(usize, usize)> {
        self.shape
    }

    pub fn height(&self) -> Option<usize> {
        self.shape.map(|(h, _)| h)
    }

    pub fn width(&self) -> Option<usize> {
        self.shape.map(|(_, w)| w)
    }

    pub(crate) fn require_shape(&self) -> Result<(usize, usize)> {
        self.shape
            .ok_or_else(|| Error::Dimension("operation needs a 2-D carrier".into()))
    }

    pub fn get(&self, row: usize, col: usize) -> Option<u8> {
        let (h, w) = self.shape?;
        (row < h && col < w).then(|| self.samples[row * w + col])
    }

    /// Same shape, new samples. Length must match.
    pub(crate) fn with_samples(&self, samples: Vec<u8>) -> Self {
        debug_assert_eq!(samples.len(), self.samples.len());
        Self { samples, shape: self.shape }
    }

    pub(crate) fn samples_mut(&mut self) -> &mut [u8] {
        &mut self.samples
    }
}

/// Secret parameters of the scrambler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ScrambleKey {
    pub seed: u64,
    pub rule: u8,
    pub generations: u32,
}

impl ScrambleKey {
    pub fn new(seed: u64, rule: u32, generations: u32) -> Result<Self> {
        let rule = rule_table(rule)?.rule();
        if generations == 0 {
            return Err(Error::InvalidKey("generations must be at least 1".into()));
        }
        Ok(Self { seed, rule, generations })
    }

    /// Rule 7, 20 generations.
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, rule: DEFAULT_RULE, generations: DEFAULT_GENERATIONS }
    }
}

/// The permutation produced by the CA harvest, seeded from `key.seed`.
pub fn scramble_permutation(length: usize, key: &ScrambleKey) -> Result<Permutation> {
    scramble_from_initial(
        &seed_state(key.seed, length),
        u32::from(key.rule),
        key.generations,
    )
}

/// Harvests indices from a CA run starting at `initial`.
///
/// Each generation steps the automaton once and then scans left to right,
/// claiming every still-unclaimed index whose cell is 1. The run stops after
/// `generations` steps, once every index is claimed, or when a scan claims
/// nothing and the state is a fixed point. Unclaimed indices are appended in
/// ascending order.
pub fn scramble_from_initial(
    initial: &BitVector,
    rule: u32,
    generations: u32,
) -> Result<Permutation> {
    let table = rule_table(rule)?;
    if generations == 0 {
        return Err(Error::InvalidKey("generations must be at least 1".into()));
    }
    let n = initial.len();
    let mut state = initial.as_slice().to_vec();
    let mut next = vec![false; n];
    let mut available = vec![true; n];
    let mut order = Vec::with_capacity(n);

    for _ in 0..generations {
        if order.len() == n {
            break;
        }
        ca_step_into(&state, &table, &mut next);
        std::mem::swap(&mut state, &mut next);

        let before = order.len();
        for (i, (&cell, free)) in state.iter().zip(available.iter_mut()).enumerate() {
            if cell && *free {
                *free = false;
                order.push(i);
            }
        }
        if order.len() == n {
            break;
        }
        if order.len() == before {
            ca_step_into(&state, &table, &mut next);
            if next == state {
                break;
            }
        }
    }

    order.extend(
        available
            .iter()
            .enumerate()
            .filter_map(|(i, &free)| free.then_some(i)),
    );
    Ok(Permutation::from_vec_unchecked(order))
}

/// Cumulative number of indices claimed after each of `generations` scans,
/// ignoring the early-exit rules. Measures how much of the carrier the CA
/// harvest covers before leftovers are appended.
pub fn harvest_coverage(initial: &BitVector, rule: u32, generations: u32) -> Result<Vec<usize>> {
    let table = rule_table(rule)?;
    let n = initial.len();
    let mut state = initial.as_slice().to_vec();
    let mut next = vec![false; n];
    let mut available = vec![true; n];
    let mut claimed = 0;
    let mut coverage = Vec::with_capacity(generations as usize);
    for _ in 0..generations {
        ca_step_into(&state, &table, &mut next);
        std::mem::swap(&mut state, &mut next);
        for (&cell, free) in state.iter().zip(available.iter_mut()) {
            if cell && *free {
                *free = false;
                claimed += 1;
            }
        }
        coverage.push(claimed);
    }
    Ok(coverage)
}

pub fn invert(perm: &Permutation) -> Permutation {
    let mut inv = vec![0; perm.len()];
    for (k, &j) in perm.as_slice().iter().enumerate() {
        inv[j] = k;
    }
    Permutation::from_vec_unchecked(inv)
}

/// Gathers `out[k] = carrier[perm[k]]`, keeping the carrier's shape.
pub fn apply_permutation(carrier: &Carrier, perm: &Permutation) -> Result<Carrier> {
    if perm.len() != carrier.len() {
        return Err(Error::Dimension(format!(
            "permutation of length {} applied to {} samples",
            perm.len(),
            carrier.len()
        )));
    }
    let src = carrier.samples();
    let gathered = perm.as_slice().iter().map(|&j| src[j]).collect();
    Ok(carrier.with_samples(gathered))
}
