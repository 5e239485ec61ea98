//! Comparison methods: seeded uniform shuffling and unscrambled LSB embedding.
//!
//! Both share the payload layout of [`crate::watermark`], so capacity and
//! footprint are identical across methods.

use crate::error::Result;
use crate::permute::{Carrier, Permutation};
use crate::prng::Prng64;
use crate::watermark::{
    embed_with_permutation, extract_with_permutation, BitMatrix, EmbedMode, WatermarkKey,
};
use crate::ScrambleKey;

/// Fisher-Yates shuffle of `0..length` driven by [`Prng64`].
pub fn fisher_yates_permutation(length: usize, seed: u64) -> Permutation {
    let mut rng = Prng64::new(seed);
    let mut map: Vec<usize> = (0..length).collect();
    for i in (1..length).rev() {
        let j = rng.next_below(i as u64 + 1) as usize;
        map.swap(i, j);
    }
    Permutation::from_vec_unchecked(map)
}

fn direct_key(wm_height: usize, wm_width: usize, repetition: usize, bit_plane: u8) -> Result<WatermarkKey> {
    WatermarkKey::new(
        ScrambleKey::with_seed(0),
        bit_plane,
        repetition,
        EmbedMode::Substitute,
        wm_height,
        wm_width,
    )
}

/// Substitute-mode embedding straight into the first samples, no scrambling.
pub fn lsb_embed_direct(
    carrier: &Carrier,
    wm: &BitMatrix,
    repetition: usize,
    bit_plane: u8,
) -> Result<Carrier> {
    let key = direct_key(wm.height(), wm.width(), repetition, bit_plane)?;
    embed_with_permutation(carrier, wm, &key, &Permutation::identity(carrier.len()))
}

pub fn lsb_extract_direct(
    carrier: &Carrier,
    wm_height: usize,
    wm_width: usize,
    repetition: usize,
    bit_plane: u8,
) -> Result<BitMatrix> {
    let key = direct_key(wm_height, wm_width, repetition, bit_plane)?;
    extract_with_permutation(carrier, &key, &Permutation::identity(carrier.len()))
}
