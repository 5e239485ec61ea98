//! Keyed, blind image watermarking in a scrambled domain.
//!
//! A carrier (any 8-bit sample stream, usually a row-major grayscale image)
//! is reordered by a permutation harvested from the evolution of a
//! one-dimensional elementary cellular automaton. The watermark is written
//! into one bit-plane of the first samples of the scrambled sequence and the
//! permutation is undone, which scatters the payload across the carrier.
//!
//! ```
//! use cellmark::{BitMatrix, Carrier, EmbedMode, ScrambleKey, WatermarkKey};
//!
//! let cover = Carrier::with_shape((0..64u32).map(|v| (v * 3) as u8).collect(), 8, 8)?;
//! let wm = BitMatrix::new(2, 2, vec![true, false, false, true])?;
//! let key = WatermarkKey::new(ScrambleKey::new(42, 7, 20)?, 0, 3, EmbedMode::Substitute, 2, 2)?;
//!
//! let marked = cellmark::embed(&cover, &wm, &key)?;
//! assert_eq!(cellmark::extract(&marked, &key)?, wm);
//! # Ok::<(), cellmark::Error>(())
//! ```

pub mod attacks;
pub mod baselines;
pub mod ca;
mod error;
pub mod metrics;
pub mod permute;
pub mod prng;
pub mod watermark;

pub use ca::{ca_step, rule_table, seed_state, BitVector, RuleTable};
pub use error::{Error, Result};
pub use metrics::EvalReport;
pub use permute::{
    apply_permutation, harvest_coverage, invert, scramble_from_initial, scramble_permutation, Carrier, Permutation,
    ScrambleKey,
};
pub use prng::Prng64;
pub use watermark::{
    embed, embed_with_permutation, extract, extract_with_permutation, BitMatrix, EmbedMode,
    WatermarkKey,
};
