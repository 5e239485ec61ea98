//! Blind bit-plane watermarking in the scrambled domain.
//!
//! The payload is the watermark flattened row-major and repeated
//! `repetition` times back to back. It occupies the first
//! `repetition * bits` samples of the scrambled carrier; extraction reads the
//! same positions and takes a per-bit majority vote.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::permute::{apply_permutation, invert, scramble_permutation, Carrier, Permutation, ScrambleKey};

pub const DEFAULT_BIT_PLANE: u8 = 0;
pub const DEFAULT_REPETITION: usize = 9;

/// Binary watermark, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    bits: Vec<bool>,
    height: usize,
    width: usize,
}

impl BitMatrix {
    pub fn new(height: usize, width: usize, bits: Vec<bool>) -> Result<Self> {
        if height.checked_mul(width) != Some(bits.len()) {
            return Err(Error::Dimension(format!(
                "{height}x{width} watermark cannot hold {} bits",
                bits.len()
            )));
        }
        Ok(Self { bits, height, width })
    }

    pub fn zeros(height: usize, width: usize) -> Self {
        Self { bits: vec![false; height * width], height, width }
    }

    /// Thresholds gray levels: `>= 128` is a set bit.
    pub fn from_gray(height: usize, width: usize, gray: &[u8]) -> Result<Self> {
        Self::new(height, width, gray.iter().map(|&v| v >= 128).collect())
    }

    /// Bilevel rendering: set bits become 255, clear bits 0.
    pub fn to_gray(&self) -> Vec<u8> {
        self.bits.iter().map(|&b| if b { 255 } else { 0 }).collect()
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum EmbedMode {
    /// Target bit becomes `carrier_bit | payload_bit`. Can only set bits.
    Or,
    /// Target bit is replaced by the payload bit.
    #[default]
    Substitute,
}

impl EmbedMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            EmbedMode::Or => "or",
            EmbedMode::Substitute => "substitute",
        }
    }
}

impl fmt::Display for EmbedMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EmbedMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "or" => Ok(EmbedMode::Or),
            "substitute" => Ok(EmbedMode::Substitute),
            other => Err(Error::InvalidKey(format!(
                "unknown mode {other:?}, expected \"or\" or \"substitute\""
            ))),
        }
    }
}

/// Everything needed to embed and blindly recover a watermark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WatermarkKey {
    pub scramble: ScrambleKey,
    pub bit_plane: u8,
    pub repetition: usize,
    pub mode: EmbedMode,
    pub wm_height: usize,
    pub wm_width: usize,
}

impl WatermarkKey {
    pub fn new(
        scramble: ScrambleKey,
        bit_plane: u8,
        repetition: usize,
        mode: EmbedMode,
        wm_height: usize,
        wm_width: usize,
    ) -> Result<Self> {
        let key = Self { scramble, bit_plane, repetition, mode, wm_height, wm_width };
        key.validate()?;
        Ok(key)
    }

    pub fn validate(&self) -> Result<()> {
        if self.scramble.generations == 0 {
            return Err(Error::InvalidKey("generations must be at least 1".into()));
        }
        if self.bit_plane > 7 {
            return Err(Error::InvalidKey(format!(
                "bit_plane {} outside 0..=7",
                self.bit_plane
            )));
        }
        if self.repetition == 0 || self.repetition.is_multiple_of(2) {
            return Err(Error::InvalidKey(format!(
                "repetition {} must be odd and at least 1",
                self.repetition
            )));
        }
        if self.wm_height == 0 || self.wm_width == 0 {
            return Err(Error::InvalidKey("watermark dimensions must be positive".into()));
        }
        Ok(())
    }

    pub fn wm_bits(&self) -> usize {
        self.wm_height * self.wm_width
    }

    /// Samples touched by the payload.
    pub fn footprint(&self) -> Result<usize> {
        self.wm_bits()
            .checked_mul(self.repetition)
            .ok_or_else(|| Error::InvalidKey("payload footprint overflows".into()))
    }

    fn check_capacity(&self, available: usize) -> Result<usize> {
        let needed = self.footprint()?;
        if needed > available {
            return Err(Error::Capacity { needed, available });
        }
        Ok(needed)
    }

    fn check_watermark(&self, wm: &BitMatrix) -> Result<()> {
        if wm.height() != self.wm_height || wm.width() != self.wm_width {
            return Err(Error::Dimension(format!(
                "watermark is {}x{}, key expects {}x{}",
                wm.height(),
                wm.width(),
                self.wm_height,
                self.wm_width
            )));
        }
        Ok(())
    }
}

/// Scrambles with the key's CA permutation, writes the payload, unscrambles.
pub fn embed(carrier: &Carrier, wm: &BitMatrix, key: &WatermarkKey) -> Result<Carrier> {
    key.validate()?;
    key.check_watermark(wm)?;
    key.check_capacity(carrier.len())?;
    let perm = scramble_permutation(carrier.len(), &key.scramble)?;
    embed_with_permutation(carrier, wm, key, &perm)
}

/// Blind extraction with the key's CA permutation.
pub fn extract(carrier: &Carrier, key: &WatermarkKey) -> Result<BitMatrix> {
    key.validate()?;
    key.check_capacity(carrier.len())?;
    let perm = scramble_permutation(carrier.len(), &key.scramble)?;
    extract_with_permutation(carrier, key, &perm)
}

/// `embed` with a caller-supplied permutation in place of the CA scramble.
pub fn embed_with_permutation(
    carrier: &Carrier,
    wm: &BitMatrix,
    key: &WatermarkKey,
    perm: &Permutation,
) -> Result<Carrier> {
    key.validate()?;
    key.check_watermark(wm)?;
    check_perm(carrier, perm)?;
    key.check_capacity(carrier.len())?;

    let mask = 1u8 << key.bit_plane;
    let mut scrambled = apply_permutation(carrier, perm)?;
    let payload = wm.bits().iter().cycle().take(key.footprint()?);
    for (sample, &bit) in scrambled.samples_mut().iter_mut().zip(payload) {
        *sample = match (key.mode, bit) {
            (EmbedMode::Or, true) | (EmbedMode::Substitute, true) => *sample | mask,
            (EmbedMode::Or, false) => *sample,
            (EmbedMode::Substitute, false) => *sample & !mask,
        };
    }
    apply_permutation(&scrambled, &invert(perm))
}

/// `extract` with a caller-supplied permutation in place of the CA scramble.
pub fn extract_with_permutation(
    carrier: &Carrier,
    key: &WatermarkKey,
    perm: &Permutation,
) -> Result<BitMatrix> {
    key.validate()?;
    check_perm(carrier, perm)?;
    key.check_capacity(carrier.len())?;

    let width = key.wm_bits();
    let mask = 1u8 << key.bit_plane;
    let src = carrier.samples();
    let map = perm.as_slice();
    let bits = (0..width)
        .map(|i| {
            let ones = (0..key.repetition)
                .filter(|c| src[map[c * width + i]] & mask != 0)
                .count();
            ones * 2 > key.repetition
        })
        .collect();
    BitMatrix::new(key.wm_height, key.wm_width, bits)
}

fn check_perm(carrier: &Carrier, perm: &Permutation) -> Result<()> {
    if perm.len() != carrier.len() {
        return Err(Error::Dimension(format!(
            "permutation of length {} for a carrier of {} samples",
            perm.len(),
            carrier.len()
        )));
    }
    Ok(())
}
