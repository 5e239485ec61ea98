//! Robustness attacks: impulse noise, random rectangular deletion, JPEG.
//!
//! Every attack keeps the image dimensions, so extraction never needs to
//! resynchronize.

use std::fmt;
use std::io::Cursor;
use std::str::FromStr;

use image::codecs::jpeg::JpegEncoder;
use image::{ExtendedColorType, ImageFormat};

use crate::error::{Error, Result};
use crate::permute::Carrier;
use crate::prng::Prng64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttackKind {
    Noise,
    Crop,
    Jpeg,
}

impl AttackKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            AttackKind::Noise => "noise",
            AttackKind::Crop => "crop",
            AttackKind::Jpeg => "jpeg",
        }
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AttackKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "noise" => Ok(AttackKind::Noise),
            "crop" => Ok(AttackKind::Crop),
            "jpeg" => Ok(AttackKind::Jpeg),
            other => Err(Error::OutOfRange(format!(
                "unknown attack {other:?}, expected noise, crop or jpeg"
            ))),
        }
    }
}

/// One attack with its parameter and (for stochastic kinds) its seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackSpec {
    pub kind: AttackKind,
    /// Noise density or crop fraction in `[0, 1]`; JPEG quality in `1..=100`.
    pub param: f64,
    pub seed: u64,
}

impl AttackSpec {
    pub fn new(kind: AttackKind, param: f64, seed: u64) -> Result<Self> {
        let spec = Self { kind, param, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            AttackKind::Noise | AttackKind::Crop => check_fraction(self.kind.as_str(), self.param),
            AttackKind::Jpeg => jpeg_quality(self.param).map(|_| ()),
        }
    }

    pub fn apply(&self, carrier: &Carrier) -> Result<Carrier> {
        match self.kind {
            AttackKind::Noise => salt_pepper(carrier, self.param, self.seed),
            AttackKind::Crop => crop_delete(carrier, self.param, self.seed),
            AttackKind::Jpeg => jpeg_roundtrip(carrier, jpeg_quality(self.param)?),
        }
    }
}

fn check_fraction(what: &str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("{what} parameter {value} outside [0, 1]")))
    }
}

fn jpeg_quality(param: f64) -> Result<u8> {
    if param.fract() == 0.0 && (1.0..=100.0).contains(&param) {
        Ok(param as u8)
    } else {
        Err(Error::OutOfRange(format!(
            "jpeg quality {param} must be an integer in 1..=100"
        )))
    }
}

/// Replaces each sample with probability `density` by 0 or 255.
///
/// Per sample one generator word decides replacement; a replaced sample
/// consumes one more word whose top bit picks 255 over 0.
pub fn salt_pepper(carrier: &Carrier, density: f64, seed: u64) -> Result<Carrier> {
    check_fraction("noise", density)?;
    carrier.require_shape()?;
    let mut rng = Prng64::new(seed);
    let mut out = carrier.clone();
    for sample in out.samples_mut() {
        if rng.next_f64() < density {
            *sample = if rng.next_bit() { 255 } else { 0 };
        }
    }
    Ok(out)
}

/// Side lengths of the deletion rectangle: each side scaled by `sqrt(fraction)`
/// and rounded, so the area is close to `fraction` of the image.
pub fn crop_rect_size(height: usize, width: usize, fraction: f64) -> (usize, usize) {
    let scale = fraction.sqrt();
    let h = ((height as f64 * scale).round() as usize).min(height);
    let w = ((width as f64 * scale).round() as usize).min(width);
    (h, w)
}

/// Zero-fills one randomly placed rectangle covering about `fraction` of the area.
pub fn crop_delete(carrier: &Carrier, fraction: f64, seed: u64) -> Result<Carrier> {
    check_fraction("crop", fraction)?;
    let (height, width) = carrier.require_shape()?;
    let (h, w) = crop_rect_size(height, width, fraction);
    let mut rng = Prng64::new(seed);
    let top = rng.next_below((height - h + 1) as u64) as usize;
    let left = rng.next_below((width - w + 1) as u64) as usize;
    zero_rect(carrier, top, left, h, w)
}

/// Zero-fills the rectangle at `(top, left)` of size `h x w`, clipped to the image.
pub fn zero_rect(carrier: &Carrier, top: usize, left: usize, h: usize, w: usize) -> Result<Carrier> {
    let (height, width) = carrier.require_shape()?;
    let mut out = carrier.clone();
    let rows = top.min(height)..top.saturating_add(h).min(height);
    let cols = left.min(width)..left.saturating_add(w).min(width);
    let samples = out.samples_mut();
    for r in rows {
        samples[r * width + cols.start..r * width + cols.end].fill(0);
    }
    Ok(out)
}

/// Encodes as baseline grayscale JPEG at `quality` and decodes back.
pub fn jpeg_roundtrip(carrier: &Carrier, quality: u8) -> Result<Carrier> {
    if !(1..=100).contains(&quality) {
        return Err(Error::OutOfRange(format!("jpeg quality {quality} outside 1..=100")));
    }
    let (height, width) = carrier.require_shape()?;
    if height == 0 || width == 0 {
        return Ok(carrier.clone());
    }
    let dim = |v: usize| u32::try_from(v).map_err(|_| Error::Attack(format!("{v} px too large for JPEG")));
    let mut bytes = Vec::new();
    JpegEncoder::new_with_quality(&mut bytes, quality)
        .encode(carrier.samples(), dim(width)?, dim(height)?, ExtendedColorType::L8)
        .map_err(|e| Error::Attack(format!("jpeg encode: {e}")))?;
    let decoded = image::load(Cursor::new(bytes), ImageFormat::Jpeg)
        .map_err(|e| Error::Attack(format!("jpeg decode: {e}")))?
        .into_luma8();
    if decoded.dimensions() != (dim(width)?, dim(height)?) {
        return Err(Error::Attack("jpeg round-trip changed dimensions".into()));
    }
    Carrier::with_shape(decoded.into_raw(), height, width)
}
