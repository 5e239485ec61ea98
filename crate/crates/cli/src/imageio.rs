//! Grayscale image files: binary PGM (P5) and 8-bit PNG.

use std::io::Write;
use std::path::Path;

use cellmark::Carrier;
use image::codecs::png::PngEncoder;
use image::{DynamicImage, ExtendedColorType, ImageEncoder};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Pgm,
    Png,
}

impl Format {
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        match ext.as_deref() {
            Some("pgm") => Ok(Format::Pgm),
            Some("png") => Ok(Format::Png),
            _ => Err(CliError::Usage(format!(
                "{}: output must end in .pgm or .png",
                path.display()
            ))),
        }
    }
}

/// Integer Rec.601 luma, rounded to nearest.
pub fn rec601(r: u8, g: u8, b: u8) -> u8 {
    ((299 * u32::from(r) + 587 * u32::from(g) + 114 * u32::from(b) + 500) / 1000) as u8
}

/// Image read as gray samples; `converted` is set when the file held color.
pub struct Loaded {
    pub carrier: Carrier,
    pub converted: bool,
}

pub fn read_gray(path: &Path) -> Result<Loaded> {
    let img = image::open(path).map_err(|source| match source {
        image::ImageError::IoError(source) => CliError::Io { path: path.into(), source },
        source => CliError::Image { path: path.into(), source },
    })?;
    let (width, height) = (img.width() as usize, img.height() as usize);
    let (samples, converted) = match img {
        DynamicImage::ImageLuma8(g) => (g.into_raw(), false),
        other if other.color().has_color() => {
            let rgb = other.into_rgb8();
            (rgb.pixels().map(|p| rec601(p[0], p[1], p[2])).collect(), true)
        }
        other => (other.into_luma8().into_raw(), false),
    };
    Ok(Loaded { carrier: Carrier::with_shape(samples, height, width)?, converted })
}

/// Like [`read_gray`], printing a warning to stderr on color input.
pub fn read_gray_warn(path: &Path) -> Result<Carrier> {
    let loaded = read_gray(path)?;
    if loaded.converted {
        eprintln!(
            "warning: {} is a color image; converted to grayscale (Rec.601)",
            path.display()
        );
    }
    Ok(loaded.carrier)
}

pub fn encode(carrier: &Carrier, format: Format) -> Result<Vec<u8>> {
    let (h, w) = carrier
        .shape()
        .ok_or_else(|| CliError::Usage("cannot write a carrier without a shape".into()))?;
    let mut out = Vec::with_capacity(carrier.len() + 32);
    match format {
        Format::Pgm => {
            write!(out, "P5\n{w} {h}\n255\n").expect("write to Vec");
            out.extend_from_slice(carrier.samples());
        }
        Format::Png => {
            PngEncoder::new(&mut out)
                .write_image(carrier.samples(), w as u32, h as u32, ExtendedColorType::L8)
                .map_err(|source| CliError::Image { path: "<png>".into(), source })?;
        }
    }
    Ok(out)
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io_err = |source| CliError::Io { path: path.into(), source };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

pub fn write_gray(path: &Path, carrier: &Carrier) -> Result<()> {
    let bytes = encode(carrier, Format::from_path(path)?)?;
    write_atomic(path, &bytes)
}
