//! On-disk watermark keys.
//!
//! A key is a flat JSON object with exactly these fields:
//!
//! ```json
//! {"seed": 2024, "rule": 7, "generations": 20, "bit_plane": 0,
//!  "repetition": 9, "mode": "substitute", "wm_height": 32, "wm_width": 32}
//! ```

use std::path::Path;

use cellmark::{EmbedMode, ScrambleKey, WatermarkKey};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeyFile {
    pub seed: u64,
    pub rule: u32,
    pub generations: u32,
    pub bit_plane: u8,
    pub repetition: usize,
    pub mode: String,
    pub wm_height: usize,
    pub wm_width: usize,
}

impl KeyFile {
    pub fn to_key(&self) -> cellmark::Result<WatermarkKey> {
        WatermarkKey::new(
            ScrambleKey::new(self.seed, self.rule, self.generations)?,
            self.bit_plane,
            self.repetition,
            self.mode.parse()?,
            self.wm_height,
            self.wm_width,
        )
    }
}

impl From<&WatermarkKey> for KeyFile {
    fn from(key: &WatermarkKey) -> Self {
        Self {
            seed: key.scramble.seed,
            rule: u32::from(key.scramble.rule),
            generations: key.scramble.generations,
            bit_plane: key.bit_plane,
            repetition: key.repetition,
            mode: key.mode.as_str().to_owned(),
            wm_height: key.wm_height,
            wm_width: key.wm_width,
        }
    }
}

pub fn parse_key(text: &str) -> std::result::Result<WatermarkKey, String> {
    let file: KeyFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
    file.to_key().map_err(|e| e.to_string())
}

pub fn render_key(key: &WatermarkKey) -> String {
    let mut text = serde_json::to_string_pretty(&KeyFile::from(key)).expect("key serializes");
    text.push('\n');
    text
}

pub fn load_key(path: &Path) -> Result<WatermarkKey> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| CliError::Io { path: path.into(), source })?;
    parse_key(&text).map_err(|msg| CliError::Key { path: path.into(), msg })
}

/// Key with the default scrambler settings for a watermark of the given size.
pub fn default_key(seed: u64, wm_height: usize, wm_width: usize) -> cellmark::Result<WatermarkKey> {
    WatermarkKey::new(
        ScrambleKey::with_seed(seed),
        cellmark::watermark::DEFAULT_BIT_PLANE,
        cellmark::watermark::DEFAULT_REPETITION,
        EmbedMode::default(),
        wm_height,
        wm_width,
    )
}
