use std::path::{Path, PathBuf};

use cellmark::attacks::{AttackKind, AttackSpec};
use cellmark::metrics::{ber, gdd, gray_difference_mean, histogram, nc, psnr};
use cellmark::{
    apply_permutation, embed, extract, invert, scramble_permutation, BitMatrix, Carrier,
    EmbedMode, ScrambleKey, WatermarkKey,
};
use serde_json::{json, Value};

use crate::bench::{self, BenchConfig, Num};
use crate::error::{CliError, Result};
use crate::imageio::{self, read_gray_warn, write_gray, Format};
use crate::keyfile::{load_key, render_key};

fn check_output(path: &Path) -> Result<Format> {
    Format::from_path(path)
}

pub fn scramble(input: &Path, key: &Path, out: &Path, inverse: bool) -> Result<()> {
    check_output(out)?;
    let key = load_key(key)?;
    let img = read_gray_warn(input)?;
    let perm = scramble_permutation(img.len(), &key.scramble)?;
    let perm = if inverse { invert(&perm) } else { perm };
    write_gray(out, &apply_permutation(&img, &perm)?)
}

fn read_watermark(path: &Path, key: &WatermarkKey) -> Result<BitMatrix> {
    let img = read_gray_warn(path)?;
    let (h, w) = img.shape().expect("images have a shape");
    if (h, w) != (key.wm_height, key.wm_width) {
        return Err(cellmark::Error::Dimension(format!(
            "{}: watermark is {h}x{w}, key expects {}x{}",
            path.display(),
            key.wm_height,
            key.wm_width
        ))
        .into());
    }
    Ok(BitMatrix::from_gray(h, w, img.samples())?)
}

pub fn embed_cmd(input: &Path, wm: &Path, key: &Path, out: &Path) -> Result<()> {
    check_output(out)?;
    let key = load_key(key)?;
    let wm = read_watermark(wm, &key)?;
    let cover = read_gray_warn(input)?;
    write_gray(out, &embed(&cover, &wm, &key)?)
}

pub fn extract_cmd(input: &Path, key: &Path, out: &Path) -> Result<()> {
    check_output(out)?;
    let key = load_key(key)?;
    let marked = read_gray_warn(input)?;
    let wm = extract(&marked, &key)?;
    let img = Carrier::with_shape(wm.to_gray(), wm.height(), wm.width())?;
    write_gray(out, &img)
}

pub fn attack(kind: &str, param: f64, seed: u64, input: &Path, out: &Path) -> Result<()> {
    check_output(out)?;
    let kind: AttackKind = kind.parse().map_err(|e: cellmark::Error| CliError::Usage(e.to_string()))?;
    let spec = AttackSpec::new(kind, param, seed)?;
    let img = read_gray_warn(input)?;
    write_gray(out, &spec.apply(&img)?)
}

pub struct KeygenOptions {
    pub seed: u64,
    pub rule: u32,
    pub generations: u32,
    pub bit_plane: u8,
    pub repetition: usize,
    pub mode: EmbedMode,
}

/// Writes a key sized from `wm` (an image) or an explicit `size`.
pub fn keygen(out: &Path, wm: Option<&Path>, size: Option<(usize, usize)>, opts: &KeygenOptions) -> Result<()> {
    let (h, w) = match (wm, size) {
        (Some(p), _) => read_gray_warn(p)?.shape().expect("images have a shape"),
        (None, Some(s)) => s,
        (None, None) => return Err(CliError::Usage("keygen needs --wm or --size".into())),
    };
    let key = WatermarkKey::new(
        ScrambleKey::new(opts.seed, opts.rule, opts.generations)?,
        opts.bit_plane,
        opts.repetition,
        opts.mode,
        h,
        w,
    )?;
    imageio::write_atomic(out, render_key(&key).as_bytes())
}

fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(Num(v).to_string())
    }
}

fn read_bits(path: &Path) -> Result<BitMatrix> {
    let img = read_gray_warn(path)?;
    let (h, w) = img.shape().expect("images have a shape");
    Ok(BitMatrix::from_gray(h, w, img.samples())?)
}

/// One metric as a JSON object.
pub fn metrics(kind: &str, a: &Path, b: Option<&Path>) -> Result<Value> {
    let second = || {
        b.ok_or_else(|| CliError::Usage(format!("metric {kind} needs two inputs")))
    };
    let value = match kind {
        "egd" => json!({"metric": "egd", "e_gd": num(gray_difference_mean(&read_gray_warn(a)?)?)}),
        "histogram" => {
            let counts = histogram(&read_gray_warn(a)?);
            json!({"metric": "histogram", "counts": counts.to_vec()})
        }
        "gdd" => {
            let g = gdd(&read_gray_warn(a)?, &read_gray_warn(second()?)?)?;
            json!({
                "metric": "gdd",
                "gdd_normalized": num(g.normalized),
                "gdd_raw": num(g.raw),
                "e_gd_original": num(g.e_original),
                "e_gd_test": num(g.e_test),
            })
        }
        "psnr" => json!({"metric": "psnr", "psnr_db": num(psnr(&read_gray_warn(a)?, &read_gray_warn(second()?)?)?)}),
        "histeq" => {
            let eq = histogram(&read_gray_warn(a)?) == histogram(&read_gray_warn(second()?)?);
            json!({"metric": "histeq", "histogram_equal": eq})
        }
        "ber" => json!({"metric": "ber", "ber": num(ber(&read_bits(a)?, &read_bits(second()?)?)?)}),
        "nc" => json!({"metric": "nc", "nc": num(nc(&read_bits(a)?, &read_bits(second()?)?)?)}),
        other => {
            return Err(CliError::Usage(format!(
                "unknown metric {other:?}; expected egd, gdd, psnr, histogram, histeq, ber or nc"
            )))
        }
    };
    Ok(value)
}

pub fn bench_cmd(config: &Path) -> Result<PathBuf> {
    let config = BenchConfig::load(config)?;
    let report = bench::run_and_write(&config)?;
    for cell in report.cells.iter().filter(|c| c.outcome.is_err()) {
        if let Err(e) = &cell.outcome {
            eprintln!(
                "cell {}/{}/{}-{}-s{} failed: {e}",
                cell.cover, cell.method, cell.attack, cell.param, cell.seed
            );
        }
    }
    match report.failures() {
        0 => Ok(config.output_dir),
        n => Err(CliError::BenchFailures(n)),
    }
}
