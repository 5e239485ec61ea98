//! Robustness benchmark: every method against every attack cell.
//!
//! For each cover, method and attack cell the harness embeds, attacks and
//! extracts, writes the attacked image and the extracted watermark, and emits
//! one CSV row. Rows come out in grid order regardless of which thread
//! finished first, so identical configs give byte-identical reports.
//!
//! Config (paths relative to the config file):
//!
//! ```json
//! {
//!   "covers": ["cover.pgm"],
//!   "watermark": "mark.pgm",
//!   "key": "key.json",
//!   "seeds": [1, 2, 3, 4, 5],
//!   "grid": [
//!     {"kind": "noise", "params": [0.1, 0.2]},
//!     {"kind": "jpeg", "range": [30, 80, 10]}
//!   ],
//!   "output_dir": "out"
//! }
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use cellmark::attacks::{AttackKind, AttackSpec};
use cellmark::baselines::fisher_yates_permutation;
use cellmark::metrics::{ber, gdd, nc, psnr, Gdd};
use cellmark::{
    apply_permutation, embed_with_permutation, extract_with_permutation, harvest_coverage,
    scramble_permutation, seed_state, BitMatrix, Carrier, Permutation, WatermarkKey,
};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::json;

use crate::error::{CliError, Result};
use crate::imageio::{self, Format};
use crate::keyfile::load_key;

pub const CSV_HEADER: [&str; 13] = [
    "cover",
    "method",
    "attack",
    "param",
    "seed",
    "ber",
    "nc",
    "psnr_marked_db",
    "psnr_attacked_db",
    "gdd",
    "e_gd",
    "status",
    "error",
];

/// Comparison methods the paper names but this toolkit does not reproduce.
pub const NOT_IMPLEMENTED: [&str; 3] = ["dct-domain", "2d-ca-rule-224", "2d-game-of-life"];

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridEntry {
    pub kind: String,
    #[serde(default)]
    pub params: Vec<f64>,
    /// Inclusive `[from, to, step]`.
    #[serde(default)]
    pub range: Option<[f64; 3]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub covers: Vec<PathBuf>,
    pub watermark: PathBuf,
    pub key: PathBuf,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    pub grid: Vec<GridEntry>,
    pub output_dir: PathBuf,
}

fn default_seeds() -> Vec<u64> {
    vec![1]
}

/// A validated benchmark configuration with resolved paths.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub covers: Vec<PathBuf>,
    pub watermark: PathBuf,
    pub key: WatermarkKey,
    pub seeds: Vec<u64>,
    pub attacks: Vec<(AttackKind, f64)>,
    pub output_dir: PathBuf,
}

fn expand_range(from: f64, to: f64, step: f64) -> std::result::Result<Vec<f64>, String> {
    if step.is_nan() || step <= 0.0 || to < from {
        return Err(format!("bad range [{from}, {to}, {step}]"));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| ((from + i as f64 * step) * 1e9).round() / 1e9)
        .collect())
}

impl BenchConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Io { path: path.into(), source })?;
        let raw: RawConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config { path: path.into(), msg: e.to_string() })?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::resolve(raw, base, path)
    }

    pub fn resolve(raw: RawConfig, base: &Path, origin: &Path) -> Result<Self> {
        let bad = |msg: String| CliError::Config { path: origin.into(), msg };
        let at = |p: &Path| if p.is_absolute() { p.to_path_buf() } else { base.join(p) };

        if raw.covers.is_empty() {
            return Err(bad("no covers".into()));
        }
        if raw.seeds.is_empty() {
            return Err(bad("no seeds".into()));
        }
        let mut attacks = Vec::new();
        for entry in &raw.grid {
            let kind: AttackKind = entry.kind.parse().map_err(|e: cellmark::Error| bad(e.to_string()))?;
            let mut params = entry.params.clone();
            if let Some([from, to, step]) = entry.range {
                params.extend(expand_range(from, to, step).map_err(bad)?);
            }
            if params.is_empty() {
                return Err(bad(format!("{kind} entry has no parameters")));
            }
            for p in params {
                AttackSpec::new(kind, p, 0).map_err(|e| bad(e.to_string()))?;
                attacks.push((kind, p));
            }
        }
        if attacks.is_empty() {
            return Err(bad("attack grid is empty".into()));
        }

        let covers: Vec<PathBuf> = raw.covers.iter().map(|p| at(p)).collect();
        let watermark = at(&raw.watermark);
        let key_path = at(&raw.key);
        let output_dir = at(&raw.output_dir);
        let out_abs = absolute(&output_dir);
        for input in covers.iter().chain([&watermark, &key_path]) {
            if absolute(input).starts_with(&out_abs) {
                return Err(bad(format!(
                    "input {} lies inside output directory {}",
                    input.display(),
                    output_dir.display()
                )));
            }
        }
        let stems: Vec<String> = covers.iter().map(|c| cover_label(c)).collect();
        for (i, s) in stems.iter().enumerate() {
            if stems[..i].contains(s) {
                return Err(bad(format!("two covers share the name {s}")));
            }
        }

        Ok(Self {
            covers,
            watermark,
            key: load_key(&key_path)?,
            seeds: raw.seeds,
            attacks,
            output_dir,
        })
    }
}

fn absolute(p: &Path) -> PathBuf {
    let joined = if p.is_absolute() {
        p.to_path_buf()
    } else {
        std::env::current_dir().unwrap_or_default().join(p)
    };
    // lexical normalization; the output directory may not exist yet
    let mut out = PathBuf::new();
    for c in joined.components() {
        match c {
            std::path::Component::ParentDir => {
                out.pop();
            }
            std::path::Component::CurDir => {}
            other => out.push(other),
        }
    }
    out
}

fn cover_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "cover".into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    CaScramble,
    FisherYates,
    DirectLsb,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::CaScramble, Method::FisherYates, Method::DirectLsb];

    pub fn label(&self, key: &WatermarkKey) -> String {
        match self {
            Method::CaScramble => format!("ca-rule-{}", key.scramble.rule),
            Method::FisherYates => "fisher-yates".into(),
            Method::DirectLsb => "direct-lsb".into(),
        }
    }

    pub fn permutation(&self, len: usize, key: &WatermarkKey) -> cellmark::Result<Permutation> {
        match self {
            Method::CaScramble => scramble_permutation(len, &key.scramble),
            Method::FisherYates => Ok(fisher_yates_permutation(len, key.scramble.seed)),
            Method::DirectLsb => Ok(Permutation::identity(len)),
        }
    }
}

/// Fixed-precision rendering so reports are stable and diffable.
pub struct Num(pub f64);

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            f.write_str(if self.0 > 0.0 { "inf" } else { "-inf" })
        } else {
            write!(f, "{:.6}", self.0)
        }
    }
}

fn param_label(kind: AttackKind, param: f64) -> String {
    match kind {
        AttackKind::Jpeg => format!("{param:.0}"),
        _ => format!("{param}"),
    }
}

#[derive(Debug, Clone)]
pub struct CellResult {
    pub cover: String,
    pub method: String,
    pub attack: AttackKind,
    pub param: f64,
    pub seed: u64,
    pub outcome: std::result::Result<CellMetrics, String>,
}

#[derive(Debug, Clone, Copy)]
pub struct CellMetrics {
    pub ber: f64,
    pub nc: f64,
    pub psnr_marked_db: f64,
    pub psnr_attacked_db: f64,
    pub gdd: f64,
    pub e_gd: f64,
}

impl CellResult {
    fn csv_record(&self) -> Vec<String> {
        let mut row = vec![
            self.cover.clone(),
            self.method.clone(),
            self.attack.to_string(),
            param_label(self.attack, self.param),
            self.seed.to_string(),
        ];
        match &self.outcome {
            Ok(m) => {
                row.extend(
                    [m.ber, m.nc, m.psnr_marked_db, m.psnr_attacked_db, m.gdd, m.e_gd]
                        .map(|v| Num(v).to_string()),
                );
                row.extend(["ok".to_string(), String::new()]);
            }
            Err(e) => {
                row.extend(std::iter::repeat_n(String::new(), 6));
                row.extend(["error".to_string(), e.clone()]);
            }
        }
        row
    }
}

/// Everything needed to run cells for one (cover, method) pair.
struct Prepared {
    cover_label: String,
    method_label: String,
    cover: Carrier,
    perm: Permutation,
    marked: Carrier,
    psnr_marked: f64,
    scramble: Gdd,
}

pub struct BenchReport {
    pub cells: Vec<CellResult>,
    pub coverage: BTreeMap<String, Vec<usize>>,
}

impl BenchReport {
    pub fn failures(&self) -> usize {
        self.cells.iter().filter(|c| c.outcome.is_err()).count()
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER)?;
        for cell in &self.cells {
            w.write_record(cell.csv_record())?;
        }
        w.into_inner()
            .map_err(|e| CliError::Usage(format!("csv flush: {e}")))
    }

    /// Means over seeds per (cover, method, attack, param), in grid order.
    pub fn summary(&self, key: &WatermarkKey) -> serde_json::Value {
        struct Group<'a> {
            first: &'a CellResult,
            ok: Vec<&'a CellMetrics>,
            failed: usize,
        }
        let mut groups: Vec<Group> = Vec::new();
        for cell in &self.cells {
            let pos = groups.iter().position(|g| {
                let f = g.first;
                f.cover == cell.cover && f.method == cell.method && f.attack == cell.attack && f.param == cell.param
            });
            let group = match pos {
                Some(i) => &mut groups[i],
                None => {
                    groups.push(Group { first: cell, ok: Vec::new(), failed: 0 });
                    groups.last_mut().expect("just pushed")
                }
            };
            match &cell.outcome {
                Ok(m) => group.ok.push(m),
                Err(_) => group.failed += 1,
            }
        }
        let mean = |xs: &[&CellMetrics], f: fn(&CellMetrics) -> f64| {
            if xs.is_empty() {
                serde_json::Value::Null
            } else {
                let m = xs.iter().map(|c| f(c)).sum::<f64>() / xs.len() as f64;
                json!(Num(m).to_string())
            }
        };
        let rows: Vec<_> = groups
            .iter()
            .map(|g| {
                json!({
                    "cover": g.first.cover,
                    "method": g.first.method,
                    "attack": g.first.attack.as_str(),
                    "param": param_label(g.first.attack, g.first.param),
                    "runs": g.ok.len(),
                    "failed": g.failed,
                    "mean_ber": mean(&g.ok, |c| c.ber),
                    "mean_nc": mean(&g.ok, |c| c.nc),
                    "mean_psnr_attacked_db": mean(&g.ok, |c| c.psnr_attacked_db),
                    "psnr_marked_db": mean(&g.ok, |c| c.psnr_marked_db),
                    "gdd": mean(&g.ok, |c| c.gdd),
                })
            })
            .collect();
        json!({
            "key": crate::keyfile::KeyFile::from(key),
            "cells": self.cells.len(),
            "failed": self.failures(),
            "groups": rows,
            "harvest_coverage": self.coverage,
            "not_implemented": NOT_IMPLEMENTED,
        })
    }
}

fn prepare(
    cover_label: &str,
    cover: &Carrier,
    wm: &BitMatrix,
    key: &WatermarkKey,
    method: Method,
) -> cellmark::Result<Prepared> {
    let perm = method.permutation(cover.len(), key)?;
    let marked = embed_with_permutation(cover, wm, key, &perm)?;
    let scrambled = apply_permutation(cover, &perm)?;
    Ok(Prepared {
        cover_label: cover_label.to_owned(),
        method_label: method.label(key),
        psnr_marked: psnr(cover, &marked)?,
        scramble: gdd(cover, &scrambled)?,
        cover: cover.clone(),
        perm,
        marked,
    })
}

fn run_cell(
    prep: &Prepared,
    wm: &BitMatrix,
    key: &WatermarkKey,
    attack: AttackSpec,
    cell_dir: Option<&Path>,
) -> std::result::Result<CellMetrics, String> {
    let attacked = attack.apply(&prep.marked).map_err(|e| e.to_string())?;
    let extracted = extract_with_permutation(&attacked, key, &prep.perm).map_err(|e| e.to_string())?;
    if let Some(dir) = cell_dir {
        std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
        let wm_img = Carrier::with_shape(extracted.to_gray(), extracted.height(), extracted.width())
            .map_err(|e| e.to_string())?;
        for (name, img) in [("attacked.png", &attacked), ("extracted.png", &wm_img)] {
            let bytes = imageio::encode(img, Format::Png).map_err(|e| e.to_string())?;
            imageio::write_atomic(&dir.join(name), &bytes).map_err(|e| e.to_string())?;
        }
    }
    Ok(CellMetrics {
        ber: ber(wm, &extracted).map_err(|e| e.to_string())?,
        nc: nc(wm, &extracted).map_err(|e| e.to_string())?,
        psnr_marked_db: prep.psnr_marked,
        psnr_attacked_db: psnr(&prep.cover, &attacked).map_err(|e| e.to_string())?,
        gdd: prep.scramble.normalized,
        e_gd: prep.scramble.e_test,
    })
}

/// Runs the whole grid in memory. With `write_images`, per-cell images go
/// under `cells/<cover>/<method>/<attack>-<param>-s<seed>/`.
pub fn run(config: &BenchConfig, write_images: bool) -> Result<BenchReport> {
    let key = &config.key;
    let wm_img = imageio::read_gray_warn(&config.watermark)?;
    let (wh, ww) = wm_img.shape().expect("images have a shape");
    if (wh, ww) != (key.wm_height, key.wm_width) {
        return Err(cellmark::Error::Dimension(format!(
            "watermark image is {wh}x{ww}, key expects {}x{}",
            key.wm_height, key.wm_width
        ))
        .into());
    }
    let wm = BitMatrix::from_gray(wh, ww, wm_img.samples())?;

    let mut covers = Vec::new();
    let mut coverage = BTreeMap::new();
    for path in &config.covers {
        let label = cover_label(path);
        let cover = imageio::read_gray_warn(path)?;
        coverage.insert(
            label.clone(),
            harvest_coverage(
                &seed_state(key.scramble.seed, cover.len()),
                u32::from(key.scramble.rule),
                key.scramble.generations,
            )?,
        );
        covers.push((label, cover));
    }

    let preps: Vec<(usize, std::result::Result<Prepared, String>)> = covers
        .iter()
        .flat_map(|(label, cover)| Method::ALL.map(|m| (label, cover, m)))
        .enumerate()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(i, (label, cover, m))| {
            (i, prepare(label, cover, &wm, key, m).map_err(|e| format!("{}: {e}", m.label(key))))
        })
        .collect();

    let mut jobs = Vec::new();
    for (ci, (label, _)) in covers.iter().enumerate() {
        for (mi, method) in Method::ALL.iter().enumerate() {
            for &(kind, param) in &config.attacks {
                for &seed in &config.seeds {
                    jobs.push((ci * Method::ALL.len() + mi, label.clone(), method.label(key), kind, param, seed));
                }
            }
        }
    }

    let cells = jobs
        .into_par_iter()
        .map(|(pi, cover, method, kind, param, seed)| {
            let outcome = match &preps[pi].1 {
                Err(e) => Err(e.clone()),
                Ok(prep) => {
                    debug_assert_eq!((&prep.cover_label, &prep.method_label), (&cover, &method));
                    let dir = write_images.then(|| {
                        config
                            .output_dir
                            .join("cells")
                            .join(&cover)
                            .join(&method)
                            .join(format!("{kind}-{}-s{seed}", param_label(kind, param)))
                    });
                    AttackSpec::new(kind, param, seed)
                        .map_err(|e| e.to_string())
                        .and_then(|spec| run_cell(prep, &wm, key, spec, dir.as_deref()))
                }
            };
            CellResult { cover, method, attack: kind, param, seed, outcome }
        })
        .collect();

    Ok(BenchReport { cells, coverage })
}

/// Runs the grid and writes `report.csv`, `summary.json` and cell images.
pub fn run_and_write(config: &BenchConfig) -> Result<BenchReport> {
    let out = &config.output_dir;
    std::fs::create_dir_all(out).map_err(|source| CliError::Io { path: out.clone(), source })?;
    let report = run(config, true)?;
    imageio::write_atomic(&out.join("report.csv"), &report.to_csv()?)?;
    let mut summary = serde_json::to_string_pretty(&report.summary(&config.key)).expect("json");
    summary.push('\n');
    imageio::write_atomic(&out.join("summary.json"), summary.as_bytes())?;
    Ok(report)
}
