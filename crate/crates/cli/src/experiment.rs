use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use jpegqim_core::jpeg::{JpegImage, PixelPlane};
use jpegqim_core::metrics::{ac_histogram, chi_square, psnr, Histogram};
use jpegqim_core::stego::{capacity, embed_message, embed_message_fixed_q, HEADER_BITS};
use jpegqim_core::{StegoParams, StepValue};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::CliError;

pub struct Settings {
    pub capacities: Vec<usize>,
    pub fixed_q: StepValue,
    pub seed: u64,
    pub params: StegoParams,
    pub lo: i32,
    pub hi: i32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub image_id: String,
    pub capacity_bits: usize,
    pub psnr_adaptive_db: f64,
    pub psnr_fixed_db: f64,
    pub chi2_adaptive: f64,
    pub chi2_fixed: f64,
    pub mean_q: f64,
}

/// One CSV line: a measured row or a skipped (image, capacity) pair.
#[derive(Debug, Clone, PartialEq)]
pub enum RowOutcome {
    Measured(ExperimentRow),
    Skipped {
        image_id: String,
        capacity_bits: usize,
        reason: String,
    },
}

impl RowOutcome {
    fn key(&self) -> (&str, usize) {
        match self {
            RowOutcome::Measured(r) => (&r.image_id, r.capacity_bits),
            RowOutcome::Skipped {
                image_id,
                capacity_bits,
                ..
            } => (image_id, *capacity_bits),
        }
    }
}

const COLUMNS: [&str; 8] = [
    "image_id",
    "capacity_bits",
    "psnr_adaptive_db",
    "psnr_fixed_db",
    "chi2_adaptive",
    "chi2_fixed",
    "mean_q",
    "status",
];

fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(CliError::io(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|x| x.to_str())
                .is_some_and(|x| matches!(x.to_ascii_lowercase().as_str(), "jpg" | "jpeg"))
        })
        .collect();
    files.sort();
    Ok(files)
}

/// Payload bytes for a `capacity`-bit run. Every capacity takes a prefix of
/// the same seeded stream, so larger runs extend smaller ones.
pub fn payload_for(seed: u64, capacity_bits: usize) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bytes = vec![0u8; capacity_bits.saturating_sub(HEADER_BITS) / 8];
    rng.fill_bytes(&mut bytes);
    bytes
}

struct Cover {
    image: JpegImage,
    pixels: PixelPlane,
    histogram: Histogram,
    capacity: usize,
}

fn measure(cover: &Cover, id: &str, bits: usize, s: &Settings) -> Result<ExperimentRow, CliError> {
    let payload = payload_for(s.seed, bits);
    let (adaptive, report) = embed_message(&cover.image, &payload, &s.params)?;
    let (fixed, _) = embed_message_fixed_q(&cover.image, &payload, s.fixed_q, &s.params)?;
    let stats = |stego: &JpegImage| -> Result<(f64, f64), CliError> {
        let p = psnr(&cover.pixels, &stego.decode_pixels())?;
        let c = chi_square(&cover.histogram, &ac_histogram(stego, s.lo, s.hi)?)?;
        Ok((p, c))
    };
    let (psnr_adaptive_db, chi2_adaptive) = stats(&adaptive)?;
    let (psnr_fixed_db, chi2_fixed) = stats(&fixed)?;
    Ok(ExperimentRow {
        image_id: id.to_owned(),
        capacity_bits: bits,
        psnr_adaptive_db,
        psnr_fixed_db,
        chi2_adaptive,
        chi2_fixed,
        mean_q: report.mean_step(),
    })
}

fn process_image(path: &Path, s: &Settings) -> Vec<RowOutcome> {
    let id = path
        .file_stem()
        .map(|x| x.to_string_lossy().into_owned())
        .unwrap_or_default();
    let skip_all = |reason: String| {
        s.capacities
            .iter()
            .map(|&c| RowOutcome::Skipped {
                image_id: id.clone(),
                capacity_bits: c,
                reason: reason.clone(),
            })
            .collect()
    };
    let image = match crate::commands::read_jpeg(path) {
        Ok(img) => img,
        Err(e) => return skip_all(e.to_string()),
    };
    let histogram = match ac_histogram(&image, s.lo, s.hi) {
        Ok(h) => h,
        Err(e) => return skip_all(e.to_string()),
    };
    let cover = Cover {
        pixels: image.decode_pixels(),
        capacity: capacity(&image, &s.params),
        histogram,
        image,
    };
    s.capacities
        .iter()
        .map(|&bits| {
            if bits > cover.capacity || bits < HEADER_BITS {
                return RowOutcome::Skipped {
                    image_id: id.clone(),
                    capacity_bits: bits,
                    reason: format!(
                        "capacity {bits} outside [{HEADER_BITS}, {}]",
                        cover.capacity
                    ),
                };
            }
            match measure(&cover, &id, bits, s) {
                Ok(row) => RowOutcome::Measured(row),
                Err(e) => RowOutcome::Skipped {
                    image_id: id.clone(),
                    capacity_bits: bits,
                    reason: e.to_string(),
                },
            }
        })
        .collect()
}

/// Runs the sweep over every JPEG in `dir`; rows come back sorted by
/// (image, capacity) regardless of scheduling.
pub fn run(dir: &Path, s: &Settings) -> Result<Vec<RowOutcome>, CliError> {
    let files = corpus_files(dir)?;
    let mut rows: Vec<RowOutcome> = files.par_iter().flat_map(|p| process_image(p, s)).collect();
    rows.sort_by(|a, b| a.key().cmp(&b.key()));
    Ok(rows)
}

fn fmt_f64(v: f64) -> String {
    if v.is_infinite() {
        "inf".to_owned()
    } else {
        format!("{v:.6}")
    }
}

pub fn write_csv<W: Write>(mut out: W, rows: &[RowOutcome], s: &Settings) -> Result<(), CliError> {
    writeln!(
        out,
        "# seed={} fixed_q={} split_index={} q_min={} q_max={} range={}..{}",
        s.seed,
        s.fixed_q.get(),
        s.params.split_index(),
        s.params.q_min(),
        s.params.q_max(),
        s.lo,
        s.hi
    )
    .map_err(|e| CliError::Csv(e.into()))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for row in rows {
        match row {
            RowOutcome::Measured(r) => w.write_record([
                r.image_id.clone(),
                r.capacity_bits.to_string(),
                fmt_f64(r.psnr_adaptive_db),
                fmt_f64(r.psnr_fixed_db),
                fmt_f64(r.chi2_adaptive),
                fmt_f64(r.chi2_fixed),
                fmt_f64(r.mean_q),
                "ok".to_owned(),
            ])?,
            RowOutcome::Skipped {
                image_id,
                capacity_bits,
                reason,
            } => w.write_record([
                image_id.clone(),
                capacity_bits.to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                format!("skipped: {reason}"),
            ])?,
        }
    }
    w.flush().map_err(|e| CliError::Csv(e.into()))?;
    Ok(())
}

/// Per-capacity means over measured rows: (capacity, adaptive, fixed, images).
pub fn summary(rows: &[RowOutcome], capacities: &[usize]) -> Vec<(usize, f64, f64, usize)> {
    let mut caps = capacities.to_vec();
    caps.sort_unstable();
    caps.dedup();
    caps.into_iter()
        .map(|c| {
            let measured: Vec<&ExperimentRow> = rows
                .iter()
                .filter_map(|r| match r {
                    RowOutcome::Measured(m) if m.capacity_bits == c => Some(m),
                    _ => None,
                })
                .collect();
            let n = measured.len();
            let mean = |f: fn(&ExperimentRow) -> f64| {
                if n == 0 {
                    f64::NAN
                } else {
                    measured.iter().map(|r| f(r)).sum::<f64>() / n as f64
                }
            };
            (
                c,
                mean(|r| r.psnr_adaptive_db),
                mean(|r| r.psnr_fixed_db),
                n,
            )
        })
        .collect()
}

pub fn report_summary(rows: &[RowOutcome], capacities: &[usize]) -> String {
    let mut text = String::new();
    for (c, adaptive, fixed, n) in summary(rows, capacities) {
        let _ = writeln!(
            text,
            "capacity {c}: mean PSNR adaptive {adaptive:.3} dB, fixed {fixed:.3} dB over {n} images"
        );
    }
    text
}
