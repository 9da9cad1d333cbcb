#![allow(dead_code)]

use std::path::{Path, PathBuf};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zune_core::bytestream::ZCursor;
use zune_core::colorspace::ColorSpace;
use zune_core::options::DecoderOptions;
use zune_jpeg::JpegDecoder;

fn data_dir(sub: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join(sub)
}

fn read_dir_sorted(dir: PathBuf) -> Vec<(String, Vec<u8>)> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "jpg"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            (name, std::fs::read(&p).unwrap())
        })
        .collect()
}

/// 512×512 grayscale QF-95 covers.
pub fn corpus() -> Vec<(String, Vec<u8>)> {
    read_dir_sorted(data_dir("corpus"))
}

/// Every baseline file in the corpus and fixtures.
pub fn baseline_files() -> Vec<(String, Vec<u8>)> {
    let mut all = corpus();
    all.extend(
        read_dir_sorted(data_dir("fixtures"))
            .into_iter()
            .filter(|(n, _)| n != "progressive"),
    );
    all
}

pub fn fixture(name: &str) -> Vec<u8> {
    std::fs::read(data_dir("fixtures").join(name)).unwrap()
}

/// Luminance plane from an independent decoder (zune-jpeg, strict mode).
pub fn reference_luma(bytes: &[u8]) -> (usize, usize, Vec<u8>) {
    let options = DecoderOptions::default()
        .set_strict_mode(true)
        .jpeg_set_out_colorspace(ColorSpace::Luma);
    let mut dec = JpegDecoder::new_with_options(ZCursor::new(bytes), options);
    let pixels = dec.decode().expect("reference decoder rejected the stream");
    let (w, h) = dec.dimensions().unwrap();
    (w, h, pixels)
}

/// Encodes a grayscale raster with an independent encoder (jpeg-encoder).
pub fn encode_gray(
    width: u16,
    height: u16,
    pixels: &[u8],
    quality: u8,
    restart: Option<u16>,
) -> Vec<u8> {
    let mut out = Vec::new();
    let mut enc = jpeg_encoder::Encoder::new(&mut out, quality);
    if let Some(r) = restart {
        enc.set_restart_interval(r);
    }
    enc.encode(pixels, width, height, jpeg_encoder::ColorType::Luma)
        .unwrap();
    out
}

pub fn random_bytes(seed: u64, len: usize) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = vec![0u8; len];
    rng.fill_bytes(&mut v);
    v
}

/// Smooth pseudo-natural raster: gradients plus mild noise.
pub fn textured_pixels(width: usize, height: usize, seed: u64) -> Vec<u8> {
    let noise = random_bytes(seed, width * height);
    (0..width * height)
        .map(|i| {
            let (x, y) = ((i % width) as f64, (i / width) as f64);
            let v =
                128.0 + 60.0 * (x / 9.0).sin() * (y / 13.0).cos() + (noise[i] as f64 - 128.0) / 8.0;
            v.clamp(0.0, 255.0) as u8
        })
        .collect()
}
