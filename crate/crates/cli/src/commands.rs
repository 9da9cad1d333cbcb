use std::fs;
use std::path::{Path, PathBuf};

use jpegqim_core::jpeg::JpegImage;
use jpegqim_core::metrics::{ac_histogram, QualityReport};
use jpegqim_core::stego::{embed_message, extract_message, EmbedReport, StegoError};
use jpegqim_core::StegoParams;

use crate::error::CliError;

pub fn read_jpeg(path: &Path) -> Result<JpegImage, CliError> {
    let bytes = fs::read(path).map_err(CliError::io(path))?;
    JpegImage::parse(&bytes).map_err(CliError::jpeg(path))
}

/// Serializes `image` and checks that the bytes parse and decode again, so a
/// broken stream never reaches the disk.
pub fn verified_bytes(image: &JpegImage, path: &Path) -> Result<Vec<u8>, CliError> {
    let bytes = image.serialize().map_err(CliError::jpeg(path))?;
    let back = JpegImage::parse(&bytes).map_err(|e| CliError::Verification(e.to_string()))?;
    if back.coeff_planes() != image.coeff_planes() {
        return Err(CliError::Verification(
            "coefficients changed on re-read".into(),
        ));
    }
    back.decode_pixels();
    Ok(bytes)
}

pub fn embed(
    cover: &Path,
    message: &Path,
    output: &Path,
    params: &StegoParams,
) -> Result<(), CliError> {
    let image = read_jpeg(cover)?;
    let payload = fs::read(message).map_err(CliError::io(message))?;
    let (stego, report) = embed_message(&image, &payload, params)?;
    let bytes = verified_bytes(&stego, output)?;
    fs::write(output, bytes).map_err(CliError::io(output))?;
    print_report(&report);
    Ok(())
}

fn print_report(report: &EmbedReport) {
    println!("bits embedded: {}", report.bits_embedded);
    println!("capacity: {} bits", report.capacity_bits);
    println!("blocks used: {}", report.blocks_used);
    println!("mean step: {:.3}", report.mean_step());
    println!("step histogram:");
    for (q, n) in &report.step_histogram {
        println!("  q={q}: {n}");
    }
}

pub fn extract(stego: &Path, output: &Path, params: &StegoParams) -> Result<(), CliError> {
    let image = read_jpeg(stego)?;
    let payload = extract_message(&image, params).inspect_err(|e| {
        if matches!(e, StegoError::LengthOutOfRange { .. }) {
            eprintln!("no message found or wrong parameters");
        }
    })?;
    // A clean cover with empty high frequencies reads as a zero-length
    // header, which is indistinguishable from an embedded empty message.
    if payload.is_empty() {
        eprintln!("no message found or wrong parameters (header announces zero bytes)");
        return Err(StegoError::LengthOutOfRange {
            announced: 0,
            available: 0,
        }
        .into());
    }
    fs::write(output, &payload).map_err(CliError::io(output))?;
    println!("recovered {} bytes", payload.len());
    Ok(())
}

pub fn analyze(
    cover: &Path,
    stego: &Path,
    out_dir: &Path,
    lo: i32,
    hi: i32,
) -> Result<(), CliError> {
    let cover = read_jpeg(cover)?;
    let stego = read_jpeg(stego)?;
    let report = QualityReport::compare(&cover, &stego, lo, hi)?;
    println!("PSNR: {} dB", report.psnr_db);
    println!("MSE: {}", report.mse);
    println!("chi-square: {}", report.chi_square);
    println!("L1: {}", report.l1_distance);

    fs::create_dir_all(out_dir).map_err(CliError::io(out_dir))?;
    for (name, image) in [("cover_hist.csv", &cover), ("stego_hist.csv", &stego)] {
        let path: PathBuf = out_dir.join(name);
        let file = fs::File::create(&path).map_err(CliError::io(&path))?;
        ac_histogram(image, lo, hi)?.write_csv(file)?;
    }
    Ok(())
}

/// Transcodes without touching coefficients and reports whether the result
/// is identical at the coefficient, pixel and byte level.
pub fn recompress(input: &Path, output: Option<&Path>) -> Result<(), CliError> {
    let original = fs::read(input).map_err(CliError::io(input))?;
    let image = JpegImage::parse(&original).map_err(CliError::jpeg(input))?;
    let bytes = image.serialize().map_err(CliError::jpeg(input))?;
    let back = JpegImage::parse(&bytes).map_err(|e| CliError::Verification(e.to_string()))?;

    let coeffs = back.coeff_planes() == image.coeff_planes();
    let pixels = back.decode_pixels() == image.decode_pixels();
    println!("coefficients identical: {}", yes_no(coeffs));
    println!("pixels identical: {}", yes_no(pixels));
    println!("bytes identical: {}", yes_no(bytes == original));
    if !(coeffs && pixels) {
        return Err(CliError::Verification(
            "transcoding changed the image".into(),
        ));
    }
    if let Some(out) = output {
        fs::write(out, &bytes).map_err(CliError::io(out))?;
    }
    Ok(())
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}
