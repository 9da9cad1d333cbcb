//! Visual quality and histogram-level detectability measures.

use std::io::Write;

use thiserror::Error;

use crate::jpeg::{JpegImage, PixelPlane};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("plane dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("histogram ranges differ: [{0}, {1}] vs [{2}, {3}]")]
    RangeMismatch(i32, i32, i32, i32),
    #[error("invalid histogram range [{0}, {1}]")]
    InvalidRange(i32, i32),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub const DEFAULT_HIST_LO: i32 = -60;
pub const DEFAULT_HIST_HI: i32 = 60;

/// Occurrence counts of integer values in `[lo, hi]`, plus an overflow bucket.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    lo: i32,
    hi: i32,
    counts: Vec<u64>,
    overflow: u64,
}

impl Histogram {
    pub fn new(lo: i32, hi: i32) -> Result<Self, MetricsError> {
        if lo > hi {
            return Err(MetricsError::InvalidRange(lo, hi));
        }
        Ok(Histogram {
            lo,
            hi,
            counts: vec![0; (hi as i64 - lo as i64 + 1) as usize],
            overflow: 0,
        })
    }

    pub fn add(&mut self, value: i32) {
        if (self.lo..=self.hi).contains(&value) {
            self.counts[(value as i64 - self.lo as i64) as usize] += 1;
        } else {
            self.overflow += 1;
        }
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    pub fn hi(&self) -> i32 {
        self.hi
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn overflow(&self) -> u64 {
        self.overflow
    }

    pub fn count(&self, value: i32) -> u64 {
        if (self.lo..=self.hi).contains(&value) {
            self.counts[(value as i64 - self.lo as i64) as usize]
        } else {
            0
        }
    }

    /// Binned plus overflow count.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.overflow
    }

    fn check_range(&self, other: &Histogram) -> Result<(), MetricsError> {
        if self.lo != other.lo || self.hi != other.hi {
            return Err(MetricsError::RangeMismatch(
                self.lo, self.hi, other.lo, other.hi,
            ));
        }
        Ok(())
    }

    /// Two-column `value,count` CSV with a final `overflow` row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), MetricsError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["value", "count"])?;
        for (i, &n) in self.counts.iter().enumerate() {
            let value = self.lo as i64 + i as i64;
            w.write_record([value.to_string(), n.to_string()])?;
        }
        w.write_record(["overflow".to_string(), self.overflow.to_string()])?;
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

/// Mean squared error between two planes of equal size.
pub fn mse(a: &PixelPlane, b: &PixelPlane) -> Result<f64, MetricsError> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(MetricsError::DimensionMismatch(
            a.width(),
            a.height(),
            b.width(),
            b.height(),
        ));
    }
    let n = a.samples().len();
    if n == 0 {
        return Ok(0.0);
    }
    let sum: u64 = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(&x, &y)| {
            let d = x as i64 - y as i64;
            (d * d) as u64
        })
        .sum();
    Ok(sum as f64 / n as f64)
}

fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (255.0 * 255.0 / mse).log10()
    }
}

/// Peak signal-to-noise ratio in dB; `+inf` for identical planes.
pub fn psnr(a: &PixelPlane, b: &PixelPlane) -> Result<f64, MetricsError> {
    Ok(psnr_from_mse(mse(a, b)?))
}

/// Histogram of all luma AC coefficients (zigzag 1..=63) over every block.
pub fn ac_histogram(image: &JpegImage, lo: i32, hi: i32) -> Result<Histogram, MetricsError> {
    let mut h = Histogram::new(lo, hi)?;
    for block in image.luma_plane().blocks() {
        for &c in block.ac() {
            h.add(c);
        }
    }
    Ok(h)
}

/// Symmetric chi-square distance `Σ (a−b)² / (a+b)` over bins, skipping
/// bins that are empty in both.
pub fn chi_square(h1: &Histogram, h2: &Histogram) -> Result<f64, MetricsError> {
    h1.check_range(h2)?;
    Ok(h1
        .counts
        .iter()
        .zip(&h2.counts)
        .filter(|(&a, &b)| a + b > 0)
        .map(|(&a, &b)| {
            let d = a as f64 - b as f64;
            d * d / (a + b) as f64
        })
        .sum())
}

/// `Σ |a−b|` over bins and the overflow bucket.
pub fn l1_distance(h1: &Histogram, h2: &Histogram) -> Result<f64, MetricsError> {
    h1.check_range(h2)?;
    let bins: u64 = h1
        .counts
        .iter()
        .zip(&h2.counts)
        .map(|(&a, &b)| a.abs_diff(b))
        .sum();
    Ok((bins + h1.overflow.abs_diff(h2.overflow)) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityReport {
    pub psnr_db: f64,
    pub mse: f64,
    pub chi_square: f64,
    pub l1_distance: f64,
}

impl QualityReport {
    /// Compares a cover and stego image: decoded luma for PSNR/MSE, AC
    /// histograms over `[lo, hi]` for the distances.
    pub fn compare(
        cover: &JpegImage,
        stego: &JpegImage,
        lo: i32,
        hi: i32,
    ) -> Result<Self, MetricsError> {
        let mse = mse(&cover.decode_pixels(), &stego.decode_pixels())?;
        let hc = ac_histogram(cover, lo, hi)?;
        let hs = ac_histogram(stego, lo, hi)?;
        Ok(QualityReport {
            psnr_db: psnr_from_mse(mse),
            mse,
            chi_square: chi_square(&hc, &hs)?,
            l1_distance: l1_distance(&hc, &hs)?,
        })
    }

    /// Header row plus one data row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), MetricsError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["psnr_db", "mse", "chi_square", "l1_distance"])?;
        w.write_record([
            self.psnr_db.to_string(),
            self.mse.to_string(),
            self.chi_square.to_string(),
            self.l1_distance.to_string(),
        ])?;
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hist(lo: i32, counts: &[u64]) -> Histogram {
        Histogram {
            lo,
            hi: lo + counts.len() as i32 - 1,
            counts: counts.to_vec(),
            overflow: 0,
        }
    }

    #[test]
    fn psnr_identical_is_infinite() {
        let a = PixelPlane::filled(4, 4, 17);
        assert_eq!(psnr(&a, &a).unwrap(), f64::INFINITY);
    }

    #[test]
    fn psnr_single_sample_difference() {
        let a = PixelPlane::filled(512, 512, 0);
        let mut b = a.clone();
        b.samples_mut()[12345] = 255;
        let expected = 10.0 * 262144f64.log10();
        assert!((psnr(&a, &b).unwrap() - expected).abs() < 1e-9);
        assert!((expected - 54.185).abs() < 1e-3);
    }

    #[test]
    fn psnr_unit_offset() {
        let a = PixelPlane::filled(64, 32, 100);
        let b = PixelPlane::filled(64, 32, 101);
        let got = psnr(&a, &b).unwrap();
        assert!((got - 10.0 * 65025f64.log10()).abs() < 1e-9);
        assert!((got - 48.13).abs() < 0.01);
        assert_eq!(psnr(&b, &a).unwrap(), got);
    }

    #[test]
    fn psnr_dimension_mismatch() {
        let a = PixelPlane::filled(4, 4, 0);
        let b = PixelPlane::filled(4, 5, 0);
        assert!(matches!(
            psnr(&a, &b),
            Err(MetricsError::DimensionMismatch(..))
        ));
    }

    #[test]
    fn chi_square_examples() {
        let h1 = hist(0, &[4, 0]);
        let h2 = hist(0, &[0, 4]);
        assert_eq!(chi_square(&h1, &h2).unwrap(), 8.0);
        assert_eq!(chi_square(&h1, &h1).unwrap(), 0.0);
        assert_eq!(l1_distance(&h1, &h2).unwrap(), 8.0);
        assert!(matches!(
            chi_square(&h1, &hist(1, &[0, 4])),
            Err(MetricsError::RangeMismatch(..))
        ));
    }

    #[test]
    fn histogram_binning_and_overflow() {
        let mut h = Histogram::new(-2, 2).unwrap();
        for v in [-3, -2, 0, 0, 2, 7] {
            h.add(v);
        }
        assert_eq!(h.counts(), &[1, 0, 2, 0, 1]);
        assert_eq!(h.overflow(), 2);
        assert_eq!(h.total(), 6);
        assert_eq!(h.count(0), 2);
        assert!(Histogram::new(3, 2).is_err());
    }

    #[test]
    fn histogram_csv_rows() {
        let mut h = Histogram::new(-1, 1).unwrap();
        h.add(0);
        h.add(5);
        let mut out = Vec::new();
        h.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "value,count\n-1,0\n0,1\n1,0\noverflow,1\n");
    }

    #[test]
    fn report_csv_infinite_psnr() {
        let r = QualityReport {
            psnr_db: f64::INFINITY,
            mse: 0.0,
            chi_square: 0.0,
            l1_distance: 0.0,
        };
        let mut out = Vec::new();
        r.write_csv(&mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "psnr_db,mse,chi_square,l1_distance\ninf,0,0,0\n"
        );
    }
}
