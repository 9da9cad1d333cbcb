//! Luminance reconstruction for quality measurement.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::OnceLock;

use super::zigzag::ZIGZAG_TO_NATURAL;
use super::JpegImage;

/// Row-major 8-bit samples of one image plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelPlane {
    width: usize,
    height: usize,
    samples: Vec<u8>,
}

impl PixelPlane {
    /// Returns `None` if `samples.len() != width * height`.
    pub fn new(width: usize, height: usize, samples: Vec<u8>) -> Option<Self> {
        (samples.len() == width * height).then_some(PixelPlane {
            width,
            height,
            samples,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        PixelPlane {
            width,
            height,
            samples: vec![value; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [u8] {
        &mut self.samples
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.samples[y * self.width + x]
    }
}

/// `basis[x][u] = C(u)/2 · cos((2x+1)uπ/16)`, the 1-D factor of the T.81 IDCT.
fn basis() -> &'static [[f64; 8]; 8] {
    static BASIS: OnceLock<[[f64; 8]; 8]> = OnceLock::new();
    BASIS.get_or_init(|| {
        let mut b = [[0.0; 8]; 8];
        for (x, row) in b.iter_mut().enumerate() {
            for (u, v) in row.iter_mut().enumerate() {
                let cu = if u == 0 { FRAC_1_SQRT_2 } else { 1.0 };
                *v = 0.5 * cu * ((2 * x + 1) as f64 * u as f64 * PI / 16.0).cos();
            }
        }
        b
    })
}

/// Exact separable 8×8 inverse DCT of a dequantized block in natural order,
/// followed by the +128 level shift, rounding, and clamping.
pub(crate) fn idct_block(spectrum: &[f64; 64]) -> [u8; 64] {
    let b = basis();
    let mut rows = [0.0f64; 64];
    for v in 0..8 {
        for x in 0..8 {
            rows[v * 8 + x] = (0..8).map(|u| spectrum[v * 8 + u] * b[x][u]).sum();
        }
    }
    let mut out = [0u8; 64];
    for y in 0..8 {
        for x in 0..8 {
            let s: f64 = (0..8).map(|v| rows[v * 8 + x] * b[y][v]).sum();
            out[y * 8 + x] = (s + 128.0).round().clamp(0.0, 255.0) as u8;
        }
    }
    out
}

pub(super) fn decode_luma(image: &JpegImage) -> PixelPlane {
    let (width, height) = image.frame().component_size(0);
    let plane = image.luma_plane();
    let quant = image.luma_quant_table().entries();
    let mut samples = vec![0u8; width * height];

    for by in 0..height.div_ceil(8) {
        for bx in 0..width.div_ceil(8) {
            let block = plane.block(by, bx);
            let mut spectrum = [0.0f64; 64];
            for (zz, &c) in block.coeffs.iter().enumerate() {
                spectrum[ZIGZAG_TO_NATURAL[zz] as usize] = c as f64 * quant[zz] as f64;
            }
            let pixels = idct_block(&spectrum);
            for y in 0..8 {
                let py = by * 8 + y;
                if py >= height {
                    break;
                }
                for x in 0..8 {
                    let px = bx * 8 + x;
                    if px >= width {
                        break;
                    }
                    samples[py * width + px] = pixels[y * 8 + x];
                }
            }
        }
    }
    PixelPlane {
        width,
        height,
        samples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_spectrum_is_mid_gray() {
        assert!(idct_block(&[0.0; 64]).iter().all(|&p| p == 128));
    }

    #[test]
    fn dc_offset_closed_form() {
        // DC = 8 with quantizer 4 → 32/8 = 4 above mid-gray.
        let mut spectrum = [0.0; 64];
        spectrum[0] = 8.0 * 4.0;
        assert!(idct_block(&spectrum).iter().all(|&p| p == 132));
    }

    #[test]
    fn clamps_out_of_range() {
        let mut spectrum = [0.0; 64];
        spectrum[0] = 8.0 * 200.0;
        assert!(idct_block(&spectrum).iter().all(|&p| p == 255));
        spectrum[0] = -8.0 * 200.0;
        assert!(idct_block(&spectrum).iter().all(|&p| p == 0));
    }

    // Direct double-sum evaluation of the T.81 IDCT definition.
    #[test]
    fn matches_direct_definition() {
        let mut spectrum = [0.0; 64];
        for (i, s) in spectrum.iter_mut().enumerate() {
            *s = ((i * 37 % 23) as f64 - 11.0) * 3.0;
        }
        let fast = idct_block(&spectrum);
        for y in 0..8 {
            for x in 0..8 {
                let mut s = 0.0;
                for v in 0..8 {
                    for u in 0..8 {
                        let cu = if u == 0 { FRAC_1_SQRT_2 } else { 1.0 };
                        let cv = if v == 0 { FRAC_1_SQRT_2 } else { 1.0 };
                        s += cu
                            * cv
                            * spectrum[v * 8 + u]
                            * ((2 * x + 1) as f64 * u as f64 * PI / 16.0).cos()
                            * ((2 * y + 1) as f64 * v as f64 * PI / 16.0).cos();
                    }
                }
                let expect = (s / 4.0 + 128.0).round().clamp(0.0, 255.0) as u8;
                assert_eq!(fast[y * 8 + x], expect, "({x},{y})");
            }
        }
    }

    #[test]
    fn plane_constructor_checks_length() {
        assert!(PixelPlane::new(2, 2, vec![0; 3]).is_none());
        assert_eq!(
            PixelPlane::new(2, 2, vec![1, 2, 3, 4]).unwrap().get(1, 1),
            4
        );
    }
}
