//! Baseline JPEG codec operating on quantized DCT coefficients.
//!
//! [`JpegImage::parse`] reads a baseline sequential Huffman file (SOF0,
//! 8-bit) down to per-component coefficient planes. [`JpegImage::serialize`]
//! writes it back, reusing the original Huffman tables whenever they can
//! still express every symbol and rebuilding only the ones that cannot.
//! APPn and COM segments are carried through byte-for-byte and in order.
//! [`JpegImage::decode_pixels`] reconstructs the luminance plane with an
//! exact floating-point IDCT.

mod bitio;
mod error;
mod huffman;
mod parse;
mod pixels;
mod scan;
mod write;
pub mod zigzag;

use std::collections::BTreeMap;
use std::ops::{Index, IndexMut};

pub use error::{JpegError, Result};
pub use huffman::{HuffmanTable, TableClass};
pub use pixels::PixelPlane;
pub use zigzag::{natural_to_zigzag, zigzag_to_natural};

pub(crate) mod marker {
    pub const SOF0: u8 = 0xC0;
    pub const DHT: u8 = 0xC4;
    pub const RST0: u8 = 0xD0;
    pub const SOI: u8 = 0xD8;
    pub const EOI: u8 = 0xD9;
    pub const SOS: u8 = 0xDA;
    pub const DQT: u8 = 0xDB;
    pub const DNL: u8 = 0xDC;
    pub const DRI: u8 = 0xDD;
    pub const APP0: u8 = 0xE0;
    pub const APP15: u8 = 0xEF;
    pub const COM: u8 = 0xFE;
}

/// One frame component as declared in SOF0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameComponent {
    pub id: u8,
    pub h_sampling: u8,
    pub v_sampling: u8,
    pub quant_table: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameHeader {
    pub width: u16,
    pub height: u16,
    pub precision: u8,
    pub components: Vec<FrameComponent>,
}

impl FrameHeader {
    pub fn max_h_sampling(&self) -> usize {
        self.components
            .iter()
            .map(|c| c.h_sampling as usize)
            .max()
            .unwrap_or(1)
    }

    pub fn max_v_sampling(&self) -> usize {
        self.components
            .iter()
            .map(|c| c.v_sampling as usize)
            .max()
            .unwrap_or(1)
    }

    pub fn mcus_wide(&self) -> usize {
        (self.width as usize).div_ceil(8 * self.max_h_sampling())
    }

    pub fn mcus_high(&self) -> usize {
        (self.height as usize).div_ceil(8 * self.max_v_sampling())
    }

    /// Sample dimensions of component `index` before any upsampling.
    pub fn component_size(&self, index: usize) -> (usize, usize) {
        let c = &self.components[index];
        let w = (self.width as usize * c.h_sampling as usize).div_ceil(self.max_h_sampling());
        let h = (self.height as usize * c.v_sampling as usize).div_ceil(self.max_v_sampling());
        (w, h)
    }

    /// Block dimensions of the coded plane for component `index`.
    ///
    /// A single-component frame is coded non-interleaved, so only the blocks
    /// covering the image are present; otherwise the plane is padded out to
    /// whole MCUs.
    pub fn plane_blocks(&self, index: usize) -> (usize, usize) {
        if self.components.len() == 1 {
            let (w, h) = self.component_size(0);
            (w.div_ceil(8), h.div_ceil(8))
        } else {
            let c = &self.components[index];
            (
                self.mcus_wide() * c.h_sampling as usize,
                self.mcus_high() * c.v_sampling as usize,
            )
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantPrecision {
    Bits8,
    Bits16,
}

/// 64 quantizer values in zigzag order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantTable {
    entries: [u16; 64],
    precision: QuantPrecision,
}

impl QuantTable {
    pub fn new(entries: [u16; 64], precision: QuantPrecision) -> Result<Self> {
        if entries.contains(&0) {
            return error::malformed("quantization table contains a zero entry");
        }
        if precision == QuantPrecision::Bits8 && entries.iter().any(|&q| q > 255) {
            return error::malformed("8-bit quantization table entry exceeds 255");
        }
        Ok(QuantTable { entries, precision })
    }

    pub fn entries(&self) -> &[u16; 64] {
        &self.entries
    }

    pub fn precision(&self) -> QuantPrecision {
        self.precision
    }
}

/// One 8×8 block of quantized coefficients in zigzag order; index 0 is DC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CoeffBlock {
    pub coeffs: [i32; 64],
}

impl CoeffBlock {
    pub const fn zeroed() -> Self {
        CoeffBlock { coeffs: [0; 64] }
    }

    pub fn dc(&self) -> i32 {
        self.coeffs[0]
    }

    pub fn ac(&self) -> &[i32] {
        &self.coeffs[1..]
    }
}

impl Default for CoeffBlock {
    fn default() -> Self {
        Self::zeroed()
    }
}

impl From<[i32; 64]> for CoeffBlock {
    fn from(coeffs: [i32; 64]) -> Self {
        CoeffBlock { coeffs }
    }
}

impl Index<usize> for CoeffBlock {
    type Output = i32;

    fn index(&self, zigzag: usize) -> &i32 {
        &self.coeffs[zigzag]
    }
}

impl IndexMut<usize> for CoeffBlock {
    fn index_mut(&mut self, zigzag: usize) -> &mut i32 {
        &mut self.coeffs[zigzag]
    }
}

/// Row-major grid of coefficient blocks for one component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffPlane {
    blocks_wide: usize,
    blocks_high: usize,
    blocks: Vec<CoeffBlock>,
}

impl CoeffPlane {
    pub fn new(blocks_wide: usize, blocks_high: usize) -> Self {
        CoeffPlane {
            blocks_wide,
            blocks_high,
            blocks: vec![CoeffBlock::zeroed(); blocks_wide * blocks_high],
        }
    }

    pub fn blocks_wide(&self) -> usize {
        self.blocks_wide
    }

    pub fn blocks_high(&self) -> usize {
        self.blocks_high
    }

    pub fn blocks(&self) -> &[CoeffBlock] {
        &self.blocks
    }

    pub fn blocks_mut(&mut self) -> &mut [CoeffBlock] {
        &mut self.blocks
    }

    pub fn block(&self, row: usize, col: usize) -> &CoeffBlock {
        &self.blocks[row * self.blocks_wide + col]
    }

    pub fn block_mut(&mut self, row: usize, col: usize) -> &mut CoeffBlock {
        &mut self.blocks[row * self.blocks_wide + col]
    }
}

/// An APPn or COM segment kept verbatim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkerSegment {
    pub marker: u8,
    pub payload: Vec<u8>,
}

/// Scan component selector: frame component index plus entropy table ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanComponent {
    pub component: usize,
    pub dc_table: u8,
    pub ac_table: u8,
}

/// Header segments in file order, so serialization can reproduce the layout.
#[derive(Debug, Clone, PartialEq, Eq)]
enum HeaderItem {
    Preserved(usize),
    Quant(Vec<u8>),
    Huffman(Vec<(TableClass, u8)>),
    Frame,
    RestartInterval,
}

/// A fully parsed baseline JPEG.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JpegImage {
    frame: FrameHeader,
    quant_tables: BTreeMap<u8, QuantTable>,
    huffman_tables: BTreeMap<(TableClass, u8), HuffmanTable>,
    restart_interval: u16,
    scan: Vec<ScanComponent>,
    coeff_planes: Vec<CoeffPlane>,
    preserved_segments: Vec<MarkerSegment>,
    header_layout: Vec<HeaderItem>,
    /// Preserved segments that followed the scan data.
    trailer: Vec<usize>,
}

impl JpegImage {
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        parse::parse(bytes)
    }

    pub fn serialize(&self) -> Result<Vec<u8>> {
        write::serialize(self)
    }

    pub fn decode_pixels(&self) -> PixelPlane {
        pixels::decode_luma(self)
    }

    pub fn frame(&self) -> &FrameHeader {
        &self.frame
    }

    pub fn quant_tables(&self) -> &BTreeMap<u8, QuantTable> {
        &self.quant_tables
    }

    pub fn huffman_tables(&self) -> &BTreeMap<(TableClass, u8), HuffmanTable> {
        &self.huffman_tables
    }

    pub fn restart_interval(&self) -> u16 {
        self.restart_interval
    }

    pub fn scan_components(&self) -> &[ScanComponent] {
        &self.scan
    }

    pub fn coeff_planes(&self) -> &[CoeffPlane] {
        &self.coeff_planes
    }

    /// Mutable access to the coefficient planes. Plane and block counts are
    /// fixed by the frame header; only coefficient values can change.
    pub fn coeff_planes_mut(&mut self) -> &mut [CoeffPlane] {
        &mut self.coeff_planes
    }

    /// The first frame component, which carries luminance in JFIF files.
    pub fn luma_plane(&self) -> &CoeffPlane {
        &self.coeff_planes[0]
    }

    pub fn luma_plane_mut(&mut self) -> &mut CoeffPlane {
        &mut self.coeff_planes[0]
    }

    pub fn luma_quant_table(&self) -> &QuantTable {
        &self.quant_tables[&self.frame.components[0].quant_table]
    }

    pub fn preserved_segments(&self) -> &[MarkerSegment] {
        &self.preserved_segments
    }
}
