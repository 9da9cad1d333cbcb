//! Whole-image embedding and extraction.
//!
//! A message is framed as a 32-bit big-endian byte count followed by the
//! body, each byte most-significant bit first. The bit stream fills luma
//! blocks in raster order, one embedding area after another; blocks past
//! the end of the stream are left untouched.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::jpeg::JpegImage;
use crate::qim::{
    block_step, embed_block_with_step, extract_block_with_step, MessageBit, StegoParams, StepValue,
};

/// Bits spent on the length header.
pub const HEADER_BITS: usize = 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StegoError {
    #[error("message needs {needed} bits but the cover holds {available}")]
    InsufficientCapacity { needed: u64, available: u64 },
    #[error("header announces {announced} payload bits but only {available} remain; no message or wrong parameters")]
    LengthOutOfRange { announced: u64, available: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EmbedReport {
    pub bits_embedded: usize,
    pub blocks_used: usize,
    pub capacity_bits: usize,
    /// Step → number of blocks that carried bits with it.
    pub step_histogram: BTreeMap<u32, usize>,
}

impl EmbedReport {
    /// Average step over the blocks that carried bits.
    pub fn mean_step(&self) -> f64 {
        if self.blocks_used == 0 {
            return 0.0;
        }
        let total: usize = self
            .step_histogram
            .iter()
            .map(|(&q, &n)| q as usize * n)
            .sum();
        total as f64 / self.blocks_used as f64
    }
}

/// How each block's step is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepRule {
    /// Derived from the block's own non-embedding area.
    Adaptive,
    /// One step for every block (classical QIM).
    Fixed(StepValue),
}

impl StepRule {
    fn step(self, block: &crate::jpeg::CoeffBlock, params: &StegoParams) -> StepValue {
        match self {
            StepRule::Adaptive => block_step(block, params),
            StepRule::Fixed(q) => q,
        }
    }
}

/// Embedding capacity in bits: luma blocks × embedding-area size.
pub fn capacity(image: &JpegImage, params: &StegoParams) -> usize {
    image.luma_plane().blocks().len() * params.area_len()
}

/// Header plus body as a bit sequence.
pub fn frame_payload(payload: &[u8]) -> Vec<MessageBit> {
    let len = u32::try_from(payload.len()).expect("payload length must fit in 32 bits");
    len.to_be_bytes()
        .iter()
        .chain(payload)
        .flat_map(|&byte| {
            (0..8)
                .rev()
                .map(move |i| MessageBit::from((byte >> i) & 1 == 1))
        })
        .collect()
}

pub fn embed_message(
    image: &JpegImage,
    payload: &[u8],
    params: &StegoParams,
) -> Result<(JpegImage, EmbedReport), StegoError> {
    embed_with_rule(image, payload, StepRule::Adaptive, params)
}

/// Classical fixed-step QIM over the same traversal and framing.
pub fn embed_message_fixed_q(
    image: &JpegImage,
    payload: &[u8],
    q: StepValue,
    params: &StegoParams,
) -> Result<(JpegImage, EmbedReport), StegoError> {
    embed_with_rule(image, payload, StepRule::Fixed(q), params)
}

pub fn embed_with_rule(
    image: &JpegImage,
    payload: &[u8],
    rule: StepRule,
    params: &StegoParams,
) -> Result<(JpegImage, EmbedReport), StegoError> {
    let available = capacity(image, params);
    let needed = HEADER_BITS as u64 + 8 * payload.len() as u64;
    if needed > available as u64 {
        return Err(StegoError::InsufficientCapacity {
            needed,
            available: available as u64,
        });
    }

    let bits = frame_payload(payload);
    let mut queue = bits.iter().copied().peekable();
    let mut stego = image.clone();
    let mut report = EmbedReport {
        capacity_bits: available,
        ..EmbedReport::default()
    };
    for block in stego.luma_plane_mut().blocks_mut() {
        if queue.peek().is_none() {
            break;
        }
        let step = rule.step(block, params);
        let embedded = embed_block_with_step(block, step, &mut queue, params);
        *block = embedded.block;
        report.bits_embedded += embedded.consumed;
        report.blocks_used += 1;
        *report.step_histogram.entry(step.get()).or_default() += 1;
    }
    debug_assert_eq!(report.bits_embedded, bits.len());
    Ok((stego, report))
}

pub fn extract_message(image: &JpegImage, params: &StegoParams) -> Result<Vec<u8>, StegoError> {
    extract_with_rule(image, StepRule::Adaptive, params)
}

pub fn extract_message_fixed_q(
    image: &JpegImage,
    q: StepValue,
    params: &StegoParams,
) -> Result<Vec<u8>, StegoError> {
    extract_with_rule(image, StepRule::Fixed(q), params)
}

/// Sequential reader over the embedding areas of the luma blocks.
struct AreaReader<'a> {
    image: &'a JpegImage,
    rule: StepRule,
    params: &'a StegoParams,
    block: usize,
    offset: usize,
    current: Option<StepValue>,
}

impl AreaReader<'_> {
    fn read(&mut self, mut count: usize) -> Vec<MessageBit> {
        let blocks = self.image.luma_plane().blocks();
        let area = self.params.area_len();
        let mut out = Vec::with_capacity(count);
        while count > 0 {
            let block = &blocks[self.block];
            let step = *self
                .current
                .get_or_insert_with(|| self.rule.step(block, self.params));
            let take = count.min(area - self.offset);
            let bits = extract_block_with_step(block, step, self.offset + take, self.params);
            out.extend_from_slice(&bits[self.offset..]);
            self.offset += take;
            count -= take;
            if self.offset == area {
                self.block += 1;
                self.offset = 0;
                self.current = None;
            }
        }
        out
    }
}

fn bits_to_bytes(bits: &[MessageBit]) -> Vec<u8> {
    bits.chunks(8)
        .map(|chunk| {
            chunk
                .iter()
                .fold(0u8, |acc, &b| (acc << 1) | b.value() as u8)
        })
        .collect()
}

pub fn extract_with_rule(
    image: &JpegImage,
    rule: StepRule,
    params: &StegoParams,
) -> Result<Vec<u8>, StegoError> {
    let total = capacity(image, params);
    if total < HEADER_BITS {
        return Err(StegoError::LengthOutOfRange {
            announced: 0,
            available: 0,
        });
    }
    let mut reader = AreaReader {
        image,
        rule,
        params,
        block: 0,
        offset: 0,
        current: None,
    };
    let header = bits_to_bytes(&reader.read(HEADER_BITS));
    let len = u32::from_be_bytes([header[0], header[1], header[2], header[3]]) as u64;
    let announced = len * 8;
    let available = (total - HEADER_BITS) as u64;
    if announced > available {
        return Err(StegoError::LengthOutOfRange {
            announced,
            available,
        });
    }
    Ok(bits_to_bytes(&reader.read(announced as usize)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qim::MessageBit::{One, Zero};

    #[test]
    fn framing_is_big_endian_msb_first() {
        let bits = frame_payload(&[0xA5]);
        assert_eq!(bits.len(), 40);
        assert!(bits[..31].iter().all(|&b| b == Zero));
        assert_eq!(bits[31], One);
        assert_eq!(&bits[32..], &[One, Zero, One, Zero, Zero, One, Zero, One]);
        assert_eq!(bits_to_bytes(&bits), vec![0, 0, 0, 1, 0xA5]);
    }

    #[test]
    fn empty_payload_frames_to_zero_header() {
        let bits = frame_payload(&[]);
        assert_eq!(bits.len(), 32);
        assert!(bits.iter().all(|&b| b == Zero));
    }

    #[test]
    fn mean_step() {
        let mut r = EmbedReport::default();
        assert_eq!(r.mean_step(), 0.0);
        r.blocks_used = 3;
        r.step_histogram.insert(2, 2);
        r.step_histogram.insert(8, 1);
        assert!((r.mean_step() - 4.0).abs() < 1e-12);
    }
}
