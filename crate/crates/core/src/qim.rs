//! Quantization index modulation on single coefficients and 8×8 blocks, with
//! the step of each block derived from its own non-embedding area.
//!
//! A block's AC coefficients are split at `split_index` (zigzag order).
//! Indices `1..split_index` form the non-embedding area: they are never
//! modified, so the extractor can recompute the same step from them without
//! any side information. Indices `split_index..64` form the embedding area.
//! The DC coefficient is never touched.

use std::fmt;

use thiserror::Error;

use crate::jpeg::CoeffBlock;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamError {
    #[error("split index {0} outside 2..=63")]
    SplitIndex(usize),
    #[error("quantization step {0} must be even and at least 2")]
    Step(u32),
    #[error("step bounds q_min={q_min}, q_max={q_max} must satisfy 2 <= q_min <= q_max")]
    StepBounds { q_min: u32, q_max: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum MessageBit {
    #[default]
    Zero,
    One,
}

impl MessageBit {
    pub fn value(self) -> u32 {
        self as u32
    }
}

impl From<bool> for MessageBit {
    fn from(b: bool) -> Self {
        if b {
            MessageBit::One
        } else {
            MessageBit::Zero
        }
    }
}

impl From<MessageBit> for bool {
    fn from(b: MessageBit) -> bool {
        b == MessageBit::One
    }
}

/// An even quantization step of at least 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StepValue(u32);

impl StepValue {
    pub fn new(q: u32) -> Result<Self, ParamError> {
        if q >= 2 && q.is_multiple_of(2) {
            Ok(StepValue(q))
        } else {
            Err(ParamError::Step(q))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for StepValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StegoParams {
    split_index: usize,
    q_min: u32,
    q_max: u32,
    tie_bit: MessageBit,
}

impl StegoParams {
    pub const DEFAULT_SPLIT_INDEX: usize = 21;
    pub const DEFAULT_Q_MIN: u32 = 2;
    pub const DEFAULT_Q_MAX: u32 = 32;

    pub fn new(split_index: usize, q_min: u32, q_max: u32) -> Result<Self, ParamError> {
        if !(2..=63).contains(&split_index) {
            return Err(ParamError::SplitIndex(split_index));
        }
        if q_min < 2 || !q_min.is_multiple_of(2) || !q_max.is_multiple_of(2) || q_max < q_min {
            return Err(ParamError::StepBounds { q_min, q_max });
        }
        Ok(StegoParams {
            split_index,
            q_min,
            q_max,
            tie_bit: MessageBit::Zero,
        })
    }

    pub fn with_tie_bit(mut self, tie_bit: MessageBit) -> Self {
        self.tie_bit = tie_bit;
        self
    }

    pub fn split_index(&self) -> usize {
        self.split_index
    }

    pub fn q_min(&self) -> u32 {
        self.q_min
    }

    pub fn q_max(&self) -> u32 {
        self.q_max
    }

    pub fn tie_bit(&self) -> MessageBit {
        self.tie_bit
    }

    /// Number of embedding positions per block.
    pub fn area_len(&self) -> usize {
        64 - self.split_index
    }
}

impl Default for StegoParams {
    fn default() -> Self {
        StegoParams {
            split_index: Self::DEFAULT_SPLIT_INDEX,
            q_min: Self::DEFAULT_Q_MIN,
            q_max: Self::DEFAULT_Q_MAX,
            tie_bit: MessageBit::Zero,
        }
    }
}

/// `sign(c) · (q·⌊|c|/q⌋ + (q/2)·b)`, with `sign(0) = +1`.
pub fn embed_coeff(c: i32, q: StepValue, b: MessageBit) -> i32 {
    let q = q.get() as i64;
    let m = (c as i64).abs();
    let magnitude = q * (m / q) + (q / 2) * b.value() as i64;
    let signed = if c < 0 { -magnitude } else { magnitude };
    signed as i32
}

/// Picks the nearer of the two lattice points below `|c|`; equidistant
/// values return `tie_bit`.
pub fn extract_coeff(c: i32, q: StepValue, tie_bit: MessageBit) -> MessageBit {
    let q = q.get() as i64;
    let m = (c as i64).abs();
    let zero = q * (m / q);
    let one = zero + q / 2;
    let d0 = (m - zero).abs();
    let d1 = (m - one).abs();
    match d0.cmp(&d1) {
        std::cmp::Ordering::Less => MessageBit::Zero,
        std::cmp::Ordering::Greater => MessageBit::One,
        std::cmp::Ordering::Equal => tie_bit,
    }
}

/// Chooses a block's step from its non-embedding coefficients: among the
/// absolute values with the lowest frequency, take the smallest, raise it to
/// `q_min`, round it up to even, and clamp it to `[q_min, q_max]`.
pub fn select_step(non_embedding: &[i32], params: &StegoParams) -> StepValue {
    let mut values: Vec<u32> = non_embedding.iter().map(|c| c.unsigned_abs()).collect();
    values.sort_unstable();

    let mut rarest: Option<(usize, u32)> = None;
    for run in values.chunk_by(|a, b| a == b) {
        let candidate = (run.len(), run[0]);
        // Ascending order: only a strictly lower frequency replaces the pick.
        if rarest.is_none_or(|(n, _)| candidate.0 < n) {
            rarest = Some(candidate);
        }
    }
    let v = rarest.map_or(0, |(_, v)| v).max(params.q_min) as u64;
    let even = v + (v & 1);
    let q = even.clamp(params.q_min as u64, params.q_max as u64) as u32;
    StepValue(q)
}

/// Result of embedding into one block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockEmbedding {
    pub block: CoeffBlock,
    pub step: StepValue,
    /// Number of bits taken from the queue.
    pub consumed: usize,
}

/// Step the adaptive rule assigns to `block`.
pub fn block_step(block: &CoeffBlock, params: &StegoParams) -> StepValue {
    select_step(&block.coeffs[1..params.split_index], params)
}

/// Embeds bits from `bits` into the embedding area, in ascending zigzag
/// order, until the area is full or the queue runs dry.
pub fn embed_block<I>(block: &CoeffBlock, bits: &mut I, params: &StegoParams) -> BlockEmbedding
where
    I: Iterator<Item = MessageBit>,
{
    embed_block_with_step(block, block_step(block, params), bits, params)
}

/// [`embed_block`] with a caller-chosen step (the fixed-step baseline).
pub fn embed_block_with_step<I>(
    block: &CoeffBlock,
    step: StepValue,
    bits: &mut I,
    params: &StegoParams,
) -> BlockEmbedding
where
    I: Iterator<Item = MessageBit>,
{
    let mut out = *block;
    let mut consumed = 0;
    for slot in &mut out.coeffs[params.split_index..] {
        let Some(bit) = bits.next() else { break };
        *slot = embed_coeff(*slot, step, bit);
        consumed += 1;
    }
    BlockEmbedding {
        block: out,
        step,
        consumed,
    }
}

/// Reads `count` bits back from the embedding area.
///
/// Panics if `count` exceeds the area size.
pub fn extract_block(block: &CoeffBlock, count: usize, params: &StegoParams) -> Vec<MessageBit> {
    extract_block_with_step(block, block_step(block, params), count, params)
}

pub fn extract_block_with_step(
    block: &CoeffBlock,
    step: StepValue,
    count: usize,
    params: &StegoParams,
) -> Vec<MessageBit> {
    assert!(count <= params.area_len(), "count exceeds embedding area");
    block.coeffs[params.split_index..params.split_index + count]
        .iter()
        .map(|&c| extract_coeff(c, step, params.tie_bit))
        .collect()
}
