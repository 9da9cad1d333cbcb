//! Adaptive-step QIM steganography for baseline JPEG files.
//!
//! Message bits are hidden in the quantized luma DCT coefficients of a cover
//! JPEG. Each 8×8 block is split in zigzag order into a low-frequency
//! non-embedding area, which is left untouched, and a higher-frequency
//! embedding area that receives QIM-modulated bits. The quantization step of
//! every block is derived from its own non-embedding area, so the receiver
//! recomputes it without any shared side information.
//!
//! ```no_run
//! use jpegqim_core::{jpeg::JpegImage, qim::StegoParams, stego};
//!
//! let cover = JpegImage::parse(&std::fs::read("cover.jpg")?)?;
//! let params = StegoParams::default();
//! let (stego_image, report) = stego::embed_message(&cover, b"hello", &params)?;
//! std::fs::write("stego.jpg", stego_image.serialize()?)?;
//!
//! let received = JpegImage::parse(&std::fs::read("stego.jpg")?)?;
//! assert_eq!(stego::extract_message(&received, &params)?, b"hello");
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod jpeg;
pub mod metrics;
pub mod qim;
pub mod stego;

pub use jpeg::{CoeffBlock, CoeffPlane, JpegError, JpegImage, PixelPlane};
pub use metrics::{ac_histogram, chi_square, psnr, Histogram, QualityReport};
pub use qim::{MessageBit, StegoParams, StepValue};
pub use stego::{
    capacity, embed_message, embed_message_fixed_q, extract_message, EmbedReport, StegoError,
};
