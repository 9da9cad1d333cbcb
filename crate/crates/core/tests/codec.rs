mod common;

use jpegqim_core::jpeg::{JpegError, JpegImage, TableClass};
use proptest::prelude::*;

fn parse(bytes: &[u8]) -> JpegImage {
    JpegImage::parse(bytes).unwrap()
}

#[test]
fn uniform_image_parses_to_flat_blocks() {
    for gray in [128u8, 100, 201] {
        let bytes = common::encode_gray(16, 16, &[gray; 256], 95, None);
        let img = parse(&bytes);
        let plane = img.luma_plane();
        assert_eq!((plane.blocks_wide(), plane.blocks_high()), (2, 2));
        let dc = plane.blocks()[0].dc();
        for b in plane.blocks() {
            assert!(b.ac().iter().all(|&c| c == 0));
            assert_eq!(b.dc(), dc);
        }
        // Level-shifted DC of a flat block is 8·(gray − 128) before quantization.
        let q0 = img.luma_quant_table().entries()[0] as i32;
        let expected = 8 * (gray as i32 - 128);
        assert!(
            (dc * q0 - expected).abs() <= q0,
            "gray {gray}: dc {dc}, q0 {q0}"
        );
        if gray == 128 {
            assert_eq!(dc, 0);
        }
        let (_, _, reference) = common::reference_luma(&bytes);
        let ours = img.decode_pixels();
        for (a, b) in ours.samples().iter().zip(&reference) {
            assert!(a.abs_diff(*b) <= 1);
        }
    }
}

#[test]
fn soi_only_is_malformed() {
    assert!(matches!(
        JpegImage::parse(&[0xFF, 0xD8]),
        Err(JpegError::MalformedStream(_))
    ));
    assert!(matches!(
        JpegImage::parse(&[]),
        Err(JpegError::MalformedStream(_))
    ));
    assert!(matches!(
        JpegImage::parse(b"GIF89a"),
        Err(JpegError::MalformedStream(_))
    ));
}

#[test]
fn progressive_is_unsupported() {
    let bytes = common::fixture("progressive.jpg");
    assert!(matches!(
        JpegImage::parse(&bytes),
        Err(JpegError::UnsupportedJpeg(_))
    ));
}

fn with_sof_patch(code: u8, precision: u8) -> Vec<u8> {
    let mut bytes = common::fixture("small_meta.jpg");
    let at = bytes.windows(2).position(|w| w == [0xFF, 0xC0]).unwrap();
    bytes[at + 1] = code;
    bytes[at + 4] = precision;
    bytes
}

#[test]
fn other_coding_processes_are_unsupported() {
    for code in [
        0xC1, 0xC2, 0xC3, 0xC5, 0xC6, 0xC7, 0xC9, 0xCA, 0xCB, 0xCD, 0xCE, 0xCF,
    ] {
        let r = JpegImage::parse(&with_sof_patch(code, 8));
        assert!(
            matches!(r, Err(JpegError::UnsupportedJpeg(_))),
            "SOF 0x{code:02X}: {r:?}"
        );
    }
    let r = JpegImage::parse(&with_sof_patch(0xC0, 12));
    assert!(matches!(r, Err(JpegError::UnsupportedJpeg(_))));
}

#[test]
fn truncation_is_malformed() {
    for (name, bytes) in common::baseline_files() {
        for cut in [3, 20, 100, bytes.len() / 2, bytes.len() - 2] {
            let r = JpegImage::parse(&bytes[..cut]);
            assert!(
                matches!(r, Err(JpegError::MalformedStream(_))),
                "{name} cut at {cut}: {r:?}"
            );
        }
    }
}

#[test]
fn transcoding_identity_and_pixel_stability() {
    for (name, bytes) in common::baseline_files() {
        let img = parse(&bytes);
        let out = img.serialize().unwrap();
        let again = parse(&out);
        assert_eq!(again.coeff_planes(), img.coeff_planes(), "{name}");
        assert_eq!(again.quant_tables(), img.quant_tables(), "{name}");
        assert_eq!(again.frame(), img.frame(), "{name}");
        assert_eq!(again.restart_interval(), img.restart_interval(), "{name}");
        assert_eq!(
            again.preserved_segments(),
            img.preserved_segments(),
            "{name}"
        );
        assert_eq!(again.decode_pixels(), img.decode_pixels(), "{name}");
        // Unmodified files from a conforming encoder come back byte-identical.
        assert_eq!(out, bytes, "{name}");
    }
}

#[test]
fn luma_matches_reference_decoder() {
    for (name, bytes) in common::baseline_files() {
        let ours = parse(&bytes).decode_pixels();
        let (w, h, reference) = common::reference_luma(&bytes);
        assert_eq!((ours.width(), ours.height()), (w, h), "{name}");
        let worst = ours
            .samples()
            .iter()
            .zip(&reference)
            .map(|(a, b)| a.abs_diff(*b))
            .max()
            .unwrap();
        assert!(worst <= 1, "{name}: max deviation {worst}");
    }
}

#[test]
fn single_coefficient_mutation() {
    let bytes = common::fixture("small_meta.jpg");
    let img = parse(&bytes);
    let (block, index) = img
        .luma_plane()
        .blocks()
        .iter()
        .enumerate()
        .find_map(|(b, blk)| (1..64).find(|&k| blk[k] == 0).map(|k| (b, k)))
        .unwrap();
    let mut edited = img.clone();
    edited.luma_plane_mut().blocks_mut()[block][index] = 2;
    let reparsed = parse(&edited.serialize().unwrap());
    // Original tables could code the new symbol.
    assert_eq!(reparsed.huffman_tables(), img.huffman_tables());

    let mut diffs = Vec::new();
    for (p, (a, b)) in img
        .coeff_planes()
        .iter()
        .zip(reparsed.coeff_planes())
        .enumerate()
    {
        for (i, (x, y)) in a.blocks().iter().zip(b.blocks()).enumerate() {
            for k in 0..64 {
                if x[k] != y[k] {
                    diffs.push((p, i, k, y[k]));
                }
            }
        }
    }
    assert_eq!(diffs, vec![(0, block, index, 2)]);
}

#[test]
fn rebuilds_tables_only_when_needed() {
    let bytes = common::fixture("color420.jpg");
    let img = parse(&bytes);
    let mut edited = img.clone();
    // Category 12 has no code in the standard AC tables.
    edited.luma_plane_mut().blocks_mut()[5][40] = -3000;
    edited.luma_plane_mut().blocks_mut()[9][63] = 2500;
    let out = edited.serialize().unwrap();
    let reparsed = parse(&out);
    assert_eq!(reparsed.coeff_planes(), edited.coeff_planes());
    let luma_ac = (TableClass::Ac, img.scan_components()[0].ac_table);
    assert_ne!(
        reparsed.huffman_tables()[&luma_ac],
        img.huffman_tables()[&luma_ac]
    );
    // Tables used only by chroma are untouched.
    let chroma_ac = (TableClass::Ac, img.scan_components()[1].ac_table);
    assert_ne!(chroma_ac, luma_ac);
    assert_eq!(
        reparsed.huffman_tables()[&chroma_ac],
        img.huffman_tables()[&chroma_ac]
    );
    common::reference_luma(&out);
}

#[test]
fn oversized_coefficient_overflows() {
    let img = parse(&common::fixture("small_meta.jpg"));
    let mut ac = img.clone();
    ac.luma_plane_mut().blocks_mut()[3][10] = 40000;
    assert!(matches!(
        ac.serialize(),
        Err(JpegError::EncodingOverflow { value: 40000, .. })
    ));
    let mut dc = img.clone();
    dc.luma_plane_mut().blocks_mut()[0][0] = -40000;
    assert!(matches!(
        dc.serialize(),
        Err(JpegError::EncodingOverflow { .. })
    ));
    // 32767 is the largest codable magnitude.
    let mut edge = img.clone();
    edge.luma_plane_mut().blocks_mut()[3][10] = -32767;
    let back = parse(&edge.serialize().unwrap());
    assert_eq!(back.luma_plane().blocks()[3][10], -32767);
}

#[test]
fn metadata_segments_preserved_in_order() {
    let bytes = common::fixture("small_meta.jpg");
    let img = parse(&bytes);
    let markers: Vec<u8> = img.preserved_segments().iter().map(|s| s.marker).collect();
    assert!(markers.contains(&0xE0));
    assert!(markers.contains(&0xE1));
    let com = img
        .preserved_segments()
        .iter()
        .find(|s| s.marker == 0xFE)
        .unwrap();
    assert_eq!(com.payload, b"hello stego");
    let mut edited = img.clone();
    edited.luma_plane_mut().blocks_mut()[0][30] = 6;
    let again = parse(&edited.serialize().unwrap());
    assert_eq!(again.preserved_segments(), img.preserved_segments());
}

#[test]
fn restart_markers_round_trip() {
    let pixels = common::textured_pixels(72, 40, 3);
    let bytes = common::encode_gray(72, 40, &pixels, 90, Some(5));
    let img = parse(&bytes);
    assert_eq!(img.restart_interval(), 5);
    let mut edited = img.clone();
    for b in edited.luma_plane_mut().blocks_mut() {
        b[50] += 3;
    }
    let out = edited.serialize().unwrap();
    let rst_count = out
        .windows(2)
        .filter(|w| w[0] == 0xFF && (0xD0..=0xD7).contains(&w[1]))
        .count();
    // 9×5 blocks in intervals of 5 MCUs → 8 restarts.
    assert_eq!(rst_count, 8);
    assert_eq!(parse(&out).coeff_planes(), edited.coeff_planes());
    let ours = parse(&out).decode_pixels();
    let (_, _, reference) = common::reference_luma(&out);
    assert!(ours
        .samples()
        .iter()
        .zip(&reference)
        .all(|(a, b)| a.abs_diff(*b) <= 1));
}

#[test]
fn out_of_order_restart_is_malformed() {
    let bytes = common::fixture("gray_odd_restart.jpg");
    let mut broken = bytes.clone();
    let at = broken.windows(2).position(|w| w == [0xFF, 0xD1]).unwrap();
    broken[at + 1] = 0xD3;
    assert!(matches!(
        JpegImage::parse(&broken),
        Err(JpegError::MalformedStream(_))
    ));
}

#[test]
fn decode_zero_and_dc_only_blocks() {
    let mut bytes = common::fixture("small_meta.jpg");
    // First DQT entry (luma DC quantizer) → 4.
    let dqt = bytes.windows(2).position(|w| w == [0xFF, 0xDB]).unwrap();
    assert_eq!(bytes[dqt + 4] >> 4, 0, "expects an 8-bit table");
    bytes[dqt + 5] = 4;
    let mut img = parse(&bytes);
    assert_eq!(img.luma_quant_table().entries()[0], 4);
    for b in img.luma_plane_mut().blocks_mut() {
        *b = Default::default();
    }
    assert!(img.decode_pixels().samples().iter().all(|&p| p == 128));
    for b in img.luma_plane_mut().blocks_mut() {
        b[0] = 8;
    }
    assert!(img.decode_pixels().samples().iter().all(|&p| p == 132));
}

#[test]
fn chroma_planes_have_mcu_padded_sizes() {
    let img = parse(&common::fixture("color444_odd.jpg"));
    // 451×300, 4:4:4 → 57×38 MCUs of one block each.
    for plane in img.coeff_planes() {
        assert_eq!((plane.blocks_wide(), plane.blocks_high()), (57, 38));
    }
    let img = parse(&common::fixture("color420.jpg"));
    let dims: Vec<_> = img
        .coeff_planes()
        .iter()
        .map(|p| (p.blocks_wide(), p.blocks_high()))
        .collect();
    assert_eq!(dims, vec![(32, 32), (16, 16), (16, 16)]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn independent_encoder_output_round_trips(
        w in 1u16..48, h in 1u16..48, quality in 40u8..100, seed in any::<u64>(), restart in 0u16..6,
    ) {
        let pixels = common::textured_pixels(w as usize, h as usize, seed);
        let bytes = common::encode_gray(w, h, &pixels, quality, (restart > 0).then_some(restart));
        let img = parse(&bytes);
        let out = img.serialize().unwrap();
        let again = parse(&out);
        prop_assert_eq!(again.coeff_planes(), img.coeff_planes());
        prop_assert_eq!(again.decode_pixels(), img.decode_pixels());
        let (rw, rh, reference) = common::reference_luma(&bytes);
        let ours = img.decode_pixels();
        prop_assert_eq!((ours.width(), ours.height()), (rw, rh));
        for (a, b) in ours.samples().iter().zip(&reference) {
            prop_assert!(a.abs_diff(*b) <= 1);
        }
    }

    #[test]
    fn corrupted_streams_never_panic(pos in 0usize..2559, byte in any::<u8>(), cut in 0usize..2559) {
        let mut bytes = common::fixture("small_meta.jpg");
        let p = pos % bytes.len();
        bytes[p] = byte;
        let _ = JpegImage::parse(&bytes);
        let _ = JpegImage::parse(&bytes[..cut.min(bytes.len())]);
    }
}
