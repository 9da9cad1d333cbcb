use std::collections::BTreeMap;

use super::bitio::BitReader;
use super::error::{malformed, unsupported, Result};
use super::huffman::{extend, HuffmanDecoder, HuffmanTable, TableClass};
use super::marker::*;
use super::scan::ScanGeometry;
use super::{
    CoeffBlock, CoeffPlane, FrameComponent, FrameHeader, HeaderItem, JpegImage, MarkerSegment,
    QuantPrecision, QuantTable, ScanComponent,
};

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    /// Reads the next marker code, skipping 0xFF fill bytes.
    fn marker(&mut self) -> Result<u8> {
        match self.data.get(self.pos) {
            Some(0xFF) => {}
            Some(&b) => {
                return malformed(format!(
                    "expected marker at offset {}, found 0x{b:02X}",
                    self.pos
                ))
            }
            None => return malformed("stream ends before the first scan"),
        }
        while self.data.get(self.pos) == Some(&0xFF) {
            self.pos += 1;
        }
        let Some(&code) = self.data.get(self.pos) else {
            return malformed("stream ends inside a marker");
        };
        self.pos += 1;
        Ok(code)
    }

    /// Reads a length-prefixed segment payload.
    fn segment(&mut self) -> Result<&'a [u8]> {
        let Some(len) = self.data.get(self.pos..self.pos + 2) else {
            return malformed("truncated segment length");
        };
        let len = u16::from_be_bytes([len[0], len[1]]) as usize;
        if len < 2 {
            return malformed("segment length below 2");
        }
        let start = self.pos + 2;
        let end = self.pos + len;
        let Some(payload) = self.data.get(start..end) else {
            return malformed("truncated marker segment");
        };
        self.pos = end;
        Ok(payload)
    }
}

fn classify_sof(code: u8) -> Result<()> {
    match code {
        0xC0 => Ok(()),
        0xC1 => unsupported("extended sequential (SOF1) coding"),
        0xC2 => unsupported("progressive (SOF2) coding"),
        0xC3 => unsupported("lossless (SOF3) coding"),
        0xC5..=0xC7 => unsupported("hierarchical (differential) coding"),
        0xC9..=0xCB | 0xCD..=0xCF => unsupported("arithmetic coding"),
        _ => unreachable!(),
    }
}

pub(super) fn parse(data: &[u8]) -> Result<JpegImage> {
    if data.len() < 2 || data[0] != 0xFF || data[1] != SOI {
        return malformed("missing SOI marker");
    }
    let mut cur = Cursor { data, pos: 2 };

    let mut frame: Option<FrameHeader> = None;
    let mut quant_tables = BTreeMap::new();
    let mut huffman_tables = BTreeMap::new();
    let mut restart_interval = 0u16;
    let mut preserved = Vec::new();
    let mut layout = Vec::new();

    let scan = loop {
        let code = cur.marker()?;
        match code {
            APP0..=APP15 | COM => {
                let payload = cur.segment()?;
                layout.push(HeaderItem::Preserved(preserved.len()));
                preserved.push(MarkerSegment {
                    marker: code,
                    payload: payload.to_vec(),
                });
            }
            DQT => {
                let ids = parse_dqt(cur.segment()?, &mut quant_tables)?;
                layout.push(HeaderItem::Quant(ids));
            }
            DHT => {
                let keys = parse_dht(cur.segment()?, &mut huffman_tables)?;
                layout.push(HeaderItem::Huffman(keys));
            }
            DRI => {
                let p = cur.segment()?;
                if p.len() != 2 {
                    return malformed("DRI segment must hold 2 bytes");
                }
                restart_interval = u16::from_be_bytes([p[0], p[1]]);
                layout.push(HeaderItem::RestartInterval);
            }
            SOF0 => {
                if frame.is_some() {
                    return malformed("multiple frame headers");
                }
                frame = Some(parse_sof(cur.segment()?)?);
                layout.push(HeaderItem::Frame);
            }
            0xC1..=0xC3 | 0xC5..=0xC7 | 0xC9..=0xCB | 0xCD..=0xCF => {
                classify_sof(code)?;
            }
            0xCC => return unsupported("arithmetic coding conditioning (DAC)"),
            0xDE | 0xDF => return unsupported("hierarchical coding (DHP/EXP)"),
            0xC8 | 0xF0..=0xFD => {
                return unsupported(format!("JPEG extension marker 0x{code:02X}"))
            }
            SOS => {
                let Some(frame) = frame.as_ref() else {
                    return malformed("scan precedes frame header");
                };
                break parse_sos(cur.segment()?, frame, &quant_tables, &huffman_tables)?;
            }
            SOI => return malformed("unexpected SOI"),
            EOI => return malformed("EOI before any scan"),
            0xD0..=0xD7 => return malformed("restart marker outside entropy-coded data"),
            DNL => return malformed("DNL marker outside a scan"),
            _ => return malformed(format!("reserved marker 0x{code:02X}")),
        }
    };
    let frame = frame.expect("checked before scan");

    // Every block costs at least two bits (DC category and end-of-block), so
    // a frame claiming more blocks than the remaining data can hold is bogus.
    let total_blocks: usize = (0..frame.components.len())
        .map(|i| {
            let (w, h) = frame.plane_blocks(i);
            w * h
        })
        .sum();
    if total_blocks > 4 * (data.len() - cur.pos) + 64 {
        return malformed("frame dimensions exceed the entropy-coded data");
    }

    let mut planes: Vec<CoeffPlane> = (0..frame.components.len())
        .map(|i| {
            let (w, h) = frame.plane_blocks(i);
            CoeffPlane::new(w, h)
        })
        .collect();

    let mut reader = BitReader::new(data, cur.pos);
    decode_scan(
        &mut reader,
        &frame,
        &scan,
        &huffman_tables,
        restart_interval,
        &mut planes,
    )?;

    // Trailing segments after the scan.
    let mut trailer = Vec::new();
    loop {
        let (code, _) = reader.seek_marker()?;
        let mut after = Cursor {
            data,
            pos: reader.position(),
        };
        match code {
            EOI => break,
            0xD0..=0xD7 => {}
            APP0..=APP15 | COM => {
                let payload = after.segment()?;
                trailer.push(preserved.len());
                preserved.push(MarkerSegment {
                    marker: code,
                    payload: payload.to_vec(),
                });
                reader = BitReader::new(data, after.pos);
            }
            SOS => return unsupported("multi-scan baseline files"),
            DNL => return unsupported("DNL-defined image height"),
            _ => return malformed(format!("unexpected marker 0x{code:02X} after scan data")),
        }
    }

    Ok(JpegImage {
        frame,
        quant_tables,
        huffman_tables,
        restart_interval,
        scan,
        coeff_planes: planes,
        preserved_segments: preserved,
        header_layout: layout,
        trailer,
    })
}

fn parse_dqt(mut p: &[u8], tables: &mut BTreeMap<u8, QuantTable>) -> Result<Vec<u8>> {
    let mut ids = Vec::new();
    while !p.is_empty() {
        let (pq, tq) = (p[0] >> 4, p[0] & 0x0F);
        if tq > 3 {
            return malformed(format!("quantization table id {tq}"));
        }
        let (precision, width) = match pq {
            0 => (QuantPrecision::Bits8, 1),
            1 => (QuantPrecision::Bits16, 2),
            _ => return malformed(format!("quantization table precision {pq}")),
        };
        let Some(body) = p.get(1..1 + 64 * width) else {
            return malformed("truncated DQT segment");
        };
        let mut entries = [0u16; 64];
        for (i, e) in entries.iter_mut().enumerate() {
            *e = if width == 1 {
                body[i] as u16
            } else {
                u16::from_be_bytes([body[2 * i], body[2 * i + 1]])
            };
        }
        tables.insert(tq, QuantTable::new(entries, precision)?);
        ids.push(tq);
        p = &p[1 + 64 * width..];
    }
    Ok(ids)
}

fn parse_dht(
    mut p: &[u8],
    tables: &mut BTreeMap<(TableClass, u8), HuffmanTable>,
) -> Result<Vec<(TableClass, u8)>> {
    let mut keys = Vec::new();
    while !p.is_empty() {
        let Some(class) = TableClass::from_bits(p[0] >> 4) else {
            return malformed("Huffman table class must be 0 or 1");
        };
        let id = p[0] & 0x0F;
        if id > 3 {
            return malformed(format!("Huffman table id {id}"));
        }
        let Some(count_bytes) = p.get(1..17) else {
            return malformed("truncated DHT segment");
        };
        let mut counts = [0u8; 16];
        counts.copy_from_slice(count_bytes);
        let total: usize = counts.iter().map(|&c| c as usize).sum();
        let Some(symbols) = p.get(17..17 + total) else {
            return malformed("truncated DHT segment");
        };
        tables.insert(
            (class, id),
            HuffmanTable::new(class, counts, symbols.to_vec())?,
        );
        keys.push((class, id));
        p = &p[17 + total..];
    }
    Ok(keys)
}

fn parse_sof(p: &[u8]) -> Result<FrameHeader> {
    if p.len() < 6 {
        return malformed("truncated SOF0 segment");
    }
    let precision = p[0];
    let height = u16::from_be_bytes([p[1], p[2]]);
    let width = u16::from_be_bytes([p[3], p[4]]);
    let n = p[5] as usize;
    if precision != 8 {
        return unsupported(format!("{precision}-bit sample precision"));
    }
    if height == 0 {
        return unsupported("DNL-defined image height");
    }
    if width == 0 {
        return malformed("zero image width");
    }
    if n == 0 || n > 4 {
        return malformed(format!("{n} frame components"));
    }
    if p.len() != 6 + 3 * n {
        return malformed("SOF0 length does not match component count");
    }
    let mut components: Vec<FrameComponent> = Vec::with_capacity(n);
    for c in p[6..].chunks_exact(3) {
        let comp = FrameComponent {
            id: c[0],
            h_sampling: c[1] >> 4,
            v_sampling: c[1] & 0x0F,
            quant_table: c[2],
        };
        if !(1..=4).contains(&comp.h_sampling) || !(1..=4).contains(&comp.v_sampling) {
            return malformed(format!("sampling factors of component {}", comp.id));
        }
        if comp.quant_table > 3 {
            return malformed(format!("quantization table id {}", comp.quant_table));
        }
        if components.iter().any(|o| o.id == comp.id) {
            return malformed(format!("duplicate component id {}", comp.id));
        }
        components.push(comp);
    }
    Ok(FrameHeader {
        width,
        height,
        precision,
        components,
    })
}

fn parse_sos(
    p: &[u8],
    frame: &FrameHeader,
    quant: &BTreeMap<u8, QuantTable>,
    huffman: &BTreeMap<(TableClass, u8), HuffmanTable>,
) -> Result<Vec<ScanComponent>> {
    let n = *p.first().unwrap_or(&0) as usize;
    if n == 0 || n > 4 || p.len() != 1 + 2 * n + 3 {
        return malformed("invalid SOS header");
    }
    let mut scan = Vec::with_capacity(n);
    for s in p[1..1 + 2 * n].chunks_exact(2) {
        let Some(component) = frame.components.iter().position(|c| c.id == s[0]) else {
            return malformed(format!("scan references unknown component {}", s[0]));
        };
        if let Some(last) = scan.last().map(|l: &ScanComponent| l.component) {
            if component <= last {
                return malformed("scan components out of frame order");
            }
        }
        let sc = ScanComponent {
            component,
            dc_table: s[1] >> 4,
            ac_table: s[1] & 0x0F,
        };
        if !huffman.contains_key(&(TableClass::Dc, sc.dc_table))
            || !huffman.contains_key(&(TableClass::Ac, sc.ac_table))
        {
            return malformed(format!(
                "scan component {} references a missing Huffman table",
                s[0]
            ));
        }
        scan.push(sc);
    }
    let tail = &p[1 + 2 * n..];
    if tail != [0, 63, 0] {
        return malformed("baseline scan must cover spectral range 0..63 without approximation");
    }
    if scan.len() != frame.components.len() {
        return unsupported("multi-scan baseline files");
    }
    for c in &frame.components {
        if !quant.contains_key(&c.quant_table) {
            return malformed(format!(
                "component {} references a missing quantization table",
                c.id
            ));
        }
    }
    if n > 1 {
        let units: usize = frame
            .components
            .iter()
            .map(|c| c.h_sampling as usize * c.v_sampling as usize)
            .sum();
        if units > 10 {
            return malformed("more than 10 blocks per MCU");
        }
    }
    Ok(scan)
}

fn decode_scan(
    reader: &mut BitReader<'_>,
    frame: &FrameHeader,
    scan: &[ScanComponent],
    tables: &BTreeMap<(TableClass, u8), HuffmanTable>,
    restart_interval: u16,
    planes: &mut [CoeffPlane],
) -> Result<()> {
    let geometry = ScanGeometry::new(frame, scan);
    let decoders: Vec<(HuffmanDecoder, HuffmanDecoder)> = scan
        .iter()
        .map(|s| {
            (
                HuffmanDecoder::new(&tables[&(TableClass::Dc, s.dc_table)]),
                HuffmanDecoder::new(&tables[&(TableClass::Ac, s.ac_table)]),
            )
        })
        .collect();
    let mut predictors = vec![0i32; scan.len()];
    let mut blocks = Vec::with_capacity(10);
    let mut next_rst = 0u8;
    let interval = restart_interval as usize;

    for mcu in 0..geometry.mcu_count() {
        if interval > 0 && mcu > 0 && mcu % interval == 0 {
            let (code, _) = reader.seek_marker()?;
            if code != RST0 + next_rst {
                return malformed(format!(
                    "expected RST{next_rst} before MCU {mcu}, found marker 0x{code:02X}"
                ));
            }
            next_rst = (next_rst + 1) & 7;
            predictors.fill(0);
        }
        geometry.mcu_blocks(mcu, &mut blocks);
        for &(s, b) in &blocks {
            let (dc, ac) = &decoders[s];
            let block = &mut planes[scan[s].component].blocks[b];
            decode_block(reader, dc, ac, &mut predictors[s], block)?;
        }
    }
    Ok(())
}

fn decode_block(
    reader: &mut BitReader<'_>,
    dc: &HuffmanDecoder,
    ac: &HuffmanDecoder,
    predictor: &mut i32,
    block: &mut CoeffBlock,
) -> Result<()> {
    let s = dc.decode(|| reader.bit())? as u32;
    let diff = extend(reader.bits(s)?, s);
    *predictor += diff;
    block.coeffs[0] = *predictor;

    let mut k = 1;
    while k < 64 {
        let rs = ac.decode(|| reader.bit())?;
        let (run, size) = ((rs >> 4) as usize, (rs & 0x0F) as u32);
        if size == 0 {
            if run == 15 {
                k += 16;
                continue;
            }
            break;
        }
        k += run;
        if k > 63 {
            return malformed("AC run exceeds block end");
        }
        block.coeffs[k] = extend(reader.bits(size)?, size);
        k += 1;
    }
    Ok(())
}
