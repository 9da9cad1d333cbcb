use std::collections::BTreeMap;

use super::bitio::BitWriter;
use super::error::{JpegError, Result};
use super::huffman::{category, magnitude_bits, HuffmanEncoder, HuffmanTable, TableClass};
use super::marker::*;
use super::scan::ScanGeometry;
use super::{HeaderItem, JpegImage, MarkerSegment, QuantPrecision};

/// Receives the symbol stream of a scan, either to count or to emit it.
trait SymbolSink {
    fn symbol(&mut self, scan_index: usize, class: TableClass, symbol: u8);
    fn extra_bits(&mut self, bits: u32, len: u32);
    fn restart(&mut self, index: u8);
}

struct FrequencyCounter<'a> {
    scan_tables: &'a [(u8, u8)],
    freq: BTreeMap<(TableClass, u8), [u64; 256]>,
}

impl SymbolSink for FrequencyCounter<'_> {
    fn symbol(&mut self, scan_index: usize, class: TableClass, symbol: u8) {
        let (dc, ac) = self.scan_tables[scan_index];
        let id = if class == TableClass::Dc { dc } else { ac };
        self.freq.entry((class, id)).or_insert([0; 256])[symbol as usize] += 1;
    }

    fn extra_bits(&mut self, _bits: u32, _len: u32) {}

    fn restart(&mut self, _index: u8) {}
}

struct EntropyEncoder {
    writer: BitWriter,
    /// Per scan component: (DC encoder, AC encoder).
    encoders: Vec<(HuffmanEncoder, HuffmanEncoder)>,
}

impl SymbolSink for EntropyEncoder {
    fn symbol(&mut self, scan_index: usize, class: TableClass, symbol: u8) {
        let (dc, ac) = &self.encoders[scan_index];
        let enc = if class == TableClass::Dc { dc } else { ac };
        let (code, len) = enc
            .lookup(symbol)
            .expect("table selection guarantees every emitted symbol has a code");
        self.writer.put(code as u32, len as u32);
    }

    fn extra_bits(&mut self, bits: u32, len: u32) {
        self.writer.put(bits, len);
    }

    fn restart(&mut self, index: u8) {
        self.writer.pad();
        self.writer.marker(RST0 + index);
    }
}

/// Walks the scan in coding order, emitting symbols to `sink`.
fn walk_scan(image: &JpegImage, sink: &mut impl SymbolSink) -> Result<()> {
    let geometry = ScanGeometry::new(&image.frame, &image.scan);
    let interval = image.restart_interval as usize;
    let mut predictors = vec![0i32; image.scan.len()];
    let mut blocks = Vec::with_capacity(10);
    let mut next_rst = 0u8;

    for mcu in 0..geometry.mcu_count() {
        if interval > 0 && mcu > 0 && mcu % interval == 0 {
            sink.restart(next_rst);
            next_rst = (next_rst + 1) & 7;
            predictors.fill(0);
        }
        geometry.mcu_blocks(mcu, &mut blocks);
        for &(s, b) in &blocks {
            let component = image.scan[s].component;
            let coeffs = &image.coeff_planes[component].blocks[b].coeffs;
            let overflow = |value| JpegError::EncodingOverflow {
                component,
                block: b,
                value,
            };

            let diff = coeffs[0] - predictors[s];
            let size = category(diff);
            if size > 15 || coeffs[0].unsigned_abs() > 32767 {
                return Err(overflow(coeffs[0]));
            }
            predictors[s] = coeffs[0];
            sink.symbol(s, TableClass::Dc, size as u8);
            sink.extra_bits(magnitude_bits(diff, size), size);

            let mut run = 0u8;
            for &value in &coeffs[1..] {
                if value == 0 {
                    run += 1;
                    continue;
                }
                let size = category(value);
                if size > 15 {
                    return Err(overflow(value));
                }
                while run >= 16 {
                    sink.symbol(s, TableClass::Ac, 0xF0);
                    run -= 16;
                }
                sink.symbol(s, TableClass::Ac, (run << 4) | size as u8);
                sink.extra_bits(magnitude_bits(value, size), size);
                run = 0;
            }
            if run > 0 {
                sink.symbol(s, TableClass::Ac, 0x00);
            }
        }
    }
    Ok(())
}

/// Keeps each original table that can code every symbol it is asked for,
/// and replaces the others with tables built from the symbol statistics.
fn select_tables(image: &JpegImage) -> Result<BTreeMap<(TableClass, u8), HuffmanTable>> {
    let scan_tables: Vec<(u8, u8)> = image
        .scan
        .iter()
        .map(|s| (s.dc_table, s.ac_table))
        .collect();
    let mut counter = FrequencyCounter {
        scan_tables: &scan_tables,
        freq: BTreeMap::new(),
    };
    walk_scan(image, &mut counter)?;

    let mut tables = image.huffman_tables.clone();
    for (key, freq) in &counter.freq {
        let original = &image.huffman_tables[key];
        let encoder = HuffmanEncoder::new(original);
        let complete = freq
            .iter()
            .enumerate()
            .all(|(sym, &n)| n == 0 || encoder.lookup(sym as u8).is_some());
        if !complete {
            tables.insert(*key, HuffmanTable::from_frequencies(key.0, freq));
        }
    }
    Ok(tables)
}

fn put_segment(out: &mut Vec<u8>, marker: u8, payload: &[u8]) {
    out.extend_from_slice(&[0xFF, marker]);
    out.extend_from_slice(&((payload.len() + 2) as u16).to_be_bytes());
    out.extend_from_slice(payload);
}

pub(super) fn serialize(image: &JpegImage) -> Result<Vec<u8>> {
    let tables = select_tables(image)?;
    let mut out = vec![0xFF, SOI];
    let write_preserved = |out: &mut Vec<u8>, seg: &MarkerSegment| {
        put_segment(out, seg.marker, &seg.payload);
    };

    let mut wrote_dri = false;
    for item in &image.header_layout {
        match item {
            HeaderItem::Preserved(i) => write_preserved(&mut out, &image.preserved_segments[*i]),
            HeaderItem::Quant(ids) => {
                let mut payload = Vec::new();
                for id in ids {
                    let table = &image.quant_tables[id];
                    match table.precision() {
                        QuantPrecision::Bits8 => {
                            payload.push(*id);
                            payload.extend(table.entries().iter().map(|&q| q as u8));
                        }
                        QuantPrecision::Bits16 => {
                            payload.push(0x10 | id);
                            for q in table.entries() {
                                payload.extend_from_slice(&q.to_be_bytes());
                            }
                        }
                    }
                }
                put_segment(&mut out, DQT, &payload);
            }
            HeaderItem::Huffman(keys) => {
                let mut payload = Vec::new();
                for key in keys {
                    let table = &tables[key];
                    payload.push((key.0.bits() << 4) | key.1);
                    payload.extend_from_slice(table.counts());
                    payload.extend_from_slice(table.symbols());
                }
                put_segment(&mut out, DHT, &payload);
            }
            HeaderItem::Frame => {
                let f = &image.frame;
                let mut payload = vec![f.precision];
                payload.extend_from_slice(&f.height.to_be_bytes());
                payload.extend_from_slice(&f.width.to_be_bytes());
                payload.push(f.components.len() as u8);
                for c in &f.components {
                    payload.extend_from_slice(&[
                        c.id,
                        (c.h_sampling << 4) | c.v_sampling,
                        c.quant_table,
                    ]);
                }
                put_segment(&mut out, SOF0, &payload);
            }
            HeaderItem::RestartInterval => {
                put_segment(&mut out, DRI, &image.restart_interval.to_be_bytes());
                wrote_dri = true;
            }
        }
    }
    if image.restart_interval > 0 && !wrote_dri {
        put_segment(&mut out, DRI, &image.restart_interval.to_be_bytes());
    }

    let mut sos = vec![image.scan.len() as u8];
    for s in &image.scan {
        sos.push(image.frame.components[s.component].id);
        sos.push((s.dc_table << 4) | s.ac_table);
    }
    sos.extend_from_slice(&[0, 63, 0]);
    put_segment(&mut out, SOS, &sos);

    let encoders = image
        .scan
        .iter()
        .map(|s| {
            (
                HuffmanEncoder::new(&tables[&(TableClass::Dc, s.dc_table)]),
                HuffmanEncoder::new(&tables[&(TableClass::Ac, s.ac_table)]),
            )
        })
        .collect();
    let mut encoder = EntropyEncoder {
        writer: BitWriter::new(out),
        encoders,
    };
    walk_scan(image, &mut encoder)?;
    let mut out = encoder.writer.finish();

    for &i in &image.trailer {
        write_preserved(&mut out, &image.preserved_segments[i]);
    }
    out.extend_from_slice(&[0xFF, EOI]);
    Ok(out)
}
