//! MCU traversal shared by the entropy decoder and encoder.

use super::{FrameHeader, ScanComponent};

pub(crate) struct ScanGeometry {
    mcu_count: usize,
    mcus_wide: usize,
    /// Per scan component: (h, v, plane width in blocks).
    layout: Vec<(usize, usize, usize)>,
    interleaved: bool,
}

impl ScanGeometry {
    pub(crate) fn new(frame: &FrameHeader, scan: &[ScanComponent]) -> Self {
        let interleaved = scan.len() > 1;
        let layout: Vec<_> = scan
            .iter()
            .map(|s| {
                let c = &frame.components[s.component];
                let (bw, _) = frame.plane_blocks(s.component);
                (c.h_sampling as usize, c.v_sampling as usize, bw)
            })
            .collect();
        let (mcu_count, mcus_wide) = if interleaved {
            (frame.mcus_wide() * frame.mcus_high(), frame.mcus_wide())
        } else {
            let (bw, bh) = frame.plane_blocks(scan[0].component);
            (bw * bh, bw)
        };
        ScanGeometry {
            mcu_count,
            mcus_wide,
            layout,
            interleaved,
        }
    }

    pub(crate) fn mcu_count(&self) -> usize {
        self.mcu_count
    }

    /// Fills `out` with `(scan component index, plane block index)` pairs in
    /// coding order for MCU number `mcu`.
    pub(crate) fn mcu_blocks(&self, mcu: usize, out: &mut Vec<(usize, usize)>) {
        out.clear();
        if !self.interleaved {
            out.push((0, mcu));
            return;
        }
        let (my, mx) = (mcu / self.mcus_wide, mcu % self.mcus_wide);
        for (s, &(h, v, width)) in self.layout.iter().enumerate() {
            for by in 0..v {
                for bx in 0..h {
                    let row = my * v + by;
                    let col = mx * h + bx;
                    out.push((s, row * width + col));
                }
            }
        }
    }
}
