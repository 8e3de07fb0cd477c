//! Accumulator bank dumps for debugging.
//!
//! Layout: magic `VLAC`, then width, height and the number of counts per
//! pixel as little-endian u32, then the counts as little-endian f32 in
//! row-major order over the zone's bounding box. Pixels of the box that are
//! outside the zone are written as NaN.

use std::io::{self, Write};

use vloop_core::memory::TERMS_PER_PIXEL;
use vloop_core::ZoneTracker;

pub const MAGIC: &[u8; 4] = b"VLAC";

/// Serialises the bank of one zone tracker.
pub fn write_bank_snapshot<W: Write>(out: &mut W, tracker: &ZoneTracker) -> io::Result<()> {
    let pixels = tracker.zone().pixels();
    let (x0, y0, x1, y1) = pixels.iter().fold(
        (u32::MAX, u32::MAX, 0, 0),
        |(a, b, c, d), &(x, y)| (a.min(x), b.min(y), c.max(x), d.max(y)),
    );
    let (w, h) = if pixels.is_empty() { (0, 0) } else { (x1 - x0 + 1, y1 - y0 + 1) };
    out.write_all(MAGIC)?;
    for v in [w, h, TERMS_PER_PIXEL as u32] {
        out.write_all(&v.to_le_bytes())?;
    }
    let mut grid = vec![f32::NAN; (w * h) as usize * TERMS_PER_PIXEL];
    let counts = tracker.bank().counts();
    for (i, &(x, y)) in pixels.iter().enumerate() {
        let cell = ((y - y0) * w + (x - x0)) as usize * TERMS_PER_PIXEL;
        for k in 0..TERMS_PER_PIXEL {
            grid[cell + k] = counts[i * TERMS_PER_PIXEL + k] as f32;
        }
    }
    for v in grid {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}
