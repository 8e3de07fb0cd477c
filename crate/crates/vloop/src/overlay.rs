//! Debug overlays: the input frame with zone outlines and feature pixels.

use std::collections::HashSet;
use std::path::Path;

use vloop_core::{Frame, PixelScores, ZoneTracker};

use crate::pgm::write_pgm;

pub const OCCUPIED_LEVEL: u8 = 255;
pub const EMPTY_LEVEL: u8 = 128;
pub const FEATURE_LEVEL: u8 = 0;
/// Pixels whose vehicle-feature sum over the five attributes exceeds this
/// are marked.
pub const FEATURE_MARK: f64 = 2.5;

/// Zone pixels with a 4-neighbour outside the zone (or outside the frame).
pub fn boundary_pixels(pixels: &[(u32, u32)]) -> Vec<(u32, u32)> {
    let set: HashSet<(u32, u32)> = pixels.iter().copied().collect();
    pixels
        .iter()
        .copied()
        .filter(|&(x, y)| {
            x == 0
                || y == 0
                || !set.contains(&(x - 1, y))
                || !set.contains(&(x + 1, y))
                || !set.contains(&(x, y - 1))
                || !set.contains(&(x, y + 1))
        })
        .collect()
}

/// Renders the overlay image for one frame.
///
/// Feature pixels are drawn first so outlines stay visible on top of them.
pub fn render_overlay(frame: &Frame, trackers: &[ZoneTracker]) -> Vec<u8> {
    let width = frame.width();
    let mut out = frame.data().to_vec();
    for tracker in trackers {
        for (&(x, y), scores) in tracker.zone().pixels().iter().zip(tracker.scores()) {
            if PixelScores::vf_sum(scores) > FEATURE_MARK {
                out[y as usize * width + x as usize] = FEATURE_LEVEL;
            }
        }
    }
    for tracker in trackers {
        let level = if tracker.state().occupied { OCCUPIED_LEVEL } else { EMPTY_LEVEL };
        for (x, y) in boundary_pixels(tracker.zone().pixels()) {
            out[y as usize * width + x as usize] = level;
        }
    }
    out
}

/// Writes `overlay_%06d.pgm` for frame `t` into `dir`.
pub fn write_overlay(dir: &Path, t: u64, frame: &Frame, trackers: &[ZoneTracker]) -> std::io::Result<()> {
    let image = render_overlay(frame, trackers);
    write_pgm(&dir.join(format!("overlay_{t:06}.pgm")), frame.width(), frame.height(), &image)
}
