//! Straight-line reference implementation of the whole detector.
//!
//! Everything is recomputed from scratch with plain loops: the 3x3 means are
//! nine clamped lookups per pixel, percentiles come from a sorted copy of the
//! rounded means, and no state is shared with `vloop_core` beyond the input
//! types and configuration structs. It is slow on purpose and exists to check
//! the optimised pipeline.
//!
//! Membership ramps use the same arithmetic form as the core, `(zero - v) /
//! (zero - full)`, so that both routes produce the same bits and occupancy can
//! be compared exactly.

use vloop_core::{DetectionZone, DetectorConfig, Frame};

/// Per-frame, per-zone output of the reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceRecord {
    pub occupied: bool,
    pub s: f64,
    pub t_high: f64,
    pub t_low: f64,
    pub movement: bool,
    pub warmup: bool,
}

fn mean_at(frame: &Frame, x: i64, y: i64) -> f64 {
    let (w, h) = (frame.width() as i64, frame.height() as i64);
    let mut sum: u32 = 0;
    for dy in -1..=1 {
        for dx in -1..=1 {
            let xx = (x + dx).max(0).min(w - 1);
            let yy = (y + dy).max(0).min(h - 1);
            sum += frame.data()[(yy * w + xx) as usize] as u32;
        }
    }
    sum as f64 / 9.0
}

fn percentile_of_sorted(sorted: &[u32], percent: usize) -> f64 {
    // Smallest value whose rank reaches ceil(p * n / 100).
    let n = sorted.len();
    let rank = (percent * n).div_ceil(100).max(1);
    sorted[rank - 1] as f64
}

fn calibrate(means: &[f64]) -> [f64; 4] {
    let mut bins: Vec<u32> = means.iter().map(|&m| ((m + 0.5) as u32).min(255)).collect();
    bins.sort_unstable();
    let mut b0 = percentile_of_sorted(&bins, 10);
    let mut b1 = percentile_of_sorted(&bins, 30);
    let mut w1 = percentile_of_sorted(&bins, 70);
    let mut w2 = percentile_of_sorted(&bins, 90);
    let sep = 5.0;
    if w1 < b1 {
        w1 = b1;
    }
    if w1 - b1 < 2.0 * sep {
        let mut c = (b1 + w1) / 2.0;
        if c < 2.0 * sep {
            c = 2.0 * sep;
        }
        if c > 255.0 - 2.0 * sep {
            c = 255.0 - 2.0 * sep;
        }
        b1 = c - sep;
        w1 = c + sep;
    } else {
        if b1 < sep {
            b1 = sep;
        }
        if w1 > 255.0 - sep {
            w1 = 255.0 - sep;
        }
    }
    if b0 > b1 - sep {
        b0 = b1 - sep;
    }
    if b0 < 0.0 {
        b0 = 0.0;
    }
    if w2 < w1 + sep {
        w2 = w1 + sep;
    }
    if w2 > 255.0 {
        w2 = 255.0;
    }
    [b0, b1, w1, w2]
}

fn down_ramp(v: f64, full: f64, zero: f64) -> f64 {
    if v <= full {
        1.0
    } else if v >= zero {
        0.0
    } else {
        (zero - v) / (zero - full)
    }
}

fn colour(v: f64, c: &[f64; 4]) -> [f64; 3] {
    let black = down_ramp(v, c[0], c[1]);
    let white = down_ramp(-v, -c[3], -c[2]);
    [black, 1.0 - (black + white), white]
}

fn contrast(centre: f64, reference: f64, inner: f64, outer: f64) -> [f64; 3] {
    let d = centre - reference;
    let darker = down_ramp(d, -outer, -inner);
    let brighter = down_ramp(-d, -outer, -inner);
    [darker, 1.0 - (darker + brighter), brighter]
}

fn count_terms(count: f64, n_zero: f64, n_full: f64) -> (f64, f64, f64) {
    let neg = down_ramp(count, -n_full, -n_zero);
    let pos = down_ramp(-count, -n_full, -n_zero);
    (neg, 1.0 - (neg + pos), pos)
}

/// Runs the reference detector; returns `records[frame][zone]`.
pub fn naive_reference(
    frames: &[Frame],
    zones: &[DetectionZone],
    cfg: &DetectorConfig,
) -> Vec<Vec<ReferenceRecord>> {
    const CORNERS: [(i64, i64); 4] = [(2, -2), (-2, -2), (-2, 2), (2, 2)];
    let inner = cfg.contrast.delta_inner;
    let outer = cfg.contrast.delta_outer;
    let (n_zero, n_full) = (cfg.counts.n_zero, cfg.counts.n_full);
    let mut warmup_frames = 0u64;
    while (warmup_frames as f64) < n_full {
        warmup_frames += 1;
    }

    // acc[zone][pixel][attribute][term]
    let mut acc: Vec<Vec<[[f64; 3]; 5]>> = zones
        .iter()
        .map(|z| vec![[[0.0; 3]; 5]; z.pixels().len()])
        .collect();
    let mut occupied = vec![false; zones.len()];
    let mut s_min = vec![0.0; zones.len()];
    let mut s_max = vec![0.0; zones.len()];
    let mut last_move: Vec<Option<u64>> = vec![None; zones.len()];
    let mut calib = [0.0; 4];
    let mut out = Vec::with_capacity(frames.len());

    for (t, frame) in frames.iter().enumerate() {
        let t = t as u64;
        let (w, h) = (frame.width(), frame.height());
        let mut means = vec![0.0; w * h];
        for y in 0..h {
            for x in 0..w {
                means[y * w + x] = mean_at(frame, x as i64, y as i64);
            }
        }
        if t.is_multiple_of(cfg.calibration_interval) {
            calib = calibrate(&means);
        }
        let mean = |x: i64, y: i64| {
            let xx = x.max(0).min(w as i64 - 1) as usize;
            let yy = y.max(0).min(h as i64 - 1) as usize;
            means[yy * w + xx]
        };
        let warmup = t < warmup_frames;

        let mut row = Vec::with_capacity(zones.len());
        for (z, zone) in zones.iter().enumerate() {
            let mut s = 0.0;
            for (p, &(px, py)) in zone.pixels().iter().enumerate() {
                let (x, y) = (px as i64, py as i64);
                let centre = mean(x, y);
                let mut attrs = [[0.0; 3]; 5];
                attrs[0] = colour(centre, &calib);
                for (k, (dx, dy)) in CORNERS.iter().enumerate() {
                    attrs[k + 1] = contrast(centre, mean(x + dx, y + dy), inner, outer);
                }
                for a in 0..5 {
                    for term in 0..3 {
                        let count = acc[z][p][a][term];
                        let (_, low, _) = count_terms(count, n_zero, n_full);
                        if occupied[z] && low > 0.5 {
                            continue;
                        }
                        let next = count + (2.0 * attrs[a][term] - 1.0);
                        acc[z][p][a][term] = next.max(-cfg.a_max).min(cfg.a_max);
                    }
                }
                let mut pixel_vf = 0.0;
                for a in 0..5 {
                    let mut vf: f64 = 0.0;
                    for term in 0..3 {
                        let (neg, _, _) = count_terms(acc[z][p][a][term], n_zero, n_full);
                        vf = vf.max(neg * attrs[a][term]);
                    }
                    pixel_vf += vf;
                }
                s += pixel_vf;
            }

            if t == 0 {
                s_min[z] = s;
                s_max[z] = s;
            } else {
                s_min[z] = if s > s_min[z] { s_min[z] + cfg.thresholds.beta_min } else { s };
                s_max[z] = if s < s_max[z] { s_max[z] - cfg.thresholds.beta_max } else { s };
                if s_min[z] > s_max[z] {
                    s_min[z] = s_max[z];
                }
            }
            let p_d = zone.p_d();
            let mut t_high = p_d * s_max[z] + (1.0 - p_d) * s_min[z];
            if t_high < 100.0 * p_d {
                t_high = 100.0 * p_d;
            }
            let t_low = cfg.thresholds.alpha * t_high;

            let mut movement = false;
            if t > 0 {
                let prev = &frames[(t - 1) as usize];
                let mut moved = 0usize;
                for &(px, py) in zone.pixels() {
                    let i = py as usize * w + px as usize;
                    let d = (frame.data()[i] as i32 - prev.data()[i] as i32).abs();
                    if d > cfg.movement.pixel_delta as i32 {
                        moved += 1;
                    }
                }
                movement = moved as f64 > cfg.movement.zone_fraction * zone.pixels().len() as f64;
            }
            if movement {
                last_move[z] = Some(t);
            }

            if warmup {
                occupied[z] = false;
            } else {
                let gate = match last_move[z] {
                    Some(m) => t - m < cfg.movement.hold_frames,
                    None => false,
                };
                let wanted = if s >= t_high {
                    true
                } else if s <= t_low {
                    false
                } else {
                    occupied[z]
                };
                if gate {
                    occupied[z] = wanted;
                }
            }
            row.push(ReferenceRecord {
                occupied: occupied[z],
                s,
                t_high,
                t_low,
                movement,
                warmup,
            });
        }
        out.push(row);
    }
    out
}
