//! Detection zones: feature sums, adaptive hysteresis thresholds, movement
//! gating and occupancy.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::ZoneDefect;
use crate::frame::Frame;
use crate::memory::PixelScores;
use crate::raster::{is_simple, rasterize_polygon, Vertex};
use crate::Error;

/// Default zone sensitivity.
pub const DEFAULT_SENSITIVITY: f64 = 0.2;

/// A polygonal region whose occupancy is reported.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionZone {
    id: String,
    polygon: Vec<Vertex>,
    pixels: Vec<(u32, u32)>,
    p_d: f64,
}

impl DetectionZone {
    /// Validates `polygon` against a `width` x `height` frame and rasterises it.
    ///
    /// Vertices are pixel-corner coordinates, so `(width, height)` is the
    /// bottom-right corner of the frame and still in bounds.
    pub fn new(
        id: impl Into<String>,
        polygon: Vec<Vertex>,
        p_d: f64,
        width: usize,
        height: usize,
    ) -> Result<Self, Error> {
        let id = id.into();
        let invalid = |reason| Error::InvalidZone {
            id: id.clone(),
            reason,
        };
        if polygon.len() < 3 {
            return Err(invalid(ZoneDefect::TooFewVertices(polygon.len())));
        }
        if !(0.0..=1.0).contains(&p_d) {
            return Err(invalid(ZoneDefect::Sensitivity(p_d)));
        }
        if let Some(&(x, y)) = polygon
            .iter()
            .find(|&&(x, y)| x < 0 || y < 0 || x as usize > width || y as usize > height)
        {
            return Err(invalid(ZoneDefect::OutOfBounds { x, y }));
        }
        if !is_simple(&polygon) {
            return Err(invalid(ZoneDefect::SelfIntersecting));
        }
        let pixels = rasterize_polygon(&polygon, width, height);
        if pixels.is_empty() {
            return Err(invalid(ZoneDefect::Empty));
        }
        Ok(DetectionZone {
            id,
            polygon,
            pixels,
            p_d,
        })
    }

    /// Axis-aligned rectangle covering `w` x `h` pixels from `(x, y)`.
    pub fn rect(
        id: impl Into<String>,
        x: i32,
        y: i32,
        w: i32,
        h: i32,
        p_d: f64,
        frame_width: usize,
        frame_height: usize,
    ) -> Result<Self, Error> {
        let polygon = alloc::vec![(x, y), (x + w, y), (x + w, y + h), (x, y + h)];
        DetectionZone::new(id, polygon, p_d, frame_width, frame_height)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn polygon(&self) -> &[Vertex] {
        &self.polygon
    }

    /// Covered pixels, row-major.
    pub fn pixels(&self) -> &[(u32, u32)] {
        &self.pixels
    }

    pub fn p_d(&self) -> f64 {
        self.p_d
    }
}

/// Constants of the adaptive threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdConfig {
    /// Ratio of the low to the high threshold.
    pub alpha: f64,
    /// Per-frame rise of the range minimum while the sum stays above it.
    pub beta_min: f64,
    /// Per-frame fall of the range maximum while the sum stays below it.
    pub beta_max: f64,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        ThresholdConfig {
            alpha: 0.8,
            beta_min: 0.1,
            beta_max: 0.01,
        }
    }
}

impl ThresholdConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if 0.0 < self.alpha && self.alpha < 1.0 && self.beta_min > 0.0 && self.beta_max > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidConfig(
                "thresholds need 0 < alpha < 1, beta_min > 0, beta_max > 0",
            ))
        }
    }
}

/// Frame differencing parameters of the movement gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MovementConfig {
    /// A pixel moved when its intensity changed by more than this.
    pub pixel_delta: u8,
    /// Fraction of zone pixels that must move.
    pub zone_fraction: f64,
    /// Number of frames a detected movement keeps the gate open.
    pub hold_frames: u64,
}

impl Default for MovementConfig {
    fn default() -> Self {
        MovementConfig {
            pixel_delta: 15,
            zone_fraction: 0.01,
            hold_frames: 5,
        }
    }
}

impl MovementConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.pixel_delta > 0
            && self.pixel_delta < 255
            && self.zone_fraction > 0.0
            && self.zone_fraction <= 1.0
            && self.hold_frames >= 1
        {
            Ok(())
        } else {
            Err(Error::InvalidConfig(
                "movement needs 0 < pixel_delta < 255, 0 < zone_fraction <= 1, hold_frames >= 1",
            ))
        }
    }
}

/// Running state of one zone.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ZoneState {
    pub s: f64,
    pub s_min: f64,
    pub s_max: f64,
    pub t_high: f64,
    pub t_low: f64,
    pub occupied: bool,
    pub movement: bool,
    pub last_movement_frame: Option<u64>,
    /// False until the first feature sum has seeded the range.
    pub initialized: bool,
}

impl ZoneState {
    /// Whether movement was seen within the last `hold_frames` frames,
    /// counting frame `t` itself.
    pub fn movement_recent(&self, t: u64, hold_frames: u64) -> bool {
        self.last_movement_frame
            .is_some_and(|m| t >= m && t - m < hold_frames)
    }
}

/// Total vehicle-feature mass over the zone pixels and all attributes.
pub fn zone_feature_sum(zone: &DetectionZone, scores: &[PixelScores]) -> Result<f64, Error> {
    if scores.len() != zone.pixels.len() {
        return Err(Error::GridMismatch {
            expected: zone.pixels.len(),
            actual: scores.len(),
        });
    }
    Ok(scores.iter().map(PixelScores::vf_sum).sum())
}

/// Tracks the range of recent feature sums.
///
/// The first call seeds both ends with `s`. Afterwards the minimum jumps down
/// to `s` or creeps up by `beta_min`, and the maximum jumps up to `s` or
/// decays by `beta_max`. The minimum never exceeds the maximum.
pub fn update_range(state: &mut ZoneState, s: f64, cfg: &ThresholdConfig) {
    state.s = s;
    if !state.initialized {
        state.s_min = s;
        state.s_max = s;
        state.initialized = true;
        return;
    }
    state.s_min = if s <= state.s_min {
        s
    } else {
        state.s_min + cfg.beta_min
    };
    state.s_max = if s >= state.s_max {
        s
    } else {
        state.s_max - cfg.beta_max
    };
    state.s_min = state.s_min.min(state.s_max);
}

/// High and low occupancy thresholds for the current range.
pub fn compute_thresholds(state: &ZoneState, p_d: f64, cfg: &ThresholdConfig) -> (f64, f64) {
    let t_high = (p_d * state.s_max + (1.0 - p_d) * state.s_min).max(100.0 * p_d);
    (t_high, cfg.alpha * t_high)
}

/// Frame differencing inside the zone.
///
/// Returns true when more than `zone_fraction` of the zone pixels changed by
/// more than `pixel_delta`. Without a previous frame there is no movement.
pub fn detect_movement(
    frame: &Frame,
    prev: Option<&Frame>,
    zone: &DetectionZone,
    cfg: &MovementConfig,
) -> Result<bool, Error> {
    let Some(prev) = prev else {
        return Ok(false);
    };
    if prev.dims() != frame.dims() {
        return Err(Error::DimensionMismatch {
            expected: frame.dims(),
            actual: prev.dims(),
        });
    }
    let moved = zone
        .pixels
        .iter()
        .filter(|&&(x, y)| {
            let (x, y) = (x as usize, y as usize);
            frame.pixel(x, y).abs_diff(prev.pixel(x, y)) > cfg.pixel_delta
        })
        .count();
    Ok(moved as f64 > cfg.zone_fraction * zone.pixels.len() as f64)
}

/// Hysteresis decision gated by movement.
///
/// The hysteresis candidate is 1 at or above `t_high`, 0 at or below `t_low`
/// and the previous value in between. A candidate that differs from the
/// previous value is only accepted while `movement_recent` holds.
pub fn update_occupancy(state: &mut ZoneState, s: f64, movement_recent: bool) {
    let candidate = if s >= state.t_high {
        true
    } else if s <= state.t_low {
        false
    } else {
        state.occupied
    };
    if candidate != state.occupied && movement_recent {
        state.occupied = candidate;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::memory::FeatureClassScores;
    use alloc::vec;

    fn scores(n: usize, vf: f64) -> Vec<PixelScores> {
        let s = FeatureClassScores {
            vf,
            bf: 0.0,
            uf: 0.0,
        };
        vec![PixelScores([s; 5]); n]
    }

    #[test]
    fn zone_validation() {
        assert!(DetectionZone::rect("a", 0, 0, 8, 8, 0.2, 8, 8).is_ok());
        let err = DetectionZone::rect("a", 0, 0, 9, 8, 0.2, 8, 8).unwrap_err();
        assert!(matches!(
            err,
            Error::InvalidZone {
                reason: ZoneDefect::OutOfBounds { x: 9, y: 0 },
                ..
            }
        ));
        let err = DetectionZone::rect("a", 0, 0, 4, 4, 1.5, 8, 8).unwrap_err();
        assert!(matches!(
            err,
            Error::InvalidZone {
                reason: ZoneDefect::Sensitivity(_),
                ..
            }
        ));
        let bowtie = vec![(0, 0), (4, 4), (4, 0), (0, 4)];
        assert!(matches!(
            DetectionZone::new("b", bowtie, 0.2, 8, 8),
            Err(Error::InvalidZone {
                reason: ZoneDefect::SelfIntersecting,
                ..
            })
        ));
    }

    #[test]
    fn feature_sum_examples() {
        let two = DetectionZone::rect("z", 0, 0, 2, 1, 0.2, 8, 8).unwrap();
        assert_eq!(zone_feature_sum(&two, &scores(2, 0.0)).unwrap(), 0.0);
        assert_eq!(zone_feature_sum(&two, &scores(2, 1.0)).unwrap(), 10.0);
        let three = DetectionZone::rect("z", 0, 0, 3, 1, 0.2, 8, 8).unwrap();
        assert!((zone_feature_sum(&three, &scores(3, 0.2)).unwrap() - 3.0).abs() < 1e-12);
        assert!(zone_feature_sum(&three, &scores(2, 0.2)).is_err());
    }

    fn ranged(s_min: f64, s_max: f64) -> ZoneState {
        ZoneState {
            s_min,
            s_max,
            initialized: true,
            ..ZoneState::default()
        }
    }

    #[test]
    fn range_update_examples() {
        let cfg = ThresholdConfig::default();
        for (s, want) in [(50.0, (10.1, 99.99)), (5.0, (5.0, 99.99)), (200.0, (10.1, 200.0))] {
            let mut st = ranged(10.0, 100.0);
            update_range(&mut st, s, &cfg);
            assert!((st.s_min - want.0).abs() < 1e-12 && (st.s_max - want.1).abs() < 1e-12);
        }
    }

    #[test]
    fn range_seeds_on_first_sum_and_stays_ordered() {
        let cfg = ThresholdConfig::default();
        let mut st = ZoneState::default();
        update_range(&mut st, 42.0, &cfg);
        assert_eq!((st.s_min, st.s_max), (42.0, 42.0));
        for _ in 0..100 {
            update_range(&mut st, 43.0, &cfg);
            assert!(st.s_min <= st.s_max);
        }
    }

    #[test]
    fn threshold_examples() {
        let cfg = ThresholdConfig::default();
        let (h, l) = compute_thresholds(&ranged(40.0, 240.0), 0.2, &cfg);
        assert!((h - 80.0).abs() < 1e-12 && (l - 64.0).abs() < 1e-12);
        let (h, l) = compute_thresholds(&ranged(0.0, 0.0), 0.2, &cfg);
        assert!((h - 20.0).abs() < 1e-12 && (l - 16.0).abs() < 1e-12);
        let (h, l) = compute_thresholds(&ranged(0.0, 50.0), 1.0, &cfg);
        assert_eq!((h, l), (100.0, 80.0));
    }

    fn frame_with(w: usize, h: usize, v: u8) -> Frame {
        Frame::filled(w, h, 0, v).unwrap()
    }

    #[test]
    fn movement_examples() {
        let zone = DetectionZone::rect("z", 0, 0, 10, 10, 0.2, 10, 10).unwrap();
        let cfg = MovementConfig::default();
        let a = frame_with(10, 10, 0);
        assert!(!detect_movement(&a, None, &zone, &cfg).unwrap());
        assert!(!detect_movement(&a, Some(&a), &zone, &cfg).unwrap());
        assert!(detect_movement(&frame_with(10, 10, 255), Some(&a), &zone, &cfg).unwrap());
        assert!(!detect_movement(&frame_with(10, 10, 15), Some(&a), &zone, &cfg).unwrap());
        assert!(detect_movement(&frame_with(10, 10, 16), Some(&a), &zone, &cfg).unwrap());
        assert!(detect_movement(&a, Some(&frame_with(11, 10, 0)), &zone, &cfg).is_err());
    }

    #[test]
    fn occupancy_examples() {
        let base = ZoneState {
            t_high: 100.0,
            t_low: 80.0,
            ..ZoneState::default()
        };
        let mut st = base;
        update_occupancy(&mut st, 120.0, true);
        assert!(st.occupied);

        let mut st = ZoneState {
            occupied: true,
            ..base
        };
        update_occupancy(&mut st, 90.0, true);
        assert!(st.occupied);
        update_occupancy(&mut st, 90.0, false);
        assert!(st.occupied);
        update_occupancy(&mut st, 50.0, false);
        assert!(st.occupied);
        update_occupancy(&mut st, 50.0, true);
        assert!(!st.occupied);
    }

    #[test]
    fn movement_recency_window() {
        let st = ZoneState {
            last_movement_frame: Some(10),
            ..ZoneState::default()
        };
        assert!(st.movement_recent(10, 5));
        assert!(st.movement_recent(14, 5));
        assert!(!st.movement_recent(15, 5));
        assert!(!ZoneState::default().movement_recent(0, 5));
    }
}
