//! Per-frame orchestration: mean image, calibration schedule, zone trackers.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::attributes::{eval_attributes, AttributeVector, ContrastConfig};
use crate::frame::{calibrate_color, compute_mean_image_into, ColorCalibration, Frame, MeanImage};
use crate::memory::{AccumulatorBank, CountClassifierConfig, PixelScores};
use crate::zone::{
    compute_thresholds, detect_movement, update_occupancy, update_range, zone_feature_sum,
    DetectionZone, MovementConfig, ThresholdConfig, ZoneState,
};
use crate::Error;

/// All tunables of the detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    pub contrast: ContrastConfig,
    pub counts: CountClassifierConfig,
    /// Accumulator saturation bound.
    pub a_max: f64,
    pub thresholds: ThresholdConfig,
    pub movement: MovementConfig,
    /// Frames between colour recalibrations; frame 0 is always calibrated.
    pub calibration_interval: u64,
    /// Also maintain accumulators for every frame pixel, not just zones.
    pub full_frame: bool,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            contrast: ContrastConfig::default(),
            counts: CountClassifierConfig::default(),
            a_max: 1000.0,
            thresholds: ThresholdConfig::default(),
            movement: MovementConfig::default(),
            calibration_interval: 25,
            full_frame: false,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<(), Error> {
        self.contrast.validate()?;
        self.counts.validate()?;
        self.thresholds.validate()?;
        self.movement.validate()?;
        if self.calibration_interval == 0 {
            return Err(Error::InvalidConfig("calibration interval must be at least 1"));
        }
        if !(self.a_max > 0.0) {
            return Err(Error::InvalidConfig("a_max must be positive"));
        }
        Ok(())
    }

    /// Number of leading frames whose occupancy is forced to 0.
    pub fn warmup_frames(&self) -> u64 {
        let n = self.counts.n_full as u64;
        if (n as f64) < self.counts.n_full {
            n + 1
        } else {
            n
        }
    }
}

/// Pipeline stages, in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stage {
    MeanImage,
    Calibration,
    Attributes,
    Accumulators,
    Classification,
    Movement,
    Occupancy,
}

impl Stage {
    pub const ALL: [Stage; 7] = [
        Stage::MeanImage,
        Stage::Calibration,
        Stage::Attributes,
        Stage::Accumulators,
        Stage::Classification,
        Stage::Movement,
        Stage::Occupancy,
    ];

    pub const fn name(self) -> &'static str {
        match self {
            Stage::MeanImage => "mean_image",
            Stage::Calibration => "calibration",
            Stage::Attributes => "attributes",
            Stage::Accumulators => "accumulators",
            Stage::Classification => "classification",
            Stage::Movement => "movement",
            Stage::Occupancy => "occupancy",
        }
    }
}

/// Hook wrapped around every stage; used for instrumentation.
pub trait Probe {
    fn stage<T>(&mut self, stage: Stage, f: impl FnOnce() -> T) -> T {
        let _ = stage;
        f()
    }
}

/// Probe that does nothing.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoProbe;

impl Probe for NoProbe {}

/// Everything a zone needs from the current frame.
#[derive(Debug, Clone, Copy)]
pub struct FrameContext<'a> {
    pub t: u64,
    pub frame: &'a Frame,
    pub prev: Option<&'a Frame>,
    pub mean: &'a MeanImage,
    pub calib: ColorCalibration,
    pub warmup: bool,
}

/// Observable result of one zone in one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyRecord {
    pub frame: u64,
    pub zone: Arc<str>,
    pub occupied: bool,
    pub s: f64,
    pub t_high: f64,
    pub t_low: f64,
    pub movement: bool,
    pub warmup: bool,
}

/// A zone together with its accumulators and running state.
#[derive(Debug, Clone)]
pub struct ZoneTracker {
    zone: DetectionZone,
    id: Arc<str>,
    bank: AccumulatorBank,
    state: ZoneState,
    attrs: Vec<AttributeVector>,
    scores: Vec<PixelScores>,
    cfg: DetectorConfig,
}

impl ZoneTracker {
    pub fn new(zone: DetectionZone, cfg: DetectorConfig) -> Self {
        let n = zone.pixels().len();
        ZoneTracker {
            id: Arc::from(zone.id()),
            bank: AccumulatorBank::new(n, cfg.a_max),
            state: ZoneState::default(),
            attrs: Vec::with_capacity(n),
            scores: Vec::with_capacity(n),
            zone,
            cfg,
        }
    }

    pub fn zone(&self) -> &DetectionZone {
        &self.zone
    }

    pub fn state(&self) -> &ZoneState {
        &self.state
    }

    pub fn bank(&self) -> &AccumulatorBank {
        &self.bank
    }

    /// Attribute vectors of the last processed frame, one per zone pixel.
    pub fn attributes(&self) -> &[AttributeVector] {
        &self.attrs
    }

    /// Feature class scores of the last processed frame.
    pub fn scores(&self) -> &[PixelScores] {
        &self.scores
    }

    /// Learns from the current frame without any occupancy decision.
    fn learn<P: Probe>(&mut self, ctx: &FrameContext<'_>, freeze: bool, probe: &mut P) -> Result<(), Error> {
        let cfg = self.cfg;
        probe.stage(Stage::Attributes, || {
            self.attrs.clear();
            self.attrs.extend(self.zone.pixels().iter().map(|&(x, y)| {
                eval_attributes(x as usize, y as usize, ctx.mean, &ctx.calib, &cfg.contrast)
            }));
        });
        probe.stage(Stage::Accumulators, || {
            self.bank.update(&self.attrs, freeze, &cfg.counts)
        })?;
        probe.stage(Stage::Classification, || {
            self.bank.classify(&self.attrs, &cfg.counts, &mut self.scores)
        })
    }

    /// Runs the full per-zone pipeline for one frame.
    ///
    /// The accumulator freeze uses the occupancy decided for the previous
    /// frame; the new occupancy is decided from the updated accumulators.
    pub fn step<P: Probe>(
        &mut self,
        ctx: &FrameContext<'_>,
        probe: &mut P,
    ) -> Result<OccupancyRecord, Error> {
        self.learn(ctx, self.state.occupied, probe)?;
        let cfg = self.cfg;

        let moved = probe.stage(Stage::Movement, || {
            detect_movement(ctx.frame, ctx.prev, &self.zone, &cfg.movement)
        })?;

        probe.stage(Stage::Occupancy, || {
            let s = zone_feature_sum(&self.zone, &self.scores)?;
            let state = &mut self.state;
            update_range(state, s, &cfg.thresholds);
            let (t_high, t_low) = compute_thresholds(state, self.zone.p_d(), &cfg.thresholds);
            state.t_high = t_high;
            state.t_low = t_low;
            state.movement = moved;
            if moved {
                state.last_movement_frame = Some(ctx.t);
            }
            if ctx.warmup {
                state.occupied = false;
            } else {
                let recent = state.movement_recent(ctx.t, cfg.movement.hold_frames);
                update_occupancy(state, s, recent);
            }
            Ok(OccupancyRecord {
                frame: ctx.t,
                zone: self.id.clone(),
                occupied: state.occupied,
                s,
                t_high,
                t_low,
                movement: moved,
                warmup: ctx.warmup,
            })
        })
    }
}

/// Streaming detector over a sequence of equally sized frames.
#[derive(Debug, Clone)]
pub struct Detector {
    cfg: DetectorConfig,
    width: usize,
    height: usize,
    trackers: Vec<ZoneTracker>,
    full_frame: Option<ZoneTracker>,
    mean: MeanImage,
    calib: Option<ColorCalibration>,
    prev: Option<Frame>,
    t: u64,
}

impl Detector {
    pub fn new(
        cfg: DetectorConfig,
        zones: Vec<DetectionZone>,
        width: usize,
        height: usize,
    ) -> Result<Self, Error> {
        cfg.validate()?;
        let mean = MeanImage::from_values(width, height, 0, alloc::vec![0.0; width * height])?;
        for zone in &zones {
            // Re-validate against this detector's frame size.
            DetectionZone::new(zone.id(), zone.polygon().to_vec(), zone.p_d(), width, height)?;
        }
        let full_frame = if cfg.full_frame {
            let all = DetectionZone::rect("*", 0, 0, width as i32, height as i32, 0.0, width, height)?;
            Some(ZoneTracker::new(all, cfg))
        } else {
            None
        };
        Ok(Detector {
            trackers: zones.into_iter().map(|z| ZoneTracker::new(z, cfg)).collect(),
            full_frame,
            cfg,
            width,
            height,
            mean,
            calib: None,
            prev: None,
            t: 0,
        })
    }

    pub fn config(&self) -> &DetectorConfig {
        &self.cfg
    }

    pub fn trackers(&self) -> &[ZoneTracker] {
        &self.trackers
    }

    /// Index of the next frame to be processed.
    pub fn frames_processed(&self) -> u64 {
        self.t
    }

    pub fn calibration(&self) -> Option<&ColorCalibration> {
        self.calib.as_ref()
    }

    /// Mean image of the last processed frame.
    pub fn mean_image(&self) -> &MeanImage {
        &self.mean
    }

    /// Last processed frame.
    pub fn last_frame(&self) -> Option<&Frame> {
        self.prev.as_ref()
    }

    /// Per-pixel vehicle-feature sums over the whole frame, row-major.
    /// Only available in full-frame mode.
    pub fn feature_map(&self) -> Option<Vec<f64>> {
        self.full_frame
            .as_ref()
            .map(|f| f.scores().iter().map(PixelScores::vf_sum).collect())
    }

    /// Processes one frame, zones in order.
    pub fn process_frame(&mut self, frame: Frame) -> Result<Vec<OccupancyRecord>, Error> {
        self.process_frame_probed(frame, &mut NoProbe)
    }

    /// Processes one frame with every stage wrapped by `probe`.
    pub fn process_frame_probed<P: Probe>(
        &mut self,
        frame: Frame,
        probe: &mut P,
    ) -> Result<Vec<OccupancyRecord>, Error> {
        let mut records = Vec::new();
        self.run_frame(frame, probe, |trackers, ctx, probe| {
            for tracker in trackers.iter_mut() {
                records.push(tracker.step(ctx, probe)?);
            }
            Ok(())
        })?;
        Ok(records)
    }

    /// Processes one frame, handing the zone trackers to `fan_out`.
    ///
    /// `fan_out` must call [`ZoneTracker::step`] exactly once per tracker and
    /// return the records in tracker order; it may do so in parallel.
    pub fn process_frame_with<F>(&mut self, frame: Frame, fan_out: F) -> Result<Vec<OccupancyRecord>, Error>
    where
        F: FnOnce(&mut [ZoneTracker], &FrameContext<'_>) -> Result<Vec<OccupancyRecord>, Error>,
    {
        let mut out = None;
        self.run_frame(frame, &mut NoProbe, |trackers, ctx, _| {
            out = Some(fan_out(trackers, ctx)?);
            Ok(())
        })?;
        Ok(out.unwrap_or_default())
    }

    fn run_frame<P, F>(&mut self, mut frame: Frame, probe: &mut P, zones: F) -> Result<(), Error>
    where
        P: Probe,
        F: FnOnce(&mut [ZoneTracker], &FrameContext<'_>, &mut P) -> Result<(), Error>,
    {
        if frame.dims() != (self.width, self.height) {
            return Err(Error::DimensionMismatch {
                expected: (self.width, self.height),
                actual: frame.dims(),
            });
        }
        let t = self.t;
        frame.set_t(t);

        probe.stage(Stage::MeanImage, || compute_mean_image_into(&frame, &mut self.mean));
        if t.is_multiple_of(self.cfg.calibration_interval) || self.calib.is_none() {
            let mean = &self.mean;
            self.calib = Some(probe.stage(Stage::Calibration, || calibrate_color(mean)));
        }
        let ctx = FrameContext {
            t,
            frame: &frame,
            prev: self.prev.as_ref(),
            mean: &self.mean,
            calib: self.calib.unwrap_or(ColorCalibration::from_percentiles(0.0, 0.0, 255.0, 255.0)),
            warmup: t < self.cfg.warmup_frames(),
        };

        if let Some(full) = self.full_frame.as_mut() {
            full.learn(&ctx, false, probe)?;
        }
        zones(&mut self.trackers, &ctx, probe)?;

        self.prev = Some(frame);
        self.t += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn warmup_length_rounds_up() {
        let mut cfg = DetectorConfig::default();
        assert_eq!(cfg.warmup_frames(), 50);
        cfg.counts.n_full = 12.5;
        assert_eq!(cfg.warmup_frames(), 13);
    }

    #[test]
    fn constant_video_stays_empty() {
        let zone = DetectionZone::rect("z", 2, 2, 8, 8, 0.2, 16, 16).unwrap();
        let mut det = Detector::new(DetectorConfig::default(), vec![zone], 16, 16).unwrap();
        for i in 0..120 {
            let recs = det.process_frame(Frame::filled(16, 16, 0, 90).unwrap()).unwrap();
            assert_eq!(recs.len(), 1);
            assert_eq!(recs[0].frame, i);
            assert!(!recs[0].occupied);
            assert_eq!(recs[0].warmup, i < 50);
        }
    }

    #[test]
    fn rejects_mismatched_frames_and_zones() {
        let zone = DetectionZone::rect("z", 0, 0, 20, 20, 0.2, 20, 20).unwrap();
        assert!(Detector::new(DetectorConfig::default(), vec![zone], 16, 16).is_err());
        let mut det = Detector::new(DetectorConfig::default(), vec![], 16, 16).unwrap();
        assert!(det.process_frame(Frame::filled(17, 16, 0, 0).unwrap()).is_err());
    }

    #[test]
    fn full_frame_map_covers_every_pixel() {
        let cfg = DetectorConfig {
            full_frame: true,
            ..DetectorConfig::default()
        };
        let mut det = Detector::new(cfg, vec![], 12, 10).unwrap();
        det.process_frame(Frame::filled(12, 10, 0, 50).unwrap()).unwrap();
        assert_eq!(det.feature_map().unwrap().len(), 120);
    }
}
