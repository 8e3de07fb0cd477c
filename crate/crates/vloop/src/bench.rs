//! Throughput measurement over preloaded frames.

use std::time::{Duration, Instant};

use vloop_core::{DetectionZone, Detector, DetectorConfig, Frame, Probe, Stage};

/// Accumulates wall-clock time per stage.
#[derive(Debug, Clone, Default)]
pub struct TimingProbe {
    totals: [Duration; Stage::ALL.len()],
    /// Stages in the order they were first entered.
    pub order: Vec<Stage>,
}

impl Probe for TimingProbe {
    fn stage<T>(&mut self, stage: Stage, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.totals[stage as usize] += start.elapsed();
        if !self.order.contains(&stage) {
            self.order.push(stage);
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub frames: usize,
    pub zones: usize,
    pub records: usize,
    pub elapsed: Duration,
    /// Mean microseconds per frame spent in each stage.
    pub stage_micros: Vec<(Stage, f64)>,
    pub stage_order: Vec<Stage>,
}

impl BenchReport {
    pub fn fps(&self) -> f64 {
        self.frames as f64 / self.elapsed.as_secs_f64().max(1e-12)
    }
}

impl std::fmt::Display for BenchReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "frames: {}  zones: {}  records: {}  elapsed: {:.3} s  fps: {:.1}",
            self.frames,
            self.zones,
            self.records,
            self.elapsed.as_secs_f64(),
            self.fps()
        )?;
        for (stage, us) in &self.stage_micros {
            writeln!(f, "  {:<15} {us:>10.1} us/frame", stage.name())?;
        }
        Ok(())
    }
}

/// Runs the detector over `frames` with every stage timed.
///
/// The work is exactly that of a detection run; only file IO is excluded.
pub fn run_benchmark(
    frames: Vec<Frame>,
    zones: Vec<DetectionZone>,
    cfg: DetectorConfig,
) -> Result<BenchReport, vloop_core::Error> {
    let Some(first) = frames.first() else {
        return Err(vloop_core::Error::InvalidConfig("benchmark needs at least one frame"));
    };
    let (w, h) = first.dims();
    let zone_count = zones.len();
    let mut detector = Detector::new(cfg, zones, w, h)?;
    let mut probe = TimingProbe::default();
    let count = frames.len();
    let mut records = 0;
    let start = Instant::now();
    for frame in frames {
        records += detector.process_frame_probed(frame, &mut probe)?.len();
    }
    let elapsed = start.elapsed();
    let stage_micros = Stage::ALL
        .iter()
        .map(|&s| (s, probe.totals[s as usize].as_secs_f64() * 1e6 / count as f64))
        .collect();
    Ok(BenchReport {
        frames: count,
        zones: zone_count,
        records,
        elapsed,
        stage_micros,
        stage_order: probe.order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_frames_are_fast_and_complete() {
        let frames: Vec<Frame> = (0..60).map(|t| Frame::filled(32, 32, t, (t % 7) as u8 * 20).unwrap()).collect();
        let zone = DetectionZone::rect("z", 4, 4, 16, 16, 0.2, 32, 32).unwrap();
        let report = run_benchmark(frames, vec![zone], DetectorConfig::default()).unwrap();
        assert_eq!(report.records, 60);
        assert_eq!(report.stage_order, Stage::ALL.to_vec());
        assert!(report.fps() > 25.0);
    }
}
