//! Deterministic synthetic traffic scenes with geometric ground truth.
//!
//! The camera looks straight down on a road; vehicles are textured rectangles
//! that travel down the image (increasing `y`) at constant speed, optionally
//! halting for a while. Randomness comes from `Xoshiro256PlusPlus` seeded
//! through SplitMix64 (`seed_from_u64`), so a spec and seed always produce the
//! same frames.

use std::fs;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Normal};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use vloop_core::{DetectionZone, Frame};

use crate::pgm::write_pgm;
use crate::zones::{zone_file_text, ZoneEntry};

/// Fraction of a zone a vehicle must cover for the zone to count as occupied.
pub const TRUTH_OVERLAP: f64 = 0.3;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("vehicle {0}: {1}")]
    Vehicle(usize, &'static str),
    #[error("vehicle events must be sorted by entry frame")]
    Unsorted,
    #[error("invalid scenario: {0}")]
    Spec(String),
    #[error(transparent)]
    Core(#[from] vloop_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RoadSpec {
    pub intensity: f64,
    /// Amplitude of the static pavement texture.
    pub texture_amplitude: f64,
    /// Left edges of dashed lane markings.
    pub markings: Vec<f64>,
    pub marking_intensity: f64,
}

impl Default for RoadSpec {
    fn default() -> Self {
        RoadSpec {
            intensity: 110.0,
            texture_amplitude: 12.0,
            markings: Vec::new(),
            marking_intensity: 190.0,
        }
    }
}

/// A vehicle halting with its rear edge at `at_y` for `frames` frames.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stop {
    pub at_y: f64,
    pub frames: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleEvent {
    /// Frame at which the front edge enters at the top of the image.
    pub entry_frame: u64,
    /// Left edge of the vehicle.
    pub x: f64,
    /// Pixels per frame, downwards.
    pub speed: f64,
    pub width: f64,
    pub length: f64,
    pub body_intensity: f64,
    #[serde(default)]
    pub underside: bool,
    #[serde(default)]
    pub headlights: bool,
    #[serde(default)]
    pub stop: Option<Stop>,
}

impl VehicleEvent {
    /// Rear (top) edge at frame `t`, or `None` before entry.
    pub fn top(&self, t: u64) -> Option<f64> {
        if t < self.entry_frame {
            return None;
        }
        let dt = (t - self.entry_frame) as f64;
        let travel = self.speed * dt;
        let Some(stop) = self.stop else {
            return Some(travel - self.length);
        };
        let reach = stop.at_y + self.length;
        if travel < reach {
            Some(travel - self.length)
        } else if dt < reach / self.speed + stop.frames as f64 {
            Some(stop.at_y)
        } else {
            Some(self.speed * (dt - stop.frames as f64) - self.length)
        }
    }

    /// First frame at which the vehicle has left an image of `height` rows.
    pub fn exit_frame(&self, height: usize) -> u64 {
        let dist = height as f64 + self.length;
        let hold = self.stop.map_or(0, |s| s.frames);
        self.entry_frame + (dist / self.speed).ceil() as u64 + hold + 1
    }

    /// Whether the centre of pixel `(x, y)` is covered at rear edge `top`.
    #[inline]
    fn covers(&self, top: f64, x: usize, y: usize) -> bool {
        let (cx, cy) = (x as f64 + 0.5, y as f64 + 0.5);
        cx >= self.x && cx < self.x + self.width && cy >= top && cy < top + self.length
    }
}

/// A bright patch added on top of the scene for a while.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReflectionEvent {
    pub start_frame: u64,
    pub frames: u64,
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
    /// Intensity added at the centre of the patch.
    pub intensity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub width: usize,
    pub height: usize,
    pub frames: u64,
    pub seed: u64,
    #[serde(default)]
    pub road: RoadSpec,
    #[serde(default)]
    pub vehicles: Vec<VehicleEvent>,
    #[serde(default)]
    pub noise_sigma: f64,
    /// Global intensity change per frame.
    #[serde(default)]
    pub illumination_drift: f64,
    #[serde(default)]
    pub reflections: Vec<ReflectionEvent>,
    /// Maximum global translation of the camera per frame, in pixels.
    #[serde(default)]
    pub jitter: u32,
    #[serde(default)]
    pub zones: Vec<ZoneEntry>,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.width < 7 || self.height < 7 {
            return Err(SynthError::Spec("frames must be at least 7x7".into()));
        }
        if !(self.noise_sigma >= 0.0) {
            return Err(SynthError::Spec("noise sigma must be non-negative".into()));
        }
        if self
            .vehicles
            .windows(2)
            .any(|w| w[0].entry_frame > w[1].entry_frame)
        {
            return Err(SynthError::Unsorted);
        }
        for (i, v) in self.vehicles.iter().enumerate() {
            if !(v.speed > 0.0) {
                return Err(SynthError::Vehicle(i, "speed must be positive"));
            }
            if !(v.width > 0.0 && v.length > 0.0) {
                return Err(SynthError::Vehicle(i, "size must be positive"));
            }
            if v.entry_frame >= self.frames
                || v.x + v.width <= 0.0
                || v.x >= self.width as f64
            {
                return Err(SynthError::Vehicle(i, "never intersects the frame"));
            }
        }
        Ok(())
    }

    pub fn build_zones(&self) -> Result<Vec<DetectionZone>, SynthError> {
        self.zones
            .iter()
            .map(|z| z.build(self.width, self.height).map_err(SynthError::from))
            .collect()
    }
}

/// Per-frame, per-zone truth occupancy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    pub zone_ids: Vec<String>,
    /// `occupied[frame][zone]`.
    pub occupied: Vec<Vec<bool>>,
}

impl GroundTruth {
    pub fn frames(&self) -> usize {
        self.occupied.len()
    }

    /// Truth series of one zone.
    pub fn zone_series(&self, zone: usize) -> Vec<bool> {
        self.occupied.iter().map(|f| f[zone]).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("frame,zone_id,truth\n");
        for (t, row) in self.occupied.iter().enumerate() {
            for (id, &occ) in self.zone_ids.iter().zip(row) {
                out.push_str(&format!("{t},{id},{}\n", occ as u8));
            }
        }
        out
    }
}

/// Truth occupancy computed from vehicle geometry alone.
pub fn ground_truth(spec: &ScenarioSpec) -> Result<GroundTruth, SynthError> {
    spec.validate()?;
    let zones = spec.build_zones()?;
    let mut occupied = Vec::with_capacity(spec.frames as usize);
    for t in 0..spec.frames {
        let tops: Vec<(&VehicleEvent, f64)> = spec
            .vehicles
            .iter()
            .filter_map(|v| v.top(t).map(|top| (v, top)))
            .filter(|(v, top)| *top < spec.height as f64 && top + v.length > 0.0)
            .collect();
        let row = zones
            .iter()
            .map(|zone| {
                let covered = zone
                    .pixels()
                    .iter()
                    .filter(|&&(x, y)| {
                        tops.iter()
                            .any(|(v, top)| v.covers(*top, x as usize, y as usize))
                    })
                    .count();
                covered as f64 >= TRUTH_OVERLAP * zone.pixels().len() as f64
            })
            .collect();
        occupied.push(row);
    }
    Ok(GroundTruth {
        zone_ids: spec.zones.iter().map(|z| z.id.clone()).collect(),
        occupied,
    })
}

/// Static pieces of the scene, drawn once.
struct Backdrop {
    road: Vec<f32>,
    vehicle_textures: Vec<Vec<f32>>,
}

fn value_noise(rng: &mut Xoshiro256PlusPlus, width: usize, height: usize, cell: usize) -> Vec<f32> {
    let gw = width / cell + 2;
    let gh = height / cell + 2;
    let grid: Vec<f32> = (0..gw * gh).map(|_| rng.random_range(-1.0f32..1.0)).collect();
    let mut out = vec![0.0; width * height];
    for y in 0..height {
        let (gy, fy) = (y / cell, (y % cell) as f32 / cell as f32);
        for x in 0..width {
            let (gx, fx) = (x / cell, (x % cell) as f32 / cell as f32);
            let g = |i: usize, j: usize| grid[j * gw + i];
            let top = g(gx, gy) * (1.0 - fx) + g(gx + 1, gy) * fx;
            let bottom = g(gx, gy + 1) * (1.0 - fx) + g(gx + 1, gy + 1) * fx;
            out[y * width + x] = top * (1.0 - fy) + bottom * fy;
        }
    }
    out
}

impl Backdrop {
    fn new(spec: &ScenarioSpec) -> Self {
        // Textures use their own stream so noise draws do not shift them.
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(spec.seed ^ 0x5eed_7e47_u64);
        let (w, h) = (spec.width, spec.height);
        let coarse = value_noise(&mut rng, w, h, 8);
        let mut road = vec![0.0f32; w * h];
        let amp = spec.road.texture_amplitude as f32;
        for (i, px) in road.iter_mut().enumerate() {
            let fine: f32 = rng.random_range(-1.0..1.0);
            *px = spec.road.intensity as f32 + amp * (0.7 * coarse[i] + 0.3 * fine);
        }
        for &mx in &spec.road.markings {
            for y in 0..h {
                if (y / 24) % 2 == 1 {
                    continue;
                }
                for x in 0..w {
                    let cx = x as f64 + 0.5;
                    if cx >= mx && cx < mx + 4.0 {
                        road[y * w + x] = spec.road.marking_intensity as f32;
                    }
                }
            }
        }
        let vehicle_textures = spec
            .vehicles
            .iter()
            .map(|v| vehicle_texture(&mut rng, v))
            .collect();
        Backdrop {
            road,
            vehicle_textures,
        }
    }
}

/// Appearance of a vehicle in its own pixel grid, rear row first.
fn vehicle_texture(rng: &mut Xoshiro256PlusPlus, v: &VehicleEvent) -> Vec<f32> {
    let w = v.width.ceil().max(1.0) as usize;
    let l = v.length.ceil().max(1.0) as usize;
    let body = v.body_intensity as f32;
    let glass = (body * 0.35).min(body - 40.0).max(8.0);
    let mut tex = vec![0.0f32; w * l];
    for r in 0..l {
        // Fraction of the length measured from the front (bottom) edge.
        let front = 1.0 - (r as f32 + 0.5) / l as f32;
        for c in 0..w {
            let across = (c as f32 + 0.5) / w as f32;
            let mut val = match front {
                f if f < 0.25 => body,
                f if f < 0.40 => glass,
                f if f < 0.75 => body + 12.0,
                f if f < 0.85 => glass + 10.0,
                _ => body - 8.0,
            };
            if !(0.1..0.9).contains(&across) {
                val -= 18.0;
            }
            if v.underside && (front < 0.05 || !(0.04..0.96).contains(&across)) {
                val = 22.0;
            }
            if v.headlights && front < 0.08 {
                let d = (across - 0.2).abs().min((across - 0.8).abs());
                if d < 0.1 {
                    val = 250.0;
                }
            }
            val += rng.random_range(-6.0f32..6.0);
            tex[r * w + c] = val;
        }
    }
    tex
}

/// Renders all frames and computes the ground truth.
pub fn generate_sequence(spec: &ScenarioSpec) -> Result<(Vec<Frame>, GroundTruth), SynthError> {
    let truth = ground_truth(spec)?;
    let mut frames = Vec::with_capacity(spec.frames as usize);
    let mut renderer = Renderer::new(spec)?;
    while let Some(frame) = renderer.next_frame()? {
        frames.push(frame);
    }
    Ok((frames, truth))
}

/// Frame-by-frame renderer; lets long sequences be written without holding
/// every frame in memory.
pub struct Renderer<'a> {
    spec: &'a ScenarioSpec,
    backdrop: Backdrop,
    rng: Xoshiro256PlusPlus,
    noise: Option<Normal<f32>>,
    clean: Vec<f32>,
    t: u64,
}

impl<'a> Renderer<'a> {
    pub fn new(spec: &'a ScenarioSpec) -> Result<Self, SynthError> {
        spec.validate()?;
        let noise = if spec.noise_sigma > 0.0 {
            Some(Normal::new(0.0, spec.noise_sigma as f32).map_err(|e| SynthError::Spec(e.to_string()))?)
        } else {
            None
        };
        Ok(Renderer {
            backdrop: Backdrop::new(spec),
            rng: Xoshiro256PlusPlus::seed_from_u64(spec.seed),
            noise,
            clean: vec![0.0; spec.width * spec.height],
            spec,
            t: 0,
        })
    }

    pub fn next_frame(&mut self) -> Result<Option<Frame>, SynthError> {
        let spec = self.spec;
        if self.t >= spec.frames {
            return Ok(None);
        }
        let t = self.t;
        let (w, h) = (spec.width, spec.height);
        self.clean.copy_from_slice(&self.backdrop.road);

        for (v, tex) in spec.vehicles.iter().zip(&self.backdrop.vehicle_textures) {
            let Some(top) = v.top(t) else { continue };
            if top >= h as f64 || top + v.length <= 0.0 {
                continue;
            }
            let tw = v.width.ceil().max(1.0) as usize;
            let y0 = (top - 0.5).ceil().max(0.0) as usize;
            let y1 = ((top + v.length - 0.5).ceil().max(0.0) as usize).min(h);
            let x0 = (v.x - 0.5).ceil().max(0.0) as usize;
            let x1 = ((v.x + v.width - 0.5).ceil().max(0.0) as usize).min(w);
            for y in y0..y1 {
                for x in x0..x1 {
                    if !v.covers(top, x, y) {
                        continue;
                    }
                    let r = ((y as f64 + 0.5 - top) as usize).min(tex.len() / tw - 1);
                    let c = ((x as f64 + 0.5 - v.x) as usize).min(tw - 1);
                    self.clean[y * w + x] = tex[r * tw + c];
                }
            }
        }

        for r in &spec.reflections {
            if t < r.start_frame || t >= r.start_frame + r.frames {
                continue;
            }
            let (cx, cy) = (r.x + r.width / 2.0, r.y + r.height / 2.0);
            let y0 = r.y.max(0.0) as usize;
            let y1 = ((r.y + r.height).max(0.0) as usize).min(h);
            let x0 = r.x.max(0.0) as usize;
            let x1 = ((r.x + r.width).max(0.0) as usize).min(w);
            for y in y0..y1 {
                for x in x0..x1 {
                    let dx = (x as f64 + 0.5 - cx) / (r.width / 2.0);
                    let dy = (y as f64 + 0.5 - cy) / (r.height / 2.0);
                    let falloff = (1.0 - (dx * dx + dy * dy)).max(0.0);
                    self.clean[y * w + x] += (r.intensity * falloff) as f32;
                }
            }
        }

        let (jx, jy) = if spec.jitter > 0 {
            let j = spec.jitter as i64;
            (self.rng.random_range(-j..=j), self.rng.random_range(-j..=j))
        } else {
            (0, 0)
        };
        let drift = (spec.illumination_drift * t as f64) as f32;
        let mut data = Vec::with_capacity(w * h);
        for y in 0..h {
            let sy = (y as i64 + jy).clamp(0, h as i64 - 1) as usize;
            for x in 0..w {
                let sx = (x as i64 + jx).clamp(0, w as i64 - 1) as usize;
                let mut v = self.clean[sy * w + sx] + drift;
                if let Some(n) = &self.noise {
                    v += n.sample(&mut self.rng);
                }
                data.push(v.round().clamp(0.0, 255.0) as u8);
            }
        }
        self.t += 1;
        Ok(Some(Frame::new(w, h, t, data)?))
    }
}

/// Writes `frame_%06d.pgm` files, `truth.csv` and `zones.json` into `dir`.
pub fn write_sequence(spec: &ScenarioSpec, dir: &Path) -> Result<GroundTruth, SynthError> {
    let truth = ground_truth(spec)?;
    fs::create_dir_all(dir)?;
    let mut renderer = Renderer::new(spec)?;
    while let Some(frame) = renderer.next_frame()? {
        let path = dir.join(format!("frame_{:06}.pgm", frame.t()));
        write_pgm(&path, frame.width(), frame.height(), frame.data())?;
    }
    fs::write(dir.join("truth.csv"), truth.to_csv())?;
    if !spec.zones.is_empty() {
        let mut f = fs::File::create(dir.join("zones.json"))?;
        f.write_all(zone_file_text(&spec.zones).as_bytes())?;
    }
    Ok(truth)
}

pub fn read_spec(path: &Path) -> Result<ScenarioSpec, SynthError> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Ready-made scenarios.
pub mod presets {
    use super::*;

    pub const SCENE_WIDTH: usize = 192;
    pub const SCENE_HEIGHT: usize = 320;
    /// Left edges of the two lanes.
    pub const LANES: [f64; 2] = [16.0, 100.0];
    pub const LANE_WIDTH: f64 = 76.0;

    fn road() -> RoadSpec {
        RoadSpec {
            intensity: 110.0,
            texture_amplitude: 14.0,
            markings: vec![94.0],
            marking_intensity: 190.0,
        }
    }

    fn lane_zone(id: &str, lane: usize) -> ZoneEntry {
        ZoneEntry::rect(id, LANES[lane] as i32 + 6, 128, 64, 64, 0.2)
    }

    fn base(frames: u64, seed: u64) -> ScenarioSpec {
        ScenarioSpec {
            width: SCENE_WIDTH,
            height: SCENE_HEIGHT,
            frames,
            seed,
            road: road(),
            vehicles: Vec::new(),
            noise_sigma: 0.0,
            illumination_drift: 0.0,
            reflections: Vec::new(),
            jitter: 0,
            zones: Vec::new(),
        }
    }

    fn random_vehicle(rng: &mut Xoshiro256PlusPlus, entry_frame: u64, lane: usize) -> VehicleEvent {
        let width = rng.random_range(46.0..60.0f64).round();
        let body: f64 = match rng.random_range(0..4) {
            0 => rng.random_range(35.0..60.0),
            1 => rng.random_range(170.0..215.0),
            2 => rng.random_range(125.0..150.0),
            _ => rng.random_range(70.0..90.0),
        };
        VehicleEvent {
            entry_frame,
            x: (LANES[lane] + (LANE_WIDTH - width) / 2.0 + rng.random_range(-3.0..3.0f64)).round(),
            speed: rng.random_range(3.0..8.0f64),
            width,
            length: rng.random_range(80.0..125.0f64).round(),
            body_intensity: body.round(),
            underside: rng.random_bool(0.5),
            headlights: rng.random_bool(0.3),
            stop: None,
        }
    }

    /// Traffic in both lanes: each vehicle enters after its predecessor in
    /// the same lane has left the image, plus a random headway.
    fn traffic(spec: &mut ScenarioSpec, rng: &mut Xoshiro256PlusPlus, first: u64, stop_chance: f64) {
        let mut events = Vec::new();
        for lane in 0..2 {
            let mut entry = first + rng.random_range(0..40);
            loop {
                let mut v = random_vehicle(rng, entry, lane);
                if rng.random_bool(stop_chance) {
                    v.stop = Some(Stop {
                        at_y: rng.random_range(100.0..140.0f64).round(),
                        frames: rng.random_range(60..200),
                    });
                }
                let exit = v.exit_frame(spec.height);
                if exit + 10 >= spec.frames {
                    break;
                }
                events.push(v);
                entry = exit + rng.random_range(5..70);
            }
        }
        events.sort_by_key(|v| v.entry_frame);
        spec.vehicles = events;
        spec.zones = vec![lane_zone("lane1", 0), lane_zone("lane2", 1)];
    }

    /// 1150 frames (46 s at 25 fps) with eight vehicles crossing one zone.
    pub fn eight_vehicles(seed: u64) -> ScenarioSpec {
        let mut spec = base(1150, seed);
        spec.noise_sigma = 2.0;
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed.wrapping_mul(31).wrapping_add(7));
        let entries = [70u64, 200, 330, 455, 590, 720, 850, 985];
        let mut vehicles: Vec<VehicleEvent> = entries
            .iter()
            .map(|&e| random_vehicle(&mut rng, e, 0))
            .collect();
        // One vehicle queues inside the zone for three seconds.
        vehicles[4].stop = Some(Stop {
            at_y: 120.0,
            frames: 75,
        });
        spec.vehicles = vehicles;
        spec.zones = vec![lane_zone("lane1", 0)];
        spec
    }

    /// Stable daylight: moderate sensor noise, no drift, no reflections.
    pub fn daylight(seed: u64, frames: u64) -> ScenarioSpec {
        let mut spec = base(frames, seed);
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed ^ 0xda71);
        spec.noise_sigma = rng.random_range(1.5..3.0);
        traffic(&mut spec, &mut rng, 80, 0.15);
        spec
    }

    /// Night-like conditions: heavy noise, drifting illumination, pavement
    /// reflections and slight camera shake.
    pub fn degraded(seed: u64, frames: u64) -> ScenarioSpec {
        let mut spec = base(frames, seed);
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed ^ 0xd14);
        spec.noise_sigma = 12.0;
        spec.illumination_drift = -0.03;
        spec.road.intensity = 120.0;
        traffic(&mut spec, &mut rng, 80, 0.15);
        for v in &mut spec.vehicles {
            v.headlights = true;
        }
        let mut start = 100;
        while start + 40 < frames {
            let lane = rng.random_range(0..2);
            spec.reflections.push(ReflectionEvent {
                start_frame: start,
                frames: rng.random_range(15..40),
                x: LANES[lane] + rng.random_range(0.0..40.0),
                y: rng.random_range(40.0..220.0),
                width: rng.random_range(12.0..30.0),
                height: rng.random_range(12.0..30.0),
                intensity: rng.random_range(30.0..70.0),
            });
            start += rng.random_range(80..200);
        }
        spec
    }

    /// Scene of arbitrary size with vehicles repeatedly driving through the
    /// given zones.
    pub fn through_zones(width: usize, height: usize, frames: u64, zones: &[ZoneEntry], seed: u64) -> ScenarioSpec {
        let mut spec = base(frames, seed);
        spec.width = width;
        spec.height = height;
        spec.noise_sigma = 2.0;
        spec.road.markings.clear();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        let mut events = Vec::new();
        for zone in zones {
            let xs = zone.polygon.iter().map(|v| v[0]);
            let (lo, hi) = (xs.clone().min().unwrap_or(0), xs.max().unwrap_or(0));
            let zone_w = (hi - lo).max(8) as f64;
            let mut entry = rng.random_range(0..30);
            while entry < frames {
                let mut v = random_vehicle(&mut rng, entry, 0);
                v.width = (zone_w * 0.8).round();
                v.x = lo as f64 + zone_w * 0.1;
                let exit = v.exit_frame(height);
                events.push(v);
                entry = exit + rng.random_range(0..30);
            }
        }
        events.sort_by_key(|v| v.entry_frame);
        spec.vehicles = events;
        spec.zones = zones.to_vec();
        spec
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn empty_spec() -> ScenarioSpec {
        ScenarioSpec {
            width: 32,
            height: 48,
            frames: 10,
            seed: 1,
            road: RoadSpec::default(),
            vehicles: vec![],
            noise_sigma: 0.0,
            illumination_drift: 0.0,
            reflections: vec![],
            jitter: 0,
            zones: vec![ZoneEntry::rect("z", 4, 8, 16, 16, 0.2)],
        }
    }

    fn car(entry: u64) -> VehicleEvent {
        VehicleEvent {
            entry_frame: entry,
            x: 2.0,
            speed: 4.0,
            width: 28.0,
            length: 20.0,
            body_intensity: 40.0,
            underside: false,
            headlights: false,
            stop: None,
        }
    }

    #[test]
    fn static_scene_is_constant() {
        let (frames, truth) = generate_sequence(&empty_spec()).unwrap();
        assert_eq!(frames.len(), 10);
        assert!(frames.windows(2).all(|w| w[0].data() == w[1].data()));
        assert!(truth.occupied.iter().all(|f| f == &[false]));
    }

    #[test]
    fn deterministic_for_a_seed() {
        let mut spec = empty_spec();
        spec.noise_sigma = 5.0;
        spec.vehicles = vec![car(2)];
        let a = generate_sequence(&spec).unwrap();
        let b = generate_sequence(&spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_events() {
        let mut spec = empty_spec();
        spec.vehicles = vec![car(5), car(2)];
        assert!(matches!(spec.validate(), Err(SynthError::Unsorted)));
        let mut off = car(0);
        off.x = 40.0;
        spec.vehicles = vec![off];
        assert!(matches!(spec.validate(), Err(SynthError::Vehicle(0, _))));
        let mut late = car(10);
        late.x = 0.0;
        spec.vehicles = vec![late];
        assert!(spec.validate().is_err());
        let mut slow = car(0);
        slow.speed = 0.0;
        spec.vehicles = vec![slow];
        assert!(spec.validate().is_err());
    }

    #[test]
    fn stop_holds_position() {
        let mut v = car(0);
        v.stop = Some(Stop { at_y: 20.0, frames: 10 });
        // Reaches at_y after (20 + 20) / 4 = 10 frames.
        assert_eq!(v.top(9), Some(16.0));
        assert_eq!(v.top(10), Some(20.0));
        assert_eq!(v.top(19), Some(20.0));
        assert_eq!(v.top(20), Some(20.0));
        assert_eq!(v.top(21), Some(24.0));
    }

    #[test]
    fn vehicle_pixels_are_rendered() {
        let mut spec = empty_spec();
        spec.road.texture_amplitude = 0.0;
        spec.vehicles = vec![car(0)];
        let (frames, _) = generate_sequence(&spec).unwrap();
        // At t = 8 the rear edge is at 12, so rows 12..32 are vehicle.
        let f = &frames[8];
        assert_eq!(f.pixel(20, 5), 110);
        assert_ne!(f.pixel(20, 20), 110);
        assert_eq!(f.pixel(31, 20), 110);
    }
}
