//! Detection runs: frames in, occupancy CSV out.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;
use vloop_core::{DetectorConfig, Detector, NoProbe, OccupancyRecord};

use crate::csv::RecordWriter;
use crate::input::{InputError, InputSpec};
use crate::overlay::write_overlay;
use crate::snapshot::write_bank_snapshot;
use crate::zones::{parse_zone_text, ZoneConfigError};

/// Environment variable capping worker threads; 0 or unset means automatic.
pub const THREADS_ENV: &str = "VLOOP_THREADS";

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: InputSpec,
    pub zones: PathBuf,
    pub out: PathBuf,
    pub detector: DetectorConfig,
    pub overlay_dir: Option<PathBuf>,
    /// Directory for accumulator dumps written after the last frame.
    pub bank_dump_dir: Option<PathBuf>,
    /// Worker thread cap; `None` reads [`THREADS_ENV`].
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn new(input: InputSpec, zones: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        RunConfig {
            input,
            zones: zones.into(),
            out: out.into(),
            detector: DetectorConfig::default(),
            overlay_dir: None,
            bank_dump_dir: None,
            threads: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration: {0}")]
    Config(#[from] vloop_core::Error),
    #[error("zone file {path}: {source}")]
    Zones {
        path: String,
        #[source]
        source: ZoneConfigError,
    },
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("frame {frame}: {source}")]
    Frame {
        frame: u64,
        #[source]
        source: vloop_core::Error,
    },
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("thread pool: {0}")]
    Pool(String),
}

impl RunError {
    /// Index of the frame that failed, if the failure is tied to one.
    pub fn frame_index(&self) -> Option<u64> {
        match self {
            RunError::Input(e) => e.frame_index(),
            RunError::Frame { frame, .. } => Some(*frame),
            _ => None,
        }
    }
}

fn io_error(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> RunError {
    let context = context.into();
    move |source| RunError::Io { context, source }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSummary {
    pub frames: u64,
    pub zones: usize,
    pub records: u64,
}

/// Thread count from the environment: `Some(n)` for a cap, `None` for auto.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

fn partial_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".partial");
    out.with_file_name(name)
}

/// Runs the detector over the whole input and writes the CSV.
///
/// The CSV is written to a temporary file next to `out` and moved into place
/// only when every frame has been processed, so a failed run leaves no
/// output behind.
pub fn run_detection(cfg: &RunConfig) -> Result<RunSummary, RunError> {
    cfg.detector.validate()?;
    let zone_text = fs::read_to_string(&cfg.zones).map_err(|source| RunError::Zones {
        path: cfg.zones.display().to_string(),
        source: ZoneConfigError::Io {
            path: cfg.zones.display().to_string(),
            source,
        },
    })?;

    let mut frames = cfg.input.open()?.peekable();
    let (width, height) = match frames.peek() {
        Some(Ok(f)) => f.dims(),
        Some(Err(_)) => match frames.next() {
            Some(Err(e)) => return Err(e.into()),
            _ => unreachable!("peeked an error"),
        },
        None => return Err(InputError::Empty(cfg.input.name()).into()),
    };
    let zones = parse_zone_text(&zone_text, width, height).map_err(|source| RunError::Zones {
        path: cfg.zones.display().to_string(),
        source,
    })?;
    let zone_count = zones.len();
    let mut detector = Detector::new(cfg.detector, zones, width, height)?;

    for dir in [&cfg.overlay_dir, &cfg.bank_dump_dir].into_iter().flatten() {
        fs::create_dir_all(dir).map_err(io_error(format!("cannot create {}", dir.display())))?;
    }

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.threads.filter(|&n| n > 0).or_else(threads_from_env) {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| RunError::Pool(e.to_string()))?;

    let partial = partial_path(&cfg.out);
    let file = File::create(&partial).map_err(io_error(format!("cannot create {}", partial.display())))?;
    let result = pool.install(|| {
        let mut writer = RecordWriter::new(BufWriter::new(file))
            .map_err(io_error(format!("cannot write {}", partial.display())))?;
        let mut summary = RunSummary {
            frames: 0,
            zones: zone_count,
            records: 0,
        };
        for frame in frames {
            let frame = frame?;
            let t = detector.frames_processed();
            let records = detector
                .process_frame_with(frame, |trackers, ctx| {
                    if trackers.len() > 1 {
                        trackers.par_iter_mut().map(|z| z.step(ctx, &mut NoProbe)).collect()
                    } else {
                        trackers.iter_mut().map(|z| z.step(ctx, &mut NoProbe)).collect()
                    }
                })
                .map_err(|source| RunError::Frame { frame: t, source })?;
            write_records(&mut writer, &records, &partial)?;
            if let (Some(dir), Some(last)) = (&cfg.overlay_dir, detector.last_frame()) {
                write_overlay(dir, t, last, detector.trackers())
                    .map_err(io_error(format!("cannot write overlay to {}", dir.display())))?;
            }
            summary.frames += 1;
            summary.records += records.len() as u64;
        }
        writer
            .finish()
            .map_err(io_error(format!("cannot write {}", partial.display())))?;
        if let Some(dir) = &cfg.bank_dump_dir {
            for tracker in detector.trackers() {
                let path = dir.join(format!("bank_{}.vlac", sanitize(tracker.zone().id())));
                let mut out = BufWriter::new(File::create(&path).map_err(io_error(format!("cannot create {}", path.display())))?);
                write_bank_snapshot(&mut out, tracker).map_err(io_error(format!("cannot write {}", path.display())))?;
            }
        }
        Ok(summary)
    });

    match result {
        Ok(summary) => {
            fs::rename(&partial, &cfg.out).map_err(io_error(format!("cannot create {}", cfg.out.display())))?;
            Ok(summary)
        }
        Err(e) => {
            let _ = fs::remove_file(&partial);
            Err(e)
        }
    }
}

fn write_records<W: std::io::Write>(
    writer: &mut RecordWriter<W>,
    records: &[OccupancyRecord],
    path: &Path,
) -> Result<(), RunError> {
    for r in records {
        writer
            .write(r)
            .map_err(io_error(format!("cannot write {}", path.display())))?;
    }
    Ok(())
}

fn sanitize(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}
