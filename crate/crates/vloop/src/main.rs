use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use vloop::input::{parse_size, InputSpec};
use vloop::synth::{generate_sequence, presets, read_spec, write_sequence};
use vloop::zones::{read_zone_entries, ZoneEntry};
use vloop::{run_benchmark, run_detection, RunConfig};
use vloop_core::DetectorConfig;

#[derive(Parser)]
#[command(name = "vloop", version, about = "Vehicle presence detection in fixed camera video")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect vehicles in a frame sequence and write per-zone occupancy CSV.
    Detect {
        /// Numbered PGM pattern (frame_%06d.pgm), PGM directory, or raw:<path>:<W>x<H>.
        #[arg(long)]
        input: String,
        /// Zone file (JSON).
        #[arg(long)]
        zones: PathBuf,
        /// Output CSV.
        #[arg(long)]
        out: PathBuf,
        /// Frames between colour recalibrations.
        #[arg(long, default_value_t = 25)]
        calib_interval: u64,
        /// Write an overlay PGM per frame into this directory.
        #[arg(long)]
        overlay_dir: Option<PathBuf>,
        /// Also learn accumulators for every pixel of the frame.
        #[arg(long)]
        full_frame: bool,
        /// Dump accumulator banks into this directory after the last frame.
        #[arg(long)]
        dump_banks: Option<PathBuf>,
    },
    /// Render a synthetic scenario to PGM frames plus truth.csv and zones.json.
    Synth {
        /// Scenario file (JSON), or preset:eight, preset:daylight, preset:degraded.
        #[arg(long)]
        spec: String,
        #[arg(long)]
        out_dir: PathBuf,
        /// Seed for presets.
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Measure throughput on preloaded synthetic frames.
    Bench {
        #[arg(long, default_value_t = 500)]
        frames: u64,
        /// Frame size, WxH.
        #[arg(long, default_value = "768x512")]
        size: String,
        /// Zone file (JSON).
        #[arg(long)]
        zones: PathBuf,
        #[arg(long)]
        full_frame: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn detect(cfg: RunConfig) -> Result<()> {
    let summary = run_detection(&cfg).map_err(|e| match e.frame_index() {
        Some(i) => anyhow!("{e} (failing frame index {i})"),
        None => anyhow!(e),
    })?;
    eprintln!(
        "{} frames, {} zones, {} records -> {}",
        summary.frames,
        summary.zones,
        summary.records,
        cfg.out.display()
    );
    Ok(())
}

fn synth(spec: &str, out_dir: &Path, seed: u64) -> Result<()> {
    let scenario = match spec {
        "preset:eight" => presets::eight_vehicles(seed),
        "preset:daylight" => presets::daylight(seed, 1500),
        "preset:degraded" => presets::degraded(seed, 1500),
        path => read_spec(path.as_ref()).with_context(|| format!("cannot load scenario {path}"))?,
    };
    let truth = write_sequence(&scenario, out_dir)?;
    eprintln!("{} frames written to {}", truth.frames(), out_dir.display());
    Ok(())
}

fn bench(frames: u64, size: &str, zones: &Path, full_frame: bool, seed: u64) -> Result<()> {
    let (width, height) = parse_size(size).ok_or_else(|| anyhow!("size must look like 768x512"))?;
    let entries: Vec<ZoneEntry> = read_zone_entries(zones)?;
    let scenario = presets::through_zones(width, height, frames, &entries, seed);
    let zones = scenario.build_zones()?;
    let (frames, _) = generate_sequence(&scenario)?;
    let cfg = DetectorConfig {
        full_frame,
        ..DetectorConfig::default()
    };
    let report = run_benchmark(frames, zones, cfg)?;
    print!("{report}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Detect {
            input,
            zones,
            out,
            calib_interval,
            overlay_dir,
            full_frame,
            dump_banks,
        } => InputSpec::parse(&input).map_err(anyhow::Error::from).and_then(|input| {
            let mut cfg = RunConfig::new(input, zones, out);
            cfg.detector.calibration_interval = calib_interval;
            cfg.detector.full_frame = full_frame;
            cfg.overlay_dir = overlay_dir;
            cfg.bank_dump_dir = dump_banks;
            detect(cfg)
        }),
        Command::Synth { spec, out_dir, seed } => synth(&spec, &out_dir, seed),
        Command::Bench {
            frames,
            size,
            zones,
            full_frame,
            seed,
        } => bench(frames, &size, &zones, full_frame, seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
