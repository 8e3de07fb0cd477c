//! Virtual loop detector tooling around `vloop_core`: PGM and raw frame
//! input, zone files, CSV output, debug overlays, synthetic scenes, a
//! straight-line reference implementation and benchmarking.

pub mod bench;
pub mod csv;
pub mod eval;
pub mod input;
pub mod overlay;
pub mod pgm;
pub mod reference;
pub mod run;
pub mod snapshot;
pub mod synth;
pub mod zones;

pub use bench::{run_benchmark, BenchReport};
pub use reference::{naive_reference, ReferenceRecord};
pub use run::{run_detection, RunConfig, RunError, RunSummary};
