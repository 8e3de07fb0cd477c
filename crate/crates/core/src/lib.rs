//! Vehicle presence detection for fixed traffic cameras.
//!
//! Each frame is reduced to a 3x3 mean image, local regions around the pixels
//! of every detection zone are described by five fuzzy attributes (one colour,
//! four corner contrasts), and per-pixel accumulators remember how often each
//! linguistic term has been observed. Rarely seen attribute values are vehicle
//! features; their mass inside a zone is thresholded with adaptive hysteresis
//! to give a binary occupancy per zone and frame.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line tool and the synthetic scene generator live in the `vloop` crate.

#![no_std]

extern crate alloc;

mod error;

pub mod attributes;
pub mod frame;
pub mod memory;
pub mod pipeline;
pub mod raster;
pub mod zone;

pub use attributes::{
    eval_attributes, eval_color, eval_contrast, Attribute, AttributeVector, ContrastConfig,
    MembershipTriple,
};
pub use error::Error;
pub use frame::{calibrate_color, compute_mean_image, ColorCalibration, Frame, MeanImage};
pub use memory::{
    classify_count, classify_feature, update_accumulator, AccumulatorBank, CountClassifierConfig,
    CountMembership, FeatureClassScores, PixelScores,
};
pub use pipeline::{
    Detector, DetectorConfig, FrameContext, NoProbe, OccupancyRecord, Probe, Stage, ZoneTracker,
};
pub use zone::{
    compute_thresholds, detect_movement, update_occupancy, update_range, zone_feature_sum,
    DetectionZone, MovementConfig, ThresholdConfig, ZoneState,
};
