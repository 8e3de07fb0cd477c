//! Fuzzy colour and contrast attributes of local image regions.

use crate::frame::{ColorCalibration, MeanImage};
use crate::Error;

/// Membership degrees of one attribute over its three linguistic terms.
///
/// Term order is black, grey, white for colour and darker, similar, brighter
/// for the contrast attributes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MembershipTriple(pub [f64; 3]);

impl MembershipTriple {
    pub const fn new(m1: f64, m2: f64, m3: f64) -> Self {
        MembershipTriple([m1, m2, m3])
    }

    #[inline]
    pub fn get(&self, term: usize) -> f64 {
        self.0[term]
    }

    pub fn sum(&self) -> f64 {
        self.0[0] + self.0[1] + self.0[2]
    }

    pub fn max_component(&self) -> f64 {
        self.0[0].max(self.0[1]).max(self.0[2])
    }
}

/// The five attributes evaluated at every pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Attribute {
    Color,
    UpperRight,
    UpperLeft,
    LowerLeft,
    LowerRight,
}

impl Attribute {
    pub const ALL: [Attribute; 5] = [
        Attribute::Color,
        Attribute::UpperRight,
        Attribute::UpperLeft,
        Attribute::LowerLeft,
        Attribute::LowerRight,
    ];

    pub const fn index(self) -> usize {
        self as usize
    }

    /// Offset of the 3x3 region compared against the centre region, with `y`
    /// growing downwards. `None` for colour.
    pub const fn offset(self) -> Option<(isize, isize)> {
        match self {
            Attribute::Color => None,
            Attribute::UpperRight => Some((2, -2)),
            Attribute::UpperLeft => Some((-2, -2)),
            Attribute::LowerLeft => Some((-2, 2)),
            Attribute::LowerRight => Some((2, 2)),
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            Attribute::Color => "C",
            Attribute::UpperRight => "UR",
            Attribute::UpperLeft => "UL",
            Attribute::LowerLeft => "LL",
            Attribute::LowerRight => "LR",
        }
    }
}

/// All five membership triples of a pixel, indexed by [`Attribute::index`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AttributeVector(pub [MembershipTriple; 5]);

impl AttributeVector {
    #[inline]
    pub fn get(&self, attribute: Attribute) -> &MembershipTriple {
        &self.0[attribute.index()]
    }

    pub fn c(&self) -> &MembershipTriple {
        &self.0[0]
    }

    pub fn ur(&self) -> &MembershipTriple {
        &self.0[1]
    }

    pub fn ul(&self) -> &MembershipTriple {
        &self.0[2]
    }

    pub fn ll(&self) -> &MembershipTriple {
        &self.0[3]
    }

    pub fn lr(&self) -> &MembershipTriple {
        &self.0[4]
    }
}

/// Offsets that place the contrast breakpoints around the reference region's
/// mean: `ref - outer`, `ref - inner`, `ref`, `ref + inner`, `ref + outer`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContrastConfig {
    pub delta_inner: f64,
    pub delta_outer: f64,
}

impl Default for ContrastConfig {
    fn default() -> Self {
        ContrastConfig {
            delta_inner: 10.0,
            delta_outer: 30.0,
        }
    }
}

impl ContrastConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if 0.0 < self.delta_inner && self.delta_inner < self.delta_outer && self.delta_outer <= 255.0
        {
            Ok(())
        } else {
            Err(Error::InvalidConfig(
                "contrast offsets must satisfy 0 < delta_inner < delta_outer <= 255",
            ))
        }
    }
}

/// Falling ramp: 1 at or below `full`, 0 at or above `zero`.
#[inline]
fn falling(v: f64, full: f64, zero: f64) -> f64 {
    if v <= full {
        1.0
    } else if v >= zero {
        0.0
    } else {
        (zero - v) / (zero - full)
    }
}

/// Colour memberships of a mean intensity.
#[inline]
pub fn eval_color(im_value: f64, calib: &ColorCalibration) -> MembershipTriple {
    let black = falling(im_value, calib.b0, calib.b1);
    let white = falling(-im_value, -calib.w2, -calib.w1);
    MembershipTriple([black, 1.0 - (black + white), white])
}

/// Contrast memberships of a centre region against a reference region.
#[inline]
pub fn eval_contrast(im_center: f64, im_ref: f64, cfg: &ContrastConfig) -> MembershipTriple {
    let d = im_center - im_ref;
    let darker = falling(d, -cfg.delta_outer, -cfg.delta_inner);
    let brighter = falling(-d, -cfg.delta_outer, -cfg.delta_inner);
    MembershipTriple([darker, 1.0 - (darker + brighter), brighter])
}

/// Evaluates all five attributes of pixel `(x, y)`.
///
/// Reference regions that fall outside the frame are clamped to its border.
pub fn eval_attributes(
    x: usize,
    y: usize,
    mean_image: &MeanImage,
    calib: &ColorCalibration,
    cfg: &ContrastConfig,
) -> AttributeVector {
    let centre = mean_image.value(x, y);
    let mut out = AttributeVector::default();
    out.0[0] = eval_color(centre, calib);
    for attribute in &Attribute::ALL[1..] {
        let (dx, dy) = attribute.offset().unwrap_or((0, 0));
        let reference = mean_image.value_clamped(x as isize + dx, y as isize + dy);
        out.0[attribute.index()] = eval_contrast(centre, reference, cfg);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn calib() -> ColorCalibration {
        ColorCalibration::new(60.0, 90.0, 160.0, 200.0).unwrap()
    }

    #[test]
    fn color_plateaus_and_midpoint() {
        let c = calib();
        assert_eq!(eval_color(0.0, &c), MembershipTriple::new(1.0, 0.0, 0.0));
        assert_eq!(eval_color(60.0, &c), MembershipTriple::new(1.0, 0.0, 0.0));
        assert_eq!(eval_color(75.0, &c), MembershipTriple::new(0.5, 0.5, 0.0));
        assert_eq!(eval_color(90.0, &c), MembershipTriple::new(0.0, 1.0, 0.0));
        assert_eq!(eval_color(160.0, &c), MembershipTriple::new(0.0, 1.0, 0.0));
        assert_eq!(eval_color(180.0, &c), MembershipTriple::new(0.0, 0.5, 0.5));
        assert_eq!(eval_color(255.0, &c), MembershipTriple::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn contrast_examples() {
        let cfg = ContrastConfig::default();
        assert_eq!(eval_contrast(120.0, 120.0, &cfg), MembershipTriple::new(0.0, 1.0, 0.0));
        assert_eq!(eval_contrast(90.0, 120.0, &cfg), MembershipTriple::new(1.0, 0.0, 0.0));
        assert_eq!(eval_contrast(100.0, 120.0, &cfg), MembershipTriple::new(0.5, 0.5, 0.0));
        assert_eq!(eval_contrast(140.0, 120.0, &cfg), MembershipTriple::new(0.0, 0.5, 0.5));
        assert_eq!(eval_contrast(255.0, 0.0, &cfg), MembershipTriple::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn contrast_config_validation() {
        assert!(ContrastConfig::default().validate().is_ok());
        let bad = ContrastConfig {
            delta_inner: 30.0,
            delta_outer: 10.0,
        };
        assert!(bad.validate().is_err());
    }

    fn mean_from(w: usize, h: usize, f: impl Fn(usize, usize) -> f64) -> MeanImage {
        let data: Vec<f64> = (0..w * h).map(|i| f(i % w, i / w)).collect();
        MeanImage::from_values(w, h, 0, data).unwrap()
    }

    #[test]
    fn constant_image_is_grey_and_similar_everywhere() {
        let m = mean_from(9, 9, |_, _| 120.0);
        let grey = MembershipTriple::new(0.0, 1.0, 0.0);
        for (x, y) in [(4, 4), (0, 0), (8, 0), (8, 8)] {
            let v = eval_attributes(x, y, &m, &calib(), &ContrastConfig::default());
            assert!(v.0.iter().all(|t| *t == grey), "({x},{y})");
        }
    }

    #[test]
    fn vertical_step_edge() {
        // Left half 80, right half 130; pixel (4,4) sits just left of the edge
        // so its right-hand references land in the bright half.
        let m = mean_from(10, 10, |x, _| if x < 5 { 80.0 } else { 130.0 });
        let v = eval_attributes(4, 4, &m, &calib(), &ContrastConfig::default());
        let darker = MembershipTriple::new(1.0, 0.0, 0.0);
        let similar = MembershipTriple::new(0.0, 1.0, 0.0);
        assert_eq!(*v.ur(), darker);
        assert_eq!(*v.lr(), darker);
        assert_eq!(*v.ul(), similar);
        assert_eq!(*v.ll(), similar);
    }

    #[test]
    fn offsets_follow_image_rows() {
        // Only the row above-right of (4,4) by two is bright.
        let m = mean_from(9, 9, |x, y| if (x, y) == (6, 2) { 200.0 } else { 100.0 });
        let v = eval_attributes(4, 4, &m, &calib(), &ContrastConfig::default());
        assert_eq!(*v.ur(), MembershipTriple::new(1.0, 0.0, 0.0));
        assert_eq!(*v.lr(), MembershipTriple::new(0.0, 1.0, 0.0));
    }
}
