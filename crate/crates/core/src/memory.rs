//! Accumulator arrays of attribute occurrences and the fuzzy vehicle /
//! background / unknown feature classification built on them.

use alloc::vec;
use alloc::vec::Vec;

use crate::attributes::{AttributeVector, MembershipTriple};
use crate::Error;

/// Number of accumulators per pixel: five attributes times three terms.
pub const TERMS_PER_PIXEL: usize = 15;

/// Membership functions of the negative, low and positive count terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountClassifierConfig {
    /// Count magnitude at which negative / positive become fully true.
    pub n_full: f64,
    /// Half width of the plateau where the count is fully low.
    pub n_zero: f64,
}

impl Default for CountClassifierConfig {
    fn default() -> Self {
        CountClassifierConfig {
            n_full: 50.0,
            n_zero: 10.0,
        }
    }
}

impl CountClassifierConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if 0.0 < self.n_zero && self.n_zero < self.n_full {
            Ok(())
        } else {
            Err(Error::InvalidConfig("count classifier needs 0 < n_zero < n_full"))
        }
    }
}

/// Degrees to which an accumulator count is negative, low or positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountMembership {
    pub neg: f64,
    pub low: f64,
    pub pos: f64,
}

#[inline]
pub fn classify_count(count: f64, cfg: &CountClassifierConfig) -> CountMembership {
    let ramp = |v: f64| {
        if v <= -cfg.n_full {
            1.0
        } else if v >= -cfg.n_zero {
            0.0
        } else {
            (-cfg.n_zero - v) / (cfg.n_full - cfg.n_zero)
        }
    };
    let neg = ramp(count);
    let pos = ramp(-count);
    CountMembership {
        neg,
        low: 1.0 - (neg + pos),
        pos,
    }
}

/// One accumulator step: `prev + 2 * mu - 1`, clamped to `[-a_max, a_max]`.
#[inline]
pub fn update_accumulator(prev: f64, mu: f64, a_max: f64) -> f64 {
    (prev + (2.0 * mu - 1.0)).clamp(-a_max, a_max)
}

/// Membership of one observed attribute value in the three feature classes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FeatureClassScores {
    /// Vehicle feature.
    pub vf: f64,
    /// Background feature.
    pub bf: f64,
    /// Unknown feature.
    pub uf: f64,
}

/// Feature class scores of all five attributes at one pixel.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PixelScores(pub [FeatureClassScores; 5]);

impl PixelScores {
    /// Sum of the vehicle-feature degrees over the five attributes.
    pub fn vf_sum(&self) -> f64 {
        self.0.iter().map(|s| s.vf).sum()
    }
}

/// Max-product inference of the feature classes for one attribute.
#[inline]
pub fn classify_feature(
    attr_triple: &MembershipTriple,
    counts: &[f64; 3],
    cfg: &CountClassifierConfig,
) -> FeatureClassScores {
    let mut out = FeatureClassScores::default();
    for (mu, &count) in attr_triple.0.iter().zip(counts) {
        let m = classify_count(count, cfg);
        out.vf = out.vf.max(m.neg * mu);
        out.bf = out.bf.max(m.pos * mu);
        out.uf = out.uf.max(m.low * mu);
    }
    out
}

/// Signed occurrence counts of every (pixel, attribute, term) of one zone.
///
/// Counts of pixel `i` live at `i * 15 .. i * 15 + 15`, attribute-major.
#[derive(Debug, Clone, PartialEq)]
pub struct AccumulatorBank {
    counts: Vec<f64>,
    a_max: f64,
}

impl AccumulatorBank {
    /// Zero-initialised bank for `pixels` pixels.
    pub fn new(pixels: usize, a_max: f64) -> Self {
        AccumulatorBank {
            counts: vec![0.0; pixels * TERMS_PER_PIXEL],
            a_max,
        }
    }

    pub fn pixels(&self) -> usize {
        self.counts.len() / TERMS_PER_PIXEL
    }

    pub fn a_max(&self) -> f64 {
        self.a_max
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn counts_mut(&mut self) -> &mut [f64] {
        &mut self.counts
    }

    /// The three term counts of one attribute of one pixel.
    #[inline]
    pub fn term_counts(&self, pixel: usize, attribute: usize) -> [f64; 3] {
        let base = pixel * TERMS_PER_PIXEL + attribute * 3;
        [self.counts[base], self.counts[base + 1], self.counts[base + 2]]
    }

    /// Applies one frame of evidence.
    ///
    /// When `zone_occupied` is set, accumulators whose count is currently
    /// mostly low (`mu_low > 0.5`) are left untouched so that a vehicle
    /// standing in the zone is not learned as background.
    pub fn update(
        &mut self,
        attrs: &[AttributeVector],
        zone_occupied: bool,
        cfg: &CountClassifierConfig,
    ) -> Result<(), Error> {
        if attrs.len() != self.pixels() {
            return Err(Error::GridMismatch {
                expected: self.pixels(),
                actual: attrs.len(),
            });
        }
        let a_max = self.a_max;
        for (counts, vector) in self.counts.chunks_exact_mut(TERMS_PER_PIXEL).zip(attrs) {
            let memberships = vector.0.iter().flat_map(|t| t.0.iter());
            for (count, &mu) in counts.iter_mut().zip(memberships) {
                if zone_occupied && classify_count(*count, cfg).low > 0.5 {
                    continue;
                }
                *count = update_accumulator(*count, mu, a_max);
            }
        }
        Ok(())
    }

    /// Feature class scores of every pixel against the current counts.
    pub fn classify(
        &self,
        attrs: &[AttributeVector],
        cfg: &CountClassifierConfig,
        out: &mut Vec<PixelScores>,
    ) -> Result<(), Error> {
        if attrs.len() != self.pixels() {
            return Err(Error::GridMismatch {
                expected: self.pixels(),
                actual: attrs.len(),
            });
        }
        out.clear();
        out.extend(attrs.iter().enumerate().map(|(pixel, vector)| {
            let mut scores = PixelScores::default();
            for (a, triple) in vector.0.iter().enumerate() {
                scores.0[a] = classify_feature(triple, &self.term_counts(pixel, a), cfg);
            }
            scores
        }));
        Ok(())
    }
}
