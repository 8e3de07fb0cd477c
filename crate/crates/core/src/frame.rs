//! Greyscale frames, 3x3 mean images and histogram calibration of the colour
//! variable.

use alloc::vec;
use alloc::vec::Vec;

use crate::Error;

/// Smallest frame side that still holds a full 7x7 attribute neighbourhood.
pub const MIN_FRAME_SIDE: usize = 7;

/// Minimum distance between consecutive colour breakpoints.
pub const BREAKPOINT_SEPARATION: f64 = 5.0;

/// One 8-bit greyscale image of a video sequence, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    width: usize,
    height: usize,
    t: u64,
    data: Vec<u8>,
}

impl Frame {
    pub fn new(width: usize, height: usize, t: u64, data: Vec<u8>) -> Result<Self, Error> {
        if width < MIN_FRAME_SIDE || height < MIN_FRAME_SIDE {
            return Err(Error::FrameTooSmall { width, height });
        }
        if data.len() != width * height {
            return Err(Error::BufferSize {
                expected: width * height,
                actual: data.len(),
            });
        }
        Ok(Frame {
            width,
            height,
            t,
            data,
        })
    }

    /// A frame filled with one intensity.
    pub fn filled(width: usize, height: usize, t: u64, value: u8) -> Result<Self, Error> {
        Frame::new(width, height, t, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// Frame index within its sequence.
    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn set_t(&mut self, t: u64) {
        self.t = t;
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }
}

/// Per-pixel means of the 3x3 neighbourhood, with replicate padding.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanImage {
    width: usize,
    height: usize,
    t: u64,
    data: Vec<f64>,
}

impl MeanImage {
    /// Wraps precomputed means. Values are expected in `[0, 255]`.
    pub fn from_values(width: usize, height: usize, t: u64, data: Vec<f64>) -> Result<Self, Error> {
        if width < MIN_FRAME_SIDE || height < MIN_FRAME_SIDE {
            return Err(Error::FrameTooSmall { width, height });
        }
        if data.len() != width * height {
            return Err(Error::BufferSize {
                expected: width * height,
                actual: data.len(),
            });
        }
        Ok(MeanImage {
            width,
            height,
            t,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn value(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    /// Value at a signed coordinate, clamped to the frame border.
    #[inline]
    pub fn value_clamped(&self, x: isize, y: isize) -> f64 {
        let x = x.clamp(0, self.width as isize - 1) as usize;
        let y = y.clamp(0, self.height as isize - 1) as usize;
        self.data[y * self.width + x]
    }
}

/// Computes the 3x3 box mean of every pixel.
///
/// Rows and columns outside the frame replicate the nearest edge pixel. Sums
/// are accumulated in integers, so each mean is exactly `sum / 9.0`.
pub fn compute_mean_image(frame: &Frame) -> MeanImage {
    let mut out = MeanImage {
        width: frame.width,
        height: frame.height,
        t: frame.t,
        data: vec![0.0; frame.width * frame.height],
    };
    compute_mean_image_into(frame, &mut out);
    out
}

/// Like [`compute_mean_image`] but reuses the buffer of `out`.
pub fn compute_mean_image_into(frame: &Frame, out: &mut MeanImage) {
    let (w, h) = (frame.width, frame.height);
    out.width = w;
    out.height = h;
    out.t = frame.t;
    out.data.resize(w * h, 0.0);

    // Horizontal 3-tap sums, replicate padded.
    let mut rows = vec![0u16; w * h];
    for y in 0..h {
        let src = &frame.data[y * w..(y + 1) * w];
        let dst = &mut rows[y * w..(y + 1) * w];
        dst[0] = 2 * src[0] as u16 + src[1] as u16;
        for x in 1..w - 1 {
            dst[x] = src[x - 1] as u16 + src[x] as u16 + src[x + 1] as u16;
        }
        dst[w - 1] = src[w - 2] as u16 + 2 * src[w - 1] as u16;
    }

    for y in 0..h {
        let up = y.saturating_sub(1);
        let down = (y + 1).min(h - 1);
        let (r0, r1, r2) = (&rows[up * w..], &rows[y * w..], &rows[down * w..]);
        let dst = &mut out.data[y * w..(y + 1) * w];
        for x in 0..w {
            let sum = r0[x] as u32 + r1[x] as u32 + r2[x] as u32;
            dst[x] = sum as f64 / 9.0;
        }
    }
}

/// Breakpoints of the black / grey / white membership functions.
///
/// Black is full up to `b0` and fades out at `b1`; white fades in from `w1`
/// and is full from `w2`; grey covers the rest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColorCalibration {
    pub b0: f64,
    pub b1: f64,
    pub w1: f64,
    pub w2: f64,
}

impl ColorCalibration {
    pub fn new(b0: f64, b1: f64, w1: f64, w2: f64) -> Result<Self, Error> {
        let ok = (0.0..=255.0).contains(&b0)
            && (0.0..=255.0).contains(&w2)
            && b0 < b1
            && b1 <= w1
            && w1 < w2;
        if !ok {
            return Err(Error::InvalidConfig(
                "colour breakpoints must satisfy 0 <= b0 < b1 <= w1 < w2 <= 255",
            ));
        }
        Ok(ColorCalibration { b0, b1, w1, w2 })
    }

    /// Builds a calibration from raw percentile breakpoints, spreading them
    /// apart where the histogram is too narrow.
    ///
    /// The grey plateau `[b1, w1]` is widened symmetrically to at least
    /// `2 * BREAKPOINT_SEPARATION` and kept at least one separation away from
    /// both ends of the intensity range. `b0` is then pushed down and `w2` up
    /// so that both ramps are at least one separation wide.
    pub fn from_percentiles(b0: f64, b1: f64, w1: f64, w2: f64) -> Self {
        let sep = BREAKPOINT_SEPARATION;
        let (mut b1, mut w1) = (b1, w1.max(b1));
        if w1 - b1 < 2.0 * sep {
            let centre = ((b1 + w1) / 2.0).clamp(2.0 * sep, 255.0 - 2.0 * sep);
            b1 = centre - sep;
            w1 = centre + sep;
        } else {
            b1 = b1.max(sep);
            w1 = w1.min(255.0 - sep);
        }
        let b0 = b0.min(b1 - sep).max(0.0);
        let w2 = w2.max(w1 + sep).min(255.0);
        ColorCalibration { b0, b1, w1, w2 }
    }
}

/// Percentile ranks (in percent) used for `b0`, `b1`, `w1`, `w2`.
pub const CALIBRATION_PERCENTILES: [u64; 4] = [10, 30, 70, 90];

/// Derives colour breakpoints from the mean-image histogram.
///
/// Values are rounded to the nearest of 256 integer bins. The p-th percentile
/// is the first bin whose cumulative count reaches `ceil(p * N / 100)`.
pub fn calibrate_color(mean_image: &MeanImage) -> ColorCalibration {
    let mut hist = [0u64; 256];
    for &v in &mean_image.data {
        let bin = (v + 0.5) as usize;
        hist[bin.min(255)] += 1;
    }
    let raw = histogram_percentiles(&hist, CALIBRATION_PERCENTILES);
    ColorCalibration::from_percentiles(raw[0], raw[1], raw[2], raw[3])
}

fn histogram_percentiles(hist: &[u64; 256], percents: [u64; 4]) -> [f64; 4] {
    let total: u64 = hist.iter().sum();
    let mut out = [0.0; 4];
    for (slot, p) in out.iter_mut().zip(percents) {
        let rank = (p * total).div_ceil(100).max(1);
        let mut cumulative = 0;
        for (bin, &count) in hist.iter().enumerate() {
            cumulative += count;
            if cumulative >= rank {
                *slot = bin as f64;
                break;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame_from(w: usize, h: usize, f: impl Fn(usize, usize) -> u8) -> Frame {
        let mut data = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                data.push(f(x, y));
            }
        }
        Frame::new(w, h, 0, data).unwrap()
    }

    #[test]
    fn rejects_small_frames() {
        assert_eq!(
            Frame::filled(6, 10, 0, 0),
            Err(Error::FrameTooSmall {
                width: 6,
                height: 10
            })
        );
        assert!(matches!(
            Frame::new(8, 8, 0, vec![0; 63]),
            Err(Error::BufferSize { expected: 64, .. })
        ));
    }

    #[test]
    fn constant_frame_has_constant_means() {
        let m = compute_mean_image(&Frame::filled(9, 8, 3, 100).unwrap());
        assert!(m.data().iter().all(|&v| v == 100.0));
        assert_eq!(m.t(), 3);
    }

    #[test]
    fn single_bright_pixel_spreads_over_its_window() {
        let m = compute_mean_image(&frame_from(9, 9, |x, y| if (x, y) == (4, 4) { 90 } else { 0 }));
        for y in 0..9usize {
            for x in 0..9usize {
                let near = x.abs_diff(4) <= 1 && y.abs_diff(4) <= 1;
                assert_eq!(m.value(x, y), if near { 10.0 } else { 0.0 }, "({x},{y})");
            }
        }
    }

    #[test]
    fn corner_uses_replicate_padding() {
        let m = compute_mean_image(&Frame::filled(7, 7, 0, 200).unwrap());
        assert_eq!(m.value(0, 0), 200.0);
        assert_eq!(m.value(6, 6), 200.0);

        // Corner pixel 9 with zero neighbours: padded window holds it four times.
        let m = compute_mean_image(&frame_from(7, 7, |x, y| if x + y == 0 { 9 } else { 0 }));
        assert_eq!(m.value(0, 0), 4.0);
    }

    #[test]
    fn uniform_histogram_percentiles() {
        // 256 x 8 image, every intensity appears 8 times.
        let data: Vec<f64> = (0..256 * 8).map(|i| (i % 256) as f64).collect();
        let m = MeanImage::from_values(256, 8, 0, data).unwrap();
        let c = calibrate_color(&m);
        for (got, want) in [(c.b0, 26.0), (c.b1, 77.0), (c.w1, 179.0), (c.w2, 230.0)] {
            assert!((got - want).abs() <= 1.0, "{got} vs {want}");
        }
    }

    #[test]
    fn constant_histogram_is_spread_apart() {
        let m = MeanImage::from_values(8, 8, 0, vec![128.0; 64]).unwrap();
        let c = calibrate_color(&m);
        assert_eq!((c.b0, c.b1, c.w1, c.w2), (118.0, 123.0, 133.0, 138.0));
    }

    #[test]
    fn bimodal_histogram() {
        let data: Vec<f64> = (0..64).map(|i| if i < 32 { 50.0 } else { 200.0 }).collect();
        let c = calibrate_color(&MeanImage::from_values(8, 8, 0, data).unwrap());
        assert_eq!((c.b0, c.b1, c.w1, c.w2), (45.0, 50.0, 200.0, 205.0));
    }

    #[test]
    fn extreme_histograms_stay_in_range() {
        for v in [0.0, 2.0, 253.0, 255.0] {
            let c = calibrate_color(&MeanImage::from_values(8, 8, 0, vec![v; 64]).unwrap());
            assert!(ColorCalibration::new(c.b0, c.b1, c.w1, c.w2).is_ok(), "{v}: {c:?}");
        }
    }

    #[test]
    fn rounding_to_nearest_bin() {
        // 127.5 rounds up, 127.4 down.
        let mut data = vec![127.4; 32];
        data.extend(core::iter::repeat(127.5).take(32));
        let m = MeanImage::from_values(8, 8, 0, data).unwrap();
        let mut hist = [0u64; 256];
        for &v in m.data() {
            hist[(v + 0.5) as usize] += 1;
        }
        assert_eq!((hist[127], hist[128]), (32, 32));
    }
}
