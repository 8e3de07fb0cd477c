//! Scoring occupancy series against ground truth.

/// Counts of the interval-based error protocol for one zone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IntervalScore {
    pub intervals: usize,
    pub false_negatives: usize,
    pub false_positives: usize,
}

impl IntervalScore {
    pub fn errors(&self) -> usize {
        self.false_negatives + self.false_positives
    }

    pub fn error_rate(&self) -> f64 {
        if self.intervals == 0 {
            0.0
        } else {
            self.errors() as f64 / self.intervals as f64
        }
    }
}

impl std::ops::AddAssign for IntervalScore {
    fn add_assign(&mut self, rhs: Self) {
        self.intervals += rhs.intervals;
        self.false_negatives += rhs.false_negatives;
        self.false_positives += rhs.false_positives;
    }
}

/// Scores fixed-length intervals (50 frames = 2 s at 25 fps).
///
/// An interval is a false negative when a vehicle is present in some frame
/// but the occupancy stays 0 throughout, and a false positive when the zone
/// is empty in every frame but the occupancy stays 1 throughout. A trailing
/// partial interval is ignored.
pub fn score_intervals(truth: &[bool], occupied: &[bool], interval: usize) -> IntervalScore {
    assert_eq!(truth.len(), occupied.len(), "series length mismatch");
    let mut score = IntervalScore::default();
    for (t, o) in truth.chunks_exact(interval).zip(occupied.chunks_exact(interval)) {
        score.intervals += 1;
        let present = t.iter().any(|&v| v);
        if present && o.iter().all(|&v| !v) {
            score.false_negatives += 1;
        }
        if !present && o.iter().all(|&v| v) {
            score.false_positives += 1;
        }
    }
    score
}

/// Maximal runs of `true`, as half-open frame ranges.
pub fn pulses(series: &[bool]) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, &v) in series.iter().enumerate() {
        match (v, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push(s..i);
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(s..series.len());
    }
    out
}

/// Pulse-level agreement between detector and truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PulseMatch {
    pub detected: usize,
    pub truth: usize,
    /// Detected pulses that overlap no truth pulse.
    pub spurious: usize,
    /// Truth pulses that overlap no detected pulse.
    pub missed: usize,
}

/// Matches detected pulses to truth pulses by overlap, allowing `slack`
/// frames of lag on either side.
pub fn match_pulses(truth: &[bool], occupied: &[bool], slack: usize) -> PulseMatch {
    let tp = pulses(truth);
    let dp = pulses(occupied);
    let overlaps = |a: &std::ops::Range<usize>, b: &std::ops::Range<usize>| {
        a.start < b.end + slack && b.start < a.end + slack
    };
    PulseMatch {
        detected: dp.len(),
        truth: tp.len(),
        spurious: dp.iter().filter(|d| !tp.iter().any(|t| overlaps(d, t))).count(),
        missed: tp.iter().filter(|t| !dp.iter().any(|d| overlaps(d, t))).count(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn interval_protocol() {
        let truth = series("0110000000001000");
        let occ = series("0000111101101000");
        let s = score_intervals(&truth, &occ, 4);
        assert_eq!(s.intervals, 4);
        assert_eq!(s.false_negatives, 1);
        assert_eq!(s.false_positives, 1);
        assert_eq!(s.error_rate(), 0.5);
    }

    #[test]
    fn pulse_extraction_and_matching() {
        let occ = series("0011100011");
        assert_eq!(pulses(&occ), vec![2..5, 8..10]);
        let truth = series("0001100000");
        let m = match_pulses(&truth, &occ, 0);
        assert_eq!((m.detected, m.truth, m.spurious, m.missed), (2, 1, 1, 0));
    }
}
