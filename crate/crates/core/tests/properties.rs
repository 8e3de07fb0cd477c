use proptest::prelude::*;
use vloop_core::raster::{is_simple, rasterize_polygon};
use vloop_core::{
    calibrate_color, classify_count, compute_mean_image, compute_thresholds, eval_color,
    eval_contrast, update_accumulator, update_occupancy, update_range, AccumulatorBank,
    AttributeVector, ColorCalibration, ContrastConfig, CountClassifierConfig, DetectionZone,
    Detector, DetectorConfig, Frame, MembershipTriple, ThresholdConfig, ZoneState,
};

const EPS: f64 = 1e-9;

/// One accumulator step moves a count by at most 1, up to the rounding of the
/// addition itself.
fn unit_step(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1.0 + 4.0 * f64::EPSILON * a.abs().max(1.0)
}

fn calibration() -> impl Strategy<Value = ColorCalibration> {
    prop::array::uniform4(0u8..=255).prop_map(|mut v| {
        v.sort_unstable();
        ColorCalibration::from_percentiles(v[0] as f64, v[1] as f64, v[2] as f64, v[3] as f64)
    })
}

fn contrast_config() -> impl Strategy<Value = ContrastConfig> {
    (0.5f64..60.0, 0.5f64..60.0).prop_map(|(a, b)| ContrastConfig {
        delta_inner: a,
        delta_outer: a + b,
    })
}

fn count_config() -> impl Strategy<Value = CountClassifierConfig> {
    (0.5f64..40.0, 0.5f64..80.0).prop_map(|(z, d)| CountClassifierConfig {
        n_zero: z,
        n_full: z + d,
    })
}

fn triple() -> impl Strategy<Value = MembershipTriple> {
    (0.0f64..=1.0, 0.0f64..=1.0).prop_map(|(a, b)| {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        MembershipTriple([lo, hi - lo, 1.0 - hi])
    })
}

fn frame(max_side: usize) -> impl Strategy<Value = Frame> {
    (7..=max_side, 7..=max_side).prop_flat_map(|(w, h)| {
        prop::collection::vec(any::<u8>(), w * h).prop_map(move |d| Frame::new(w, h, 0, d).unwrap())
    })
}

fn in_polygon_or_on_edge(poly: &[(i32, i32)], px: f64, py: f64) -> bool {
    let n = poly.len();
    let mut inside = false;
    for i in 0..n {
        let (x1, y1) = (poly[i].0 as f64, poly[i].1 as f64);
        let (x2, y2) = (poly[(i + 1) % n].0 as f64, poly[(i + 1) % n].1 as f64);
        let cross = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1);
        let within = px >= x1.min(x2) && px <= x1.max(x2) && py >= y1.min(y2) && py <= y1.max(y2);
        if cross == 0.0 && within {
            return true;
        }
        if (y1 > py) != (y2 > py) && px < x1 + (py - y1) * (x2 - x1) / (y2 - y1) {
            inside = !inside;
        }
    }
    inside
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn colour_terms_partition_unity(v in -10.0f64..270.0, c in calibration()) {
        let m = eval_color(v, &c);
        prop_assert!((m.sum() - 1.0).abs() <= EPS);
        prop_assert!(m.0.iter().all(|&x| (0.0..=1.0).contains(&x)));
    }

    #[test]
    fn colour_terms_are_monotone(a in 0.0f64..255.0, b in 0.0f64..255.0, c in calibration()) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (ml, mh) = (eval_color(lo, &c), eval_color(hi, &c));
        prop_assert!(ml.0[0] >= mh.0[0]);
        prop_assert!(ml.0[2] <= mh.0[2]);
    }

    #[test]
    fn contrast_terms_partition_unity(c in -300.0f64..300.0, r in -300.0f64..300.0, cfg in contrast_config()) {
        let m = eval_contrast(c, r, &cfg);
        prop_assert!((m.sum() - 1.0).abs() <= EPS);
        prop_assert!(m.0.iter().all(|&x| (0.0..=1.0).contains(&x)));
    }

    #[test]
    fn contrast_is_mirror_symmetric(c in 0.0f64..255.0, r in 0.0f64..255.0, cfg in contrast_config()) {
        let a = eval_contrast(c, r, &cfg);
        let b = eval_contrast(r, c, &cfg);
        prop_assert_eq!(a.0, [b.0[2], b.0[1], b.0[0]]);
    }

    #[test]
    fn contrast_ignores_common_shift(c in 40.0f64..200.0, r in 40.0f64..200.0, k in -40.0f64..40.0, cfg in contrast_config()) {
        let a = eval_contrast(c, r, &cfg);
        let b = eval_contrast(c + k, r + k, &cfg);
        for i in 0..3 {
            prop_assert!((a.0[i] - b.0[i]).abs() <= 1e-9);
        }
    }

    #[test]
    fn count_terms_partition_unity(n in -2000.0f64..2000.0, cfg in count_config()) {
        let m = classify_count(n, &cfg);
        prop_assert!((m.neg + m.low + m.pos - 1.0).abs() <= EPS);
        prop_assert!([m.neg, m.low, m.pos].iter().all(|&x| (0.0..=1.0).contains(&x)));
    }

    #[test]
    fn accumulator_step_is_bounded(prev in -1000.0f64..1000.0, mu in 0.0f64..=1.0) {
        let next = update_accumulator(prev, mu, 1000.0);
        prop_assert!(unit_step(prev, next), "{} -> {}", prev, next);
        prop_assert!(next.abs() <= 1000.0);
    }

    #[test]
    fn unclamped_drift_is_bounded(mus in prop::collection::vec(0.0f64..=1.0, 1..300)) {
        let mut count = 0.0;
        for &mu in &mus {
            count = update_accumulator(count, mu, f64::INFINITY);
        }
        prop_assert!(count.abs() <= mus.len() as f64);
    }

    #[test]
    fn bank_changes_at_most_one_per_frame(
        frames in prop::collection::vec(prop::collection::vec((triple(), triple(), triple(), triple(), triple()), 4), 1..60),
        occupied in prop::collection::vec(any::<bool>(), 60),
        cfg in count_config(),
    ) {
        let mut bank = AccumulatorBank::new(4, 1000.0);
        for (t, attrs) in frames.iter().enumerate() {
            let attrs: Vec<AttributeVector> = attrs
                .iter()
                .map(|&(a, b, c, d, e)| AttributeVector([a, b, c, d, e]))
                .collect();
            let before = bank.counts().to_vec();
            bank.update(&attrs, occupied[t], &cfg).unwrap();
            for (a, b) in before.iter().zip(bank.counts()) {
                prop_assert!(unit_step(*a, *b), "{} -> {}", a, b);
            }
        }
    }

    #[test]
    fn freeze_keeps_low_counts(
        start in prop::collection::vec(-60.0f64..60.0, 15),
        frames in prop::collection::vec(prop::collection::vec(triple(), 5), 1..40),
        cfg in count_config(),
    ) {
        let mut bank = AccumulatorBank::new(1, 1000.0);
        bank.counts_mut().copy_from_slice(&start);
        let frozen: Vec<bool> = start.iter().map(|&c| classify_count(c, &cfg).low > 0.5).collect();
        for attrs in &frames {
            let v = AttributeVector([attrs[0], attrs[1], attrs[2], attrs[3], attrs[4]]);
            bank.update(&[v], true, &cfg).unwrap();
        }
        for ((&s, &c), &f) in start.iter().zip(bank.counts()).zip(&frozen) {
            if f {
                prop_assert_eq!(s, c);
            }
        }
    }

    #[test]
    fn thresholds_follow_sensitivity(
        s in prop::collection::vec(0.0f64..5000.0, 1..100),
        p_d in 0.0f64..=1.0,
    ) {
        let cfg = ThresholdConfig::default();
        let mut state = ZoneState::default();
        for &v in &s {
            update_range(&mut state, v, &cfg);
            prop_assert!(state.s_min <= state.s_max);
            let (h, l) = compute_thresholds(&state, p_d, &cfg);
            prop_assert!(h >= 100.0 * p_d);
            prop_assert_eq!(l, 0.8 * h);
            let (h2, _) = compute_thresholds(&state, (p_d + 0.1).min(1.0), &cfg);
            prop_assert!(h2 >= h - 1e-9 * h.abs().max(1.0));
        }
    }

    #[test]
    fn hysteresis_holds_inside_band(
        occupied in any::<bool>(),
        t_high in 1.0f64..1000.0,
        frac in 0.0f64..1.0,
        recent in any::<bool>(),
    ) {
        let t_low = 0.8 * t_high;
        let s = t_low + (t_high - t_low) * frac;
        prop_assume!(s > t_low && s < t_high);
        let mut state = ZoneState { t_high, t_low, occupied, ..ZoneState::default() };
        update_occupancy(&mut state, s, recent);
        prop_assert_eq!(state.occupied, occupied);
    }

    #[test]
    fn gate_never_switches_without_movement(
        occupied in any::<bool>(),
        s in 0.0f64..2000.0,
        t_high in 1.0f64..1000.0,
    ) {
        let mut state = ZoneState { t_high, t_low: 0.8 * t_high, occupied, ..ZoneState::default() };
        update_occupancy(&mut state, s, false);
        prop_assert_eq!(state.occupied, occupied);
    }

    #[test]
    fn mean_image_stays_in_range(f in frame(24)) {
        let m = compute_mean_image(&f);
        let lo = *f.data().iter().min().unwrap() as f64;
        let hi = *f.data().iter().max().unwrap() as f64;
        prop_assert!(m.data().iter().all(|&v| v >= lo && v <= hi));
    }

    #[test]
    fn mean_image_shift_equivariance(f in frame(20), k in 0u8..60) {
        let base: Vec<u8> = f.data().iter().map(|&v| v % 196).collect();
        let f = Frame::new(f.width(), f.height(), 0, base).unwrap();
        let shifted: Vec<u8> = f.data().iter().map(|&v| v + k).collect();
        let g = Frame::new(f.width(), f.height(), 0, shifted).unwrap();
        let (a, b) = (compute_mean_image(&f), compute_mean_image(&g));
        for (x, y) in a.data().iter().zip(b.data()) {
            prop_assert!((x + k as f64 - y).abs() <= 1e-9);
        }
    }

    #[test]
    fn calibration_is_ordered_and_permutation_invariant(f in frame(20), seed in any::<u64>()) {
        let m = compute_mean_image(&f);
        let c = calibrate_color(&m);
        prop_assert!(0.0 <= c.b0 && c.b0 < c.b1 && c.b1 <= c.w1 && c.w1 < c.w2 && c.w2 <= 255.0);
        let mut values = m.data().to_vec();
        let n = values.len();
        let mut s = seed | 1;
        for i in (1..n).rev() {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            values.swap(i, (s % (i as u64 + 1)) as usize);
        }
        let shuffled = vloop_core::MeanImage::from_values(m.width(), m.height(), 0, values).unwrap();
        prop_assert_eq!(calibrate_color(&shuffled), c);
    }

    #[test]
    fn rasterisation_matches_point_tests(
        poly in prop::collection::vec((0i32..=24, 0i32..=24), 3..7),
    ) {
        prop_assume!(is_simple(&poly));
        let pixels = rasterize_polygon(&poly, 24, 24);
        let mut expected = Vec::new();
        for y in 0..24u32 {
            for x in 0..24u32 {
                if in_polygon_or_on_edge(&poly, x as f64 + 0.5, y as f64 + 0.5) {
                    expected.push((x, y));
                }
            }
        }
        let mut got = pixels.clone();
        got.sort_by_key(|&(x, y)| (y, x));
        prop_assert_eq!(got, expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn detector_respects_invariants(
        frames in prop::collection::vec(prop::collection::vec(any::<u8>(), 16 * 16), 2..40),
        p_d in 0.0f64..=1.0,
    ) {
        let mut cfg = DetectorConfig::default();
        cfg.counts = CountClassifierConfig { n_zero: 2.0, n_full: 6.0 };
        let zone = DetectionZone::rect("z", 2, 2, 10, 10, p_d, 16, 16).unwrap();
        let mut det = Detector::new(cfg, vec![zone], 16, 16).unwrap();
        let mut prev_occ = false;
        let mut prev_counts: Option<Vec<f64>> = None;
        for (t, data) in frames.into_iter().enumerate() {
            let r = det.process_frame(Frame::new(16, 16, 0, data).unwrap()).unwrap();
            let r = &r[0];
            prop_assert_eq!(r.frame, t as u64);
            prop_assert!(r.t_high >= 100.0 * p_d);
            prop_assert_eq!(r.t_low, 0.8 * r.t_high);
            if r.warmup {
                prop_assert!(!r.occupied);
            } else if r.s > r.t_low && r.s < r.t_high {
                prop_assert_eq!(r.occupied, prev_occ);
            }
            let tracker = &det.trackers()[0];
            if r.occupied != prev_occ && !r.warmup {
                prop_assert!(tracker.state().movement_recent(t as u64, cfg.movement.hold_frames));
            }
            let counts = tracker.bank().counts().to_vec();
            if let Some(prev) = &prev_counts {
                for (a, b) in prev.iter().zip(&counts) {
                    prop_assert!(unit_step(*a, *b), "{} -> {}", a, b);
                    if prev_occ && classify_count(*a, &cfg.counts).low > 0.5 {
                        prop_assert_eq!(a, b);
                    }
                }
            }
            prev_counts = Some(counts);
            prev_occ = r.occupied;
        }
    }
}
