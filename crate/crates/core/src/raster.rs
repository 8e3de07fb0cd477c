//! Polygon rasterisation over pixel centres.
//!
//! Vertices are given in pixel-corner coordinates: pixel `(x, y)` covers the
//! unit square `[x, x + 1) x [y, y + 1)` and its centre is `(x + 0.5, y + 0.5)`.
//! A pixel belongs to a polygon when its centre is inside by the even-odd
//! rule or lies exactly on an edge.

use alloc::vec::Vec;

/// Integer polygon vertex.
pub type Vertex = (i32, i32);

/// Pixels whose centres are covered by `polygon`, sorted row-major.
///
/// Scanline fill: for each row the crossings of the centre line with the
/// polygon edges are sorted and the spans between crossing pairs are filled
/// inclusively.
pub fn rasterize_polygon(polygon: &[Vertex], width: usize, height: usize) -> Vec<(u32, u32)> {
    let mut pixels = Vec::new();
    if polygon.len() < 3 {
        return pixels;
    }
    let (min_y, max_y) = polygon
        .iter()
        .fold((i32::MAX, i32::MIN), |(lo, hi), v| (lo.min(v.1), hi.max(v.1)));
    let row_start = min_y.max(0) as usize;
    let row_end = (max_y.max(0) as usize).min(height);

    let mut crossings: Vec<f64> = Vec::new();
    for y in row_start..row_end {
        let yc = y as f64 + 0.5;
        crossings.clear();
        for (i, &(xa, ya)) in polygon.iter().enumerate() {
            let (xb, yb) = polygon[(i + 1) % polygon.len()];
            let (ya, yb) = (ya as f64, yb as f64);
            // Half-open in y so shared vertices are counted once.
            if (ya <= yc) != (yb <= yc) {
                let x = xa as f64 + (yc - ya) * (xb - xa) as f64 / (yb - ya);
                crossings.push(x);
            }
        }
        crossings.sort_by(f64::total_cmp);
        for pair in crossings.chunks_exact(2) {
            // Smallest centre >= pair[0], largest centre <= pair[1].
            let first = ceil_nonneg(pair[0] - 0.5);
            let last = floor_signed(pair[1] - 0.5);
            let last = last.min(width as i64 - 1);
            let mut x = first.max(0);
            while x <= last {
                pixels.push((x as u32, y as u32));
                x += 1;
            }
        }
    }
    pixels
}

fn floor_signed(v: f64) -> i64 {
    let t = v as i64;
    if (t as f64) > v {
        t - 1
    } else {
        t
    }
}

fn ceil_nonneg(v: f64) -> i64 {
    let t = v as i64;
    if (t as f64) < v {
        t + 1
    } else {
        t
    }
}

fn orientation(a: Vertex, b: Vertex, c: Vertex) -> i64 {
    let v = (b.0 as i64 - a.0 as i64) * (c.1 as i64 - a.1 as i64)
        - (b.1 as i64 - a.1 as i64) * (c.0 as i64 - a.0 as i64);
    v.signum()
}

fn on_segment(a: Vertex, b: Vertex, p: Vertex) -> bool {
    p.0 >= a.0.min(b.0) && p.0 <= a.0.max(b.0) && p.1 >= a.1.min(b.1) && p.1 <= a.1.max(b.1)
}

fn segments_intersect(p1: Vertex, p2: Vertex, q1: Vertex, q2: Vertex) -> bool {
    let (d1, d2) = (orientation(q1, q2, p1), orientation(q1, q2, p2));
    let (d3, d4) = (orientation(p1, p2, q1), orientation(p1, p2, q2));
    if d1 * d2 < 0 && d3 * d4 < 0 {
        return true;
    }
    (d1 == 0 && on_segment(q1, q2, p1))
        || (d2 == 0 && on_segment(q1, q2, p2))
        || (d3 == 0 && on_segment(p1, p2, q1))
        || (d4 == 0 && on_segment(p1, p2, q2))
}

/// True when no two edges touch except adjacent edges at their shared vertex.
pub fn is_simple(polygon: &[Vertex]) -> bool {
    let n = polygon.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        if polygon[i] == polygon[(i + 1) % n] {
            return false;
        }
    }
    for i in 0..n {
        let (a1, a2) = (polygon[i], polygon[(i + 1) % n]);
        for j in i + 1..n {
            let (b1, b2) = (polygon[j], polygon[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // Adjacent edges may only share their common vertex; folding
                // back onto each other is a self-intersection.
                let (shared, a_other, b_other) = if j == i + 1 { (a2, a1, b2) } else { (a1, a2, b1) };
                if orientation(a_other, shared, b_other) == 0
                    && (on_segment(shared, a_other, b_other) || on_segment(shared, b_other, a_other))
                {
                    return false;
                }
                continue;
            }
            if segments_intersect(a1, a2, b1, b2) {
                return false;
            }
        }
    }
    true
}
