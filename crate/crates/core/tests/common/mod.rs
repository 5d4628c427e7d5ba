//! Independent oracles and generators shared by the property and acceptance
//! suites. Nothing here calls into the library's own geometry, statistics or
//! assignment code.

#![allow(dead_code)]

use std::f64::consts::PI;

use rand::Rng;

pub mod props;

/// Corners of a `length x width` rectangle at `(cx, cz)` with heading `yaw`,
/// written out from the KITTI rotation without the library's helpers.
pub fn rect_corners(cx: f64, cz: f64, yaw: f64, length: f64, width: f64) -> Vec<(f64, f64)> {
    let (s, c) = yaw.sin_cos();
    let mut pts: Vec<(f64, f64)> = [(0.5, 0.5), (-0.5, 0.5), (-0.5, -0.5), (0.5, -0.5)]
        .iter()
        .map(|(u, v)| {
            let (dx, dz) = (u * length, v * width);
            (cx + dx * c + dz * s, cz - dx * s + dz * c)
        })
        .collect();
    if signed_area(&pts) < 0.0 {
        pts.reverse();
    }
    pts
}

pub fn signed_area(poly: &[(f64, f64)]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            a.0 * b.1 - b.0 * a.1
        })
        .sum::<f64>()
        / 2.0
}

/// Sutherland–Hodgman clipping of `subject` by the counter-clockwise convex
/// polygon `clip`.
pub fn clip_polygon(subject: &[(f64, f64)], clip: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = subject.to_vec();
    for i in 0..clip.len() {
        if out.is_empty() {
            break;
        }
        let (a, b) = (clip[i], clip[(i + 1) % clip.len()]);
        let side = |p: (f64, f64)| (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
        let input = std::mem::take(&mut out);
        for j in 0..input.len() {
            let (p, q) = (input[j], input[(j + 1) % input.len()]);
            let (sp, sq) = (side(p), side(q));
            if sp >= 0.0 {
                out.push(p);
            }
            if (sp >= 0.0) != (sq >= 0.0) {
                let t = sp / (sp - sq);
                out.push((p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1)));
            }
        }
    }
    out
}

pub fn intersection_area(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let clipped = clip_polygon(a, b);
    if clipped.len() < 3 {
        0.0
    } else {
        signed_area(&clipped).abs()
    }
}

fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dz) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dz * dz;
    let t = (((p.0 - a.0) * dx + (p.1 - a.1) * dz) / len2).clamp(0.0, 1.0);
    let (qx, qz) = (a.0 + t * dx, a.1 + t * dz);
    (p.0 - qx).hypot(p.1 - qz)
}

/// Distance between the boundaries of two convex polygons.
pub fn boundary_distance(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let one_way = |p: &[(f64, f64)], q: &[(f64, f64)]| {
        p.iter()
            .flat_map(|&v| (0..q.len()).map(move |i| point_segment_distance(v, q[i], q[(i + 1) % q.len()])))
            .fold(f64::INFINITY, f64::min)
    };
    one_way(a, b).min(one_way(b, a))
}

/// Times `t` with `|p + v t| <= r`, as a closed interval.
fn axis_window(p: f64, v: f64, r: f64) -> Option<(f64, f64)> {
    if v == 0.0 {
        return (p.abs() <= r).then_some((f64::NEG_INFINITY, f64::INFINITY));
    }
    let (t1, t2) = ((-r - p) / v, (r - p) / v);
    Some((t1.min(t2), t1.max(t2)))
}

/// Closed-form contact interval, clipped to `[0, horizon]`, of two
/// axis-aligned rectangles moving at constant velocity. `half_a` and `half_b`
/// are the half-extents along x and z.
pub fn axis_aligned_contact(
    offset: (f64, f64),
    rel_velocity: (f64, f64),
    half_a: (f64, f64),
    half_b: (f64, f64),
    horizon: f64,
) -> Option<(f64, f64)> {
    let (x0, x1) = axis_window(offset.0, rel_velocity.0, half_a.0 + half_b.0)?;
    let (z0, z1) = axis_window(offset.1, rel_velocity.1, half_a.1 + half_b.1)?;
    let lo = x0.max(z0).max(0.0);
    let hi = x1.min(z1).min(horizon);
    (lo <= hi).then_some((lo, hi))
}

/// Maximum CDF difference, evaluating both empirical CDFs by counting at
/// every pooled sample point.
pub fn brute_force_ks(a: &[f64], b: &[f64]) -> f64 {
    let cdf = |s: &[f64], x: f64| s.iter().filter(|&&v| v <= x).count() as f64 / s.len() as f64;
    a.iter()
        .chain(b)
        .map(|&x| (cdf(a, x) - cdf(b, x)).abs())
        .fold(0.0, f64::max)
}

/// Minimum assignment cost by enumerating every injective map from the
/// smaller side into the larger one. Costs are summed in row order.
pub fn brute_force_assignment(costs: &[Vec<f64>]) -> f64 {
    let rows = costs.len();
    let cols = costs.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    if rows <= cols {
        let mut used = vec![false; cols];
        let mut chosen = Vec::with_capacity(rows);
        enumerate_rows(costs, &mut used, &mut chosen, &mut best);
    } else {
        // Pick which row each column takes, then sum in row order.
        let mut used = vec![false; rows];
        let mut chosen: Vec<usize> = Vec::with_capacity(cols);
        enumerate_cols(costs, &mut used, &mut chosen, &mut best);
    }
    best
}

fn enumerate_rows(costs: &[Vec<f64>], used: &mut [bool], chosen: &mut Vec<usize>, best: &mut f64) {
    if chosen.len() == costs.len() {
        let total = chosen.iter().enumerate().fold(0.0, |acc, (r, &c)| acc + costs[r][c]);
        *best = best.min(total);
        return;
    }
    for c in 0..used.len() {
        if !used[c] {
            used[c] = true;
            chosen.push(c);
            enumerate_rows(costs, used, chosen, best);
            chosen.pop();
            used[c] = false;
        }
    }
}

fn enumerate_cols(costs: &[Vec<f64>], used: &mut [bool], chosen: &mut Vec<usize>, best: &mut f64) {
    let cols = costs[0].len();
    if chosen.len() == cols {
        let mut pairs: Vec<(usize, usize)> = chosen.iter().enumerate().map(|(c, &r)| (r, c)).collect();
        pairs.sort_unstable();
        let total = pairs.iter().fold(0.0, |acc, &(r, c)| acc + costs[r][c]);
        *best = best.min(total);
        return;
    }
    for r in 0..used.len() {
        if !used[r] {
            used[r] = true;
            chosen.push(r);
            enumerate_cols(costs, used, chosen, best);
            chosen.pop();
            used[r] = false;
        }
    }
}

/// Random oriented rectangle as `(cx, cz, yaw, length, width)`.
pub fn random_rect(rng: &mut impl Rng) -> (f64, f64, f64, f64, f64) {
    (
        rng.gen_range(-6.0..6.0),
        rng.gen_range(-6.0..6.0),
        rng.gen_range(-PI..PI),
        rng.gen_range(0.5..6.0),
        rng.gen_range(0.3..3.0),
    )
}

/// One KITTI label line with a valid box and footprint.
pub fn label_line(frame: u32, id: i64, class: &str, left: f64, x: f64, z: f64, yaw: f64) -> String {
    format!(
        "{frame} {id} {class} 0 0 {yaw} {left} 120 {} 220 1.5 1.8 4.2 {x} 1.6 {z} {yaw}\n",
        left + 90.0
    )
}
