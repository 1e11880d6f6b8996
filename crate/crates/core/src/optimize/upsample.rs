use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{Point, Polyline};
use crate::workspace::Workspace;

/// Index `i` with `cs[i] <= d < cs[i + 1]`, clamped to the last segment.
fn segment_at(cs: &[f64], d: f64) -> usize {
    let i = cs.partition_point(|&c| c <= d);
    i.saturating_sub(1).min(cs.len() - 2)
}

fn point_at(pts: &[Point], cs: &[f64], i: usize, d: f64) -> Point {
    let len = cs[i + 1] - cs[i];
    let a = if len > 0.0 { ((d - cs[i]) / len).clamp(0.0, 1.0) } else { 0.0 };
    pts[i].lerp(&pts[i + 1], a)
}

/// Randomized shortening. Each iteration picks two arc-length positions
/// uniformly along the path and, if the chord between them is free,
/// replaces everything in between with that chord. Every iteration draws
/// exactly two numbers, so runs with a common seed share a prefix.
pub fn upsample<W: Workspace + ?Sized, R: Rng + ?Sized>(
    path: &Polyline,
    ws: &W,
    iterations: usize,
    rng: &mut R,
) -> Result<Polyline> {
    if path.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            found: path.len(),
        });
    }
    let mut pts = path.points.clone();
    for _ in 0..iterations {
        let cs = Polyline::cumulative_of(&pts);
        let total = *cs.last().unwrap();
        let x1: f64 = rng.gen();
        let x2: f64 = rng.gen();
        let (d1, d2) = if x1 <= x2 { (x1 * total, x2 * total) } else { (x2 * total, x1 * total) };
        let i = segment_at(&cs, d1);
        let j = segment_at(&cs, d2);
        if i == j || d1 == d2 {
            continue;
        }
        let g1 = point_at(&pts, &cs, i, d1);
        let g2 = point_at(&pts, &cs, j, d2);
        if !ws.segment_free(&g1, &g2) {
            continue;
        }
        let mut next = Vec::with_capacity(pts.len() - (j - i) + 3);
        next.extend_from_slice(&pts[..=i]);
        next.push(g1);
        next.push(g2);
        next.extend_from_slice(&pts[j + 1..]);
        next.dedup();
        pts = next;
    }
    Ok(Polyline::new(pts))
}
