use crate::error::{Error, Result};
use crate::geometry::{Point, Polyline};
use crate::optimize::spline::{fit_cubic_spline, SplinePath};
use crate::workspace::Workspace;

pub const DEFAULT_MAX_ROUNDS: usize = 50;

#[derive(Clone, Debug)]
pub struct SmoothResult {
    /// Spline through the final keypoints.
    pub spline: SplinePath,
    /// Collision-checked samples of the spline, or the input polyline when
    /// `degraded` is set.
    pub discretized: Polyline,
    pub keypoints_inserted: usize,
    pub rounds: usize,
    /// Smoothing did not converge within the round budget.
    pub degraded: bool,
}

/// Keypoint closest in parameter to `t`; the earlier one on ties.
fn closest_knot(knots: &[f64], t: f64) -> usize {
    let mut best = 0;
    for (i, k) in knots.iter().enumerate() {
        if (k - t).abs() < (knots[best] - t).abs() {
            best = i;
        }
    }
    best
}

/// Drops keypoints within `tol` of the previous one so chord-length knots
/// stay strictly increasing. Both endpoints are kept.
fn merge_close(pts: &[Point], tol: f64) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(pts.len());
    for (i, p) in pts.iter().enumerate() {
        match out.last() {
            Some(q) if q.dist(p) <= tol => {
                if i + 1 == pts.len() && out.len() > 1 {
                    *out.last_mut().unwrap() = *p;
                }
            }
            _ => out.push(*p),
        }
    }
    out
}

/// Parameters of the pieces of `samples` that collide.
fn collisions<W: Workspace + ?Sized>(samples: &[(f64, Point)], ws: &W) -> Vec<f64> {
    samples
        .windows(2)
        .filter(|w| !ws.segment_free(&w[0].1, &w[1].1))
        .map(|w| {
            if !ws.point_free(&w[0].1) {
                w[0].0
            } else if !ws.point_free(&w[1].1) {
                w[1].0
            } else {
                0.5 * (w[0].0 + w[1].0)
            }
        })
        .collect()
}

/// Fits a natural spline through `keypoints` and, while its discretization
/// collides, inserts the midpoint between the keypoint nearest each
/// collision and its predecessor, then refits.
pub fn kp_smooth<W: Workspace + ?Sized>(
    keypoints: &Polyline,
    ws: &W,
    sample_spacing: f64,
    max_rounds: usize,
) -> Result<SmoothResult> {
    if sample_spacing.is_nan() || sample_spacing <= 0.0 {
        return Err(Error::InvalidParameter(format!("sample spacing {sample_spacing}")));
    }
    let input = keypoints.clone().dedup();
    let tol = 1e-9 * input.cost().max(1.0);
    let mut kp = merge_close(&input.points, tol);
    let mut inserted = 0;
    let mut rounds = 0;
    loop {
        let spline = fit_cubic_spline(&Polyline::new(kp.clone()))?;
        let samples = spline.discretize(sample_spacing);
        let hits = collisions(&samples, ws);
        if hits.is_empty() {
            return Ok(SmoothResult {
                spline,
                discretized: Polyline::new(samples.into_iter().map(|(_, p)| p).collect()),
                keypoints_inserted: inserted,
                rounds,
                degraded: false,
            });
        }
        if rounds == max_rounds {
            return Ok(SmoothResult {
                spline: fit_cubic_spline(&input)?,
                discretized: input,
                keypoints_inserted: inserted,
                rounds,
                degraded: true,
            });
        }
        rounds += 1;
        // position of each new midpoint: the slot before keypoint `i`,
        // or after keypoint 0
        let mut slots: Vec<usize> = hits
            .iter()
            .map(|&t| closest_knot(spline.knots(), t).max(1))
            .collect();
        slots.sort_unstable();
        slots.dedup();
        for &i in slots.iter().rev() {
            if kp[i - 1].dist(&kp[i]) > 4.0 * tol {
                kp.insert(i, kp[i - 1].midpoint(&kp[i]));
                inserted += 1;
            }
        }
    }
}
