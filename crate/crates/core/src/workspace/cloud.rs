use crate::error::{Error, Result};
use crate::geometry::{Aabb, Point};
use crate::kdtree::KdTree;
use crate::workspace::{DensityReport, Workspace};

/// Point-cloud environment. A location is free when every cloud point is
/// strictly farther than the safe distance `S` from it.
#[derive(Clone, Debug)]
pub struct CloudMap {
    index: KdTree,
    safe_dist: f64,
    step_size: f64,
    alpha: f64,
    bounds: Aabb,
}

impl CloudMap {
    /// Builds a map with `S = alpha * step_size`.
    pub fn new(cloud: &[Point], step_size: f64, alpha: f64) -> Result<Self> {
        if !(step_size > 0.0 && step_size.is_finite()) {
            return Err(Error::InvalidParameter(format!("step size {step_size}")));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!("alpha {alpha} not in (0, 1]")));
        }
        let index = KdTree::build(cloud)?;
        let bounds = Aabb::from_points(cloud)?;
        Ok(CloudMap {
            index,
            safe_dist: alpha * step_size,
            step_size,
            alpha,
            bounds,
        })
    }

    pub fn from_report(cloud: &[Point], report: &DensityReport) -> Result<Self> {
        Self::new(cloud, report.step_size, report.alpha)
    }

    /// Replaces the sampling region (defaults to the cloud's bounding box).
    pub fn with_bounds(mut self, bounds: Aabb) -> Result<Self> {
        if bounds.dim() != self.index.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.index.dim(),
                found: bounds.dim(),
            });
        }
        self.bounds = bounds;
        Ok(self)
    }

    pub fn cloud(&self) -> &[Point] {
        self.index.points()
    }

    pub fn index(&self) -> &KdTree {
        &self.index
    }

    pub fn safe_dist(&self) -> f64 {
        self.safe_dist
    }

    pub fn step_size(&self) -> f64 {
        self.step_size
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Distance from `p` to the closest cloud point.
    pub fn clearance(&self, p: &Point) -> f64 {
        self.index.nearest_d2(p).1.sqrt()
    }
}

fn segment_dist2(c: &Point, p: &Point, q: &Point) -> f64 {
    let d = *q - *p;
    let len2 = d.dist2(&Point::origin(d.dim()));
    if len2 == 0.0 {
        return c.dist2(p);
    }
    let w = *c - *p;
    let dot: f64 = (0..3).map(|k| w.coord(k) * d.coord(k)).sum();
    let t = (dot / len2).clamp(0.0, 1.0);
    c.dist2(&(*p + d * t))
}

impl Workspace for CloudMap {
    fn dim(&self) -> usize {
        self.index.dim()
    }

    fn bounds(&self) -> Aabb {
        self.bounds
    }

    fn point_free(&self, p: &Point) -> bool {
        if p.dim() != self.dim() || !p.is_finite() || !self.bounds.contains(p) {
            return false;
        }
        let s2 = self.safe_dist * self.safe_dist;
        !self.index.any_within_d2(p, s2, &|_| true)
    }

    /// Probes the segment at spacing `<= S/2` (endpoints included) and tests
    /// every cloud point near a probe against the exact point-to-segment
    /// distance, so the verdict is "no cloud point within `S` of the segment".
    fn segment_free(&self, p: &Point, q: &Point) -> bool {
        if !self.point_free(p) || !self.point_free(q) {
            return false;
        }
        let s = self.safe_dist;
        let spacing = s / 2.0;
        let n = (p.dist(q) / spacing).ceil().max(1.0) as usize;
        let h = p.dist(q) / n as f64;
        // a point within S of the segment is within sqrt(S^2 + (h/2)^2) of a probe
        let probe_r2 = s * s + h * h / 4.0;
        let s2 = s * s;
        let near_segment = |c: &Point| segment_dist2(c, p, q) <= s2;
        (0..=n).all(|k| {
            let probe = p.lerp(q, k as f64 / n as f64);
            !self.index.any_within_d2(&probe, probe_r2, &near_segment)
        })
    }
}
