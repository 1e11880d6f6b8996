//! Static k-d tree with exact nearest-neighbour and radius queries.
//!
//! The tree is laid out implicitly over a permutation of the input indices:
//! every subrange `[lo, hi)` stores its splitting point at `(lo + hi) / 2`,
//! points left of it have a coordinate `<=` the split on the node's axis and
//! points right of it `>=`. Axes cycle with depth.
//!
//! Query results are identical to an exhaustive scan, with ties at equal
//! squared distance broken towards the lowest input index.

use crate::error::{Error, Result};
use crate::geometry::Point;

#[derive(Clone, Debug)]
pub struct KdTree {
    points: Vec<Point>,
    order: Vec<u32>,
    dim: usize,
}

impl KdTree {
    pub fn build(points: &[Point]) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyPointSet)?;
        let dim = first.dim();
        if !(2..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        if let Some(p) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
        let mut order: Vec<u32> = (0..points.len() as u32).collect();
        split(points, &mut order, 0, dim);
        Ok(KdTree {
            points: points.to_vec(),
            order,
            dim,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, index: usize) -> &Point {
        &self.points[index]
    }

    fn check_dim(&self, q: &Point) -> Result<()> {
        if q.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: q.dim(),
            });
        }
        Ok(())
    }

    /// Index of the closest stored point and its Euclidean distance.
    pub fn nearest(&self, q: &Point) -> Result<(usize, f64)> {
        self.check_dim(q)?;
        let mut best = Best {
            d2: f64::INFINITY,
            index: usize::MAX,
        };
        self.nearest_rec(0, self.order.len(), 0, q, &mut best);
        Ok((best.index, best.d2.sqrt()))
    }

    /// Same as [`nearest`](Self::nearest) but returns the squared distance
    /// and skips the dimension check.
    pub(crate) fn nearest_d2(&self, q: &Point) -> (usize, f64) {
        let mut best = Best {
            d2: f64::INFINITY,
            index: usize::MAX,
        };
        self.nearest_rec(0, self.order.len(), 0, q, &mut best);
        (best.index, best.d2)
    }

    /// Nearest stored point other than `exclude` (by index).
    pub(crate) fn nearest_excluding(&self, q: &Point, exclude: usize) -> Option<(usize, f64)> {
        let mut best = Best {
            d2: f64::INFINITY,
            index: usize::MAX,
        };
        self.nearest_rec_excl(0, self.order.len(), 0, q, exclude, &mut best);
        (best.index != usize::MAX).then(|| (best.index, best.d2.sqrt()))
    }

    /// Indices of all points `p` with `|p - q| <= r`, ascending.
    pub fn within_radius(&self, q: &Point, r: f64) -> Result<Vec<usize>> {
        self.check_dim(q)?;
        if r < 0.0 || r.is_nan() {
            return Err(Error::NegativeRadius(r));
        }
        let mut out = Vec::new();
        self.radius_rec(0, self.order.len(), 0, q, r * r, &mut out);
        out.sort_unstable();
        Ok(out)
    }

    /// True if some stored point within squared distance `r2` of `q`
    /// satisfies `accept`. Stops at the first hit.
    pub(crate) fn any_within_d2(&self, q: &Point, r2: f64, accept: &impl Fn(&Point) -> bool) -> bool {
        self.any_rec(0, self.order.len(), 0, q, r2, accept)
    }

    fn nearest_rec(&self, lo: usize, hi: usize, depth: usize, q: &Point, best: &mut Best) {
        if lo >= hi {
            return;
        }
        let mid = (lo + hi) / 2;
        let idx = self.order[mid] as usize;
        let p = &self.points[idx];
        best.offer(p.dist2(q), idx);

        let axis = depth % self.dim;
        let diff = q.coord(axis) - p.coord(axis);
        let (near, far) = if diff < 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.nearest_rec(near.0, near.1, depth + 1, q, best);
        if diff * diff <= best.d2 {
            self.nearest_rec(far.0, far.1, depth + 1, q, best);
        }
    }

    fn nearest_rec_excl(
        &self,
        lo: usize,
        hi: usize,
        depth: usize,
        q: &Point,
        exclude: usize,
        best: &mut Best,
    ) {
        if lo >= hi {
            return;
        }
        let mid = (lo + hi) / 2;
        let idx = self.order[mid] as usize;
        let p = &self.points[idx];
        if idx != exclude {
            best.offer(p.dist2(q), idx);
        }
        let axis = depth % self.dim;
        let diff = q.coord(axis) - p.coord(axis);
        let (near, far) = if diff < 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.nearest_rec_excl(near.0, near.1, depth + 1, q, exclude, best);
        if diff * diff <= best.d2 {
            self.nearest_rec_excl(far.0, far.1, depth + 1, q, exclude, best);
        }
    }

    fn radius_rec(&self, lo: usize, hi: usize, depth: usize, q: &Point, r2: f64, out: &mut Vec<usize>) {
        if lo >= hi {
            return;
        }
        let mid = (lo + hi) / 2;
        let idx = self.order[mid] as usize;
        let p = &self.points[idx];
        if p.dist2(q) <= r2 {
            out.push(idx);
        }
        let axis = depth % self.dim;
        let diff = q.coord(axis) - p.coord(axis);
        let go_left = diff <= 0.0 || diff * diff <= r2;
        let go_right = diff >= 0.0 || diff * diff <= r2;
        if go_left {
            self.radius_rec(lo, mid, depth + 1, q, r2, out);
        }
        if go_right {
            self.radius_rec(mid + 1, hi, depth + 1, q, r2, out);
        }
    }

    fn any_rec(
        &self,
        lo: usize,
        hi: usize,
        depth: usize,
        q: &Point,
        r2: f64,
        accept: &impl Fn(&Point) -> bool,
    ) -> bool {
        if lo >= hi {
            return false;
        }
        let mid = (lo + hi) / 2;
        let p = &self.points[self.order[mid] as usize];
        if p.dist2(q) <= r2 && accept(p) {
            return true;
        }
        let axis = depth % self.dim;
        let diff = q.coord(axis) - p.coord(axis);
        let (near, far) = if diff < 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.any_rec(near.0, near.1, depth + 1, q, r2, accept)
            || (diff * diff <= r2 && self.any_rec(far.0, far.1, depth + 1, q, r2, accept))
    }
}

struct Best {
    d2: f64,
    index: usize,
}

impl Best {
    #[inline]
    fn offer(&mut self, d2: f64, index: usize) {
        if d2 < self.d2 || (d2 == self.d2 && index < self.index) {
            self.d2 = d2;
            self.index = index;
        }
    }
}

fn split(points: &[Point], order: &mut [u32], depth: usize, dim: usize) {
    if order.len() <= 1 {
        return;
    }
    let axis = depth % dim;
    let mid = order.len() / 2;
    order.select_nth_unstable_by(mid, |&a, &b| {
        let (pa, pb) = (&points[a as usize], &points[b as usize]);
        pa.coord(axis)
            .total_cmp(&pb.coord(axis))
            .then_with(|| a.cmp(&b))
    });
    let (left, rest) = order.split_at_mut(mid);
    split(points, left, depth + 1, dim);
    split(points, &mut rest[1..], depth + 1, dim);
}

/// Nearest-neighbour index over a growing point set.
///
/// Older points live in a [`KdTree`] that is rebuilt whenever the unindexed
/// tail grows past a fraction of the indexed part; the tail is scanned
/// linearly. Results (including the lowest-index tie rule) match an
/// exhaustive scan.
#[derive(Clone, Debug, Default)]
pub struct IncrementalIndex {
    points: Vec<Point>,
    tree: Option<KdTree>,
}

impl IncrementalIndex {
    const MIN_TAIL: usize = 48;

    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn indexed(&self) -> usize {
        self.tree.as_ref().map_or(0, KdTree::len)
    }

    pub fn push(&mut self, p: Point) {
        self.points.push(p);
        let indexed = self.indexed();
        let tail = self.points.len() - indexed;
        if tail > Self::MIN_TAIL.max(indexed / 4) {
            self.tree = KdTree::build(&self.points).ok();
        }
    }

    /// `(index, squared distance)` of the nearest point, lowest index on ties.
    pub fn nearest(&self, q: &Point) -> Option<(usize, f64)> {
        let indexed = self.indexed();
        let mut best = Best {
            d2: f64::INFINITY,
            index: usize::MAX,
        };
        if let Some(tree) = &self.tree {
            let (i, d2) = tree.nearest_d2(q);
            best.offer(d2, i);
        }
        for (i, p) in self.points.iter().enumerate().skip(indexed) {
            best.offer(p.dist2(q), i);
        }
        (best.index != usize::MAX).then_some((best.index, best.d2))
    }

    /// Ascending indices of all points within distance `r` of `q`.
    pub fn within_radius(&self, q: &Point, r: f64) -> Vec<usize> {
        let indexed = self.indexed();
        let r2 = r * r;
        let mut out = match &self.tree {
            Some(tree) => {
                let mut v = Vec::new();
                tree.radius_rec(0, tree.order.len(), 0, q, r2, &mut v);
                v.sort_unstable();
                v
            }
            None => Vec::new(),
        };
        out.extend(
            self.points
                .iter()
                .enumerate()
                .skip(indexed)
                .filter(|(_, p)| p.dist2(q) <= r2)
                .map(|(i, _)| i),
        );
        out
    }
}
