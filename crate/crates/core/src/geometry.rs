//! Points, boxes and polylines in 2D or 3D map units.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A 2D or 3D coordinate. Unused trailing coordinates are kept at zero so
/// distances can always be computed over three components.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    xyz: [f64; 3],
    dim: u8,
}

impl Point {
    pub const fn new2(x: f64, y: f64) -> Self {
        Point {
            xyz: [x, y, 0.0],
            dim: 2,
        }
    }

    pub const fn new3(x: f64, y: f64, z: f64) -> Self {
        Point {
            xyz: [x, y, z],
            dim: 3,
        }
    }

    pub fn from_slice(c: &[f64]) -> Result<Self> {
        match *c {
            [x, y] => Ok(Point::new2(x, y)),
            [x, y, z] => Ok(Point::new3(x, y, z)),
            _ => Err(Error::UnsupportedDimension(c.len())),
        }
    }

    pub fn origin(dim: usize) -> Self {
        Point {
            xyz: [0.0; 3],
            dim: dim as u8,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.xyz[0]
    }

    #[inline]
    pub fn y(&self) -> f64 {
        self.xyz[1]
    }

    #[inline]
    pub fn z(&self) -> f64 {
        self.xyz[2]
    }

    #[inline]
    pub fn coord(&self, axis: usize) -> f64 {
        self.xyz[axis]
    }

    /// The meaningful coordinates (length 2 or 3).
    pub fn coords(&self) -> &[f64] {
        &self.xyz[..self.dim()]
    }

    pub fn with_coord(mut self, axis: usize, value: f64) -> Self {
        self.xyz[axis] = value;
        self
    }

    #[inline]
    pub fn dist2(&self, other: &Point) -> f64 {
        let dx = self.xyz[0] - other.xyz[0];
        let dy = self.xyz[1] - other.xyz[1];
        let dz = self.xyz[2] - other.xyz[2];
        dx * dx + dy * dy + dz * dz
    }

    #[inline]
    pub fn dist(&self, other: &Point) -> f64 {
        self.dist2(other).sqrt()
    }

    pub fn norm(&self) -> f64 {
        self.dist2(&Point::origin(self.dim()))
            .sqrt()
    }

    /// Linear interpolation: `(1 - t) * self + t * other`.
    pub fn lerp(&self, other: &Point, t: f64) -> Point {
        let mut out = *self;
        for k in 0..3 {
            out.xyz[k] = (1.0 - t) * self.xyz[k] + t * other.xyz[k];
        }
        out
    }

    /// Point at distance `step` from `self` towards `target`, or `target`
    /// itself when it is closer than `step`.
    pub fn steer(&self, target: &Point, step: f64) -> Point {
        let d = self.dist(target);
        if d <= step {
            *target
        } else {
            self.lerp(target, step / d)
        }
    }

    pub fn midpoint(&self, other: &Point) -> Point {
        self.lerp(other, 0.5)
    }

    pub fn is_finite(&self) -> bool {
        self.xyz.iter().all(|c| c.is_finite())
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.coords().iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.coords().iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Point {
    type Err = Error;

    /// Parses `x,y` or `x,y,z`.
    fn from_str(s: &str) -> Result<Self> {
        let coords = s
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::InvalidParameter(format!("bad point `{s}`: {e}")))?;
        Point::from_slice(&coords)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(mut self, rhs: Point) -> Point {
        for k in 0..3 {
            self.xyz[k] += rhs.xyz[k];
        }
        self
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(mut self, rhs: Point) -> Point {
        for k in 0..3 {
            self.xyz[k] -= rhs.xyz[k];
        }
        self
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(mut self, rhs: f64) -> Point {
        for c in &mut self.xyz {
            *c *= rhs;
        }
        self
    }
}

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Point,
    pub max: Point,
}

impl Aabb {
    pub fn new(min: Point, max: Point) -> Self {
        Aabb { min, max }
    }

    pub fn from_points(points: &[Point]) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyPointSet)?;
        let mut min = *first;
        let mut max = *first;
        for p in points {
            if p.dim() != first.dim() {
                return Err(Error::DimensionMismatch {
                    expected: first.dim(),
                    found: p.dim(),
                });
            }
            for k in 0..p.dim() {
                min.xyz[k] = min.xyz[k].min(p.xyz[k]);
                max.xyz[k] = max.xyz[k].max(p.xyz[k]);
            }
        }
        Ok(Aabb { min, max })
    }

    pub fn dim(&self) -> usize {
        self.min.dim()
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.max.coord(axis) - self.min.coord(axis)
    }

    pub fn contains(&self, p: &Point) -> bool {
        (0..self.dim()).all(|k| p.coord(k) >= self.min.coord(k) && p.coord(k) <= self.max.coord(k))
    }
}

/// Ordered waypoint sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub points: Vec<Point>,
}

impl Polyline {
    pub fn new(points: Vec<Point>) -> Self {
        Polyline { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> Option<&Point> {
        self.points.first()
    }

    pub fn last(&self) -> Option<&Point> {
        self.points.last()
    }

    /// Sum of segment lengths.
    pub fn cost(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].dist(&w[1])).sum()
    }

    /// Cumulative arc length at each waypoint; the first entry is 0.
    pub fn cumulative(&self) -> Vec<f64> {
        Polyline::cumulative_of(&self.points)
    }

    pub fn cumulative_of(points: &[Point]) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if i > 0 {
                acc += points[i - 1].dist(p);
            }
            out.push(acc);
        }
        out
    }

    pub fn segments(&self) -> impl Iterator<Item = (&Point, &Point)> {
        self.points.windows(2).map(|w| (&w[0], &w[1]))
    }

    /// Drops consecutive duplicate waypoints.
    pub fn dedup(mut self) -> Self {
        self.points.dedup();
        self
    }
}

impl From<Vec<Point>> for Polyline {
    fn from(points: Vec<Point>) -> Self {
        Polyline { points }
    }
}
