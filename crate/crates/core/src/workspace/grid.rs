use crate::error::{Error, Result};
use crate::geometry::{Aabb, Point};
use crate::workspace::Workspace;

/// 2D occupancy grid. Cell `(col, row)` covers the half-open square
/// `[col, col + 1) x [row, row + 1)` scaled by `resolution`; row 0 is the
/// top row of the source image.
#[derive(Clone, Debug, PartialEq)]
pub struct GridMap {
    width: usize,
    height: usize,
    resolution: f64,
    occupied: Vec<bool>,
}

impl GridMap {
    pub fn new(width: usize, height: usize, occupied: Vec<bool>) -> Result<Self> {
        Self::with_resolution(width, height, 1.0, occupied)
    }

    pub fn with_resolution(
        width: usize,
        height: usize,
        resolution: f64,
        occupied: Vec<bool>,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidMap("zero-size map".into()));
        }
        if occupied.len() != width * height {
            return Err(Error::InvalidMap(format!(
                "occupancy has {} cells, expected {}x{}",
                occupied.len(),
                width,
                height
            )));
        }
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(Error::InvalidParameter(format!("resolution {resolution}")));
        }
        Ok(GridMap {
            width,
            height,
            resolution,
            occupied,
        })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        GridMap {
            width,
            height,
            resolution: 1.0,
            occupied: vec![false; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn cells(&self) -> &[bool] {
        &self.occupied
    }

    /// Occupancy of a cell; anything outside the grid counts as occupied.
    #[inline]
    pub fn is_occupied(&self, col: i64, row: i64) -> bool {
        if col < 0 || row < 0 || col >= self.width as i64 || row >= self.height as i64 {
            return true;
        }
        self.occupied[row as usize * self.width + col as usize]
    }

    pub fn set(&mut self, col: usize, row: usize, occupied: bool) {
        self.occupied[row * self.width + col] = occupied;
    }

    pub fn occupied_count(&self) -> usize {
        self.occupied.iter().filter(|&&o| o).count()
    }

    pub fn obstacle_fraction(&self) -> f64 {
        self.occupied_count() as f64 / self.occupied.len() as f64
    }

    /// Cell containing a point in map units.
    #[inline]
    pub fn cell_of(&self, p: &Point) -> (i64, i64) {
        (
            (p.x() / self.resolution).floor() as i64,
            (p.y() / self.resolution).floor() as i64,
        )
    }

    /// Every cell touched by the segment `p`-`q`, column by column.
    ///
    /// A cell is touched if it contains a point of the segment; a segment
    /// passing exactly through a cell corner also touches both cells sharing
    /// that corner, so diagonal moves cannot slip between two occupied cells.
    /// The visitor returns `false` to stop early.
    pub fn supercover(&self, p: &Point, q: &Point, mut visit: impl FnMut(i64, i64) -> bool) {
        let r = self.resolution;
        let (mut x0, mut y0, mut x1, mut y1) = (p.x() / r, p.y() / r, q.x() / r, q.y() / r);
        if x1 < x0 {
            std::mem::swap(&mut x0, &mut x1);
            std::mem::swap(&mut y0, &mut y1);
        }
        let c0 = x0.floor() as i64;
        let c1 = x1.floor() as i64;
        let dx = x1 - x0;
        let y_at = |x: f64| {
            if dx == 0.0 {
                None
            } else if x == x1 {
                Some(y1)
            } else {
                Some(y0 + (y1 - y0) * ((x - x0) / dx))
            }
        };
        for col in c0..=c1 {
            let xa = x0.max(col as f64);
            let xb = x1.min((col + 1) as f64);
            let (ya, yb) = match (y_at(xa), y_at(xb)) {
                (Some(a), Some(b)) => (a, b),
                _ => (y0, y1),
            };
            let mut r0 = ya.min(yb).floor() as i64;
            let r1 = ya.max(yb).floor() as i64;
            // exact lattice-corner crossing by a sloped segment
            let sloped = dx != 0.0 && y1 != y0;
            let at_corner = |x: f64, y: f64| x.fract() == 0.0 && y.fract() == 0.0 && x > x0 && x < x1;
            if sloped && (at_corner(xa, ya) || at_corner(xb, yb)) {
                let corner_row = if at_corner(xa, ya) { ya } else { yb } as i64;
                r0 = r0.min(corner_row - 1);
            }
            for row in r0..=r1 {
                if !visit(col, row) {
                    return;
                }
            }
        }
    }
}

impl Workspace for GridMap {
    fn dim(&self) -> usize {
        2
    }

    fn bounds(&self) -> Aabb {
        Aabb::new(
            Point::new2(0.0, 0.0),
            Point::new2(
                self.width as f64 * self.resolution,
                self.height as f64 * self.resolution,
            ),
        )
    }

    fn point_free(&self, p: &Point) -> bool {
        if !p.is_finite() {
            return false;
        }
        let (c, r) = self.cell_of(p);
        !self.is_occupied(c, r)
    }

    fn segment_free(&self, p: &Point, q: &Point) -> bool {
        // the grid is convex, so in-bounds endpoints keep the traversal bounded
        if !self.point_free(p) || !self.point_free(q) {
            return false;
        }
        let mut free = true;
        self.supercover(p, q, |c, r| {
            free = !self.is_occupied(c, r);
            free
        });
        free
    }
}
