//! Collision-queryable environments.

mod cloud;
mod density;
pub mod generate;
mod grid;
pub mod io;

pub use cloud::CloudMap;
pub use density::{analyze_density, DensityReport, DEFAULT_ALPHA, DEFAULT_STEP_COEFF};
pub use generate::{generate_map, Archetype, GenParams, GeneratedMap};
pub use grid::GridMap;

use crate::geometry::{Aabb, Point};

/// Point and segment collision queries over an immutable environment.
pub trait Workspace: Sync {
    fn dim(&self) -> usize;

    /// Sampling region. Points outside it are never free.
    fn bounds(&self) -> Aabb;

    fn point_free(&self, p: &Point) -> bool;

    fn segment_free(&self, p: &Point, q: &Point) -> bool;
}

/// Either kind of map, as loaded from disk or generated.
#[derive(Clone, Debug)]
pub enum Map {
    Grid(GridMap),
    Cloud(CloudMap),
}

impl Map {
    pub fn as_grid(&self) -> Option<&GridMap> {
        match self {
            Map::Grid(g) => Some(g),
            Map::Cloud(_) => None,
        }
    }

    pub fn as_cloud(&self) -> Option<&CloudMap> {
        match self {
            Map::Cloud(c) => Some(c),
            Map::Grid(_) => None,
        }
    }
}

impl Workspace for Map {
    fn dim(&self) -> usize {
        match self {
            Map::Grid(g) => g.dim(),
            Map::Cloud(c) => c.dim(),
        }
    }

    fn bounds(&self) -> Aabb {
        match self {
            Map::Grid(g) => g.bounds(),
            Map::Cloud(c) => c.bounds(),
        }
    }

    fn point_free(&self, p: &Point) -> bool {
        match self {
            Map::Grid(g) => g.point_free(p),
            Map::Cloud(c) => c.point_free(p),
        }
    }

    fn segment_free(&self, p: &Point, q: &Point) -> bool {
        match self {
            Map::Grid(g) => g.segment_free(p, q),
            Map::Cloud(c) => c.segment_free(p, q),
        }
    }
}

impl From<GridMap> for Map {
    fn from(g: GridMap) -> Self {
        Map::Grid(g)
    }
}

impl From<CloudMap> for Map {
    fn from(c: CloudMap) -> Self {
        Map::Cloud(c)
    }
}

impl<W: Workspace + ?Sized> Workspace for &W {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn bounds(&self) -> Aabb {
        (**self).bounds()
    }
    fn point_free(&self, p: &Point) -> bool {
        (**self).point_free(p)
    }
    fn segment_free(&self, p: &Point, q: &Point) -> bool {
        (**self).segment_free(p, q)
    }
}
