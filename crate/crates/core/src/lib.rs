//! Sampling-based motion planning over occupancy grids and point clouds.
//!
//! The crate is organised bottom-up:
//!
//! * [`kdtree`]: immutable k-d tree with exact nearest / radius queries.
//! * [`workspace`]: grid maps, point-cloud maps, loaders, procedural map
//!   generators and point-cloud density analysis.
//! * [`planner`]: the bidirectional target-oriented planner plus RRT,
//!   bidirectional RRT and RRT* baselines.
//! * [`optimize`]: down-sample shortcutting, randomized up-sample
//!   shortening and collision-aware key-point spline smoothing.
//! * [`bench`]: multi-seed benchmark harness and summary statistics.
//! * [`render`]: SVG output of maps, trees and trajectories.

pub mod bench;
pub mod error;
pub mod geometry;
pub mod kdtree;
pub mod optimize;
pub mod planner;
pub mod render;
pub mod seed;
pub mod workspace;

pub use error::{Error, Result};
pub use geometry::{Aabb, Point, Polyline};
pub use kdtree::KdTree;
pub use planner::{Algorithm, PlanConfig, PlanResult, Tree};
pub use workspace::{CloudMap, DensityReport, GridMap, Map, Workspace};
