//! Tree-based sampling planners.
//!
//! [`plan_bto_rrt`] grows a start tree that always aims at the goal and a
//! goal tree that always aims at the start tree's most recently added node.
//! [`plan_rrt`], [`plan_brrt`] and [`plan_rrt_star`] are the baselines it is
//! compared against.

mod bto;
mod rrt;
mod rrt_star;
mod tree;

pub use bto::{extend, plan_brrt, plan_bto_rrt, ExtendOutcome};
pub use rrt::plan_rrt;
pub use rrt_star::plan_rrt_star;
pub use tree::Tree;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Polyline};
use crate::workspace::Workspace;

/// Rejection-sampling attempts before free space is declared unsampleable.
pub const MAX_SAMPLE_ATTEMPTS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Rrt,
    Brrt,
    RrtStar,
    BtoRrt,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Rrt,
        Algorithm::Brrt,
        Algorithm::RrtStar,
        Algorithm::BtoRrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Rrt => "rrt",
            Algorithm::Brrt => "brrt",
            Algorithm::RrtStar => "rrt_star",
            Algorithm::BtoRrt => "bto_rrt",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanConfig {
    pub step_size: f64,
    pub max_iterations: usize,
    pub rng_seed: u64,
    /// Rewiring radius for RRT*; `None` means three step sizes.
    pub rrt_star_radius: Option<f64>,
    pub rrt_star_max_iter: usize,
}

impl Default for PlanConfig {
    fn default() -> Self {
        PlanConfig {
            step_size: 20.0,
            max_iterations: 5000,
            rng_seed: 0,
            rrt_star_radius: None,
            rrt_star_max_iter: 4000,
        }
    }
}

impl PlanConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn rewire_radius(&self) -> f64 {
        self.rrt_star_radius.unwrap_or(3.0 * self.step_size)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::InvalidParameter(format!("step size {}", self.step_size)));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("max iterations must be positive".into()));
        }
        if self.rrt_star_max_iter == 0 {
            return Err(Error::InvalidParameter("RRT* iterations must be positive".into()));
        }
        if let Some(r) = self.rrt_star_radius {
            if r.is_nan() || r <= 0.0 {
                return Err(Error::InvalidParameter(format!("rewiring radius {r}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct PlanResult {
    pub path: Option<Polyline>,
    pub tree_a: Tree,
    /// Goal-rooted tree; empty for single-tree planners.
    pub tree_b: Tree,
    pub iterations_used: usize,
    pub nodes_total: usize,
    pub wall_time: Duration,
}

impl PlanResult {
    pub fn cost(&self) -> Option<f64> {
        self.path.as_ref().map(Polyline::cost)
    }
}

pub fn plan<W: Workspace + ?Sized>(
    algorithm: Algorithm,
    ws: &W,
    start: &Point,
    goal: &Point,
    cfg: &PlanConfig,
) -> Result<PlanResult> {
    match algorithm {
        Algorithm::Rrt => plan_rrt(ws, start, goal, cfg),
        Algorithm::Brrt => plan_brrt(ws, start, goal, cfg),
        Algorithm::RrtStar => plan_rrt_star(ws, start, goal, cfg),
        Algorithm::BtoRrt => plan_bto_rrt(ws, start, goal, cfg),
    }
}

fn check_query<W: Workspace + ?Sized>(ws: &W, start: &Point, goal: &Point, cfg: &PlanConfig) -> Result<()> {
    cfg.validate()?;
    for p in [start, goal] {
        if p.dim() != ws.dim() {
            return Err(Error::DimensionMismatch {
                expected: ws.dim(),
                found: p.dim(),
            });
        }
    }
    if !ws.point_free(start) {
        return Err(Error::StartInCollision);
    }
    if !ws.point_free(goal) {
        return Err(Error::GoalInCollision);
    }
    if start == goal {
        return Err(Error::StartEqualsGoal);
    }
    Ok(())
}

/// Uniform sample over the workspace bounds, rejecting occupied points.
pub fn sample_free<W: Workspace + ?Sized, R: Rng + ?Sized>(ws: &W, rng: &mut R) -> Result<Point> {
    let b = ws.bounds();
    for _ in 0..MAX_SAMPLE_ATTEMPTS {
        let mut p = b.min;
        for k in 0..b.dim() {
            let (lo, hi) = (b.min.coord(k), b.max.coord(k));
            let v = if hi > lo { rng.gen_range(lo..hi) } else { lo };
            p = p.with_coord(k, v);
        }
        if ws.point_free(&p) {
            return Ok(p);
        }
    }
    Err(Error::FreeSpaceNotSampleable)
}
