use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::geometry::{Point, Polyline};
use crate::planner::{check_query, sample_free, PlanConfig, PlanResult, Tree};
use crate::workspace::Workspace;

/// Single-tree RRT with uniform sampling. The goal is attached once a new
/// node lies within one step of it and can see it.
pub fn plan_rrt<W: Workspace + ?Sized>(
    ws: &W,
    start: &Point,
    goal: &Point,
    cfg: &PlanConfig,
) -> Result<PlanResult> {
    check_query(ws, start, goal, cfg)?;
    let clock = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut tree = Tree::new(*start);
    let mut path = None;
    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        iterations += 1;
        let sample = sample_free(ws, &mut rng)?;
        let (near, _) = tree.nearest(&sample);
        let origin = *tree.node(near);
        if origin == sample {
            continue;
        }
        let new = origin.steer(&sample, cfg.step_size);
        if !ws.segment_free(&origin, &new) {
            continue;
        }
        let idx = tree.push(new, near);
        if new.dist(goal) < cfg.step_size && ws.segment_free(&new, goal) {
            let g = if new == *goal { idx } else { tree.push(*goal, idx) };
            let mut pts = tree.backtrack(g);
            pts.reverse();
            path = Some(Polyline::new(pts));
            break;
        }
    }
    Ok(PlanResult {
        path,
        nodes_total: tree.len(),
        tree_a: tree,
        tree_b: Tree::empty(),
        iterations_used: iterations,
        wall_time: clock.elapsed(),
    })
}
