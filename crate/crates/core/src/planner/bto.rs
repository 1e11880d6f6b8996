use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::geometry::{Point, Polyline};
use crate::planner::{check_query, sample_free, PlanConfig, PlanResult, Tree};
use crate::workspace::Workspace;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtendOutcome {
    /// Index of the node added, if the steered edge was collision-free.
    pub added: Option<usize>,
    /// A node was added within one step of the target.
    pub reached: bool,
}

/// One target-oriented extension step.
///
/// If the tree node nearest to `target` can see it, the tree steers straight
/// at the target. Otherwise a uniform free sample is drawn and the tree
/// steers from the node nearest to that sample. The new node is kept only if
/// the edge to it is collision-free.
pub fn extend<W: Workspace + ?Sized, R: Rng + ?Sized>(
    tree: &mut Tree,
    target: &Point,
    ws: &W,
    cfg: &PlanConfig,
    rng: &mut R,
) -> Result<ExtendOutcome> {
    let step = cfg.step_size;
    let (nearest, _) = tree.nearest(target);
    let (from, sample) = if ws.segment_free(tree.node(nearest), target) {
        (nearest, *target)
    } else {
        let s = sample_free(ws, rng)?;
        (tree.nearest(&s).0, s)
    };
    let origin = *tree.node(from);
    let none = ExtendOutcome {
        added: None,
        reached: false,
    };
    if origin == sample {
        return Ok(none);
    }
    let new = origin.steer(&sample, step);
    if !ws.segment_free(&origin, &new) {
        return Ok(none);
    }
    let idx = tree.push(new, from);
    Ok(ExtendOutcome {
        added: Some(idx),
        reached: new.dist(target) < step,
    })
}

/// Joins a start-tree branch and a goal-tree branch into one start-to-goal
/// polyline.
fn join(tree_a: &Tree, a: usize, tree_b: &Tree, b: usize) -> Polyline {
    let mut pts = tree_a.backtrack(a);
    pts.reverse();
    pts.extend(tree_b.backtrack(b));
    Polyline::new(pts).dedup()
}

/// Bidirectional target-oriented RRT.
pub fn plan_bto_rrt<W: Workspace + ?Sized>(
    ws: &W,
    start: &Point,
    goal: &Point,
    cfg: &PlanConfig,
) -> Result<PlanResult> {
    check_query(ws, start, goal, cfg)?;
    let clock = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut tree_a = Tree::new(*start);
    let mut tree_b = Tree::new(*goal);
    let mut path = None;
    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        iterations += 1;
        extend(&mut tree_a, goal, ws, cfg, &mut rng)?;
        let target = *tree_a.newest_point();
        let out = extend(&mut tree_b, &target, ws, cfg, &mut rng)?;
        if out.reached && ws.segment_free(tree_b.newest_point(), &target) {
            path = Some(join(&tree_a, tree_a.newest(), &tree_b, tree_b.newest()));
            break;
        }
    }
    Ok(PlanResult {
        path,
        nodes_total: tree_a.len() + tree_b.len(),
        tree_a,
        tree_b,
        iterations_used: iterations,
        wall_time: clock.elapsed(),
    })
}

/// Bidirectional RRT: each tree aims at the other tree's root and a
/// connection is made as soon as a new node is within one step of, and can
/// see, the nearest node of the other tree.
pub fn plan_brrt<W: Workspace + ?Sized>(
    ws: &W,
    start: &Point,
    goal: &Point,
    cfg: &PlanConfig,
) -> Result<PlanResult> {
    check_query(ws, start, goal, cfg)?;
    let clock = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut tree_a = Tree::new(*start);
    let mut tree_b = Tree::new(*goal);
    let mut path = None;
    let mut iterations = 0;

    let try_connect = |from: &Tree, new: usize, other: &Tree| -> Option<usize> {
        let p = from.node(new);
        let (j, d) = other.nearest(p);
        (d < cfg.step_size && ws.segment_free(p, other.node(j))).then_some(j)
    };

    while iterations < cfg.max_iterations {
        iterations += 1;
        if let Some(new) = extend(&mut tree_a, goal, ws, cfg, &mut rng)?.added {
            if let Some(j) = try_connect(&tree_a, new, &tree_b) {
                path = Some(join(&tree_a, new, &tree_b, j));
                break;
            }
        }
        if let Some(new) = extend(&mut tree_b, start, ws, cfg, &mut rng)?.added {
            if let Some(j) = try_connect(&tree_b, new, &tree_a) {
                path = Some(join(&tree_a, j, &tree_b, new));
                break;
            }
        }
    }
    Ok(PlanResult {
        path,
        nodes_total: tree_a.len() + tree_b.len(),
        tree_a,
        tree_b,
        iterations_used: iterations,
        wall_time: clock.elapsed(),
    })
}
