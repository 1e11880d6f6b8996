use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::geometry::{Point, Polyline};
use crate::planner::{check_query, sample_free, PlanConfig, PlanResult, Tree};
use crate::workspace::Workspace;

/// RRT* with choose-parent and rewiring inside a fixed radius. Always runs
/// `rrt_star_max_iter` iterations and returns the cheapest goal connection
/// found.
pub fn plan_rrt_star<W: Workspace + ?Sized>(
    ws: &W,
    start: &Point,
    goal: &Point,
    cfg: &PlanConfig,
) -> Result<PlanResult> {
    check_query(ws, start, goal, cfg)?;
    let clock = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let radius = cfg.rewire_radius();
    let mut tree = Tree::new(*start);
    let mut cost = vec![0.0f64];
    let mut children: Vec<Vec<usize>> = vec![Vec::new()];
    let mut goal_links: Vec<usize> = Vec::new();

    for _ in 0..cfg.rrt_star_max_iter {
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
        let neighbours = tree.within_radius(&new, radius);

        let mut parent = near;
        let mut best = cost[near] + origin.dist(&new);
        for &n in &neighbours {
            if n == near {
                continue;
            }
            let c = cost[n] + tree.node(n).dist(&new);
            if c < best && ws.segment_free(tree.node(n), &new) {
                parent = n;
                best = c;
            }
        }
        let idx = tree.push(new, parent);
        cost.push(best);
        children.push(Vec::new());
        children[parent].push(idx);

        for &n in &neighbours {
            if n == parent {
                continue;
            }
            let c = best + new.dist(tree.node(n));
            if c < cost[n] && ws.segment_free(&new, tree.node(n)) {
                let old = tree.parent(n).expect("root is never rewired");
                children[old].retain(|&k| k != n);
                children[idx].push(n);
                tree.set_parent(n, idx);
                let delta = cost[n] - c;
                let mut stack = vec![n];
                while let Some(k) = stack.pop() {
                    cost[k] -= delta;
                    stack.extend_from_slice(&children[k]);
                }
            }
        }

        if new.dist(goal) < cfg.step_size && ws.segment_free(&new, goal) {
            goal_links.push(idx);
        }
    }

    let best = goal_links
        .iter()
        .copied()
        .map(|i| (i, cost[i] + tree.node(i).dist(goal)))
        .fold(None, |acc: Option<(usize, f64)>, (i, c)| match acc {
            Some((_, bc)) if bc <= c => acc,
            _ => Some((i, c)),
        });
    let path = best.map(|(i, _)| {
        let mut pts = tree.backtrack(i);
        pts.reverse();
        pts.push(*goal);
        Polyline::new(pts).dedup()
    });
    Ok(PlanResult {
        path,
        nodes_total: tree.len(),
        tree_a: tree,
        tree_b: Tree::empty(),
        iterations_used: cfg.rrt_star_max_iter,
        wall_time: clock.elapsed(),
    })
}
