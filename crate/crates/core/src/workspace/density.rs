use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::kdtree::KdTree;

/// Safe distance as a fraction of the step size.
pub const DEFAULT_ALPHA: f64 = 0.75;
/// Step size as a multiple of the mean nearest-neighbour distance.
pub const DEFAULT_STEP_COEFF: f64 = 4.0;

/// Outcome of a point-cloud density analysis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub mean_nn_dist: f64,
    pub std_nn_dist: f64,
    pub step_size: f64,
    pub safe_dist: f64,
    pub alpha: f64,
}

/// Mean distance from each point to its nearest distinct neighbour (repeated
/// positions counted once), and the
/// step size / safe distance derived from it:
/// `step = step_coeff * mean`, `safe = alpha * step`.
pub fn analyze_density(cloud: &[Point], alpha: f64, step_coeff: f64) -> Result<DensityReport> {
    if cloud.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            found: cloud.len(),
        });
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!("alpha {alpha} not in (0, 1]")));
    }
    if !(step_coeff > 0.0 && step_coeff.is_finite()) {
        return Err(Error::InvalidParameter(format!("step coefficient {step_coeff}")));
    }
    // repeated positions would report zero neighbour distances
    let mut unique = cloud.to_vec();
    unique.sort_by(|a, b| {
        a.coords()
            .iter()
            .zip(b.coords())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    unique.dedup();
    if unique.len() < 2 {
        return Err(Error::InvalidParameter("all points coincide".into()));
    }
    let tree = KdTree::build(&unique)?;
    let dists: Vec<f64> = (0..unique.len())
        .map(|i| tree.nearest_excluding(&unique[i], i).map_or(0.0, |(_, d)| d))
        .collect();
    let n = dists.len() as f64;
    let mean = dists.iter().sum::<f64>() / n;
    let var = dists.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n;
    let step_size = step_coeff * mean;
    Ok(DensityReport {
        mean_nn_dist: mean,
        std_nn_dist: var.sqrt(),
        step_size,
        safe_dist: alpha * step_size,
        alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lattice(n: usize, spacing: f64) -> Vec<Point> {
        let mut v = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    v.push(Point::new3(
                        i as f64 * spacing,
                        j as f64 * spacing,
                        k as f64 * spacing,
                    ));
                }
            }
        }
        v
    }

    #[test]
    fn lattice_spacing_recovered() {
        let r = analyze_density(&lattice(8, 0.5), DEFAULT_ALPHA, DEFAULT_STEP_COEFF).unwrap();
        assert!((r.mean_nn_dist - 0.5).abs() < 0.025);
        assert!(r.std_nn_dist < 1e-9);
    }

    #[test]
    fn safe_distance_relation() {
        // spacing 0.5 with coefficient 4 gives Stp = 2, S = 1.5
        let r = analyze_density(&lattice(6, 0.5), 0.75, 4.0).unwrap();
        assert!((r.step_size - 2.0).abs() < 1e-12);
        assert!((r.safe_dist - 1.5).abs() < 1e-12);
        // spacing 0.2 gives Stp = 0.8, S = 0.6
        let r = analyze_density(&lattice(6, 0.2), 0.75, 4.0).unwrap();
        assert!((r.step_size - 0.8).abs() < 1e-9);
        assert!((r.safe_dist - 0.6).abs() < 1e-9);
        assert_eq!(r.safe_dist, r.alpha * r.step_size);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(analyze_density(&[Point::new3(0.0, 0.0, 0.0)], 0.75, 4.0).is_err());
        let two = [Point::new3(0.0, 0.0, 0.0), Point::new3(1.0, 0.0, 0.0)];
        assert!(analyze_density(&two, 0.0, 4.0).is_err());
        assert!(analyze_density(&two, 0.75, -1.0).is_err());
        let same = [Point::new3(1.0, 0.0, 0.0); 3];
        assert!(analyze_density(&same, 0.75, 4.0).is_err());
    }
}
