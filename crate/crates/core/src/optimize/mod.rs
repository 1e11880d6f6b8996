//! Post-processing of planner output: down-sample shortcutting, randomized
//! up-sample shortening and key-point spline smoothing.
//!
//! Each stage can be used on its own; [`optimize_path`] chains all three.

mod downsample;
mod smooth;
mod spline;
mod upsample;

pub use downsample::downsample;
pub use smooth::{kp_smooth, SmoothResult, DEFAULT_MAX_ROUNDS};
pub use spline::{fit_cubic_spline, SplinePath};
pub use upsample::upsample;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::Polyline;
use crate::seed::SeedMixer;
use crate::workspace::Workspace;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeConfig {
    pub upsample_iters: usize,
    pub sample_spacing: f64,
    pub max_rounds: usize,
    pub seed: u64,
}

impl OptimizeConfig {
    /// Defaults tied to a planner step size.
    pub fn for_step(step_size: f64, seed: u64) -> Self {
        OptimizeConfig {
            upsample_iters: 1000,
            sample_spacing: step_size / 2.0,
            max_rounds: DEFAULT_MAX_ROUNDS,
            seed,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Optimized {
    pub downsampled: Polyline,
    pub upsampled: Polyline,
    pub smooth: SmoothResult,
}

/// Cost summary of one optimized path.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageCosts {
    pub raw_cost: f64,
    pub downsample_cost: f64,
    pub upsample_cost: f64,
    pub smooth_length: f64,
}

impl Optimized {
    pub fn costs(&self, raw: &Polyline) -> StageCosts {
        StageCosts {
            raw_cost: raw.cost(),
            downsample_cost: self.downsampled.cost(),
            upsample_cost: self.upsampled.cost(),
            smooth_length: self.smooth.discretized.cost(),
        }
    }
}

pub fn optimize_path<W: Workspace + ?Sized>(raw: &Polyline, ws: &W, cfg: &OptimizeConfig) -> Result<Optimized> {
    let downsampled = downsample(raw, ws)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SeedMixer::new(cfg.seed).str("upsample").finish());
    let upsampled = upsample(&downsampled, ws, cfg.upsample_iters, &mut rng)?;
    let smooth = kp_smooth(&upsampled, ws, cfg.sample_spacing, cfg.max_rounds)?;
    Ok(Optimized {
        downsampled,
        upsampled,
        smooth,
    })
}
