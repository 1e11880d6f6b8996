//! Multi-seed benchmark harness.
//!
//! Every (map, algorithm, trial) triple gets its own RNG stream, so trials
//! can run in parallel and records come out in the same order regardless of
//! scheduling.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::optimize::{optimize_path, OptimizeConfig};
use crate::planner::{plan, Algorithm, PlanConfig};
use crate::seed::SeedMixer;
use crate::workspace::{generate_map, Archetype, GenParams, Map};

pub struct BenchMap {
    pub id: String,
    pub map: Map,
    pub start: Point,
    pub goal: Point,
}

impl BenchMap {
    /// Generated archetype map, identified as `archetype@seed`.
    pub fn generated(archetype: Archetype, seed: u64, params: &GenParams) -> Result<Self> {
        let g = generate_map(archetype, seed, params)?;
        Ok(BenchMap {
            id: format!("{archetype}@{seed}"),
            map: Map::Grid(g.map),
            start: g.start,
            goal: g.goal,
        })
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub plan: PlanConfig,
    pub trials: usize,
    pub upsample_iters: usize,
    /// Run the optimization pipeline for every algorithm, not only BTO-RRT.
    pub optimize_all: bool,
    /// Record wall time; when off, `wall_time_ms` is 0 so output is
    /// reproducible byte for byte.
    pub timing: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            plan: PlanConfig::default(),
            trials: 100,
            upsample_iters: 1000,
            optimize_all: false,
            timing: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub algorithm: Algorithm,
    pub map_id: String,
    pub seed: u64,
    pub success: bool,
    pub raw_cost: Option<f64>,
    pub downsample_cost: Option<f64>,
    pub upsample_cost: Option<f64>,
    pub smooth_length: Option<f64>,
    pub nodes_total: usize,
    pub wall_time_ms: f64,
    pub iterations_used: usize,
}

impl TrialRecord {
    /// Cost after the last polyline stage that ran.
    pub fn best_cost(&self) -> Option<f64> {
        self.upsample_cost.or(self.raw_cost)
    }
}

pub fn trial_seed(base: u64, map_id: &str, algorithm: Algorithm, trial: usize) -> u64 {
    SeedMixer::new(base)
        .str(map_id)
        .str(algorithm.name())
        .u64(trial as u64)
        .finish()
}

fn run_trial(m: &BenchMap, algorithm: Algorithm, trial: usize, cfg: &BenchConfig) -> Result<TrialRecord> {
    let seed = trial_seed(cfg.plan.rng_seed, &m.id, algorithm, trial);
    let plan_cfg = cfg.plan.clone().with_seed(seed);
    let clock = Instant::now();
    let named = |e: Error| Error::InvalidMap(format!("map `{}`: {e}", m.id));
    let result = plan(algorithm, &m.map, &m.start, &m.goal, &plan_cfg).map_err(named)?;
    let mut rec = TrialRecord {
        algorithm,
        map_id: m.id.clone(),
        seed,
        success: result.path.is_some(),
        raw_cost: result.cost(),
        downsample_cost: None,
        upsample_cost: None,
        smooth_length: None,
        nodes_total: result.nodes_total,
        wall_time_ms: 0.0,
        iterations_used: result.iterations_used,
    };
    if let Some(path) = &result.path {
        if algorithm == Algorithm::BtoRrt || cfg.optimize_all {
            let mut ocfg = OptimizeConfig::for_step(plan_cfg.step_size, seed);
            ocfg.upsample_iters = cfg.upsample_iters;
            let out = optimize_path(path, &m.map, &ocfg).map_err(named)?;
            let costs = out.costs(path);
            rec.downsample_cost = Some(costs.downsample_cost);
            rec.upsample_cost = Some(costs.upsample_cost);
            rec.smooth_length = Some(costs.smooth_length);
        }
    }
    if cfg.timing {
        rec.wall_time_ms = clock.elapsed().as_secs_f64() * 1e3;
    }
    Ok(rec)
}

/// Runs every trial and returns the records in canonical order (by map id,
/// then algorithm, then trial index) together with their summary.
pub fn run_benchmark(
    maps: &[BenchMap],
    algorithms: &[Algorithm],
    cfg: &BenchConfig,
) -> Result<(Vec<TrialRecord>, BenchSummary)> {
    if cfg.trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let mut order: Vec<&BenchMap> = maps.iter().collect();
    order.sort_by(|a, b| a.id.cmp(&b.id));
    let mut algos = algorithms.to_vec();
    algos.sort();
    algos.dedup();
    let jobs: Vec<(&BenchMap, Algorithm, usize)> = order
        .iter()
        .flat_map(|m| algos.iter().flat_map(move |&a| (0..cfg.trials).map(move |t| (*m, a, t))))
        .collect();
    let records = jobs
        .par_iter()
        .map(|&(m, a, t)| run_trial(m, a, t, cfg))
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(&records);
    Ok((records, summary))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub count: usize,
    pub median: f64,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Option<Stats> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let median = if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) };
        let mean = v.iter().sum::<f64>() / n as f64;
        let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        Some(Stats {
            count: n,
            median,
            mean,
            std: var.sqrt(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub algorithm: Algorithm,
    pub map_id: String,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Cost statistics cover successful trials only.
    pub raw_cost: Option<Stats>,
    pub downsample_cost: Option<Stats>,
    pub upsample_cost: Option<Stats>,
    pub smooth_length: Option<Stats>,
    pub nodes_total: Stats,
    pub wall_time_ms: Stats,
    pub iterations_used: Stats,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub groups: Vec<GroupSummary>,
}

impl BenchSummary {
    pub fn group(&self, algorithm: Algorithm, map_id: &str) -> Option<&GroupSummary> {
        self.groups
            .iter()
            .find(|g| g.algorithm == algorithm && g.map_id == map_id)
    }
}

/// Aggregates records per (map, algorithm). A pure function of the records.
pub fn summarize(records: &[TrialRecord]) -> BenchSummary {
    let mut groups: BTreeMap<(&str, Algorithm), Vec<&TrialRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((&r.map_id, r.algorithm)).or_default().push(r);
    }
    let groups = groups
        .into_iter()
        .map(|((map_id, algorithm), rs)| {
            let opt = |f: fn(&TrialRecord) -> Option<f64>| {
                Stats::of(&rs.iter().filter(|r| r.success).filter_map(|r| f(r)).collect::<Vec<_>>())
            };
            let all = |f: fn(&TrialRecord) -> f64| {
                Stats::of(&rs.iter().map(|r| f(r)).collect::<Vec<_>>()).expect("group is non-empty")
            };
            let successes = rs.iter().filter(|r| r.success).count();
            GroupSummary {
                algorithm,
                map_id: map_id.to_string(),
                trials: rs.len(),
                successes,
                success_rate: successes as f64 / rs.len() as f64,
                raw_cost: opt(|r| r.raw_cost),
                downsample_cost: opt(|r| r.downsample_cost),
                upsample_cost: opt(|r| r.upsample_cost),
                smooth_length: opt(|r| r.smooth_length),
                nodes_total: all(|r| r.nodes_total as f64),
                wall_time_ms: all(|r| r.wall_time_ms),
                iterations_used: all(|r| r.iterations_used as f64),
            }
        })
        .collect();
    BenchSummary { groups }
}

pub fn write_records_to<W: Write>(w: W, records: &[TrialRecord]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for r in records {
        wtr.serialize(r)?;
    }
    wtr.flush().map_err(|e| Error::io("<records>", e))?;
    Ok(())
}

pub fn read_records_from<R: Read>(r: R) -> Result<Vec<TrialRecord>> {
    csv::Reader::from_reader(r)
        .deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

pub fn write_records(path: impl AsRef<Path>, records: &[TrialRecord]) -> Result<()> {
    let path = path.as_ref();
    let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_records_to(std::io::BufWriter::new(f), records)
}

pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<TrialRecord>> {
    let path = path.as_ref();
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_records_from(std::io::BufReader::new(f))
}

pub fn write_summary(path: impl AsRef<Path>, summary: &BenchSummary) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(summary)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workspace::GridMap;

    fn empty_map() -> BenchMap {
        BenchMap {
            id: "empty".into(),
            map: Map::Grid(GridMap::empty(100, 100)),
            start: Point::new2(5.0, 5.0),
            goal: Point::new2(95.0, 95.0),
        }
    }

    fn cfg(trials: usize) -> BenchConfig {
        BenchConfig {
            plan: PlanConfig {
                step_size: 10.0,
                rrt_star_max_iter: 300,
                rng_seed: 11,
                ..PlanConfig::default()
            },
            trials,
            upsample_iters: 50,
            timing: false,
            ..BenchConfig::default()
        }
    }

    #[test]
    fn trials_have_distinct_seeds_and_repeat() {
        let maps = [empty_map()];
        let (a, _) = run_benchmark(&maps, &[Algorithm::BtoRrt], &cfg(5)).unwrap();
        let (b, _) = run_benchmark(&maps, &[Algorithm::BtoRrt], &cfg(5)).unwrap();
        assert_eq!(a.len(), 5);
        assert_eq!(a, b);
        let mut seeds: Vec<u64> = a.iter().map(|r| r.seed).collect();
        seeds.sort();
        seeds.dedup();
        assert_eq!(seeds.len(), 5);
        for r in &a {
            let (raw, down, up) = (r.raw_cost.unwrap(), r.downsample_cost.unwrap(), r.upsample_cost.unwrap());
            assert!(up <= down + 1e-9 && down <= raw + 1e-9);
        }
    }

    #[test]
    fn baselines_skip_optimization() {
        let (recs, summary) = run_benchmark(&[empty_map()], &Algorithm::ALL, &cfg(2)).unwrap();
        assert_eq!(recs.len(), 8);
        for r in recs.iter().filter(|r| r.algorithm != Algorithm::BtoRrt) {
            assert!(r.downsample_cost.is_none());
        }
        assert_eq!(summary.groups.len(), 4);
    }

    #[test]
    fn csv_round_trip() {
        let (recs, _) = run_benchmark(&[empty_map()], &Algorithm::ALL, &cfg(3)).unwrap();
        let mut failed = recs[0].clone();
        failed.success = false;
        failed.raw_cost = None;
        failed.downsample_cost = None;
        failed.upsample_cost = None;
        failed.smooth_length = None;
        failed.wall_time_ms = 1.0 / 3.0;
        let mut all = recs.clone();
        all.push(failed);
        let mut buf = Vec::new();
        write_records_to(&mut buf, &all).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "algorithm,map_id,seed,success,raw_cost,downsample_cost,upsample_cost,smooth_length,nodes_total,wall_time_ms,iterations_used\n"
        ));
        assert_eq!(read_records_from(buf.as_slice()).unwrap(), all);
    }

    #[test]
    fn stats_basic() {
        let s = Stats::of(&[4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!(s.median, 2.5);
        assert_eq!(s.mean, 2.5);
        assert!((s.std - 1.25f64.sqrt()).abs() < 1e-12);
        assert!(Stats::of(&[]).is_none());
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(run_benchmark(&[empty_map()], &[Algorithm::Rrt], &cfg(0)).is_err());
    }
}
