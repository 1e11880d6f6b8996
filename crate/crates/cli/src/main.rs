use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use btorrt::bench::{read_records, run_benchmark, summarize, write_records, write_records_to, write_summary, BenchConfig, BenchMap};
use btorrt::optimize::{optimize_path, OptimizeConfig, Optimized};
use btorrt::planner::{plan, Algorithm, PlanConfig, PlanResult};
use btorrt::render::{render_svg, Scene, Stage};
use btorrt::workspace::io::{is_cloud_path, load_cloud, load_grid, write_grid, DEFAULT_OCC_THRESHOLD};
use btorrt::workspace::{analyze_density, generate_map, Archetype, CloudMap, GenParams, Map, DEFAULT_ALPHA, DEFAULT_STEP_COEFF};
use btorrt::Point;

#[derive(Parser)]
#[command(name = "btorrt", version, about = "Sampling-based path planning with path optimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan and optimize one path; writes the smoothed trajectory as CSV.
    Plan(PlanArgs),
    /// Plan like `plan` and write an SVG of map, trees and path stages.
    Render(PlanArgs),
    /// Run trials over maps and algorithms; writes per-trial records.
    Bench(BenchArgs),
    /// Report nearest-neighbour density, step size and safe distance of a cloud.
    Analyze(AnalyzeArgs),
    /// Generate a test map.
    Genmap(GenmapArgs),
}

#[derive(Args, Clone)]
struct MapArgs {
    /// Grid (pgm/png/txt), cloud (ply/pcd/csv/xyz) or `archetype@seed`.
    #[arg(long)]
    map: String,
    /// Image pixels darker than this are obstacles.
    #[arg(long, default_value_t = DEFAULT_OCC_THRESHOLD)]
    threshold: u8,
    /// Safe distance as a fraction of the step size (clouds).
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Step size as a multiple of the mean neighbour distance (clouds).
    #[arg(long, default_value_t = DEFAULT_STEP_COEFF)]
    step_coeff: f64,
}

#[derive(Args, Clone)]
struct PlannerArgs {
    #[arg(long, default_value = "bto_rrt")]
    algo: Algorithm,
    /// Step size; clouds default to the density-derived value, grids to 20.
    #[arg(long)]
    step: Option<f64>,
    #[arg(long, default_value_t = 5000)]
    max_iter: usize,
    #[arg(long, default_value_t = 4000)]
    rrt_star_iter: usize,
    #[arg(long)]
    rrt_star_radius: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    upsample_iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct PlanArgs {
    #[command(flatten)]
    map: MapArgs,
    #[command(flatten)]
    planner: PlannerArgs,
    #[arg(long)]
    start: Option<Point>,
    #[arg(long)]
    goal: Option<Point>,
    /// Output file (trajectory CSV for `plan`, SVG for `render`); stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON summary destination; stderr if absent.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Also write an SVG (plan only).
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated map files, directories, or `archetype@seed` entries.
    #[arg(long, value_delimiter = ',', required = true)]
    maps: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "rrt,brrt,rrt_star,bto_rrt")]
    algos: Vec<Algorithm>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 20.0)]
    step: f64,
    #[arg(long, default_value_t = 5000)]
    max_iter: usize,
    #[arg(long, default_value_t = 4000)]
    rrt_star_iter: usize,
    #[arg(long, default_value_t = 1000)]
    upsample_iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_OCC_THRESHOLD)]
    threshold: u8,
    /// Optimize paths of every algorithm, not only bto_rrt.
    #[arg(long)]
    optimize_all: bool,
    /// Record 0 for wall time so output is reproducible.
    #[arg(long)]
    no_timing: bool,
    /// Re-summarize an existing records CSV instead of running trials.
    #[arg(long, conflicts_with = "maps")]
    from_records: Option<PathBuf>,
    /// Records CSV; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    cloud: PathBuf,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long, default_value_t = DEFAULT_STEP_COEFF)]
    step_coeff: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenmapArgs {
    #[arg(long)]
    archetype: Archetype,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 500)]
    size: usize,
    /// Feature count for the archetype; its default if absent.
    #[arg(long)]
    count: Option<usize>,
    /// pgm, png or txt; pgm carries the default endpoints.
    #[arg(long)]
    out: PathBuf,
}

/// Planning failed without an error: exit code 1.
struct NoPath;

struct Loaded {
    map: Map,
    start: Option<Point>,
    goal: Option<Point>,
    /// Density-derived step for clouds.
    step: Option<f64>,
}

fn parse_generated(spec: &str) -> Option<(Archetype, u64)> {
    let (name, seed) = spec.split_once('@')?;
    Some((name.parse().ok()?, seed.parse().ok()?))
}

fn load_map(spec: &str, args: &MapArgs) -> Result<Loaded> {
    let path = Path::new(spec);
    if !path.exists() {
        if let Some((arch, seed)) = parse_generated(spec) {
            let g = generate_map(arch, seed, &GenParams::default())?;
            return Ok(Loaded {
                map: Map::Grid(g.map),
                start: Some(g.start),
                goal: Some(g.goal),
                step: None,
            });
        }
    }
    if is_cloud_path(path) {
        let cloud = load_cloud(path)?;
        let report = analyze_density(&cloud, args.alpha, args.step_coeff)?;
        let map = CloudMap::from_report(&cloud, &report)?;
        return Ok(Loaded {
            map: Map::Cloud(map),
            start: None,
            goal: None,
            step: Some(report.step_size),
        });
    }
    let g = load_grid(path, args.threshold)?;
    Ok(Loaded {
        map: Map::Grid(g.map),
        start: g.start,
        goal: g.goal,
        step: None,
    })
}

fn plan_config(p: &PlannerArgs, step: f64) -> PlanConfig {
    PlanConfig {
        step_size: step,
        max_iterations: p.max_iter,
        rng_seed: p.seed,
        rrt_star_radius: p.rrt_star_radius,
        rrt_star_max_iter: p.rrt_star_iter,
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn json_text(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value");
    s.push('\n');
    s
}

struct Planned {
    loaded: Loaded,
    start: Point,
    goal: Point,
    result: PlanResult,
    optimized: Option<Optimized>,
}

fn run_plan(args: &PlanArgs) -> Result<Planned> {
    let loaded = load_map(&args.map.map, &args.map)?;
    let start = args.start.or(loaded.start).context("no start point: pass --start")?;
    let goal = args.goal.or(loaded.goal).context("no goal point: pass --goal")?;
    let step = args.planner.step.or(loaded.step).unwrap_or(20.0);
    let cfg = plan_config(&args.planner, step);
    let result = plan(args.planner.algo, &loaded.map, &start, &goal, &cfg)?;
    let optimized = match &result.path {
        Some(path) => {
            let mut ocfg = OptimizeConfig::for_step(step, args.planner.seed);
            ocfg.upsample_iters = args.planner.upsample_iters;
            Some(optimize_path(path, &loaded.map, &ocfg)?)
        }
        None => None,
    };
    Ok(Planned {
        loaded,
        start,
        goal,
        result,
        optimized,
    })
}

fn scene<'a>(p: &'a Planned) -> Scene<'a> {
    let mut stages = Vec::new();
    if let (Some(raw), Some(o)) = (&p.result.path, &p.optimized) {
        stages = vec![
            (Stage::Raw, raw),
            (Stage::Downsample, &o.downsampled),
            (Stage::Upsample, &o.upsampled),
            (Stage::Smooth, &o.smooth.discretized),
        ];
    }
    let mut trees = vec![&p.result.tree_a];
    if !p.result.tree_b.is_empty() {
        trees.push(&p.result.tree_b);
    }
    Scene {
        start: Some(p.start),
        goal: Some(p.goal),
        trees,
        stages,
    }
}

fn failure_json(r: &PlanResult) -> serde_json::Value {
    json!({
        "success": false,
        "reason": "no path found",
        "iterations_used": r.iterations_used,
        "nodes_total": r.nodes_total,
    })
}

fn cmd_plan(args: &PlanArgs) -> Result<std::result::Result<(), NoPath>> {
    let p = run_plan(args)?;
    if let Some(svg) = &args.svg {
        std::fs::write(svg, render_svg(&p.loaded.map, &scene(&p))).with_context(|| format!("writing {}", svg.display()))?;
    }
    let (Some(raw), Some(o)) = (&p.result.path, &p.optimized) else {
        write_out(None, &json_text(&failure_json(&p.result)))?;
        return Ok(Err(NoPath));
    };
    let mut csv = String::new();
    for q in &o.smooth.discretized.points {
        csv.push_str(&q.to_string());
        csv.push('\n');
    }
    write_out(args.out.as_deref(), &csv)?;
    let c = o.costs(raw);
    let summary = json!({
        "success": true,
        "algorithm": args.planner.algo,
        "raw_cost": c.raw_cost,
        "downsample_cost": c.downsample_cost,
        "upsample_cost": c.upsample_cost,
        "smooth_length": c.smooth_length,
        "keypoints_inserted": o.smooth.keypoints_inserted,
        "rounds": o.smooth.rounds,
        "smoothing_degraded": o.smooth.degraded,
        "iterations_used": p.result.iterations_used,
        "nodes_total": p.result.nodes_total,
    });
    match &args.summary {
        Some(path) => std::fs::write(path, json_text(&summary)).with_context(|| format!("writing {}", path.display()))?,
        None => eprint!("{}", json_text(&summary)),
    }
    Ok(Ok(()))
}

fn cmd_render(args: &PlanArgs) -> Result<std::result::Result<(), NoPath>> {
    let p = run_plan(args)?;
    write_out(args.out.as_deref(), &render_svg(&p.loaded.map, &scene(&p)))?;
    if p.result.path.is_none() {
        eprint!("{}", json_text(&failure_json(&p.result)));
        return Ok(Err(NoPath));
    }
    Ok(Ok(()))
}

fn bench_maps(args: &BenchArgs) -> Result<Vec<BenchMap>> {
    let map_args = MapArgs {
        map: String::new(),
        threshold: args.threshold,
        alpha: DEFAULT_ALPHA,
        step_coeff: DEFAULT_STEP_COEFF,
    };
    let mut entries = Vec::new();
    for spec in &args.maps {
        let path = Path::new(spec);
        if path.is_dir() {
            let mut files: Vec<PathBuf> = std::fs::read_dir(path)
                .with_context(|| format!("reading {}", path.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| {
                    matches!(
                        p.extension().and_then(|e| e.to_str()),
                        Some("pgm" | "png" | "txt")
                    )
                })
                .collect();
            files.sort();
            entries.extend(files.into_iter().map(|f| f.to_string_lossy().into_owned()));
        } else {
            entries.push(spec.clone());
        }
    }
    let mut maps = Vec::new();
    for spec in entries {
        let loaded = load_map(&spec, &map_args).with_context(|| format!("loading map `{spec}`"))?;
        let id = Path::new(&spec)
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or(spec.clone());
        let (Some(start), Some(goal)) = (loaded.start, loaded.goal) else {
            bail!("map `{spec}` has no stored start/goal endpoints");
        };
        maps.push(BenchMap {
            id,
            map: loaded.map,
            start,
            goal,
        });
    }
    Ok(maps)
}

fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let (records, summary) = if let Some(src) = &args.from_records {
        let records = read_records(src)?;
        let summary = summarize(&records);
        (records, summary)
    } else {
        let maps = bench_maps(args)?;
        let cfg = BenchConfig {
            plan: PlanConfig {
                step_size: args.step,
                max_iterations: args.max_iter,
                rng_seed: args.seed,
                rrt_star_radius: None,
                rrt_star_max_iter: args.rrt_star_iter,
            },
            trials: args.trials,
            upsample_iters: args.upsample_iters,
            optimize_all: args.optimize_all,
            timing: !args.no_timing,
        };
        run_benchmark(&maps, &args.algos, &cfg)?
    };
    match &args.out {
        Some(p) => write_records(p, &records)?,
        None => write_records_to(std::io::stdout().lock(), &records)?,
    }
    if let Some(p) = &args.summary {
        write_summary(p, &summary)?;
    }
    Ok(())
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<()> {
    let cloud = load_cloud(&args.cloud)?;
    let report = analyze_density(&cloud, args.alpha, args.step_coeff)?;
    let v = json!({
        "points": cloud.len(),
        "mean_nn_dist": report.mean_nn_dist,
        "std_nn_dist": report.std_nn_dist,
        "step_size": report.step_size,
        "safe_dist": report.safe_dist,
        "alpha": report.alpha,
    });
    write_out(args.out.as_deref(), &json_text(&v))
}

fn cmd_genmap(args: &GenmapArgs) -> Result<()> {
    let params = GenParams {
        size: args.size,
        count: args.count,
    };
    let g = generate_map(args.archetype, args.seed, &params)?;
    write_grid(&args.out, &g.map, Some(&g.start), Some(&g.goal))?;
    let v = json!({
        "archetype": args.archetype.name(),
        "seed": args.seed,
        "size": args.size,
        "obstacle_fraction": g.map.obstacle_fraction(),
        "start": g.start.to_string(),
        "goal": g.goal.to_string(),
    });
    write_out(None, &json_text(&v))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Plan(a) => cmd_plan(a),
        Command::Render(a) => cmd_render(a),
        Command::Bench(a) => cmd_bench(a).map(Ok),
        Command::Analyze(a) => cmd_analyze(a).map(Ok),
        Command::Genmap(a) => cmd_genmap(a).map(Ok),
    };
    match outcome {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(NoPath)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
