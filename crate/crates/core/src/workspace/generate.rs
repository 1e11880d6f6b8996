//! Procedural square test maps.
//!
//! Each archetype reproduces one family of test environment (disc fields,
//! mazes, tunnels, scattered clutter) with an obstacle fraction inside a
//! fixed band and default endpoints for a map of side `size`. Endpoints are
//! always kept clear and connected to each other.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::seed::SeedMixer;
use crate::workspace::{GridMap, Workspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Archetype {
    Circular,
    IrregularMaze,
    RegularMaze,
    SingleTunnel,
    MultiTunnel,
    CircularScatter,
    SquareScatter,
}

impl Archetype {
    pub const ALL: [Archetype; 7] = [
        Archetype::Circular,
        Archetype::IrregularMaze,
        Archetype::RegularMaze,
        Archetype::SingleTunnel,
        Archetype::MultiTunnel,
        Archetype::CircularScatter,
        Archetype::SquareScatter,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Archetype::Circular => "circular",
            Archetype::IrregularMaze => "irregular_maze",
            Archetype::RegularMaze => "regular_maze",
            Archetype::SingleTunnel => "single_tunnel",
            Archetype::MultiTunnel => "multi_tunnel",
            Archetype::CircularScatter => "circular_scatter",
            Archetype::SquareScatter => "square_scatter",
        }
    }

    /// Inclusive obstacle-fraction band every generated map falls in.
    pub fn fraction_band(self) -> (f64, f64) {
        match self {
            Archetype::Circular => (0.22, 0.30),
            Archetype::IrregularMaze => (0.35, 0.45),
            Archetype::RegularMaze => (0.10, 0.16),
            Archetype::SingleTunnel => (0.35, 0.45),
            Archetype::MultiTunnel => (0.35, 0.45),
            Archetype::CircularScatter => (0.04, 0.10),
            Archetype::SquareScatter => (0.20, 0.30),
        }
    }

    /// Default start and goal on a 500 x 500 map.
    fn endpoints_500(self) -> ((f64, f64), (f64, f64)) {
        match self {
            Archetype::Circular => ((10.0, 10.0), (490.0, 490.0)),
            Archetype::IrregularMaze => ((350.0, 330.0), (450.0, 450.0)),
            Archetype::RegularMaze => ((50.0, 170.0), (430.0, 340.0)),
            Archetype::SingleTunnel => ((245.0, 10.0), (245.0, 490.0)),
            Archetype::MultiTunnel => ((245.0, 10.0), (245.0, 400.0)),
            Archetype::CircularScatter | Archetype::SquareScatter => ((10.0, 490.0), (490.0, 10.0)),
        }
    }

    fn default_count(self) -> usize {
        match self {
            Archetype::Circular => 8,
            Archetype::IrregularMaze => 5,
            Archetype::RegularMaze => 4,
            Archetype::SingleTunnel => 1,
            Archetype::MultiTunnel => 3,
            Archetype::CircularScatter => 40,
            Archetype::SquareScatter => 40,
        }
    }

    /// Accepted range for [`GenParams::count`].
    pub fn count_range(self) -> (usize, usize) {
        match self {
            Archetype::Circular => (4, 12),
            Archetype::IrregularMaze => (3, 8),
            Archetype::RegularMaze => (2, 8),
            Archetype::SingleTunnel => (1, 1),
            Archetype::MultiTunnel => (2, 5),
            Archetype::CircularScatter => (20, 80),
            Archetype::SquareScatter => (20, 60),
        }
    }
}

impl fmt::Display for Archetype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Archetype {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Archetype::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::UnknownArchetype(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenParams {
    /// Side length in cells, 100..=4000.
    pub size: usize,
    /// Number of discs / squares / maze cells per side / walls / tunnels;
    /// `None` uses the archetype default.
    pub count: Option<usize>,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            size: 500,
            count: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GeneratedMap {
    pub archetype: Archetype,
    pub map: GridMap,
    pub start: Point,
    pub goal: Point,
}

pub fn generate_map(archetype: Archetype, seed: u64, params: &GenParams) -> Result<GeneratedMap> {
    if !(100..=4000).contains(&params.size) {
        return Err(Error::InvalidParameter(format!(
            "map size {} outside 100..=4000",
            params.size
        )));
    }
    let count = params.count.unwrap_or(archetype.default_count());
    let (lo, hi) = archetype.count_range();
    if !(lo..=hi).contains(&count) {
        return Err(Error::InvalidParameter(format!(
            "{archetype} count {count} outside {lo}..={hi}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SeedMixer::new(seed).str(archetype.name()).finish());
    let s = params.size as f64 / 500.0;
    let ((sx, sy), (gx, gy)) = archetype.endpoints_500();
    let start = Point::new2(sx * s, sy * s);
    let goal = Point::new2(gx * s, gy * s);
    let ends = [start, goal];
    // a layout with direct line of sight between the endpoints is no
    // planning problem at all, so sparse layouts are redrawn until blocked
    for attempt in 0.. {
        let mut c = Canvas::new(params.size);
        match archetype {
            Archetype::Circular => discs(&mut c, &mut rng, &ends, count, 0.26, 0.15, 22.0 * s, 25.0 * s),
            Archetype::CircularScatter => discs(&mut c, &mut rng, &ends, count, 0.068, 0.25, 14.0 * s, 16.0 * s),
            Archetype::SquareScatter => squares(&mut c, &mut rng, &ends, count, 0.254, 16.0 * s),
            Archetype::IrregularMaze => maze(&mut c, &mut rng, count),
            Archetype::RegularMaze => serpentine(&mut c, count),
            Archetype::SingleTunnel => tunnels(&mut c, &mut rng, 1, 0.405),
            Archetype::MultiTunnel => tunnels(&mut c, &mut rng, count, 0.39),
        }
        for e in &ends {
            c.disc(e.x(), e.y(), 12.0 * s, false);
        }
        let map = GridMap::new(params.size, params.size, c.cells)?;
        if attempt + 1 < MAX_LAYOUT_ATTEMPTS && map.segment_free(&start, &goal) {
            continue;
        }
        return Ok(GeneratedMap {
            archetype,
            map,
            start,
            goal,
        });
    }
    unreachable!()
}

const MAX_LAYOUT_ATTEMPTS: usize = 64;

struct Canvas {
    n: usize,
    cells: Vec<bool>,
}

impl Canvas {
    fn new(n: usize) -> Self {
        Canvas {
            n,
            cells: vec![false; n * n],
        }
    }

    /// Sets every cell whose centre lies in `[x0, x1) x [y0, y1)`.
    fn rect(&mut self, x0: f64, y0: f64, x1: f64, y1: f64, value: bool) {
        let clamp = |v: f64| (v - 0.5).ceil().clamp(0.0, self.n as f64) as usize;
        for r in clamp(y0)..clamp(y1) {
            for col in clamp(x0)..clamp(x1) {
                self.cells[r * self.n + col] = value;
            }
        }
    }

    fn disc(&mut self, cx: f64, cy: f64, radius: f64, value: bool) {
        let r2 = radius * radius;
        let lo = |v: f64| (v - radius).floor().max(0.0) as usize;
        let hi = |v: f64| ((v + radius).ceil().max(0.0) as usize).min(self.n);
        for r in lo(cy)..hi(cy) {
            for col in lo(cx)..hi(cx) {
                let dx = col as f64 + 0.5 - cx;
                let dy = r as f64 + 0.5 - cy;
                if dx * dx + dy * dy <= r2 {
                    self.cells[r * self.n + col] = value;
                }
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn discs(
    c: &mut Canvas,
    rng: &mut ChaCha8Rng,
    ends: &[Point],
    count: usize,
    target: f64,
    jitter: f64,
    gap: f64,
    end_clearance: f64,
) {
    let size = c.n as f64;
    let mut nominal = size * (target / (count as f64 * std::f64::consts::PI)).sqrt();
    let mut placed: Vec<(f64, f64, f64)> = Vec::new();
    while placed.len() < count {
        let mut ok = false;
        for _ in 0..4000 {
            let r = nominal * rng.gen_range(1.0 - jitter..1.0 + jitter);
            let lo = r + 2.0;
            let hi = size - r - 2.0;
            if hi <= lo {
                break;
            }
            let x = rng.gen_range(lo..hi);
            let y = rng.gen_range(lo..hi);
            let clear_of_discs = placed
                .iter()
                .all(|&(px, py, pr)| ((x - px).powi(2) + (y - py).powi(2)).sqrt() >= r + pr + gap);
            let clear_of_ends = ends
                .iter()
                .all(|e| ((x - e.x()).powi(2) + (y - e.y()).powi(2)).sqrt() >= r + end_clearance);
            if clear_of_discs && clear_of_ends {
                placed.push((x, y, r));
                ok = true;
                break;
            }
        }
        if !ok {
            nominal *= 0.95;
        }
    }
    for (x, y, r) in placed {
        c.disc(x, y, r, true);
    }
}

fn squares(c: &mut Canvas, rng: &mut ChaCha8Rng, ends: &[Point], count: usize, target: f64, gap: f64) {
    let size = c.n as f64;
    let mut nominal = size * (target / count as f64).sqrt();
    let mut placed: Vec<(f64, f64, f64)> = Vec::new();
    while placed.len() < count {
        let mut ok = false;
        for _ in 0..4000 {
            let a = nominal * rng.gen_range(0.85..1.15);
            let x = rng.gen_range(2.0..size - a - 2.0);
            let y = rng.gen_range(2.0..size - a - 2.0);
            let apart = |px: f64, pa: f64, qx: f64, qa: f64| qx >= px + pa + gap || px >= qx + qa + gap;
            let clear = placed
                .iter()
                .all(|&(px, py, pa)| apart(px, pa, x, a) || apart(py, pa, y, a));
            let clear_of_ends = ends.iter().all(|e| {
                let dx = (x - e.x()).max(e.x() - x - a).max(0.0);
                let dy = (y - e.y()).max(e.y() - y - a).max(0.0);
                (dx * dx + dy * dy).sqrt() >= gap
            });
            if clear && clear_of_ends {
                placed.push((x, y, a));
                ok = true;
                break;
            }
        }
        if !ok {
            nominal *= 0.95;
        }
    }
    for (x, y, a) in placed {
        c.rect(x, y, x + a, y + a, true);
    }
}

/// Perfect maze on a `k x k` room lattice with a few extra openings and
/// jittered wall thickness.
fn maze(c: &mut Canvas, rng: &mut ChaCha8Rng, k: usize) {
    let pitch = c.n as f64 / k as f64;
    let wall = 0.38 * pitch;
    // walls[v][i][j]: vertical wall on grid line x = i between rows j;
    // horizontal wall on line y = j between columns i.
    let mut vertical = vec![vec![true; k]; k + 1];
    let mut horizontal = vec![vec![true; k + 1]; k];
    let mut visited = vec![vec![false; k]; k];
    let mut stack = vec![(0usize, 0usize)];
    visited[0][0] = true;
    while let Some(&(i, j)) = stack.last() {
        let mut nbrs = Vec::with_capacity(4);
        if i > 0 && !visited[i - 1][j] {
            nbrs.push((i - 1, j));
        }
        if i + 1 < k && !visited[i + 1][j] {
            nbrs.push((i + 1, j));
        }
        if j > 0 && !visited[i][j - 1] {
            nbrs.push((i, j - 1));
        }
        if j + 1 < k && !visited[i][j + 1] {
            nbrs.push((i, j + 1));
        }
        if nbrs.is_empty() {
            stack.pop();
            continue;
        }
        let (ni, nj) = nbrs[rng.gen_range(0..nbrs.len())];
        if ni != i {
            vertical[i.max(ni)][j] = false;
        } else {
            horizontal[i][j.max(nj)] = false;
        }
        visited[ni][nj] = true;
        stack.push((ni, nj));
    }
    // braid: open some interior walls to create loops
    for (i, col) in vertical.iter_mut().enumerate() {
        for w in col.iter_mut() {
            if i > 0 && i < k && *w && rng.gen_bool(0.15) {
                *w = false;
            }
        }
    }
    for col in horizontal.iter_mut() {
        for (j, w) in col.iter_mut().enumerate() {
            if j > 0 && j < k && *w && rng.gen_bool(0.15) {
                *w = false;
            }
        }
    }
    for (i, col) in vertical.iter().enumerate() {
        for (j, &present) in col.iter().enumerate() {
            if present {
                let t = wall * rng.gen_range(0.8..1.2) / 2.0;
                let x = i as f64 * pitch;
                c.rect(x - t, j as f64 * pitch - t, x + t, (j + 1) as f64 * pitch + t, true);
            }
        }
    }
    for (i, col) in horizontal.iter().enumerate() {
        for (j, &present) in col.iter().enumerate() {
            if present {
                let t = wall * rng.gen_range(0.8..1.2) / 2.0;
                let y = j as f64 * pitch;
                c.rect(i as f64 * pitch - t, y - t, (i + 1) as f64 * pitch + t, y + t, true);
            }
        }
    }
    // pillars at every lattice node
    let t = wall / 2.0;
    for i in 0..=k {
        for j in 0..=k {
            let (x, y) = (i as f64 * pitch, j as f64 * pitch);
            c.rect(x - t, y - t, x + t, y + t, true);
        }
    }
    // room interiors stay open even where jittered walls overlap them
    for i in 0..k {
        for j in 0..k {
            let (x, y) = (i as f64 * pitch, j as f64 * pitch);
            c.rect(x + wall * 0.6, y + wall * 0.6, x + pitch - wall * 0.6, y + pitch - wall * 0.6, false);
        }
    }
}

/// Parallel walls spanning the map with a gap alternating between the two
/// ends, forming a serpentine corridor.
fn serpentine(c: &mut Canvas, walls: usize) {
    let size = c.n as f64;
    let s = size / 500.0;
    let thick = 19.0 * s;
    let gap = 80.0 * s;
    let pitch = size / (walls + 1) as f64;
    for i in 0..walls {
        let x = (i + 1) as f64 * pitch;
        let (y0, y1) = if i % 2 == 0 { (0.0, size - gap) } else { (gap, size) };
        c.rect(x - thick / 2.0, y0, x + thick / 2.0, y1, true);
    }
}

/// Solid horizontal band pierced by `n` tunnels, each with one horizontal
/// jog. Band height is chosen so the obstacle fraction lands near `target`.
fn tunnels(c: &mut Canvas, rng: &mut ChaCha8Rng, n: usize, target: f64) {
    let size = c.n as f64;
    let s = size / 500.0;
    let width = 34.0 * s;
    let margin = 50.0 * s;
    let slot = (size - 2.0 * margin) / n as f64;
    let mut shapes = Vec::with_capacity(n);
    for t in 0..n {
        let lo = margin + t as f64 * slot + width;
        let hi = margin + (t + 1) as f64 * slot - width;
        let (xa, xb) = if n == 1 {
            // long jog away from the centre line
            let xa = rng.gen_range(60.0 * s..160.0 * s);
            let xb = rng.gen_range(340.0 * s..440.0 * s);
            if rng.gen_bool(0.5) {
                (xa, xb)
            } else {
                (xb, xa)
            }
        } else {
            loop {
                let xa = rng.gen_range(lo..hi.max(lo + 1.0));
                let xb = rng.gen_range(lo - slot / 3.0..hi + slot / 3.0).clamp(margin, size - margin);
                if (xa - xb).abs() >= 40.0 * s {
                    break (xa, xb);
                }
            }
        };
        let mid = rng.gen_range(0.35..0.65);
        shapes.push((xa, xb, mid));
    }
    let jog: f64 = shapes.iter().map(|(a, b, _)| (a - b).abs()).sum();
    let height = ((target * size * size + width * jog) / (size - n as f64 * width)).min(size * 0.8);
    let y0 = size / 2.0 - height / 2.0;
    let y1 = size / 2.0 + height / 2.0;
    c.rect(0.0, y0, size, y1, true);
    for (xa, xb, mid) in shapes {
        let ym = y0 + mid * height;
        let h = width / 2.0;
        c.rect(xa - h, y0 - 1.0, xa + h, ym + h, false);
        c.rect(xa.min(xb) - h, ym - h, xa.max(xb) + h, ym + h, false);
        c.rect(xb - h, ym - h, xb + h, y1 + 1.0, false);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workspace::Workspace;
    use std::collections::VecDeque;

    /// 4-connected flood fill between the endpoint cells.
    fn connected(g: &GridMap, a: &Point, b: &Point) -> bool {
        let (w, h) = (g.width() as i64, g.height() as i64);
        let start = g.cell_of(a);
        let goal = g.cell_of(b);
        let mut seen = vec![false; (w * h) as usize];
        let mut q = VecDeque::from([start]);
        seen[(start.1 * w + start.0) as usize] = true;
        while let Some((c, r)) = q.pop_front() {
            if (c, r) == goal {
                return true;
            }
            for (dc, dr) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                let (nc, nr) = (c + dc, r + dr);
                if !g.is_occupied(nc, nr) && !seen[(nr * w + nc) as usize] {
                    seen[(nr * w + nc) as usize] = true;
                    q.push_back((nc, nr));
                }
            }
        }
        false
    }

    #[test]
    fn deterministic_per_seed() {
        let p = GenParams {
            size: 500,
            count: Some(8),
        };
        let a = generate_map(Archetype::Circular, 1, &p).unwrap();
        let b = generate_map(Archetype::Circular, 1, &p).unwrap();
        assert_eq!(a.map, b.map);
        let c = generate_map(Archetype::Circular, 2, &p).unwrap();
        assert_ne!(a.map, c.map);
    }

    #[test]
    fn table_bands() {
        let f = |a, seed| {
            generate_map(a, seed, &GenParams::default())
                .unwrap()
                .map
                .obstacle_fraction()
        };
        let t = f(Archetype::SingleTunnel, 7);
        assert!((0.35..=0.45).contains(&t), "{t}");
        let t = f(Archetype::CircularScatter, 3);
        assert!((0.04..=0.10).contains(&t), "{t}");
    }

    #[test]
    fn every_archetype_in_band_free_endpoints_and_connected() {
        for a in Archetype::ALL {
            for seed in 0..6 {
                let m = generate_map(a, seed, &GenParams::default()).unwrap();
                let frac = m.map.obstacle_fraction();
                let (lo, hi) = a.fraction_band();
                assert!((lo..=hi).contains(&frac), "{a} seed {seed}: {frac}");
                assert!(m.map.point_free(&m.start), "{a} seed {seed}");
                assert!(m.map.point_free(&m.goal), "{a} seed {seed}");
                assert!(connected(&m.map, &m.start, &m.goal), "{a} seed {seed}");
                assert!(!m.map.segment_free(&m.start, &m.goal), "{a} seed {seed}");
            }
        }
    }

    #[test]
    fn names_round_trip_and_unknown_rejected() {
        for a in Archetype::ALL {
            assert_eq!(a.name().parse::<Archetype>().unwrap(), a);
        }
        assert!(matches!(
            "spiral".parse::<Archetype>(),
            Err(Error::UnknownArchetype(_))
        ));
    }

    #[test]
    fn param_ranges_checked() {
        let bad = GenParams {
            size: 50,
            count: None,
        };
        assert!(generate_map(Archetype::Circular, 0, &bad).is_err());
        let bad = GenParams {
            size: 500,
            count: Some(100),
        };
        assert!(generate_map(Archetype::Circular, 0, &bad).is_err());
    }
}
