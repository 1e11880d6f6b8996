//! SVG rendering of maps, search trees and trajectory stages.
//!
//! Output is plain text with fixed number formatting, so identical input
//! gives identical bytes. 3D inputs are drawn as three orthographic panels
//! (XY, XZ, YZ).

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{Aabb, Point, Polyline};
use crate::planner::Tree;
use crate::workspace::{Map, Workspace};

const PANEL_PX: f64 = 600.0;
const MARGIN: f64 = 10.0;
const LEGEND_H: f64 = 28.0;
const MAX_CLOUD_POINTS: usize = 6000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Raw,
    Downsample,
    Upsample,
    Smooth,
}

impl Stage {
    fn class(self) -> &'static str {
        match self {
            Stage::Raw => "stage-raw",
            Stage::Downsample => "stage-downsample",
            Stage::Upsample => "stage-upsample",
            Stage::Smooth => "stage-smooth",
        }
    }

    fn label(self) -> &'static str {
        match self {
            Stage::Raw => "raw",
            Stage::Downsample => "down-sample",
            Stage::Upsample => "up-sample",
            Stage::Smooth => "smoothed",
        }
    }

    fn style(self) -> &'static str {
        match self {
            Stage::Raw => r##"stroke="#ff8c00" stroke-width="1.6""##,
            Stage::Downsample => r##"stroke="#1f5fd0" stroke-width="1.6""##,
            Stage::Upsample => r##"stroke="#2ca02c" stroke-width="1.6""##,
            Stage::Smooth => r##"stroke="#d62728" stroke-width="1.8" stroke-dasharray="3,2""##,
        }
    }
}

#[derive(Default)]
pub struct Scene<'a> {
    pub start: Option<Point>,
    pub goal: Option<Point>,
    pub trees: Vec<&'a Tree>,
    pub stages: Vec<(Stage, &'a Polyline)>,
}

const TREE_COLOURS: [&str; 2] = ["#9a9a9a", "#b08fd8"];

struct Panel {
    ax: (usize, usize),
    lo: (f64, f64),
    scale: f64,
    ox: f64,
    oy: f64,
    flip_y: bool,
    h: f64,
}

impl Panel {
    fn new(bounds: &Aabb, ax: (usize, usize), ox: f64, oy: f64, flip_y: bool) -> Panel {
        let w = bounds.extent(ax.0).max(1e-9);
        let h = bounds.extent(ax.1).max(1e-9);
        let scale = PANEL_PX / w.max(h);
        Panel {
            ax,
            lo: (bounds.min.coord(ax.0), bounds.min.coord(ax.1)),
            scale,
            ox,
            oy,
            flip_y,
            h: h * scale,
        }
    }

    fn xy(&self, p: &Point) -> (f64, f64) {
        let x = (p.coord(self.ax.0) - self.lo.0) * self.scale;
        let y = (p.coord(self.ax.1) - self.lo.1) * self.scale;
        let y = if self.flip_y { self.h - y } else { y };
        (self.ox + x, self.oy + y)
    }
}

fn polyline_d(panel: &Panel, pts: &[Point]) -> String {
    let mut d = String::new();
    for (i, p) in pts.iter().enumerate() {
        let (x, y) = panel.xy(p);
        let _ = write!(d, "{}{x:.3} {y:.3}", if i == 0 { "M" } else { " L" });
    }
    d
}

fn draw_grid(out: &mut String, panel: &Panel, map: &crate::workspace::GridMap) {
    let s = map.resolution() * panel.scale;
    out.push_str(r##"<g fill="#303030">"##);
    for row in 0..map.height() {
        let mut col = 0;
        while col < map.width() {
            if !map.is_occupied(col as i64, row as i64) {
                col += 1;
                continue;
            }
            let start = col;
            while col < map.width() && map.is_occupied(col as i64, row as i64) {
                col += 1;
            }
            let _ = write!(
                out,
                r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}"/>"#,
                panel.ox + start as f64 * s,
                panel.oy + row as f64 * s,
                (col - start) as f64 * s,
                s
            );
        }
    }
    out.push_str("</g>\n");
}

fn draw_cloud(out: &mut String, panel: &Panel, cloud: &[Point]) {
    let stride = cloud.len().div_ceil(MAX_CLOUD_POINTS).max(1);
    out.push_str(r##"<g fill="#505050">"##);
    for p in cloud.iter().step_by(stride) {
        let (x, y) = panel.xy(p);
        let _ = write!(out, r#"<circle cx="{x:.3}" cy="{y:.3}" r="1.000"/>"#);
    }
    out.push_str("</g>\n");
}

fn draw_panel(out: &mut String, panel: &Panel, map: &Map, scene: &Scene, w: f64) {
    let _ = writeln!(
        out,
        r##"<rect x="{:.3}" y="{:.3}" width="{w:.3}" height="{:.3}" fill="#ffffff" stroke="#000000"/>"##,
        panel.ox, panel.oy, panel.h
    );
    match map {
        Map::Grid(g) => draw_grid(out, panel, g),
        Map::Cloud(c) => draw_cloud(out, panel, c.cloud()),
    }
    for (i, tree) in scene.trees.iter().enumerate() {
        let mut d = String::new();
        for (a, b) in tree.edges() {
            let ((x0, y0), (x1, y1)) = (panel.xy(b), panel.xy(a));
            let _ = write!(d, "M{x0:.3} {y0:.3} L{x1:.3} {y1:.3} ");
        }
        let _ = writeln!(
            out,
            r#"<path class="tree-{i}" d="{}" fill="none" stroke="{}" stroke-width="0.6"/>"#,
            d.trim_end(),
            TREE_COLOURS[i % TREE_COLOURS.len()]
        );
    }
    for (stage, line) in &scene.stages {
        let _ = writeln!(
            out,
            r#"<path class="{}" d="{}" fill="none" {}/>"#,
            stage.class(),
            polyline_d(panel, &line.points),
            stage.style()
        );
    }
    for (p, colour) in [(scene.start, "#00a000"), (scene.goal, "#c00000")] {
        if let Some(p) = p {
            let (x, y) = panel.xy(&p);
            let _ = writeln!(out, r#"<circle cx="{x:.3}" cy="{y:.3}" r="4.000" fill="{colour}"/>"#);
        }
    }
}

/// Renders `map` and `scene` to an SVG document.
pub fn render_svg(map: &Map, scene: &Scene) -> String {
    let bounds = map.bounds();
    let axes: Vec<(usize, usize)> = if map.dim() == 3 {
        vec![(0, 1), (0, 2), (1, 2)]
    } else {
        vec![(0, 1)]
    };
    // grid rows grow downwards like SVG; cloud axes point up
    let flip = matches!(map, Map::Cloud(_));
    let mut panels = Vec::new();
    let mut x = MARGIN;
    let mut height: f64 = 0.0;
    for &ax in &axes {
        let p = Panel::new(&bounds, ax, x, MARGIN, flip);
        let w = bounds.extent(ax.0).max(1e-9) * p.scale;
        height = height.max(p.h);
        x += w + MARGIN;
        panels.push((p, w));
    }
    let total_w = x;
    let total_h = MARGIN + height + LEGEND_H + MARGIN;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total_w:.3}" height="{total_h:.3}" viewBox="0 0 {total_w:.3} {total_h:.3}">"#
    );
    for (p, w) in &panels {
        let _ = writeln!(out, r#"<g class="panel" data-axes="{}{}">"#, axis_name(p.ax.0), axis_name(p.ax.1));
        draw_panel(&mut out, p, map, scene, *w);
        out.push_str("</g>\n");
    }

    let ly = MARGIN + height + 18.0;
    out.push_str(r#"<g class="legend" font-family="sans-serif" font-size="12">"#);
    out.push('\n');
    let mut lx = MARGIN;
    for (stage, _) in &scene.stages {
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" {}/><text x="{:.3}" y="{ly:.3}">{}</text>"#,
            ly - 4.0,
            lx + 24.0,
            ly - 4.0,
            stage.style(),
            lx + 28.0,
            stage.label()
        );
        lx += 110.0;
    }
    out.push_str("</g>\n</svg>\n");
    out
}

fn axis_name(a: usize) -> char {
    ['x', 'y', 'z'][a]
}

pub fn write_svg(path: impl AsRef<Path>, map: &Map, scene: &Scene) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, render_svg(map, scene)).map_err(|e| Error::io(path, e))
}
