//! Map and point-cloud file formats.
//!
//! Grids: binary (`P5`) or ASCII (`P2`) PGM, 8-bit PNG, or an ASCII grid of
//! `0`/`1` characters (`1` = obstacle). Image pixels darker than the
//! threshold are obstacles. PGM comments of the form `# start x,y` and
//! `# goal x,y` carry default planning endpoints.
//!
//! Clouds: ASCII PLY, ASCII PCD, or headerless `x,y,z` CSV / whitespace XYZ.
//! Only positions are read.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::workspace::GridMap;

pub const DEFAULT_OCC_THRESHOLD: u8 = 128;

/// A grid plus optional endpoints stored alongside it.
#[derive(Clone, Debug)]
pub struct GridFile {
    pub map: GridMap,
    pub start: Option<Point>,
    pub goal: Option<Point>,
}

fn ext(path: &Path) -> String {
    path.extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase()
}

pub fn load_grid(path: impl AsRef<Path>, threshold: u8) -> Result<GridFile> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(b"P5") || bytes.starts_with(b"P2") {
        return parse_pgm(path, &bytes, threshold);
    }
    if bytes.starts_with(b"\x89PNG") {
        let img = image::load_from_memory_with_format(&bytes, image::ImageFormat::Png)
            .map_err(|e| Error::parse(path, 0, e.to_string()))?
            .to_luma8();
        let (w, h) = img.dimensions();
        let cells = img.pixels().map(|p| p.0[0] < threshold).collect();
        return finish_grid(path, w as usize, h as usize, cells, None, None);
    }
    let text = String::from_utf8(bytes).map_err(|_| Error::parse(path, 0, "not a PGM, PNG or ASCII grid"))?;
    parse_ascii_grid(path, &text)
}

fn finish_grid(
    path: &Path,
    w: usize,
    h: usize,
    cells: Vec<bool>,
    start: Option<Point>,
    goal: Option<Point>,
) -> Result<GridFile> {
    if w < 2 || h < 2 {
        return Err(Error::InvalidMap(format!(
            "{}: map is {w}x{h}, need at least 2x2",
            path.display()
        )));
    }
    Ok(GridFile {
        map: GridMap::new(w, h, cells)?,
        start,
        goal,
    })
}

fn parse_ascii_grid(path: &Path, text: &str) -> Result<GridFile> {
    let mut rows: Vec<Vec<bool>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::parse(path, lineno + 1, format!("unexpected `{other}` in grid"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::parse(
                    path,
                    lineno + 1,
                    format!("row has {} cells, expected {}", row.len(), first.len()),
                ));
            }
        }
        rows.push(row);
    }
    let h = rows.len();
    let w = rows.first().map_or(0, Vec::len);
    finish_grid(path, w, h, rows.concat(), None, None)
}

fn parse_pgm(path: &Path, bytes: &[u8], threshold: u8) -> Result<GridFile> {
    let binary = bytes.starts_with(b"P5");
    let mut pos = 2;
    let mut line = 1;
    let mut start = None;
    let mut goal = None;
    let mut header = [0usize; 3];
    for slot in header.iter_mut() {
        // skip whitespace and comments, harvesting metadata
        loop {
            match bytes.get(pos) {
                Some(b'\n') => {
                    line += 1;
                    pos += 1;
                }
                Some(c) if c.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    let end = bytes[pos..]
                        .iter()
                        .position(|&c| c == b'\n')
                        .map_or(bytes.len(), |e| pos + e);
                    let comment = String::from_utf8_lossy(&bytes[pos + 1..end]);
                    let mut parts = comment.split_whitespace();
                    match (parts.next(), parts.next()) {
                        (Some("start"), Some(p)) => start = Some(p.parse::<Point>()?),
                        (Some("goal"), Some(p)) => goal = Some(p.parse::<Point>()?),
                        _ => {}
                    }
                    pos = end;
                }
                Some(_) => break,
                None => return Err(Error::parse(path, line, "truncated PGM header")),
            }
        }
        let digits = bytes[pos..].iter().take_while(|c| c.is_ascii_digit()).count();
        if digits == 0 {
            return Err(Error::parse(path, line, "expected a number in PGM header"));
        }
        *slot = std::str::from_utf8(&bytes[pos..pos + digits])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::parse(path, line, "bad PGM header value"))?;
        pos += digits;
    }
    let [w, h, maxval] = header;
    if maxval == 0 || maxval > 255 {
        return Err(Error::parse(path, line, format!("unsupported maxval {maxval}")));
    }
    let scale = |v: usize| ((v * 255 + maxval / 2) / maxval) as u8;
    let cells: Vec<bool> = if binary {
        pos += 1; // single whitespace after maxval
        let data = bytes
            .get(pos..pos + w * h)
            .ok_or_else(|| Error::parse(path, line, "truncated PGM pixel data"))?;
        data.iter().map(|&v| scale(v as usize) < threshold).collect()
    } else {
        let text = std::str::from_utf8(&bytes[pos..])
            .map_err(|_| Error::parse(path, line, "non-ASCII pixel data"))?;
        let vals = text
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::parse(path, line, e.to_string()))?;
        if vals.len() < w * h {
            return Err(Error::parse(path, line, "truncated PGM pixel data"));
        }
        vals[..w * h].iter().map(|&v| scale(v.min(maxval)) < threshold).collect()
    };
    finish_grid(path, w, h, cells, start, goal)
}

/// Binary PGM: free cells white, obstacles black.
pub fn encode_pgm(map: &GridMap, start: Option<&Point>, goal: Option<&Point>) -> Vec<u8> {
    let mut header = String::from("P5\n");
    if let Some(s) = start {
        let _ = writeln!(header, "# start {s}");
    }
    if let Some(g) = goal {
        let _ = writeln!(header, "# goal {g}");
    }
    let _ = write!(header, "{} {}\n255\n", map.width(), map.height());
    let mut out = header.into_bytes();
    out.extend(map.cells().iter().map(|&o| if o { 0u8 } else { 255u8 }));
    out
}

pub fn write_grid(
    path: impl AsRef<Path>,
    map: &GridMap,
    start: Option<&Point>,
    goal: Option<&Point>,
) -> Result<()> {
    let path = path.as_ref();
    let bytes = match ext(path).as_str() {
        "png" => {
            let pixels = map.cells().iter().map(|&o| if o { 0u8 } else { 255u8 }).collect();
            let img = image::GrayImage::from_raw(map.width() as u32, map.height() as u32, pixels)
                .expect("buffer size matches dimensions");
            let mut buf = std::io::Cursor::new(Vec::new());
            img.write_to(&mut buf, image::ImageFormat::Png)
                .map_err(|e| Error::InvalidMap(e.to_string()))?;
            buf.into_inner()
        }
        "txt" => {
            let mut s = String::new();
            for row in map.cells().chunks(map.width()) {
                s.extend(row.iter().map(|&o| if o { '1' } else { '0' }));
                s.push('\n');
            }
            s.into_bytes()
        }
        _ => encode_pgm(map, start, goal),
    };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn is_cloud_path(path: impl AsRef<Path>) -> bool {
    matches!(ext(path.as_ref()).as_str(), "ply" | "pcd" | "csv" | "xyz")
}

pub fn load_cloud(path: impl AsRef<Path>) -> Result<Vec<Point>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let trimmed = text.trim_start();
    let points = if trimmed.starts_with("ply") {
        parse_ply(path, &text)?
    } else if ext(path) == "pcd" || trimmed.starts_with("# .PCD") || trimmed.starts_with("VERSION") {
        parse_pcd(path, &text)?
    } else {
        parse_xyz(path, &text)?
    };
    if points.len() < 4 {
        return Err(Error::TooFewPoints {
            needed: 4,
            found: points.len(),
        });
    }
    Ok(points)
}

fn parse_xyz(path: &Path, text: &str) -> Result<Vec<Point>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        out.push(xyz_row(path, i + 1, &fields, [0, 1, 2])?);
    }
    Ok(out)
}

fn xyz_row(path: &Path, line: usize, fields: &[&str], cols: [usize; 3]) -> Result<Point> {
    let mut c = [0.0; 3];
    for (k, &col) in cols.iter().enumerate() {
        let f = fields
            .get(col)
            .ok_or_else(|| Error::parse(path, line, format!("expected at least {} fields", col + 1)))?;
        c[k] = f
            .parse()
            .map_err(|_| Error::parse(path, line, format!("bad coordinate `{f}`")))?;
    }
    Ok(Point::new3(c[0], c[1], c[2]))
}

fn parse_ply(path: &Path, text: &str) -> Result<Vec<Point>> {
    let mut lines = text.lines().enumerate();
    let mut vertex_count = None;
    let mut in_vertex = false;
    let mut props: Vec<String> = Vec::new();
    // elements before `vertex` would shift the body; record their sizes
    let mut skip_before = 0usize;
    let mut seen_vertex = false;
    let mut header_end = None;
    for (i, line) in lines.by_ref() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["ply"] | [] => {}
            ["format", fmt, ..] => {
                if *fmt != "ascii" {
                    return Err(Error::parse(path, i + 1, format!("unsupported PLY format `{fmt}`")));
                }
            }
            ["comment", ..] | ["obj_info", ..] => {}
            ["element", name, count] => {
                let count: usize = count
                    .parse()
                    .map_err(|_| Error::parse(path, i + 1, "bad element count"))?;
                in_vertex = *name == "vertex";
                if in_vertex {
                    vertex_count = Some(count);
                    seen_vertex = true;
                } else if !seen_vertex {
                    skip_before += count;
                }
            }
            ["property", "list", ..] if in_vertex => {
                return Err(Error::parse(path, i + 1, "list properties on vertex are not supported"))
            }
            ["property", _ty, name] => {
                if in_vertex {
                    props.push(name.to_string());
                }
            }
            ["property", ..] => {}
            ["end_header"] => {
                header_end = Some(i);
                break;
            }
            _ => return Err(Error::parse(path, i + 1, format!("unexpected PLY header line `{line}`"))),
        }
    }
    let header_end = header_end.ok_or_else(|| Error::parse(path, 1, "missing end_header"))?;
    let count = vertex_count.ok_or_else(|| Error::parse(path, header_end + 1, "no vertex element"))?;
    let col = |name: &str| {
        props
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| Error::parse(path, header_end + 1, format!("vertex has no `{name}` property")))
    };
    let cols = [col("x")?, col("y")?, col("z")?];
    let mut out = Vec::with_capacity(count);
    let mut skipped = 0;
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        if skipped < skip_before {
            skipped += 1;
            continue;
        }
        if out.len() == count {
            break;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != props.len() {
            return Err(Error::parse(
                path,
                i + 1,
                format!("vertex row has {} fields, expected {}", fields.len(), props.len()),
            ));
        }
        out.push(xyz_row(path, i + 1, &fields, cols)?);
    }
    if out.len() != count {
        return Err(Error::parse(
            path,
            text.lines().count(),
            format!("expected {count} vertices, found {}", out.len()),
        ));
    }
    Ok(out)
}

fn parse_pcd(path: &Path, text: &str) -> Result<Vec<Point>> {
    let mut fields: Vec<String> = Vec::new();
    let mut points = None;
    let mut lines = text.lines().enumerate();
    let mut data_line = None;
    for (i, line) in lines.by_ref() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        let key = toks.next().unwrap_or("");
        let rest: Vec<&str> = toks.collect();
        match key {
            "FIELDS" => fields = rest.iter().map(|s| s.to_string()).collect(),
            "POINTS" => {
                points = Some(
                    rest.first()
                        .and_then(|s| s.parse::<usize>().ok())
                        .ok_or_else(|| Error::parse(path, i + 1, "bad POINTS"))?,
                )
            }
            "DATA" => {
                if rest.first() != Some(&"ascii") {
                    return Err(Error::parse(path, i + 1, "only DATA ascii is supported"));
                }
                data_line = Some(i);
                break;
            }
            "VERSION" | "SIZE" | "TYPE" | "COUNT" | "WIDTH" | "HEIGHT" | "VIEWPOINT" => {}
            other => return Err(Error::parse(path, i + 1, format!("unexpected PCD header key `{other}`"))),
        }
    }
    let data_line = data_line.ok_or_else(|| Error::parse(path, 1, "missing DATA line"))?;
    let col = |name: &str| {
        fields
            .iter()
            .position(|f| f == name)
            .ok_or_else(|| Error::parse(path, data_line + 1, format!("FIELDS lacks `{name}`")))
    };
    let cols = [col("x")?, col("y")?, col("z")?];
    let mut out = Vec::new();
    for (i, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() != fields.len() {
            return Err(Error::parse(
                path,
                i + 1,
                format!("row has {} fields, expected {}", toks.len(), fields.len()),
            ));
        }
        out.push(xyz_row(path, i + 1, &toks, cols)?);
    }
    if let Some(n) = points {
        if n != out.len() {
            return Err(Error::parse(
                path,
                text.lines().count(),
                format!("POINTS says {n}, found {}", out.len()),
            ));
        }
    }
    Ok(out)
}

/// Writes `x,y,z` CSV (`.csv`, `.xyz`) or ASCII PLY (`.ply`).
pub fn write_cloud(path: impl AsRef<Path>, cloud: &[Point]) -> Result<()> {
    let path = path.as_ref();
    let mut s = String::new();
    if ext(path) == "ply" {
        let _ = write!(
            s,
            "ply\nformat ascii 1.0\nelement vertex {}\nproperty float x\nproperty float y\nproperty float z\nend_header\n",
            cloud.len()
        );
        for p in cloud {
            let _ = writeln!(s, "{} {} {}", p.x(), p.y(), p.z());
        }
    } else {
        for p in cloud {
            let _ = writeln!(s, "{},{},{}", p.x(), p.y(), p.z());
        }
    }
    fs::write(path, s).map_err(|e| Error::io(path, e))
}
