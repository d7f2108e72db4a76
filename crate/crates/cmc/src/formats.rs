//! OBJ meshes, CSV tables and JSON reports, written atomically.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use cmc_core::grid::{Grid, GridSpec};
use cmc_core::Complex64;
use serde::Serialize;

use crate::error::CliError;

/// Writes `bytes` to a temporary file next to `path` and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| CliError::output(format!("{}: {e}", dir.display())))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(CliError::output)?;
    tmp.write_all(bytes).map_err(CliError::output)?;
    tmp.as_file().sync_all().map_err(CliError::output)?;
    tmp.persist(path).map_err(|e| CliError::output(format!("{}: {e}", path.display())))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(CliError::output)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// Nine significant digits.
fn sig9(x: f64) -> String {
    format!("{x:.8e}")
}

/// OBJ text with one vertex per point and 1-based triangle faces.
pub fn obj_text(vertices: &[[f64; 3]], faces: &[[usize; 3]]) -> String {
    let mut s = String::new();
    for v in vertices {
        let _ = writeln!(s, "v {} {} {}", sig9(v[0]), sig9(v[1]), sig9(v[2]));
    }
    for f in faces {
        let _ = writeln!(s, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    s
}

/// Vertices and faces (0-based) of an OBJ file; other records are ignored.
pub fn parse_obj(text: &str) -> Result<(Vec<[f64; 3]>, Vec<[usize; 3]>), CliError> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let mut parts = line.split_whitespace();
        let bad = || CliError::Config(format!("OBJ line {}: {line}", n + 1));
        match parts.next() {
            Some("v") => {
                let mut v = [0.0; 3];
                for x in &mut v {
                    *x = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
                }
                vertices.push(v);
            }
            Some("f") => {
                let mut f = [0usize; 3];
                for x in &mut f {
                    let index: usize = parts
                        .next()
                        .and_then(|p| p.split('/').next())
                        .and_then(|p| p.parse().ok())
                        .ok_or_else(bad)?;
                    *x = index.checked_sub(1).ok_or_else(bad)?;
                }
                faces.push(f);
            }
            _ => {}
        }
    }
    Ok((vertices, faces))
}

/// One row of the per-vertex geometry table. Curvature columns are empty
/// where no interior stencil is available.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GeometryRow {
    pub x: f64,
    pub y: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub e2u: Option<f64>,
    #[serde(rename = "H_num")]
    pub h_num: Option<f64>,
    #[serde(rename = "ReQ")]
    pub re_q: Option<f64>,
    #[serde(rename = "ImQ")]
    pub im_q: Option<f64>,
    pub conformal_defect: Option<f64>,
}

pub const GEOMETRY_COLUMNS: [&str; 13] =
    ["x", "y", "b1", "b2", "b3", "g1", "g2", "g3", "e2u", "H_num", "ReQ", "ImQ", "conformal_defect"];

pub fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(CliError::output)?;
    }
    w.into_inner().map_err(CliError::output)
}

/// CSV with columns `s, V_m...` for the given modes.
pub fn potential_csv(s: &[f64], modes: &[i64], potentials: &[Vec<f64>]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["s".to_string()];
    header.extend(modes.iter().map(|m| format!("V_{m}")));
    w.write_record(&header).map_err(CliError::output)?;
    for (k, s) in s.iter().enumerate() {
        let mut row = vec![s.to_string()];
        row.extend(potentials.iter().map(|v| v[k].to_string()));
        w.write_record(&row).map_err(CliError::output)?;
    }
    w.into_inner().map_err(CliError::output)
}

/// Sorted distinct values, merging those closer than `tol`.
fn distinct(mut values: Vec<f64>, tol: f64) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    values.dedup_by(|a, b| (*a - *b).abs() <= tol);
    values
}

/// Reads `ν` samples (columns `x, y, Re ν, Im ν`, with a header row) that
/// cover a uniform rectangular grid.
pub fn read_nu_csv(text: &str) -> Result<Grid<Complex64>, CliError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut rows: Vec<[f64; 4]> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(CliError::config)?;
        if record.len() != 4 {
            return Err(CliError::Config(format!("nu CSV rows need 4 columns, found {}", record.len())));
        }
        let mut v = [0.0; 4];
        for (k, x) in v.iter_mut().enumerate() {
            *x = record[k].parse().map_err(|e| CliError::Config(format!("nu CSV value {:?}: {e}", &record[k])))?;
        }
        rows.push(v);
    }
    if rows.is_empty() {
        return Err(CliError::Config("nu CSV is empty".into()));
    }
    let span = rows.iter().flat_map(|r| [r[0].abs(), r[1].abs()]).fold(1.0, f64::max);
    let tol = 1e-9 * span;
    let xs = distinct(rows.iter().map(|r| r[0]).collect(), tol);
    let ys = distinct(rows.iter().map(|r| r[1]).collect(), tol);
    let (nx, ny) = (xs.len(), ys.len());
    if nx < 2 || ny < 2 || rows.len() != nx * ny {
        return Err(CliError::Config("nu CSV does not cover a rectangular grid".into()));
    }
    let spec = GridSpec::new(xs[0], xs[nx - 1], ys[0], ys[ny - 1], nx, ny).map_err(CliError::config)?;
    let uniform = |v: &[f64], h: f64, x0: f64| v.iter().enumerate().all(|(k, x)| (x - (x0 + h * k as f64)).abs() <= tol.max(1e-9 * h));
    if !uniform(&xs, spec.hx(), xs[0]) || !uniform(&ys, spec.hy(), ys[0]) {
        return Err(CliError::Config("nu CSV grid is not uniform".into()));
    }
    let mut values = vec![None; nx * ny];
    for r in rows {
        let i = ((r[0] - spec.x0) / spec.hx()).round() as usize;
        let j = ((r[1] - spec.y0) / spec.hy()).round() as usize;
        let slot = &mut values[spec.index(i, j)];
        if slot.is_some() {
            return Err(CliError::Config(format!("nu CSV repeats the point ({}, {})", r[0], r[1])));
        }
        *slot = Some(Complex64::new(r[2], r[3]));
    }
    let values = values.into_iter().map(|v| v.expect("every slot filled")).collect();
    Ok(Grid { spec, values })
}
