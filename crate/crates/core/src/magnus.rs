//! Frame integration `S^{-1} dS = Ω` with the fourth-order two-point Magnus
//! scheme.
//!
//! On a segment `z(t) = z0 + t Δz` the node values are pulled back,
//! `Ω_i = A(z(t_i)) Δz + B(z(t_i)) conj(Δz)` at `t = 1/2 ∓ √3/6`, and the step is
//! `exp(½(Ω₁ + Ω₂) + (√3/12)[Ω₁, Ω₂])`, multiplied on the right of the frame.
//! The commutator sign is the one for `S' = S Ω`; the familiar minus sign
//! belongs to `Y' = Ω Y` and only gives second order here.
//! Steps are controlled by step doubling: `ε = ‖full - half²‖_F / atol`, the
//! step is accepted iff `ε ≤ 1` and the next one is scaled by
//! `clamp(safety ε^{-1/4}, ½, 2)`.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridSpec};
use crate::linalg::{commutator, exp_traceless, renormalize_det, Mat2, Sl2c};
use crate::seeds::{flatness_residual, Connection, FlatnessMode, DEFAULT_FD_STEP};

/// Flatness residual above which a grid run is flagged.
pub const FLATNESS_WARNING: f64 = 1e-6;
/// Flatness residual above which a grid run is refused.
pub const FLATNESS_ERROR: f64 = 1e-3;
/// Minimum number of nodes used for the path-order consistency check.
pub const MIN_DEFECT_SAMPLES: usize = 10;

const SQRT3: f64 = 1.732_050_807_568_877_2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub atol: f64,
    pub h0: f64,
    pub hmin: f64,
    pub hmax: f64,
    pub safety: f64,
    /// Renormalize the determinant after this many accepted steps.
    pub renormalize_every: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { atol: 1e-10, h0: 1e-2, hmin: 1e-8, hmax: 0.5, safety: 0.9, renormalize_every: 1 }
    }
}

impl IntegratorConfig {
    pub fn with_atol(atol: f64) -> Self {
        Self { atol, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.atol > 0.0) || !self.atol.is_finite() {
            return Err(Error::OutOfRange { name: "atol", value: self.atol });
        }
        if !(0.0 < self.hmin && self.hmin <= self.h0 && self.h0 <= self.hmax) || !self.hmax.is_finite() {
            return Err(Error::InvalidConfig("step bounds must satisfy 0 < hmin <= h0 <= hmax"));
        }
        if !(self.safety > 0.0 && self.safety <= 1.0) {
            return Err(Error::OutOfRange { name: "safety", value: self.safety });
        }
        if self.renormalize_every == 0 {
            return Err(Error::InvalidConfig("renormalize_every must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PathKind {
    Segment { z0: Complex64, z1: Complex64 },
    Polyline(Vec<Complex64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathSpec {
    pub kind: PathKind,
    pub initial_frame: Sl2c,
}

impl PathSpec {
    pub fn segment(z0: Complex64, z1: Complex64) -> Self {
        Self { kind: PathKind::Segment { z0, z1 }, initial_frame: Sl2c::IDENTITY }
    }

    pub fn polyline(points: Vec<Complex64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidConfig("polyline needs at least two points"));
        }
        Ok(Self { kind: PathKind::Polyline(points), initial_frame: Sl2c::IDENTITY })
    }

    pub fn with_initial_frame(mut self, frame: Sl2c) -> Self {
        self.initial_frame = frame;
        self
    }

    pub fn points(&self) -> Vec<Complex64> {
        match &self.kind {
            PathKind::Segment { z0, z1 } => alloc::vec![*z0, *z1],
            PathKind::Polyline(p) => p.clone(),
        }
    }
}

/// Step-control statistics of one or more integrations.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PathDiagnostics {
    pub steps_accepted: usize,
    pub steps_rejected: usize,
    /// Largest normalized local error `ε` over accepted steps.
    pub max_local_error: f64,
    /// Largest `|det S - 1|` seen before a renormalization.
    pub max_det_drift: f64,
    /// Largest `|det - 1|` of an accepted increment.
    pub max_increment_drift: f64,
    /// Sum of the determinant corrections applied.
    pub total_renormalization: f64,
}

impl PathDiagnostics {
    pub fn merge(&mut self, other: &PathDiagnostics) {
        self.steps_accepted += other.steps_accepted;
        self.steps_rejected += other.steps_rejected;
        self.max_local_error = self.max_local_error.max(other.max_local_error);
        self.max_det_drift = self.max_det_drift.max(other.max_det_drift);
        self.max_increment_drift = self.max_increment_drift.max(other.max_increment_drift);
        self.total_renormalization += other.total_renormalization;
    }
}

/// The Magnus exponent `σ` for the straight segment `[z0, z1]`.
pub fn magnus_exponent<C: Connection + ?Sized>(conn: &C, z0: Complex64, z1: Complex64) -> Result<Mat2> {
    let dz = z1 - z0;
    let node = |t: f64| -> Result<Mat2> {
        let (a, b) = conn.coefficients(z0 + dz * t)?;
        Ok(a * dz + b * dz.conj())
    };
    let o1 = node(0.5 - SQRT3 / 6.0)?;
    let o2 = node(0.5 + SQRT3 / 6.0)?;
    Ok((o1 + o2) * 0.5 + commutator(&o1, &o2) * (SQRT3 / 12.0))
}

/// One Magnus step over `[z0, z1]`: the increment `exp σ`.
pub fn magnus_step<C: Connection + ?Sized>(conn: &C, z0: Complex64, z1: Complex64) -> Result<Mat2> {
    exp_traceless(&magnus_exponent(conn, z0, z1)?)
}

/// `n` equal Magnus steps along `[z0, z1]`, renormalizing after each.
pub fn integrate_fixed<C: Connection + ?Sized>(
    conn: &C,
    start: &Sl2c,
    z0: Complex64,
    z1: Complex64,
    n: usize,
) -> Result<Sl2c> {
    if n == 0 {
        return Err(Error::InvalidConfig("fixed-step integration needs at least one step"));
    }
    let dz = (z1 - z0) / n as f64;
    let mut s = *start;
    for k in 0..n {
        let za = z0 + dz * k as f64;
        let zb = if k + 1 == n { z1 } else { za + dz };
        s = renormalize_det(&(*s.matrix() * magnus_step(conn, za, zb)?))?;
    }
    Ok(s)
}

/// Adaptive integration along one segment. `h` carries the step size between
/// calls so that polylines and grids do not restart from `h0`.
pub fn integrate_segment<C: Connection + ?Sized>(
    conn: &C,
    start: &Sl2c,
    z0: Complex64,
    z1: Complex64,
    cfg: &IntegratorConfig,
    h: &mut f64,
    diag: &mut PathDiagnostics,
) -> Result<Sl2c> {
    let length = (z1 - z0).norm();
    if length == 0.0 {
        return Ok(*start);
    }
    let dir = (z1 - z0) / length;
    let mut s = *start.matrix();
    let mut pos = 0.0;
    let mut since_renorm = 0;
    *h = h.clamp(cfg.hmin, cfg.hmax);
    while pos < length {
        let last = length - pos <= *h;
        let step = if last { length - pos } else { *h };
        let za = z0 + dir * pos;
        let zb = if last { z1 } else { za + dir * step };
        let zm = za + dir * (0.5 * step);
        let full = magnus_step(conn, za, zb)?;
        let half = magnus_step(conn, za, zm)? * magnus_step(conn, zm, zb)?;
        let err = (full - half).norm() / cfg.atol;
        if !err.is_finite() {
            return Err(Error::NonFinite { what: "local error estimate" });
        }
        let factor = if err == 0.0 { 2.0 } else { (cfg.safety * err.powf(-0.25)).clamp(0.5, 2.0) };
        if err <= 1.0 {
            s = s * half;
            pos = if last { length } else { pos + step };
            diag.steps_accepted += 1;
            diag.max_local_error = diag.max_local_error.max(err);
            diag.max_increment_drift = diag.max_increment_drift.max((half.det() - 1.0).norm());
            since_renorm += 1;
            if since_renorm >= cfg.renormalize_every || pos >= length {
                let drift = (s.det() - 1.0).norm();
                diag.max_det_drift = diag.max_det_drift.max(drift);
                diag.total_renormalization += drift;
                s = *renormalize_det(&s)?.matrix();
                since_renorm = 0;
            }
            if !last {
                *h = (step * factor).clamp(cfg.hmin, cfg.hmax);
            }
        } else {
            diag.steps_rejected += 1;
            if step <= cfg.hmin {
                return Err(Error::StepUnderflow { position: pos, step });
            }
            *h = (step * factor).clamp(cfg.hmin, cfg.hmax);
        }
    }
    renormalize_det(&s)
}

/// Integrates along a segment or polyline from `path.initial_frame`.
pub fn integrate_path<C: Connection + ?Sized>(
    conn: &C,
    path: &PathSpec,
    cfg: &IntegratorConfig,
) -> Result<(Sl2c, PathDiagnostics)> {
    cfg.validate()?;
    let points = path.points();
    if points.len() < 2 {
        return Err(Error::InvalidConfig("polyline needs at least two points"));
    }
    let mut diag = PathDiagnostics::default();
    let mut h = cfg.h0;
    let mut s = path.initial_frame;
    for w in points.windows(2) {
        s = integrate_segment(conn, &s, w[0], w[1], cfg, &mut h, &mut diag)?;
    }
    Ok((s, diag))
}

/// Frames along the left column `x = x0`, bottom to top.
pub fn integrate_left_column<C: Connection + ?Sized>(
    conn: &C,
    spec: &GridSpec,
    initial: &Sl2c,
    cfg: &IntegratorConfig,
) -> Result<(Vec<Sl2c>, PathDiagnostics)> {
    let mut diag = PathDiagnostics::default();
    let mut h = cfg.h0;
    let mut column = Vec::with_capacity(spec.ny);
    column.push(*initial);
    for j in 1..spec.ny {
        let s = integrate_segment(conn, &column[j - 1], spec.point(0, j - 1), spec.point(0, j), cfg, &mut h, &mut diag)?;
        column.push(s);
    }
    Ok((column, diag))
}

/// Frames along row `j`, starting from the left-column frame `start`.
pub fn integrate_row<C: Connection + ?Sized>(
    conn: &C,
    spec: &GridSpec,
    j: usize,
    start: &Sl2c,
    cfg: &IntegratorConfig,
) -> Result<(Vec<Sl2c>, PathDiagnostics)> {
    let mut diag = PathDiagnostics::default();
    let mut h = cfg.h0;
    let mut row = Vec::with_capacity(spec.nx);
    row.push(*start);
    for i in 1..spec.nx {
        let s = integrate_segment(conn, &row[i - 1], spec.point(i - 1, j), spec.point(i, j), cfg, &mut h, &mut diag)?;
        row.push(s);
    }
    Ok((row, diag))
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrameGrid {
    pub frames: Grid<Sl2c>,
    /// `|det S - 1|` of each stored frame.
    pub det_drift: Grid<f64>,
    pub diagnostics: PathDiagnostics,
    /// Largest flatness residual over the sampled cell centres.
    pub max_flatness_residual: f64,
    /// Largest `‖S_row - S_col‖_F / max(1, ‖S_row‖_F)` over the sampled nodes.
    pub cell_defect: f64,
    pub flatness_warning: bool,
}

impl FrameGrid {
    pub fn spec(&self) -> &GridSpec {
        &self.frames.spec
    }

    pub fn frame(&self, i: usize, j: usize) -> &Sl2c {
        self.frames.get(i, j)
    }
}

/// Largest flatness residual at the cell centres of `spec`, using closed-form
/// derivatives where the connection provides them and a stencil confined to
/// the cell otherwise.
pub fn max_cell_flatness<C: Connection + ?Sized>(conn: &C, spec: &GridSpec) -> Result<f64> {
    let h = DEFAULT_FD_STEP.min(0.25 * spec.hx()).min(0.25 * spec.hy());
    let mut max = 0.0f64;
    for j in 0..spec.ny - 1 {
        for i in 0..spec.nx - 1 {
            let z = (spec.point(i, j) + spec.point(i + 1, j + 1)) * 0.5;
            let r = match flatness_residual(conn, z, h, FlatnessMode::Analytic) {
                Err(Error::AnalyticUnavailable) => flatness_residual(conn, z, h, FlatnessMode::FiniteDifference)?,
                other => other?,
            };
            max = max.max(r.norm());
        }
    }
    Ok(max)
}

/// Nodes used for the path-order check: an evenly strided subset of the
/// non-axis nodes, at least [`MIN_DEFECT_SAMPLES`] of them when available.
pub fn defect_sample_nodes(spec: &GridSpec) -> Vec<(usize, usize)> {
    let candidates: Vec<(usize, usize)> =
        (1..spec.ny).flat_map(|j| (1..spec.nx).map(move |i| (i, j))).collect();
    let target = MIN_DEFECT_SAMPLES.max(16);
    if candidates.len() <= target {
        return candidates;
    }
    let stride = candidates.len() as f64 / target as f64;
    let mut out: Vec<(usize, usize)> = (0..target).map(|k| candidates[((k as f64 + 0.5) * stride) as usize]).collect();
    // Always include the far corner, where the enclosed area is largest.
    let corner = (spec.nx - 1, spec.ny - 1);
    if !out.contains(&corner) {
        out.push(corner);
    }
    out
}

/// Re-integrates to `(i, j)` along the bottom row and then up column `i`.
pub fn column_major_frame<C: Connection + ?Sized>(
    conn: &C,
    spec: &GridSpec,
    initial: &Sl2c,
    (i, j): (usize, usize),
    cfg: &IntegratorConfig,
) -> Result<Sl2c> {
    let mut points = Vec::with_capacity(i + j + 1);
    points.extend((0..=i).map(|k| spec.point(k, 0)));
    points.extend((1..=j).map(|k| spec.point(i, k)));
    if points.len() < 2 {
        return Ok(*initial);
    }
    let path = PathSpec::polyline(points)?.with_initial_frame(*initial);
    Ok(integrate_path(conn, &path, cfg)?.0)
}

/// Builds a [`FrameGrid`] from the left column and the rows (row `j` starts
/// at `column[j]`), then runs the flatness and path-order checks.
pub fn assemble_frame_grid<C: Connection + ?Sized>(
    conn: &C,
    spec: &GridSpec,
    rows: Vec<(Vec<Sl2c>, PathDiagnostics)>,
    column_diag: PathDiagnostics,
    cfg: &IntegratorConfig,
) -> Result<FrameGrid> {
    let mut diagnostics = column_diag;
    let mut values = Vec::with_capacity(spec.len());
    for (row, d) in rows {
        diagnostics.merge(&d);
        values.extend(row);
    }
    if values.len() != spec.len() {
        return Err(Error::InvalidConfig("row lengths do not match the grid"));
    }
    let frames = Grid { spec: *spec, values };
    let det_drift = frames.map(|s| s.det_drift());
    let max_flatness_residual = max_cell_flatness(conn, spec)?;
    let initial = *frames.get(0, 0);
    let mut cell_defect = 0.0f64;
    for node in defect_sample_nodes(spec) {
        let row = frames.get(node.0, node.1).matrix();
        let col = column_major_frame(conn, spec, &initial, node, cfg)?;
        cell_defect = cell_defect.max((*row - *col.matrix()).norm() / row.norm().max(1.0));
    }
    if max_flatness_residual > FLATNESS_ERROR {
        return Err(Error::NonIntegrable { max_flatness_residual, cell_defect });
    }
    Ok(FrameGrid {
        frames,
        det_drift,
        diagnostics,
        max_flatness_residual,
        cell_defect,
        flatness_warning: max_flatness_residual > FLATNESS_WARNING,
    })
}

/// Frames on every node of `spec`: up the left column, then across each row.
pub fn integrate_grid<C: Connection + ?Sized>(
    conn: &C,
    spec: &GridSpec,
    initial: &Sl2c,
    cfg: &IntegratorConfig,
) -> Result<FrameGrid> {
    spec.validate()?;
    cfg.validate()?;
    let (column, column_diag) = integrate_left_column(conn, spec, initial, cfg)?;
    let rows = column
        .iter()
        .enumerate()
        .map(|(j, s)| integrate_row(conn, spec, j, s, cfg))
        .collect::<Result<Vec<_>>>()?;
    assemble_frame_grid(conn, spec, rows, column_diag, cfg)
}
