//! Immersion `f = S S^*`, Gauss map, extracted curvature data and the Kokubu
//! target metric.
//!
//! Extraction conventions, read off from the frame relations of the Lax pair
//! (`e^{-u} f_z = F E12 F^*`, `n = F σ3 F^*` for an adapted frame `F`):
//!
//! ```text
//! <f_z, f_z̄> = e^{2u}/2,   H = 2 e^{-2u} <f_zz̄, n>,   Q = 2 <f_zz, n>,
//! n = [f_z f^{-1}, f_z̄ f^{-1}] f / e^{2u}.
//! ```
//!
//! The last identity holds for any frame of `f`, so the normal needs no
//! adapted frame and its orientation is continuous by construction.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridSpec};
use crate::hyperbolic::{lorentz_bilinear, to_ball, to_coords, BallPoint, HermitianPoint};
use crate::laxpair::{first_difference, second_difference, DifferenceScheme};
use crate::linalg::{commutator, iwasawa_split, Mat2, Sl2c, Su2};
use crate::magnus::FrameGrid;

/// Largest determinant drift accepted by [`immerse`].
pub const IMMERSION_DET_TOLERANCE: f64 = 1e-6;
/// Conformal factors below this are treated as a degenerate metric.
pub const DEGENERATE_METRIC: f64 = 1e-12;
/// Distance to the singular circle below which the Kokubu metric is refused.
pub const KOKUBU_SINGULAR_TOLERANCE: f64 = 1e-10;

/// `f = S S^*`, Hermitian-symmetrized.
pub fn immerse(s: &Sl2c) -> Result<HermitianPoint> {
    let drift = s.det_drift();
    if !(drift <= IMMERSION_DET_TOLERANCE) {
        return Err(Error::NotUnimodular { defect: drift });
    }
    let m = *s.matrix() * s.matrix().adjoint();
    HermitianPoint::new((m + m.adjoint()) * 0.5)
}

/// Coordinates `(x1, x2, x3)` of a traceless Hermitian matrix
/// `[[x3, x1 + i x2], [x1 - i x2, -x3]]`.
pub fn pauli_coords(x: &Mat2) -> [f64; 3] {
    let [_, x1, x2, x3] = to_coords(x);
    [x1, x2, x3]
}

/// `-Φ σ3 Φ^*` for the unitary factor of `S = F_s Φ`.
pub fn gauss_matrix(phi: &Su2) -> Mat2 {
    let m = -(*phi.matrix() * Mat2::SIGMA3 * phi.matrix().adjoint());
    (m + m.adjoint()) * 0.5
}

/// The Gauss map of the frame `S` as a unit vector.
pub fn gauss_map(s: &Sl2c) -> Result<[f64; 3]> {
    let (_, phi) = iwasawa_split(s)?;
    Ok(pauli_coords(&gauss_matrix(&phi)))
}

/// Stereographic coordinate `(g1 + i g2)/(1 - g3)` from the north pole.
pub fn stereographic(g: &[f64; 3]) -> Result<Complex64> {
    let d = 1.0 - g[2];
    if !(d.abs() > 1e-14) {
        return Err(Error::SingularDenominator { what: "stereographic projection at the north pole" });
    }
    Ok(Complex64::new(g[0], g[1]) / d)
}

/// Everything attached to one frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfacePoint {
    pub f: HermitianPoint,
    pub phi: Su2,
    pub gauss: [f64; 3],
    pub ball: BallPoint,
}

pub fn surface_point(s: &Sl2c) -> Result<SurfacePoint> {
    let f = immerse(s)?;
    let (_, phi) = iwasawa_split(s)?;
    let gauss = pauli_coords(&gauss_matrix(&phi));
    Ok(SurfacePoint { f, phi, gauss, ball: to_ball(&f)? })
}

/// `H = (1 - |λ|²)/(1 + |λ|²)`.
pub fn h_from_lambda(lambda: Complex64) -> Result<f64> {
    let m2 = lambda.norm_sqr();
    if m2 == 0.0 || !m2.is_finite() {
        return Err(Error::ZeroLambda);
    }
    Ok((1.0 - m2) / (1.0 + m2))
}

/// Whether `λ` lies in the regime `|λ| ≤ 1`, i.e. `0 ≤ H < 1`.
pub fn cmc_interpretable(lambda: Complex64) -> bool {
    lambda.norm() <= 1.0
}

/// `|ζ| = sqrt((1+H)/(1-H))`.
pub fn singular_radius(h: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&h) {
        return Err(Error::OutOfRange { name: "H", value: h });
    }
    Ok(((1.0 + h) / (1.0 - h)).sqrt())
}

/// Coefficient of `|dζ|²` in `4|dζ|² / ((1+|ζ|²)((1-|ζ|²) + H(1+|ζ|²)))`.
///
/// Positive inside the singular circle; refused on it and beyond it.
pub fn kokubu_metric(zeta: Complex64, h: f64) -> Result<f64> {
    let r = singular_radius(h)?;
    let m = zeta.norm();
    if (m - r).abs() <= KOKUBU_SINGULAR_TOLERANCE {
        return Err(Error::SingularDenominator { what: "Kokubu metric on the singular circle" });
    }
    if m > r {
        return Err(Error::OutOfRange { name: "|zeta| beyond the singular circle", value: m });
    }
    let a = zeta.norm_sqr();
    Ok(4.0 / ((1.0 + a) * ((1.0 - a) + h * (1.0 + a))))
}

/// Curvature data extracted at one interior node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometrySample {
    pub i: usize,
    pub j: usize,
    pub e2u: f64,
    pub h: f64,
    pub q: Complex64,
    /// `|<f_z, f_z>| / <f_z, f_z̄>`.
    pub conformal_defect: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtractedGeometry {
    pub spec: GridSpec,
    pub scheme: DifferenceScheme,
    pub samples: Vec<GeometrySample>,
}

impl ExtractedGeometry {
    pub fn median_h(&self) -> f64 {
        median(self.samples.iter().map(|s| s.h).collect())
    }

    pub fn max_conformal_defect(&self) -> f64 {
        self.samples.iter().map(|s| s.conformal_defect).fold(0.0, f64::max)
    }

    /// Largest `|H - target|` over the samples.
    pub fn max_h_error(&self, target: f64) -> f64 {
        self.samples.iter().map(|s| (s.h - target).abs()).fold(0.0, f64::max)
    }

    pub fn sample(&self, i: usize, j: usize) -> Option<&GeometrySample> {
        self.samples.iter().find(|s| s.i == i && s.j == j)
    }
}

/// Median of a non-empty list (mean of the middle pair for even lengths).
pub fn median(mut values: Vec<f64>) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Immersion values `f = S S^*` on the grid.
pub fn immersion_grid(frames: &Grid<Sl2c>) -> Result<Grid<Mat2>> {
    let values = frames.values.iter().map(|s| immerse(s).map(|f| *f.matrix())).collect::<Result<Vec<_>>>()?;
    Ok(Grid { spec: frames.spec, values })
}

/// Extracts `e^{2u}`, `H`, `Q` and the conformal defect at every node at
/// least `scheme.margin()` away from the boundary.
pub fn extract_geometry(grid: &FrameGrid, scheme: DifferenceScheme) -> Result<ExtractedGeometry> {
    extract_from_immersion(&immersion_grid(&grid.frames)?, scheme)
}

pub fn extract_from_immersion(f: &Grid<Mat2>, scheme: DifferenceScheme) -> Result<ExtractedGeometry> {
    let spec = f.spec;
    let margin = scheme.margin();
    if spec.nx < 5 || spec.ny < 5 {
        return Err(Error::GridTooSmall { nx: spec.nx, ny: spec.ny, min: 5 });
    }
    let (hx, hy) = (spec.hx(), spec.hy());
    let i_unit = Complex64::i();
    let mut samples = Vec::new();
    for j in margin..spec.ny - margin {
        for i in margin..spec.nx - margin {
            let at = |di: isize, dj: isize| *f.get((i as isize + di) as usize, (j as isize + dj) as usize);
            let f0 = at(0, 0);
            let fx = first_difference(scheme, hx, |k| at(k, 0));
            let fy = first_difference(scheme, hy, |k| at(0, k));
            let fxx = second_difference(scheme, hx, |k| at(k, 0));
            let fyy = second_difference(scheme, hy, |k| at(0, k));
            let fxy = first_difference(scheme, hx, |k| first_difference(scheme, hy, |l| at(k, l)));
            let fz = (fx - fy * i_unit) * 0.5;
            let fzbar = (fx + fy * i_unit) * 0.5;
            let fzz = (fxx - fyy - fxy * (2.0 * i_unit)) * 0.25;
            let fzzbar = (fxx + fyy) * 0.25;

            let metric = lorentz_bilinear(&fz, &fzbar).re;
            let e2u = 2.0 * metric;
            if !(e2u > DEGENERATE_METRIC) {
                return Err(Error::DegenerateMetric { i, j, value: e2u });
            }
            let conformal_defect = lorentz_bilinear(&fz, &fz).norm() / metric;

            let finv = f0.inverse()?;
            let n = commutator(&(fz * finv), &(fzbar * finv)) * f0 * (1.0 / e2u);
            let n = (n + n.adjoint()) * 0.5;
            let nn = lorentz_bilinear(&n, &n).re;
            if !(nn > 0.0) {
                return Err(Error::DegenerateMetric { i, j, value: nn });
            }
            let n = n * (1.0 / nn.sqrt());

            let h = 2.0 / e2u * lorentz_bilinear(&fzzbar, &n).re;
            let q = lorentz_bilinear(&fzz, &n) * 2.0;
            samples.push(GeometrySample { i, j, e2u, h, q, conformal_defect });
        }
    }
    Ok(ExtractedGeometry { spec, scheme, samples })
}

/// Two triangles per grid cell, vertices indexed row-major.
pub fn triangulate(spec: &GridSpec) -> Vec<[usize; 3]> {
    let mut faces = Vec::with_capacity(2 * (spec.nx - 1) * (spec.ny - 1));
    for j in 0..spec.ny - 1 {
        for i in 0..spec.nx - 1 {
            let (a, b) = (spec.index(i, j), spec.index(i + 1, j));
            let (c, d) = (spec.index(i + 1, j + 1), spec.index(i, j + 1));
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    faces
}

/// Faces whose area is at most `tolerance`.
pub fn degenerate_faces(vertices: &[[f64; 3]], faces: &[[usize; 3]], tolerance: f64) -> Vec<bool> {
    faces
        .iter()
        .map(|&[a, b, c]| {
            let (p, q, r) = (vertices[a], vertices[b], vertices[c]);
            let u = [q[0] - p[0], q[1] - p[1], q[2] - p[2]];
            let v = [r[0] - p[0], r[1] - p[1], r[2] - p[2]];
            let n = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
            0.5 * (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt() <= tolerance
        })
        .collect()
}
