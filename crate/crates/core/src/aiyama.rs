//! Aiyama–Akutagawa connection data built from a Gauss-map function `ν`.
//!
//! ```text
//! ω = -2 ν̄_z / (sqrt(1-H²)(1-|ν|⁴)) dz,      α = [[-ν, ν²], [-1, ν]] ω,
//! τ = ½((1+H)α + (1-H)α^*) + (sqrt(1-H²)/4)[σ3, α + α^*].
//! ```
//!
//! `F^{-1} dF = τ` gives `f = F F^*`. The commutator terms cancel in
//! `τ + τ^*`, so `f_z = F α₀ F^*` for the `dz`-coefficient `α₀` of `α`, and the
//! induced metric is `(1+|ν|²)² |ω|² |dz|²` whether or not `τ` is flat.

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridSpec};
use crate::laxpair::DifferenceScheme;
use crate::linalg::{commutator, Mat2, Sl2c};
use crate::magnus::{
    integrate_left_column, integrate_row, max_cell_flatness, FrameGrid, IntegratorConfig, PathDiagnostics,
    FLATNESS_ERROR, FLATNESS_WARNING,
};
use crate::seeds::{Connection, ScalarField};
use crate::surface::{extract_geometry, gauss_map, immerse, immersion_grid};

/// Smallest admissible `|1 - |ν|⁴|`.
pub const UNIT_CIRCLE_MARGIN: f64 = 1e-6;

/// A Gauss-map function `ν(z)` together with `∂_z ν̄`.
pub trait GaussMapField {
    fn nu(&self, z: Complex64) -> Result<Complex64>;
    fn nu_bar_z(&self, z: Complex64) -> Result<Complex64>;
}

/// `ν = z̄/2`, so `ν̄_z = 1/2`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HalfConjugate;

impl GaussMapField for HalfConjugate {
    fn nu(&self, z: Complex64) -> Result<Complex64> {
        Ok(z.conj() * 0.5)
    }

    fn nu_bar_z(&self, _z: Complex64) -> Result<Complex64> {
        Ok(Complex64::new(0.5, 0.0))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantNu(pub Complex64);

impl GaussMapField for ConstantNu {
    fn nu(&self, _z: Complex64) -> Result<Complex64> {
        Ok(self.0)
    }

    fn nu_bar_z(&self, _z: Complex64) -> Result<Complex64> {
        Ok(Complex64::new(0.0, 0.0))
    }
}

/// `ν` and `ν̄_z` given as closures.
#[derive(Clone)]
pub struct AnalyticNu {
    pub nu: ScalarField,
    pub nu_bar_z: ScalarField,
}

impl GaussMapField for AnalyticNu {
    fn nu(&self, z: Complex64) -> Result<Complex64> {
        Ok((self.nu)(z))
    }

    fn nu_bar_z(&self, z: Complex64) -> Result<Complex64> {
        Ok((self.nu_bar_z)(z))
    }
}

/// Samples of `ν` on a grid, read through tensor-product cubic Lagrange
/// interpolation; `ν̄_z` is the conjugate of the interpolant's `∂_z̄`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledNu {
    pub grid: Grid<Complex64>,
}

/// Stencil start and the weights and their derivatives (per unit spacing).
fn lagrange4(t_cell: f64, n: usize) -> (usize, [f64; 4], [f64; 4]) {
    let k = (t_cell.floor().max(0.0) as usize).min(n - 2);
    let base = k.saturating_sub(1).min(n - 4);
    let t = t_cell - base as f64;
    let mut w = [0.0; 4];
    let mut dw = [0.0; 4];
    for m in 0..4 {
        let mut num = 1.0;
        let mut den = 1.0;
        let mut dnum = 0.0;
        for q in 0..4 {
            if q == m {
                continue;
            }
            den *= (m as f64) - (q as f64);
            dnum = dnum * (t - q as f64) + num;
            num *= t - q as f64;
        }
        w[m] = num / den;
        dw[m] = dnum / den;
    }
    (base, w, dw)
}

impl SampledNu {
    pub fn new(grid: Grid<Complex64>) -> Result<Self> {
        if grid.spec.nx < 4 || grid.spec.ny < 4 {
            return Err(Error::GridTooSmall { nx: grid.spec.nx, ny: grid.spec.ny, min: 4 });
        }
        Ok(Self { grid })
    }

    /// `(ν, ν_x, ν_y)` at `z`.
    fn interpolate(&self, z: Complex64) -> Result<(Complex64, Complex64, Complex64)> {
        let s = &self.grid.spec;
        let slack = 1e-9;
        if z.re < s.x0 - slack * s.hx() || z.re > s.x1 + slack * s.hx() || z.im < s.y0 - slack * s.hy() || z.im > s.y1 + slack * s.hy() {
            return Err(Error::OutsideDomain { re: z.re, im: z.im });
        }
        let (bx, wx, dwx) = lagrange4((z.re - s.x0) / s.hx(), s.nx);
        let (by, wy, dwy) = lagrange4((z.im - s.y0) / s.hy(), s.ny);
        let zero = Complex64::new(0.0, 0.0);
        let (mut v, mut vx, mut vy) = (zero, zero, zero);
        for b in 0..4 {
            for a in 0..4 {
                let f = *self.grid.get(bx + a, by + b);
                v += f * (wx[a] * wy[b]);
                vx += f * (dwx[a] * wy[b]);
                vy += f * (wx[a] * dwy[b]);
            }
        }
        Ok((v, vx / s.hx(), vy / s.hy()))
    }
}

impl GaussMapField for SampledNu {
    fn nu(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.interpolate(z)?.0)
    }

    fn nu_bar_z(&self, z: Complex64) -> Result<Complex64> {
        let (_, vx, vy) = self.interpolate(z)?;
        Ok(((vx + vy * Complex64::i()) * 0.5).conj())
    }
}

/// A Gauss-map function and a mean curvature `0 ≤ H < 1`.
#[derive(Clone)]
pub struct AAData<G> {
    pub nu: G,
    pub h: f64,
}

impl<G: GaussMapField> AAData<G> {
    pub fn new(nu: G, h: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&h) {
            return Err(Error::OutOfRange { name: "H", value: h });
        }
        Ok(Self { nu, h })
    }

    fn root(&self) -> f64 {
        (1.0 - self.h * self.h).sqrt()
    }
}

/// Coefficient of `dz` in `ω`.
pub fn aa_omega<G: GaussMapField>(data: &AAData<G>, z: Complex64) -> Result<Complex64> {
    let nu = data.nu.nu(z)?;
    let d = 1.0 - nu.norm_sqr() * nu.norm_sqr();
    if !(d.abs() >= UNIT_CIRCLE_MARGIN) {
        return Err(Error::SingularDenominator { what: "1 - |nu|^4 near the unit circle" });
    }
    Ok(data.nu.nu_bar_z(z)? * (-2.0 / (data.root() * d)))
}

/// Coefficient of `dz` in `α`.
pub fn aa_alpha<G: GaussMapField>(data: &AAData<G>, z: Complex64) -> Result<Mat2> {
    let nu = data.nu.nu(z)?;
    let one = Complex64::new(1.0, 0.0);
    Ok(Mat2::new(-nu, nu * nu, -one, nu) * aa_omega(data, z)?)
}

/// `(A_τ, B_τ)`, the `dz`- and `dz̄`-coefficients of `τ`.
pub fn aa_tau<G: GaussMapField>(data: &AAData<G>, z: Complex64) -> Result<(Mat2, Mat2)> {
    let a0 = aa_alpha(data, z)?;
    let a0s = a0.adjoint();
    let k = 0.25 * data.root();
    let s3 = Mat2::SIGMA3;
    Ok((
        a0 * (0.5 * (1.0 + data.h)) + commutator(&s3, &a0) * k,
        a0s * (0.5 * (1.0 - data.h)) + commutator(&s3, &a0s) * k,
    ))
}

/// `(1+|ν|²)² |ω|²`.
pub fn induced_metric_aa<G: GaussMapField>(data: &AAData<G>, z: Complex64) -> Result<f64> {
    let w = 1.0 + data.nu.nu(z)?.norm_sqr();
    Ok(w * w * aa_omega(data, z)?.norm_sqr())
}

impl<G: GaussMapField> Connection for AAData<G> {
    fn coefficients(&self, z: Complex64) -> Result<(Mat2, Mat2)> {
        aa_tau(self, z)
    }
}

/// Frames of `τ` and the immersion `f = F F^*`.
#[derive(Clone, Debug, PartialEq)]
pub struct AAReconstruction {
    pub frames: FrameGrid,
    pub immersion: Grid<Mat2>,
}

/// Integrates `τ` row-major from `initial` and reports flatness like
/// [`crate::magnus::integrate_grid`]. With `strict`, residuals above the
/// error threshold are refused; otherwise the frames are returned with the
/// residual recorded.
pub fn aa_reconstruct<G: GaussMapField>(
    data: &AAData<G>,
    spec: &GridSpec,
    initial: &Sl2c,
    cfg: &IntegratorConfig,
    strict: bool,
) -> Result<AAReconstruction> {
    spec.validate()?;
    cfg.validate()?;
    let (column, mut diagnostics) = integrate_left_column(data, spec, initial, cfg)?;
    let mut values = Vec::with_capacity(spec.len());
    for (j, s) in column.iter().enumerate() {
        let (row, d): (Vec<Sl2c>, PathDiagnostics) = integrate_row(data, spec, j, s, cfg)?;
        diagnostics.merge(&d);
        values.extend(row);
    }
    let frames = Grid { spec: *spec, values };
    let max_flatness_residual = max_cell_flatness(data, spec)?;
    if strict && max_flatness_residual > FLATNESS_ERROR {
        return Err(Error::NonIntegrable { max_flatness_residual, cell_defect: f64::NAN });
    }
    let immersion = immersion_grid(&frames)?;
    let det_drift = frames.map(|s| s.det_drift());
    Ok(AAReconstruction {
        frames: FrameGrid {
            frames,
            det_drift,
            diagnostics,
            max_flatness_residual,
            cell_defect: f64::NAN,
            flatness_warning: max_flatness_residual > FLATNESS_WARNING,
        },
        immersion,
    })
}

/// Stereographic convention used to read `ν` off the Gauss map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Projection {
    /// `(g1 + i g2)/(1 - g3)`.
    North,
    /// `(g1 + i g2)/(1 + g3)`.
    South,
}

impl Projection {
    pub fn apply(&self, g: &[f64; 3]) -> Result<Complex64> {
        let d = match self {
            Projection::North => 1.0 - g[2],
            Projection::South => 1.0 + g[2],
        };
        if !(d.abs() > 1e-14) {
            return Err(Error::SingularDenominator { what: "stereographic projection at its pole" });
        }
        Ok(Complex64::new(g[0], g[1]) / d)
    }
}

/// `ν` sampled from the Gauss map of a frame grid.
pub fn nu_from_frames(frames: &FrameGrid, projection: Projection) -> Result<SampledNu> {
    let values = frames
        .frames
        .values
        .iter()
        .map(|s| projection.apply(&gauss_map(s)?))
        .collect::<Result<Vec<_>>>()?;
    SampledNu::new(Grid { spec: frames.frames.spec, values })
}

/// Outcome of feeding a frame grid's Gauss map back through `τ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedLoopReport {
    /// Largest `‖f_τ - f‖_F` over nodes at least two cells from the boundary.
    pub max_f_error: f64,
    /// Largest flatness residual of `τ` on the grid.
    pub max_flatness_residual: f64,
    /// Largest `|induced_metric_aa - e^{2u}|` against the extracted metric,
    /// or `None` if the original metric could not be extracted.
    pub max_metric_error: Option<f64>,
}

/// Reads `ν` off `original`, integrates `τ` for mean curvature `h` from the
/// original frame at the first node, and compares the immersions.
pub fn closed_loop(
    original: &FrameGrid,
    h: f64,
    projection: Projection,
    cfg: &IntegratorConfig,
) -> Result<ClosedLoopReport> {
    let spec = *original.spec();
    let data = AAData::new(nu_from_frames(original, projection)?, h)?;
    let rebuilt = aa_reconstruct(&data, &spec, original.frame(0, 0), cfg, false)?;
    let margin = 2;
    let mut max_f_error = 0.0f64;
    for j in margin..spec.ny.saturating_sub(margin) {
        for i in margin..spec.nx.saturating_sub(margin) {
            let f = immerse(original.frame(i, j))?;
            max_f_error = max_f_error.max((*rebuilt.immersion.get(i, j) - *f.matrix()).norm());
        }
    }
    let max_metric_error = match extract_geometry(original, DifferenceScheme::Central) {
        Ok(g) => {
            let mut worst = 0.0f64;
            for s in &g.samples {
                let m = induced_metric_aa(&data, spec.point(s.i, s.j))?;
                worst = worst.max((m - s.e2u).abs());
            }
            Some(worst)
        }
        Err(_) => None,
    };
    Ok(ClosedLoopReport { max_f_error, max_flatness_residual: rebuilt.frames.max_flatness_residual, max_metric_error })
}

/// Convenience wrapper so that trait objects can be shared across threads.
pub type SharedNu = Arc<dyn GaussMapField + Send + Sync>;

impl GaussMapField for SharedNu {
    fn nu(&self, z: Complex64) -> Result<Complex64> {
        (**self).nu(z)
    }

    fn nu_bar_z(&self, z: Complex64) -> Result<Complex64> {
        (**self).nu_bar_z(z)
    }
}

#[cfg(test)]
mod tests {
    extern crate std;

    use super::*;
    use crate::magnus::{integrate_grid, integrate_path, PathSpec};
    use crate::seeds::{ConnectionField, RankOneSeed, TanProfile};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn omega_examples() {
        let d0 = AAData::new(HalfConjugate, 0.0).unwrap();
        assert_eq!(aa_omega(&d0, c(0.0, 0.0)).unwrap(), c(-1.0, 0.0));
        let d6 = AAData::new(HalfConjugate, 0.6).unwrap();
        let z = c(0.3, -0.2);
        let ratio = aa_omega(&d6, z).unwrap() / aa_omega(&d0, z).unwrap();
        assert!((ratio - 1.25).norm() < 1e-15);
        let hol = AAData::new(ConstantNu(c(0.3, 0.1)), 0.2).unwrap();
        assert_eq!(aa_omega(&hol, z).unwrap(), c(0.0, 0.0));
        let unit = AAData::new(ConstantNu(c(1.0, 0.0)), 0.2).unwrap();
        assert!(aa_omega(&unit, z).is_err());
        assert!(AAData::new(HalfConjugate, 1.0).is_err());
    }

    #[test]
    fn alpha_and_metric_examples() {
        let d0 = AAData::new(HalfConjugate, 0.0).unwrap();
        assert_eq!(aa_alpha(&d0, c(0.0, 0.0)).unwrap(), Mat2::E21);
        assert_eq!(induced_metric_aa(&d0, c(0.0, 0.0)).unwrap(), 1.0);
        let hol = AAData::new(ConstantNu(c(0.3, 0.1)), 0.2).unwrap();
        assert_eq!(induced_metric_aa(&hol, c(0.5, 0.5)).unwrap(), 0.0);
        let (a, b) = aa_tau(&hol, c(0.1, 0.1)).unwrap();
        assert_eq!((a, b), (Mat2::ZERO, Mat2::ZERO));
    }

    #[test]
    fn tau_at_h_zero_specializes() {
        let d0 = AAData::new(HalfConjugate, 0.0).unwrap();
        let z = c(0.2, 0.4);
        let a0 = aa_alpha(&d0, z).unwrap();
        let (a, b) = aa_tau(&d0, z).unwrap();
        let s3 = Mat2::SIGMA3;
        assert!((a - (a0 * 0.5 + commutator(&s3, &a0) * 0.25)).norm() < 1e-15);
        assert!((b - (a0.adjoint() * 0.5 + commutator(&s3, &a0.adjoint()) * 0.25)).norm() < 1e-15);
    }

    #[test]
    fn constant_nu_reconstructs_the_basepoint() {
        let data = AAData::new(ConstantNu(c(0.2, -0.1)), 0.4).unwrap();
        let spec = GridSpec::square(0.0, 0.0, 0.3, 6).unwrap();
        let r = aa_reconstruct(&data, &spec, &Sl2c::IDENTITY, &IntegratorConfig::default(), true).unwrap();
        assert!(r.immersion.values.iter().all(|f| *f == Mat2::IDENTITY));
    }

    #[test]
    fn immersion_derivative_is_alpha() {
        // Along the x-axis f_x = F (α₀ + α₀^*) F^*, flat or not.
        let data = AAData::new(HalfConjugate, 0.3).unwrap();
        let cfg = IntegratorConfig::with_atol(1e-13);
        let f_at = |x: f64| {
            let (s, _) = integrate_path(&data, &PathSpec::segment(c(0.0, 0.0), c(x, 0.0)), &cfg).unwrap();
            (s, *immerse(&s).unwrap().matrix())
        };
        let (x, h) = (0.2, 1e-4);
        let fx = (f_at(x + h).1 - f_at(x - h).1) * (0.5 / h);
        let (s, _) = f_at(x);
        let a0 = aa_alpha(&data, c(x, 0.0)).unwrap();
        let expected = *s.matrix() * (a0 + a0.adjoint()) * s.matrix().adjoint();
        assert!((fx - expected).norm() < 1e-6, "{}", (fx - expected).norm());
    }

    #[test]
    fn sampled_nu_interpolates_cubics_exactly() {
        let spec = GridSpec::new(-0.3, 0.5, 0.0, 0.4, 9, 7).unwrap();
        let p = |z: Complex64| z * z * z * 0.5 + z.conj() * z * c(0.2, 0.1) + 1.0;
        let grid = Grid::from_fn(spec, |_, _, z| p(z));
        let s = SampledNu::new(grid).unwrap();
        for z in [c(-0.25, 0.05), c(0.0, 0.2), c(0.49, 0.39), c(0.5, 0.4)] {
            assert!((s.nu(z).unwrap() - p(z)).norm() < 1e-13);
            // ∂_z̄ p = 0.2+0.1i times z, so ν̄_z = conj((0.2+0.1i) z).
            let expected = (c(0.2, 0.1) * z).conj();
            assert!((s.nu_bar_z(z).unwrap() - expected).norm() < 1e-12);
        }
        assert!(s.nu(c(0.6, 0.0)).is_err());
    }

    #[test]
    fn projections_invert_each_other_on_the_equator() {
        let g = [0.6, 0.8, 0.0];
        assert_eq!(Projection::North.apply(&g).unwrap(), Projection::South.apply(&g).unwrap());
        assert!(Projection::South.apply(&[0.0, 0.0, -1.0]).is_err());
    }

    #[test]
    fn closed_loop_runs_on_tan_frames() {
        let conn = ConnectionField::from_profile(RankOneSeed::Tan(TanProfile::new(1.0, 0.0, 0.5).unwrap())).unwrap();
        let spec = GridSpec::square(0.0, 0.0, 0.3, 9).unwrap();
        let cfg = IntegratorConfig::default();
        let fg = integrate_grid(&conn, &spec, &Sl2c::IDENTITY, &cfg).unwrap();
        let report = closed_loop(&fg, 0.6, Projection::North, &cfg).unwrap();
        assert!(report.max_f_error.is_finite() && report.max_flatness_residual.is_finite());
    }

    proptest! {
        #[test]
        fn alpha_is_rank_one_and_tau_traceless(x in -0.8f64..0.8, y in -0.8f64..0.8, h in 0.0f64..0.95) {
            let data = AAData::new(HalfConjugate, h).unwrap();
            let a = aa_alpha(&data, c(x, y)).unwrap();
            prop_assert!(a.det().norm() <= 1e-14 * (1.0 + a.norm_sqr()));
            let (ta, tb) = aa_tau(&data, c(x, y)).unwrap();
            prop_assert!(ta.trace().norm() <= 1e-14 * (1.0 + ta.norm()));
            prop_assert!(tb.trace().norm() <= 1e-14 * (1.0 + tb.norm()));
        }

        #[test]
        fn metric_matches_alpha_pairing(x in -0.8f64..0.8, y in -0.8f64..0.8, h in 0.0f64..0.95) {
            // e^{2u} = 2 <α₀, α₀^*> from f_z = F α₀ F^*.
            let data = AAData::new(HalfConjugate, h).unwrap();
            let a = aa_alpha(&data, c(x, y)).unwrap();
            let pairing = crate::hyperbolic::lorentz_bilinear(&a, &a.adjoint()).re * 2.0;
            let m = induced_metric_aa(&data, c(x, y)).unwrap();
            prop_assert!((pairing - m).abs() <= 1e-12 * (1.0 + m));
        }
    }
}
