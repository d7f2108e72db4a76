//! Moving-frame connection `F^{-1} dF = A dz + B dz̄` of a conformal immersion
//! with metric `e^{2u} |dz|²`, Hopf coefficient `Q` and mean curvature `H`,
//! together with the Gauss–Codazzi residuals and the balanced spectral gauge.
//!
//! The zero-curvature residual `R = A_z̄ - B_z - [A, B]` relates to the scalar
//! equations entrywise:
//!
//! ```text
//! R11 = -R22 = u_zz̄ - e^{2u}(1 - H²)/4 - e^{-2u}|Q|²/16        (Gauss)
//! R21        = -(e^{-u}/4) (Q_z̄ - 2 e^{2u} H_z)                (Codazzi)
//! R12        = -(e^{-u}/4) conj(Q_z̄ - 2 e^{2u} H_z)
//! ```

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linalg::{commutator, phase_swap, quarter_turn, Mat2};

/// Pointwise geometric data entering the connection matrices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometricData {
    pub u: f64,
    pub u_z: Complex64,
    pub u_zbar: Complex64,
    pub q: Complex64,
    pub h: f64,
}

impl GeometricData {
    /// Data for a real conformal exponent, `u_z̄ = conj(u_z)`.
    pub fn real(u: f64, u_z: Complex64, q: Complex64, h: f64) -> Self {
        Self { u, u_z, u_zbar: u_z.conj(), q, h }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.h) {
            return Err(Error::OutOfRange { name: "H", value: self.h });
        }
        let defect = (self.u_zbar - self.u_z.conj()).norm();
        if defect > 1e-12 * (1.0 + self.u_z.norm()) {
            return Err(Error::OutOfRange { name: "|u_zbar - conj(u_z)|", value: defect });
        }
        Ok(())
    }
}

/// Nonzero spectral parameter `λ = s e^{iθ}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralParam {
    lambda: Complex64,
}

impl SpectralParam {
    pub fn new(lambda: Complex64) -> Result<Self> {
        if lambda.norm() == 0.0 || !lambda.is_finite() {
            return Err(Error::ZeroLambda);
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn modulus(&self) -> f64 {
        self.lambda.norm()
    }

    pub fn phase(&self) -> f64 {
        self.lambda.arg()
    }
}

/// `(A, B)` with
/// `A = [[u_z/2, e^u(1+H)/2], [-e^{-u}Q/4, -u_z/2]]` and
/// `B = [[-u_z̄/2, e^{-u}Q̄/4], [e^u(1-H)/2, u_z̄/2]]`.
pub fn build_lax_pair(g: &GeometricData) -> (Mat2, Mat2) {
    let eu = g.u.exp();
    let emu = (-g.u).exp();
    let a = Mat2::new(
        g.u_z * 0.5,
        (0.5 * eu * (1.0 + g.h)).into(),
        -g.q * (0.25 * emu),
        -g.u_z * 0.5,
    );
    let b = Mat2::new(
        -g.u_zbar * 0.5,
        g.q.conj() * (0.25 * emu),
        (0.5 * eu * (1.0 - g.h)).into(),
        g.u_zbar * 0.5,
    );
    (a, b)
}

/// Scalar Gauss expression `u_zz̄ - e^{2u}(1-H²)/4 - e^{-2u}|Q|²/16`.
pub fn gauss_expression(u: f64, u_zzbar: f64, q: Complex64, h: f64) -> f64 {
    u_zzbar - 0.25 * (2.0 * u).exp() * (1.0 - h * h) - (-2.0 * u).exp() * q.norm_sqr() / 16.0
}

/// Scalar Codazzi expression `Q_z̄ - 2 e^{2u} H_z`.
pub fn codazzi_expression(u: f64, q_zbar: Complex64, h_z: Complex64) -> Complex64 {
    q_zbar - h_z * (2.0 * (2.0 * u).exp())
}

/// The two normalizations of the cosh-Gordon reduction (`H = 0`, `Q ≡ 2`).
///
/// `gauss_form` is what the Gauss expression reduces to, `u_zz̄ - cosh(2u)/2`;
/// `remark_form` is `4 u_zz̄ - cosh(2u)`. They vanish on different functions
/// and are reported side by side; neither is used as a pass/fail criterion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoshGordonForms {
    pub gauss_form: f64,
    pub remark_form: f64,
}

pub fn cosh_gordon_forms(u: f64, u_zzbar: f64) -> CoshGordonForms {
    let ch = (2.0 * u).cosh();
    CoshGordonForms { gauss_form: u_zzbar - 0.5 * ch, remark_form: 4.0 * u_zzbar - ch }
}

/// Finite-difference scheme for grid derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DifferenceScheme {
    /// Second-order central differences (margin 1).
    #[default]
    Central,
    /// Richardson combination of steps `h` and `2h` (fourth order, margin 2).
    Richardson,
}

impl DifferenceScheme {
    pub fn margin(&self) -> usize {
        match self {
            DifferenceScheme::Central => 1,
            DifferenceScheme::Richardson => 2,
        }
    }
}

/// Minimal arithmetic needed by the stencils.
pub(crate) trait Stencil: Copy + core::ops::Add<Output = Self> + core::ops::Sub<Output = Self> {
    fn times(self, c: f64) -> Self;
}

impl Stencil for f64 {
    fn times(self, c: f64) -> Self {
        self * c
    }
}

impl Stencil for Complex64 {
    fn times(self, c: f64) -> Self {
        self * c
    }
}

impl Stencil for Mat2 {
    fn times(self, c: f64) -> Self {
        self.scale_real(c)
    }
}

/// First derivative along one axis from samples at offsets `-2..=2`.
pub(crate) fn first_difference<T: Stencil>(scheme: DifferenceScheme, h: f64, at: impl Fn(isize) -> T) -> T {
    let d1 = (at(1) - at(-1)).times(0.5 / h);
    match scheme {
        DifferenceScheme::Central => d1,
        DifferenceScheme::Richardson => {
            let d2 = (at(2) - at(-2)).times(0.25 / h);
            (d1.times(4.0) - d2).times(1.0 / 3.0)
        }
    }
}

/// Second derivative along one axis from samples at offsets `-2..=2`.
pub(crate) fn second_difference<T: Stencil>(scheme: DifferenceScheme, h: f64, at: impl Fn(isize) -> T) -> T {
    let c = at(0);
    let d1 = (at(1) + at(-1) - c.times(2.0)).times(1.0 / (h * h));
    match scheme {
        DifferenceScheme::Central => d1,
        DifferenceScheme::Richardson => {
            let d2 = (at(2) + at(-2) - c.times(2.0)).times(0.25 / (h * h));
            (d1.times(4.0) - d2).times(1.0 / 3.0)
        }
    }
}

/// Residuals at one interior grid point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualSample {
    pub i: usize,
    pub j: usize,
    pub gauss: f64,
    pub codazzi: Complex64,
    pub flatness: Mat2,
}

impl ResidualSample {
    /// Largest entrywise mismatch between the matrix residual and the scalar
    /// Gauss/Codazzi expressions mapped through the correspondence above.
    pub fn identity_defect(&self, u: f64) -> f64 {
        let scale = 0.25 * (-u).exp();
        let r = &self.flatness;
        let d11 = (r.a11 - self.gauss).norm();
        let d22 = (r.a22 + self.gauss).norm();
        let d21 = (r.a21 + self.codazzi * scale).norm();
        let d12 = (r.a12 + self.codazzi.conj() * scale).norm();
        d11.max(d22).max(d21).max(d12)
    }
}

/// Gauss, Codazzi and matrix flatness residuals on the interior of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussCodazziResidual {
    pub samples: Vec<ResidualSample>,
    /// Largest [`ResidualSample::identity_defect`] over the interior.
    pub identity_defect: f64,
}

impl GaussCodazziResidual {
    pub fn max_gauss(&self) -> f64 {
        self.samples.iter().map(|s| s.gauss.abs()).fold(0.0, f64::max)
    }

    pub fn max_codazzi(&self) -> f64 {
        self.samples.iter().map(|s| s.codazzi.norm()).fold(0.0, f64::max)
    }

    pub fn max_flatness(&self) -> f64 {
        self.samples.iter().map(|s| s.flatness.norm()).fold(0.0, f64::max)
    }
}

/// Evaluates both forms of the zero-curvature condition on sampled data.
///
/// The data need not solve anything: the entrywise correspondence between the
/// matrix residual and the scalar equations is an algebraic identity, so the
/// reported `identity_defect` is pure finite-difference error.
pub fn gauss_codazzi_residual(
    field: &Grid<GeometricData>,
    scheme: DifferenceScheme,
) -> Result<GaussCodazziResidual> {
    let spec = field.spec;
    if spec.nx < 5 || spec.ny < 5 {
        return Err(Error::GridTooSmall { nx: spec.nx, ny: spec.ny, min: 5 });
    }
    let (hx, hy) = (spec.hx(), spec.hy());
    let pairs: Vec<(Mat2, Mat2)> = field.values.iter().map(build_lax_pair).collect();
    let m = scheme.margin();
    let at = |i: usize, j: usize, di: isize, dj: isize| spec.index((i as isize + di) as usize, (j as isize + dj) as usize);

    let mut samples = Vec::new();
    let mut identity_defect: f64 = 0.0;
    for j in m..spec.ny - m {
        for i in m..spec.nx - m {
            let dx = |f: &dyn Fn(usize) -> Mat2| first_difference(scheme, hx, |k| f(at(i, j, k, 0)));
            let dy = |f: &dyn Fn(usize) -> Mat2| first_difference(scheme, hy, |k| f(at(i, j, 0, k)));
            let a_of = |k: usize| pairs[k].0;
            let b_of = |k: usize| pairs[k].1;
            // ∂_z̄ = (∂_x + i∂_y)/2, ∂_z = (∂_x - i∂_y)/2.
            let a_zbar = (dx(&a_of) + dy(&a_of).scale(Complex64::i())).scale_real(0.5);
            let b_z = (dx(&b_of) - dy(&b_of).scale(Complex64::i())).scale_real(0.5);
            let (a, b) = pairs[spec.index(i, j)];
            let flatness = a_zbar - b_z - commutator(&a, &b);

            let d = field.get(i, j);
            let uxx = second_difference(scheme, hx, |k| field.values[at(i, j, k, 0)].u);
            let uyy = second_difference(scheme, hy, |k| field.values[at(i, j, 0, k)].u);
            let gauss = gauss_expression(d.u, 0.25 * (uxx + uyy), d.q, d.h);

            let qx = first_difference(scheme, hx, |k| field.values[at(i, j, k, 0)].q);
            let qy = first_difference(scheme, hy, |k| field.values[at(i, j, 0, k)].q);
            let hxd = first_difference(scheme, hx, |k| field.values[at(i, j, k, 0)].h);
            let hyd = first_difference(scheme, hy, |k| field.values[at(i, j, 0, k)].h);
            let q_zbar = (qx + qy * Complex64::i()) * 0.5;
            let h_z = Complex64::new(hxd, -hyd) * 0.5;
            let codazzi = codazzi_expression(d.u, q_zbar, h_z);

            let sample = ResidualSample { i, j, gauss, codazzi, flatness };
            identity_defect = identity_defect.max(sample.identity_defect(d.u));
            samples.push(sample);
        }
    }
    Ok(GaussCodazziResidual { samples, identity_defect })
}

/// `s = sqrt((1 - H)/(1 + H))` for `0 <= H < 1`.
pub fn balanced_modulus(h: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&h) {
        return Err(Error::OutOfRange { name: "H", value: h });
    }
    Ok(((1.0 - h) / (1.0 + h)).sqrt())
}

/// Inverse of [`balanced_modulus`], `H = (1 - s²)/(1 + s²)` for `0 < s <= 1`.
pub fn mean_curvature_from_modulus(s: f64) -> Result<f64> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::OutOfRange { name: "s", value: s });
    }
    let s2 = s * s;
    Ok((1.0 - s2) / (1.0 + s2))
}

/// Balanced spectral gauge of a Lax pair from [`build_lax_pair`].
///
/// Applies `(1 ± H) ↦ s^{±1}(1 ± H)` and `Q ↦ e^{-2iθ} Q` entrywise, then
/// conjugates by `P = g(θ) R_{π/4}` (`X ↦ P^{-1} X P`). Conjugation maps the
/// `e^u(1+H)/2` entry of `A` to position (2, 1) and the `e^u(1-H)/2` entry of
/// `B` to position (1, 2); with `s = balanced_modulus(H)` both have modulus
/// `e^u sqrt(1 - H²)/2`.
pub fn balance_gauge(a: &Mat2, b: &Mat2, s: f64, theta: f64) -> (Mat2, Mat2) {
    let phase = Complex64::from_polar(1.0, -2.0 * theta);
    let mut a = *a;
    let mut b = *b;
    a.a12 = a.a12 * s;
    a.a21 = a.a21 * phase;
    b.a21 = b.a21 / s;
    b.a12 = b.a12 * phase.conj();
    let p = phase_swap(theta) * quarter_turn();
    let p_inv = p.adjoint();
    (p_inv * a * p, p_inv * b * p)
}
