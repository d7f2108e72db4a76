//! Rank-one seeds `η = A(z) dz` with `det A ≡ 0`, the connection
//! `Ω = η - λ η^*` and its flatness residual.
//!
//! The one-variable profile `A(x) = ρ(x) [[-g, g²], [-1, g]]` gives a flat
//! connection exactly when `(g, ρ)` solves
//!
//! ```text
//! g' = -(2λ/(1+λ)) ρ (1+g²)²,    ρ' = (4λ/(1+λ)) g ρ² (1+g²),
//! ```
//!
//! along which `ρ(1+g²)` is conserved; the closed form is
//! `g = tan(-2λC x/(1+λ) + δ)`, `ρ = C/(1+g²)`.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{commutator, Mat2};

/// Default distance (radians) kept from the poles of the tangent profile.
pub const DEFAULT_POLE_MARGIN: f64 = 0.05;
/// Default step of the finite-difference flatness stencil.
pub const DEFAULT_FD_STEP: f64 = 1e-4;
/// Rank-one tolerance on `|det A|`, relative to `1 + ‖A‖²`.
pub const RANK_ONE_TOLERANCE: f64 = 1e-12;

pub type ScalarField = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;
pub type VectorField = Arc<dyn Fn(Complex64) -> [Complex64; 2] + Send + Sync>;

/// A connection `Ω = A dz + B dz̄` that can be evaluated pointwise.
pub trait Connection {
    /// `(A(z), B(z))`.
    fn coefficients(&self, z: Complex64) -> Result<(Mat2, Mat2)>;

    /// `A_z̄ - B_z - [A, B]` from closed-form derivatives, if available.
    fn analytic_flatness(&self, _z: Complex64) -> Result<Mat2> {
        Err(Error::AnalyticUnavailable)
    }
}

impl<C: Connection + ?Sized> Connection for &C {
    fn coefficients(&self, z: Complex64) -> Result<(Mat2, Mat2)> {
        (**self).coefficients(z)
    }

    fn analytic_flatness(&self, z: Complex64) -> Result<Mat2> {
        (**self).analytic_flatness(z)
    }
}

/// The zero connection.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroConnection;

impl Connection for ZeroConnection {
    fn coefficients(&self, _z: Complex64) -> Result<(Mat2, Mat2)> {
        Ok((Mat2::ZERO, Mat2::ZERO))
    }

    fn analytic_flatness(&self, _z: Complex64) -> Result<Mat2> {
        Ok(Mat2::ZERO)
    }
}

/// Constant coefficients; flat iff `[A, B] = 0`.
#[derive(Clone, Copy, Debug)]
pub struct ConstantConnection {
    pub a: Mat2,
    pub b: Mat2,
}

impl Connection for ConstantConnection {
    fn coefficients(&self, _z: Complex64) -> Result<(Mat2, Mat2)> {
        Ok((self.a, self.b))
    }

    fn analytic_flatness(&self, _z: Complex64) -> Result<Mat2> {
        Ok(-commutator(&self.a, &self.b))
    }
}

/// `(g', ρ')` of the flatness system for the one-variable profile.
pub fn ode_rhs(g: f64, rho: f64, lambda: f64) -> (f64, f64) {
    let k = lambda / (1.0 + lambda);
    let w = 1.0 + g * g;
    (-2.0 * k * rho * w * w, 4.0 * k * g * rho * rho * w)
}

/// `ρ [[-g, g²], [-1, g]]`.
pub fn profile_matrix(g: f64, rho: f64) -> Mat2 {
    Mat2::from_real(-rho * g, rho * g * g, -rho, rho * g)
}

/// `d/dx` of [`profile_matrix`] along a trajectory with derivatives `(g', ρ')`.
pub fn profile_matrix_derivative(g: f64, rho: f64, dg: f64, drho: f64) -> Mat2 {
    profile_matrix(g, drho) + Mat2::from_real(-rho * dg, 2.0 * rho * g * dg, 0.0, rho * dg)
}

/// Closed-form flat profile `g = tan(-2λC x/(1+λ) + δ)`, `ρ = C/(1+g²)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TanProfile {
    pub c: f64,
    pub delta: f64,
    pub lambda: f64,
    pub pole_margin: f64,
}

impl TanProfile {
    pub fn new(c: f64, delta: f64, lambda: f64) -> Result<Self> {
        Self::with_pole_margin(c, delta, lambda, DEFAULT_POLE_MARGIN)
    }

    pub fn with_pole_margin(c: f64, delta: f64, lambda: f64, pole_margin: f64) -> Result<Self> {
        if c == 0.0 || !c.is_finite() {
            return Err(Error::OutOfRange { name: "C", value: c });
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::OutOfRange { name: "lambda (tan profile)", value: lambda });
        }
        if !delta.is_finite() {
            return Err(Error::OutOfRange { name: "delta", value: delta });
        }
        if !(0.0..FRAC_PI_2).contains(&pole_margin) {
            return Err(Error::OutOfRange { name: "pole_margin", value: pole_margin });
        }
        Ok(Self { c, delta, lambda, pole_margin })
    }

    /// `2λC/(1+λ)`.
    pub fn rate(&self) -> f64 {
        2.0 * self.lambda * self.c / (1.0 + self.lambda)
    }

    pub fn argument(&self, x: f64) -> f64 {
        -self.rate() * x + self.delta
    }

    /// Distance of the tangent argument at `x` to the nearest pole.
    pub fn pole_distance(&self, x: f64) -> f64 {
        let r = num_traits::Euclid::rem_euclid(&(self.argument(x) - FRAC_PI_2), &PI);
        r.min(PI - r)
    }

    pub fn solution(&self, x: f64) -> Result<(f64, f64)> {
        let argument = self.argument(x);
        let distance = self.pole_distance(x);
        if distance < self.pole_margin || !argument.is_finite() {
            return Err(Error::PoleProximity { argument, distance, margin: self.pole_margin });
        }
        let g = argument.tan();
        Ok((g, self.c / (1.0 + g * g)))
    }

    /// `(g', ρ')` from differentiating the closed form.
    pub fn derivative(&self, x: f64) -> Result<(f64, f64)> {
        let (g, _) = self.solution(x)?;
        let k = self.rate();
        let w = 1.0 + g * g;
        Ok((-k * w, 2.0 * self.c * k * g / w))
    }
}

/// [`TanProfile::solution`] with the default pole margin.
pub fn tan_solution(c: f64, delta: f64, lambda: f64, x: f64) -> Result<(f64, f64)> {
    TanProfile::new(c, delta, lambda)?.solution(x)
}

/// Settings for integrating the flatness system numerically.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeProfileSpec {
    pub g0: f64,
    pub rho0: f64,
    pub lambda: f64,
    /// Where `(g0, ρ0)` is prescribed.
    pub x0: f64,
    pub x_min: f64,
    pub x_max: f64,
    /// RK4 step.
    pub step: f64,
}

/// Trajectory of the flatness system, integrated once with classical RK4 and
/// read through cubic Hermite interpolation. Immutable after [`OdeProfile::build`].
#[derive(Clone, Debug, PartialEq)]
pub struct OdeProfile {
    spec: OdeProfileSpec,
    first: f64,
    nodes: Vec<(f64, f64)>,
}

impl OdeProfile {
    pub fn build(spec: OdeProfileSpec) -> Result<Self> {
        let s = &spec;
        if s.rho0 == 0.0 || !s.rho0.is_finite() {
            return Err(Error::OutOfRange { name: "rho0", value: s.rho0 });
        }
        if !(s.lambda > 0.0) || !s.lambda.is_finite() {
            return Err(Error::OutOfRange { name: "lambda (ode profile)", value: s.lambda });
        }
        if !(s.step > 0.0) || !s.g0.is_finite() {
            return Err(Error::InvalidConfig("ode profile needs a positive step and finite g0"));
        }
        if !(s.x_min <= s.x0 && s.x0 <= s.x_max && s.x_min < s.x_max) {
            return Err(Error::InvalidConfig("ode profile needs x_min <= x0 <= x_max"));
        }
        let n_left = ((s.x0 - s.x_min) / s.step).ceil() as usize;
        let n_right = ((s.x_max - s.x0) / s.step).ceil() as usize;
        let left = Self::march(s, -s.step, n_left)?;
        let right = Self::march(s, s.step, n_right)?;
        let mut nodes: Vec<(f64, f64)> = left.into_iter().rev().collect();
        nodes.pop();
        nodes.extend(right);
        Ok(Self { spec, first: s.x0 - n_left as f64 * s.step, nodes })
    }

    fn march(s: &OdeProfileSpec, h: f64, n: usize) -> Result<Vec<(f64, f64)>> {
        let f = |y: (f64, f64)| ode_rhs(y.0, y.1, s.lambda);
        let mut y = (s.g0, s.rho0);
        let mut out = Vec::with_capacity(n + 1);
        out.push(y);
        for _ in 0..n {
            let k1 = f(y);
            let k2 = f((y.0 + 0.5 * h * k1.0, y.1 + 0.5 * h * k1.1));
            let k3 = f((y.0 + 0.5 * h * k2.0, y.1 + 0.5 * h * k2.1));
            let k4 = f((y.0 + h * k3.0, y.1 + h * k3.1));
            y = (
                y.0 + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
                y.1 + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
            );
            if !(y.0.is_finite() && y.1.is_finite()) || y.0.abs() > 1e8 {
                return Err(Error::NonFinite { what: "ode profile trajectory" });
            }
            out.push(y);
        }
        Ok(out)
    }

    pub fn spec(&self) -> &OdeProfileSpec {
        &self.spec
    }

    /// Interpolated `(g, ρ)` at `x ∈ [x_min, x_max]`.
    pub fn state(&self, x: f64) -> Result<(f64, f64)> {
        if !(self.spec.x_min <= x && x <= self.spec.x_max) {
            return Err(Error::OutsideDomain { re: x, im: 0.0 });
        }
        let h = self.spec.step;
        let k = (((x - self.first) / h).floor() as usize).min(self.nodes.len() - 2);
        let t = (x - (self.first + k as f64 * h)) / h;
        let (y0, y1) = (self.nodes[k], self.nodes[k + 1]);
        let d0 = ode_rhs(y0.0, y0.1, self.spec.lambda);
        let d1 = ode_rhs(y1.0, y1.1, self.spec.lambda);
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        let interp = |p0: f64, p1: f64, m0: f64, m1: f64| h00 * p0 + h10 * h * m0 + h01 * p1 + h11 * h * m1;
        Ok((interp(y0.0, y1.0, d0.0, d1.0), interp(y0.1, y1.1, d0.1, d1.1)))
    }

    /// The conserved quantity `ρ(1+g²)` at the initial point.
    pub fn invariant(&self) -> f64 {
        self.spec.rho0 * (1.0 + self.spec.g0 * self.spec.g0)
    }
}

/// `a(z) E21` for a scalar field `a`.
#[derive(Clone)]
pub struct FixedNilpotent {
    pub a: ScalarField,
    /// `∂_z̄ a`; `None` means `a` is holomorphic.
    pub a_zbar: Option<ScalarField>,
}

impl FixedNilpotent {
    pub fn constant(a: Complex64) -> Self {
        Self { a: Arc::new(move |_| a), a_zbar: None }
    }

    pub fn holomorphic(a: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static) -> Self {
        Self { a: Arc::new(a), a_zbar: None }
    }
}

impl fmt::Debug for FixedNilpotent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FixedNilpotent").field("holomorphic", &self.a_zbar.is_none()).finish()
    }
}

/// `v(z) w(z)^t` with `w^t v = 0`.
#[derive(Clone)]
pub struct OuterProduct {
    pub v: VectorField,
    pub w: VectorField,
}

impl OuterProduct {
    pub fn constant(v: [Complex64; 2], w: [Complex64; 2]) -> Self {
        Self { v: Arc::new(move |_| v), w: Arc::new(move |_| w) }
    }
}

impl fmt::Debug for OuterProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("OuterProduct")
    }
}

/// Rank-one `(1,0)`-form data.
#[derive(Clone, Debug)]
pub enum RankOneSeed {
    OuterProduct(OuterProduct),
    Tan(TanProfile),
    Ode(Arc<OdeProfile>),
    FixedNilpotent(FixedNilpotent),
}

impl RankOneSeed {
    /// The spectral parameter built into the profile seeds.
    pub fn profile_lambda(&self) -> Option<f64> {
        match self {
            RankOneSeed::Tan(t) => Some(t.lambda),
            RankOneSeed::Ode(o) => Some(o.spec.lambda),
            _ => None,
        }
    }

    fn raw_coefficient(&self, z: Complex64) -> Result<Mat2> {
        match self {
            RankOneSeed::Tan(t) => {
                let (g, rho) = t.solution(z.re)?;
                Ok(profile_matrix(g, rho))
            }
            RankOneSeed::Ode(o) => {
                let (g, rho) = o.state(z.re)?;
                Ok(profile_matrix(g, rho))
            }
            RankOneSeed::FixedNilpotent(n) => Ok(Mat2::E21 * (n.a)(z)),
            RankOneSeed::OuterProduct(p) => {
                let (v, w) = ((p.v)(z), (p.w)(z));
                let pairing = w[0] * v[0] + w[1] * v[1];
                let scale = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt() * (w[0].norm_sqr() + w[1].norm_sqr()).sqrt();
                if pairing.norm() > RANK_ONE_TOLERANCE * (1.0 + scale) {
                    return Err(Error::NotTraceless { trace: pairing.norm() });
                }
                Ok(Mat2::new(v[0] * w[0], v[0] * w[1], v[1] * w[0], v[1] * w[1]))
            }
        }
    }

    /// `∂_z̄` of the coefficient from closed-form derivatives.
    pub fn coefficient_zbar(&self, z: Complex64) -> Result<Mat2> {
        match self {
            RankOneSeed::Tan(t) => {
                let (g, rho) = t.solution(z.re)?;
                let (dg, drho) = t.derivative(z.re)?;
                Ok(profile_matrix_derivative(g, rho, dg, drho) * 0.5)
            }
            RankOneSeed::Ode(o) => {
                let (g, rho) = o.state(z.re)?;
                let (dg, drho) = ode_rhs(g, rho, o.spec.lambda);
                Ok(profile_matrix_derivative(g, rho, dg, drho) * 0.5)
            }
            RankOneSeed::FixedNilpotent(n) => Ok(match &n.a_zbar {
                Some(d) => Mat2::E21 * d(z),
                None => Mat2::ZERO,
            }),
            RankOneSeed::OuterProduct(_) => Err(Error::AnalyticUnavailable),
        }
    }
}

/// Coefficient of `η` at `z`, checked to be rank-one.
pub fn seed_coefficient(seed: &RankOneSeed, z: Complex64) -> Result<Mat2> {
    let a = seed.raw_coefficient(z)?;
    if !a.is_finite() {
        return Err(Error::NonFinite { what: "seed coefficient" });
    }
    let det = a.det().norm();
    if det > RANK_ONE_TOLERANCE * (1.0 + a.norm_sqr()) {
        return Err(Error::NotRankOne { det });
    }
    Ok(a)
}

/// `Ω = η - λ η^*`, i.e. `A = seed coefficient`, `B = -λ A^*`.
#[derive(Clone, Debug)]
pub struct ConnectionField {
    pub seed: RankOneSeed,
    pub lambda: Complex64,
}

impl ConnectionField {
    /// Uses the spectral parameter built into a profile seed.
    pub fn from_profile(seed: RankOneSeed) -> Result<Self> {
        let lambda = seed
            .profile_lambda()
            .ok_or(Error::InvalidConfig("seed carries no spectral parameter"))?;
        connection_from_seed(seed, Complex64::new(lambda, 0.0))
    }
}

pub fn connection_from_seed(seed: RankOneSeed, lambda: Complex64) -> Result<ConnectionField> {
    if lambda.norm() == 0.0 || !lambda.is_finite() {
        return Err(Error::ZeroLambda);
    }
    Ok(ConnectionField { seed, lambda })
}

impl Connection for ConnectionField {
    fn coefficients(&self, z: Complex64) -> Result<(Mat2, Mat2)> {
        let a = seed_coefficient(&self.seed, z)?;
        Ok((a, -(a.adjoint() * self.lambda)))
    }

    /// `A_z̄ + λ (A_z̄)^* + λ [A, A^*]`, using `B_z = -λ (A_z̄)^*`.
    fn analytic_flatness(&self, z: Complex64) -> Result<Mat2> {
        let a = seed_coefficient(&self.seed, z)?;
        let a_zbar = self.seed.coefficient_zbar(z)?;
        Ok(a_zbar + (a_zbar.adjoint() + commutator(&a, &a.adjoint())) * self.lambda)
    }
}

/// How [`flatness_residual`] obtains derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlatnessMode {
    Analytic,
    FiniteDifference,
}

/// `A_z̄ - B_z - [A, B]` at a point, with a truncation estimate in
/// finite-difference mode (`‖R_h - R_2h‖/3`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlatnessResidual {
    pub residual: Mat2,
    pub truncation_estimate: Option<f64>,
}

impl FlatnessResidual {
    pub fn norm(&self) -> f64 {
        self.residual.norm()
    }
}

fn fd_residual<C: Connection + ?Sized>(conn: &C, z: Complex64, h: f64, center: (Mat2, Mat2)) -> Result<Mat2> {
    let i = Complex64::i();
    let (ax1, bx1) = conn.coefficients(z + h)?;
    let (ax0, bx0) = conn.coefficients(z - h)?;
    let (ay1, by1) = conn.coefficients(z + i * h)?;
    let (ay0, by0) = conn.coefficients(z - i * h)?;
    let s = 0.5 / h;
    let (ax, ay) = ((ax1 - ax0) * s, (ay1 - ay0) * s);
    let (bx, by) = ((bx1 - bx0) * s, (by1 - by0) * s);
    let a_zbar = (ax + ay * i) * 0.5;
    let b_z = (bx - by * i) * 0.5;
    Ok(a_zbar - b_z - commutator(&center.0, &center.1))
}

/// Flatness residual of `conn` at `z`.
pub fn flatness_residual<C: Connection + ?Sized>(
    conn: &C,
    z: Complex64,
    h: f64,
    mode: FlatnessMode,
) -> Result<FlatnessResidual> {
    match mode {
        FlatnessMode::Analytic => Ok(FlatnessResidual {
            residual: conn.analytic_flatness(z)?,
            truncation_estimate: None,
        }),
        FlatnessMode::FiniteDifference => {
            if !(h > 0.0) {
                return Err(Error::OutOfRange { name: "finite-difference step", value: h });
            }
            let center = conn.coefficients(z)?;
            let r_h = fd_residual(conn, z, h, center)?;
            let r_2h = fd_residual(conn, z, 2.0 * h, center)?;
            Ok(FlatnessResidual {
                residual: r_h,
                truncation_estimate: Some((r_h - r_2h).norm() / 3.0),
            })
        }
    }
}
