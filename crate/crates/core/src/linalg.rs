//! Exact 2×2 complex matrix algebra: the closed-form exponential of traceless
//! matrices, determinant renormalization and the Iwasawa splitting
//! `SL(2,C) = S · SU(2)`.

use core::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Default tolerance on `|det - 1|` for frames.
pub const DET_TOLERANCE: f64 = 1e-10;
/// Default tolerance on `‖U U^* - I‖_F` for unitary frames.
pub const UNITARY_TOLERANCE: f64 = 1e-10;
/// Relative tolerance on the trace accepted by [`exp_traceless`].
pub const TRACE_TOLERANCE: f64 = 1e-12;

const SMALL_SIGMA: f64 = 1e-6;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A 2×2 complex matrix `[[a11, a12], [a21, a22]]`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Mat2 {
    pub a11: Complex64,
    pub a12: Complex64,
    pub a21: Complex64,
    pub a22: Complex64,
}

impl Mat2 {
    pub const ZERO: Mat2 = Mat2::new(ZERO, ZERO, ZERO, ZERO);
    pub const IDENTITY: Mat2 = Mat2::new(ONE, ZERO, ZERO, ONE);
    /// Elementary matrix with a single 1 in position (1, 2).
    pub const E12: Mat2 = Mat2::new(ZERO, ONE, ZERO, ZERO);
    /// Elementary matrix with a single 1 in position (2, 1).
    pub const E21: Mat2 = Mat2::new(ZERO, ZERO, ONE, ZERO);
    /// `[[0, i], [-i, 0]]`, the matrix entering the Lorentz product.
    pub const SIGMA2: Mat2 = Mat2::new(ZERO, I, Complex64::new(0.0, -1.0), ZERO);
    pub const SIGMA3: Mat2 = Mat2::new(ONE, ZERO, ZERO, Complex64::new(-1.0, 0.0));

    pub const fn new(a11: Complex64, a12: Complex64, a21: Complex64, a22: Complex64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub fn from_real(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Self::new(a11.into(), a12.into(), a21.into(), a22.into())
    }

    pub fn diag(d1: Complex64, d2: Complex64) -> Self {
        Self::new(d1, ZERO, ZERO, d2)
    }

    pub fn scalar(c: Complex64) -> Self {
        Self::diag(c, c)
    }

    pub fn det(&self) -> Complex64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn trace(&self) -> Complex64 {
        self.a11 + self.a22
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::new(self.a11.conj(), self.a21.conj(), self.a12.conj(), self.a22.conj())
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a11, self.a21, self.a12, self.a22)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.a11.conj(), self.a12.conj(), self.a21.conj(), self.a22.conj())
    }

    /// Classical adjugate, `adj(M) M = det(M) I`.
    pub fn adjugate(&self) -> Self {
        Self::new(self.a22, -self.a12, -self.a21, self.a11)
    }

    pub fn inverse(&self) -> Result<Self> {
        let d = self.det();
        if d.norm() == 0.0 || !d.is_finite() {
            return Err(Error::NotUnimodular { defect: (d - 1.0).norm() });
        }
        Ok(self.adjugate().scale(d.inv()))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.a11 * c, self.a12 * c, self.a21 * c, self.a22 * c)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        Self::new(self.a11 * c, self.a12 * c, self.a21 * c, self.a22 * c)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a11.norm_sqr() + self.a12.norm_sqr() + self.a21.norm_sqr() + self.a22.norm_sqr()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.a11.is_finite() && self.a12.is_finite() && self.a21.is_finite() && self.a22.is_finite()
    }

    /// `‖M - M^*‖_F`.
    pub fn hermitian_defect(&self) -> f64 {
        (*self - self.adjoint()).norm()
    }

    /// `‖M M^* - I‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        (*self * self.adjoint() - Mat2::IDENTITY).norm()
    }

    /// Removes the trace, `M - (tr M / 2) I`.
    pub fn traceless_part(&self) -> Self {
        let half = self.trace() * 0.5;
        Self::new(self.a11 - half, self.a12, self.a21, self.a22 - half)
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.a11, self.a12, self.a21, self.a22]
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a11 + o.a11, self.a12 + o.a12, self.a21 + o.a21, self.a22 + o.a22)
    }
}

impl AddAssign for Mat2 {
    fn add_assign(&mut self, o: Mat2) {
        *self = *self + o;
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a11 - o.a11, self.a12 - o.a12, self.a21 - o.a21, self.a22 - o.a22)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        Mat2::new(-self.a11, -self.a12, -self.a21, -self.a22)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }
}

impl Mul<Complex64> for Mat2 {
    type Output = Mat2;
    fn mul(self, c: Complex64) -> Mat2 {
        self.scale(c)
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, c: f64) -> Mat2 {
        self.scale_real(c)
    }
}

/// `XY - YX`.
pub fn commutator(x: &Mat2, y: &Mat2) -> Mat2 {
    *x * *y - *y * *x
}

/// `g(θ) = i [[0, e^{iθ/2}], [e^{-iθ/2}, 0]]` for the unit phase `e^{iθ}`.
pub fn phase_swap(theta: f64) -> Mat2 {
    let half = Complex64::from_polar(1.0, 0.5 * theta);
    Mat2::new(ZERO, I * half, I * half.conj(), ZERO)
}

/// `diag(e^{-iπ/4}, e^{iπ/4})`.
pub fn quarter_turn() -> Mat2 {
    let p = Complex64::from_polar(1.0, core::f64::consts::FRAC_PI_4);
    Mat2::diag(p.conj(), p)
}

/// Closed-form exponential of a traceless matrix:
/// `exp X = cosh σ I + (sinh σ / σ) X` with `σ² = tr(X²)/2`.
///
/// Both square roots of `σ²` give the same result since `cosh σ` and
/// `sinh σ / σ` are even; the principal root is used. Below `|σ| = 1e-6` the
/// two coefficients are evaluated from their Taylor series.
pub fn exp_traceless(x: &Mat2) -> Result<Mat2> {
    let tr = x.trace().norm();
    if tr > TRACE_TOLERANCE * (1.0 + x.norm()) || !x.is_finite() {
        return Err(Error::NotTraceless { trace: tr });
    }
    let x = x.traceless_part();
    // X² = -det(X) I for traceless X.
    let sigma_sq = x.a11 * x.a11 + x.a12 * x.a21;
    let (c, s) = cosh_sinhc(sigma_sq);
    Ok(Mat2::scalar(c) + x.scale(s))
}

/// `(cosh σ, sinh σ / σ)` as functions of `σ²`.
fn cosh_sinhc(sigma_sq: Complex64) -> (Complex64, Complex64) {
    let sigma = sigma_sq.sqrt();
    if sigma.norm() < SMALL_SIGMA {
        let s2 = sigma_sq;
        let s4 = s2 * s2;
        (1.0 + s2 / 2.0 + s4 / 24.0, 1.0 + s2 / 6.0 + s4 / 120.0)
    } else {
        (sigma.cosh(), sigma.sinh() / sigma)
    }
}

/// A matrix with unit determinant, up to the stored tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sl2c {
    m: Mat2,
}

impl Sl2c {
    pub const IDENTITY: Sl2c = Sl2c { m: Mat2::IDENTITY };

    pub fn new(m: Mat2) -> Result<Self> {
        Self::with_tolerance(m, DET_TOLERANCE)
    }

    pub fn with_tolerance(m: Mat2, tolerance: f64) -> Result<Self> {
        let defect = (m.det() - 1.0).norm();
        if !(defect <= tolerance) {
            return Err(Error::NotUnimodular { defect });
        }
        Ok(Self { m })
    }

    /// Wraps `m` without checking the determinant.
    pub(crate) fn new_unchecked(m: Mat2) -> Self {
        Self { m }
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.m
    }

    pub fn into_inner(self) -> Mat2 {
        self.m
    }

    pub fn det_drift(&self) -> f64 {
        (self.m.det() - 1.0).norm()
    }

    /// Inverse via the adjugate.
    pub fn inverse(&self) -> Sl2c {
        Sl2c { m: self.m.adjugate() }
    }
}

/// An element of `SU(2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Su2 {
    m: Mat2,
}

impl Su2 {
    pub const IDENTITY: Su2 = Su2 { m: Mat2::IDENTITY };

    pub fn new(m: Mat2) -> Result<Self> {
        let defect = m.unitarity_defect();
        if !(defect <= UNITARY_TOLERANCE) {
            return Err(Error::NotUnitary { defect });
        }
        let det_defect = (m.det() - 1.0).norm();
        if !(det_defect <= UNITARY_TOLERANCE) {
            return Err(Error::NotUnimodular { defect: det_defect });
        }
        Ok(Self { m })
    }

    /// `[[α, β], [-conj β, conj α]]` normalized so that `|α|² + |β|² = 1`.
    pub fn from_parameters(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let r = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::OutOfRange { name: "|alpha|^2 + |beta|^2", value: r * r });
        }
        let (a, b) = (alpha / r, beta / r);
        Ok(Self { m: Mat2::new(a, b, -b.conj(), a.conj()) })
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.m
    }

    pub fn into_sl2c(self) -> Sl2c {
        Sl2c { m: self.m }
    }
}

/// `[[a, w], [0, 1/a]]` with `a > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UpperTriangular {
    a: f64,
    w: Complex64,
}

impl UpperTriangular {
    pub fn new(a: f64, w: Complex64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() || !w.is_finite() {
            return Err(Error::OutOfRange { name: "triangular diagonal a", value: a });
        }
        Ok(Self { a, w })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn w(&self) -> Complex64 {
        self.w
    }

    pub fn matrix(&self) -> Mat2 {
        Mat2::new(self.a.into(), self.w, ZERO, (1.0 / self.a).into())
    }
}

/// Splits `F = F_s Φ` with `F_s` upper triangular with positive diagonal and
/// `Φ ∈ SU(2)`.
///
/// The bottom row of `F` equals `(1/a)` times the bottom row of `Φ`, so
/// normalizing it fixes `a` and `Φ`; `F_s = F Φ^*` completes the split.
pub fn iwasawa_split(f: &Sl2c) -> Result<(UpperTriangular, Su2)> {
    let m = f.matrix();
    let r = (m.a21.norm_sqr() + m.a22.norm_sqr()).sqrt();
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::NotUnimodular { defect: f.det_drift() });
    }
    let (p21, p22) = (m.a21 / r, m.a22 / r);
    let phi = Mat2::new(p22.conj(), -p21.conj(), p21, p22);
    let fs = *m * phi.adjoint();
    let triangular = UpperTriangular::new(1.0 / r, fs.a12)?;
    Ok((triangular, Su2 { m: phi }))
}

/// Divides `S` by the square root of its determinant with positive real part.
///
/// Requires `|det S - 1| < 0.5`; a determinant with non-positive real part
/// means the integration has diverged.
pub fn renormalize_det(s: &Mat2) -> Result<Sl2c> {
    let d = s.det();
    if !d.is_finite() || d.re <= 0.0 {
        return Err(Error::DeterminantDiverged { re: d.re });
    }
    let defect = (d - 1.0).norm();
    if defect >= 0.5 {
        return Err(Error::NotUnimodular { defect });
    }
    let root = d.sqrt();
    Ok(Sl2c::new_unchecked(s.scale(root.inv())))
}

#[cfg(test)]
mod tests {
    extern crate std;

    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
        (*a - *b).norm() <= tol
    }

    fn traceless(p: [f64; 6]) -> Mat2 {
        Mat2::new(c(p[0], p[1]), c(p[2], p[3]), c(p[4], p[5]), c(-p[0], -p[1]))
    }

    #[test]
    fn commutator_examples() {
        assert_eq!(commutator(&Mat2::E12, &Mat2::E21), Mat2::SIGMA3);
        let x = Mat2::new(c(1.0, 2.0), c(3.0, -1.0), c(0.5, 0.0), c(-2.0, 1.0));
        assert_eq!(commutator(&x, &x), Mat2::ZERO);
        assert_eq!(commutator(&Mat2::SIGMA3, &Mat2::E12), Mat2::E12 * 2.0);
    }

    #[test]
    fn exp_of_zero_and_nilpotent() {
        assert_eq!(exp_traceless(&Mat2::ZERO).unwrap(), Mat2::IDENTITY);
        assert_eq!(exp_traceless(&Mat2::E21).unwrap(), Mat2::IDENTITY + Mat2::E21);
    }

    #[test]
    fn exp_of_diagonal() {
        let e = core::f64::consts::E;
        let got = exp_traceless(&Mat2::from_real(1.0, 0.0, 0.0, -1.0)).unwrap();
        assert!(close(&got, &Mat2::from_real(e, 0.0, 0.0, 1.0 / e), 1e-15));
    }

    #[test]
    fn exp_rejects_trace() {
        assert!(matches!(
            exp_traceless(&Mat2::IDENTITY),
            Err(Error::NotTraceless { .. })
        ));
    }

    #[test]
    fn exp_branch_of_sigma_is_immaterial() {
        // Both roots of σ² give the same coefficients.
        for sq in [c(2.0, 1.0), c(-3.0, 0.5), c(0.1, -4.0)] {
            let s = sq.sqrt();
            let (c1, s1) = (s.cosh(), s.sinh() / s);
            let (c2, s2) = ((-s).cosh(), (-s).sinh() / (-s));
            assert!((c1 - c2).norm() < 1e-14 && (s1 - s2).norm() < 1e-14);
        }
    }

    #[test]
    fn exp_is_continuous_at_small_sigma() {
        let eps = 1e-7;
        let x = Mat2::new(c(eps * 0.6, 0.0), c(1.0, 0.0), c(eps * 0.8, 0.0), c(-eps * 0.6, 0.0));
        let nilpotent = Mat2::E12;
        let a = exp_traceless(&x).unwrap();
        let b = exp_traceless(&nilpotent).unwrap();
        assert!(close(&a, &b, 1e-6));
        // Just above and below the series threshold.
        for scale in [0.9e-6, 1.1e-6] {
            let y = Mat2::from_real(scale, 0.0, 0.0, -scale);
            let exact = Mat2::diag(scale.exp().into(), (-scale).exp().into());
            assert!(close(&exp_traceless(&y).unwrap(), &exact, 1e-15));
        }
    }

    #[test]
    fn iwasawa_trivial_cases() {
        let (fs, phi) = iwasawa_split(&Sl2c::IDENTITY).unwrap();
        assert_eq!(fs.matrix(), Mat2::IDENTITY);
        assert_eq!(*phi.matrix(), Mat2::IDENTITY);

        let u = Su2::from_parameters(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        let (fs, phi) = iwasawa_split(&u.into_sl2c()).unwrap();
        assert!(close(&fs.matrix(), &Mat2::IDENTITY, 1e-15));
        assert!(close(phi.matrix(), u.matrix(), 1e-15));

        let d = Sl2c::new(Mat2::from_real(2.0, 0.0, 0.0, 0.5)).unwrap();
        let (fs, phi) = iwasawa_split(&d).unwrap();
        assert!(close(&fs.matrix(), d.matrix(), 1e-15));
        assert!(close(phi.matrix(), &Mat2::IDENTITY, 1e-15));
    }

    #[test]
    fn iwasawa_rejects_singular() {
        let s = Sl2c::new_unchecked(Mat2::from_real(1.0, 1.0, 0.0, 0.0));
        assert!(iwasawa_split(&s).is_err());
        assert!(Sl2c::new(Mat2::from_real(1.0, 1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn renormalize_examples() {
        let s = Mat2::from_real(2.0, 1.0, 1.0, 1.0);
        assert_eq!(renormalize_det(&s).unwrap().into_inner(), s);

        let s = Mat2::from_real(1.0001, 0.0, 0.0, 1.0001);
        let r = renormalize_det(&s).unwrap();
        assert!((r.matrix().a11.re - 1.0).abs() < 1e-15);
        assert!(r.det_drift() < 1e-15);

        assert!(matches!(
            renormalize_det(&Mat2::from_real(-1.0, 0.0, 0.0, 1.0)),
            Err(Error::DeterminantDiverged { .. })
        ));
        assert!(matches!(
            renormalize_det(&Mat2::from_real(2.0, 0.0, 0.0, 1.0)),
            Err(Error::NotUnimodular { .. })
        ));
    }

    #[test]
    fn phase_and_quarter_turn_are_special_unitary() {
        for theta in [0.0, 0.7, -2.3] {
            let g = phase_swap(theta);
            assert!(Su2::new(g).is_ok());
        }
        assert!(Su2::new(quarter_turn()).is_ok());
    }

    proptest! {
        #[test]
        fn exp_inverse_pair(p in prop::array::uniform6(-2.0f64..2.0)) {
            let x = traceless(p);
            prop_assume!(x.norm() <= 5.0);
            let prod = exp_traceless(&x).unwrap() * exp_traceless(&-x).unwrap();
            prop_assert!(close(&prod, &Mat2::IDENTITY, 1e-11));
        }

        #[test]
        fn exp_is_unimodular(p in prop::array::uniform6(-2.0f64..2.0)) {
            let x = traceless(p);
            prop_assume!(x.norm() <= 5.0);
            let d = exp_traceless(&x).unwrap().det();
            prop_assert!((d - 1.0).norm() <= 1e-12);
        }

        #[test]
        fn iwasawa_recovers_factors(
            a in 0.2f64..5.0,
            w in prop::array::uniform2(-3.0f64..3.0),
            q in prop::array::uniform4(-1.0f64..1.0),
        ) {
            let fs0 = UpperTriangular::new(a, c(w[0], w[1])).unwrap();
            let phi0 = Su2::from_parameters(c(q[0], q[1]), c(q[2], q[3]));
            prop_assume!(phi0.is_ok());
            let phi0 = phi0.unwrap();
            let f = Sl2c::new(fs0.matrix() * *phi0.matrix()).unwrap();
            let (fs, phi) = iwasawa_split(&f).unwrap();
            prop_assert!(close(&fs.matrix(), &fs0.matrix(), 1e-10));
            prop_assert!(close(phi.matrix(), phi0.matrix(), 1e-10));
            prop_assert!(close(&(fs.matrix() * *phi.matrix()), f.matrix(), 1e-12 * (1.0 + f.matrix().norm())));
        }

        #[test]
        fn renormalized_det_is_one(p in prop::array::uniform8(-0.05f64..0.05)) {
            let s = Mat2::new(c(1.0 + p[0], p[1]), c(p[2], p[3]), c(p[4], p[5]), c(1.0 + p[6], p[7]));
            let r = renormalize_det(&s).unwrap();
            prop_assert!(r.det_drift() <= 1e-15);
        }
    }
}
