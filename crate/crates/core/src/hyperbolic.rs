//! Hermitian model of hyperbolic 3-space.
//!
//! Minkowski space `R^{3,1}` is identified with 2×2 Hermitian matrices
//!
//! ```text
//! (x0, x1, x2, x3)  <->  [[x0 + x3, x1 + i x2], [x1 - i x2, x0 - x3]]
//! ```
//!
//! with `<X, Y> = -1/2 tr(X σ2 Y^t σ2)`, so that `<X, X> = -det X`. The
//! hyperboloid is `<X, X> = -1` with `X11 > 0`, and `SL(2,C)` acts by
//! `g · X = g X g^*`.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{Mat2, Sl2c};

/// Relative tolerance for the Hermitian check.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
/// Tolerance on `<X, X> + 1` for points of the hyperboloid.
pub const HYPERBOLOID_TOLERANCE: f64 = 1e-8;

/// Complex-bilinear extension of the Lorentz product to all 2×2 matrices.
pub fn lorentz_bilinear(x: &Mat2, y: &Mat2) -> Complex64 {
    let s = Mat2::SIGMA2;
    -(*x * s * y.transpose() * s).trace() * 0.5
}

/// Lorentz product of two Hermitian matrices.
pub fn lorentz_inner(x: &Mat2, y: &Mat2) -> Result<f64> {
    for m in [x, y] {
        let defect = m.hermitian_defect();
        if !(defect <= HERMITIAN_TOLERANCE * (1.0 + m.norm())) {
            return Err(Error::NotHermitian { defect });
        }
    }
    Ok(lorentz_bilinear(x, y).re)
}

/// Minkowski coordinates `(x0, x1, x2, x3)` of a Hermitian matrix.
pub fn to_coords(x: &Mat2) -> [f64; 4] {
    [
        0.5 * (x.a11.re + x.a22.re),
        x.a12.re,
        x.a12.im,
        0.5 * (x.a11.re - x.a22.re),
    ]
}

pub fn from_coords(x: [f64; 4]) -> Mat2 {
    Mat2::new(
        Complex64::new(x[0] + x[3], 0.0),
        Complex64::new(x[1], x[2]),
        Complex64::new(x[1], -x[2]),
        Complex64::new(x[0] - x[3], 0.0),
    )
}

/// Point of the hyperboloid model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianPoint(Mat2);

impl HermitianPoint {
    pub const BASEPOINT: HermitianPoint = HermitianPoint(Mat2::IDENTITY);

    pub fn new(x: Mat2) -> Result<Self> {
        let norm = lorentz_inner(&x, &x)?;
        if !((norm + 1.0).abs() <= HYPERBOLOID_TOLERANCE) {
            return Err(Error::NotOnHyperboloid { reason: "<X, X> != -1" });
        }
        if !(x.a11.re > 0.0) {
            return Err(Error::NotOnHyperboloid { reason: "X11 <= 0" });
        }
        Ok(Self(x))
    }

    pub fn from_coords(x: [f64; 4]) -> Result<Self> {
        Self::new(from_coords(x))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn coords(&self) -> [f64; 4] {
        to_coords(&self.0)
    }
}

/// `g X g^*`, symmetrized to remove rounding in the Hermitian part.
pub fn act(g: &Sl2c, x: &HermitianPoint) -> HermitianPoint {
    let m = *g.matrix() * x.0 * g.matrix().adjoint();
    HermitianPoint((m + m.adjoint()) * 0.5)
}

/// Poincaré-ball coordinates, `|b| < 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallPoint(pub [f64; 3]);

impl BallPoint {
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|b| b * b).sum::<f64>().sqrt()
    }
}

/// `b_i = x_i / (1 + x0)`.
pub fn to_ball(x: &HermitianPoint) -> Result<BallPoint> {
    let [x0, x1, x2, x3] = x.coords();
    if !(x0 > 0.0) {
        return Err(Error::NotOnHyperboloid { reason: "x0 <= 0" });
    }
    let d = 1.0 + x0;
    let b = BallPoint([x1 / d, x2 / d, x3 / d]);
    if !(b.norm() < 1.0 + 1e-12) {
        return Err(Error::NotOnHyperboloid { reason: "ball coordinates outside unit ball" });
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::exp_traceless;
    use proptest::prelude::*;

    fn hermitian(p: [f64; 4]) -> Mat2 {
        from_coords(p)
    }

    fn sl2c(p: [f64; 6]) -> Sl2c {
        let x = Mat2::new(
            Complex64::new(p[0], p[1]),
            Complex64::new(p[2], p[3]),
            Complex64::new(p[4], p[5]),
            Complex64::new(-p[0], -p[1]),
        );
        Sl2c::new(exp_traceless(&x).unwrap()).unwrap()
    }

    #[test]
    fn basepoint_and_spacelike_unit() {
        assert_eq!(lorentz_inner(&Mat2::IDENTITY, &Mat2::IDENTITY).unwrap(), -1.0);
        let x = Mat2::from_real(0.0, 1.0, 1.0, 0.0);
        assert_eq!(lorentz_inner(&x, &x).unwrap(), 1.0);
    }

    #[test]
    fn rejects_non_hermitian() {
        assert!(matches!(
            lorentz_inner(&Mat2::E12, &Mat2::IDENTITY),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn ball_examples() {
        assert_eq!(to_ball(&HermitianPoint::BASEPOINT).unwrap().0, [0.0, 0.0, 0.0]);
        let t = 0.8f64;
        let p = HermitianPoint::from_coords([t.cosh(), t.sinh(), 0.0, 0.0]).unwrap();
        let b = to_ball(&p).unwrap();
        assert!((b.0[0] - (t / 2.0).tanh()).abs() < 1e-15);
        assert_eq!(b.0[1], 0.0);
    }

    #[test]
    fn action_of_identity_and_on_basepoint() {
        let p = HermitianPoint::from_coords([2.0f64.sqrt(), 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(act(&Sl2c::IDENTITY, &p), p);
        let g = sl2c([0.3, -0.2, 0.5, 0.1, -0.4, 0.7]);
        let q = act(&g, &HermitianPoint::BASEPOINT);
        let gg = *g.matrix() * g.matrix().adjoint();
        assert!((*q.matrix() - gg).norm() < 1e-15);
        assert!(HermitianPoint::new(gg).is_ok());
    }

    proptest! {
        #[test]
        fn norm_is_minus_det(p in prop::array::uniform4(-3.0f64..3.0)) {
            let x = hermitian(p);
            let lhs = lorentz_inner(&x, &x).unwrap();
            // Oracle: signature (-, +, +, +) in Minkowski coordinates.
            let minkowski = -p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3];
            prop_assert!((lhs - minkowski).abs() <= 1e-12 * (1.0 + minkowski.abs()));
            prop_assert!((lhs + x.det().re).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }

        #[test]
        fn coordinate_round_trip(p in prop::array::uniform4(-10.0f64..10.0)) {
            let back = to_coords(&from_coords(p));
            for k in 0..4 {
                prop_assert!((back[k] - p[k]).abs() <= 1e-14 * (1.0 + p[k].abs()));
            }
        }

        #[test]
        fn symmetric_and_bilinear(
            a in prop::array::uniform4(-2.0f64..2.0),
            b in prop::array::uniform4(-2.0f64..2.0),
            c in prop::array::uniform4(-2.0f64..2.0),
            s in -3.0f64..3.0,
        ) {
            let (x, y, z) = (hermitian(a), hermitian(b), hermitian(c));
            let xy = lorentz_inner(&x, &y).unwrap();
            prop_assert!((xy - lorentz_inner(&y, &x).unwrap()).abs() <= 1e-12);
            let lhs = lorentz_inner(&(x * s + y), &z).unwrap();
            let rhs = s * lorentz_inner(&x, &z).unwrap() + lorentz_inner(&y, &z).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }

        #[test]
        fn action_preserves_norm_and_composes(
            g in prop::array::uniform6(-0.8f64..0.8),
            h in prop::array::uniform6(-0.8f64..0.8),
            t in -1.5f64..1.5,
            dir in prop::array::uniform3(-1.0f64..1.0),
        ) {
            let (g, h) = (sl2c(g), sl2c(h));
            let n = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
            prop_assume!(n > 1e-3);
            let p = HermitianPoint::from_coords([
                t.cosh(), t.sinh() * dir[0] / n, t.sinh() * dir[1] / n, t.sinh() * dir[2] / n,
            ]).unwrap();
            let q = act(&g, &p);
            let qq = lorentz_inner(q.matrix(), q.matrix()).unwrap();
            prop_assert!((qq + 1.0).abs() <= 1e-10);
            prop_assert!(HermitianPoint::new(*q.matrix()).is_ok());

            let gh = Sl2c::new(*g.matrix() * *h.matrix()).unwrap();
            let lhs = act(&gh, &p);
            let rhs = act(&g, &act(&h, &p));
            prop_assert!((*lhs.matrix() - *rhs.matrix()).norm() <= 1e-12 * (1.0 + lhs.matrix().norm()));
            prop_assert!(to_ball(&q).unwrap().norm() < 1.0);
        }
    }
}
