//! Holonomy of a connection around closed loops and the unitarity defect
//! that decides whether the immersion descends to a quotient.
//!
//! The matrix `ρ` depends on the basepoint; only its conjugacy invariants
//! (trace, determinant, defect of unitarizable classes) are canonical.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{Mat2, Sl2c};
use crate::magnus::{integrate_path, IntegratorConfig, PathDiagnostics, PathSpec};
use crate::seeds::Connection;

/// Largest gap between the first and last point of a closed loop.
pub const LOOP_CLOSURE_TOLERANCE: f64 = 1e-12;
/// `ρ` descends iff `‖ρρ^* - I‖_F` is at most this.
pub const DESCENT_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HolonomyResult {
    /// Holonomy with initial frame `I` at `basepoint`.
    pub rho: Sl2c,
    pub unitarity_defect: f64,
    pub trace: Complex64,
    pub basepoint: Complex64,
    pub diagnostics: PathDiagnostics,
}

impl HolonomyResult {
    pub fn from_matrix(rho: Sl2c, basepoint: Complex64) -> Self {
        Self {
            rho,
            unitarity_defect: rho.matrix().unitarity_defect(),
            trace: rho.matrix().trace(),
            basepoint,
            diagnostics: PathDiagnostics::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitarityReport {
    pub descends: bool,
    pub defect: f64,
    /// `tr ρ` is real with `|tr ρ| ≤ 2`, the trace condition for a
    /// conjugate of `ρ` to lie in `SU(2)`. Not a decision.
    pub possibly_unitarizable: bool,
}

pub fn unitarity_report(h: &HolonomyResult) -> UnitarityReport {
    let t = h.trace;
    UnitarityReport {
        descends: h.unitarity_defect <= DESCENT_TOLERANCE,
        defect: h.unitarity_defect,
        possibly_unitarizable: t.im.abs() <= 1e-9 * (1.0 + t.re.abs()) && t.re.abs() <= 2.0 + 1e-9,
    }
}

/// Holonomy around a closed polyline starting and ending at `loop_points[0]`.
pub fn holonomy<C: Connection + ?Sized>(
    conn: &C,
    loop_points: &[Complex64],
    cfg: &IntegratorConfig,
) -> Result<HolonomyResult> {
    if loop_points.len() < 3 {
        return Err(Error::InvalidConfig("a loop needs at least three points"));
    }
    let gap = (loop_points[0] - loop_points[loop_points.len() - 1]).norm();
    if !(gap <= LOOP_CLOSURE_TOLERANCE) {
        return Err(Error::LoopNotClosed { gap });
    }
    let path = PathSpec::polyline(loop_points.to_vec())?;
    let (rho, diagnostics) = integrate_path(conn, &path, cfg)?;
    Ok(HolonomyResult { diagnostics, ..HolonomyResult::from_matrix(rho, loop_points[0]) })
}

/// Holonomy along `y ↦ y + period` at fixed `x`, for a connection that is
/// periodic in `y`. The path is split into `pieces` segments.
pub fn periodic_holonomy<C: Connection + ?Sized>(
    conn: &C,
    x: f64,
    y0: f64,
    period: f64,
    pieces: usize,
    cfg: &IntegratorConfig,
) -> Result<HolonomyResult> {
    if pieces == 0 || !(period > 0.0) {
        return Err(Error::InvalidConfig("periodic loop needs a positive period and at least one piece"));
    }
    let points: Vec<Complex64> =
        (0..=pieces).map(|k| Complex64::new(x, y0 + period * k as f64 / pieces as f64)).collect();
    let path = PathSpec::polyline(points)?;
    let (rho, diagnostics) = integrate_path(conn, &path, cfg)?;
    let base = Complex64::new(x, y0);
    Ok(HolonomyResult { diagnostics, ..HolonomyResult::from_matrix(rho, base) })
}

/// The cylinder loop `y: 0 → 2π` at fixed `x`.
pub fn cylinder_holonomy<C: Connection + ?Sized>(conn: &C, x: f64, cfg: &IntegratorConfig) -> Result<HolonomyResult> {
    periodic_holonomy(conn, x, 0.0, 2.0 * PI, 8, cfg)
}

/// A loop followed by its reversal.
pub fn loop_and_reversal(loop_points: &[Complex64]) -> Vec<Complex64> {
    let mut out = loop_points.to_vec();
    out.extend(loop_points.iter().rev().skip(1));
    out
}

/// Rectangle `z0 → z0 + w → z0 + w + ih → z0 + ih → z0`.
pub fn rectangle_loop(z0: Complex64, width: f64, height: f64) -> Vec<Complex64> {
    let i = Complex64::i();
    alloc::vec![z0, z0 + width, z0 + width + i * height, z0 + i * height, z0]
}

/// `ρ` for a unitary check that bypasses integration.
pub fn matrix_report(m: Mat2) -> Result<UnitarityReport> {
    Ok(unitarity_report(&HolonomyResult::from_matrix(Sl2c::new(m)?, Complex64::new(0.0, 0.0))))
}

#[cfg(test)]
mod tests {
    extern crate std;

    use super::*;
    use crate::linalg::{exp_traceless, Su2};
    use crate::seeds::{ConnectionField, RankOneSeed, TanProfile, ZeroConnection};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tan_connection(lambda: f64) -> ConnectionField {
        ConnectionField::from_profile(RankOneSeed::Tan(TanProfile::new(1.0, 0.0, lambda).unwrap())).unwrap()
    }

    #[test]
    fn trivial_holonomies() {
        let cfg = IntegratorConfig::default();
        let h = holonomy(&ZeroConnection, &rectangle_loop(c(0.0, 0.0), 1.0, 2.0), &cfg).unwrap();
        assert_eq!(h.rho, Sl2c::IDENTITY);
        let r = unitarity_report(&h);
        assert!(r.descends && r.defect == 0.0 && r.possibly_unitarizable);
        let h = holonomy(&tan_connection(0.5), &rectangle_loop(c(0.05, 0.1), 0.2, 0.3), &cfg).unwrap();
        assert!((*h.rho.matrix() - Mat2::IDENTITY).norm() <= 10.0 * cfg.atol);
    }

    #[test]
    fn open_loops_are_rejected() {
        let cfg = IntegratorConfig::default();
        let open = [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0)];
        assert!(matches!(holonomy(&ZeroConnection, &open, &cfg), Err(Error::LoopNotClosed { .. })));
    }

    #[test]
    fn report_examples() {
        let r = matrix_report(Mat2::from_real(2.0, 0.0, 0.0, 0.5)).unwrap();
        assert!(!r.descends);
        assert!((r.defect - (9.0f64 + 9.0 / 16.0).sqrt()).abs() < 1e-15);
        let u = Su2::from_parameters(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        let r = matrix_report(*u.matrix()).unwrap();
        assert!(r.descends && r.possibly_unitarizable);
        // Hyperbolic element: trace outside [-2, 2].
        let r = matrix_report(Mat2::from_real(2.0, 0.0, 0.0, 0.5)).unwrap();
        assert!(!r.possibly_unitarizable);
        // Unitarizable but not unitary: conjugate of a rotation.
        let p = Mat2::from_real(2.0, 1.0, 0.0, 0.5);
        let m = p * *u.matrix() * p.inverse().unwrap();
        let r = matrix_report(m).unwrap();
        assert!(!r.descends && r.possibly_unitarizable);
    }

    #[test]
    fn cylinder_trace_is_basepoint_invariant() {
        let conn = tan_connection(0.5);
        for atol in [1e-10, 1e-12] {
            let cfg = IntegratorConfig::with_atol(atol);
            let a = cylinder_holonomy(&conn, 0.1, &cfg).unwrap();
            let b = cylinder_holonomy(&conn, 0.2, &cfg).unwrap();
            assert!((a.trace - b.trace).norm() <= 1e-7, "{} {}", a.trace, b.trace);
            assert!((a.rho.matrix().det() - 1.0).norm() <= 1e-9);
        }
    }

    #[test]
    fn cylinder_holonomy_matches_closed_form() {
        // The connection does not depend on y, so the y-loop holonomy is
        // exp(2π (i A - λ (i A)^*)) at the fixed x.
        let conn = tan_connection(0.5);
        let x = 0.1;
        let (a, b) = conn.coefficients(c(x, 0.0)).unwrap();
        let i = Complex64::i();
        let exact = exp_traceless(&((a * i + b * (-i)) * (2.0 * PI))).unwrap();
        let h = cylinder_holonomy(&conn, x, &IntegratorConfig::with_atol(1e-12)).unwrap();
        assert!((*h.rho.matrix() - exact).norm() <= 1e-9 * exact.norm());
    }

    proptest! {
        #[test]
        fn loop_then_reversal_is_trivial(p in prop::array::uniform4(-1.0f64..1.0)) {
            let conn = tan_connection(0.5);
            let cfg = IntegratorConfig::default();
            let l = [c(0.1, 0.0), c(0.1 + 0.2 * p[0].abs(), p[1]), c(0.3, p[2] + p[3]), c(0.1, 0.0)];
            let h = holonomy(&conn, &loop_and_reversal(&l), &cfg).unwrap();
            prop_assert!((*h.rho.matrix() - Mat2::IDENTITY).norm() <= 10.0 * cfg.atol);
        }

        #[test]
        fn defect_vanishes_exactly_on_su2(p in prop::array::uniform4(-1.0f64..1.0), s in 0.1f64..3.0) {
            prop_assume!(p.iter().map(|x| x * x).sum::<f64>() > 1e-3);
            let u = Su2::from_parameters(c(p[0], p[1]), c(p[2], p[3])).unwrap();
            prop_assert!(matrix_report(*u.matrix()).unwrap().descends);
            let d = Mat2::from_real(s, 0.0, 0.0, 1.0 / s);
            let r = matrix_report(*u.matrix() * d).unwrap();
            prop_assert_eq!(r.descends, (s - 1.0).abs() < 1e-9);
        }
    }
}
