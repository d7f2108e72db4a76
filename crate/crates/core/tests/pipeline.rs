//! End-to-end checks across seeds, integration, geometry and holonomy.

use std::sync::Arc;

use cmc_core::grid::GridSpec;
use cmc_core::laxpair::DifferenceScheme;
use cmc_core::linalg::exp_traceless;
use cmc_core::magnus::{integrate_grid, IntegratorConfig};
use cmc_core::monodromy::periodic_holonomy;
use cmc_core::seeds::{ConnectionField, OdeProfile, OdeProfileSpec, RankOneSeed, TanProfile};
use cmc_core::surface::extract_geometry;
use cmc_core::{Complex64, Mat2, Sl2c};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn tan(lambda: f64) -> ConnectionField {
    ConnectionField::from_profile(RankOneSeed::Tan(TanProfile::new(1.0, 0.0, lambda).unwrap())).unwrap()
}

fn frame(x: Mat2) -> Sl2c {
    Sl2c::new(exp_traceless(&x).unwrap()).unwrap()
}

#[test]
fn constant_left_factor_carries_through_the_grid() {
    let conn = tan(0.5);
    let spec = GridSpec::square(0.0, 0.0, 0.3, 9).unwrap();
    let cfg = IntegratorConfig::with_atol(1e-12);
    let g = frame(Mat2::new(c(0.2, 0.1), c(-0.3, 0.4), c(0.5, 0.0), c(-0.2, -0.1)));
    let plain = integrate_grid(&conn, &spec, &Sl2c::IDENTITY, &cfg).unwrap();
    let moved = integrate_grid(&conn, &spec, &g, &cfg).unwrap();
    for (a, b) in plain.frames.values.iter().zip(&moved.frames.values) {
        let expected = *g.matrix() * *a.matrix();
        assert!((expected - *b.matrix()).norm() <= 1e-9 * expected.norm());
    }
}

#[test]
fn mean_curvature_is_invariant_under_isometries() {
    let conn = tan(0.25);
    let spec = GridSpec::square(0.0, 0.0, 0.2, 17).unwrap();
    let cfg = IntegratorConfig::with_atol(1e-12);
    let h = |initial: &Sl2c| {
        let grid = integrate_grid(&conn, &spec, initial, &cfg).unwrap();
        extract_geometry(&grid, DifferenceScheme::Richardson).unwrap().median_h()
    };
    let reference = h(&Sl2c::IDENTITY);
    let g = frame(Mat2::new(c(0.3, 0.0), c(0.1, -0.2), c(0.0, 0.4), c(-0.3, 0.0)));
    assert!((h(&g) - reference).abs() <= 1e-8, "{} {}", h(&g), reference);
}

#[test]
fn tan_surfaces_follow_the_measured_law() {
    // Regression record of the law the integrated tan surfaces obey.
    let spec = GridSpec::square(0.0, 0.0, 0.3, 33).unwrap();
    let cfg = IntegratorConfig::with_atol(1e-12);
    for lambda in [0.25, 0.5, 0.75] {
        let grid = integrate_grid(&tan(lambda), &spec, &Sl2c::IDENTITY, &cfg).unwrap();
        let g = extract_geometry(&grid, DifferenceScheme::Richardson).unwrap();
        let observed = (1.0 + lambda * lambda) / (1.0 - lambda * lambda);
        assert!((g.median_h().abs() - observed).abs() <= 1e-6, "lambda {lambda}: {}", g.median_h());
        assert!(g.max_conformal_defect() <= 1e-8);
    }
}

#[test]
fn numerical_profile_reproduces_the_tan_frames() {
    let (c0, delta, lambda) = (1.0, 0.3, 0.5);
    let g0 = f64::tan(delta);
    let spec = OdeProfileSpec { g0, rho0: c0 / (1.0 + g0 * g0), lambda, x0: 0.0, x_min: -0.1, x_max: 0.5, step: 1e-3 };
    let ode = ConnectionField::from_profile(RankOneSeed::Ode(Arc::new(OdeProfile::build(spec).unwrap()))).unwrap();
    let exact = ConnectionField::from_profile(RankOneSeed::Tan(TanProfile::new(c0, delta, lambda).unwrap())).unwrap();
    let grid = GridSpec::square(0.0, 0.0, 0.4, 9).unwrap();
    let cfg = IntegratorConfig::with_atol(1e-12);
    let a = integrate_grid(&ode, &grid, &Sl2c::IDENTITY, &cfg).unwrap();
    let b = integrate_grid(&exact, &grid, &Sl2c::IDENTITY, &cfg).unwrap();
    for (s, t) in a.frames.values.iter().zip(&b.frames.values) {
        assert!((*s.matrix() - *t.matrix()).norm() <= 1e-8);
    }
}

#[test]
fn holonomy_is_conjugated_by_basepoint_shifts() {
    // The tan connection does not depend on y, so moving the basepoint along
    // the loop conjugates the holonomy by the partial transport.
    let conn = tan(0.5);
    let cfg = IntegratorConfig::with_atol(1e-12);
    let period = 2.0 * std::f64::consts::PI;
    let a = periodic_holonomy(&conn, 0.1, 0.0, period, 8, &cfg).unwrap();
    let b = periodic_holonomy(&conn, 0.1, 1.0, period, 8, &cfg).unwrap();
    assert!((a.trace - b.trace).norm() <= 1e-9);
    let partial = periodic_holonomy(&conn, 0.1, 0.0, 1.0, 1, &cfg).unwrap().rho;
    let expected = *partial.inverse().matrix() * *a.rho.matrix() * *partial.matrix();
    assert!((expected - *b.rho.matrix()).norm() <= 1e-8 * expected.norm());
}
