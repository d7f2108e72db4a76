//! Jacobi-operator potentials and a small Dirichlet eigenvalue routine.
//!
//! The Jacobi operator is `J φ = -Δφ - (2H² - ½ e^{-4u}|Q|² - 2) φ`; on a
//! rotationally symmetric surface with `s = log r` the Fourier mode `m`
//! reduces it to `-d²/ds² - V_m(s)` with
//! `V_m = e^{2u}(2H² - ½ e^{-4u}|Q|² - 2) - m²`.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// `2H² - ½ e^{-4u}|Q|² - 2`.
pub fn jacobi_potential(u: f64, q: Complex64, h: f64) -> f64 {
    2.0 * h * h - 0.5 * (-4.0 * u).exp() * q.norm_sqr() - 2.0
}

/// `V_m(s)` sampled at `s`.
pub fn fourier_potential(
    s: &[f64],
    u: impl Fn(f64) -> f64,
    q: impl Fn(f64) -> Complex64,
    h: f64,
    m: i64,
) -> Vec<f64> {
    let m2 = (m * m) as f64;
    s.iter()
        .map(|&s| {
            let u = u(s);
            (2.0 * u).exp() * jacobi_potential(u, q(s), h) - m2
        })
        .collect()
}

/// `C_H = 2(1+H) - sqrt(1-H²)`.
pub fn c_h(h: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&h) {
        return Err(Error::OutOfRange { name: "H", value: h });
    }
    Ok(2.0 * (1.0 + h) - (1.0 - h * h).sqrt())
}

/// `2H² - 2 - ½ C_H²/(1+|ν|²)²`.
pub fn aa_jacobi_potential(nu_abs: f64, h: f64) -> Result<f64> {
    if !(nu_abs >= 0.0) {
        return Err(Error::OutOfRange { name: "|nu|", value: nu_abs });
    }
    let c = c_h(h)?;
    let w = 1.0 + nu_abs * nu_abs;
    Ok(2.0 * h * h - 2.0 - 0.5 * c * c / (w * w))
}

/// Eigenvalue summary of `-d²/ds² - V` with Dirichlet conditions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralSummary {
    pub negative_eigenvalue_count: usize,
    pub smallest_eigenvalue: f64,
}

/// Symmetric tridiagonal matrix given by its diagonal and off-diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    /// `-d²/ds² - V` on `[a, b]`, discretized on the interior of a uniform
    /// grid with `n` intervals; `v` holds `V` at the `n - 1` interior nodes.
    pub fn schrodinger(a: f64, b: f64, v: &[f64]) -> Result<Self> {
        if v.is_empty() || !(b > a) {
            return Err(Error::InvalidConfig("eigenvalue problem needs an interval and interior samples"));
        }
        let h = (b - a) / (v.len() + 1) as f64;
        let k = 1.0 / (h * h);
        Ok(Self { diag: v.iter().map(|v| 2.0 * k - v).collect(), off: alloc::vec![-k; v.len() - 1] })
    }

    /// Number of eigenvalues strictly below `x` (Sturm count from the
    /// `LDL^t` pivots).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for k in 0..self.diag.len() {
            let off2 = if k == 0 { 0.0 } else { self.off[k - 1] * self.off[k - 1] };
            d = self.diag[k] - x - if k == 0 { 0.0 } else { off2 / d };
            if d == 0.0 {
                d = -f64::EPSILON * (1.0 + self.diag[k].abs());
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin bounds on the spectrum.
    pub fn bounds(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..n {
            let r = if k > 0 { self.off[k - 1].abs() } else { 0.0 } + if k + 1 < n { self.off[k].abs() } else { 0.0 };
            lo = lo.min(self.diag[k] - r);
            hi = hi.max(self.diag[k] + r);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.bounds();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-14 * (1.0 + lo.abs().max(hi.abs())) {
                break;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Dirichlet spectrum summary of `-d²/ds² - V` on `[a, b]`.
pub fn dirichlet_spectrum(a: f64, b: f64, v: &[f64]) -> Result<SpectralSummary> {
    let t = Tridiagonal::schrodinger(a, b, v)?;
    Ok(SpectralSummary { negative_eigenvalue_count: t.count_below(0.0), smallest_eigenvalue: t.eigenvalue(0) })
}

/// Interior nodes of the uniform grid with `n` intervals on `[a, b]`.
pub fn interior_nodes(a: f64, b: f64, n: usize) -> Vec<f64> {
    (1..n).map(|k| a + (b - a) * k as f64 / n as f64).collect()
}

#[cfg(test)]
mod tests {
    extern crate std;

    use super::*;
    use core::f64::consts::PI;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn potential_examples() {
        assert_eq!(jacobi_potential(0.0, c(0.0, 0.0), 0.0), -2.0);
        assert!((jacobi_potential(0.3, c(0.0, 0.0), 0.6) + 32.0 / 25.0).abs() < 1e-15);
        assert_eq!(jacobi_potential(0.0, c(2.0, 0.0), 0.0), -4.0);
    }

    #[test]
    fn fourier_examples() {
        let s = interior_nodes(0.0, 1.0, 10);
        let v1 = fourier_potential(&s, |_| 0.0, |_| c(0.0, 0.0), 0.0, 1);
        assert!(v1.iter().all(|v| *v == -3.0));
        let u = |s: f64| 0.2 * s;
        let q = |s: f64| c(s, 1.0);
        let v0 = fourier_potential(&s, u, q, 0.4, 0);
        for (k, &s) in s.iter().enumerate() {
            assert!((v0[k] - (2.0 * u(s)).exp() * jacobi_potential(u(s), q(s), 0.4)).abs() < 1e-15);
        }
    }

    #[test]
    fn c_h_examples() {
        assert_eq!(c_h(0.0).unwrap(), 1.0);
        assert!((c_h(0.6).unwrap() - 2.4).abs() < 1e-15);
        assert!((c_h(1.0 - 1e-12).unwrap() - 4.0).abs() < 1e-5);
        assert!(c_h(1.0).is_err() && c_h(-0.1).is_err());
        assert_eq!(aa_jacobi_potential(0.0, 0.0).unwrap(), -2.5);
        assert!((aa_jacobi_potential(1e8, 0.0).unwrap() + 2.0).abs() < 1e-15);
    }

    #[test]
    fn constant_potential_spectrum() {
        // Exact Dirichlet eigenvalues on [0, π]: k² - V for k ≥ 1.
        for (v, expected) in [(-3.0, 0), (3.0, 1), (5.0, 2), (0.5, 0)] {
            let s = dirichlet_spectrum(0.0, PI, &std::vec![v; 399]).unwrap();
            assert_eq!(s.negative_eigenvalue_count, expected, "V = {v}");
            assert!((s.smallest_eigenvalue - (1.0 - v)).abs() < 1e-4, "{}", s.smallest_eigenvalue);
        }
    }

    #[test]
    fn bisection_reproduces_discrete_spectrum() {
        // Oracle: the discrete Dirichlet Laplacian has eigenvalues
        // (4/h²) sin²(kπh/(2L)).
        let n = 50;
        let t = Tridiagonal::schrodinger(0.0, 1.0, &std::vec![0.0; n - 1]).unwrap();
        let h = 1.0 / n as f64;
        for k in 0..n - 1 {
            let exact = 4.0 / (h * h) * ((k + 1) as f64 * PI * h / 2.0).sin().powi(2);
            assert!((t.eigenvalue(k) - exact).abs() < 1e-9 * exact);
        }
    }

    proptest! {
        #[test]
        fn jacobi_potential_is_bounded(u in -2.0f64..2.0, q in prop::array::uniform2(-5.0f64..5.0), h in 0.0f64..0.999) {
            let v = jacobi_potential(u, c(q[0], q[1]), h);
            prop_assert!(v <= 2.0 * h * h - 2.0 && 2.0 * h * h - 2.0 < 0.0);
        }

        #[test]
        fn m_shift_identity(u in -1.0f64..1.0, q in prop::array::uniform2(-3.0f64..3.0), h in 0.0f64..0.99, m in -6i64..6, mp in -6i64..6) {
            let s = [0.0, 0.5, 1.0];
            let vm = fourier_potential(&s, |s| u * s, |_| c(q[0], q[1]), h, m);
            let vmp = fourier_potential(&s, |s| u * s, |_| c(q[0], q[1]), h, mp);
            for k in 0..3 {
                // Exact up to the rounding of the two subtractions.
                prop_assert!((vm[k] - vmp[k] - (mp * mp - m * m) as f64).abs() <= 4.0 * f64::EPSILON * (36.0 + vm[k].abs()));
            }
        }

        #[test]
        fn aa_substitution_agrees(nu in 0.0f64..5.0, h in 0.0f64..0.99, u in -1.0f64..1.0, phase in 0.0f64..6.3) {
            // |Q|² e^{-4u} = C_H²/(1+|ν|²)².
            let ch = c_h(h).unwrap();
            let qabs = ch / (1.0 + nu * nu) * (2.0 * u).exp();
            let q = Complex64::from_polar(qabs, phase);
            let lhs = aa_jacobi_potential(nu, h).unwrap();
            let rhs = jacobi_potential(u, q, h);
            prop_assert!((lhs - rhs).abs() <= 1e-14 * (1.0 + lhs.abs()));
        }
    }
}
