//! Rectangular conformal grids `x + iy` and row-major storage over them.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Uniform grid on `[x0, x1] × [y0, y1]` with `nx × ny` nodes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64, nx: usize, ny: usize) -> Result<Self> {
        let spec = Self { x0, x1, y0, y1, nx, ny };
        spec.validate()?;
        Ok(spec)
    }

    /// Square grid `[x0, x0 + side] × [y0, y0 + side]` with `n × n` nodes.
    pub fn square(x0: f64, y0: f64, side: f64, n: usize) -> Result<Self> {
        Self::new(x0, x0 + side, y0, y0 + side, n, n)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::GridTooSmall { nx: self.nx, ny: self.ny, min: 2 });
        }
        let bounds = [self.x0, self.x1, self.y0, self.y1];
        if bounds.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidConfig("grid bounds must be finite"));
        }
        if !(self.x1 > self.x0) || !(self.y1 > self.y0) {
            return Err(Error::InvalidConfig("grid bounds must be increasing"));
        }
        Ok(())
    }

    pub fn hx(&self) -> f64 {
        (self.x1 - self.x0) / (self.nx - 1) as f64
    }

    pub fn hy(&self) -> f64 {
        (self.y1 - self.y0) / (self.ny - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.nx {
            self.x1
        } else {
            self.x0 + i as f64 * self.hx()
        }
    }

    pub fn y(&self, j: usize) -> f64 {
        if j + 1 == self.ny {
            self.y1
        } else {
            self.y0 + j as f64 * self.hy()
        }
    }

    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.x(i), self.y(j))
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// The grid with every cell halved, `(2nx - 1) × (2ny - 1)` nodes.
    pub fn refined(&self) -> Self {
        Self { nx: 2 * self.nx - 1, ny: 2 * self.ny - 1, ..*self }
    }
}

/// Values stored row-major (`j * nx + i`) over a [`GridSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct Grid<T> {
    pub spec: GridSpec,
    pub values: Vec<T>,
}

impl<T> Grid<T> {
    pub fn from_fn(spec: GridSpec, mut f: impl FnMut(usize, usize, Complex64) -> T) -> Self {
        let mut values = Vec::with_capacity(spec.len());
        for j in 0..spec.ny {
            for i in 0..spec.nx {
                values.push(f(i, j, spec.point(i, j)));
            }
        }
        Self { spec, values }
    }

    pub fn try_from_fn(
        spec: GridSpec,
        mut f: impl FnMut(usize, usize, Complex64) -> Result<T>,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(spec.len());
        for j in 0..spec.ny {
            for i in 0..spec.nx {
                values.push(f(i, j, spec.point(i, j))?);
            }
        }
        Ok(Self { spec, values })
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.values[self.spec.index(i, j)]
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Grid<U> {
        Grid { spec: self.spec, values: self.values.iter().map(f).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_endpoints() {
        let g = GridSpec::new(0.0, 0.4, -1.0, 1.0, 65, 3).unwrap();
        assert!((g.hx() - 0.00625).abs() < 1e-16);
        assert_eq!(g.x(64), 0.4);
        assert_eq!(g.y(1), 0.0);
        assert_eq!(g.refined().nx, 129);
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(GridSpec::new(0.0, 1.0, 0.0, 1.0, 1, 4).is_err());
        assert!(GridSpec::new(0.0, 0.0, 0.0, 1.0, 3, 4).is_err());
        assert!(GridSpec::new(0.0, f64::NAN, 0.0, 1.0, 3, 4).is_err());
    }
}
