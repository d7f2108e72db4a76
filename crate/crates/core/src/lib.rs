//! Numerical laboratory for conformal constant-mean-curvature immersions into
//! hyperbolic 3-space built from flat rank-one `SL(2,C)` connections.
//!
//! The pipeline is: a rank-one seed `eta` and a spectral parameter `lambda`
//! give the connection `Omega = eta - lambda * eta^*` ([`seeds`]); the frame
//! equation `S^{-1} dS = Omega` is integrated with a fourth-order Magnus
//! scheme ([`magnus`]); the immersion `f = S S^*`, the Gauss map and the
//! extracted curvature data come out of [`surface`]. Holonomy, the Jacobi
//! potential and the Aiyama–Akutagawa connection live in [`monodromy`],
//! [`stability`] and [`aiyama`].
//!
//! The crate is `no_std` and only needs `alloc`; file formats, the CLI and
//! multi-threaded grid integration live in the `cmc` crate.

#![no_std]

extern crate alloc;

pub mod aiyama;
pub mod error;
pub mod grid;
pub mod hyperbolic;
pub mod laxpair;
pub mod linalg;
pub mod magnus;
pub mod monodromy;
pub mod seeds;
pub mod stability;
pub mod surface;

pub use error::{Error, Result};
pub use linalg::{Mat2, Sl2c, Su2, UpperTriangular};
pub use num_complex::Complex64;
