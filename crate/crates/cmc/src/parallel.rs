//! Grid integration with rows spread over a rayon pool.
//!
//! Each row only depends on its left-column frame, so the result is bitwise
//! identical to the sequential integrator for any thread count.

use cmc_core::grid::GridSpec;
use cmc_core::magnus::{assemble_frame_grid, integrate_left_column, integrate_row, FrameGrid, IntegratorConfig};
use cmc_core::seeds::Connection;
use cmc_core::{Result, Sl2c};
use rayon::prelude::*;

pub fn integrate_grid<C: Connection + Sync + ?Sized>(
    conn: &C,
    spec: &GridSpec,
    initial: &Sl2c,
    cfg: &IntegratorConfig,
) -> Result<FrameGrid> {
    spec.validate()?;
    cfg.validate()?;
    let (column, column_diag) = integrate_left_column(conn, spec, initial, cfg)?;
    let rows = column
        .par_iter()
        .enumerate()
        .map(|(j, s)| integrate_row(conn, spec, j, s, cfg))
        .collect::<Result<Vec<_>>>()?;
    assemble_frame_grid(conn, spec, rows, column_diag, cfg)
}

/// A pool with `threads` workers, or rayon's default for `None` or 0.
pub fn pool(threads: Option<usize>) -> std::result::Result<rayon::ThreadPool, rayon::ThreadPoolBuildError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads.filter(|n| *n > 0) {
        b = b.num_threads(n);
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use cmc_core::seeds::{ConnectionField, RankOneSeed, TanProfile};

    #[test]
    fn matches_sequential_bitwise() {
        let conn = ConnectionField::from_profile(RankOneSeed::Tan(TanProfile::new(1.0, 0.0, 0.5).unwrap())).unwrap();
        let spec = GridSpec::new(0.0, 0.4, -0.1, 0.3, 9, 7).unwrap();
        let cfg = IntegratorConfig::default();
        let sequential = cmc_core::magnus::integrate_grid(&conn, &spec, &Sl2c::IDENTITY, &cfg).unwrap();
        for threads in [1, 3] {
            let p = pool(Some(threads)).unwrap();
            let parallel = p.install(|| integrate_grid(&conn, &spec, &Sl2c::IDENTITY, &cfg)).unwrap();
            assert_eq!(parallel, sequential);
        }
    }
}
