//! Rayon-parallel driver for the Monte Carlo ordering oracle.
//!
//! Model `i` depends only on `(seed, i)` and results are reduced in index
//! order, so the verdict does not depend on the thread count.

use hiconvex_core::ordering::{oracle_gap, oracle_model, oracle_summary, DiscreteMeasure, OracleVerdict};
use rayon::prelude::*;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "HICONVEX_THREADS";

/// Worker cap from `HICONVEX_THREADS`; `None` when unset.
pub fn thread_cap() -> Result<Option<usize>, String> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!("{THREADS_ENV} must be a positive integer, got `{v}`")),
        },
    }
}

/// Runs `work` on a pool honoring [`thread_cap`].
pub fn with_pool<T: Send>(work: impl FnOnce() -> T + Send) -> Result<T, String> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap()? {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| e.to_string())?;
    Ok(pool.install(work))
}

/// Parallel equivalent of `hiconvex_core::ordering::oracle_check`.
pub fn parallel_oracle(
    nu: &DiscreteMeasure,
    mu: &DiscreteMeasure,
    a: f64,
    b: f64,
    seed: u64,
    count: u64,
) -> Result<OracleVerdict, String> {
    let gaps = with_pool(|| {
        (0..count)
            .into_par_iter()
            .map(|i| {
                let model = oracle_model(seed, i, a, b)?;
                Ok((i, oracle_gap(nu, mu, &model)?))
            })
            .collect::<Result<Vec<_>, hiconvex_core::Error>>()
    })?
    .map_err(|e| e.to_string())?;
    Ok(oracle_summary(nu, mu, gaps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use hiconvex_core::ordering::{condensation_dispersion, oracle_check};

    #[test]
    fn matches_the_serial_oracle() {
        let (cond, disp) = condensation_dispersion(0.0, 1.0).unwrap();
        for (nu, mu) in [(&cond, &disp), (&disp, &cond)] {
            let serial = oracle_check(nu, mu, 0.0, 1.0, 7, 2000).unwrap();
            let parallel = parallel_oracle(nu, mu, 0.0, 1.0, 7, 2000).unwrap();
            assert_eq!(serial, parallel);
        }
    }
}
