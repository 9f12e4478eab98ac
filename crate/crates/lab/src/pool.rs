//! Trial worker pool. Results come back in input order whatever the thread
//! count, so everything downstream is written by one thread deterministically.

use rayon::prelude::*;

use crate::error::{LabError, LabResult};

/// `f` over `items` on `threads` workers (0 = rayon default), in order.
pub fn ordered_map<T, R, F>(threads: usize, items: &[T], f: F) -> LabResult<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> LabResult<R> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| LabError::Config(format!("thread pool: {e}")))?;
    pool.install(|| items.par_iter().map(&f).collect::<Vec<_>>()).into_iter().collect()
}
