//! Indexed map helpers that run on rayon when the `parallel` feature is on
//! and fall back to plain iterators otherwise.
//!
//! Every output slot is produced by exactly one closure call, so results are
//! bit-identical between the two builds and across thread counts. Reductions
//! across slots are always done afterwards, sequentially, by the caller.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}
