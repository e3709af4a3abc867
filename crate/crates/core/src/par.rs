//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) work is spread over the rayon pool
//! that is current at the call site; without it everything runs on the
//! calling thread. Results are always collected in index order, and
//! floating-point reductions happen sequentially afterwards, so output is
//! bit-identical for any thread count.

/// `into_par_iter()` when parallel, `into_iter()` otherwise.
#[macro_export]
macro_rules! maybe_par_iter {
    ($expr:expr) => {{
        #[cfg(feature = "parallel")]
        {
            use rayon::iter::IntoParallelIterator;
            IntoParallelIterator::into_par_iter($expr)
        }
        #[cfg(not(feature = "parallel"))]
        {
            IntoIterator::into_iter($expr)
        }
    }};
}

/// `par_iter_mut()` when parallel, `iter_mut()` otherwise.
#[macro_export]
macro_rules! maybe_par_iter_mut {
    ($expr:expr) => {{
        #[cfg(feature = "parallel")]
        {
            use rayon::iter::IntoParallelRefMutIterator;
            ($expr).par_iter_mut()
        }
        #[cfg(not(feature = "parallel"))]
        {
            ($expr).iter_mut()
        }
    }};
}

/// Evaluates `f(0..n)` and returns the results in index order.
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Evaluates `f` on every item of `items`, results in input order.
pub fn map_slice<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Number of worker threads that `map_range` would use.
pub fn current_workers() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Splits `total` Monte Carlo samples into fixed-size batches. Batch
/// boundaries depend only on `total`, never on the worker count.
pub fn batches(total: u64, batch: u64) -> Vec<(u64, u64)> {
    let batch = batch.max(1);
    let mut out = Vec::with_capacity(total.div_ceil(batch) as usize);
    let mut start = 0;
    while start < total {
        let len = batch.min(total - start);
        out.push((start / batch, len));
        start += len;
    }
    out
}
