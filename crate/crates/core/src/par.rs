//! Data-parallel helpers. With the `parallel` feature these run on the
//! rayon pool; without it they are plain sequential loops. Results are
//! always returned in index order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// `(0..n).map(f).collect()`, possibly in parallel.
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
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

/// `items.iter().map(f).collect()`, possibly in parallel.
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Number of workers the helpers above will use.
pub fn current_threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Sizes the global pool; `0` keeps the default (one worker per core).
/// Only the first call has an effect. Ignored in sequential builds.
pub fn configure_threads(n: usize) {
    #[cfg(feature = "parallel")]
    {
        if n > 0 {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                log::debug!("thread pool already configured: {e}");
            }
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = n;
    }
}
