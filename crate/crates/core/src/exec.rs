//! Execution mode for the data-parallel kernels.
//!
//! With the `parallel` feature (default) the kernels fan out over rayon's
//! global pool; without it, or with [`Mode::Sequential`], they run on the
//! calling thread. Results are identical in both modes: every kernel merges
//! in a fixed order.

use std::sync::atomic::{AtomicU8, Ordering};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Parallel,
    Sequential,
}

static MODE: AtomicU8 = AtomicU8::new(0);

pub fn set_mode(mode: Mode) {
    MODE.store(if mode == Mode::Sequential { 1 } else { 0 }, Ordering::Relaxed);
}

pub fn mode() -> Mode {
    if cfg!(feature = "parallel") && MODE.load(Ordering::Relaxed) == 0 {
        Mode::Parallel
    } else {
        Mode::Sequential
    }
}

/// Order-preserving map.
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if mode() == Mode::Parallel {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
    }
    items.iter().map(f).collect()
}

/// Order-preserving map over `0..n`.
pub fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if mode() == Mode::Parallel {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    (0..n).map(f).collect()
}
