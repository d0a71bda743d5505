//! Data-parallel helpers with a sequential fallback.
//!
//! Results are collected in index order and reduced sequentially, so the
//! output does not depend on the number of worker threads.

use std::sync::atomic::{AtomicBool, Ordering};

static SEQUENTIAL: AtomicBool = AtomicBool::new(false);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

/// Selects the execution policy for every subsequent call. Without the
/// `parallel` feature this is a no-op and everything runs sequentially.
pub fn set_exec(exec: Exec) {
    SEQUENTIAL.store(exec == Exec::Sequential, Ordering::Relaxed);
}

pub fn exec() -> Exec {
    if cfg!(feature = "parallel") && !SEQUENTIAL.load(Ordering::Relaxed) {
        Exec::Parallel
    } else {
        Exec::Sequential
    }
}

/// Uses `threads` workers; `1` selects the sequential policy. The worker
/// count can only be fixed once per process.
pub fn set_threads(threads: usize) -> crate::Result<()> {
    if threads == 0 {
        return Err(crate::Error::InvalidArgument("thread count must be positive".into()));
    }
    if threads == 1 {
        set_exec(Exec::Sequential);
        return Ok(());
    }
    set_exec(Exec::Parallel);
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| crate::Error::InvalidArgument(format!("thread pool: {e}")))?;
    Ok(())
}

pub fn map<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec() == Exec::Parallel {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(f).collect();
    }
    (0..len).map(f).collect()
}

pub fn sum<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    map(len, f).into_iter().sum()
}
