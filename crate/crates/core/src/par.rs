//! Data-parallel helpers.
//!
//! With the `parallel` feature (on by default) these dispatch to rayon;
//! without it they are plain iterator loops. [`Exec`] lets callers (and the
//! benches) force the sequential path at runtime as well.

use std::sync::atomic::{AtomicBool, Ordering};

static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Execution strategy for the hot loops.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Exec {
    /// Strategy currently in effect.
    pub fn current() -> Exec {
        if cfg!(feature = "parallel") && !FORCE_SEQUENTIAL.load(Ordering::Relaxed) {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }

    /// Set the process-wide strategy. `Parallel` is a no-op without the feature.
    pub fn set(self) {
        FORCE_SEQUENTIAL.store(self == Exec::Sequential, Ordering::Relaxed);
    }

    /// Run `f` with this strategy, restoring the previous one afterwards.
    pub fn run<R>(self, f: impl FnOnce() -> R) -> R {
        let prev = FORCE_SEQUENTIAL.load(Ordering::Relaxed);
        self.set();
        let out = f();
        FORCE_SEQUENTIAL.store(prev, Ordering::Relaxed);
        out
    }
}

/// Inputs smaller than this are never worth splitting.
const MIN_PAR_LEN: usize = 32;

fn go_parallel(len: usize) -> bool {
    len >= MIN_PAR_LEN && Exec::current() == Exec::Parallel
}

pub fn map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    if go_parallel(items.len()) {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = go_parallel;
    items.iter().map(f).collect()
}

pub fn filter_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> Option<R> + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    if go_parallel(items.len()) {
        use rayon::prelude::*;
        return items.par_iter().filter_map(f).collect();
    }
    items.iter().filter_map(f).collect()
}

pub fn flat_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> Vec<R> + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    if go_parallel(items.len()) {
        use rayon::prelude::*;
        return items.par_iter().flat_map_iter(f).collect();
    }
    items.iter().flat_map(f).collect()
}

pub fn any<T: Sync>(items: &[T], f: impl Fn(&T) -> bool + Sync + Send) -> bool {
    #[cfg(feature = "parallel")]
    if go_parallel(items.len()) {
        use rayon::prelude::*;
        return items.par_iter().any(f);
    }
    items.iter().any(f)
}
