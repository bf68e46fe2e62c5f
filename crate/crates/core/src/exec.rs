use std::ops::Range;

use crate::error::Result;

/// How independent work items (Monte Carlo shots, grid points) are run.
///
/// `Parallel` uses the rayon thread pool when the `parallel` feature is
/// enabled and falls back to sequential execution otherwise. Both give
/// identical results because every item is seeded by its index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Maps `f` over `items` with per-worker scratch from `init` and folds
    /// the results with the associative `combine`. Stops at the first error.
    pub fn map_reduce<S, T, I, F, C>(self, items: Range<u64>, init: I, f: F, combine: C) -> Result<T>
    where
        T: Default + Send,
        I: Fn() -> S + Sync + Send,
        F: Fn(&mut S, u64) -> Result<T> + Sync + Send,
        C: Fn(T, T) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                items
                    .into_par_iter()
                    .map_init(init, |s, i| f(s, i))
                    .try_reduce(T::default, |a, b| Ok(combine(a, b)))
            }
            _ => {
                let mut s = init();
                let mut acc = T::default();
                for i in items {
                    acc = combine(acc, f(&mut s, i)?);
                }
                Ok(acc)
            }
        }
    }

    /// Runs `f` on every item, keeping order.
    pub fn map<T, O, F>(self, items: &[T], f: F) -> Vec<O>
    where
        T: Sync,
        O: Send,
        F: Fn(&T) -> O + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            _ => items.iter().map(f).collect(),
        }
    }
}
