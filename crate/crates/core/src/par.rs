//! Data-parallel helpers with a sequential fallback.
//!
//! Every helper returns the same value under both execution modes; the
//! parallel versions only change how the work is scheduled.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, otherwise runs
    /// sequentially.
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// The failure with the lowest index, if any.
    pub fn first_failure<T, E, F>(self, items: &[T], f: F) -> Option<(usize, E)>
    where
        T: Sync,
        E: Send,
        F: Fn(usize, &T) -> Result<(), E> + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items
                .par_iter()
                .enumerate()
                .find_map_first(|(i, x)| f(i, x).err().map(|e| (i, e)));
        }
        items
            .iter()
            .enumerate()
            .find_map(|(i, x)| f(i, x).err().map(|e| (i, e)))
    }

    /// The first `Some` in input order.
    pub fn find_first<T, R, F>(self, items: &[T], f: F) -> Option<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> Option<R> + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.par_iter().find_map_first(f);
        }
        items.iter().find_map(f)
    }
}
