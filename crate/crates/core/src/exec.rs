//! Execution strategy for the batch loops (angle grids, trace checks).
//!
//! With the `parallel` feature the [`Exec::Parallel`] strategy runs on the
//! rayon global pool; without it both strategies run sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Evaluates `f(0..n)` in index order.
    pub fn map_indices<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..n).into_par_iter().map(f).collect(),
            _ => (0..n).map(f).collect(),
        }
    }

    /// Largest `f(i)` over `0..n`, or `None` for `n == 0`. NaN wins.
    pub fn max_by_index<F>(self, n: usize, f: F) -> Option<f64>
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        let pick = |a: f64, b: f64| if a.is_nan() || a >= b { a } else { b };
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..n).into_par_iter().map(f).reduce_with(pick),
            _ => (0..n).map(f).reduce(pick),
        }
    }

    /// Number of indices in `0..n` for which `pred` holds.
    pub fn count<F>(self, n: usize, pred: F) -> usize
    where
        F: Fn(usize) -> bool + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..n).into_par_iter().filter(|&i| pred(i)).count(),
            _ => (0..n).filter(|&i| pred(i)).count(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        for exec in [Exec::Sequential, Exec::Parallel] {
            assert_eq!(exec.map_indices(5, |i| i * i), vec![0, 1, 4, 9, 16]);
            assert_eq!(
                exec.max_by_index(100, |i| (i as f64 - 40.0).abs()),
                Some(59.0)
            );
            assert_eq!(exec.max_by_index(0, |i| i as f64), None);
            assert_eq!(exec.count(10, |i| i % 3 == 0), 4);
        }
    }

    #[test]
    fn nan_propagates_through_max() {
        let m = Exec::Sequential.max_by_index(3, |i| if i == 1 { f64::NAN } else { 1.0 });
        assert!(m.unwrap().is_nan());
    }
}
