//! Execution strategy for the data-parallel inner loops (pair scans, cut
//! enumeration, candidate-color scoring, randomized trials).
//!
//! Every reduction is order-preserving, so both strategies return identical
//! results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Execution {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Execution::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// `f` applied to every index in `0..n`, results in index order.
    pub fn map_range<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Execution::Sequential => (0..n).map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
        }
    }

    /// `f` applied to every item, results in input order.
    pub fn map_slice<'a, S, T, F>(self, items: &'a [S], f: F) -> Vec<T>
    where
        S: Sync,
        T: Send,
        F: Fn(&'a S) -> T + Sync + Send,
    {
        match self {
            Execution::Sequential => items.iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => items.par_iter().map(f).collect(),
        }
    }

    /// Sum of `f(i)` over `0..n`.
    pub fn sum_range<F>(self, n: usize, f: F) -> u64
    where
        F: Fn(usize) -> u64 + Sync + Send,
    {
        match self {
            Execution::Sequential => (0..n).map(f).sum(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..n).into_par_iter().map(f).sum(),
        }
    }

    /// The candidate with the smallest key among `f(i)` for `i` in
    /// `lo..hi`; ties go to the smaller index.
    pub fn min_by_key_range<T, K, F>(self, lo: u64, hi: u64, f: F) -> Option<(K, u64, T)>
    where
        T: Send,
        K: Ord + Send,
        F: Fn(u64) -> Option<(K, T)> + Sync + Send,
    {
        let pick = |a: Option<(K, u64, T)>, b: Option<(K, u64, T)>| match (a, b) {
            (None, x) | (x, None) => x,
            (Some(a), Some(b)) => {
                if (&b.0, b.1) < (&a.0, a.1) {
                    Some(b)
                } else {
                    Some(a)
                }
            }
        };
        match self {
            Execution::Sequential => (lo..hi)
                .filter_map(|i| f(i).map(|(k, t)| (k, i, t)))
                .fold(None, |acc, x| pick(acc, Some(x))),
            #[cfg(feature = "parallel")]
            Execution::Parallel => (lo..hi)
                .into_par_iter()
                .filter_map(|i| f(i).map(|(k, t)| (k, i, t)))
                .map(Some)
                .reduce(|| None, pick),
        }
    }

    /// Whether any index in `lo..hi` satisfies `pred`.
    pub fn any_range<F>(self, lo: u64, hi: u64, pred: F) -> bool
    where
        F: Fn(u64) -> bool + Sync + Send,
    {
        match self {
            Execution::Sequential => (lo..hi).any(pred),
            #[cfg(feature = "parallel")]
            Execution::Parallel => (lo..hi).into_par_iter().any(pred),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strategies() -> Vec<Execution> {
        #[cfg(feature = "parallel")]
        return vec![Execution::Sequential, Execution::Parallel];
        #[cfg(not(feature = "parallel"))]
        return vec![Execution::Sequential];
    }

    #[test]
    fn strategies_agree() {
        for exec in strategies() {
            assert_eq!(exec.map_range(5, |i| i * i), vec![0, 1, 4, 9, 16]);
            assert_eq!(exec.sum_range(101, |i| i as u64), 5050);
            // keys repeat; ties must go to the smallest index
            let best = exec.min_by_key_range(0, 100, |i| Some((i % 7, i)));
            assert_eq!(best.map(|b| b.1), Some(0));
            let best = exec.min_by_key_range(1, 100, |i| (i % 10 == 3).then_some((0u8, ())));
            assert_eq!(best.map(|b| b.1), Some(3));
            assert!(exec.any_range(0, 10, |i| i == 9));
        }
    }
}
