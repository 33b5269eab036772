//! Replicate-loop execution.
//!
//! Replicates are split into fixed chunks of [`CHUNK`] indices. Each chunk is
//! reduced sequentially and chunk results are combined in index order, so the
//! floating-point result is bit-identical for any thread count. Without the
//! `parallel` feature everything runs on the calling thread.

use std::ops::Range;

/// Replicates per chunk.
pub const CHUNK: u64 = 4096;

/// How replicate loops are executed. `threads` only affects speed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// `threads = 0` uses the global rayon pool.
    Parallel {
        threads: usize,
    },
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Self::Parallel { threads: 0 }
        } else {
            Self::Sequential
        }
    }
}

impl Execution {
    pub fn from_threads(threads: usize) -> Self {
        if threads == 1 {
            Self::Sequential
        } else {
            Self::Parallel { threads }
        }
    }
}

fn chunks(n: u64) -> Vec<Range<u64>> {
    (0..n.div_ceil(CHUNK))
        .map(|c| c * CHUNK..((c + 1) * CHUNK).min(n))
        .collect()
}

/// Applies `f` to every chunk of `0..n` and returns the results in chunk order.
pub fn map_chunks<T, F>(n: u64, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync + Send,
{
    let ranges = chunks(n);
    match exec {
        Execution::Sequential => ranges.into_iter().map(f).collect(),
        Execution::Parallel { threads } => run_parallel(ranges, threads, f),
    }
}

#[cfg(feature = "parallel")]
fn run_parallel<T, F>(ranges: Vec<Range<u64>>, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync + Send,
{
    use rayon::prelude::*;
    if threads == 0 {
        return ranges.into_par_iter().map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| ranges.into_par_iter().map(&f).collect()),
        Err(_) => ranges.into_iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn run_parallel<T, F>(ranges: Vec<Range<u64>>, _threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync + Send,
{
    ranges.into_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunking_covers_range_in_order() {
        let r = chunks(2 * CHUNK + 5);
        assert_eq!(r.len(), 3);
        assert_eq!(r[0], 0..CHUNK);
        assert_eq!(r[2], 2 * CHUNK..2 * CHUNK + 5);
        assert!(chunks(0).is_empty());
    }

    #[test]
    fn results_do_not_depend_on_threads() {
        let f = |r: Range<u64>| r.map(|i| (i as f64).sqrt()).sum::<f64>();
        let a: f64 = map_chunks(100_000, Execution::Sequential, f).iter().sum();
        let b: f64 = map_chunks(100_000, Execution::Parallel { threads: 3 }, f)
            .iter()
            .sum();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
