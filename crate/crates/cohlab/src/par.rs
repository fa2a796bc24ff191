//! Data-parallel execution of independent work items.
//!
//! Campaign trials and optimizer starts are embarrassingly parallel. With the
//! `parallel` feature enabled they run on the rayon pool; results are always
//! collected in index order, so output never depends on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `0..n`, in parallel when available and not forced sequential.
pub fn map_indexed<T, F>(n: usize, sequential: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if !sequential {
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    let _ = sequential;
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree() {
        let a = map_indexed(100, false, |i| i * i);
        let b = map_indexed(100, true, |i| i * i);
        assert_eq!(a, b);
    }
}
