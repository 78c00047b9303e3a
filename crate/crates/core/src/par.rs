//! Data-parallel helpers. With the `parallel` feature (default) work is
//! spread over the rayon pool; without it, or with [`Execution::Sequential`],
//! everything runs on the calling thread. Results are identical either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    fn parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// `(0..n).map(f)` collected in index order.
pub fn map_range<T, F>(n: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec.parallel();
    (0..n).map(f).collect()
}

/// Fills a row-major buffer of `n_rows * width` values, calling `f(row, out_row)`.
pub fn fill_rows<T, F>(n_rows: usize, width: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send + Default + Clone,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    let mut out = vec![T::default(); n_rows * width];
    if width == 0 {
        return out;
    }
    #[cfg(feature = "parallel")]
    if exec.parallel() {
        out.par_chunks_mut(width).enumerate().for_each(|(i, row)| f(i, row));
        return out;
    }
    let _ = exec.parallel();
    out.chunks_mut(width).enumerate().for_each(|(i, row)| f(i, row));
    out
}
