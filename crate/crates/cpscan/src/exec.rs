//! Execution-mode plumbing: data-parallel by default, sequential on demand.
//!
//! Simulation layers express their work as "map replicate index → value".
//! Because every replicate owns an independent RNG substream, the map is
//! embarrassingly parallel and the output is identical in both modes; the
//! sequential path exists for debugging, profiling, and builds without the
//! `parallel` feature.

/// How replicate maps are executed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ExecMode {
    /// One replicate after another on the calling thread.
    Sequential,
    /// Replicates distributed over the rayon thread pool. Falls back to
    /// sequential when the crate is built without the `parallel` feature.
    #[default]
    Parallel,
}

/// Map `f` over `0..len`, collecting results in index order.
pub fn map_indexed<T, F>(mode: ExecMode, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match mode {
        ExecMode::Sequential => (0..len).map(f).collect(),
        ExecMode::Parallel => map_parallel(len, f),
    }
}

#[cfg(feature = "parallel")]
fn map_parallel<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..len).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_parallel<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..len).map(f).collect()
}
