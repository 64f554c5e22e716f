//! Job execution over an index range: rayon-backed when the `parallel`
//! feature is enabled, with a sequential path that is always compiled.
//! Results are collected in index order, so both paths produce identical
//! output for pure per-index work; parallelism only changes wall time.

/// Plain sequential map. This is the fallback used when the crate is built
/// without the `parallel` feature, and the `workers == 1` fast path.
pub fn map_jobs_sequential<T, F>(n_jobs: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    (0..n_jobs).map(job).collect()
}

/// Rayon-backed map. `workers == 0` uses the global pool; any other value
/// builds a dedicated pool of that size.
#[cfg(feature = "parallel")]
pub fn map_jobs_parallel<T, F>(n_jobs: usize, workers: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    use rayon::prelude::*;
    let run = |f: &F| (0..n_jobs).into_par_iter().map(f).collect();
    match workers {
        0 => run(&job),
        w => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .expect("failed to build worker pool")
            .install(|| run(&job)),
    }
}

/// Feature-dispatched map: sequential for `workers == 1` or when built
/// without rayon, parallel otherwise.
pub fn map_jobs<T, F>(n_jobs: usize, workers: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    #[cfg(feature = "parallel")]
    {
        if workers == 1 {
            map_jobs_sequential(n_jobs, job)
        } else {
            map_jobs_parallel(n_jobs, workers, job)
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        map_jobs_sequential(n_jobs, job)
    }
}
