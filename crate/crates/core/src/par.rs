//! Feature-gated parallelism. With the default `parallel` feature the
//! helpers run on a bounded rayon pool; without it they degrade to plain
//! sequential execution so the whole crate stays single-threaded.

/// Map `f` over `items` with at most `workers` items in flight.
/// Output order matches input order.
#[cfg(feature = "parallel")]
pub fn map_bounded<T, R, F>(items: Vec<T>, workers: usize, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Send + Sync,
{
    use rayon::prelude::*;
    if workers <= 1 {
        return items.into_iter().map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("worker pool");
    pool.install(|| items.into_par_iter().map(f).collect())
}

#[cfg(not(feature = "parallel"))]
pub fn map_bounded<T, R, F>(items: Vec<T>, _workers: usize, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Send + Sync,
{
    items.into_iter().map(f).collect()
}

/// Run three independent closures, possibly concurrently, and return all
/// three results. Used for the per-checkpoint judge fan-out.
#[cfg(feature = "parallel")]
pub fn join3<A, B, C, FA, FB, FC>(fa: FA, fb: FB, fc: FC) -> (A, B, C)
where
    A: Send,
    B: Send,
    C: Send,
    FA: FnOnce() -> A + Send,
    FB: FnOnce() -> B + Send,
    FC: FnOnce() -> C + Send,
{
    let (a, (b, c)) = rayon::join(fa, || rayon::join(fb, fc));
    (a, b, c)
}

#[cfg(not(feature = "parallel"))]
pub fn join3<A, B, C, FA, FB, FC>(fa: FA, fb: FB, fc: FC) -> (A, B, C)
where
    A: Send,
    B: Send,
    C: Send,
    FA: FnOnce() -> A + Send,
    FB: FnOnce() -> B + Send,
    FC: FnOnce() -> C + Send,
{
    (fa(), fb(), fc())
}
