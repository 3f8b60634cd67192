//! Execution-mode plumbing: data-parallel map helpers with a sequential
//! fallback.
//!
//! With the `parallel` feature (default) the helpers dispatch to rayon;
//! without it they compile to plain iteration. [`set_sequential`] forces the
//! sequential path at runtime even in a parallel build, which is what the
//! benches use to compare both modes in a single binary. Every call site is a
//! pure map with order-preserving collect, so results are bitwise identical
//! in all modes.

#[cfg(feature = "parallel")]
use std::sync::atomic::{AtomicBool, Ordering};

#[cfg(feature = "parallel")]
static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Force (or lift) sequential execution at runtime. No-op in builds without
/// the `parallel` feature, which are always sequential.
pub fn set_sequential(force: bool) {
    #[cfg(feature = "parallel")]
    FORCE_SEQUENTIAL.store(force, Ordering::SeqCst);
    #[cfg(not(feature = "parallel"))]
    let _ = force;
}

/// True when work may actually be distributed across threads.
pub fn is_parallel() -> bool {
    #[cfg(feature = "parallel")]
    {
        !FORCE_SEQUENTIAL.load(Ordering::SeqCst)
    }
    #[cfg(not(feature = "parallel"))]
    {
        false
    }
}

/// Map over a slice, in parallel when enabled. Output order matches input.
pub fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// Map over an index range, in parallel when enabled.
pub fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// Mutable chunk map used by the elimination inner loop: applies `f` to each
/// `chunk_len`-sized chunk (one matrix row per chunk).
pub fn for_each_chunk_mut<T, F>(data: &mut [T], chunk_len: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        data.par_chunks_mut(chunk_len)
            .enumerate()
            .for_each(|(i, chunk)| f(i, chunk));
        return;
    }
    for (i, chunk) in data.chunks_mut(chunk_len).enumerate() {
        f(i, chunk);
    }
}
