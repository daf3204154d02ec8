//! Range partitioning for the worker-parallel scans.
//!
//! Every parallel region in the crate splits an inclusive integer range into
//! contiguous chunks, processes each chunk on its own scoped thread and hands
//! the per-chunk results back in chunk order. Callers merge them
//! deterministically, so output never depends on the worker count.

use std::thread;

/// Splits `[lo, hi]` into at most `parts` contiguous, non-empty, ordered chunks.
pub fn split_range(lo: u128, hi: u128, parts: usize) -> Vec<(u128, u128)> {
    if lo > hi {
        return Vec::new();
    }
    let len = hi - lo + 1;
    let parts = (parts.max(1) as u128).min(len);
    let base = len / parts;
    let extra = len % parts;
    let mut out = Vec::with_capacity(parts as usize);
    let mut start = lo;
    for i in 0..parts {
        let size = base + u128::from(i < extra);
        out.push((start, start + size - 1));
        start += size;
    }
    out
}

/// Runs `f` on each chunk of `[lo, hi]` and returns the results in chunk order.
///
/// With `workers == 1` everything runs on the calling thread.
pub fn map_chunks<T, F>(lo: u128, hi: u128, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u128, u128) -> T + Sync,
{
    let chunks = split_range(lo, hi, workers);
    if chunks.len() <= 1 {
        return chunks.into_iter().map(|(a, b)| f(a, b)).collect();
    }
    let f = &f;
    thread::scope(|scope| {
        let handles: Vec<_> = chunks
            .iter()
            .map(|&(a, b)| scope.spawn(move || f(a, b)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker thread panicked"))
            .collect()
    })
}
