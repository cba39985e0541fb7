//! Index-ordered parallel map abstraction.
//!
//! The core stays single-threaded; callers that own a thread pool plug it in
//! through [`Executor`]. Results are always returned in index order, so output
//! never depends on scheduling.

use alloc::vec::Vec;

pub trait Executor: Sync {
    /// Evaluates `f(0), .., f(n - 1)` and returns the results in index order.
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs everything on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl Executor for Serial {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).map(f).collect()
    }
}
