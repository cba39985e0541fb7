//! Rayon-backed [`Executor`].

use fairfrontier_core::Executor;
use rayon::prelude::*;

use crate::error::{CliError, Result};

/// Environment variable capping the worker count; unset or empty means auto.
pub const THREADS_ENV: &str = "FAIRFRONTIER_THREADS";

/// Index-ordered parallel map on a private thread pool.
pub struct Rayon {
    pool: rayon::ThreadPool,
}

impl Rayon {
    /// `threads = None` lets rayon pick the core count.
    pub fn new(threads: Option<usize>) -> Result<Self> {
        if threads == Some(0) {
            return Err(CliError::Config("thread count must be at least 1".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.unwrap_or(0))
            .build()
            .map_err(|e| CliError::Config(format!("cannot start thread pool: {e}")))?;
        Ok(Rayon { pool })
    }

    pub fn from_env() -> Result<Self> {
        Self::new(threads_from(std::env::var(THREADS_ENV).ok().as_deref())?)
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

fn threads_from(value: Option<&str>) -> Result<Option<usize>> {
    match value.map(str::trim) {
        None | Some("") => Ok(None),
        Some(v) => v
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| {
                CliError::Config(format!(
                    "{THREADS_ENV} must be a positive integer, got `{v}`"
                ))
            }),
    }
}

impl Executor for Rayon {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool
            .install(|| (0..n).into_par_iter().map(f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordered_results() {
        let ex = Rayon::new(Some(3)).unwrap();
        assert_eq!(ex.threads(), 3);
        let v = ex.map(1000, |i| i * 2);
        assert!(v.iter().enumerate().all(|(i, &x)| x == 2 * i));
    }

    #[test]
    fn env_parsing() {
        assert_eq!(threads_from(None).unwrap(), None);
        assert_eq!(threads_from(Some(" ")).unwrap(), None);
        assert_eq!(threads_from(Some("4")).unwrap(), Some(4));
        assert!(threads_from(Some("0")).is_err());
        assert!(threads_from(Some("many")).is_err());
    }
}
