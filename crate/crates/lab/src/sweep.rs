use bergman_core::analysis::Sweep;
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::error::Result;

/// [`Sweep`] on a private rayon pool; results keep index order, so output
/// does not depend on the thread count.
pub struct Parallel {
    pool: ThreadPool,
}

impl Parallel {
    /// `threads = 0` lets rayon pick.
    pub fn new(threads: usize) -> Result<Self> {
        Ok(Parallel { pool: ThreadPoolBuilder::new().num_threads(threads).build()? })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Sweep for Parallel {
    fn map<T: Send>(&self, count: usize, f: &(dyn Fn(usize) -> T + Sync)) -> Vec<T> {
        self.pool.install(|| (0..count).into_par_iter().map(f).collect())
    }
}
