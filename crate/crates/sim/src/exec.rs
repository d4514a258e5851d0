//! Multi-threaded client execution.

use fedapa_core::fl::ClientReturn;
use fedapa_core::orchestrator::{ClientExecutor, ClientJob};
use fedapa_core::Result;
use rayon::prelude::*;

/// Runs the local updates of a round on a rayon pool. Results come back in
/// job order, so the outcome does not depend on the thread count.
pub struct RayonExecutor {
    pool: rayon::ThreadPool,
}

impl RayonExecutor {
    /// `threads == 0` lets rayon pick.
    pub fn new(threads: usize) -> std::result::Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
        Ok(RayonExecutor { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl ClientExecutor for RayonExecutor {
    fn run_all(&self, jobs: Vec<ClientJob<'_>>) -> Vec<Result<ClientReturn>> {
        self.pool
            .install(|| jobs.into_par_iter().map(ClientJob::run).collect())
    }
}
