use cuot_core::solver::Job;
use cuot_core::Executor;

/// Runs solver jobs on a dedicated rayon pool.
pub struct RayonExecutor {
    pool: rayon::ThreadPool,
}

impl RayonExecutor {
    /// A pool with `threads` workers, or rayon's default count for `None`.
    pub fn new(threads: Option<usize>) -> Result<Self, rayon::ThreadPoolBuildError> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            b = b.num_threads(n);
        }
        Ok(Self { pool: b.build()? })
    }
}

impl Executor for RayonExecutor {
    fn execute<'a>(&self, jobs: Vec<Job<'a>>) {
        self.pool.scope(|s| {
            for job in jobs {
                s.spawn(move |_| job());
            }
        });
    }

    fn parallelism(&self) -> usize {
        self.pool.current_num_threads()
    }
}
