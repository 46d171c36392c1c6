use alloc::boxed::Box;
use alloc::vec::Vec;

/// A unit of work submitted to an [`Executor`].
pub type Job<'a> = Box<dyn FnOnce() + Send + 'a>;

/// Runs a batch of independent jobs to completion before returning.
///
/// Jobs write to disjoint memory, so the result never depends on the order or
/// concurrency with which an implementation runs them.
pub trait Executor: Sync {
    fn execute<'a>(&self, jobs: Vec<Job<'a>>);

    /// Preferred number of pieces when splitting data-parallel work.
    fn parallelism(&self) -> usize {
        1
    }
}

/// Runs jobs one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn execute<'a>(&self, jobs: Vec<Job<'a>>) {
        for job in jobs {
            job();
        }
    }
}
