//! Trial scheduling. With the `parallel` feature trials are spread over a
//! rayon pool; without it every mode runs sequentially.
//!
//! Accumulators handed to [`Exec::fold_trials`] must merge commutatively and
//! associatively (integer sums, counters) so results do not depend on the
//! schedule.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    pub fn fold_trials<A, Id, F, M>(self, trials: u64, identity: Id, fold: F, merge: M) -> A
    where
        A: Send,
        Id: Fn() -> A + Sync + Send,
        F: Fn(A, u64) -> A + Sync + Send,
        M: Fn(A, A) -> A + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..trials)
                .into_par_iter()
                .fold(&identity, &fold)
                .reduce(&identity, &merge),
            _ => {
                let _ = &merge;
                (0..trials).fold(identity(), fold)
            }
        }
    }
}

/// Caps the global worker pool. Returns false when the pool was already
/// initialised or parallelism is compiled out.
pub fn configure_threads(threads: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        false
    }
}
