//! Trial fan-out. Trials are independent given their seeds, so the result
//! of a study does not depend on the executor.

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// How independent trials are scheduled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exec {
    Sequential,
    /// Rayon work-stealing pool. Runs sequentially when the `parallel`
    /// feature is disabled.
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

/// Evaluates `f(0..count)` and returns the results in trial order. Stops at
/// the first error in trial order.
pub fn map_trials<T, F>(exec: Exec, count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    match exec {
        Exec::Sequential => (0..count).map(f).collect(),
        Exec::Parallel => parallel_map(count, f),
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, F>(count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    use rayon::prelude::*;
    let results: Vec<Result<T>> = (0..count).into_par_iter().map(f).collect();
    results.into_iter().collect()
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, F>(count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    (0..count).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn order_is_trial_order() {
        for exec in [Exec::Sequential, Exec::Parallel] {
            let out = map_trials(exec, 100, |i| Ok(i * i)).unwrap();
            assert_eq!(out, (0..100).map(|i| i * i).collect::<Vec<_>>());
        }
    }

    #[test]
    fn first_error_wins() {
        for exec in [Exec::Sequential, Exec::Parallel] {
            let err = map_trials(exec, 50, |i| {
                if i % 7 == 3 {
                    Err(Error::Config(format!("trial {i}")))
                } else {
                    Ok(i)
                }
            })
            .unwrap_err();
            assert_eq!(err, Error::Config("trial 3".into()));
        }
    }
}
