//! Point sweeps over independent inputs, data-parallel when the `parallel`
//! feature is enabled. Output order always follows input order.

use serde::Serialize;

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Execution {
    Sequential,
    /// Falls back to sequential when built without the `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Self::Parallel
        } else {
            Self::Sequential
        }
    }
}

/// `f` applied to every item, results in input order.
pub fn map<T, U, F>(exec: Execution, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

/// Largest value of `f` over `items`; the first error in input order wins.
pub fn max_of<T, F>(exec: Execution, items: &[T], f: F) -> Result<f64>
where
    T: Sync,
    F: Fn(&T) -> Result<f64> + Sync + Send,
{
    map(exec, items, f).into_iter().try_fold(0.0f64, |m, r| Ok(m.max(r?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn both_modes_agree_and_keep_order() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = map(Execution::Sequential, &xs, |x| x * x);
        let b = map(Execution::Parallel, &xs, |x| x * x);
        assert_eq!(a, b);
        assert_eq!(b[17], 289);
    }

    #[test]
    fn max_reports_first_error() {
        let xs: Vec<usize> = (0..100).collect();
        let r = max_of(Execution::Parallel, &xs, |&i| {
            if i >= 40 {
                Err(Error::DimensionMismatch(i, 0))
            } else {
                Ok(i as f64)
            }
        });
        assert!(matches!(r, Err(Error::DimensionMismatch(40, 0))));
        assert_eq!(max_of(Execution::Sequential, &xs[..10], |&i| Ok(i as f64)).unwrap(), 9.0);
    }
}
