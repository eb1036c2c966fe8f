//! Order-independent reductions over index ranges.
//!
//! Ties are broken by the smallest index and the reported error is the one
//! with the smallest index, so results do not depend on the thread count.

use rayon::prelude::*;

use crate::{Error, Result};

enum Best {
    Empty,
    Found(f64, usize),
    Failed(usize, Error),
}

fn combine(a: Best, b: Best, prefer_larger: bool) -> Best {
    match (a, b) {
        (Best::Failed(i, e), Best::Failed(j, f)) => {
            if i <= j {
                Best::Failed(i, e)
            } else {
                Best::Failed(j, f)
            }
        }
        (Best::Failed(i, e), _) | (_, Best::Failed(i, e)) => Best::Failed(i, e),
        (Best::Empty, x) | (x, Best::Empty) => x,
        (Best::Found(v, i), Best::Found(w, j)) => {
            let take_second = if v == w {
                j < i
            } else if prefer_larger {
                w > v
            } else {
                w < v
            };
            if take_second {
                Best::Found(w, j)
            } else {
                Best::Found(v, i)
            }
        }
    }
}

fn extreme<F>(n: usize, f: F, prefer_larger: bool) -> Result<Option<(f64, usize)>>
where
    F: Fn(usize) -> Result<f64> + Sync,
{
    let best = (0..n)
        .into_par_iter()
        .map(|i| match f(i) {
            Ok(v) if v.is_nan() => Best::Failed(
                i,
                Error::InvalidParameter(format!("sample {i} evaluates to NaN")),
            ),
            Ok(v) => Best::Found(v, i),
            Err(e) => Best::Failed(i, e),
        })
        .reduce(|| Best::Empty, |a, b| combine(a, b, prefer_larger));
    match best {
        Best::Empty => Ok(None),
        Best::Found(v, i) => Ok(Some((v, i))),
        Best::Failed(_, e) => Err(e),
    }
}

/// Largest `f(i)` over `0..n` with its index.
pub(crate) fn argmax<F>(n: usize, f: F) -> Result<Option<(f64, usize)>>
where
    F: Fn(usize) -> Result<f64> + Sync,
{
    extreme(n, f, true)
}

/// Smallest `f(i)` over `0..n` with its index.
pub(crate) fn argmin<F>(n: usize, f: F) -> Result<Option<(f64, usize)>>
where
    F: Fn(usize) -> Result<f64> + Sync,
{
    extreme(n, f, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_resolve_to_the_first_index() {
        let values = [1.0, 3.0, 2.0, 3.0, 0.5];
        let best = argmax(values.len(), |i| Ok(values[i])).unwrap();
        assert_eq!(best, Some((3.0, 1)));
        let worst = argmin(values.len(), |i| Ok(values[i])).unwrap();
        assert_eq!(worst, Some((0.5, 4)));
    }

    #[test]
    fn earliest_error_wins() {
        let r = argmax(100, |i| {
            if i % 7 == 3 {
                Err(Error::CoincidentPair { index: i })
            } else {
                Ok(i as f64)
            }
        });
        assert_eq!(r, Err(Error::CoincidentPair { index: 3 }));
    }

    #[test]
    fn empty_range_has_no_extreme() {
        assert_eq!(argmax(0, |_| Ok(1.0)).unwrap(), None);
    }
}
