//! Execution helpers for the data-parallel inner loops.
//!
//! With the `parallel` feature (default) the indexed scans fan out over a
//! rayon pool; without it they run sequentially. Reductions are written so
//! that both modes produce bit-identical results: the max-reduce is strict
//! on value and breaks ties toward the lowest index, which is associative
//! and commutative, so the rayon reduction order cannot change the outcome.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Combine two (index, value) candidates: larger value wins, ties go to the
/// lower index. NaN never wins.
#[inline]
fn better(a: (usize, f64), b: (usize, f64)) -> (usize, f64) {
    if b.1 > a.1 || (a.1.is_nan() && !b.1.is_nan()) {
        b
    } else if a.1 > b.1 || (b.1.is_nan() && !a.1.is_nan()) {
        a
    } else if b.0 < a.0 {
        b
    } else {
        a
    }
}

/// Sequential indexed max scan.
pub fn scan_max_serial<F>(count: usize, f: F) -> (usize, f64)
where
    F: Fn(usize) -> f64,
{
    let mut best = (0usize, f64::NEG_INFINITY);
    for i in 0..count {
        best = better(best, (i, f(i)));
    }
    best
}

/// Indexed max scan; parallel when the `parallel` feature is enabled.
#[cfg(feature = "parallel")]
pub fn scan_max<F>(count: usize, f: F) -> (usize, f64)
where
    F: Fn(usize) -> f64 + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|i| (i, f(i)))
        .reduce(|| (0usize, f64::NEG_INFINITY), better)
}

/// Indexed max scan; parallel when the `parallel` feature is enabled.
#[cfg(not(feature = "parallel"))]
pub fn scan_max<F>(count: usize, f: F) -> (usize, f64)
where
    F: Fn(usize) -> f64 + Sync,
{
    scan_max_serial(count, f)
}

/// Map an index range to a vector, in index order.
#[cfg(feature = "parallel")]
pub fn map_collect<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..count).into_par_iter().map(f).collect()
}

/// Map an index range to a vector, in index order.
#[cfg(not(feature = "parallel"))]
pub fn map_collect<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..count).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_matches_serial() {
        let f = |i: usize| ((i * 37 + 11) % 101) as f64;
        assert_eq!(scan_max(500, f), scan_max_serial(500, f));
    }

    #[test]
    fn ties_break_to_lowest_index() {
        let f = |i: usize| if i % 3 == 0 { 5.0 } else { 1.0 };
        assert_eq!(scan_max(100, f), (0, 5.0));
        assert_eq!(scan_max_serial(100, f), (0, 5.0));
    }

    #[test]
    fn map_collect_preserves_order() {
        let v = map_collect(10, |i| i * i);
        assert_eq!(v, vec![0, 1, 4, 9, 16, 25, 36, 49, 64, 81]);
    }
}
