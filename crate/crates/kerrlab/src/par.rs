//! Index-space kernels with a rayon path and a sequential fallback.
//!
//! Every reduction here is order independent: minima break ties on the
//! smaller index, so the parallel and sequential paths return identical
//! results bit for bit.

/// Value used for ordering; NaN sorts below everything so it is reported.
#[inline]
fn key(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

#[inline]
fn better(a: (usize, f64), b: (usize, f64)) -> (usize, f64) {
    let (ka, kb) = (key(a.1), key(b.1));
    if ka < kb || (ka == kb && a.0 <= b.0) {
        a
    } else {
        b
    }
}

/// Sequential argmin of `f` over `0..n`.
pub fn argmin_seq<F>(n: usize, f: F) -> Option<(usize, f64)>
where
    F: Fn(usize) -> f64,
{
    (0..n).map(|i| (i, f(i))).reduce(better)
}

#[cfg(feature = "parallel")]
pub fn argmin_par<F>(n: usize, f: F) -> Option<(usize, f64)>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(|i| (i, f(i))).reduce_with(better)
}

/// Argmin over `0..n`, parallel when the `parallel` feature is on.
#[cfg(feature = "parallel")]
pub fn argmin<F>(n: usize, f: F) -> Option<(usize, f64)>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    argmin_par(n, f)
}

#[cfg(not(feature = "parallel"))]
pub fn argmin<F>(n: usize, f: F) -> Option<(usize, f64)>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    argmin_seq(n, f)
}

pub fn map_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_par<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

/// Evaluate `f` on `0..n` preserving order.
#[cfg(feature = "parallel")]
pub fn map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    map_par(n, f)
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    map_seq(n, f)
}

/// Size the global worker pool. Only the first call has an effect; returns
/// whether this call configured the pool.
#[cfg(feature = "parallel")]
pub fn set_workers(n: usize) -> bool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n.max(1))
        .build_global()
        .is_ok()
}

#[cfg(not(feature = "parallel"))]
pub fn set_workers(_n: usize) -> bool {
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmin_breaks_ties_on_index() {
        let v = [3.0, 1.0, 2.0, 1.0];
        assert_eq!(argmin_seq(4, |i| v[i]), Some((1, 1.0)));
        #[cfg(feature = "parallel")]
        assert_eq!(argmin_par(4, |i| v[i]), Some((1, 1.0)));
    }

    #[test]
    fn nan_is_reported_as_worst() {
        let v = [3.0, f64::NAN, -2.0];
        let (i, _) = argmin(3, |i| v[i]).unwrap();
        assert_eq!(i, 1);
    }

    #[test]
    fn empty_range() {
        assert!(argmin(0, |_| 0.0).is_none());
    }
}
