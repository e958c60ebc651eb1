//! Sign-change scan with bisection refinement.
//!
//! The energy equations contain square roots whose derivatives blow up at
//! the window edges, so only bracketing is used.

/// Bisects `f` on `[lo, hi]` (opposite signs at the ends) until the
/// bracket cannot be split further in floating point. Returns whichever
/// end point has the smaller `|f|`.
pub fn bisect<F>(f: &F, mut lo: f64, mut hi: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if flo == 0.0 {
        return lo;
    }
    if fhi == 0.0 {
        return hi;
    }
    debug_assert!(flo.signum() != fhi.signum());
    for _ in 0..1100 {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let fmid = f(mid);
        if fmid == 0.0 {
            return mid;
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
            fhi = fmid;
        }
    }
    if flo.abs() <= fhi.abs() {
        lo
    } else {
        hi
    }
}

/// All roots of `f` on `[lo, hi]` detected as sign changes between
/// `points` uniformly spaced samples, in ascending order.
pub fn scan_roots<F>(f: &F, lo: f64, hi: f64, points: usize) -> Vec<f64>
where
    F: Fn(f64) -> f64,
{
    let points = points.max(2);
    let step = (hi - lo) / (points - 1) as f64;
    let xs: Vec<f64> = (0..points)
        .map(|i| if i + 1 == points { hi } else { lo + step * i as f64 })
        .collect();
    let fs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();

    let mut roots = Vec::new();
    for i in 0..points {
        if fs[i] == 0.0 {
            roots.push(xs[i]);
            continue;
        }
        if i + 1 < points && fs[i + 1] != 0.0 && fs[i].is_finite() && fs[i + 1].is_finite() {
            if fs[i].signum() != fs[i + 1].signum() {
                roots.push(bisect(f, xs[i], xs[i + 1]));
            }
        }
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_sqrt2() {
        let f = |x: f64| x * x - 2.0;
        let r = bisect(&f, 0.0, 2.0);
        assert!((r - 2f64.sqrt()).abs() <= 2.0 * f64::EPSILON);
    }

    #[test]
    fn scan_finds_all_roots_of_cubic() {
        let f = |x: f64| (x - 1.0) * (x + 0.5) * (x - 3.25);
        let roots = scan_roots(&f, -2.0, 5.0, 1000);
        assert_eq!(roots.len(), 3);
        for (got, want) in roots.iter().zip([-0.5, 1.0, 3.25]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn scan_records_exact_grid_zero_once() {
        let f = |x: f64| x;
        let roots = scan_roots(&f, -1.0, 1.0, 3);
        assert_eq!(roots, vec![0.0]);
    }

    #[test]
    fn scan_without_sign_change_is_empty() {
        let f = |x: f64| x * x + 1.0;
        assert!(scan_roots(&f, -3.0, 3.0, 100).is_empty());
    }
}
