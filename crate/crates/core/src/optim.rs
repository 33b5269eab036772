//! Scalar minimization and root finding used throughout the rate-function code.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the minimizer of a unimodal function on `[lo, hi]`.
///
/// Returns `(argmin, min)`. The endpoints are evaluated as candidates too, so a
/// minimum sitting on the boundary is reported exactly rather than approached.
pub fn golden_section<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    debug_assert!(lo <= hi);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    // Bounded iteration count: each step shrinks the bracket by 0.618.
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    for x in [lo, hi] {
        let fx = f(x);
        if fx < best.1 || (fx == best.1 && x < best.0) {
            best = (x, fx);
        }
    }
    best
}

/// Largest `x` in `[lo, hi]` with `pred(x)` true, for a predicate that is true on
/// a prefix of the interval. Assumes `pred(lo)` holds.
pub fn bisect_last_true<P>(mut pred: P, lo: f64, hi: f64, tol: f64) -> f64
where
    P: FnMut(f64) -> bool,
{
    if pred(hi) {
        return hi;
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if pred(mid) {
            a = mid;
        } else {
            b = mid;
        }
    }
    a
}

/// Smallest `x` in `[lo, hi]` with `pred(x)` true, for a predicate true on a
/// suffix of the interval. Assumes `pred(hi)` holds.
pub fn bisect_first_true<P>(mut pred: P, lo: f64, hi: f64, tol: f64) -> f64
where
    P: FnMut(f64) -> bool,
{
    if pred(lo) {
        return lo;
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if pred(mid) {
            b = mid;
        } else {
            a = mid;
        }
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_vertex() {
        let (x, fx) = golden_section(|x| (x - 0.3) * (x - 0.3) + 1.0, 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-14);
    }

    #[test]
    fn golden_reports_boundary_minimum() {
        let (x, fx) = golden_section(|x| 2.0 * x + 1.0, 0.0, 5.0, 1e-10);
        assert_eq!(x, 0.0);
        assert_eq!(fx, 1.0);
    }

    #[test]
    fn bisection_locates_threshold() {
        let x = bisect_last_true(|x| x * x <= 2.0, 0.0, 2.0, 1e-13);
        assert!((x - 2f64.sqrt()).abs() < 1e-12);
        let y = bisect_first_true(|x| x * x >= 2.0, 0.0, 2.0, 1e-13);
        assert!((y - 2f64.sqrt()).abs() < 1e-12);
    }
}
