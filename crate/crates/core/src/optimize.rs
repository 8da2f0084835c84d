//! One-dimensional minimization on a bracket.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a local minimum of `f` on `[lo, hi]`, until
/// the bracket is narrower than `tol`. Returns `(x, f(x))`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Global minimum over `[lo, hi]`: scan `n` evenly spaced points, then
/// refine around the best one. Ties keep the smallest `x`.
pub fn grid_then_golden<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize, tol: f64) -> (f64, f64) {
    assert!(n >= 2, "grid needs at least two points");
    let step = (hi - lo) / (n - 1) as f64;
    let at = |i: usize| if i == n - 1 { hi } else { lo + step * i as f64 };
    let mut best = (0, f(lo));
    for i in 1..n {
        let v = f(at(i));
        if v < best.1 {
            best = (i, v);
        }
    }
    let (i, fi) = best;
    let a = at(i.saturating_sub(1));
    let b = at((i + 1).min(n - 1));
    let (x, fx) = golden_section(&f, a, b, tol);
    if fx < fi {
        (x, fx)
    } else {
        (at(i), fi)
    }
}
