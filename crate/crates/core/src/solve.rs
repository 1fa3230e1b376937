//! Bracketed scalar root finding and 1-d maximization.
//!
//! Root finding is bisection refined by Newton steps, falling back to
//! bisection whenever a Newton step leaves the bracket. With the paper's
//! monotonicity lemmas this converges unconditionally.

/// Root of `f` in `[lo, hi]`, where `f(lo)` and `f(hi)` have opposite signs
/// (or one endpoint is a root). `df` is the derivative, used for polish.
pub fn bisect_newton<F, D>(f: F, df: D, lo: f64, hi: f64, x_tol: f64) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = (lo, hi);
    let mut flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    if flo > 0.0 {
        // orient so f(lo) < 0 < f(hi)
        std::mem::swap(&mut lo, &mut hi);
        flo = f(lo);
        if flo == 0.0 {
            return lo;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if (hi - lo).abs() <= x_tol {
            return 0.5 * (lo + hi);
        }
        let d = df(x);
        let newton = x - fx / d;
        let (a, b) = if lo < hi { (lo, hi) } else { (hi, lo) };
        x = if d != 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    0.5 * (lo + hi)
}

/// Plain bisection for monotone sign changes with no cheap derivative.
pub fn bisect<F>(f: F, lo: f64, hi: f64, x_tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = (lo, hi);
    let flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    let positive_at_hi = flo < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= x_tol || mid == lo || mid == hi {
            return mid;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == positive_at_hi {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Maximum of `f` on `[a, b]`: dense grid scan followed by golden-section
/// refinement around the best bracket. Deterministic; ties between grid
/// points are broken toward the larger abscissa so boundary suprema are
/// not missed.
pub fn grid_golden_max<F>(f: F, a: f64, b: f64, grid: usize, x_tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    debug_assert!(grid >= 2);
    let n = grid;
    let step = (b - a) / n as f64;
    let mut best_i = 0usize;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..=n {
        let x = if i == n { b } else { a + step * i as f64 };
        let v = f(x);
        if v >= best_v {
            best_v = v;
            best_i = i;
        }
    }
    let lo = if best_i == 0 { a } else { a + step * (best_i - 1) as f64 };
    let hi = if best_i >= n { b } else { a + step * (best_i + 1) as f64 };
    let (x, v) = golden_max(&f, lo, hi, x_tol);
    if v >= best_v {
        (x, v)
    } else {
        let xb = if best_i == n { b } else { a + step * best_i as f64 };
        (xb, best_v)
    }
}

/// Golden-section search for the maximum of a unimodal function on [a, b].
pub fn golden_max<F>(f: &F, a: f64, b: f64, x_tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    const INV_PHI: f64 = 0.6180339887498949;
    let (mut a, mut b) = (a, b);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > x_tol {
        if fc > fd {
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
    let x = 0.5 * (a + b);
    (x, f(x))
}
