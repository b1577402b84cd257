//! Scalar optimization and quadrature helpers shared by the mechanism and
//! bound evaluators.

/// Inverse golden ratio, (sqrt(5) - 1) / 2.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization of `f` on `[a, b]`.
///
/// Shrinks the bracket to width `tol` and returns the better of bracket
/// midpoint and both endpoints, so kinks at interval ends are not missed.
pub(crate) fn golden_max(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let mut lo = a;
    let mut hi = b;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    let mid = 0.5 * (lo + hi);
    let mut best = (mid, f(mid));
    for cand in [a, b] {
        let v = f(cand);
        if v > best.1 || (v == best.1 && cand < best.0) {
            best = (cand, v);
        }
    }
    best
}

pub(crate) fn golden_min(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (x, neg) = golden_max(|t| -f(t), a, b, tol);
    (x, -neg)
}

/// Simpson's rule on a single interval; exact for cubic integrands.
pub(crate) fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let m = 0.5 * (a + b);
    (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
}

/// Adaptive Simpson for a pair of integrands sharing their evaluation.
///
/// The base grid splits `[a, b]` into `base` equal sub-intervals; each is then
/// refined until the half-interval Richardson check passes for both
/// components. Deterministic: refinement order is fixed by recursion.
pub(crate) fn adaptive_simpson_pair(
    f: &impl Fn(f64) -> [f64; 2],
    a: f64,
    b: f64,
    base: usize,
    tol: f64,
) -> [f64; 2] {
    if b <= a {
        return [0.0, 0.0];
    }
    let n = base.max(1);
    let h = (b - a) / n as f64;
    let mut total = [0.0, 0.0];
    for k in 0..n {
        let lo = a + k as f64 * h;
        let hi = if k + 1 == n { b } else { lo + h };
        let mid = 0.5 * (lo + hi);
        let flo = f(lo);
        let fmid = f(mid);
        let fhi = f(hi);
        let whole = simpson_pair_cached(lo, hi, flo, fmid, fhi);
        let part = refine_pair(f, lo, hi, flo, fmid, fhi, whole, tol * h / (b - a), 40);
        total[0] += part[0];
        total[1] += part[1];
    }
    total
}

fn simpson_pair_cached(a: f64, b: f64, fa: [f64; 2], fm: [f64; 2], fb: [f64; 2]) -> [f64; 2] {
    let w = (b - a) / 6.0;
    [
        w * (fa[0] + 4.0 * fm[0] + fb[0]),
        w * (fa[1] + 4.0 * fm[1] + fb[1]),
    ]
}

#[allow(clippy::too_many_arguments)]
fn refine_pair(
    f: &impl Fn(f64) -> [f64; 2],
    a: f64,
    b: f64,
    fa: [f64; 2],
    fm: [f64; 2],
    fb: [f64; 2],
    whole: [f64; 2],
    tol: f64,
    depth: u32,
) -> [f64; 2] {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson_pair_cached(a, m, fa, flm, fm);
    let right = simpson_pair_cached(m, b, fm, frm, fb);
    let sum = [left[0] + right[0], left[1] + right[1]];
    let err = (sum[0] - whole[0]).abs().max((sum[1] - whole[1]).abs());
    if depth == 0 || err <= 15.0 * tol {
        // Standard Richardson correction for the leading error term.
        [
            sum[0] + (sum[0] - whole[0]) / 15.0,
            sum[1] + (sum[1] - whole[1]) / 15.0,
        ]
    } else {
        let l = refine_pair(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1);
        let r = refine_pair(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
        [l[0] + r[0], l[1] + r[1]]
    }
}

/// Merge, sort and deduplicate breakpoints, clipped to `[lo, hi]`.
pub(crate) fn merge_breakpoints(sources: &[&[f64]], lo: f64, hi: f64) -> Vec<f64> {
    let mut pts = vec![lo, hi];
    for src in sources {
        for &x in *src {
            if x > lo && x < hi {
                pts.push(x);
            }
        }
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    pts
}
