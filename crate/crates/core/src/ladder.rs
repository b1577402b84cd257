//! The quantile step map `mu` and the ladder partition it induces.
//!
//! For a buyer distribution F and a parameter `lambda` in (0, 1),
//! `mu(x) = F^(-1)(lambda + (1 - lambda) F(x))` moves a value up by a
//! `lambda`-fraction of the remaining probability mass. Compositions are
//! computed in quantile space — iterate `q -> lambda + (1 - lambda) q`, then
//! invert once — which keeps the geometric tail identity
//! `1 - F(mu^k(x)) = (1 - lambda)^k (1 - F(x))` exact instead of letting
//! repeated inversions accumulate error.

use crate::distributions::Distribution;
use crate::error::{Error, Result};

/// The points `c, mu(c), mu^2(c), ...` until the residual tail mass drops
/// below `truncation_eps`.
#[derive(Debug, Clone)]
pub struct QuantileLadder {
    pub lambda: f64,
    pub start: f64,
    pub points: Vec<f64>,
    pub truncation_eps: f64,
    /// Tail mass 1 - F(points[k]) for each point, recorded at generation.
    pub tails: Vec<f64>,
}

impl QuantileLadder {
    /// Number of steps K (the last generated exponent); `points.len() - 1`.
    pub fn steps(&self) -> usize {
        self.points.len() - 1
    }

    /// Probability mass of `[points[t], points[t+1])` under F, from the
    /// geometric law `lambda (1 - lambda)^t (1 - F(start))`.
    pub fn interval_mass(&self, t: usize) -> f64 {
        self.tails[t] - self.tails[t + 1]
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::BadLambda(lambda));
    }
    Ok(())
}

/// One step of the quantile map: `F^(-1)(lambda + (1 - lambda) F(x))`.
///
/// Fixes the top: `mu(1) = 1`. Strictly increases any `x < 1`.
pub fn mu(f: &Distribution, lambda: f64, x: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfSupport(x));
    }
    let q = lambda + (1.0 - lambda) * f.cdf_at(x);
    Ok(f.quantile_at(q.min(1.0)))
}

/// k-fold composition of `mu` (k >= 0) or its inverse (k < 0).
///
/// For k < 0 the preimage exists iff `F(x) >= 1 - (1 - lambda)^|k|`; when it
/// does not, the sentinel 0 is returned.
pub fn mu_k(f: &Distribution, lambda: f64, x: f64, k: i32) -> Result<f64> {
    check_lambda(lambda)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfSupport(x));
    }
    if k == 0 {
        return Ok(x);
    }
    let tail = 1.0 - f.cdf_at(x);
    let shrink = (1.0 - lambda).powi(k.abs());
    if k > 0 {
        let q = 1.0 - shrink * tail;
        Ok(f.quantile_at(q))
    } else {
        let q = 1.0 - tail / shrink;
        if q < 0.0 {
            return Ok(0.0);
        }
        Ok(f.quantile_at(q))
    }
}

/// Generate the ladder from `c` until the residual tail mass under F falls
/// below `eps`.
pub fn build_ladder(f: &Distribution, lambda: f64, c: f64, eps: f64) -> Result<QuantileLadder> {
    check_lambda(lambda)?;
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::OutOfSupport(c));
    }
    if c >= 1.0 {
        return Err(Error::DegenerateStart);
    }
    let tail0 = 1.0 - f.cdf_at(c);
    if !(eps > 0.0 && eps < tail0) {
        return Err(Error::OutOfRange(eps));
    }
    let mut points = vec![c];
    let mut tails = vec![tail0];
    let mut tail = tail0;
    loop {
        tail *= 1.0 - lambda;
        points.push(f.quantile_at(1.0 - tail));
        tails.push(tail);
        if tail < eps {
            break;
        }
    }
    Ok(QuantileLadder {
        lambda,
        start: c,
        points,
        truncation_eps: eps,
        tails,
    })
}
