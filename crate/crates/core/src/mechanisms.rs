//! The four benchmark quantities on an instance: first best, optimal fixed
//! price, seller pricing, buyer pricing, and randomized mixtures of the last
//! two.
//!
//! First best and the fixed-price objective are piecewise polynomials over
//! the merged knot grid of F and G, so they are integrated exactly. The
//! seller- and buyer-pricing outer integrals follow the posted-price argmax,
//! whose breakpoints are not knot-aligned; those use a refined adaptive
//! Simpson rule per segment (base 256 sub-intervals, doubled until the
//! Richardson check clears 1e-10).

use crate::distributions::{Distribution, Instance};
use crate::error::{Error, Result};
use crate::numeric::{adaptive_simpson_pair, merge_breakpoints, simpson};

/// Sub-intervals per CDF segment for the pricing-mechanism outer integrals.
const PRICING_BASE_GRID: usize = 256;
/// Absolute tolerance for the adaptive outer integration.
const PRICING_TOL: f64 = 1e-10;
/// Number of samples of the posted-price functions kept in outcome details.
const PRICE_GRID_SAMPLES: usize = 101;

/// Expected gains from trade of a mechanism, plus its mechanism-specific
/// artifacts.
#[derive(Debug, Clone)]
pub struct MechanismOutcome {
    pub gft: f64,
    pub detail: MechanismDetail,
}

#[derive(Debug, Clone)]
pub enum MechanismDetail {
    FixedPrice {
        price: f64,
        trade_probability: f64,
    },
    SellerPricing {
        /// (cost, optimal price) samples on a uniform cost grid.
        price_grid: Vec<(f64, f64)>,
        /// Expected seller profit ∫ (r_c - c)(1 - F(r_c)) dG(c).
        profit: f64,
    },
    BuyerPricing {
        /// (value, optimal price) samples on a uniform value grid.
        price_grid: Vec<(f64, f64)>,
        /// Expected buyer utility ∫ (v - r'_v) G(r'_v) dF(v).
        utility: f64,
    },
    Mixture {
        alpha: f64,
        seller_gft: f64,
        buyer_gft: f64,
    },
}

/// First-best gains from trade: trade whenever `v >= c`.
///
/// Computed as `∫ [T(c) - c (1 - F(c))] dG(c)` with `T(c) = ∫_c^1 v dF(v)`;
/// the integrand is piecewise quadratic between merged knots, so per-piece
/// Simpson is exact.
pub fn first_best(inst: &Instance) -> f64 {
    let f = &inst.buyer;
    let g = &inst.seller;
    let pieces = merge_breakpoints(&[f.knot_values(), g.knot_values()], 0.0, 1.0);
    let mut total = 0.0;
    for w in pieces.windows(2) {
        let density = g.density(0.5 * (w[0] + w[1]));
        total += density
            * simpson(
                |c| f.partial_expectation_at(c, 1.0) - c * (1.0 - f.cdf_at(c)),
                w[0],
                w[1],
            );
    }
    total
}

/// Gains from trade of the fixed-price mechanism at price `p`.
pub fn fixed_price_gft(inst: &Instance, p: f64) -> f64 {
    let f = &inst.buyer;
    let g = &inst.seller;
    g.cdf_at(p) * f.partial_expectation_at(p, 1.0)
        - (1.0 - f.cdf_at(p)) * g.partial_expectation_at(0.0, p)
}

/// Derivative of the fixed-price objective,
/// `g(p) ∫_p^1 (v - p) dF(v) - f(p) ∫_0^p (p - c) dG(c)`,
/// with the densities frozen to their values on the piece containing `mid`.
fn fixed_price_slope(inst: &Instance, mid: f64, p: f64) -> f64 {
    let f = &inst.buyer;
    let g = &inst.seller;
    let buyer_surplus = f.partial_expectation_at(p, 1.0) - p * (1.0 - f.cdf_at(p));
    let seller_surplus = p * g.cdf_at(p) - g.partial_expectation_at(0.0, p);
    g.density(mid) * buyer_surplus - f.density(mid) * seller_surplus
}

/// Optimal fixed-price mechanism: maximizes `fixed_price_gft` over `[0, 1]`.
///
/// The objective is cubic between merged knots, so its derivative is a
/// quadratic recovered exactly from three evaluations; interior critical
/// points come from the quadratic formula and ties break toward the smallest
/// price.
pub fn fixed_price(inst: &Instance) -> MechanismOutcome {
    let pieces = merge_breakpoints(
        &[inst.buyer.knot_values(), inst.seller.knot_values()],
        0.0,
        1.0,
    );
    let mut best = (0.0, f64::NEG_INFINITY);
    for w in pieces.windows(2) {
        let (a, b) = (w[0], w[1]);
        let m = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let d0 = fixed_price_slope(inst, m, a);
        let d1 = fixed_price_slope(inst, m, m);
        let d2 = fixed_price_slope(inst, m, b);
        // Quadratic in t = p - m: alpha t^2 + beta t + gamma.
        let alpha = (d0 - 2.0 * d1 + d2) / (2.0 * h * h);
        let beta = (d2 - d0) / (2.0 * h);
        let gamma = d1;
        let mut candidates = vec![a, b];
        let tiny = 1e-12 * (d0.abs() + d1.abs() + d2.abs() + 1.0);
        if alpha.abs() * h * h < tiny {
            if beta.abs() * h > tiny {
                candidates.push(m - gamma / beta);
            }
        } else {
            let disc = beta * beta - 4.0 * alpha * gamma;
            if disc >= 0.0 {
                let root = disc.sqrt();
                candidates.push(m + (-beta - root) / (2.0 * alpha));
                candidates.push(m + (-beta + root) / (2.0 * alpha));
            }
        }
        candidates.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for p in candidates {
            if p < a || p > b {
                continue;
            }
            let v = fixed_price_gft(inst, p);
            if v > best.1 {
                best = (p, v);
            }
        }
    }
    let (price, gft) = best;
    let trade_probability = (1.0 - inst.buyer.cdf_at(price)) * inst.seller.cdf_at(price);
    MechanismOutcome {
        gft,
        detail: MechanismDetail::FixedPrice {
            price,
            trade_probability,
        },
    }
}

/// Profit-maximizing posted price for a seller with cost `c` facing buyer
/// distribution F: the smallest maximizer of `(p - c)(1 - F(p))`.
///
/// The objective is quadratic on each segment of F, so candidates are the
/// interior vertices plus segment ends, solved in closed form.
pub fn seller_optimal_price(f: &Distribution, c: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::OutOfSupport(c));
    }
    // Candidates are visited in increasing order (c, then each segment's left
    // end and interior vertex, then 1), so keeping strictly better values
    // selects the smallest maximizer without materializing the list.
    let profit = |p: f64| (p - c) * (1.0 - f.cdf_at(p));
    let mut best = (c, 0.0);
    let consider = |p: f64, best: &mut (f64, f64)| {
        let v = profit(p);
        if v > best.1 {
            *best = (p, v);
        }
    };
    let xs = f.knot_values();
    let qs = f.knot_probabilities();
    for s in 0..xs.len() - 1 {
        if xs[s + 1] <= c {
            continue;
        }
        let lo = xs[s].max(c);
        consider(lo, &mut best);
        let density = (qs[s + 1] - qs[s]) / (xs[s + 1] - xs[s]);
        // Vertex of (p - c)(1 - q_s - density (p - x_s)).
        let vertex = 0.5 * (xs[s] + c + (1.0 - qs[s]) / density);
        if vertex > lo && vertex < xs[s + 1] {
            consider(vertex, &mut best);
        }
    }
    consider(1.0, &mut best);
    Ok(best.0)
}

/// Utility-maximizing posted price for a buyer with value `v` facing seller
/// distribution G: the smallest maximizer of `(v - p) G(p)`.
pub fn buyer_optimal_price(g: &Distribution, v: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::OutOfSupport(v));
    }
    // Mirror of `seller_optimal_price`; candidates again arrive in increasing
    // order (0, then each segment's interior vertex and right end, capped at v).
    let utility = |p: f64| (v - p) * g.cdf_at(p);
    let mut best = (0.0, 0.0);
    let consider = |p: f64, best: &mut (f64, f64)| {
        let u = utility(p);
        if u > best.1 {
            *best = (p, u);
        }
    };
    let xs = g.knot_values();
    let qs = g.knot_probabilities();
    for s in 0..xs.len() - 1 {
        if xs[s] >= v {
            break;
        }
        let density = (qs[s + 1] - qs[s]) / (xs[s + 1] - xs[s]);
        // Vertex of (v - p)(q_s + density (p - x_s)).
        let vertex = 0.5 * (v + xs[s] - qs[s] / density);
        let hi = xs[s + 1].min(v);
        if vertex > xs[s] && vertex < hi {
            consider(vertex, &mut best);
        }
        consider(hi, &mut best);
    }
    Ok(best.0)
}

/// Seller-pricing mechanism: for each cost `c` the seller posts her optimal
/// price `r_c`; trade happens when `v >= r_c`.
///
/// Returns both the expected gains from trade and the seller's expected
/// profit under the optimal price function.
pub fn seller_pricing(inst: &Instance) -> MechanismOutcome {
    let f = &inst.buyer;
    let g = &inst.seller;
    let integrand = |c: f64| {
        let r = seller_optimal_price(f, c).expect("c within [0,1]");
        let survival = 1.0 - f.cdf_at(r);
        let gft = f.partial_expectation_at(r, 1.0) - c * survival;
        let profit = (r - c) * survival;
        [gft, profit]
    };
    let mut gft = 0.0;
    let mut profit = 0.0;
    let xs = g.knot_values();
    for s in 0..xs.len() - 1 {
        let density = g.density(0.5 * (xs[s] + xs[s + 1]));
        let part = adaptive_simpson_pair(&integrand, xs[s], xs[s + 1], PRICING_BASE_GRID, PRICING_TOL);
        gft += density * part[0];
        profit += density * part[1];
    }
    let price_grid = (0..PRICE_GRID_SAMPLES)
        .map(|i| {
            let c = i as f64 / (PRICE_GRID_SAMPLES - 1) as f64;
            (c, seller_optimal_price(f, c).expect("grid point in [0,1]"))
        })
        .collect();
    MechanismOutcome {
        gft,
        detail: MechanismDetail::SellerPricing { price_grid, profit },
    }
}

/// Buyer-pricing mechanism: for each value `v` the buyer posts his optimal
/// price `r'_v`; trade happens when `c <= r'_v`. Mirror image of
/// `seller_pricing`.
pub fn buyer_pricing(inst: &Instance) -> MechanismOutcome {
    let f = &inst.buyer;
    let g = &inst.seller;
    let integrand = |v: f64| {
        let r = buyer_optimal_price(g, v).expect("v within [0,1]");
        let reach = g.cdf_at(r);
        let gft = v * reach - g.partial_expectation_at(0.0, r);
        let utility = (v - r) * reach;
        [gft, utility]
    };
    let mut gft = 0.0;
    let mut utility = 0.0;
    let xs = f.knot_values();
    for s in 0..xs.len() - 1 {
        let density = f.density(0.5 * (xs[s] + xs[s + 1]));
        let part = adaptive_simpson_pair(&integrand, xs[s], xs[s + 1], PRICING_BASE_GRID, PRICING_TOL);
        gft += density * part[0];
        utility += density * part[1];
    }
    let price_grid = (0..PRICE_GRID_SAMPLES)
        .map(|i| {
            let v = i as f64 / (PRICE_GRID_SAMPLES - 1) as f64;
            (v, buyer_optimal_price(g, v).expect("grid point in [0,1]"))
        })
        .collect();
    MechanismOutcome {
        gft,
        detail: MechanismDetail::BuyerPricing {
            price_grid,
            utility,
        },
    }
}

/// Run seller pricing with probability `alpha` and buyer pricing otherwise.
pub fn mixture(inst: &Instance, alpha: f64) -> Result<MechanismOutcome> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::BadAlpha(alpha));
    }
    let seller_gft = seller_pricing(inst).gft;
    let buyer_gft = buyer_pricing(inst).gft;
    Ok(MechanismOutcome {
        gft: alpha * seller_gft + (1.0 - alpha) * buyer_gft,
        detail: MechanismDetail::Mixture {
            alpha,
            seller_gft,
            buyer_gft,
        },
    })
}
