//! Statistical cross-validation of the analytic mechanism values: play each
//! trade rule on sampled `(v, c)` pairs and compare the estimate against the
//! exact evaluator.
//!
//! Sampling is batched: batch `b` draws from stream `b` of a ChaCha8
//! generator seeded with the master seed, and every trial consumes exactly
//! three uniforms (value, cost, mixture coin) no matter which mechanism runs.
//! Batches are therefore independent, mechanisms share common random numbers
//! for variance reduction, and results do not depend on how many batches run
//! in parallel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::Instance;
use crate::error::{Error, Result};
use crate::mechanisms;

const BATCH_SIZE: usize = 1 << 16;

/// A trade rule to simulate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mechanism {
    Fixed,
    Seller,
    Buyer,
    Mixture(f64),
    /// The omniscient benchmark rule: trade whenever `v >= c`.
    FirstBest,
}

impl Mechanism {
    pub fn id(&self) -> String {
        match self {
            Mechanism::Fixed => "fixed".into(),
            Mechanism::Seller => "seller".into(),
            Mechanism::Buyer => "buyer".into(),
            Mechanism::Mixture(alpha) => format!("mixture({alpha})"),
            Mechanism::FirstBest => "fb".into(),
        }
    }

    /// Parse a mechanism name; `alpha` feeds the mixture weight.
    pub fn parse(name: &str, alpha: f64) -> Result<Self> {
        match name {
            "fixed" => Ok(Mechanism::Fixed),
            "seller" => Ok(Mechanism::Seller),
            "buyer" => Ok(Mechanism::Buyer),
            "mixture" => {
                if !(0.0..=1.0).contains(&alpha) {
                    return Err(Error::BadAlpha(alpha));
                }
                Ok(Mechanism::Mixture(alpha))
            }
            "fb" => Ok(Mechanism::FirstBest),
            other => Err(Error::UnknownMechanism(other.to_string())),
        }
    }
}

/// Simulation estimate next to its analytic target.
#[derive(Debug, Clone, Serialize)]
pub struct SimReport {
    pub mechanism: String,
    pub n: usize,
    pub mean: f64,
    pub stderr: f64,
    pub analytic: f64,
    /// Standardized gap `(mean - analytic) / stderr`.
    pub z: f64,
    /// Trades where the buyer paid more than her value or the seller sold
    /// below his cost. Zero for correctly implemented posted prices.
    pub ir_violations: usize,
    /// Trades where the buyer's payment differed from the seller's receipt.
    /// The simulated mechanisms are strongly budget balanced, so zero.
    pub bb_violations: usize,
}

impl SimReport {
    /// An estimate more than four standard errors from its analytic value is
    /// flagged as a reconciliation failure.
    pub fn flagged(&self) -> bool {
        !(self.z.abs() <= 4.0)
    }
}

#[derive(Default, Clone, Copy)]
struct Accum {
    sum: f64,
    sumsq: f64,
    ir_violations: usize,
    bb_violations: usize,
}

impl Accum {
    fn add(&mut self, gft: f64) {
        self.sum += gft;
        self.sumsq += gft * gft;
    }

    fn merge(mut self, other: Accum) -> Accum {
        self.sum += other.sum;
        self.sumsq += other.sumsq;
        self.ir_violations += other.ir_violations;
        self.bb_violations += other.bb_violations;
        self
    }
}

struct TradeRule<'a> {
    inst: &'a Instance,
    mechanism: Mechanism,
    fixed_price: f64,
}

impl TradeRule<'_> {
    /// Apply the trade rule to one `(v, c, coin)` triple; returns realized
    /// GFT and audit counters.
    fn play(&self, v: f64, c: f64, coin: f64, acc: &mut Accum) {
        let mechanism = match self.mechanism {
            Mechanism::Mixture(alpha) => {
                if coin < alpha {
                    Mechanism::Seller
                } else {
                    Mechanism::Buyer
                }
            }
            other => other,
        };
        let traded_at = match mechanism {
            Mechanism::Fixed => {
                let p = self.fixed_price;
                (v >= p && c <= p).then_some(p)
            }
            Mechanism::Seller => {
                let p = mechanisms::seller_optimal_price(&self.inst.buyer, c)
                    .expect("sampled cost lies in [0,1]");
                (v >= p).then_some(p)
            }
            Mechanism::Buyer => {
                let p = mechanisms::buyer_optimal_price(&self.inst.seller, v)
                    .expect("sampled value lies in [0,1]");
                (c <= p).then_some(p)
            }
            Mechanism::FirstBest => (v >= c).then_some(c),
            Mechanism::Mixture(_) => unreachable!("mixture resolved above"),
        };
        match traded_at {
            Some(price) => {
                if mechanism != Mechanism::FirstBest {
                    // Ex-post IR audit: the buyer pays at most her value, the
                    // seller receives at least his cost.
                    if v < price || c > price {
                        acc.ir_violations += 1;
                    }
                    // Budget balance audit: posted prices move the price from
                    // buyer to seller, nothing else.
                    let buyer_pays = price;
                    let seller_gets = price;
                    if buyer_pays != seller_gets {
                        acc.bb_violations += 1;
                    }
                }
                acc.add(v - c);
            }
            None => acc.add(0.0),
        }
    }
}

fn analytic_value(inst: &Instance, mechanism: Mechanism) -> f64 {
    match mechanism {
        Mechanism::Fixed => mechanisms::fixed_price(inst).gft,
        Mechanism::Seller => mechanisms::seller_pricing(inst).gft,
        Mechanism::Buyer => mechanisms::buyer_pricing(inst).gft,
        Mechanism::Mixture(alpha) => {
            mechanisms::mixture(inst, alpha).expect("alpha validated").gft
        }
        Mechanism::FirstBest => mechanisms::first_best(inst),
    }
}

/// Simulate `n` plays of a mechanism with prices taken from the analytic
/// optimizers, and reconcile the sample mean with the exact value.
pub fn simulate(inst: &Instance, mechanism: Mechanism, n: usize, seed: u64) -> Result<SimReport> {
    if let Mechanism::Mixture(alpha) = mechanism {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::BadAlpha(alpha));
        }
    }
    assert!(n >= 2, "need at least two samples for a standard error");

    let rule = TradeRule {
        inst,
        mechanism,
        fixed_price: match mechanisms::fixed_price(inst).detail {
            crate::mechanisms::MechanismDetail::FixedPrice { price, .. } => price,
            _ => unreachable!(),
        },
    };

    let n_batches = n.div_ceil(BATCH_SIZE);
    let acc = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = BATCH_SIZE.min(n - b * BATCH_SIZE);
            let mut acc = Accum::default();
            for _ in 0..count {
                let uv = rng.gen::<f64>();
                let uc = rng.gen::<f64>();
                let coin = rng.gen::<f64>();
                let v = inst.buyer.quantile_at(uv);
                let c = inst.seller.quantile_at(uc);
                rule.play(v, c, coin, &mut acc);
            }
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Accum::default(), Accum::merge);

    let nf = n as f64;
    let mean = acc.sum / nf;
    let variance = ((acc.sumsq - nf * mean * mean) / (nf - 1.0)).max(0.0);
    let stderr = (variance / nf).sqrt();
    let analytic = analytic_value(inst, mechanism);
    let z = if stderr > 0.0 {
        (mean - analytic) / stderr
    } else if (mean - analytic).abs() < 1e-12 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(SimReport {
        mechanism: mechanism.id(),
        n,
        mean,
        stderr,
        analytic,
        z,
        ir_violations: acc.ir_violations,
        bb_violations: acc.bb_violations,
    })
}

/// Simulate the four mechanisms plus the first-best estimator on common
/// random numbers.
pub fn cross_validate(inst: &Instance, n: usize, seed: u64) -> Result<Vec<SimReport>> {
    [
        Mechanism::FirstBest,
        Mechanism::Fixed,
        Mechanism::Seller,
        Mechanism::Buyer,
        Mechanism::Mixture(0.5),
    ]
    .into_iter()
    .map(|mech| simulate(inst, mech, n, seed))
    .collect()
}
