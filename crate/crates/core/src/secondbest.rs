//! Discrete second-best benchmark: the optimal gains from trade over
//! Bayesian incentive-compatible, interim individually rational, ex-post
//! weakly budget balanced mechanisms on a finite value/cost grid, solved as a
//! linear program.
//!
//! Posted-price mechanisms are feasible for this program, and no mechanism
//! beats unrestricted efficient trade, so every solution is sandwiched:
//! `max(SP_d, BP_d) <= sb <= FB_d`.

use crate::distributions::Instance;
use crate::error::{Error, Result};
use crate::simplex::{self, LinearProgram, LpStatus, Sense};

/// Payment variables are boxed to this magnitude as a numerical guard; every
/// surplus-relevant transfer on `[0, 1]` supports fits well inside.
pub const PAYMENT_BOUND: f64 = 2.0;

/// Tolerance on constraint residuals of a reported solution.
pub const SOLUTION_TOL: f64 = 1e-7;

/// Finite-support instance: buyer values `v_i` with masses `f_i`, seller
/// costs `c_j` with masses `g_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteInstance {
    pub values: Vec<f64>,
    pub value_probs: Vec<f64>,
    pub costs: Vec<f64>,
    pub cost_probs: Vec<f64>,
}

impl DiscreteInstance {
    pub fn new(
        values: Vec<f64>,
        value_probs: Vec<f64>,
        costs: Vec<f64>,
        cost_probs: Vec<f64>,
    ) -> Result<Self> {
        let check = |points: &[f64], probs: &[f64], what: &str| -> Result<()> {
            if points.is_empty() || points.len() != probs.len() {
                return Err(Error::Format(format!(
                    "{what}: need matching nonempty point and probability lists"
                )));
            }
            for w in points.windows(2) {
                if w[1] <= w[0] {
                    return Err(Error::NonMonotone { coord: "x", index: 0 });
                }
            }
            if points.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(Error::OutOfSupport(points[0]));
            }
            if probs.iter().any(|p| *p <= 0.0) {
                return Err(Error::Format(format!("{what}: probabilities must be positive")));
            }
            let total: f64 = probs.iter().sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::Format(format!(
                    "{what}: probabilities sum to {total}, not 1"
                )));
            }
            Ok(())
        };
        check(&values, &value_probs, "values")?;
        check(&costs, &cost_probs, "costs")?;
        Ok(DiscreteInstance {
            values,
            value_probs,
            costs,
            cost_probs,
        })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn m(&self) -> usize {
        self.costs.len()
    }
}

/// The second-best linear program over trade probabilities `x_ij`, buyer
/// payments `pb_ij` and seller receipts `ps_ij`.
#[derive(Debug, Clone)]
pub struct LPModel {
    pub n: usize,
    pub m: usize,
    pub instance: DiscreteInstance,
    /// Objective coefficients, one per variable.
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    /// Per-variable `[lower, upper]` boxes.
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// A named `>=` constraint over the model variables.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl LPModel {
    pub fn num_vars(&self) -> usize {
        3 * self.n * self.m
    }

    pub fn x_index(&self, i: usize, j: usize) -> usize {
        i * self.m + j
    }

    pub fn pb_index(&self, i: usize, j: usize) -> usize {
        self.n * self.m + i * self.m + j
    }

    pub fn ps_index(&self, i: usize, j: usize) -> usize {
        2 * self.n * self.m + i * self.m + j
    }

    pub fn var_name(&self, k: usize) -> String {
        let nm = self.n * self.m;
        let (prefix, rest) = match k / nm {
            0 => ("x", k),
            1 => ("pb", k - nm),
            _ => ("ps", k - 2 * nm),
        };
        format!("{prefix}_{}_{}", rest / self.m, rest % self.m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    /// The guard against unbounded rays fired; with boxed payments this
    /// indicates numerical trouble rather than a genuine ray.
    UnboundedGuard,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolveStatus::Optimal => write!(f, "optimal"),
            SolveStatus::Infeasible => write!(f, "infeasible"),
            SolveStatus::UnboundedGuard => write!(f, "unbounded-guard"),
        }
    }
}

/// Optimal mechanism returned by the LP.
#[derive(Debug, Clone)]
pub struct SBSolution {
    /// Optimal expected gains from trade.
    pub sb: f64,
    /// Trade probabilities, `trade_rule[i][j] = x_ij`.
    pub trade_rule: Vec<Vec<f64>>,
    pub buyer_payments: Vec<Vec<f64>>,
    pub seller_payments: Vec<Vec<f64>>,
    pub status: SolveStatus,
    /// Largest constraint violation of the reported mechanism.
    pub max_violation: f64,
    /// Simplex pivots used.
    pub iterations: usize,
}

impl SBSolution {
    /// Interim trade probability of each buyer type, `X_i = sum_j g_j x_ij`.
    pub fn interim_trade_probabilities(&self, d: &DiscreteInstance) -> Vec<f64> {
        self.trade_rule
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&d.cost_probs)
                    .map(|(x, g)| x * g)
                    .sum::<f64>()
            })
            .collect()
    }
}

/// Full second-best report with the discrete benchmarks used for the
/// sandwich check.
#[derive(Debug, Clone)]
pub struct SecondBestReport {
    pub discrete: DiscreteInstance,
    pub solution: SBSolution,
    /// Discrete first best: trade whenever `v_i >= c_j`.
    pub fb_d: f64,
    /// Discrete seller-pricing value from exhaustive posted-price search.
    pub sp_d: f64,
    /// Discrete buyer-pricing value from exhaustive posted-price search.
    pub bp_d: f64,
}

/// Quantile-midpoint discretization: `n` buyer values at
/// `F^(-1)((2i - 1) / 2n)` with mass `1/n` each, and likewise `m` costs.
pub fn discretize(inst: &Instance, n: usize, m: usize) -> DiscreteInstance {
    assert!(n >= 1 && m >= 1, "grid sizes must be positive");
    let values: Vec<f64> = (1..=n)
        .map(|i| inst.buyer.quantile_at((2 * i - 1) as f64 / (2 * n) as f64))
        .collect();
    let costs: Vec<f64> = (1..=m)
        .map(|j| inst.seller.quantile_at((2 * j - 1) as f64 / (2 * m) as f64))
        .collect();
    DiscreteInstance::new(
        values,
        vec![1.0 / n as f64; n],
        costs,
        vec![1.0 / m as f64; m],
    )
    .expect("quantile midpoints of a valid distribution form a valid grid")
}

/// Assemble the BIC / IR / ex-post-WBB linear program for a discrete
/// instance.
///
/// Interim quantities: `X_i = sum_j g_j x_ij`, `P_i = sum_j g_j pb_ij`,
/// `Y_j = sum_i f_i x_ij`, `Q_j = sum_i f_i ps_ij`. Constraints, all `>=`:
///
/// * buyer BIC, each ordered pair `(i, i')`:  `v_i X_i - P_i >= v_i X_i' - P_i'`
/// * buyer IR: `v_i X_i - P_i >= 0`
/// * seller BIC, each `(j, j')`: `Q_j - c_j Y_j >= Q_j' - c_j Y_j'`
/// * seller IR: `Q_j - c_j Y_j >= 0`
/// * ex-post WBB, each cell: `pb_ij - ps_ij >= 0`
pub fn build_lp(d: &DiscreteInstance) -> LPModel {
    let n = d.n();
    let m = d.m();
    let nm = n * m;
    let mut model = LPModel {
        n,
        m,
        instance: d.clone(),
        objective: vec![0.0; 3 * nm],
        constraints: Vec::new(),
        lower: vec![0.0; 3 * nm],
        upper: vec![1.0; 3 * nm],
    };
    for k in nm..3 * nm {
        model.lower[k] = -PAYMENT_BOUND;
        model.upper[k] = PAYMENT_BOUND;
    }
    for i in 0..n {
        for j in 0..m {
            let k = model.x_index(i, j);
            model.objective[k] = d.value_probs[i] * d.cost_probs[j] * (d.values[i] - d.costs[j]);
        }
    }

    // Buyer BIC and IR.
    for i in 0..n {
        for i2 in 0..n {
            if i == i2 {
                continue;
            }
            let mut terms = Vec::with_capacity(4 * m);
            for j in 0..m {
                let g = d.cost_probs[j];
                terms.push((model.x_index(i, j), d.values[i] * g));
                terms.push((model.pb_index(i, j), -g));
                terms.push((model.x_index(i2, j), -d.values[i] * g));
                terms.push((model.pb_index(i2, j), g));
            }
            model.constraints.push(Constraint {
                name: format!("bic_b_{i}_{i2}"),
                terms,
                rhs: 0.0,
            });
        }
    }
    for i in 0..n {
        let mut terms = Vec::with_capacity(2 * m);
        for j in 0..m {
            let g = d.cost_probs[j];
            terms.push((model.x_index(i, j), d.values[i] * g));
            terms.push((model.pb_index(i, j), -g));
        }
        model.constraints.push(Constraint {
            name: format!("ir_b_{i}"),
            terms,
            rhs: 0.0,
        });
    }

    // Seller BIC and IR.
    for j in 0..m {
        for j2 in 0..m {
            if j == j2 {
                continue;
            }
            let mut terms = Vec::with_capacity(4 * n);
            for i in 0..n {
                let f = d.value_probs[i];
                terms.push((model.ps_index(i, j), f));
                terms.push((model.x_index(i, j), -d.costs[j] * f));
                terms.push((model.ps_index(i, j2), -f));
                terms.push((model.x_index(i, j2), d.costs[j] * f));
            }
            model.constraints.push(Constraint {
                name: format!("bic_s_{j}_{j2}"),
                terms,
                rhs: 0.0,
            });
        }
    }
    for j in 0..m {
        let mut terms = Vec::with_capacity(2 * n);
        for i in 0..n {
            let f = d.value_probs[i];
            terms.push((model.ps_index(i, j), f));
            terms.push((model.x_index(i, j), -d.costs[j] * f));
        }
        model.constraints.push(Constraint {
            name: format!("ir_s_{j}"),
            terms,
            rhs: 0.0,
        });
    }

    // Ex-post weak budget balance.
    for i in 0..n {
        for j in 0..m {
            model.constraints.push(Constraint {
                name: format!("wbb_{i}_{j}"),
                terms: vec![(model.pb_index(i, j), 1.0), (model.ps_index(i, j), -1.0)],
                rhs: 0.0,
            });
        }
    }
    model
}

/// Solve the model with the built-in dense simplex.
pub fn solve_lp(model: &LPModel) -> Result<SBSolution> {
    let nv = model.num_vars();
    // Shift every variable to a zero lower bound for the solver.
    let shifted = LinearProgram {
        n_vars: nv,
        objective: model.objective.clone(),
        upper: (0..nv).map(|k| model.upper[k] - model.lower[k]).collect(),
        rows: model
            .constraints
            .iter()
            .map(|c| {
                let shift: f64 = c.terms.iter().map(|&(k, a)| a * model.lower[k]).sum();
                (c.terms.clone(), Sense::Ge, c.rhs - shift)
            })
            .collect(),
    };
    let raw = simplex::solve(&shifted)?;
    let status = match raw.status {
        LpStatus::Optimal => SolveStatus::Optimal,
        LpStatus::Infeasible => SolveStatus::Infeasible,
        LpStatus::Unbounded => SolveStatus::UnboundedGuard,
    };
    let x: Vec<f64> = raw
        .x
        .iter()
        .enumerate()
        .map(|(k, v)| v + model.lower[k])
        .collect();

    let matrix = |offset: usize| -> Vec<Vec<f64>> {
        (0..model.n)
            .map(|i| (0..model.m).map(|j| x[offset + i * model.m + j]).collect())
            .collect()
    };
    let sb: f64 = model
        .objective
        .iter()
        .zip(&x)
        .map(|(c, v)| c * v)
        .sum();
    // Payments carry no objective weight, so the shift leaves the optimum
    // untouched; any gap here would mean tableau drift.
    debug_assert!((sb - raw.objective).abs() < 1e-9);

    let mut max_violation = 0.0f64;
    for c in &model.constraints {
        let lhs: f64 = c.terms.iter().map(|&(k, a)| a * x[k]).sum();
        max_violation = max_violation.max(c.rhs - lhs);
    }
    for (k, v) in x.iter().enumerate() {
        max_violation = max_violation
            .max(model.lower[k] - v)
            .max(v - model.upper[k]);
    }

    Ok(SBSolution {
        sb,
        trade_rule: matrix(0),
        buyer_payments: matrix(model.n * model.m),
        seller_payments: matrix(2 * model.n * model.m),
        status,
        max_violation,
        iterations: raw.iterations,
    })
}

/// Discrete first best: `sum_ij f_i g_j (v_i - c_j)^+`.
pub fn discrete_first_best(d: &DiscreteInstance) -> f64 {
    let mut total = 0.0;
    for (i, &v) in d.values.iter().enumerate() {
        for (j, &c) in d.costs.iter().enumerate() {
            if v >= c {
                total += d.value_probs[i] * d.cost_probs[j] * (v - c);
            }
        }
    }
    total
}

/// Discrete seller pricing by exhaustive search: for each cost the seller
/// posts the profit-maximizing price among the buyer grid values (smallest
/// maximizer), or prices everyone out when no price profits.
pub fn discrete_seller_pricing(d: &DiscreteInstance) -> f64 {
    let n = d.n();
    // Survivor mass above each candidate price v_i.
    let mut tail = vec![0.0; n + 1];
    for i in (0..n).rev() {
        tail[i] = tail[i + 1] + d.value_probs[i];
    }
    let mut total = 0.0;
    for (j, &c) in d.costs.iter().enumerate() {
        let mut best_profit = 0.0;
        let mut best_price: Option<usize> = None;
        for (i, &v) in d.values.iter().enumerate() {
            let profit = (v - c) * tail[i];
            if profit > best_profit + 1e-15 {
                best_profit = profit;
                best_price = Some(i);
            }
        }
        if let Some(i) = best_price {
            let gft: f64 = (i..n)
                .map(|k| d.value_probs[k] * (d.values[k] - c))
                .sum();
            total += d.cost_probs[j] * gft;
        }
    }
    total
}

/// Discrete buyer pricing by exhaustive search; mirror of
/// `discrete_seller_pricing`.
pub fn discrete_buyer_pricing(d: &DiscreteInstance) -> f64 {
    let m = d.m();
    let mut below = vec![0.0; m + 1];
    for j in 0..m {
        below[j + 1] = below[j] + d.cost_probs[j];
    }
    let mut total = 0.0;
    for (i, &v) in d.values.iter().enumerate() {
        let mut best_utility = 0.0;
        let mut best_price: Option<usize> = None;
        for (j, &c) in d.costs.iter().enumerate() {
            let utility = (v - c) * below[j + 1];
            if utility > best_utility + 1e-15 {
                best_utility = utility;
                best_price = Some(j);
            }
        }
        if let Some(j) = best_price {
            let gft: f64 = (0..=j)
                .map(|k| d.cost_probs[k] * (v - d.costs[k]))
                .sum();
            total += d.value_probs[i] * gft;
        }
    }
    total
}

/// Discretize, build and solve, then check the posted-price/first-best
/// sandwich.
pub fn second_best(inst: &Instance, n: usize, m: usize) -> Result<SecondBestReport> {
    let d = discretize(inst, n, m);
    let model = build_lp(&d);
    let solution = solve_lp(&model)?;
    let fb_d = discrete_first_best(&d);
    let sp_d = discrete_seller_pricing(&d);
    let bp_d = discrete_buyer_pricing(&d);
    if solution.status == SolveStatus::Optimal {
        let floor = sp_d.max(bp_d);
        if solution.sb < floor - SOLUTION_TOL || solution.sb > fb_d + SOLUTION_TOL {
            return Err(Error::PropertyViolation(format!(
                "second best {} escapes the sandwich [{floor}, {fb_d}]",
                solution.sb
            )));
        }
        if solution.max_violation > SOLUTION_TOL {
            return Err(Error::PropertyViolation(format!(
                "solution violates constraints by {}",
                solution.max_violation
            )));
        }
    }
    Ok(SecondBestReport {
        discrete: d,
        solution,
        fb_d,
        sp_d,
        bp_d,
    })
}

/// Serialize the model in LP text format with deterministic names
/// (`x_i_j`, `pb_i_j`, `ps_i_j`; constraint rows in build order).
pub fn export_lp(model: &LPModel) -> String {
    let mut out = String::new();
    out.push_str("\\ discrete second-best gains-from-trade program\n");
    out.push_str("Maximize\n obj:");
    let mut first = true;
    for (k, &c) in model.objective.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        push_term(&mut out, &mut first, c, &model.var_name(k));
    }
    out.push_str("\nSubject To\n");
    for cons in &model.constraints {
        out.push_str(&format!(" {}:", cons.name));
        let mut first = true;
        for &(k, coef) in &cons.terms {
            if coef == 0.0 {
                continue;
            }
            push_term(&mut out, &mut first, coef, &model.var_name(k));
        }
        out.push_str(&format!(" >= {}\n", cons.rhs));
    }
    out.push_str("Bounds\n");
    for k in 0..model.num_vars() {
        out.push_str(&format!(
            " {} <= {} <= {}\n",
            model.lower[k],
            model.var_name(k),
            model.upper[k]
        ));
    }
    out.push_str("End\n");
    out
}

fn push_term(out: &mut String, first: &mut bool, coef: f64, name: &str) {
    let mag = coef.abs();
    let sign = if coef < 0.0 { "-" } else { "+" };
    if *first {
        *first = false;
        if coef < 0.0 {
            out.push_str(" -");
        } else {
            out.push(' ');
        }
    } else {
        out.push_str(&format!(" {sign} "));
    }
    if mag == 1.0 {
        out.push_str(name);
    } else {
        out.push_str(&format!("{mag} {name}"));
    }
}
