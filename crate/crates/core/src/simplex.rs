//! Dense two-phase primal simplex for box-constrained linear programs.
//!
//! Variables live in `[0, u_k]` (upper bounds may be infinite); general rows
//! are `<=` or `>=`. Upper bounds are handled by the flip substitution
//! `x -> u - x`, so every nonbasic variable sits at (shifted) zero and the
//! classic tableau rules apply with one extra ratio-test case for bound
//! flips. Pricing is Dantzig by default and switches to Bland's rule after a
//! degenerate stall, which keeps the anti-cycling guarantee without paying
//! Bland's price on every pivot.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[allow(dead_code)] // both senses belong to the solver interface
pub enum Sense {
    Le,
    Ge,
}

/// `maximize objective . x` subject to `rows` and `0 <= x <= upper`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub n_vars: usize,
    pub objective: Vec<f64>,
    pub upper: Vec<f64>,
    /// Sparse rows: (terms, sense, rhs).
    pub rows: Vec<(Vec<(usize, f64)>, Sense, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[allow(dead_code)] // Unbounded is unreachable while every variable is boxed
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    pub x: Vec<f64>,
    pub iterations: usize,
}

const EPS: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-7;
const STALL_LIMIT: usize = 400;
const MAX_ITERS: usize = 200_000;
const MAGNITUDE_GUARD: f64 = 1e10;

struct Tableau {
    m: usize,
    width: usize, // columns including rhs
    rows: Vec<f64>,
    cost1: Vec<f64>,
    cost2: Vec<f64>,
    obj1: f64,
    obj2: f64,
    upper: Vec<f64>,
    flipped: Vec<bool>,
    basic: Vec<usize>,
    in_basis: Vec<bool>,
    artificial_start: usize,
    iterations: usize,
    bland: bool,
    stall: usize,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.rows[r * self.width + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> f64 {
        self.rows[r * self.width + self.width - 1]
    }

    fn flip_column(&mut self, j: usize) {
        let u = self.upper[j];
        for r in 0..self.m {
            let base = r * self.width;
            let coef = self.rows[base + j];
            if coef != 0.0 {
                self.rows[base + self.width - 1] -= coef * u;
                self.rows[base + j] = -coef;
            }
        }
        self.obj1 += self.cost1[j] * u;
        self.obj2 += self.cost2[j] * u;
        self.cost1[j] = -self.cost1[j];
        self.cost2[j] = -self.cost2[j];
        self.flipped[j] = !self.flipped[j];
    }

    fn flip_row(&mut self, r: usize) {
        let b = self.basic[r];
        let u = self.upper[b];
        let base = r * self.width;
        let rhs = self.rows[base + self.width - 1];
        self.rows[base + self.width - 1] = u - rhs;
        for c in 0..self.width - 1 {
            self.rows[base + c] = -self.rows[base + c];
        }
        // The basic column must stay a positive unit vector.
        self.rows[base + b] = 1.0;
        self.flipped[b] = !self.flipped[b];
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let base = r * self.width;
        let pv = self.rows[base + j];
        let inv = 1.0 / pv;
        for c in 0..self.width {
            self.rows[base + c] *= inv;
        }
        self.rows[base + j] = 1.0;
        for rr in 0..self.m {
            if rr == r {
                continue;
            }
            let factor = self.rows[rr * self.width + j];
            if factor == 0.0 {
                continue;
            }
            let (head, tail) = self.rows.split_at_mut(base.max(rr * self.width));
            let (pivot_row, target) = if rr * self.width > base {
                (&head[base..base + self.width], &mut tail[..self.width])
            } else {
                (&tail[..self.width], &mut head[rr * self.width..rr * self.width + self.width])
            };
            for c in 0..self.width {
                target[c] -= factor * pivot_row[c];
            }
            self.rows[rr * self.width + j] = 0.0;
        }
        let pivot_row: Vec<f64> = self.rows[base..base + self.width].to_vec();
        for (cost, obj) in [
            (&mut self.cost1, &mut self.obj1),
            (&mut self.cost2, &mut self.obj2),
        ] {
            let factor = cost[j];
            if factor != 0.0 {
                for c in 0..self.width - 1 {
                    cost[c] -= factor * pivot_row[c];
                }
                cost[j] = 0.0;
                *obj += factor * pivot_row[self.width - 1];
            }
        }
        self.in_basis[self.basic[r]] = false;
        self.in_basis[j] = true;
        self.basic[r] = j;
    }

    /// One simplex step against the given cost row. Returns false when the
    /// current basis is optimal for that objective.
    fn step(&mut self, phase_one: bool) -> Result<bool> {
        let limit = if phase_one {
            self.width - 1
        } else {
            self.artificial_start
        };
        let cost = if phase_one { &self.cost1 } else { &self.cost2 };

        let mut entering = None;
        if self.bland {
            for j in 0..limit {
                if !self.in_basis[j] && cost[j] > EPS {
                    entering = Some(j);
                    break;
                }
            }
        } else {
            let mut best = EPS;
            for j in 0..limit {
                if !self.in_basis[j] && cost[j] > best {
                    best = cost[j];
                    entering = Some(j);
                }
            }
        }
        let Some(j) = entering else {
            return Ok(false);
        };

        // Ratio test: the entering variable rises by t from zero.
        let mut t_best = self.upper[j];
        let mut leaving: Option<(usize, bool)> = None; // (row, exits_at_upper)
        for r in 0..self.m {
            let y = self.at(r, j);
            if y > EPS {
                let lim = self.rhs(r).max(0.0) / y;
                if lim < t_best - 1e-12 {
                    t_best = lim;
                    leaving = Some((r, false));
                } else if lim < t_best + 1e-12 {
                    if let Some((cur, _)) = leaving {
                        let better = if self.bland {
                            self.basic[r] < self.basic[cur]
                        } else {
                            y.abs() > self.at(cur, j).abs()
                        };
                        if better {
                            leaving = Some((r, false));
                        }
                    } else if lim < t_best {
                        t_best = lim;
                        leaving = Some((r, false));
                    }
                }
            } else if y < -EPS && self.upper[self.basic[r]].is_finite() {
                let room = self.upper[self.basic[r]] - self.rhs(r);
                let lim = room.max(0.0) / (-y);
                if lim < t_best - 1e-12 {
                    t_best = lim;
                    leaving = Some((r, true));
                } else if lim < t_best + 1e-12 {
                    if let Some((cur, _)) = leaving {
                        let better = if self.bland {
                            self.basic[r] < self.basic[cur]
                        } else {
                            y.abs() > self.at(cur, j).abs()
                        };
                        if better {
                            leaving = Some((r, true));
                        }
                    } else if lim < t_best {
                        t_best = lim;
                        leaving = Some((r, true));
                    }
                }
            }
        }

        if t_best.is_infinite() && leaving.is_none() {
            return Err(Error::NumericalInstability(
                "unbounded direction in a box-constrained program".into(),
            ));
        }

        let gain = if phase_one { self.cost1[j] } else { self.cost2[j] } * t_best;
        match leaving {
            None => self.flip_column(j),
            Some((r, exits_upper)) => {
                if exits_upper {
                    self.flip_row(r);
                }
                self.pivot(r, j);
            }
        }

        self.iterations += 1;
        if gain <= 1e-12 {
            self.stall += 1;
            if self.stall > STALL_LIMIT && !self.bland {
                self.bland = true;
            }
        } else {
            self.stall = 0;
        }
        if self.iterations % 1024 == 0 {
            let worst = self.rows.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
            if worst > MAGNITUDE_GUARD {
                return Err(Error::NumericalInstability(format!(
                    "tableau entries reached magnitude {worst:.3e}; rescale the instance"
                )));
            }
        }
        if self.iterations > MAX_ITERS {
            return Err(Error::NumericalInstability(format!(
                "simplex did not converge within {MAX_ITERS} pivots"
            )));
        }
        Ok(true)
    }
}

pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    let n = lp.n_vars;
    let m = lp.rows.len();

    // Normalize to `<=`, then flip rows with negative rhs so the initial
    // basis (slacks, artificials where needed) is feasible at x = 0.
    let mut needs_artificial = Vec::new();
    let mut norm_rows: Vec<(Vec<(usize, f64)>, f64)> = Vec::with_capacity(m);
    for (terms, sense, rhs) in &lp.rows {
        let (mut terms, mut rhs) = match sense {
            Sense::Le => (terms.clone(), *rhs),
            Sense::Ge => (
                terms.iter().map(|&(k, v)| (k, -v)).collect::<Vec<_>>(),
                -*rhs,
            ),
        };
        let flip = rhs < 0.0;
        if flip {
            for t in &mut terms {
                t.1 = -t.1;
            }
            rhs = -rhs;
        }
        needs_artificial.push(flip);
        norm_rows.push((terms, rhs));
    }

    let n_art = needs_artificial.iter().filter(|&&f| f).count();
    let slack_start = n;
    let artificial_start = n + m;
    let width = n + m + n_art + 1;

    let mut tab = Tableau {
        m,
        width,
        rows: vec![0.0; m * width],
        cost1: vec![0.0; width - 1],
        cost2: vec![0.0; width - 1],
        obj1: 0.0,
        obj2: 0.0,
        upper: vec![f64::INFINITY; width - 1],
        flipped: vec![false; width - 1],
        basic: vec![0; m],
        in_basis: vec![false; width - 1],
        artificial_start,
        iterations: 0,
        bland: false,
        stall: 0,
    };
    tab.upper[..n].copy_from_slice(&lp.upper);
    tab.cost2[..n].copy_from_slice(&lp.objective);

    let mut next_art = artificial_start;
    for (r, (terms, rhs)) in norm_rows.iter().enumerate() {
        let base = r * width;
        for &(k, v) in terms {
            tab.rows[base + k] += v;
        }
        // Slack carries the sign of the original row after normalization.
        tab.rows[base + slack_start + r] = if needs_artificial[r] { -1.0 } else { 1.0 };
        tab.rows[base + width - 1] = *rhs;
        if needs_artificial[r] {
            tab.rows[base + next_art] = 1.0;
            tab.basic[r] = next_art;
            tab.in_basis[next_art] = true;
            next_art += 1;
        } else {
            tab.basic[r] = slack_start + r;
            tab.in_basis[slack_start + r] = true;
        }
    }

    // Phase 1: maximize -(sum of artificials). The cost row starts as the sum
    // of the artificial rows so that basic artificials price to zero.
    if n_art > 0 {
        for r in 0..m {
            if needs_artificial[r] {
                let base = r * width;
                for c in 0..width - 1 {
                    tab.cost1[c] += tab.rows[base + c];
                }
                tab.cost1[tab.basic[r]] = 0.0;
                tab.obj1 -= tab.rhs(r);
            }
        }
        // Artificial columns themselves must not re-enter with positive price.
        for j in artificial_start..width - 1 {
            tab.cost1[j] = 0.0;
        }
        while tab.step(true)? {}
        if tab.obj1 < -FEAS_TOL {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                objective: 0.0,
                x: vec![0.0; n],
                iterations: tab.iterations,
            });
        }
        // Drive any leftover basic artificials out on a nonzero column; rows
        // that cannot pivot are redundant and keep their artificial at zero.
        for r in 0..m {
            if tab.basic[r] >= artificial_start {
                if let Some(j) = (0..artificial_start)
                    .find(|&j| !tab.in_basis[j] && tab.at(r, j).abs() > FEAS_TOL)
                {
                    tab.pivot(r, j);
                    tab.iterations += 1;
                }
            }
        }
    }

    tab.bland = false;
    tab.stall = 0;
    while tab.step(false)? {}

    // Extract structural values, undoing the flip substitution.
    let mut x = vec![0.0; n];
    for (r, &b) in tab.basic.iter().enumerate() {
        if b < n {
            x[b] = tab.rhs(r);
        }
    }
    for k in 0..n {
        if tab.flipped[k] {
            x[k] = tab.upper[k] - x[k];
        }
        if x[k].abs() < 1e-11 {
            x[k] = 0.0;
        }
        x[k] = x[k].min(lp.upper[k]);
    }
    // Recompute the objective from the extracted point rather than trusting
    // the incrementally updated scalar.
    let objective = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective,
        x,
        iterations: tab.iterations,
    })
}

/// Largest violation of the program's rows and bounds at `x`.
#[cfg(test)]
pub fn max_violation(lp: &LinearProgram, x: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for (k, &v) in x.iter().enumerate() {
        worst = worst.max(-v).max(v - lp.upper[k]);
    }
    for (terms, sense, rhs) in &lp.rows {
        let lhs: f64 = terms.iter().map(|&(k, c)| c * x[k]).sum();
        let gap = match sense {
            Sense::Le => lhs - rhs,
            Sense::Ge => rhs - lhs,
        };
        worst = worst.max(gap);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lp(
        objective: Vec<f64>,
        upper: Vec<f64>,
        rows: Vec<(Vec<(usize, f64)>, Sense, f64)>,
    ) -> LinearProgram {
        LinearProgram {
            n_vars: objective.len(),
            objective,
            upper,
            rows,
        }
    }

    #[test]
    fn simple_box_lp() {
        let p = lp(
            vec![1.0, 1.0],
            vec![1.0, 1.0],
            vec![(vec![(0, 1.0), (1, 1.0)], Sense::Le, 1.0)],
        );
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 1.0).abs() < 1e-9);
        assert!(max_violation(&p, &s.x) < 1e-9);
    }

    #[test]
    fn bound_flip_is_exercised() {
        // Optimum pushes x to its upper bound without a row becoming tight.
        let p = lp(
            vec![2.0, 1.0],
            vec![0.5, 1.0],
            vec![(vec![(0, 1.0), (1, 1.0)], Sense::Le, 1.2)],
        );
        let s = solve(&p).unwrap();
        assert!((s.objective - 1.7).abs() < 1e-9);
        assert!((s.x[0] - 0.5).abs() < 1e-9);
        assert!((s.x[1] - 0.7).abs() < 1e-9);
    }

    #[test]
    fn ge_rows_need_phase_one() {
        let p = lp(
            vec![-1.0],
            vec![1.0],
            vec![(vec![(0, 1.0)], Sense::Ge, 0.3)],
        );
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 0.3).abs() < 1e-9);
    }

    #[test]
    fn infeasible_detected() {
        let p = lp(
            vec![1.0],
            vec![1.0],
            vec![(vec![(0, 1.0)], Sense::Ge, 2.0)],
        );
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
    }

    #[test]
    fn degenerate_rows_do_not_cycle() {
        // Several tight rows through the origin.
        let p = lp(
            vec![3.0, 2.0, 1.0],
            vec![1.0, 1.0, 1.0],
            vec![
                (vec![(0, 1.0), (1, -1.0)], Sense::Le, 0.0),
                (vec![(1, 1.0), (2, -1.0)], Sense::Le, 0.0),
                (vec![(0, 1.0), (2, -1.0)], Sense::Le, 0.0),
                (vec![(0, 1.0), (1, 1.0), (2, 1.0)], Sense::Le, 1.5),
            ],
        );
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 3.0).abs() < 1e-9, "objective {}", s.objective);
        assert!(max_violation(&p, &s.x) < 1e-9);
    }

    #[test]
    fn equality_via_two_rows() {
        // x + y == 0.6 encoded as <= and >=, maximize x - y.
        let p = lp(
            vec![1.0, -1.0],
            vec![1.0, 1.0],
            vec![
                (vec![(0, 1.0), (1, 1.0)], Sense::Le, 0.6),
                (vec![(0, 1.0), (1, 1.0)], Sense::Ge, 0.6),
            ],
        );
        let s = solve(&p).unwrap();
        assert!((s.objective - 0.6).abs() < 1e-9);
        assert!((s.x[0] - 0.6).abs() < 1e-9);
    }

    fn random_feasible_lp(rng: &mut ChaCha8Rng) -> LinearProgram {
        let n = rng.gen_range(3..=8);
        let m = rng.gen_range(2..=8);
        let upper: Vec<f64> = (0..n).map(|_| 0.5 + 1.5 * rng.gen::<f64>()).collect();
        let objective: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        // An interior point guarantees feasibility of every generated row.
        let x0: Vec<f64> = upper.iter().map(|u| 0.5 * u * rng.gen::<f64>()).collect();
        let mut rows = Vec::new();
        for _ in 0..m {
            let mut terms: Vec<(usize, f64)> = Vec::new();
            for k in 0..n {
                if rng.gen::<f64>() < 0.7 {
                    terms.push((k, rng.gen::<f64>() * 2.0 - 1.0));
                }
            }
            if terms.is_empty() {
                continue;
            }
            let at_x0: f64 = terms.iter().map(|&(k, c)| c * x0[k]).sum();
            if rng.gen::<bool>() {
                rows.push((terms, Sense::Le, at_x0 + rng.gen::<f64>()));
            } else {
                rows.push((terms, Sense::Ge, at_x0 - rng.gen::<f64>()));
            }
        }
        LinearProgram {
            n_vars: n,
            objective,
            upper,
            rows,
        }
    }

    #[test]
    fn agrees_with_reference_solver_on_random_lps() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for trial in 0..60 {
            let p = random_feasible_lp(&mut rng);
            let mine = solve(&p).unwrap();
            assert_eq!(mine.status, LpStatus::Optimal, "trial {trial}");
            assert!(max_violation(&p, &mine.x) < 1e-7, "trial {trial}");

            let mut reference = minilp::Problem::new(minilp::OptimizationDirection::Maximize);
            let vars: Vec<_> = (0..p.n_vars)
                .map(|k| reference.add_var(p.objective[k], (0.0, p.upper[k])))
                .collect();
            for (terms, sense, rhs) in &p.rows {
                let expr: Vec<_> = terms.iter().map(|&(k, c)| (vars[k], c)).collect();
                let op = match sense {
                    Sense::Le => minilp::ComparisonOp::Le,
                    Sense::Ge => minilp::ComparisonOp::Ge,
                };
                reference.add_constraint(&expr, op, *rhs);
            }
            let ref_sol = reference.solve().expect("reference solver failed");
            assert!(
                (mine.objective - ref_sol.objective()).abs() < 1e-6,
                "trial {trial}: {} vs {}",
                mine.objective,
                ref_sol.objective()
            );
        }
    }
}
