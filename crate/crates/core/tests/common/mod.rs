//! Shared oracles for the integration suites: an LP-text parser feeding an
//! independent reference solver, and a brute-force vertex enumerator for tiny
//! programs.

use std::collections::HashMap;

/// A parsed LP-text document (maximization, `>=` rows, boxed variables).
pub struct ParsedLp {
    pub var_names: Vec<String>,
    pub objective: HashMap<String, f64>,
    pub rows: Vec<(Vec<(String, f64)>, f64)>,
    pub bounds: HashMap<String, (f64, f64)>,
}

/// Reference parser for the LP text emitted by `export_lp`.
pub fn parse_lp_text(text: &str) -> ParsedLp {
    #[derive(PartialEq)]
    enum Section {
        Preamble,
        Objective,
        Constraints,
        Bounds,
    }
    let mut section = Section::Preamble;
    let mut parsed = ParsedLp {
        var_names: Vec::new(),
        objective: HashMap::new(),
        rows: Vec::new(),
        bounds: HashMap::new(),
    };
    let mut seen = HashMap::new();
    let mut note_var = |parsed: &mut ParsedLp, name: &str| {
        if !seen.contains_key(name) {
            seen.insert(name.to_string(), ());
            parsed.var_names.push(name.to_string());
        }
    };

    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('\\') {
            continue;
        }
        match line {
            "Maximize" => {
                section = Section::Objective;
                continue;
            }
            "Subject To" => {
                section = Section::Constraints;
                continue;
            }
            "Bounds" => {
                section = Section::Bounds;
                continue;
            }
            "End" => break,
            _ => {}
        }
        match section {
            Section::Objective => {
                let expr = line.split_once(':').expect("objective label").1;
                for (name, coef) in parse_terms(expr) {
                    note_var(&mut parsed, &name);
                    *parsed.objective.entry(name).or_insert(0.0) += coef;
                }
            }
            Section::Constraints => {
                let (_, rest) = line.split_once(':').expect("constraint label");
                let (expr, rhs) = rest.split_once(">=").expect("ge row");
                let terms = parse_terms(expr);
                for (name, _) in &terms {
                    note_var(&mut parsed, name);
                }
                parsed
                    .rows
                    .push((terms, rhs.trim().parse().expect("numeric rhs")));
            }
            Section::Bounds => {
                let parts: Vec<&str> = line.split("<=").map(str::trim).collect();
                assert_eq!(parts.len(), 3, "bounds line `{line}`");
                let lo: f64 = parts[0].parse().expect("numeric lower bound");
                let hi: f64 = parts[2].parse().expect("numeric upper bound");
                note_var(&mut parsed, parts[1]);
                parsed.bounds.insert(parts[1].to_string(), (lo, hi));
            }
            Section::Preamble => panic!("unexpected line before a section: {line}"),
        }
    }
    parsed
}

fn parse_terms(expr: &str) -> Vec<(String, f64)> {
    let mut terms = Vec::new();
    let mut sign = 1.0;
    let mut coef: Option<f64> = None;
    for token in expr.split_whitespace() {
        match token {
            "+" => sign = 1.0,
            "-" => sign = -1.0,
            _ => {
                if let Ok(num) = token.parse::<f64>() {
                    coef = Some(num);
                } else {
                    terms.push((token.to_string(), sign * coef.take().unwrap_or(1.0)));
                    sign = 1.0;
                }
            }
        }
    }
    assert!(coef.is_none(), "dangling coefficient in `{expr}`");
    terms
}

/// Solve a parsed LP with the reference solver; returns the optimum.
pub fn solve_parsed_with_reference(parsed: &ParsedLp) -> f64 {
    let mut problem = minilp::Problem::new(minilp::OptimizationDirection::Maximize);
    let mut vars = HashMap::new();
    for name in &parsed.var_names {
        let (lo, hi) = parsed.bounds.get(name).copied().unwrap_or((0.0, 1.0));
        let obj = parsed.objective.get(name).copied().unwrap_or(0.0);
        vars.insert(name.clone(), problem.add_var(obj, (lo, hi)));
    }
    for (terms, rhs) in &parsed.rows {
        let expr: Vec<_> = terms.iter().map(|(n, c)| (vars[n], *c)).collect();
        problem.add_constraint(&expr, minilp::ComparisonOp::Ge, *rhs);
    }
    problem
        .solve()
        .expect("reference solver found the parsed program infeasible")
        .objective()
}

/// Brute-force vertex enumeration for tiny programs: intersect every choice
/// of `n` active constraints (rows at equality or bounds), keep feasible
/// points, return the best objective. Exponential; callers keep `n <= 6`.
pub fn vertex_enumeration_optimum(
    objective: &[f64],
    rows: &[(Vec<(usize, f64)>, f64)], // each row: terms >= rhs
    lower: &[f64],
    upper: &[f64],
) -> f64 {
    let n = objective.len();
    assert!(n <= 6, "vertex enumeration is exponential");
    // Candidate active sets draw from: general rows, lower bounds, upper bounds.
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    for (terms, rhs) in rows {
        let mut dense = vec![0.0; n];
        for &(k, c) in terms {
            dense[k] += c;
        }
        planes.push((dense, *rhs));
    }
    for k in 0..n {
        let mut dense = vec![0.0; n];
        dense[k] = 1.0;
        planes.push((dense.clone(), lower[k]));
        planes.push((dense, upper[k]));
    }

    let feasible = |x: &[f64]| -> bool {
        for (k, &v) in x.iter().enumerate() {
            if v < lower[k] - 1e-7 || v > upper[k] + 1e-7 {
                return false;
            }
        }
        rows.iter().all(|(terms, rhs)| {
            terms.iter().map(|&(k, c)| c * x[k]).sum::<f64>() >= rhs - 1e-7
        })
    };

    let mut best = f64::NEG_INFINITY;
    let m = planes.len();
    let mut choice = vec![0usize; n];
    // Iterate over all n-subsets of planes.
    fn subsets(
        start: usize,
        depth: usize,
        n: usize,
        m: usize,
        choice: &mut Vec<usize>,
        visit: &mut impl FnMut(&[usize]),
    ) {
        if depth == n {
            visit(choice);
            return;
        }
        for i in start..m {
            choice[depth] = i;
            subsets(i + 1, depth + 1, n, m, choice, visit);
        }
    }
    let mut visit = |active: &[usize]| {
        // Solve the n x n system by Gaussian elimination.
        let mut a: Vec<Vec<f64>> = active.iter().map(|&i| planes[i].0.clone()).collect();
        let mut b: Vec<f64> = active.iter().map(|&i| planes[i].1).collect();
        for col in 0..n {
            let piv = (col..n).max_by(|&r1, &r2| {
                a[r1][col].abs().partial_cmp(&a[r2][col].abs()).unwrap()
            });
            let piv = piv.unwrap();
            if a[piv][col].abs() < 1e-10 {
                return; // singular active set
            }
            a.swap(col, piv);
            b.swap(col, piv);
            let d = a[col][col];
            for r in 0..n {
                if r != col && a[r][col] != 0.0 {
                    let factor = a[r][col] / d;
                    for c2 in 0..n {
                        a[r][c2] -= factor * a[col][c2];
                    }
                    b[r] -= factor * b[col];
                }
            }
        }
        let x: Vec<f64> = (0..n).map(|k| b[k] / a[k][k]).collect();
        if feasible(&x) {
            let val: f64 = objective.iter().zip(&x).map(|(c, v)| c * v).sum();
            if val > best {
                best = val;
            }
        }
    };
    subsets(0, 0, n, m, &mut choice, &mut visit);
    best
}
