//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use rug::{Integer, Rational};

/// Row echelon form; returns the pivot columns.
fn echelon(rows: &mut [Vec<Rational>]) -> Vec<usize> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, p);
        let lead = rows[r][c].clone();
        for v in rows[r].iter_mut() {
            *v /= &lead;
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let f = rows[i][c].clone();
                let pivot_row = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                    *x -= Rational::from(&f * y);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    echelon(&mut rows.to_vec()).len()
}

/// Some solution of `Mx = rhs` (free variables zero), if consistent.
pub fn solve_any(m: &[Vec<Rational>], rhs: &[Rational], cols: usize) -> Option<Vec<Rational>> {
    let mut aug: Vec<Vec<Rational>> = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| row.iter().cloned().chain([b.clone()]).collect())
        .collect();
    let pivots = echelon(&mut aug);
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![Rational::new(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = aug[i][cols].clone();
    }
    Some(x)
}

pub fn q(v: &Integer) -> Rational {
    Rational::from(v)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Optimal(Rational),
    Infeasible,
    Unbounded,
}

/// `min cᵀx` s.t. `Ax ≥ b` by enumerating square subsystems.
///
/// Primal: every nonempty `{Ax ≥ b}` has a minimal face `{A_S x = b_S}`
/// with `rank A_S = rank A`, so the basic points decide feasibility and,
/// when bounded, the optimum. Dual `{Aᵀy = c, y ≥ 0}` is in standard form,
/// so its basic solutions decide boundedness.
pub fn lp_oracle(a: &[Vec<i64>], b: &[i64], c: &[i64]) -> Verdict {
    let m = a.len();
    let n = c.len();
    let rows: Vec<Vec<Rational>> = a.iter().map(|r| r.iter().map(|&v| Rational::from(v)).collect()).collect();
    let bq: Vec<Rational> = b.iter().map(|&v| Rational::from(v)).collect();
    let cq: Vec<Rational> = c.iter().map(|&v| Rational::from(v)).collect();
    let r = rank(&rows);

    let feasible = |x: &[Rational]| {
        rows.iter()
            .zip(&bq)
            .all(|(row, bi)| row.iter().zip(x).fold(Rational::new(), |acc, (p, q)| acc + Rational::from(p * q)) >= *bi)
    };
    let objective = |x: &[Rational]| cq.iter().zip(x).fold(Rational::new(), |acc, (p, q)| acc + Rational::from(p * q));

    let mut best: Option<Rational> = None;
    let mut any_feasible = false;
    for s in subsets(m, r) {
        let sub: Vec<Vec<Rational>> = s.iter().map(|&i| rows[i].clone()).collect();
        if rank(&sub) != r {
            continue;
        }
        let rhs: Vec<Rational> = s.iter().map(|&i| bq[i].clone()).collect();
        let x = solve_any(&sub, &rhs, n).expect("full row rank system is consistent");
        if feasible(&x) {
            any_feasible = true;
            let val = objective(&x);
            if best.as_ref().is_none_or(|b| val < *b) {
                best = Some(val);
            }
        }
    }
    if !any_feasible {
        return Verdict::Infeasible;
    }

    // Dual basic solutions: columns T of Aᵀ (rows of A), |T| = rank.
    let at: Vec<Vec<Rational>> = (0..n).map(|j| rows.iter().map(|row| row[j].clone()).collect()).collect();
    let mut dual_best: Option<Rational> = None;
    for t in subsets(m, r) {
        let sub: Vec<Vec<Rational>> = at.iter().map(|row| t.iter().map(|&i| row[i].clone()).collect()).collect();
        if rank(&sub) != r {
            continue;
        }
        let Some(y) = solve_any(&sub, &cq, t.len()) else {
            continue;
        };
        if y.iter().any(|v| *v < 0) {
            continue;
        }
        let val = t.iter().zip(&y).fold(Rational::new(), |acc, (&i, yi)| acc + Rational::from(&bq[i] * yi));
        if dual_best.as_ref().is_none_or(|d| val > *d) {
            dual_best = Some(val);
        }
    }
    match dual_best {
        None => Verdict::Unbounded,
        Some(d) => {
            let p = best.expect("feasible");
            assert_eq!(p, d, "oracle: strong duality violated");
            Verdict::Optimal(p)
        }
    }
}

/// `¼ − ln(5/4)`, computed independently of the library constant.
pub fn delta() -> f64 {
    0.25 - (1.25f64).ln()
}
