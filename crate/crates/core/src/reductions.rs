//! From strict homogeneous feasibility to full linear programming.
//!
//! Each layer is an integer construction around the layer below:
//!
//! | function                      | solves                         |
//! |-------------------------------|--------------------------------|
//! | [`solve_strict_homogeneous`]  | `Ax > 0`                       |
//! | [`solve_strict`]              | `Ax > b`                       |
//! | [`solve_weak`]                | `Ax ≥ b`                       |
//! | [`feasibility_certificate`]   | `Ax ≥ b` or a Farkas witness   |
//! | [`solve_lp`]                  | `min cᵀx` s.t. `Ax ≥ b`        |
//!
//! The first three assume feasibility; the last two do not.

use std::cmp::Ordering;

use rug::{Integer, Rational};

use crate::arith::{dot_int_rational, null_space, rank, IntMatrix, Matrix, Mode, QMatrix};
use crate::error::{Error, Result};
use crate::instance::{format_rational, verify_matrix, Lp, Relation};
use crate::newton::{solve_feasibility, QPolicy, SolveReport, SolveStatus, SolverConfig};
use crate::potential::{NormalizedInstance, Origin};

/// Solver settings used by the reduction chain: adaptive grid starting from
/// an Ω bound of 1.
pub fn chain_config(mode: Mode) -> SolverConfig {
    SolverConfig::new(mode, Rational::from(1)).with_q_policy(QPolicy::Adaptive { start: None })
}

/// Replaces each row `A_n` (with `s = A_n·A_n`) by the four rows
/// `(2A_n, ±1, ±2s)`, each of norm exactly `2s + 1`.
///
/// If `Ax ≥ 1` then `(x, 0, 0)` has margin at least `2/(2s+1)·A_n·x` on all
/// four rows, and any solution of the new system restricts to a solution of
/// `Ax > 0` on its first `N` coordinates.
pub fn normalize_rows(a: &IntMatrix) -> Result<NormalizedInstance> {
    let n = a.cols();
    let mut rows = Vec::with_capacity(4 * a.rows());
    let mut norms = Vec::with_capacity(4 * a.rows());
    for (m, row) in a.row_iter().enumerate() {
        let s = crate::arith::dot_int(row, row);
        if s.is_zero() {
            return Err(Error::ZeroRow { row: m });
        }
        let two_s = Integer::from(&s * 2u32);
        let rho = Integer::from(&two_s + 1u32);
        for (sign1, sign2) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            let mut r: Vec<Integer> = row.iter().map(|x| Integer::from(x * 2u32)).collect();
            r.push(Integer::from(sign1));
            r.push(if sign2 > 0 { two_s.clone() } else { Integer::from(-&two_s) });
            rows.push(r);
            norms.push(rho.clone());
        }
    }
    let rows = Matrix::from_rows(rows, n + 2)?;
    NormalizedInstance::with_origin(
        rows,
        norms,
        Origin::Lifted {
            original: a.clone(),
        },
    )
}

/// Drops the two normalization coordinates and checks `Ax > 0` exactly.
pub fn lift_solution(inst: &NormalizedInstance, chi: &[Rational]) -> Result<Vec<Rational>> {
    if chi.len() != inst.n() {
        return Err(Error::DimensionMismatch {
            expected: inst.n(),
            found: chi.len(),
        });
    }
    let x = inst.lift(chi);
    if !inst.verify_lifted(&x)?.ok {
        return Err(Error::LiftCheckFailed);
    }
    Ok(x)
}

/// Hadamard bound on every square subdeterminant: `⌈sqrt(P)⌉` where `P` is
/// the product of the `k = min(M, N)` largest squared row norms (or column
/// norms, whichever is smaller). Zero rows and columns count as norm 1.
pub fn hadamard_det_bound(a: &IntMatrix) -> Integer {
    let k = a.rows().min(a.cols());
    let top_product = |mut sq: Vec<Integer>| {
        sq.sort_unstable_by(|x, y| y.cmp(x));
        sq.into_iter()
            .take(k)
            .fold(Integer::from(1), |acc, x| acc * x.max(Integer::from(1)))
    };
    let rows = top_product(a.row_iter().map(|r| crate::arith::dot_int(r, r)).collect());
    let cols = top_product(
        (0..a.cols())
            .map(|j| (0..a.rows()).map(|i| Integer::from(a[(i, j)].square_ref())).sum())
            .collect(),
    );
    let p = rows.min(cols);
    let mut root = p.clone().sqrt();
    if Integer::from(root.square_ref()) < p {
        root += 1u32;
    }
    root
}

/// `N·2^{2NB⌈log₂N⌉}`, an upper bound on Ω for `N` columns of bit length `B`.
pub fn omega_bound(n: usize, b: u32) -> Integer {
    assert!(n >= 1, "omega_bound needs at least one column");
    let ceil_log2 = usize::BITS - (n - 1).leading_zeros();
    let exp = 2 * n as u64 * u64::from(b) * u64::from(ceil_log2);
    Integer::from(n) << (exp as u32)
}

fn require_solved(report: SolveReport) -> Result<SolveReport> {
    match report.status {
        SolveStatus::Solved => Ok(report),
        SolveStatus::StepBudgetExceeded => Err(Error::StepBudgetExceeded {
            steps: report.steps_total,
        }),
        SolveStatus::NumericFailure => Err(Error::NumericFailure),
    }
}

/// `x` with `Ax > 0`, via normalization and the Newton solver.
///
/// The returned report is always solved; its `x` passed the exact check
/// against `a`.
pub fn solve_strict_homogeneous(a: &IntMatrix, config: &SolverConfig) -> Result<SolveReport> {
    let inst = normalize_rows(a)?;
    let report = require_solved(solve_feasibility(&inst, config)?)?;
    let chi = report.normalized_x.as_ref().expect("solved report carries x");
    lift_solution(&inst, chi)?;
    Ok(report)
}

fn check_rhs(a: &IntMatrix, b: &[Integer]) -> Result<()> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: b.len(),
        });
    }
    Ok(())
}

/// `x` with `Ax > b`: solves `[A | −b]·(z, t) > 0`, `t > 0` and returns `z/t`.
pub fn solve_strict(a: &IntMatrix, b: &[Integer], config: &SolverConfig) -> Result<Vec<Rational>> {
    check_rhs(a, b)?;
    let n = a.cols();
    let mut rows: Vec<Vec<Integer>> = a
        .row_iter()
        .zip(b)
        .map(|(row, bm)| {
            let mut r = row.to_vec();
            r.push(Integer::from(-bm));
            r
        })
        .collect();
    let mut last = vec![Integer::new(); n + 1];
    last[n] = Integer::from(1);
    rows.push(last);
    let report = solve_strict_homogeneous(&Matrix::from_rows(rows, n + 1)?, config)?;
    let zt = report.x.expect("solved report carries x");
    let t = &zt[n];
    let x: Vec<Rational> = zt[..n].iter().map(|z| Rational::from(z / t)).collect();
    if !verify_matrix(a, &x, Relation::Strict, Some(b))?.ok {
        return Err(Error::InternalInconsistency("dehomogenized point fails Ax > b".into()));
    }
    Ok(x)
}

/// `[A | 1]`: the matrix of `Az + τ1 ≥ b`.
fn with_slack_column(a: &IntMatrix) -> IntMatrix {
    Matrix::from_fn(a.rows(), a.cols() + 1, |i, j| {
        if j < a.cols() {
            a[(i, j)].clone()
        } else {
            Integer::from(1)
        }
    })
}

/// `x` with `Ax ≥ b`.
///
/// Solves `Az + t1 > b` with `0 < t < 1/D`, `D` bounding the subdeterminants
/// of `[A | 1]`, then lowers `t` to zero by [`purify_min_t`].
pub fn solve_weak(a: &IntMatrix, b: &[Integer], config: &SolverConfig) -> Result<Vec<Rational>> {
    check_rhs(a, b)?;
    let n = a.cols();
    let slack = with_slack_column(a);
    let d = hadamard_det_bound(&slack);
    let mut rows: Vec<Vec<Integer>> = slack.row_iter().map(<[Integer]>::to_vec).collect();
    let mut rhs = b.to_vec();
    let mut t_pos = vec![Integer::new(); n + 1];
    t_pos[n] = Integer::from(1);
    rows.push(t_pos);
    rhs.push(Integer::new());
    let mut t_small = vec![Integer::new(); n + 1];
    t_small[n] = Integer::from(-&d);
    rows.push(t_small);
    rhs.push(Integer::from(-1));
    // The slack row caps the margin near 1/D, so the dual optimum grows like
    // D; an adaptive grid starts from Ω = D² instead of stalling first.
    let mut inner = config.clone();
    if matches!(inner.q_policy, QPolicy::Adaptive { .. }) {
        let d2 = Rational::from(d.square_ref());
        if d2 > inner.omega_bound {
            inner.omega_bound = d2;
        }
    }
    let zt = solve_strict(&Matrix::from_rows(rows, n + 1)?, &rhs, &inner)?;
    let (x, t) = purify_min_t(a, b, &zt[..n], &zt[n])?;
    debug_assert!(t.is_zero());
    if !verify_matrix(a, &x, Relation::Weak, Some(b))?.ok {
        return Err(Error::InternalInconsistency("purified point fails Ax ≥ b".into()));
    }
    Ok(x)
}

/// Moves `(x, t)` within `{(z, τ) : Az + τ1 ≥ b, τ ≥ 0}` without increasing
/// `τ`, until `τ = 0` and the active rows have full rank (a vertex), or no
/// blocked null-space direction remains.
///
/// Each iteration takes a basis vector of the null space of the active rows:
/// the first one that moves `τ` (oriented to decrease it) while `τ > 0`,
/// otherwise the first one along which some inactive row blocks the ray.
/// The step stops at the nearest newly tight row. Fails with
/// [`Error::PurificationFailed`] when the walk ends with `τ > 0`.
pub fn purify_min_t(
    a: &IntMatrix,
    b: &[Integer],
    x: &[Rational],
    t: &Rational,
) -> Result<(Vec<Rational>, Rational)> {
    check_rhs(a, b)?;
    let n = a.cols();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.len(),
        });
    }
    let mut system = with_slack_column(a);
    let mut rhs = b.to_vec();
    {
        let mut rows: Vec<Vec<Integer>> = system.row_iter().map(<[Integer]>::to_vec).collect();
        let mut last = vec![Integer::new(); n + 1];
        last[n] = Integer::from(1);
        rows.push(last);
        rhs.push(Integer::new());
        system = Matrix::from_rows(rows, n + 1)?;
    }
    let mut w: Vec<Rational> = x.to_vec();
    w.push(t.clone());
    let slacks = |w: &[Rational]| -> Vec<Rational> {
        system
            .row_iter()
            .zip(&rhs)
            .map(|(row, r)| dot_int_rational(row, w) - r)
            .collect()
    };
    if slacks(&w).iter().any(|s| s.cmp0() == Ordering::Less) {
        return Err(Error::InvalidConfig("purification start point is infeasible".into()));
    }
    for _ in 0..=n + 1 {
        let s = slacks(&w);
        let active: Vec<usize> = (0..s.len()).filter(|&i| s[i].is_zero()).collect();
        let active_rows: QMatrix = Matrix::from_fn(active.len(), n + 1, |i, j| {
            Rational::from(&system[(active[i], j)])
        });
        let basis = if active.is_empty() {
            (0..=n)
                .map(|k| (0..=n).map(|j| Rational::from((j == k) as u32)).collect())
                .collect()
        } else {
            if rank(&active_rows) == n + 1 {
                break;
            }
            null_space(&active_rows)
        };
        // Ratio test along u: returns the step length to the nearest
        // blocking row, if any.
        let ratio = |u: &[Rational]| -> Option<Rational> {
            let mut best: Option<Rational> = None;
            for (i, row) in system.row_iter().enumerate() {
                if s[i].is_zero() {
                    continue;
                }
                let rate = dot_int_rational(row, u);
                if rate.cmp0() == Ordering::Less {
                    let step = Rational::from(&s[i] / &rate).abs();
                    if best.as_ref().is_none_or(|cur| step < *cur) {
                        best = Some(step);
                    }
                }
            }
            best
        };
        let tau_positive = w[n].cmp0() == Ordering::Greater;
        let mut choice: Option<(Vec<Rational>, Rational)> = None;
        if tau_positive {
            if let Some(u) = basis.iter().find(|u| !u[n].is_zero()) {
                let u: Vec<Rational> = if u[n].cmp0() == Ordering::Greater {
                    u.iter().map(|x| Rational::from(-x)).collect()
                } else {
                    u.clone()
                };
                let step = ratio(&u).ok_or(Error::UnboundedRay)?;
                choice = Some((u, step));
            }
        }
        if choice.is_none() {
            'search: for u in &basis {
                let neg: Vec<Rational> = u.iter().map(|x| Rational::from(-x)).collect();
                for dir in [u.clone(), neg] {
                    if let Some(step) = ratio(&dir) {
                        choice = Some((dir, step));
                        break 'search;
                    }
                }
            }
        }
        let Some((u, step)) = choice else {
            break;
        };
        for (wi, ui) in w.iter_mut().zip(&u) {
            *wi += Rational::from(ui * &step);
        }
    }
    let tau = w.pop().expect("slack coordinate");
    if !tau.is_zero() {
        return Err(Error::PurificationFailed {
            slack: format_rational(&tau),
        });
    }
    Ok((w, tau))
}

/// Outcome of [`feasibility_certificate`] and [`solve_lp`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// A feasible (for LPs: optimal) point, with the optimal dual for LPs.
    Solution {
        x: Vec<Rational>,
        dual: Option<Vec<Rational>>,
    },
    /// `y ≥ 0` with `Aᵀy = 0` and `bᵀy > 0`. `min_slack` is the least `t`
    /// making `Az + t1 ≥ b` feasible.
    Infeasible {
        farkas: Vec<Rational>,
        min_slack: Rational,
    },
    /// A feasible point and a ray `d` with `Ad ≥ 0`, `cᵀd < 0`.
    Unbounded {
        point: Vec<Rational>,
        ray: Vec<Rational>,
    },
}

fn transpose_times(a: &IntMatrix, y: &[Rational]) -> Vec<Rational> {
    (0..a.cols())
        .map(|j| {
            let mut acc = Rational::new();
            for (i, yi) in y.iter().enumerate() {
                if !a[(i, j)].is_zero() {
                    acc += Rational::from(&a[(i, j)] * yi);
                }
            }
            acc
        })
        .collect()
}

fn dot_ints(c: &[Integer], x: &[Rational]) -> Rational {
    dot_int_rational(c, x)
}

impl Certificate {
    /// Exact check of the certificate against `lp`.
    pub fn verify(&self, lp: &Lp) -> bool {
        let a = &lp.a;
        let nonneg = |v: &[Rational]| v.iter().all(|x| x.cmp0() != Ordering::Less);
        let feasible = |x: &[Rational]| {
            x.len() == a.cols()
                && verify_matrix(a, x, Relation::Weak, Some(&lp.b)).is_ok_and(|v| v.ok)
        };
        match self {
            Certificate::Solution { x, dual } => {
                if !feasible(x) {
                    return false;
                }
                match (dual, &lp.c) {
                    (None, _) => true,
                    (Some(_), None) => false,
                    (Some(y), Some(c)) => {
                        y.len() == a.rows()
                            && nonneg(y)
                            && transpose_times(a, y).iter().zip(c).all(|(l, r)| l == r)
                            && dot_ints(c, x) == dot_ints(&lp.b, y)
                    }
                }
            }
            Certificate::Infeasible { farkas, min_slack } => {
                farkas.len() == a.rows()
                    && nonneg(farkas)
                    && transpose_times(a, farkas).iter().all(|v| v.is_zero())
                    && dot_ints(&lp.b, farkas).cmp0() == Ordering::Greater
                    && min_slack.cmp0() == Ordering::Greater
            }
            Certificate::Unbounded { point, ray } => {
                let Some(c) = &lp.c else { return false };
                feasible(point)
                    && ray.len() == a.cols()
                    && verify_matrix(a, ray, Relation::Weak, None).is_ok_and(|v| v.ok)
                    && dot_ints(c, ray).cmp0() == Ordering::Less
            }
        }
    }

    /// `cᵀx` of a solution.
    pub fn objective(&self, c: &[Integer]) -> Option<Rational> {
        match self {
            Certificate::Solution { x, .. } => Some(dot_ints(c, x)),
            _ => None,
        }
    }
}

/// Stacks integer blocks into one matrix; `None` entries are zero blocks.
struct Blocks {
    rows: Vec<Vec<Integer>>,
    rhs: Vec<Integer>,
    cols: usize,
}

impl Blocks {
    fn new(cols: usize) -> Self {
        Self {
            rows: Vec::new(),
            rhs: Vec::new(),
            cols,
        }
    }

    fn push(&mut self, row: Vec<Integer>, rhs: Integer) {
        debug_assert_eq!(row.len(), self.cols);
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    fn finish(self) -> Result<(IntMatrix, Vec<Integer>)> {
        Ok((Matrix::from_rows(self.rows, self.cols)?, self.rhs))
    }
}

/// Primal-dual optimality system of `min cᵀw` s.t. `Mw ≥ d` in the
/// variables `(w, y)`:
/// `Mw ≥ d`, `Mᵀy ≥ c`, `−Mᵀy ≥ −c`, `y ≥ 0`, `−cᵀw + dᵀy ≥ 0`.
fn optimality_system(m: &IntMatrix, d: &[Integer], c: &[Integer]) -> Result<(IntMatrix, Vec<Integer>)> {
    let (rows, cols) = (m.rows(), m.cols());
    let width = cols + rows;
    let zero = || vec![Integer::new(); width];
    let mut out = Blocks::new(width);
    for i in 0..rows {
        let mut r = zero();
        r[..cols].clone_from_slice(m.row(i));
        out.push(r, d[i].clone());
    }
    for sign in [1i32, -1] {
        for j in 0..cols {
            let mut r = zero();
            for i in 0..rows {
                r[cols + i] = Integer::from(&m[(i, j)] * sign);
            }
            out.push(r, Integer::from(&c[j] * sign));
        }
    }
    for i in 0..rows {
        let mut r = zero();
        r[cols + i] = Integer::from(1);
        out.push(r, Integer::new());
    }
    let mut r = zero();
    for j in 0..cols {
        r[j] = Integer::from(-&c[j]);
    }
    for i in 0..rows {
        r[cols + i] = d[i].clone();
    }
    out.push(r, Integer::new());
    out.finish()
}

/// Decides `Ax ≥ b` with no feasibility assumption.
///
/// Solves the optimality system of the always-feasible, bounded LP
/// `min t` s.t. `Az + t1 ≥ b`, `t ≥ 0`. A zero optimum yields a solution;
/// a positive one yields the optimal dual as a Farkas witness.
pub fn feasibility_certificate(a: &IntMatrix, b: &[Integer], config: &SolverConfig) -> Result<Certificate> {
    check_rhs(a, b)?;
    let (m, n) = (a.rows(), a.cols());
    let mut rows: Vec<Vec<Integer>> = with_slack_column(a).row_iter().map(<[Integer]>::to_vec).collect();
    let mut last = vec![Integer::new(); n + 1];
    last[n] = Integer::from(1);
    rows.push(last);
    let mt = Matrix::from_rows(rows, n + 1)?;
    let mut dt = b.to_vec();
    dt.push(Integer::new());
    let mut ct = vec![Integer::new(); n + 1];
    ct[n] = Integer::from(1);
    let (sys, rhs) = optimality_system(&mt, &dt, &ct)?;
    let sol = solve_weak(&sys, &rhs, config)?;
    let t = sol[n].clone();
    match t.cmp0() {
        Ordering::Equal => Ok(Certificate::Solution {
            x: sol[..n].to_vec(),
            dual: None,
        }),
        Ordering::Greater => {
            let farkas = sol[n + 1..n + 1 + m].to_vec();
            let cert = Certificate::Infeasible {
                farkas,
                min_slack: t,
            };
            let lp = Lp::new(a.clone(), b.to_vec(), None)?;
            if !cert.verify(&lp) {
                return Err(Error::InternalInconsistency("dual witness is not a Farkas certificate".into()));
            }
            Ok(cert)
        }
        Ordering::Less => Err(Error::InternalInconsistency("negative optimal slack".into())),
    }
}

/// Solves `min cᵀx` s.t. `Ax ≥ b`, returning an optimal primal-dual pair, a
/// Farkas witness of infeasibility, or an unbounded ray.
pub fn solve_lp(lp: &Lp, config: &SolverConfig) -> Result<Certificate> {
    let c = lp
        .c
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("LP has no objective".into()))?;
    let (a, b) = (&lp.a, &lp.b);
    let (m, n) = (a.rows(), a.cols());
    let primal = feasibility_certificate(a, b, config)?;
    let Certificate::Solution { x: point, .. } = primal else {
        return Ok(primal);
    };

    // Dual feasibility: Aᵀy ≥ c, −Aᵀy ≥ −c, y ≥ 0.
    let mut dual = Blocks::new(m);
    for sign in [1i32, -1] {
        for j in 0..n {
            dual.push(
                (0..m).map(|i| Integer::from(&a[(i, j)] * sign)).collect(),
                Integer::from(&c[j] * sign),
            );
        }
    }
    for i in 0..m {
        dual.push(
            (0..m).map(|k| Integer::from((k == i) as u32)).collect(),
            Integer::new(),
        );
    }
    let (dm, db) = dual.finish()?;
    if let Certificate::Infeasible { farkas, .. } = feasibility_certificate(&dm, &db, config)? {
        // farkas = (p, q, r) with Ap − Aq + r = 0 and cᵀ(p − q) > 0.
        let ray: Vec<Rational> = (0..n)
            .map(|j| Rational::from(&farkas[n + j] - &farkas[j]))
            .collect();
        let cert = Certificate::Unbounded { point, ray };
        if !cert.verify(lp) {
            return Err(Error::InternalInconsistency("dual witness does not give a ray".into()));
        }
        return Ok(cert);
    }

    let (sys, rhs) = optimality_system(a, b, c)?;
    let sol = solve_weak(&sys, &rhs, config)?;
    let cert = Certificate::Solution {
        x: sol[..n].to_vec(),
        dual: Some(sol[n..].to_vec()),
    };
    if !cert.verify(lp) {
        return Err(Error::InternalInconsistency("optimality system solution fails".into()));
    }
    Ok(cert)
}
