//! Damped Newton descent on the perceptron potential.
//!
//! Every iteration tests the residual sign, rescales the iterate downward when
//! `vᵀAAᵀv ≥ 4M̂`, takes one damped Newton step with step size
//! `θ = 1/(1+λ̂)`, and in exact mode ceils the result onto the grid `ℤ/Q`.
//! In exact mode `λ̂` is twice the power-of-two witness of `√(gᵀH⁻¹g)`, so no
//! irrational number is ever formed.

use std::cmp::Ordering;
use std::collections::VecDeque;
use std::time::Instant;

use rug::{Assign, Integer, Rational};
use serde::Serialize;

use crate::arith::{
    bareiss_solve_spd, ceil_grid_vector, ceil_to_grid, dot_f64, dot_int, floor_log2,
    isqrt_factor2_exponent, isqrt_factor2_f64, ln_rational, pow2, solve_spd_exact,
    solve_spd_float, GridVector, Matrix, Mode,
};
use crate::error::{Error, Result};
use crate::instance::Verification;
use crate::potential::NormalizedInstance;

/// Guaranteed phase-1 decrease of a damped Newton step, `1/4 − log(5/4)`.
pub const PHASE1_DECREMENT: f64 = 0.026_856_448_685_790_24;

/// Restarts allowed under [`QPolicy::Adaptive`].
pub const MAX_ADAPTIVE_RESTARTS: u32 = 8;

/// Recent exact iterates remembered for cycle detection.
const CYCLE_WINDOW: usize = 8;

/// A rational lower bound on [`PHASE1_DECREMENT`], used where grid sizes
/// must be certified without floating point.
pub fn decrement_lower_bound() -> Rational {
    Rational::from((2_685_644, 100_000_000))
}

/// How the exact-mode grid denominator `Q` is chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QPolicy {
    Fixed(Integer),
    /// [`choose_q`] from the configured Ω bound.
    FromOmega,
    /// Start at `start` (default [`choose_q`] of the configured Ω bound) and
    /// grow `Q` and the Ω bound each time an attempt cannot finish: double
    /// both when the step budget runs out, and when the exact iteration
    /// revisits an iterate, raise the Ω bound to at least what that iterate
    /// implies (see [`solve_feasibility`]).
    Adaptive { start: Option<Integer> },
}

/// Which linear system produces the Newton direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinearSolver {
    /// Low-rank in exact mode, direct in float mode.
    Auto,
    /// The `M̂×M̂` Hessian system.
    Direct,
    /// The `N̂×N̂` capacitance system `I + Aᵀdiag(v²)A` (Woodbury identity).
    LowRank,
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub mode: Mode,
    /// Upper bound on Ω of the normalized instance; at least 1.
    pub omega_bound: Rational,
    pub q_policy: QPolicy,
    /// Overrides the derived budget [`step_budget`].
    pub max_steps: Option<u64>,
    pub trace: bool,
    pub linear_solver: LinearSolver,
    /// Re-run in exact mode when a float run fails numerically or its
    /// answer does not survive the exact check.
    pub fallback_to_exact: bool,
}

impl SolverConfig {
    pub fn new(mode: Mode, omega_bound: Rational) -> Self {
        Self {
            mode,
            omega_bound,
            q_policy: QPolicy::FromOmega,
            max_steps: None,
            trace: false,
            linear_solver: LinearSolver::Auto,
            fallback_to_exact: true,
        }
    }

    pub fn with_q_policy(mut self, q_policy: QPolicy) -> Self {
        self.q_policy = q_policy;
        self
    }

    pub fn with_trace(mut self, trace: bool) -> Self {
        self.trace = trace;
        self
    }

    pub fn with_max_steps(mut self, max_steps: Option<u64>) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn with_linear_solver(mut self, linear_solver: LinearSolver) -> Self {
        self.linear_solver = linear_solver;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.omega_bound < 1 {
            return Err(Error::InvalidConfig("omega bound must be at least 1".into()));
        }
        match &self.q_policy {
            QPolicy::Fixed(q) if *q < 1 => {
                Err(Error::InvalidConfig("fixed grid Q must be at least 1".into()))
            }
            QPolicy::Adaptive { start: Some(q) } if *q < 2 => Err(Error::InvalidConfig(
                "adaptive start Q must be at least 2".into(),
            )),
            _ => Ok(()),
        }
    }

    fn use_low_rank(&self, mode: Mode) -> bool {
        match self.linear_solver {
            LinearSolver::Auto => mode == Mode::Exact,
            LinearSolver::Direct => false,
            LinearSolver::LowRank => true,
        }
    }
}

/// The dual iterate `v > 0`.
#[derive(Clone, Debug, PartialEq)]
pub enum DualIterate {
    Exact(GridVector),
    Float(Vec<f64>),
}

impl DualIterate {
    pub fn mode(&self) -> Mode {
        match self {
            DualIterate::Exact(_) => Mode::Exact,
            DualIterate::Float(_) => Mode::Float,
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            DualIterate::Exact(g) => g.to_f64(),
            DualIterate::Float(v) => v.clone(),
        }
    }

    pub fn as_grid(&self) -> Option<&GridVector> {
        match self {
            DualIterate::Exact(g) => Some(g),
            DualIterate::Float(_) => None,
        }
    }

    fn check_positive(&self) -> Result<()> {
        let bad = match self {
            DualIterate::Exact(g) => g.first_non_positive(),
            DualIterate::Float(v) => v.iter().position(|&x| !(x > 0.0)),
        };
        match bad {
            Some(index) => Err(Error::NonPositiveIterate { index }),
            None => Ok(()),
        }
    }
}

/// An exact rational or a float, depending on the run's mode.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Rational),
    Float(f64),
}

impl Scalar {
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64(),
            Scalar::Float(x) => *x,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Phase {
    /// `λ̂ ≥ 1/4`.
    One,
    Two,
}

#[derive(Clone, Debug)]
pub struct SolverState {
    pub v: DualIterate,
    pub step_index: u64,
    pub lambda_hat: Option<Scalar>,
    /// `λ² = gᵀH⁻¹g` of the last step.
    pub lambda_sq: Option<Scalar>,
    pub last_decrease: Option<f64>,
    pub phase: Option<Phase>,
}

impl SolverState {
    pub fn new(v: DualIterate) -> Self {
        Self {
            v,
            step_index: 0,
            lambda_hat: None,
            lambda_sq: None,
            last_decrease: None,
            phase: None,
        }
    }

    /// `v₀ = (1/M̂)·1`, ceiled onto the grid in exact mode.
    pub fn start(inst: &NormalizedInstance, mode: Mode, q: &Integer) -> Result<Self> {
        let m = inst.m();
        let v = match mode {
            Mode::Float => DualIterate::Float(vec![1.0 / m as f64; m]),
            Mode::Exact => {
                let uniform = vec![Rational::from((1, m as u64)); m];
                DualIterate::Exact(ceil_to_grid(&uniform, q)?)
            }
        };
        Ok(Self::new(v))
    }

    pub fn quad_form(&self, inst: &NormalizedInstance) -> Result<Scalar> {
        Ok(match &self.v {
            DualIterate::Exact(g) => Scalar::Exact(inst.quad_form(g)?),
            DualIterate::Float(v) => Scalar::Float(inst.quad_form_f64(v)?),
        })
    }

    /// `F(v)` as a float observation.
    pub fn observe_f(&self, inst: &NormalizedInstance) -> Result<f64> {
        match &self.v {
            DualIterate::Exact(g) => inst.eval_f_grid(g),
            DualIterate::Float(v) => inst.eval_f(v),
        }
    }
}

/// Smallest power of two `Q ≥ 16·M̂·√(M̂·Ω)/δ`.
///
/// The comparison is done on squares against a rational lower bound of `δ`,
/// so the result is certified without floating point.
pub fn choose_q(m_hat: usize, omega_bound: &Rational) -> Integer {
    let delta = decrement_lower_bound();
    let m = Rational::from(m_hat as u64);
    let target = Rational::from(256u32) * m.clone() * m.clone() * m * omega_bound
        / Rational::from(delta.square_ref());
    smallest_pow2_with_square_at_least(&target)
}

fn smallest_pow2_with_square_at_least(target: &Rational) -> Integer {
    if *target <= 1 {
        return Integer::from(1);
    }
    let e = floor_log2(target).expect("positive target");
    let mut k = (e / 2).max(0);
    while pow2(2 * k) < *target {
        k += 1;
    }
    Integer::from(1) << (k as u32)
}

/// `⌈4(M̂·ln M̂ + 1 + M̂·ln Ω)/δ⌉ + 16`.
pub fn step_budget(m_hat: usize, omega_bound: &Rational) -> u64 {
    let m = m_hat as f64;
    let gap = m * m.ln() + 1.0 + m * ln_rational(omega_bound).max(0.0);
    let steps = (4.0 * gap / PHASE1_DECREMENT).ceil();
    if steps >= u64::MAX as f64 {
        u64::MAX
    } else {
        steps as u64 + 16
    }
}

/// Newton direction `d = H⁻¹g` of an exact iterate, over a common
/// denominator, together with `λ² = gᵀd`.
#[derive(Clone, Debug)]
pub struct ExactDirection {
    pub d: GridVector,
    pub lambda_sq: Rational,
}

/// Newton direction through the `M̂×M̂` Hessian.
pub fn exact_direction_direct(inst: &NormalizedInstance, v: &GridVector) -> Result<ExactDirection> {
    let vr = v.to_rationals();
    let g = inst.grad(&vr)?;
    let h = inst.hess(&vr)?;
    let d = solve_spd_exact(&h, &g)?;
    let mut lambda_sq = Rational::new();
    for (gm, dm) in g.iter().zip(&d) {
        lambda_sq += Rational::from(gm * dm);
    }
    Ok(ExactDirection {
        d: GridVector::from_rationals(&d),
        lambda_sq,
    })
}

/// Newton direction through the `N̂×N̂` capacitance matrix.
///
/// With `v = n/c`, `L = lcm(ρ)` and `k_m = L/ρ_m`, everything below is an
/// integer: `X = Σ 𝒜_m n_m k_m`, `P_m = 𝒜_m·X`, `W_m = P_m n_m − c²Lρ_m`,
/// `K = c²L²·I + Σ (n_m k_m)² 𝒜_mᵀ𝒜_m`, `B = Σ 𝒜_m n_m W_m k_m²`. Solving
/// `K·Y = B` gives `d_m = n_m (det·W_m − n_m 𝒜_m·Y) k_m / (det·c³L²)`.
pub fn exact_direction_low_rank(
    inst: &NormalizedInstance,
    v: &GridVector,
) -> Result<ExactDirection> {
    if let Some(index) = v.first_non_positive() {
        return Err(Error::NonPositiveIterate { index });
    }
    let (m_hat, n_hat) = (inst.m(), inst.n());
    let rows = inst.rows();
    let c = &v.denominator;
    let l = inst.norm_lcm();
    let x = inst.scaled_image(v)?;
    let c2l = Integer::from(c.square_ref()) * l;
    let mut w = Vec::with_capacity(m_hat);
    for m in 0..m_hat {
        let p = dot_int(rows.row(m), &x);
        let mut wm = Integer::from(&p * &v.numerators[m]);
        wm -= &c2l * &inst.norms()[m];
        w.push(wm);
    }

    let cl = Integer::from(c * l);
    let diag = Integer::from(cl.square_ref());
    let mut k = Matrix::from_fn(n_hat, n_hat, |i, j| {
        if i == j {
            diag.clone()
        } else {
            Integer::new()
        }
    });
    let mut b = vec![Integer::new(); n_hat];
    let mut weight = Integer::new();
    let mut coef = Integer::new();
    let mut tmp = Integer::new();
    for m in 0..m_hat {
        let row = rows.row(m);
        let cof = &inst.cofactors()[m];
        weight.assign(&v.numerators[m] * cof);
        weight.square_mut();
        coef.assign(&v.numerators[m] * &w[m]);
        coef *= cof;
        coef *= cof;
        for i in 0..n_hat {
            if row[i].is_zero() {
                continue;
            }
            tmp.assign(&weight * &row[i]);
            for j in i..n_hat {
                if !row[j].is_zero() {
                    k[(i, j)] += &tmp * &row[j];
                }
            }
            b[i] += &coef * &row[i];
        }
    }
    let (y, det) = bareiss_solve_spd(k, b)?;

    let mut numerators = Vec::with_capacity(m_hat);
    let mut lambda_num = Integer::new();
    for m in 0..m_hat {
        let s = dot_int(rows.row(m), &y);
        let mut inner = Integer::from(&det * &w[m]);
        inner -= &v.numerators[m] * &s;
        let cof = &inst.cofactors()[m];
        let mut dm = Integer::from(&v.numerators[m] * &inner);
        dm *= cof;
        numerators.push(dm);
        tmp.assign(&w[m] * &inner);
        tmp *= cof;
        tmp *= cof;
        lambda_num += &tmp;
    }
    let c3 = Integer::from(c.square_ref()) * c;
    let l2 = Integer::from(l.square_ref());
    let d_den = Integer::from(&det * &c3) * &l2;
    let lambda_den = Integer::from(&d_den * c) * &l2;
    Ok(ExactDirection {
        d: GridVector::new(numerators, d_den)?,
        lambda_sq: Rational::from((lambda_num, lambda_den)),
    })
}

/// Float Newton direction and `λ² = gᵀd`.
pub fn float_direction(inst: &NormalizedInstance, v: &[f64], low_rank: bool) -> Result<(Vec<f64>, f64)> {
    let g = inst.grad_f64(v)?;
    let d = if low_rank {
        // d = D g − D A (I + AᵀDA)⁻¹ AᵀD g with D = diag(v²).
        let a = inst.unit_rows();
        let n_hat = inst.n();
        let mut k = Matrix::from_fn(n_hat, n_hat, |i, j| (i == j) as u8 as f64);
        let mut rhs = vec![0.0; n_hat];
        for (m, &vm) in v.iter().enumerate() {
            let row = a.row(m);
            let w = vm * vm;
            for i in 0..n_hat {
                for j in 0..n_hat {
                    k[(i, j)] += w * row[i] * row[j];
                }
                rhs[i] += w * g[m] * row[i];
            }
        }
        let y = solve_spd_float(&k, &rhs)?;
        v.iter()
            .enumerate()
            .map(|(m, &vm)| vm * vm * (g[m] - dot_f64(a.row(m), &y)))
            .collect()
    } else {
        solve_spd_float(&inst.hess_f64(v)?, &g)?
    };
    let lambda_sq = dot_f64(&g, &d);
    Ok((d, lambda_sq))
}

/// One damped Newton step `v' = v − θ·H⁻¹g`.
///
/// Float mode uses `θ = 1/(1+λ)`. Exact mode uses `θ = 1/(1+λ̂)` with
/// `λ̂ = 2·isqrt_factor2(λ²)`, so `λ ≤ λ̂ ≤ 2λ`.
pub fn damped_newton_step(
    inst: &NormalizedInstance,
    state: &SolverState,
    config: &SolverConfig,
) -> Result<SolverState> {
    state.v.check_positive()?;
    let low_rank = config.use_low_rank(state.v.mode());
    let (v, lambda_hat, lambda_sq) = match &state.v {
        DualIterate::Float(v) => {
            let (d, lambda_sq) = float_direction(inst, v, low_rank)?;
            if !lambda_sq.is_finite() {
                return Err(Error::NumericFailure);
            }
            let lambda = lambda_sq.max(0.0).sqrt();
            let theta = 1.0 / (1.0 + lambda);
            let next: Vec<f64> = v.iter().zip(&d).map(|(vm, dm)| vm - theta * dm).collect();
            if let Some(index) = next.iter().position(|&x| !(x > 0.0)) {
                return Err(Error::DomainExit { index });
            }
            (
                DualIterate::Float(next),
                Scalar::Float(lambda),
                Scalar::Float(lambda_sq),
            )
        }
        DualIterate::Exact(v) => {
            let dir = if low_rank {
                exact_direction_low_rank(inst, v)?
            } else {
                exact_direction_direct(inst, v)?
            };
            if dir.lambda_sq.cmp0() != Ordering::Greater {
                (
                    DualIterate::Exact(v.clone()),
                    Scalar::Exact(Rational::new()),
                    Scalar::Exact(dir.lambda_sq),
                )
            } else {
                let lambda_hat = pow2(isqrt_factor2_exponent(&dir.lambda_sq)? + 1);
                let next = exact_step(v, &dir.d, &lambda_hat);
                if let Some(index) = next.first_non_positive() {
                    return Err(Error::DomainExit { index });
                }
                (
                    DualIterate::Exact(next),
                    Scalar::Exact(lambda_hat),
                    Scalar::Exact(dir.lambda_sq),
                )
            }
        }
    };
    let phase = if lambda_hat.to_f64() >= 0.25 {
        Phase::One
    } else {
        Phase::Two
    };
    Ok(SolverState {
        v,
        step_index: state.step_index + 1,
        lambda_hat: Some(lambda_hat),
        lambda_sq: Some(lambda_sq),
        last_decrease: None,
        phase: Some(phase),
    })
}

/// `v − d/(1+λ̂)` over the common denominator `(p+q)·lcm(c, D)` where
/// `λ̂ = p/q`, `v = n/c` and `d = e/D`.
fn exact_step(v: &GridVector, d: &GridVector, lambda_hat: &Rational) -> GridVector {
    let (p, q) = (lambda_hat.numer(), lambda_hat.denom());
    let pq = Integer::from(p + q);
    let base = Integer::from(v.denominator.lcm_ref(&d.denominator));
    let den = Integer::from(&base * &pq);
    let v_scale = Integer::from(&den / &v.denominator);
    let d_scale = Integer::from(&base / &d.denominator) * q;
    let numerators = v
        .numerators
        .iter()
        .zip(&d.numerators)
        .map(|(n, e)| {
            let mut out = Integer::from(n * &v_scale);
            out -= e * &d_scale;
            out
        })
        .collect();
    GridVector {
        numerators,
        denominator: den,
    }
}

/// Divides `v` by `ν = isqrt_factor2(vᵀAAᵀv / M̂)` when `vᵀAAᵀv ≥ 4M̂`.
///
/// Returns the new state and whether the rescale fired. Afterwards
/// `M̂ ≤ vᵀAAᵀv ≤ 4M̂`, and `F` does not increase.
pub fn rescale_down(inst: &NormalizedInstance, state: &SolverState) -> Result<(SolverState, bool)> {
    let m_hat = inst.m();
    let mut next = state.clone();
    match &state.v {
        DualIterate::Exact(g) => {
            let quad = inst.quad_form(g)?;
            if quad < 4 * m_hat as u64 {
                return Ok((next, false));
            }
            let ratio = quad / Rational::from(m_hat as u64);
            let k = isqrt_factor2_exponent(&ratio)?;
            debug_assert!(k >= 1);
            let den = Integer::from(&g.denominator << (k as u32));
            next.v = DualIterate::Exact(GridVector::new(g.numerators.clone(), den)?);
        }
        DualIterate::Float(v) => {
            let quad = inst.quad_form_f64(v)?;
            if !(quad >= 4.0 * m_hat as f64) {
                return Ok((next, false));
            }
            let nu = isqrt_factor2_f64(quad / m_hat as f64)?;
            next.v = DualIterate::Float(v.iter().map(|x| x / nu).collect());
        }
    }
    Ok((next, true))
}

/// Ceils an exact iterate onto the grid `ℤ/Q`.
pub fn round_iterate(state: &SolverState, q: &Integer) -> Result<SolverState> {
    let DualIterate::Exact(g) = &state.v else {
        return Err(Error::ExactModeOnly);
    };
    let mut next = state.clone();
    next.v = DualIterate::Exact(ceil_grid_vector(g, q)?);
    Ok(next)
}

/// One line of the per-step trace.
#[derive(Clone, Debug, Serialize)]
pub struct StepRecord {
    pub step: u64,
    pub mode: Mode,
    pub lambda_hat: f64,
    pub quad_form: f64,
    pub min_residual: f64,
    pub rescaled: bool,
    pub rounded: bool,
    #[serde(rename = "F_float_observed")]
    pub f_observed: f64,
    #[serde(rename = "F_before")]
    pub f_before: f64,
    pub phase: Phase,
    /// `λ²/(2(1−λ))`, emitted once `λ̂ < 1/4`.
    pub gap_bound: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SolveStatus {
    Solved,
    StepBudgetExceeded,
    NumericFailure,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub status: SolveStatus,
    /// Solution of the source instance (lifted), when solved.
    pub x: Option<Vec<Rational>>,
    /// `Aᵀv` in normalized coordinates, when solved.
    pub normalized_x: Option<Vec<Rational>>,
    pub v: DualIterate,
    /// Newton steps over all attempts.
    pub steps_total: u64,
    pub phase1_steps: u64,
    /// Steps of the final attempt, if tracing was on.
    pub trace: Vec<StepRecord>,
    pub exact_check: Option<Verification>,
    /// Mode of the final attempt.
    pub mode_used: Mode,
    /// Grid of the final exact attempt.
    pub grid: Option<Integer>,
    pub omega_bound_used: Rational,
    pub budget: u64,
    pub restarts: u32,
    /// `F(v₀)` of the final attempt.
    pub f_start: f64,
    pub wall_ms: f64,
}

enum Outcome {
    Solved {
        x: Vec<Rational>,
        normalized_x: Vec<Rational>,
        check: Verification,
    },
    Unverified,
    BudgetExceeded,
    /// The exact iteration returned to an earlier iterate, so it cycles
    /// forever; carries the largest entry of that iterate.
    Stalled(Rational),
    NumericFailure,
}

struct Attempt {
    outcome: Outcome,
    state: SolverState,
    trace: Vec<StepRecord>,
    steps: u64,
    phase1: u64,
    f_start: f64,
}

fn min_residual(inst: &NormalizedInstance, v: &DualIterate) -> Result<(bool, f64)> {
    Ok(match v {
        DualIterate::Exact(g) => {
            let r = inst.residual_signs(g)?;
            (r.strictly_positive, r.min_entry.to_f64())
        }
        DualIterate::Float(v) => {
            let r = inst.residual_f64(v)?;
            (r.strictly_positive, r.min_entry)
        }
    })
}

fn run_attempt(
    inst: &NormalizedInstance,
    mode: Mode,
    q: &Integer,
    budget: u64,
    config: &SolverConfig,
    observe: &mut dyn FnMut(&SolverState, &Integer),
) -> Result<Attempt> {
    let mut state = SolverState::start(inst, mode, q)?;
    let f_start = state.observe_f(inst)?;
    let mut f_prev = f_start;
    let mut trace = Vec::new();
    let mut steps = 0u64;
    let mut phase1 = 0u64;
    let finish = |outcome, state, trace, steps, phase1| {
        Ok(Attempt {
            outcome,
            state,
            trace,
            steps,
            phase1,
            f_start,
        })
    };
    let mut recent: VecDeque<GridVector> = VecDeque::with_capacity(CYCLE_WINDOW);
    loop {
        let (positive, _) = min_residual(inst, &state.v)?;
        if positive {
            let grid = match &state.v {
                DualIterate::Exact(g) => g.clone(),
                DualIterate::Float(v) => match GridVector::from_f64(v) {
                    Ok(g) => g,
                    Err(_) => return finish(Outcome::Unverified, state, trace, steps, phase1),
                },
            };
            let normalized_x = inst.project(&grid)?;
            let x = inst.lift(&normalized_x);
            let check = inst.verify_lifted(&x)?;
            if check.ok {
                let outcome = Outcome::Solved {
                    x,
                    normalized_x,
                    check,
                };
                return finish(outcome, state, trace, steps, phase1);
            }
            if mode == Mode::Exact {
                return Err(Error::InternalInconsistency(
                    "exact residual is positive but the lifted solution fails".into(),
                ));
            }
            return finish(Outcome::Unverified, state, trace, steps, phase1);
        }
        if steps >= budget {
            return finish(Outcome::BudgetExceeded, state, trace, steps, phase1);
        }

        let (rescaled_state, rescaled) = rescale_down(inst, &state)?;
        let stepped = match damped_newton_step(inst, &rescaled_state, config) {
            Ok(s) => s,
            Err(Error::DomainExit { .. } | Error::SingularMatrix { .. } | Error::NumericFailure)
                if mode == Mode::Float =>
            {
                return finish(Outcome::NumericFailure, state, trace, steps, phase1);
            }
            Err(e) => return Err(e),
        };
        let mut next = match mode {
            Mode::Exact => round_iterate(&stepped, q)?,
            Mode::Float => stepped,
        };
        steps += 1;
        let f_now = match next.observe_f(inst) {
            Ok(f) if f.is_finite() => f,
            _ if mode == Mode::Float => {
                return finish(Outcome::NumericFailure, state, trace, steps, phase1);
            }
            Ok(f) => f,
            Err(e) => return Err(e),
        };
        next.last_decrease = Some(f_prev - f_now);
        if next.phase == Some(Phase::One) {
            phase1 += 1;
        }
        if config.trace {
            let lambda_hat = next.lambda_hat.as_ref().map_or(0.0, Scalar::to_f64);
            let gap_bound = (lambda_hat < 0.25).then(|| {
                let lsq = next.lambda_sq.as_ref().map_or(0.0, Scalar::to_f64);
                let l = lsq.max(0.0).sqrt();
                lsq / (2.0 * (1.0 - l))
            });
            trace.push(StepRecord {
                step: next.step_index,
                mode,
                lambda_hat,
                quad_form: rescaled_state.quad_form(inst)?.to_f64(),
                min_residual: min_residual(inst, &state.v)?.1,
                rescaled,
                rounded: mode == Mode::Exact,
                f_observed: f_now,
                f_before: f_prev,
                phase: next.phase.unwrap_or(Phase::Two),
                gap_bound,
            });
        }
        f_prev = f_now;
        state = next;
        observe(&state, q);
        if let DualIterate::Exact(g) = &state.v {
            // The loop is deterministic, so a repeated iterate never reaches
            // a positive residual.
            if recent.contains(g) {
                let largest = g.numerators.iter().max().cloned().unwrap_or_default();
                let v_max = Rational::from((largest, g.denominator.clone()));
                return finish(Outcome::Stalled(v_max), state, trace, steps, phase1);
            }
            if recent.len() == CYCLE_WINDOW {
                recent.pop_front();
            }
            recent.push_back(g.clone());
        }
    }
}

fn initial_grid(inst: &NormalizedInstance, policy: &QPolicy, omega: &Rational) -> Integer {
    match policy {
        QPolicy::Fixed(q) => q.clone(),
        QPolicy::FromOmega => choose_q(inst.m(), omega),
        QPolicy::Adaptive { start } => start
            .clone()
            .unwrap_or_else(|| choose_q(inst.m(), omega)),
    }
}

/// Runs damped Newton descent from `(1/M̂)·1` until `AAᵀv > 0`.
///
/// The caller asserts that the instance is feasible. A solved report always
/// carries a solution that passed the exact check on the source matrix.
pub fn solve_feasibility(inst: &NormalizedInstance, config: &SolverConfig) -> Result<SolveReport> {
    solve_feasibility_observed(inst, config, |_, _| {})
}

/// [`solve_feasibility`], calling `observe(state, Q)` on every iterate after
/// its step (and, in exact mode, its rounding onto `ℤ/Q`).
pub fn solve_feasibility_observed(
    inst: &NormalizedInstance,
    config: &SolverConfig,
    mut observe: impl FnMut(&SolverState, &Integer),
) -> Result<SolveReport> {
    config.validate()?;
    let started = Instant::now();
    let mut omega = config.omega_bound.clone();
    let mut q = initial_grid(inst, &config.q_policy, &omega);
    let mut mode = config.mode;
    let mut restarts = 0u32;
    let mut steps_total = 0u64;
    loop {
        let budget = config
            .max_steps
            .unwrap_or_else(|| step_budget(inst.m(), &omega));
        let attempt = run_attempt(inst, mode, &q, budget, config, &mut observe)?;
        steps_total += attempt.steps;
        let report = |status, x, normalized_x, check, attempt: Attempt| SolveReport {
            status,
            x,
            normalized_x,
            v: attempt.state.v,
            steps_total,
            phase1_steps: attempt.phase1,
            trace: attempt.trace,
            exact_check: check,
            mode_used: mode,
            grid: (mode == Mode::Exact).then(|| q.clone()),
            omega_bound_used: omega.clone(),
            budget,
            restarts,
            f_start: attempt.f_start,
            wall_ms: started.elapsed().as_secs_f64() * 1e3,
        };
        match attempt.outcome {
            Outcome::Solved {
                ref x,
                ref normalized_x,
                ref check,
            } => {
                let (x, nx, c) = (x.clone(), normalized_x.clone(), check.clone());
                return Ok(report(SolveStatus::Solved, Some(x), Some(nx), Some(c), attempt));
            }
            Outcome::Unverified | Outcome::NumericFailure
                if mode == Mode::Float && config.fallback_to_exact =>
            {
                mode = Mode::Exact;
            }
            Outcome::Unverified | Outcome::NumericFailure => {
                return Ok(report(SolveStatus::NumericFailure, None, None, None, attempt));
            }
            Outcome::BudgetExceeded | Outcome::Stalled(_)
                if matches!(config.q_policy, QPolicy::Adaptive { .. })
                    && restarts < MAX_ADAPTIVE_RESTARTS =>
            {
                restarts += 1;
                omega *= 2u32;
                if let Outcome::Stalled(v_max) = &attempt.outcome {
                    // choose_q assumes entries up to 2·sqrt(M̂·Ω).
                    let implied = Rational::from(v_max.square_ref()) / (4 * inst.m() as u64);
                    if implied > omega {
                        omega = implied;
                    }
                }
                let grown = Integer::from(&q * 2u32);
                q = choose_q(inst.m(), &omega).max(grown);
            }
            Outcome::BudgetExceeded | Outcome::Stalled(_) => {
                return Ok(report(SolveStatus::StepBudgetExceeded, None, None, None, attempt));
            }
        }
    }
}
