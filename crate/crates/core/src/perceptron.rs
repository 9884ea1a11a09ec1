//! The classical perceptron on a row-normalized instance.
//!
//! The iterate `x = Σ v_m 𝒜_m/ρ_m` is kept as `X / lcm(ρ)` with integer `X`,
//! and the products `𝒜_m·X` are updated incrementally from the integer Gram
//! matrix, so a step costs `O(M̂)` big-integer additions.

use std::cmp::Ordering;

use rug::{Integer, Rational};

use crate::arith::{dot_int, dot_int_rational, Matrix};
use crate::error::{Error, Result};
use crate::potential::NormalizedInstance;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerceptronState {
    scaled_x: Vec<Integer>,
    products: Vec<Integer>,
    counts: Vec<u64>,
    t: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Converged,
    /// The row that was added.
    Updated(usize),
}

impl PerceptronState {
    /// The zero iterate.
    pub fn new(inst: &NormalizedInstance) -> Self {
        Self {
            scaled_x: vec![Integer::new(); inst.n()],
            products: vec![Integer::new(); inst.m()],
            counts: vec![0; inst.m()],
            t: 0,
        }
    }

    /// Rebuilds the state implied by per-row update counts.
    pub fn from_counts(inst: &NormalizedInstance, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != inst.m() {
            return Err(Error::DimensionMismatch {
                expected: inst.m(),
                found: counts.len(),
            });
        }
        let mut scaled_x = vec![Integer::new(); inst.n()];
        for (m, &k) in counts.iter().enumerate() {
            let w = Integer::from(&inst.cofactors()[m] * k);
            for (xj, a) in scaled_x.iter_mut().zip(inst.rows().row(m)) {
                *xj += a * &w;
            }
        }
        let products = inst.rows().row_iter().map(|r| dot_int(r, &scaled_x)).collect();
        Ok(Self {
            scaled_x,
            products,
            t: counts.iter().sum(),
            counts,
        })
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// `X` with `x = X / lcm(ρ)`.
    pub fn scaled_x(&self) -> &[Integer] {
        &self.scaled_x
    }

    /// The iterate with each coordinate in lowest terms.
    pub fn x(&self, inst: &NormalizedInstance) -> Vec<Rational> {
        self.scaled_x
            .iter()
            .map(|xj| Rational::from((xj.clone(), inst.norm_lcm().clone())))
            .collect()
    }

    /// `xᵀx`.
    pub fn norm_sq(&self, inst: &NormalizedInstance) -> Rational {
        let l2 = Integer::from(inst.norm_lcm().square_ref());
        Rational::from((dot_int(&self.scaled_x, &self.scaled_x), l2))
    }

    /// `ωᵀx`.
    pub fn dot(&self, inst: &NormalizedInstance, omega: &[Rational]) -> Rational {
        dot_int_rational(&self.scaled_x, omega) / Rational::from(inst.norm_lcm())
    }

    /// Lowest-index row with `(𝒜_m/ρ_m)·x ≤ 0`.
    pub fn first_violated(&self) -> Option<usize> {
        self.products
            .iter()
            .position(|p| p.cmp0() != Ordering::Greater)
    }
}

/// Integer Gram matrix `𝒜𝒜ᵀ` shared by all steps of a run.
pub struct Gram(Matrix<Integer>);

impl Gram {
    pub fn new(inst: &NormalizedInstance) -> Self {
        let rows = inst.rows();
        let m = rows.rows();
        let mut g = Matrix::from_fn(m, m, |_, _| Integer::new());
        for i in 0..m {
            for j in i..m {
                let ip = dot_int(rows.row(i), rows.row(j));
                g[(j, i)] = ip.clone();
                g[(i, j)] = ip;
            }
        }
        Self(g)
    }
}

/// One perceptron update: adds the lowest-index violated row to `x`.
pub fn perceptron_step(inst: &NormalizedInstance, gram: &Gram, state: &mut PerceptronState) -> StepOutcome {
    let Some(i) = state.first_violated() else {
        return StepOutcome::Converged;
    };
    let cof = &inst.cofactors()[i];
    for (xj, a) in state.scaled_x.iter_mut().zip(inst.rows().row(i)) {
        if !a.is_zero() {
            *xj += a * cof;
        }
    }
    for (p, g) in state.products.iter_mut().zip(gram.0.row(i)) {
        if !g.is_zero() {
            *p += g * cof;
        }
    }
    state.counts[i] += 1;
    state.t += 1;
    StepOutcome::Updated(i)
}

#[derive(Clone, Debug)]
pub struct PerceptronReport {
    pub x: Vec<Rational>,
    pub steps: u64,
    pub counts: Vec<u64>,
}

/// Runs the perceptron from `x = 0` for at most `step_cap` updates.
pub fn perceptron_solve(inst: &NormalizedInstance, step_cap: u64) -> Result<PerceptronReport> {
    perceptron_solve_observed(inst, step_cap, |_| {})
}

/// [`perceptron_solve`], calling `observe` on the state after every update.
pub fn perceptron_solve_observed(
    inst: &NormalizedInstance,
    step_cap: u64,
    mut observe: impl FnMut(&PerceptronState),
) -> Result<PerceptronReport> {
    if step_cap == 0 {
        return Err(Error::InvalidConfig("step cap must be at least 1".into()));
    }
    let gram = Gram::new(inst);
    let mut state = PerceptronState::new(inst);
    loop {
        if state.first_violated().is_none() {
            return Ok(PerceptronReport {
                x: state.x(inst),
                steps: state.t,
                counts: state.counts,
            });
        }
        if state.t >= step_cap {
            return Err(Error::CapExceeded { cap: step_cap });
        }
        perceptron_step(inst, &gram, &mut state);
        observe(&state);
    }
}

/// `⌈ωᵀω⌉`, the step cap implied by a witness with normalized margin ≥ 1.
pub fn cap_from_witness(omega: &[Rational]) -> u64 {
    let mut acc = Rational::new();
    for w in omega {
        acc += Rational::from(w.square_ref());
    }
    let (_, ceil) = acc.fract_ceil(Integer::new());
    ceil.to_u64().unwrap_or(u64::MAX)
}
