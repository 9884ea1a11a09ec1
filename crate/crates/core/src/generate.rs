//! Seeded generator of feasible instances with a planted solution.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Integer, Rational};

use crate::arith::{dot_int, IntMatrix, Matrix};
use crate::error::{Error, Result};
use crate::instance::{Instance, Meta};

/// Candidate rows drawn per requested row before giving up.
pub const DRAWS_PER_ROW: u64 = 20_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub m: usize,
    pub n: usize,
    /// Entries lie in `[−(2^bits − 1), 2^bits − 1]`.
    pub bits: u32,
    /// Every row satisfies `r·x* ≥ margin·‖r‖·‖x*‖`; in `(0, 1]`.
    pub margin: Rational,
    /// Optional strict upper bound on the cosine `r·x*/(‖r‖‖x*‖)`.
    pub margin_cap: Option<Rational>,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(m: usize, n: usize, bits: u32, margin: Rational, seed: u64) -> Self {
        Self {
            m,
            n,
            bits,
            margin,
            margin_cap: None,
            seed,
        }
    }

    /// Restricts every row's cosine to `[margin, cap)`.
    pub fn with_cap(mut self, cap: Rational) -> Self {
        self.margin_cap = Some(cap);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::InvalidConfig("m and n must be at least 1".into()));
        }
        if self.bits == 0 || self.bits > 62 {
            return Err(Error::InvalidConfig("bits must be in 1..=62".into()));
        }
        if self.margin.cmp0() != Ordering::Greater || self.margin > 1 {
            return Err(Error::InvalidConfig("margin must lie in (0, 1]".into()));
        }
        if let Some(cap) = &self.margin_cap {
            if *cap <= self.margin {
                return Err(Error::InvalidConfig("margin cap must exceed the margin".into()));
            }
        }
        Ok(())
    }
}

/// `(r·x)²·q² ⋈ p²·(r·r)(x·x)` for `γ = p/q`, i.e. the sign of
/// `cos²(r, x) − γ²`.
fn cmp_cos_sq(dot: &Integer, rr: &Integer, xx: &Integer, gamma: &Rational) -> Ordering {
    let lhs = Integer::from(dot.square_ref()) * Integer::from(gamma.denom().square_ref());
    let rhs = Integer::from(gamma.numer().square_ref()) * rr * xx;
    lhs.cmp(&rhs)
}

fn draw_vector(rng: &mut ChaCha8Rng, n: usize, bits: u32) -> Vec<i64> {
    let hi = (1i64 << bits) - 1;
    (0..n).map(|_| rng.gen_range(-hi..=hi)).collect()
}

/// Draws a planted `x*`, then rows `r` with `r·x* > 0` and cosine at least
/// the margin (and below the cap, if any).
pub fn generate(spec: &GeneratorSpec) -> Result<Instance> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let x_star: Vec<Integer> = loop {
        let x = draw_vector(&mut rng, spec.n, spec.bits);
        if x.iter().any(|&v| v != 0) {
            break x.into_iter().map(Integer::from).collect();
        }
    };
    let xx = dot_int(&x_star, &x_star);
    let x_norm = xx.to_f64().sqrt();
    let gamma = spec.margin.to_f64();
    let cap = spec.margin_cap.as_ref().map(Rational::to_f64);
    let budget = DRAWS_PER_ROW * spec.m as u64;
    let mut rows = Vec::with_capacity(spec.m);
    let mut draws = 0u64;
    while rows.len() < spec.m {
        if draws >= budget {
            return Err(Error::RejectionBudgetExceeded { draws });
        }
        draws += 1;
        let r = draw_vector(&mut rng, spec.n, spec.bits);
        let mut r: Vec<Integer> = r.into_iter().map(Integer::from).collect();
        let mut dot = dot_int(&r, &x_star);
        match dot.cmp0() {
            Ordering::Equal => continue,
            Ordering::Less => {
                for v in &mut r {
                    *v = -std::mem::take(v);
                }
                dot = -dot;
            }
            Ordering::Greater => {}
        }
        let rr = dot_int(&r, &r);
        let cos = dot.to_f64() / (rr.to_f64().sqrt() * x_norm);
        // Float screen with slack, exact decision afterwards.
        if cos < gamma * (1.0 - 1e-9) || cap.is_some_and(|c| cos >= c * (1.0 + 1e-9)) {
            continue;
        }
        if cmp_cos_sq(&dot, &rr, &xx, &spec.margin) == Ordering::Less {
            continue;
        }
        if let Some(c) = &spec.margin_cap {
            if cmp_cos_sq(&dot, &rr, &xx, c) != Ordering::Less {
                continue;
            }
        }
        rows.push(r);
    }
    let a = Matrix::from_rows(rows, spec.n)?;
    let planted = planted_witness(&a, &x_star)?;
    let meta = Meta {
        seed: Some(spec.seed),
        margin: Some(spec.margin.clone()),
        planted: Some(planted),
        comments: Vec::new(),
    };
    Ok(Instance::new(a)?.with_meta(meta))
}

/// Seeded feasible instance with `m` rows, `n` columns and row cosines to
/// the planted solution of at least `margin`.
pub fn generate_feasible_instance(
    m: usize,
    n: usize,
    bits: u32,
    margin: &Rational,
    seed: u64,
) -> Result<Instance> {
    generate(&GeneratorSpec::new(m, n, bits, margin.clone(), seed))
}

/// Scales `x` (with `Ax > 0`) to `ω = c·x` such that after four-row
/// normalization every row `(2A_n, ±1, ±2s)/(2s+1)` has `ω`-margin at least
/// 1: `c = max_n (2s_n + 1)/(2·A_n·x)`.
pub fn planted_witness(a: &IntMatrix, x: &[Integer]) -> Result<Vec<Rational>> {
    let mut c = Rational::new();
    for (row_index, row) in a.row_iter().enumerate() {
        let ax = dot_int(row, x);
        if ax.cmp0() != Ordering::Greater {
            return Err(Error::InvalidConfig(format!(
                "planted point fails row {row_index}"
            )));
        }
        let s = dot_int(row, row);
        let need = Rational::from((s * 2u32 + 1u32, ax * 2u32));
        if need > c {
            c = need;
        }
    }
    Ok(x.iter().map(|v| Rational::from(&c * v)).collect())
}
