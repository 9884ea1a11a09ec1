//! The perceptron potential `F(v) = ½·vᵀAAᵀv − Σ log v_m` over a row-normalized
//! integer matrix, with its derivatives and the residual map `v ↦ AAᵀv`.
//!
//! The normalized matrix `A = diag(1/ρ)·𝒜` is never materialized in exact
//! arithmetic. Products go through `x = 𝒜ᵀ(v/ρ)` using the integer cofactors
//! `lcm(ρ)/ρ_m`, so exact evaluation is integer arithmetic over one shared
//! denominator.

use std::cmp::Ordering;

use rug::{Assign, Integer, Rational};

use crate::arith::{
    dot_f64, dot_int, ln_ratio, ratio_to_f64, GridVector, IntMatrix, Matrix, QMatrix,
};
use crate::error::{Error, Result};
use crate::instance::{verify_matrix, Relation, Verification};

/// How a normalized instance maps back to the matrix it was built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    /// The rows were supplied already having integral norms.
    Direct,
    /// Built by the four-row normalization of `original`; solutions lift by
    /// keeping the first `original.cols()` coordinates.
    Lifted { original: IntMatrix },
}

/// Integer matrix `𝒜` whose rows have integer Euclidean norms `ρ`.
#[derive(Clone, Debug)]
pub struct NormalizedInstance {
    rows: IntMatrix,
    norms: Vec<Integer>,
    lcm: Integer,
    cofactors: Vec<Integer>,
    origin: Origin,
    unit_rows: Matrix<f64>,
    unit_gram: Matrix<f64>,
}

impl NormalizedInstance {
    /// Accepts rows whose squared norms are perfect squares.
    pub fn from_rows(rows: IntMatrix) -> Result<Self> {
        let mut norms = Vec::with_capacity(rows.rows());
        for (m, row) in rows.row_iter().enumerate() {
            let sq = dot_int(row, row);
            if sq.is_zero() {
                return Err(Error::ZeroRow { row: m });
            }
            if !sq.is_perfect_square() {
                return Err(Error::NotNormalizable { row: m });
            }
            norms.push(sq.sqrt());
        }
        Self::with_origin(rows, norms, Origin::Direct)
    }

    pub(crate) fn with_origin(rows: IntMatrix, norms: Vec<Integer>, origin: Origin) -> Result<Self> {
        if norms.len() != rows.rows() {
            return Err(Error::DimensionMismatch {
                expected: rows.rows(),
                found: norms.len(),
            });
        }
        let mut lcm = Integer::from(1);
        for (m, (row, rho)) in rows.row_iter().zip(&norms).enumerate() {
            if rho.cmp0() != Ordering::Greater {
                return Err(Error::ZeroRow { row: m });
            }
            if dot_int(row, row) != Integer::from(rho * rho) {
                return Err(Error::NotNormalizable { row: m });
            }
            lcm.lcm_mut(rho);
        }
        let cofactors = norms.iter().map(|r| Integer::from(&lcm / r)).collect();
        let unit_rows = Matrix::from_fn(rows.rows(), rows.cols(), |i, j| {
            ratio_to_f64(&rows[(i, j)], &norms[i])
        });
        let unit_gram = Matrix::from_fn(rows.rows(), rows.rows(), |i, j| {
            dot_f64(unit_rows.row(i), unit_rows.row(j))
        });
        Ok(Self {
            rows,
            norms,
            lcm,
            cofactors,
            origin,
            unit_rows,
            unit_gram,
        })
    }

    /// Number of rows `M̂`.
    pub fn m(&self) -> usize {
        self.rows.rows()
    }

    /// Number of columns `N̂`.
    pub fn n(&self) -> usize {
        self.rows.cols()
    }

    pub fn rows(&self) -> &IntMatrix {
        &self.rows
    }

    pub fn norms(&self) -> &[Integer] {
        &self.norms
    }

    pub fn origin(&self) -> &Origin {
        &self.origin
    }

    /// `lcm(ρ)`; the normalized rows are `cofactor_m · 𝒜_m / lcm`.
    pub fn norm_lcm(&self) -> &Integer {
        &self.lcm
    }

    pub fn cofactors(&self) -> &[Integer] {
        &self.cofactors
    }

    /// Normalized rows `𝒜_m/ρ_m` in floating point.
    pub fn unit_rows(&self) -> &Matrix<f64> {
        &self.unit_rows
    }

    /// `AAᵀ` of the normalized rows in floating point.
    pub fn unit_gram(&self) -> &Matrix<f64> {
        &self.unit_gram
    }

    /// Exact `AAᵀ`: `(𝒜_i·𝒜_j) / (ρ_i ρ_j)`.
    pub fn gram(&self) -> QMatrix {
        let m = self.m();
        let mut g = Matrix::from_fn(m, m, |_, _| Rational::new());
        for i in 0..m {
            for j in i..m {
                let ip = dot_int(self.rows.row(i), self.rows.row(j));
                let den = Integer::from(&self.norms[i] * &self.norms[j]);
                let r = Rational::from((ip, den));
                g[(j, i)] = r.clone();
                g[(i, j)] = r;
            }
        }
        g
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.m() {
            return Err(Error::DimensionMismatch {
                expected: self.m(),
                found: len,
            });
        }
        Ok(())
    }

    /// Scaled primal image of a grid vector: returns `X` with
    /// `Aᵀv = X / (den·lcm)`, where `den` is the vector's denominator.
    pub fn scaled_image(&self, v: &GridVector) -> Result<Vec<Integer>> {
        self.check_len(v.len())?;
        let mut x = vec![Integer::new(); self.n()];
        let mut w = Integer::new();
        for (m, row) in self.rows.row_iter().enumerate() {
            if v.numerators[m].is_zero() {
                continue;
            }
            w.assign(&v.numerators[m] * &self.cofactors[m]);
            for (xj, a) in x.iter_mut().zip(row) {
                if !a.is_zero() {
                    *xj += a * &w;
                }
            }
        }
        Ok(x)
    }

    /// Exact `Aᵀv`, the candidate primal solution in normalized coordinates.
    pub fn project(&self, v: &GridVector) -> Result<Vec<Rational>> {
        let x = self.scaled_image(v)?;
        let den = Integer::from(&v.denominator * &self.lcm);
        Ok(x.into_iter().map(|xj| Rational::from((xj, den.clone()))).collect())
    }

    /// Float `Aᵀv`.
    pub fn project_f64(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_len(v.len())?;
        let mut x = vec![0.0; self.n()];
        for (m, &vm) in v.iter().enumerate() {
            for (xj, a) in x.iter_mut().zip(self.unit_rows.row(m)) {
                *xj += vm * a;
            }
        }
        Ok(x)
    }

    /// Exact `vᵀAAᵀv = ‖Aᵀv‖²`.
    pub fn quad_form(&self, v: &GridVector) -> Result<Rational> {
        let x = self.scaled_image(v)?;
        let num = dot_int(&x, &x);
        let den = Integer::from(&v.denominator * &self.lcm);
        Ok(Rational::from((num, den.square())))
    }

    pub fn quad_form_f64(&self, v: &[f64]) -> Result<f64> {
        let x = self.project_f64(v)?;
        Ok(dot_f64(&x, &x))
    }

    /// `F(v)` in floating point.
    pub fn eval_f(&self, v: &[f64]) -> Result<f64> {
        self.check_len(v.len())?;
        if let Some(index) = v.iter().position(|&x| !(x > 0.0)) {
            return Err(Error::NonPositiveIterate { index });
        }
        let quad = self.quad_form_f64(v)?;
        Ok(0.5 * quad - v.iter().map(|x| x.ln()).sum::<f64>())
    }

    /// `F` at an exact iterate, observed in floating point. The quadratic
    /// term is computed exactly before conversion and the logs are taken of
    /// the big-integer operands, so the value is accurate far outside the
    /// f64 range of the individual entries.
    pub fn eval_f_grid(&self, v: &GridVector) -> Result<f64> {
        if let Some(index) = v.first_non_positive() {
            return Err(Error::NonPositiveIterate { index });
        }
        let quad = self.quad_form(v)?;
        let logs: f64 = v
            .numerators
            .iter()
            .map(|n| ln_ratio(n, &v.denominator))
            .sum();
        Ok(0.5 * ratio_to_f64(quad.numer(), quad.denom()) - logs)
    }

    /// `F` at an arbitrary rational point, observed in floating point.
    pub fn eval_f_rational(&self, v: &[Rational]) -> Result<f64> {
        self.eval_f_grid(&GridVector::from_rationals(v))
    }

    fn check_positive(v: &[Rational]) -> Result<()> {
        match v.iter().position(|x| x.cmp0() != Ordering::Greater) {
            Some(index) => Err(Error::NonPositiveIterate { index }),
            None => Ok(()),
        }
    }

    /// Exact `AAᵀv`.
    pub fn gram_times(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        self.check_len(v.len())?;
        let grid = GridVector::from_rationals(v);
        let x = self.scaled_image(&grid)?;
        let den = Integer::from(&grid.denominator * &self.lcm);
        Ok(self
            .rows
            .row_iter()
            .zip(&self.norms)
            .map(|(row, rho)| {
                Rational::from((dot_int(row, &x), Integer::from(&den * rho)))
            })
            .collect())
    }

    pub fn gram_times_f64(&self, v: &[f64]) -> Result<Vec<f64>> {
        let x = self.project_f64(v)?;
        Ok(self.unit_rows.row_iter().map(|row| dot_f64(row, &x)).collect())
    }

    /// Exact gradient `AAᵀv − (1/v_m)_m`.
    pub fn grad(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        Self::check_positive(v)?;
        let mut g = self.gram_times(v)?;
        for (gm, vm) in g.iter_mut().zip(v) {
            *gm -= Rational::from(vm.recip_ref());
        }
        Ok(g)
    }

    pub fn grad_f64(&self, v: &[f64]) -> Result<Vec<f64>> {
        if let Some(index) = v.iter().position(|&x| !(x > 0.0)) {
            return Err(Error::NonPositiveIterate { index });
        }
        let mut g = self.gram_times_f64(v)?;
        for (gm, vm) in g.iter_mut().zip(v) {
            *gm -= 1.0 / vm;
        }
        Ok(g)
    }

    /// Exact Hessian `AAᵀ + diag(1/v_m²)`.
    pub fn hess(&self, v: &[Rational]) -> Result<QMatrix> {
        self.check_len(v.len())?;
        Self::check_positive(v)?;
        let mut h = self.gram();
        for (m, vm) in v.iter().enumerate() {
            h[(m, m)] += Rational::from(vm.recip_ref()).square();
        }
        Ok(h)
    }

    pub fn hess_f64(&self, v: &[f64]) -> Result<Matrix<f64>> {
        self.check_len(v.len())?;
        if let Some(index) = v.iter().position(|&x| !(x > 0.0)) {
            return Err(Error::NonPositiveIterate { index });
        }
        let mut h = self.unit_gram.clone();
        for (m, vm) in v.iter().enumerate() {
            h[(m, m)] += 1.0 / (vm * vm);
        }
        Ok(h)
    }

    /// Analytic `(φ', φ'', φ''')` of the ray `φ(t) = F(v + t·w)`.
    pub fn ray_derivatives(&self, v: &[f64], w: &[f64], t: f64) -> Result<(f64, f64, f64)> {
        self.check_len(v.len())?;
        self.check_len(w.len())?;
        let p: Vec<f64> = v.iter().zip(w).map(|(a, b)| a + t * b).collect();
        if let Some(index) = p.iter().position(|&x| !(x > 0.0)) {
            return Err(Error::RayLeavesDomain { index });
        }
        let ap = self.project_f64(&p)?;
        let aw = self.project_f64(w)?;
        let mut d1 = dot_f64(&ap, &aw);
        let mut d2 = dot_f64(&aw, &aw);
        let mut d3 = 0.0;
        for (wm, pm) in w.iter().zip(&p) {
            let r = wm / pm;
            d1 -= r;
            d2 += r * r;
            d3 -= 2.0 * r * r * r;
        }
        Ok((d1, d2, d3))
    }

    /// Exact residual `AAᵀv` and its sign test.
    pub fn residual(&self, v: &[Rational]) -> Result<Residual<Rational>> {
        let values = self.gram_times(v)?;
        Ok(Residual::from_values(values, |r| r.cmp0() == Ordering::Greater))
    }

    /// Residual sign test on a grid vector; avoids rational normalization.
    pub fn residual_signs(&self, v: &GridVector) -> Result<GridResidual> {
        let x = self.scaled_image(v)?;
        let products: Vec<Integer> = self.rows.row_iter().map(|row| dot_int(row, &x)).collect();
        let den = Integer::from(&v.denominator * &self.lcm);
        let mut min: Option<Rational> = None;
        for (p, rho) in products.iter().zip(&self.norms) {
            let r = Rational::from((p.clone(), Integer::from(&den * rho)));
            if min.as_ref().is_none_or(|cur| r < *cur) {
                min = Some(r);
            }
        }
        let strictly_positive = products.iter().all(|p| p.cmp0() == Ordering::Greater);
        Ok(GridResidual {
            products,
            min_entry: min.unwrap_or_default(),
            strictly_positive,
        })
    }

    pub fn residual_f64(&self, v: &[f64]) -> Result<Residual<f64>> {
        let values = self.gram_times_f64(v)?;
        Ok(Residual::from_values(values, |&r| r > 0.0))
    }

    /// The matrix solutions are reported against.
    pub fn source(&self) -> &IntMatrix {
        match &self.origin {
            Origin::Direct => &self.rows,
            Origin::Lifted { original } => original,
        }
    }

    /// Coordinates of a normalized-space point in the source instance.
    pub fn lift(&self, chi: &[Rational]) -> Vec<Rational> {
        chi[..self.source().cols().min(chi.len())].to_vec()
    }

    /// Exact check `𝒜x > 0` against the source matrix.
    pub fn verify_lifted(&self, x: &[Rational]) -> Result<Verification> {
        verify_matrix(self.source(), x, Relation::Strict, None)
    }
}

/// `AAᵀv` with its minimum entry and positivity flag.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual<T> {
    pub values: Vec<T>,
    pub min_entry: T,
    pub strictly_positive: bool,
}

impl<T: Clone + PartialOrd + Default> Residual<T> {
    fn from_values(values: Vec<T>, positive: impl Fn(&T) -> bool) -> Self {
        let min_entry = values
            .iter()
            .cloned()
            .reduce(|a, b| if b < a { b } else { a })
            .unwrap_or_default();
        let strictly_positive = values.iter().all(positive);
        Self {
            values,
            min_entry,
            strictly_positive,
        }
    }
}

/// Residual of a grid iterate: `products[m] = 𝒜_m·X` has the sign of
/// `(AAᵀv)_m`.
#[derive(Clone, Debug)]
pub struct GridResidual {
    pub products: Vec<Integer>,
    pub min_entry: Rational,
    pub strictly_positive: bool,
}

/// `(φ(t), ψ(t))` with `φ(t) = ½αt² − log(1+t)` and `ψ(t) = ½(α+1)t² − t`.
pub fn scalar_lemmas(alpha: f64, t: f64) -> (f64, f64) {
    let phi = 0.5 * alpha * t * t - t.ln_1p();
    let psi = 0.5 * (alpha + 1.0) * t * t - t;
    (phi, psi)
}
