//! Exact and floating linear algebra over arbitrary-precision rationals.
//!
//! Besides the dense [`Matrix`] container and the two symmetric solvers, this
//! module holds the two primitives the exact solver relies on to avoid
//! irrational arithmetic: [`isqrt_factor2`], a power-of-two square-root
//! witness found by bisection on the binary exponent, and [`ceil_to_grid`],
//! the common-denominator ceiling `⌊Q·v + 1⌋ / Q`.

use std::cmp::Ordering;
use std::ops::{Index, IndexMut};

use rug::{Assign, Integer, Rational};

use crate::error::{Error, Result};

/// Execution mode of the numerical kernels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IntMatrix = Matrix<Integer>;
pub type QMatrix = Matrix<Rational>;

impl<T> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from a list of rows; every row must have `cols` entries.
    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Result<Self> {
        let n_rows = rows.len();
        let mut data = Vec::with_capacity(n_rows * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self {
            rows: n_rows,
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[T]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T: Clone> Matrix<T> {
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl IntMatrix {
    /// Parses a small integer matrix; convenient in tests and examples.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&a| Integer::from(a)).collect())
            .collect();
        Self::from_rows(rows, cols).expect("ragged literal matrix")
    }

    /// Largest bit length among the entries (0 for the zero matrix).
    pub fn max_bits(&self) -> u32 {
        self.data
            .iter()
            .map(|a| a.significant_bits())
            .max()
            .unwrap_or(0)
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(|a| a.to_f64())
    }
}

/// Exact dot product of an integer row with a rational vector.
pub fn dot_int_rational(row: &[Integer], x: &[Rational]) -> Rational {
    let mut acc = Rational::new();
    for (a, b) in row.iter().zip(x) {
        if !a.is_zero() {
            acc += Rational::from(a * b);
        }
    }
    acc
}

pub fn dot_int(a: &[Integer], b: &[Integer]) -> Integer {
    let mut acc = Integer::new();
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

pub fn dot_f64(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A vector of rationals sharing one positive denominator.
///
/// Entry `i` is `numerators[i] / denominator`. The denominator is kept as
/// given and never reduced against the numerators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GridVector {
    pub numerators: Vec<Integer>,
    pub denominator: Integer,
}

impl GridVector {
    pub fn new(numerators: Vec<Integer>, denominator: Integer) -> Result<Self> {
        if denominator.cmp0() != Ordering::Greater {
            return Err(Error::NonPositiveInput);
        }
        Ok(Self {
            numerators,
            denominator,
        })
    }

    pub fn len(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numerators.is_empty()
    }

    pub fn entry(&self, i: usize) -> Rational {
        Rational::from((self.numerators[i].clone(), self.denominator.clone()))
    }

    pub fn to_rationals(&self) -> Vec<Rational> {
        (0..self.len()).map(|i| self.entry(i)).collect()
    }

    /// Common-denominator form of an arbitrary rational vector (denominator
    /// is the lcm of the entry denominators).
    pub fn from_rationals(v: &[Rational]) -> Self {
        let mut den = Integer::from(1);
        for r in v {
            den.lcm_mut(r.denom());
        }
        let numerators = v
            .iter()
            .map(|r| Integer::from(r.numer() * Integer::from(&den / r.denom())))
            .collect();
        Self {
            numerators,
            denominator: den,
        }
    }

    /// Exact common-denominator form of a float vector.
    pub fn from_f64(v: &[f64]) -> Result<Self> {
        let rats = v
            .iter()
            .map(|&x| Rational::from_f64(x).ok_or(Error::NumericFailure))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_rationals(&rats))
    }

    pub fn first_non_positive(&self) -> Option<usize> {
        self.numerators
            .iter()
            .position(|n| n.cmp0() != Ordering::Greater)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| ratio_to_f64(&self.numerators[i], &self.denominator))
            .collect()
    }
}

/// `num / den` as a float, robust to operands beyond the f64 range.
pub fn ratio_to_f64(num: &Integer, den: &Integer) -> f64 {
    let (a, ea) = num.to_f64_exp();
    let (b, eb) = den.to_f64_exp();
    let exp = i64::from(ea) - i64::from(eb);
    (a / b) * 2f64.powi(exp.clamp(-2000, 2000) as i32)
}

/// Natural logarithm of a positive big integer.
pub fn ln_integer(n: &Integer) -> f64 {
    let (m, e) = n.to_f64_exp();
    m.ln() + f64::from(e) * std::f64::consts::LN_2
}

/// Natural logarithm of a positive rational `num / den`.
pub fn ln_ratio(num: &Integer, den: &Integer) -> f64 {
    ln_integer(num) - ln_integer(den)
}

pub fn ln_rational(r: &Rational) -> f64 {
    ln_ratio(r.numer(), r.denom())
}

/// `2^k` as a rational, for any sign of `k`.
pub fn pow2(k: i64) -> Rational {
    let magnitude = Integer::from(1) << (k.unsigned_abs() as u32);
    if k >= 0 {
        Rational::from(magnitude)
    } else {
        Rational::from((Integer::from(1), magnitude))
    }
}

/// Compares `2^e` with `num / den` (both operands positive) by shifting.
fn cmp_pow2(e: i64, num: &Integer, den: &Integer) -> Ordering {
    if e >= 0 {
        let lhs = Integer::from(den << (e as u32));
        lhs.cmp(num)
    } else {
        let rhs = Integer::from(num << ((-e) as u32));
        den.cmp(&rhs)
    }
}

/// The unique integer `e` with `2^e ≤ ρ < 2^(e+1)`, for `ρ > 0`.
///
/// Gallops outward from 0 over the exponent and then bisects, so the number
/// of comparisons is logarithmic in `|e|`.
pub fn floor_log2(rho: &Rational) -> Result<i64> {
    if rho.cmp0() != Ordering::Greater {
        return Err(Error::NonPositiveInput);
    }
    let (num, den) = (rho.numer(), rho.denom());
    let le = |e: i64| cmp_pow2(e, num, den) != Ordering::Greater;
    // Invariant during bisection: 2^lo ≤ ρ < 2^hi.
    let (mut lo, mut hi) = if le(0) {
        let mut step = 1i64;
        while le(step) {
            step *= 2;
        }
        (step / 2, step)
    } else {
        let mut step = 1i64;
        while !le(-step) {
            step *= 2;
        }
        (-step, -step / 2)
    };
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if le(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Power-of-two witness `μ` with `μ ≤ √ρ ≤ 2μ`.
///
/// `μ = 2^⌊e/2⌋` where `2^e ≤ ρ < 2^(e+1)`.
pub fn isqrt_factor2(rho: &Rational) -> Result<Rational> {
    Ok(pow2(floor_log2(rho)?.div_euclid(2)))
}

/// Exponent `k` of the witness `μ = 2^k` from [`isqrt_factor2`].
pub fn isqrt_factor2_exponent(rho: &Rational) -> Result<i64> {
    Ok(floor_log2(rho)?.div_euclid(2))
}

/// Float counterpart of [`isqrt_factor2`]; the result is an exact power of two.
pub fn isqrt_factor2_f64(rho: f64) -> Result<f64> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::NonPositiveInput);
    }
    let mut e = rho.log2().floor() as i32;
    // log2 can be off by one ulp near powers of two.
    if 2f64.powi(e) > rho {
        e -= 1;
    } else if 2f64.powi(e + 1) <= rho {
        e += 1;
    }
    Ok(2f64.powi(e.div_euclid(2)))
}

/// Ceiling onto the grid `ℤ/Q`: entry `i` becomes `⌊Q·v_i + 1⌋ / Q`.
///
/// The result is strictly above `v` even where `Q·v_i` is already integral.
pub fn ceil_to_grid(v: &[Rational], q: &Integer) -> Result<GridVector> {
    if q.cmp0() != Ordering::Greater {
        return Err(Error::NonPositiveInput);
    }
    let mut numerators = Vec::with_capacity(v.len());
    for (i, x) in v.iter().enumerate() {
        if x.cmp0() != Ordering::Greater {
            return Err(Error::NonPositiveIterate { index: i });
        }
        let scaled = Integer::from(x.numer() * q);
        let (floor, _) = scaled.div_rem_floor(x.denom().clone());
        numerators.push(floor + 1u32);
    }
    GridVector::new(numerators, q.clone())
}

/// Grid ceiling of a common-denominator vector, in integer arithmetic only.
pub fn ceil_grid_vector(v: &GridVector, q: &Integer) -> Result<GridVector> {
    if q.cmp0() != Ordering::Greater {
        return Err(Error::NonPositiveInput);
    }
    if let Some(index) = v.first_non_positive() {
        return Err(Error::NonPositiveIterate { index });
    }
    let numerators = v
        .numerators
        .iter()
        .map(|n| {
            let scaled = Integer::from(n * q);
            let (floor, _) = scaled.div_rem_floor(v.denominator.clone());
            floor + 1u32
        })
        .collect();
    GridVector::new(numerators, q.clone())
}

/// Fraction-free (Bareiss) elimination of the square system `a·x = b`.
///
/// Returns `(x̃, d)` with `x = x̃ / d` and `d > 0`; `|d|` is the determinant
/// of `a`. Intermediate entries are minors of `a`, so their size stays
/// polynomial in the input size.
pub fn bareiss_solve(mut a: IntMatrix, mut b: Vec<Integer>) -> Result<(Vec<Integer>, Integer)> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.cols(),
        });
    }
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    if n == 0 {
        return Ok((Vec::new(), Integer::from(1)));
    }
    let mut prev = Integer::from(1);
    let mut tmp = Integer::new();
    for k in 0..n {
        let pivot_row = (k..n)
            .find(|&i| !a[(i, k)].is_zero())
            .ok_or(Error::SingularMatrix { column: k })?;
        if pivot_row != k {
            a.swap_rows(k, pivot_row);
            b.swap(k, pivot_row);
        }
        for i in k + 1..n {
            let aik = a[(i, k)].clone();
            for j in k + 1..n {
                tmp.assign(&a[(i, j)] * &a[(k, k)]);
                tmp -= &aik * &a[(k, j)];
                tmp.div_exact_mut(&prev);
                std::mem::swap(&mut a[(i, j)], &mut tmp);
            }
            tmp.assign(&b[i] * &a[(k, k)]);
            tmp -= &aik * &b[k];
            tmp.div_exact_mut(&prev);
            std::mem::swap(&mut b[i], &mut tmp);
            a[(i, k)] = Integer::new();
        }
        prev = a[(k, k)].clone();
    }
    // Back substitution on the scaled unknowns x̃ = d·x, which are integers.
    let det = prev;
    let mut x = vec![Integer::new(); n];
    for i in (0..n).rev() {
        let mut acc = Integer::from(&det * &b[i]);
        for j in i + 1..n {
            acc -= &a[(i, j)] * &x[j];
        }
        acc.div_exact_mut(&a[(i, i)]);
        x[i] = acc;
    }
    if det.cmp0() == Ordering::Less {
        for xi in &mut x {
            *xi = -std::mem::take(xi);
        }
        Ok((x, -det))
    } else {
        Ok((x, det))
    }
}

/// [`bareiss_solve`] for a symmetric positive-definite `a`, reading and
/// updating only the upper triangle. Every intermediate block stays
/// symmetric and every pivot is a positive leading minor, so no row swaps
/// are needed.
pub fn bareiss_solve_spd(mut a: IntMatrix, mut b: Vec<Integer>) -> Result<(Vec<Integer>, Integer)> {
    let n = a.rows();
    if a.cols() != n || b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if a.cols() != n { a.cols() } else { b.len() },
        });
    }
    let mut prev = Integer::from(1);
    let mut tmp = Integer::new();
    for k in 0..n {
        if a[(k, k)].cmp0() != Ordering::Greater {
            return Err(Error::SingularMatrix { column: k });
        }
        for i in k + 1..n {
            let aki = a[(k, i)].clone();
            for j in i..n {
                tmp.assign(&a[(i, j)] * &a[(k, k)]);
                tmp -= &aki * &a[(k, j)];
                tmp.div_exact_mut(&prev);
                std::mem::swap(&mut a[(i, j)], &mut tmp);
            }
            tmp.assign(&b[i] * &a[(k, k)]);
            tmp -= &aki * &b[k];
            tmp.div_exact_mut(&prev);
            std::mem::swap(&mut b[i], &mut tmp);
        }
        prev = a[(k, k)].clone();
    }
    let det = prev;
    let mut x = vec![Integer::new(); n];
    for i in (0..n).rev() {
        let mut acc = Integer::from(&det * &b[i]);
        for j in i + 1..n {
            acc -= &a[(i, j)] * &x[j];
        }
        acc.div_exact_mut(&a[(i, i)]);
        x[i] = acc;
    }
    Ok((x, det))
}

/// Exact solution of `h·d = g` for a symmetric positive-definite rational `h`.
///
/// Rows are scaled to integers, then solved by [`bareiss_solve`].
pub fn solve_spd_exact(h: &QMatrix, g: &[Rational]) -> Result<Vec<Rational>> {
    let n = h.rows();
    if h.cols() != n || g.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if h.cols() != n { h.cols() } else { g.len() },
        });
    }
    let mut rows = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    for i in 0..n {
        let mut scale = g[i].denom().clone();
        for r in h.row(i) {
            scale.lcm_mut(r.denom());
        }
        let row: Vec<Integer> = h
            .row(i)
            .iter()
            .map(|r| Integer::from(r.numer() * Integer::from(&scale / r.denom())))
            .collect();
        rows.push(row);
        rhs.push(Integer::from(g[i].numer() * Integer::from(&scale / g[i].denom())));
    }
    let (num, det) = bareiss_solve(Matrix::from_rows(rows, n)?, rhs)?;
    Ok(num
        .into_iter()
        .map(|x| Rational::from((x, det.clone())))
        .collect())
}

/// Cholesky solve of `h·d = g` for a symmetric positive-definite float `h`.
pub fn solve_spd_float(h: &Matrix<f64>, g: &[f64]) -> Result<Vec<f64>> {
    let n = h.rows();
    if h.cols() != n || g.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if h.cols() != n { h.cols() } else { g.len() },
        });
    }
    let mut l = Matrix::from_fn(n, n, |_, _| 0.0);
    for j in 0..n {
        let mut diag = h[(j, j)];
        for k in 0..j {
            diag -= l[(j, k)] * l[(j, k)];
        }
        if !(diag > 0.0) || !diag.is_finite() {
            return Err(Error::SingularMatrix { column: j });
        }
        let ljj = diag.sqrt();
        l[(j, j)] = ljj;
        for i in j + 1..n {
            let mut s = h[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / ljj;
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = g[i];
        for k in 0..i {
            s -= l[(i, k)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[(k, i)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    Ok(x)
}

/// Basis of the right null space of `a`, one vector per free column of the
/// reduced row echelon form, in increasing free-column order. Each basis
/// vector has a 1 at its free column.
pub fn null_space(a: &QMatrix) -> Vec<Vec<Rational>> {
    let (m, n) = (a.rows(), a.cols());
    let mut r = a.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row == m {
            break;
        }
        let Some(p) = (row..m).find(|&i| !r[(i, col)].is_zero()) else {
            continue;
        };
        r.swap_rows(row, p);
        let inv = Rational::from(r[(row, col)].recip_ref());
        for j in col..n {
            r[(row, j)] *= &inv;
        }
        for i in 0..m {
            if i != row && !r[(i, col)].is_zero() {
                let f = r[(i, col)].clone();
                for j in col..n {
                    let delta = Rational::from(&f * &r[(row, j)]);
                    r[(i, j)] -= delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let mut basis = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rational::new(); n];
        v[free] = Rational::from(1);
        for (prow, &pcol) in pivots.iter().enumerate() {
            v[pcol] = -Rational::from(&r[(prow, free)]);
        }
        basis.push(v);
    }
    basis
}

/// Rank of a rational matrix.
pub fn rank(a: &QMatrix) -> usize {
    a.cols() - null_space(a).len()
}
