//! Text formats for feasibility instances and LPs, and exact verification.
//!
//! An instance file is a header `M N`, then `M` rows of `N` decimal
//! integers, then optional `# key: value` lines:
//!
//! ```text
//! 2 2
//! 3 4
//! -1 2
//! # seed: 7
//! # margin: 1/4
//! # planted: 3/2 5/4
//! # bits: 3
//! # size: 8
//! ```
//!
//! `bits` is the largest entry bit length and `size` the sum of entry bit
//! lengths; both are recomputed on parse and must match. An LP file adds a
//! `b:` line and an optional `c:` line after the rows.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::str::FromStr;

use rug::{Integer, Rational};

use crate::arith::{dot_int_rational, IntMatrix, Matrix};
use crate::error::{Error, Result};

/// Generator metadata carried alongside an instance.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Meta {
    pub seed: Option<u64>,
    pub margin: Option<Rational>,
    /// Witness with normalized margin at least 1 (see [`crate::generate`]).
    pub planted: Option<Vec<Rational>>,
    /// Unrecognized comment lines, kept verbatim without the leading `#`.
    pub comments: Vec<String>,
}

impl Meta {
    fn has_generator_fields(&self) -> bool {
        self.seed.is_some() || self.margin.is_some() || self.planted.is_some()
    }
}

/// A homogeneous strict feasibility instance `Ax > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    a: IntMatrix,
    pub meta: Meta,
}

impl Instance {
    /// Rejects zero rows, which make `Ax > 0` infeasible.
    pub fn new(a: IntMatrix) -> Result<Self> {
        if let Some(row) = a.row_iter().position(|r| r.iter().all(|x| x.is_zero())) {
            return Err(Error::ZeroRow { row });
        }
        Ok(Self {
            a,
            meta: Meta::default(),
        })
    }

    pub fn with_meta(mut self, meta: Meta) -> Self {
        self.meta = meta;
        self
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.a
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    /// Largest entry bit length `B`.
    pub fn bits(&self) -> u32 {
        self.a.max_bits()
    }

    /// Total bit size `L`, the sum of entry bit lengths.
    pub fn size(&self) -> u64 {
        total_bits(&self.a)
    }

    /// `ωᵀω` of the planted witness, if any.
    pub fn planted_norm_sq(&self) -> Option<Rational> {
        self.meta.planted.as_ref().map(|w| {
            let mut acc = Rational::new();
            for x in w {
                acc += Rational::from(x.square_ref());
            }
            acc
        })
    }
}

fn total_bits(a: &IntMatrix) -> u64 {
    a.row_iter()
        .flatten()
        .map(|x| u64::from(x.significant_bits()))
        .sum()
}

impl FromStr for Instance {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_instance(s)
    }
}

/// A linear program `min cᵀx` subject to `Ax ≥ b`, or the feasibility
/// question `Ax ≥ b` when `c` is absent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lp {
    pub a: IntMatrix,
    pub b: Vec<Integer>,
    pub c: Option<Vec<Integer>>,
}

impl Lp {
    pub fn new(a: IntMatrix, b: Vec<Integer>, c: Option<Vec<Integer>>) -> Result<Self> {
        if b.len() != a.rows() {
            return Err(Error::DimensionMismatch {
                expected: a.rows(),
                found: b.len(),
            });
        }
        if let Some(c) = &c {
            if c.len() != a.cols() {
                return Err(Error::DimensionMismatch {
                    expected: a.cols(),
                    found: c.len(),
                });
            }
        }
        Ok(Self { a, b, c })
    }

    /// Convenience constructor from small literals.
    pub fn from_i64(a: &[&[i64]], b: &[i64], c: Option<&[i64]>) -> Result<Self> {
        let ints = |v: &[i64]| v.iter().map(|&x| Integer::from(x)).collect::<Vec<_>>();
        Self::new(IntMatrix::from_i64(a), ints(b), c.map(ints))
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    /// Next non-blank line with its 1-based number, comments included.
    fn next_line(&mut self) -> Option<(usize, &'a str)> {
        self.inner
            .by_ref()
            .map(|(i, l)| (i + 1, l.trim()))
            .find(|(_, l)| !l.is_empty())
    }
}

fn parse_integers(line: usize, text: &str) -> Result<Vec<Integer>> {
    text.split_whitespace()
        .map(|tok| {
            Integer::from_str_radix(tok, 10).map_err(|_| Error::NonIntegerEntry {
                line,
                token: tok.to_string(),
            })
        })
        .collect()
}

/// Parses `p/q` or `p`.
pub fn parse_rational(token: &str) -> Option<Rational> {
    let r = Rational::from_str_radix(token, 10).ok()?;
    Some(r)
}

/// Whitespace-separated rationals `p/q`.
pub fn parse_rational_vector(text: &str) -> Option<Vec<Rational>> {
    text.split_whitespace().map(parse_rational).collect()
}

pub fn format_rational(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn format_rational_vector(v: &[Rational]) -> String {
    v.iter().map(format_rational).collect::<Vec<_>>().join(" ")
}

fn parse_header(lines: &mut Lines, comments: &mut Vec<(usize, String)>) -> Result<(usize, usize)> {
    loop {
        let Some((no, line)) = lines.next_line() else {
            return Err(Error::MalformedHeader("empty input".into()));
        };
        if let Some(c) = line.strip_prefix('#') {
            comments.push((no, c.to_string()));
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let dims: Option<Vec<usize>> = parts.iter().map(|p| p.parse().ok()).collect();
        return match dims.as_deref() {
            Some(&[m, n]) if m >= 1 && n >= 1 => Ok((m, n)),
            _ => Err(Error::MalformedHeader(line.to_string())),
        };
    }
}

/// Reads the header and `M` rows; returns the matrix and the remaining
/// non-comment lines, collecting comments along the way.
fn parse_body<'a>(
    text: &'a str,
    comments: &mut Vec<(usize, String)>,
) -> Result<(IntMatrix, Vec<(usize, &'a str)>)> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let (m, n) = parse_header(&mut lines, comments)?;
    let mut rows = Vec::with_capacity(m);
    while rows.len() < m {
        let Some((no, line)) = lines.next_line() else {
            return Err(Error::MalformedHeader(format!(
                "header declares {m} rows, found {}",
                rows.len()
            )));
        };
        if let Some(c) = line.strip_prefix('#') {
            comments.push((no, c.to_string()));
            continue;
        }
        let row = parse_integers(no, line)?;
        if row.len() != n {
            return Err(Error::RowLengthMismatch {
                line: no,
                expected: n,
                found: row.len(),
            });
        }
        rows.push(row);
    }
    let mut rest = Vec::new();
    while let Some((no, line)) = lines.next_line() {
        if let Some(c) = line.strip_prefix('#') {
            comments.push((no, c.to_string()));
        } else {
            rest.push((no, line));
        }
    }
    Ok((Matrix::from_rows(rows, n)?, rest))
}

fn malformed(line: usize, message: impl Into<String>) -> Error {
    Error::MalformedMeta {
        line,
        message: message.into(),
    }
}

/// Parses the instance format described in the module docs.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut comments = Vec::new();
    let (a, rest) = parse_body(text, &mut comments)?;
    if let Some(&(no, line)) = rest.first() {
        return Err(Error::RowLengthMismatch {
            line: no,
            expected: 0,
            found: line.split_whitespace().count(),
        });
    }
    let mut instance = Instance::new(a)?;
    let mut meta = Meta::default();
    for (no, body) in comments {
        let Some((key, value)) = body.split_once(':') else {
            meta.comments.push(body);
            continue;
        };
        let value = value.trim();
        match key.trim() {
            "seed" => {
                meta.seed = Some(value.parse().map_err(|_| malformed(no, "seed is not a u64"))?)
            }
            "margin" => {
                meta.margin =
                    Some(parse_rational(value).ok_or_else(|| malformed(no, "bad margin"))?)
            }
            "planted" => {
                let w = parse_rational_vector(value)
                    .ok_or_else(|| malformed(no, "bad planted vector"))?;
                if w.len() != instance.n() {
                    return Err(malformed(no, "planted vector has the wrong length"));
                }
                meta.planted = Some(w);
            }
            "bits" => {
                let b: u32 = value.parse().map_err(|_| malformed(no, "bits is not an integer"))?;
                if b != instance.bits() {
                    return Err(malformed(no, format!("bits {b} != recomputed {}", instance.bits())));
                }
            }
            "size" => {
                let l: u64 = value.parse().map_err(|_| malformed(no, "size is not an integer"))?;
                if l != instance.size() {
                    return Err(malformed(no, format!("size {l} != recomputed {}", instance.size())));
                }
            }
            _ => meta.comments.push(body),
        }
    }
    instance.meta = meta;
    Ok(instance)
}

fn write_matrix(out: &mut String, a: &IntMatrix) {
    let _ = writeln!(out, "{} {}", a.rows(), a.cols());
    for row in a.row_iter() {
        let line: Vec<String> = row.iter().map(Integer::to_string).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
}

/// Canonical text form. `bits` and `size` are written whenever the instance
/// carries generator metadata.
pub fn write_instance(instance: &Instance) -> String {
    let mut out = String::new();
    write_matrix(&mut out, &instance.a);
    let meta = &instance.meta;
    if let Some(seed) = meta.seed {
        let _ = writeln!(out, "# seed: {seed}");
    }
    if let Some(margin) = &meta.margin {
        let _ = writeln!(out, "# margin: {}", format_rational(margin));
    }
    if let Some(w) = &meta.planted {
        let _ = writeln!(out, "# planted: {}", format_rational_vector(w));
    }
    if meta.has_generator_fields() {
        let _ = writeln!(out, "# bits: {}", instance.bits());
        let _ = writeln!(out, "# size: {}", instance.size());
    }
    for c in &meta.comments {
        let _ = writeln!(out, "#{c}");
    }
    out
}

/// Parses an LP file: the instance body followed by `b:` and optional `c:`.
pub fn parse_lp(text: &str) -> Result<Lp> {
    let mut comments = Vec::new();
    let (a, rest) = parse_body(text, &mut comments)?;
    let (mut b, mut c) = (None, None);
    for (no, line) in rest {
        let (slot, body, want) = if let Some(body) = line.strip_prefix("b:") {
            (&mut b, body, a.rows())
        } else if let Some(body) = line.strip_prefix("c:") {
            (&mut c, body, a.cols())
        } else {
            return Err(malformed(no, "expected a `b:` or `c:` line"));
        };
        let v = parse_integers(no, body)?;
        if v.len() != want {
            return Err(Error::RowLengthMismatch {
                line: no,
                expected: want,
                found: v.len(),
            });
        }
        *slot = Some(v);
    }
    let b = b.ok_or_else(|| malformed(0, "missing `b:` line"))?;
    Lp::new(a, b, c)
}

pub fn write_lp(lp: &Lp) -> String {
    let mut out = String::new();
    write_matrix(&mut out, &lp.a);
    let join = |v: &[Integer]| v.iter().map(Integer::to_string).collect::<Vec<_>>().join(" ");
    let _ = writeln!(out, "b: {}", join(&lp.b));
    if let Some(c) = &lp.c {
        let _ = writeln!(out, "c: {}", join(c));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `Ax > b`
    Strict,
    /// `Ax ≥ b`
    Weak,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub ok: bool,
    /// `min (Ax − b)`; zero for an empty system.
    pub margin: Rational,
}

/// Exact check of `Ax ⋈ b` (with `b = 0` by default).
pub fn verify_matrix(
    a: &IntMatrix,
    x: &[Rational],
    relation: Relation,
    rhs: Option<&[Integer]>,
) -> Result<Verification> {
    if x.len() != a.cols() {
        return Err(Error::DimensionMismatch {
            expected: a.cols(),
            found: x.len(),
        });
    }
    if let Some(b) = rhs {
        if b.len() != a.rows() {
            return Err(Error::DimensionMismatch {
                expected: a.rows(),
                found: b.len(),
            });
        }
    }
    let mut margin: Option<Rational> = None;
    for (m, row) in a.row_iter().enumerate() {
        let mut r = dot_int_rational(row, x);
        if let Some(b) = rhs {
            r -= &b[m];
        }
        if margin.as_ref().is_none_or(|cur| r < *cur) {
            margin = Some(r);
        }
    }
    let margin = margin.unwrap_or_default();
    let ok = match relation {
        Relation::Strict => a.rows() == 0 || margin.cmp0() == Ordering::Greater,
        Relation::Weak => margin.cmp0() != Ordering::Less,
    };
    Ok(Verification { ok, margin })
}

/// Exact check of a candidate solution against an instance.
pub fn verify_solution_exact(
    instance: &Instance,
    x: &[Rational],
    relation: Relation,
    rhs: Option<&[Integer]>,
) -> Result<Verification> {
    verify_matrix(&instance.a, x, relation, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn parse_examples() {
        let i = parse_instance("1 1\n1\n").unwrap();
        assert_eq!(i.matrix(), &IntMatrix::from_i64(&[&[1]]));
        let i = parse_instance("2 2\n1 0\n0 1\n").unwrap();
        assert_eq!(i.matrix(), &IntMatrix::from_i64(&[&[1, 0], &[0, 1]]));
        let text = "1 2\n3 4\n";
        let i = parse_instance(text).unwrap();
        assert_eq!(i.bits(), 3);
        assert_eq!(write_instance(&i), text);
    }

    #[test]
    fn meta_round_trip() {
        let text = "2 2\n3 4\n-1 2\n# seed: 7\n# margin: 1/4\n# planted: 3/2 5/4\n# bits: 3\n# size: 8\n# a note\n";
        let i = parse_instance(text).unwrap();
        assert_eq!(i.meta.seed, Some(7));
        assert_eq!(i.meta.planted, Some(vec![q(3, 2), q(5, 4)]));
        assert_eq!(i.size(), 8);
        assert_eq!(write_instance(&i), text);
        assert_eq!(parse_instance(&write_instance(&i)).unwrap(), i);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_instance(""), Err(Error::MalformedHeader(_))));
        assert!(matches!(parse_instance("2\n1\n"), Err(Error::MalformedHeader(_))));
        assert!(matches!(parse_instance("2 1\n1\n"), Err(Error::MalformedHeader(_))));
        assert!(matches!(
            parse_instance("1 2\n1\n"),
            Err(Error::RowLengthMismatch { line: 2, expected: 2, found: 1 })
        ));
        assert!(matches!(
            parse_instance("1 1\n1.5\n"),
            Err(Error::NonIntegerEntry { line: 2, .. })
        ));
        assert!(matches!(parse_instance("1 2\n0 0\n"), Err(Error::ZeroRow { row: 0 })));
        assert!(matches!(
            parse_instance("1 1\n5\n# bits: 2\n"),
            Err(Error::MalformedMeta { line: 3, .. })
        ));
    }

    #[test]
    fn arbitrary_precision_entries() {
        let big = "123456789012345678901234567890";
        let i = parse_instance(&format!("1 2\n{big} -1\n")).unwrap();
        assert_eq!(i.matrix()[(0, 0)].to_string(), big);
    }

    #[test]
    fn lp_round_trip() {
        let lp = Lp::from_i64(&[&[1, 0], &[0, 1]], &[1, 2], Some(&[1, 1])).unwrap();
        let text = write_lp(&lp);
        assert_eq!(text, "2 2\n1 0\n0 1\nb: 1 2\nc: 1 1\n");
        assert_eq!(parse_lp(&text).unwrap(), lp);
        let feas = parse_lp("1 1\n0\nb: -1\n").unwrap();
        assert!(feas.c.is_none());
        assert!(parse_lp("1 1\n1\n").is_err());
    }

    #[test]
    fn verify_examples() {
        let one = Instance::new(IntMatrix::from_i64(&[&[1]])).unwrap();
        let v = verify_solution_exact(&one, &[q(1, 1)], Relation::Strict, None).unwrap();
        assert!(v.ok);
        assert_eq!(v.margin, 1);
        let opp = Instance::new(IntMatrix::from_i64(&[&[1], &[-1]])).unwrap();
        assert!(!verify_solution_exact(&opp, &[q(0, 1)], Relation::Strict, None).unwrap().ok);
        let two = Instance::new(IntMatrix::from_i64(&[&[2]])).unwrap();
        let v = verify_solution_exact(&two, &[q(1, 1)], Relation::Weak, Some(&[Integer::from(2)]))
            .unwrap();
        assert!(v.ok);
        assert_eq!(v.margin, 0);
        assert!(matches!(
            verify_solution_exact(&two, &[q(1, 1), q(1, 1)], Relation::Weak, None),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
