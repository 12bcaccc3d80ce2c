//! Sparse multivariate polynomials with exact or floating coefficients.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose `Ord` is the
//! graded reverse lexicographic order. That single order drives leading-term
//! selection, division, and the monomial indexing of the SDP builder.

mod parse;

pub use parse::{parse_polynomial, ParseError};

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Coeff;

/// Exact-coefficient polynomial, the workhorse of all symbolic modules.
pub type QPoly = Polynomial<BigRational>;

/// Float-coefficient polynomial, used for SDP outputs.
pub type FPoly = Polynomial<f64>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("cannot homogenize zero")]
    ZeroHomogenize,
    #[error("cannot take the top form of zero")]
    ZeroTopForm,
    #[error("dimension mismatch: polynomial has {expected} variables, point has {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Exponent vector; the length is the number of variables.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Self) -> bool {
        debug_assert_eq!(self.0.len(), other.0.len());
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`; caller must ensure divisibility.
    pub fn div_into(&self, other: &Self) -> Self {
        debug_assert!(self.divides(other));
        Monomial(other.0.iter().zip(&self.0).map(|(b, a)| b - a).collect())
    }

    pub fn lcm(&self, other: &Self) -> Self {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    pub fn coprime(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Evaluate at a complex point.
    pub fn eval_complex(&self, z: &[Complex64]) -> Complex64 {
        self.0
            .iter()
            .zip(z)
            .fold(Complex64::new(1.0, 0.0), |acc, (&e, zi)| {
                acc * zi.powu(e)
            })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Graded reverse lexicographic order.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        debug_assert_eq!(self.0.len(), other.0.len());
        let (da, db) = (self.degree(), other.degree());
        if da != db {
            return da.cmp(&db);
        }
        // Equal degree: larger is the one whose rightmost differing exponent
        // is smaller.
        for i in (0..self.0.len()).rev() {
            let (a, b) = (self.0[i], other.0[i]);
            if a != b {
                return if a < b { Ordering::Greater } else { Ordering::Less };
            }
        }
        Ordering::Equal
    }
}

/// Sparse polynomial over the coefficient field `C`.
///
/// Invariants: no stored zero coefficients; all monomial exponent vectors
/// have length `nvars`. The zero polynomial has an empty term map and its
/// degree is `None` (the "minus infinity" sentinel).
#[derive(Clone, PartialEq, Debug)]
pub struct Polynomial<C> {
    nvars: usize,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coeff> Polynomial<C> {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C::one())
    }

    pub fn variable(nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        let mut p = Self::zero(nvars);
        p.terms.insert(Monomial::var(nvars, i), C::one());
        p
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, C)>,
    {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars, "monomial arity mismatch");
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Ascending grevlex iteration over terms.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    /// Leading term under grevlex.
    pub fn leading(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&c);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.neg());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k.mul(c)))
                .collect(),
        }
    }

    /// Multiply by a single term `c * x^m`.
    pub fn mul_term(&self, m: &Monomial, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(mm, k)| (mm.mul(m), k.mul(c)))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1.mul(c2));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    /// Evaluate at a point of the coefficient field.
    pub fn eval(&self, point: &[C]) -> C {
        assert_eq!(point.len(), self.nvars);
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t = t.mul(&point[i]);
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Evaluate at a complex point by direct term summation.
    pub fn eval_complex(&self, z: &[Complex64]) -> Result<Complex64, PolyError> {
        if z.len() != self.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars,
                got: z.len(),
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            acc += m.eval_complex(z) * c.to_f64();
        }
        Ok(acc)
    }

    /// Partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> Self {
        assert!(i < self.nvars);
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut me = m.clone();
            me.0[i] -= 1;
            out.add_term(me, c.mul(&C::from_i64(e as i64)));
        }
        out
    }

    /// The vector of all `n` partial derivatives.
    pub fn gradient(&self) -> Vec<Self> {
        (0..self.nvars).map(|i| self.derivative(i)).collect()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| m.degree());
        match degs.next() {
            None => true,
            Some(d0) => degs.all(|d| d == d0),
        }
    }

    /// Homogenization: prepends a fresh variable `x0` so that the result is
    /// homogeneous of the original degree and restricts back at `x0 = 1`.
    pub fn homogenize(&self) -> Result<Self, PolyError> {
        let d = self.degree().ok_or(PolyError::ZeroHomogenize)?;
        let mut out = Self::zero(self.nvars + 1);
        for (m, c) in &self.terms {
            let mut e = Vec::with_capacity(self.nvars + 1);
            e.push((d - m.degree()) as u32);
            e.extend_from_slice(&m.0);
            out.terms.insert(Monomial(e), c.clone());
        }
        Ok(out)
    }

    /// Top-degree form: the sum of the terms of maximal total degree, in the
    /// same variables.
    pub fn top_form(&self) -> Result<Self, PolyError> {
        let d = self.degree().ok_or(PolyError::ZeroTopForm)?;
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            if m.degree() == d {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        Ok(out)
    }

    /// Substitute `x0 = 1` and drop the first variable.
    pub fn dehomogenize(&self) -> Self {
        assert!(self.nvars >= 1, "dehomogenize needs at least one variable");
        let mut out = Self::zero(self.nvars - 1);
        for (m, c) in &self.terms {
            out.add_term(Monomial(m.0[1..].to_vec()), c.clone());
        }
        out
    }

    /// Substitute `x_var = value` and drop that variable.
    pub fn substitute(&self, var: usize, value: &C) -> Polynomial<C> {
        assert!(var < self.nvars);
        let mut out = Polynomial::zero(self.nvars - 1);
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            for _ in 0..m.0[var] {
                coeff = coeff.mul(value);
            }
            let mut e = m.0.clone();
            e.remove(var);
            out.add_term(Monomial(e), coeff);
        }
        out
    }

    /// Substitute `x_i -> x_i + shift_i` (exact Taylor shift).
    pub fn translate(&self, shift: &[C]) -> Self {
        assert_eq!(shift.len(), self.nvars);
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            // expand prod_i (x_i + s_i)^{e_i}
            let mut expanded = Self::constant(self.nvars, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let binom = Self::from_terms(
                    self.nvars,
                    [
                        (Monomial::var(self.nvars, i), C::one()),
                        (Monomial::one(self.nvars), shift[i].clone()),
                    ],
                );
                expanded = expanded.mul(&binom.pow(e));
            }
            out = out.add(&expanded);
        }
        out
    }

    pub fn map_coeff<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        let mut out = Polynomial::<D>::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Largest coefficient magnitude, as `f64`; 0 for the zero polynomial.
    pub fn max_coeff_abs(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.abs_f64())
            .fold(0.0, f64::max)
    }

    /// Render with the given variable names.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a, C> {
        PolyDisplay { poly: self, names: Some(names) }
    }
}

impl QPoly {
    /// Promote into a quadratic extension field.
    pub fn to_quad(&self) -> Polynomial<crate::scalar::Quad> {
        self.map_coeff(|c| crate::scalar::Quad::from_rat(c.clone()))
    }

    /// Convert coefficients to `f64`.
    pub fn to_float(&self) -> FPoly {
        self.map_coeff(|c| crate::scalar::rational_to_f64(c))
    }
}

impl<C: Coeff> std::ops::Add for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn add(self, rhs: Self) -> Polynomial<C> {
        Polynomial::add(self, rhs)
    }
}

impl<C: Coeff> std::ops::Sub for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn sub(self, rhs: Self) -> Polynomial<C> {
        Polynomial::sub(self, rhs)
    }
}

impl<C: Coeff> std::ops::Mul for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn mul(self, rhs: Self) -> Polynomial<C> {
        Polynomial::mul(self, rhs)
    }
}

impl<C: Coeff> std::ops::Neg for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        Polynomial::neg(self)
    }
}

pub struct PolyDisplay<'a, C> {
    poly: &'a Polynomial<C>,
    names: Option<&'a [String]>,
}

impl<C: Coeff> fmt::Display for PolyDisplay<'_, C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        // descending grevlex reads naturally (leading term first)
        for (m, c) in self.poly.terms.iter().rev() {
            let cs = format!("{c}");
            let (sign, mag) = match cs.strip_prefix('-') {
                Some(rest) => ("-", rest.to_string()),
                None => ("+", cs),
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {sign} ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = match self.names {
                    Some(ns) => ns[i].clone(),
                    None => format!("x{}", i + 1),
                };
                if e == 1 {
                    factors.push(name);
                } else {
                    factors.push(format!("{name}^{e}"));
                }
            }
            if factors.is_empty() {
                write!(f, "{mag}")?;
            } else if mag == "1" {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{mag}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl<C: Coeff> fmt::Display for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", PolyDisplay { poly: self, names: None })
    }
}

/// One term of the interchange JSON format: coefficient string plus exponent
/// vector.
#[derive(Serialize, Deserialize)]
pub struct JsonTerm {
    pub c: String,
    pub e: Vec<u32>,
}

impl QPoly {
    pub fn to_json_terms(&self) -> Vec<JsonTerm> {
        self.terms
            .iter()
            .rev()
            .map(|(m, c)| JsonTerm {
                c: c.to_string(),
                e: m.0.clone(),
            })
            .collect()
    }

    pub fn from_json_terms(nvars: usize, terms: &[JsonTerm]) -> Result<Self, ParseError> {
        let mut p = QPoly::zero(nvars);
        for t in terms {
            if t.e.len() != nvars {
                return Err(ParseError::new(
                    format!("exponent vector length {} != {} variables", t.e.len(), nvars),
                    0,
                ));
            }
            let c: BigRational = t
                .c
                .trim()
                .parse()
                .map_err(|_| ParseError::new(format!("bad rational '{}'", t.c), 0))?;
            p.add_term(Monomial(t.e.clone()), c);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn p(src: &str, n: usize) -> QPoly {
        let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        parse_polynomial(src, &names).unwrap()
    }

    #[test]
    fn grevlex_order() {
        // degree dominates
        assert!(Monomial(vec![2, 0]) > Monomial(vec![1, 0]));
        // same degree: x1^2 > x1*x2 > x2^2
        assert!(Monomial(vec![2, 0]) > Monomial(vec![1, 1]));
        assert!(Monomial(vec![1, 1]) > Monomial(vec![0, 2]));
        // three variables, degree 2: x1x3 vs x2^2 -> rightmost diff favors x2^2
        assert!(Monomial(vec![0, 2, 0]) > Monomial(vec![1, 0, 1]));
    }

    #[test]
    fn homogenize_examples() {
        let q = p("x1^2 + 5*x1*x2 + 3*x1 - x2", 2);
        let h = q.homogenize().unwrap();
        // x1^2 + 5 x1 x2 + 3 x0 x1 - x0 x2 (x0 prepended at index 0)
        let expect = QPoly::from_terms(
            3,
            [
                (Monomial(vec![0, 2, 0]), rat(1)),
                (Monomial(vec![0, 1, 1]), rat(5)),
                (Monomial(vec![1, 1, 0]), rat(3)),
                (Monomial(vec![1, 0, 1]), rat(-1)),
            ],
        );
        assert_eq!(h, expect);
        assert!(h.is_homogeneous());
        assert_eq!(h.degree(), q.degree());

        // constant stays a constant of degree 0
        let c = QPoly::constant(2, rat(7));
        assert_eq!(c.homogenize().unwrap().degree(), Some(0));

        // x1^3 - 1 -> x1^3 - x0^3
        let q = p("x1^3 - 1", 1);
        let h = q.homogenize().unwrap();
        let expect = QPoly::from_terms(
            2,
            [
                (Monomial(vec![0, 3]), rat(1)),
                (Monomial(vec![3, 0]), rat(-1)),
            ],
        );
        assert_eq!(h, expect);

        assert_eq!(
            QPoly::zero(2).homogenize().unwrap_err(),
            PolyError::ZeroHomogenize
        );
    }

    #[test]
    fn top_form_examples() {
        let q = p("x1^2 + 5*x1*x2 + 3*x1 - x2", 2);
        assert_eq!(q.top_form().unwrap(), p("x1^2 + 5*x1*x2", 2));
        assert_eq!(p("x1^2 - 1", 1).top_form().unwrap(), p("x1^2", 1));
        let hom = p("x1^3 + x1*x2^2", 2);
        assert_eq!(hom.top_form().unwrap(), hom);
    }

    #[test]
    fn top_form_is_homogenization_at_zero() {
        let q = p("x1^2 + 5*x1*x2 + 3*x1 - x2 + 4", 2);
        let h = q.homogenize().unwrap();
        // substitute x0 = 0: keep terms with exponent 0 in slot 0
        let mut at_zero = QPoly::zero(2);
        for (m, c) in h.terms() {
            if m.0[0] == 0 {
                at_zero.add_term(Monomial(m.0[1..].to_vec()), c.clone());
            }
        }
        assert_eq!(at_zero, q.top_form().unwrap());
    }

    #[test]
    fn dehomogenize_examples() {
        let q = QPoly::from_terms(
            2,
            [
                (Monomial(vec![0, 2]), rat(1)),
                (Monomial(vec![1, 1]), rat(3)),
            ],
        );
        assert_eq!(q.dehomogenize(), p("x1^2 + 3*x1", 1));
        let cube = QPoly::from_terms(1, [(Monomial(vec![3]), rat(1))]);
        assert_eq!(cube.dehomogenize(), QPoly::constant(0, rat(1)));
    }

    #[test]
    fn eval_complex_examples() {
        let q = p("x1*x2", 2);
        let v = q
            .eval_complex(&[Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0)])
            .unwrap();
        assert!((v - Complex64::new(6.0, 0.0)).norm() < 1e-12);

        let q = p("x1^2 + 1", 1);
        let v = q.eval_complex(&[Complex64::new(0.0, 1.0)]).unwrap();
        assert!(v.norm() < 1e-12);

        assert!(matches!(
            p("x1", 1).eval_complex(&[]),
            Err(PolyError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn gradient_examples() {
        let q = p("x1^2*x2", 2);
        let g = q.gradient();
        assert_eq!(g[0], p("2*x1*x2", 2));
        assert_eq!(g[1], p("x1^2", 2));

        let c = QPoly::constant(2, rat(9));
        assert!(c.gradient().iter().all(|d| d.is_zero()));

        // F = x^4 + (x^2-1)^2 has derivative 8x^3 - 4x
        let f = p("x1^4 + (x1^2 - 1)^2", 1);
        assert_eq!(f.derivative(0), p("8*x1^3 - 4*x1", 1));
    }

    #[test]
    fn translate_shifts_evaluation() {
        let q = p("(x1-1)^3 + x2", 2);
        let t = q.translate(&[rat(1), rat(-2)]);
        // t(x) = q(x1+1, x2-2) = x1^3 + x2 - 2
        assert_eq!(t, p("x1^3 + x2 - 2", 2));
    }

    #[test]
    fn json_terms_round_trip() {
        let q = p("x1^2 - 5/3*x2 + 2", 2);
        let terms = q.to_json_terms();
        let back = QPoly::from_json_terms(2, &terms).unwrap();
        assert_eq!(q, back);
    }

    #[test]
    fn display_round_trip() {
        let names: Vec<String> = vec!["x1".into(), "x2".into()];
        let q = p("x1^2 - 5/3*x1*x2 - 1", 2);
        let s = format!("{}", q.display_with(&names));
        assert_eq!(parse_polynomial(&s, &names).unwrap(), q);
    }
}
