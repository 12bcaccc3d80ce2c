//! Univariate polynomials over the rationals.
//!
//! Small dense helper used for characteristic polynomials of multiplication
//! matrices, squarefree decomposition (which yields exact eigenvalue
//! multiplicities), and the partial-fraction inverses behind the idempotents
//! of an Artinian quotient.

use num_rational::BigRational;
use num_traits::{One, Zero};

/// Coefficients in ascending degree order; no trailing zeros.
#[derive(Clone, PartialEq, Debug)]
pub struct UniPoly(Vec<BigRational>);

impl UniPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().map(Zero::is_zero).unwrap_or(false) {
            coeffs.pop();
        }
        UniPoly(coeffs)
    }

    pub fn zero() -> Self {
        UniPoly(Vec::new())
    }

    pub fn one() -> Self {
        UniPoly(vec![One::one()])
    }

    pub fn monomial(c: BigRational, deg: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut v = vec![BigRational::zero(); deg + 1];
        v[deg] = c;
        UniPoly(v)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.0.last()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let mut out = vec![BigRational::zero(); n];
        for (i, c) in self.0.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.0.iter().enumerate() {
            out[i] += c;
        }
        UniPoly::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let mut out = vec![BigRational::zero(); n];
        for (i, c) in self.0.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.0.iter().enumerate() {
            out[i] -= c;
        }
        UniPoly::new(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        UniPoly::new(self.0.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(lc) => self.scale(&lc.recip()),
        }
    }

    pub fn derivative(&self) -> Self {
        if self.0.len() <= 1 {
            return Self::zero();
        }
        UniPoly::new(
            self.0[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * BigRational::from_integer((i as i64 + 1).into()))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Long division: `self = q * div + r` with `deg r < deg div`.
    pub fn divmod(&self, div: &Self) -> (Self, Self) {
        let dlc = div.leading().expect("division by zero polynomial");
        let dd = div.degree().unwrap();
        let mut rem = self.0.clone();
        let mut quo = vec![BigRational::zero(); self.0.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1;
            let c = rem[k].clone() / dlc;
            if !c.is_zero() {
                quo[k - dd] = c.clone();
                for (i, dc) in div.0.iter().enumerate() {
                    rem[k - dd + i] -= &c * dc;
                }
            }
            rem.pop();
        }
        (UniPoly::new(quo), UniPoly::new(rem))
    }

    pub fn div_exact(&self, div: &Self) -> Self {
        let (q, r) = self.divmod(div);
        assert!(r.is_zero(), "inexact univariate division");
        q
    }

    /// Monic gcd via the Euclidean algorithm.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divmod(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd: returns `(g, u, v)` with `u*self + v*other = g`, `g` monic.
    pub fn xgcd(&self, other: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut u0, mut u1) = (Self::one(), Self::zero());
        let (mut v0, mut v1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.divmod(&r1);
            let nu = u0.sub(&q.mul(&u1));
            let nv = v0.sub(&q.mul(&v1));
            r0 = r1;
            r1 = r;
            u0 = u1;
            u1 = nu;
            v0 = v1;
            v1 = nv;
        }
        match r0.leading() {
            None => (Self::zero(), Self::zero(), Self::zero()),
            Some(lc) => {
                let inv = lc.recip();
                (r0.scale(&inv), u0.scale(&inv), v0.scale(&inv))
            }
        }
    }

    /// Yun's squarefree decomposition: `self = lc * prod_i f_i^i` with each
    /// `f_i` monic squarefree and pairwise coprime. Returns `(i, f_i)` pairs
    /// for the nonconstant factors, ascending in `i`.
    pub fn squarefree_decomposition(&self) -> Vec<(usize, Self)> {
        let f = self.monic();
        let Some(deg) = f.degree() else {
            return Vec::new();
        };
        if deg == 0 {
            return Vec::new();
        }
        let fp = f.derivative();
        let mut out = Vec::new();
        let d = f.gcd(&fp);
        if d.degree() == Some(0) {
            return vec![(1, f)];
        }
        let mut b = f.div_exact(&d);
        let mut c = fp.div_exact(&d);
        let mut z = c.sub(&b.derivative());
        let mut i = 1;
        while b.degree().map(|d| d > 0).unwrap_or(false) {
            let a = b.gcd(&z);
            if a.degree().map(|d| d > 0).unwrap_or(false) {
                out.push((i, a.clone()));
            }
            b = b.div_exact(&a);
            c = z.div_exact(&a);
            z = c.sub(&b.derivative());
            i += 1;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn from_roots(roots: &[(i64, usize)]) -> UniPoly {
        // prod (x - r)^m
        let mut p = UniPoly::one();
        for &(r, m) in roots {
            let lin = UniPoly::new(vec![rat(-r), rat(1)]);
            for _ in 0..m {
                p = p.mul(&lin);
            }
        }
        p
    }

    #[test]
    fn divmod_round_trip() {
        let a = from_roots(&[(1, 2), (3, 1)]);
        let b = UniPoly::new(vec![rat(2), rat(0), rat(1)]);
        let (q, r) = a.divmod(&b);
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree() < b.degree());
    }

    #[test]
    fn gcd_of_shared_roots() {
        let a = from_roots(&[(1, 1), (2, 1)]);
        let b = from_roots(&[(2, 1), (5, 1)]);
        assert_eq!(a.gcd(&b), from_roots(&[(2, 1)]));
    }

    #[test]
    fn xgcd_bezout_identity() {
        let a = from_roots(&[(1, 2)]);
        let b = from_roots(&[(4, 1), (7, 1)]);
        let (g, u, v) = a.xgcd(&b);
        assert_eq!(g, UniPoly::one());
        assert_eq!(u.mul(&a).add(&v.mul(&b)), UniPoly::one());
    }

    #[test]
    fn squarefree_decomposition_recovers_multiplicities() {
        // (x-1)^1 (x-2)^2 (x-3)^3, scaled by 7
        let p = from_roots(&[(1, 1), (2, 2), (3, 3)]).scale(&rat(7));
        let parts = p.squarefree_decomposition();
        assert_eq!(
            parts,
            vec![
                (1, from_roots(&[(1, 1)])),
                (2, from_roots(&[(2, 1)])),
                (3, from_roots(&[(3, 1)])),
            ]
        );

        // squarefree input comes back whole
        let q = from_roots(&[(1, 1), (5, 1)]);
        assert_eq!(q.squarefree_decomposition(), vec![(1, q)]);
    }
}
