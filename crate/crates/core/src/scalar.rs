//! Coefficient fields for polynomial arithmetic.
//!
//! All symbolic work runs over [`BigRational`]; certificate construction may
//! extend to a real quadratic field `Q(sqrt(m))` ([`Quad`]); the SDP solver
//! and complex evaluation use `f64`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A field usable as polynomial coefficients.
///
/// Every implementor is a Q-algebra: `from_rational` embeds the rationals.
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    /// True for exact fields (rationals, quadratic extensions), false for floats.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self) -> Option<Self>;
    fn from_rational(r: &BigRational) -> Self;
    fn to_f64(&self) -> f64;

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(v)))
    }

    fn div(&self, other: &Self) -> Self {
        self.mul(&other.inv().expect("division by zero"))
    }

    fn abs_f64(&self) -> f64 {
        self.to_f64().abs()
    }
}

impl Coeff for BigRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
}

impl Coeff for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if *self == 0.0 {
            None
        } else {
            Some(1.0 / self)
        }
    }
    fn from_rational(r: &BigRational) -> Self {
        rational_to_f64(r)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

/// `BigRational -> f64` that survives numerators/denominators beyond the
/// `f64` range by rescaling with matched bit shifts.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = ToPrimitive::to_f64(r) {
        if v.is_finite() {
            return v;
        }
    }
    let num = r.numer();
    let den = r.denom();
    let shift = (num.bits() as i64 - den.bits() as i64).max(0);
    let scaled_den: BigInt = den << shift as usize;
    let head = (num / &scaled_den).to_f64().unwrap_or(f64::INFINITY);
    head * 2f64.powi(shift as i32)
}

/// Element `rat + irr * sqrt(m)` of the real quadratic field `Q(sqrt(m))`.
///
/// `m` is a squarefree integer > 1 and is dropped to 0 whenever `irr` is zero,
/// so purely rational values mix freely with any extension. Arithmetic between
/// elements of two *different* nontrivial extensions is a caller bug and
/// panics.
#[derive(Clone, PartialEq, Debug)]
pub struct Quad {
    pub rat: BigRational,
    pub irr: BigRational,
    pub m: i64,
}

impl Quad {
    pub fn from_rat(rat: BigRational) -> Self {
        Quad {
            rat,
            irr: Zero::zero(),
            m: 0,
        }
    }

    pub fn new(rat: BigRational, irr: BigRational, m: i64) -> Self {
        let mut q = Quad { rat, irr, m };
        q.normalize();
        q
    }

    /// `sqrt(m)` itself.
    pub fn sqrt_of(m: i64) -> Self {
        assert!(m > 1, "radicand must be > 1");
        Quad {
            rat: Zero::zero(),
            irr: One::one(),
            m,
        }
    }

    fn normalize(&mut self) {
        if Zero::is_zero(&self.irr) {
            self.m = 0;
        }
    }

    fn unified_m(&self, other: &Self) -> i64 {
        match (self.m, other.m) {
            (0, m) | (m, 0) => m,
            (a, b) if a == b => a,
            (a, b) => panic!("mixed quadratic extensions: sqrt({a}) vs sqrt({b})"),
        }
    }

    /// The rational part when the element lies in Q.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if Zero::is_zero(&self.irr) {
            Some(&self.rat)
        } else {
            None
        }
    }
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if Zero::is_zero(&self.irr) {
            write!(f, "{}", self.rat)
        } else if Zero::is_zero(&self.rat) {
            write!(f, "{}*sqrt({})", self.irr, self.m)
        } else if self.irr.is_negative() {
            write!(f, "{}-{}*sqrt({})", self.rat, -&self.irr, self.m)
        } else {
            write!(f, "{}+{}*sqrt({})", self.rat, self.irr, self.m)
        }
    }
}

impl Coeff for Quad {
    const EXACT: bool = true;

    fn zero() -> Self {
        Quad::from_rat(Zero::zero())
    }
    fn one() -> Self {
        Quad::from_rat(One::one())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.rat) && Zero::is_zero(&self.irr)
    }
    fn add(&self, other: &Self) -> Self {
        let m = self.unified_m(other);
        Quad::new(&self.rat + &other.rat, &self.irr + &other.irr, m)
    }
    fn sub(&self, other: &Self) -> Self {
        let m = self.unified_m(other);
        Quad::new(&self.rat - &other.rat, &self.irr - &other.irr, m)
    }
    fn mul(&self, other: &Self) -> Self {
        let m = self.unified_m(other);
        let mval = BigRational::from_integer(BigInt::from(m));
        let rat = &self.rat * &other.rat + &(&self.irr * &other.irr) * &mval;
        let irr = &self.rat * &other.irr + &self.irr * &other.rat;
        Quad::new(rat, irr, m)
    }
    fn neg(&self) -> Self {
        Quad {
            rat: -&self.rat,
            irr: -&self.irr,
            m: self.m,
        }
    }
    fn inv(&self) -> Option<Self> {
        if Coeff::is_zero(self) {
            return None;
        }
        // (a + b sqrt(m))^-1 = (a - b sqrt(m)) / (a^2 - b^2 m); the norm only
        // vanishes at zero because m is not a perfect square.
        let mval = BigRational::from_integer(BigInt::from(self.m));
        let norm = &(&self.rat * &self.rat) - &(&(&self.irr * &self.irr) * &mval);
        assert!(
            !Zero::is_zero(&norm),
            "norm of nonzero element vanished; radicand not squarefree?"
        );
        Some(Quad::new(&self.rat / &norm, -&self.irr / &norm, self.m))
    }
    fn from_rational(r: &BigRational) -> Self {
        Quad::from_rat(r.clone())
    }
    fn to_f64(&self) -> f64 {
        let base = rational_to_f64(&self.rat);
        if Zero::is_zero(&self.irr) {
            base
        } else {
            base + rational_to_f64(&self.irr) * (self.m as f64).sqrt()
        }
    }
}

/// Complex number with exact rational real and imaginary parts, i.e. an
/// element of `Q(i)`. Lets the generic polynomial evaluator run exactly at
/// complex rational points.
#[derive(Clone, PartialEq, Debug)]
pub struct CRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl CRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        CRat { re, im }
    }

    pub fn from_real(re: BigRational) -> Self {
        CRat {
            re,
            im: Zero::zero(),
        }
    }

    pub fn conj(&self) -> Self {
        CRat {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn is_real(&self) -> bool {
        Zero::is_zero(&self.im)
    }

    /// `re^2 + im^2`.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }
}

impl fmt::Display for CRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if Zero::is_zero(&self.im) {
            write!(f, "{}", self.re)
        } else {
            write!(f, "{}{:+}i", self.re, self.im)
        }
    }
}

impl Coeff for CRat {
    const EXACT: bool = true;

    fn zero() -> Self {
        CRat::from_real(Zero::zero())
    }
    fn one() -> Self {
        CRat::from_real(One::one())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.re) && Zero::is_zero(&self.im)
    }
    fn add(&self, other: &Self) -> Self {
        CRat::new(&self.re + &other.re, &self.im + &other.im)
    }
    fn sub(&self, other: &Self) -> Self {
        CRat::new(&self.re - &other.re, &self.im - &other.im)
    }
    fn mul(&self, other: &Self) -> Self {
        CRat::new(
            &self.re * &other.re - &self.im * &other.im,
            &self.re * &other.im + &self.im * &other.re,
        )
    }
    fn neg(&self) -> Self {
        CRat::new(-&self.re, -&self.im)
    }
    fn inv(&self) -> Option<Self> {
        if Coeff::is_zero(self) {
            return None;
        }
        let n = self.norm_sqr();
        Some(CRat::new(&self.re / &n, -&self.im / &n))
    }
    fn from_rational(r: &BigRational) -> Self {
        CRat::from_real(r.clone())
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(&self.re)
    }
    fn abs_f64(&self) -> f64 {
        rational_to_f64(&self.norm_sqr()).sqrt()
    }
}

/// Best rational approximation of `x` by continued fractions, within `tol`
/// and with denominator at most `max_den`.
pub fn rationalize(x: f64, max_den: u64, tol: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::from(1), BigInt::from(0), BigInt::from(0), BigInt::from(1));
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        if a.abs() > 1e18 {
            break;
        }
        let ai = BigInt::from(a as i64);
        let p2 = &ai * &p0 + &p1;
        let q2 = &ai * &q0 + &q1;
        if q2 > BigInt::from(max_den) {
            break;
        }
        p1 = std::mem::replace(&mut p0, p2);
        q1 = std::mem::replace(&mut q0, q2);
        let cand = BigRational::new(p0.clone(), q0.clone());
        if (rational_to_f64(&cand) - x).abs() <= tol {
            return Some(cand);
        }
        let frac = v - a;
        if frac.abs() < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    let cand = BigRational::new(p0, q0);
    ((rational_to_f64(&cand) - x).abs() <= tol).then_some(cand)
}

/// `floor(sqrt(v) * 2^bits) / 2^bits` for `v >= 0`: a rational approximation
/// of the square root with error below `2^-bits`.
pub fn sqrt_rational_approx(v: &BigRational, bits: u32) -> BigRational {
    assert!(!v.numer().sign().eq(&num_bigint::Sign::Minus), "negative radicand");
    let scaled: BigInt = (v.numer() << (2 * bits as usize)) / v.denom();
    let root = scaled.sqrt();
    BigRational::new(root, BigInt::from(1) << bits as usize)
}

/// Split `n >= 0` as `s^2 * m` with `m` having no small square factors; `m`
/// is certified free of perfect-square structure (its remaining part is
/// checked not to be a square), which is all the quadratic-extension
/// arithmetic needs.
pub fn squarefree_split(n: &BigInt) -> (BigInt, BigInt) {
    assert!(!n.sign().eq(&num_bigint::Sign::Minus));
    if Zero::is_zero(n) {
        return (BigInt::from(0), BigInt::from(1));
    }
    let mut s = BigInt::from(1);
    let mut m = n.clone();
    let mut d = BigInt::from(2);
    let limit = BigInt::from(100_000);
    while &d * &d <= m && d <= limit {
        let dd = &d * &d;
        while (&m % &dd) == Zero::zero() {
            m /= &dd;
            s *= &d;
        }
        d += 1;
    }
    // fold in a perfect-square remainder
    let r = m.sqrt();
    if &r * &r == m {
        s *= &r;
        m = BigInt::from(1);
    }
    (s, m)
}

/// Convenience constructor for small rationals.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Convenience constructor for integers as rationals.
pub fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quad_field_ops() {
        // (1 + sqrt(5)) * (1 - sqrt(5)) = -4
        let a = Quad::new(rat(1), rat(1), 5);
        let b = Quad::new(rat(1), rat(-1), 5);
        let p = a.mul(&b);
        assert_eq!(p, Quad::from_rat(rat(-4)));

        // inverse round-trip
        let inv = Coeff::inv(&a).unwrap();
        assert_eq!(a.mul(&inv), Coeff::one());

        // rational elements mix with any extension
        let c = Quad::from_rat(rat(3));
        assert_eq!(c.add(&a), Quad::new(rat(4), rat(1), 5));
    }

    #[test]
    fn quad_sqrt_squares_back() {
        let s = Quad::sqrt_of(2);
        assert_eq!(s.mul(&s), Quad::from_rat(rat(2)));
        assert!((Coeff::to_f64(&s) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn crat_field_ops() {
        let i = CRat::new(rat(0), rat(1));
        assert_eq!(i.mul(&i), CRat::from_real(rat(-1)));
        let z = CRat::new(rat(3), rat(-2));
        let inv = Coeff::inv(&z).unwrap();
        assert_eq!(z.mul(&inv), Coeff::one());
    }

    #[test]
    fn rationalize_recovers_simple_fractions() {
        assert_eq!(rationalize(0.5, 1_000_000, 1e-9).unwrap(), ratio(1, 2));
        assert_eq!(rationalize(-2.0 / 3.0, 1_000_000, 1e-9).unwrap(), ratio(-2, 3));
        assert_eq!(rationalize(3.0, 1_000_000, 1e-9).unwrap(), rat(3));
        // sqrt(2) has no small-denominator representation at this tolerance
        assert!(rationalize(2f64.sqrt(), 1_000, 1e-12).is_none());
    }

    #[test]
    fn sqrt_approx_precision() {
        let v = ratio(2, 1);
        let approx = sqrt_rational_approx(&v, 120);
        let err = (&approx * &approx - v).abs();
        assert!(err < BigRational::new(BigInt::from(1), BigInt::from(1) << 110));
    }

    #[test]
    fn squarefree_split_examples() {
        use num_bigint::BigInt;
        let (s, m) = squarefree_split(&BigInt::from(45));
        assert_eq!((s, m), (BigInt::from(3), BigInt::from(5)));
        let (s, m) = squarefree_split(&BigInt::from(49));
        assert_eq!((s, m), (BigInt::from(7), BigInt::from(1)));
        let (s, m) = squarefree_split(&BigInt::from(2));
        assert_eq!((s, m), (BigInt::from(1), BigInt::from(2)));
    }

    #[test]
    fn rational_to_f64_large_values() {
        let big = BigRational::new(
            BigInt::from(10).pow(400u32),
            BigInt::from(3) * BigInt::from(10).pow(398u32),
        );
        let v = rational_to_f64(&big);
        assert!((v - 100.0 / 3.0).abs() < 1e-9);
    }
}
