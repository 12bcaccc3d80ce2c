//! Exact certificate construction and verification.
//!
//! Builds the representation `f - f* = sum_i lambda_i g_i + h^2` for a square
//! system with finite variety: take a square root of `f - f*` in the quotient
//! ring (interpolation at simple points, truncated-power-series lifting at
//! multiple points, glued through the idempotents of the Artinian quotient),
//! reduce it to degree `frak_n` by normal form against the standard-monomial
//! basis, and lift the remaining ideal member to multipliers with the
//! homogeneous degree accounting.
//!
//! Coefficients live in `Q` or a single real quadratic extension
//! `Q(sqrt(m))`. When the needed square roots span several extensions (or the
//! variety points are irrational), the values are replaced by 200-bit
//! rational approximations and the same exact pipeline runs; the certificate
//! then carries a tiny nonzero residual instead of an exact zero.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groebner::{
    GroebnerBasis, GroebnerError, QuotientAlgebra, VarietyPoint,
};
use crate::linalg::FMat;
use crate::poly::{FPoly, Monomial, Polynomial, QPoly};
use crate::scalar::{
    rat, rationalize, rational_to_f64, sqrt_rational_approx, squarefree_split, CRat, Coeff, Quad,
};
use crate::univar::UniPoly;

/// Bits of precision for approximated square-root values.
const APPROX_BITS: u32 = 200;

#[derive(Debug, Error)]
pub enum CertgenError {
    #[error("constant term has no unit square root")]
    NoUnitSquareRoot,
    #[error("objective minus minimum is negative at the real point {point:?}")]
    NegativeAtRealPoint { point: Vec<f64> },
    #[error("objective minus minimum vanishes at the singular point {point:?}")]
    ZeroAtSingularPoint { point: Vec<f64> },
    #[error("variety point {point:?} could not be recognized exactly")]
    PointsNotRational { point: Vec<f64> },
    #[error("square-root radicand exceeds the supported extension range")]
    RadicandTooLarge,
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error("internal error: {0}")]
    Internal(String),
}

// ---------------------------------------------------------------------------
// square root modulo a power of the origin's maximal ideal

/// Truncated square root at the origin over a generic field: returns `q` with
/// every term of `q^2 - p` of degree at least `k`, given `b0` a unit square
/// root of the constant term.
pub fn sqrt_mod_power_with<C: Coeff>(
    p: &Polynomial<C>,
    k: usize,
    b0: &C,
) -> Result<Polynomial<C>, CertgenError> {
    let n = p.nvars();
    let c0 = p.coeff(&Monomial::one(n));
    if b0.mul(b0) != c0 || b0.is_zero() {
        return Err(CertgenError::NoUnitSquareRoot);
    }
    let half_inv_b0 = b0
        .inv()
        .ok_or(CertgenError::NoUnitSquareRoot)?
        .mul(&C::from_i64(2).inv().unwrap());

    // b_alpha = (1/2) b0^{-1} (a_alpha - sum_{beta1+beta2=alpha, 0<beta1<alpha} b_beta1 b_beta2)
    // computed degree by degree up to k-1
    let mut q = Polynomial::constant(n, b0.clone());
    for deg in 1..k {
        // terms of q^2 of this degree, using only coefficients of degree < deg
        let mut correction = Polynomial::<C>::zero(n);
        let known: Vec<(Monomial, C)> = q
            .terms()
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        for (m1, c1) in &known {
            for (m2, c2) in &known {
                if m1.degree() + m2.degree() == deg && m1.degree() > 0 && m2.degree() > 0 {
                    correction.add_term(m1.mul(m2), c1.mul(c2));
                }
            }
        }
        for (m, a) in p.terms().filter(|(m, _)| m.degree() == deg) {
            let delta = a.sub(&correction.coeff(m));
            q.add_term(m.clone(), delta.mul(&half_inv_b0));
        }
        // monomials of this degree present in the correction but not in p
        for (m, s) in correction.terms() {
            if p.coeff(m).is_zero() {
                q.add_term(m.clone(), s.neg().mul(&half_inv_b0));
            }
        }
    }
    Ok(q)
}

/// Exact square root of a nonnegative rational inside `Q(sqrt m)`.
/// Returns `None` when the radicand does not fit a single supported
/// extension.
pub fn exact_sqrt(v: &BigRational) -> Option<Quad> {
    if v.is_zero() {
        return Some(Quad::from_rat(rat(0)));
    }
    if v.is_negative() {
        return None;
    }
    // sqrt(a/b) = sqrt(a b) / b = (s sqrt(m)) / b
    let radicand = v.numer() * v.denom();
    let (s, m) = squarefree_split(&radicand);
    let coeff = BigRational::new(s, v.denom().clone());
    if m == BigInt::from(1) {
        Some(Quad::from_rat(coeff))
    } else {
        let m_small: i64 = m.to_i64()?;
        Some(Quad::new(rat(0), coeff, m_small))
    }
}

/// Square root of a rational-coefficient polynomial modulo
/// `<x_1..x_n>^k`, extending to `Q(sqrt m)` as the constant term requires.
pub fn sqrt_mod_power(p: &QPoly, k: usize) -> Result<Polynomial<Quad>, CertgenError> {
    let c0 = p.coeff(&Monomial::one(p.nvars()));
    if c0.is_zero() || c0.is_negative() {
        return Err(CertgenError::NoUnitSquareRoot);
    }
    let b0 = exact_sqrt(&c0).ok_or(CertgenError::RadicandTooLarge)?;
    sqrt_mod_power_with(&p.to_quad(), k, &b0)
}

// ---------------------------------------------------------------------------
// exact recognition of variety points

/// A maximal ideal of the quotient with exact (or high-precision rational)
/// point data.
#[derive(Clone, Debug)]
pub enum Block {
    Real {
        coords: Vec<BigRational>,
        multiplicity: usize,
        singular: bool,
    },
    /// One representative of a complex-conjugate pair.
    Pair {
        z: Vec<CRat>,
        multiplicity: usize,
        singular: bool,
    },
}

impl Block {
    pub fn multiplicity(&self) -> usize {
        match self {
            Block::Real { multiplicity, .. } => *multiplicity,
            Block::Pair { multiplicity, .. } => *multiplicity,
        }
    }

    pub fn is_singular(&self) -> bool {
        match self {
            Block::Real { singular, .. } => *singular,
            Block::Pair { singular, .. } => *singular,
        }
    }

    fn approx_coords(&self) -> Vec<f64> {
        match self {
            Block::Real { coords, .. } => coords.iter().map(rational_to_f64).collect(),
            Block::Pair { z, .. } => z.iter().map(|c| rational_to_f64(&c.re)).collect(),
        }
    }
}

/// The variety grouped into real points and conjugate pairs, with a flag for
/// whether every coordinate was recognized exactly.
#[derive(Clone, Debug)]
pub struct Blocks {
    pub blocks: Vec<Block>,
    pub all_exact: bool,
}

fn eval_crat(p: &QPoly, z: &[CRat]) -> CRat {
    p.map_coeff(|c| CRat::from_real(c.clone())).eval(z)
}

fn eval_rat(p: &QPoly, x: &[BigRational]) -> BigRational {
    p.eval(x)
}

/// Recognize the float variety points exactly.
///
/// Each coordinate is rationalized by continued fractions and the point is
/// verified against the generators in exact arithmetic. Real nonsingular
/// points that fail recognition are refined by exact-rational Newton steps to
/// 200-bit accuracy instead; anything else that fails is an error.
pub fn classify_points(
    gens: &[QPoly],
    points: &[VarietyPoint],
) -> Result<Blocks, CertgenError> {
    let mut used = vec![false; points.len()];
    let mut blocks = Vec::new();
    let mut all_exact = true;

    for (i, p) in points.iter().enumerate() {
        if used[i] {
            continue;
        }
        used[i] = true;
        if p.is_real {
            match recognize_real(gens, p) {
                Some(coords) => blocks.push(Block::Real {
                    coords,
                    multiplicity: p.multiplicity,
                    singular: p.is_singular,
                }),
                None => {
                    if p.is_singular {
                        return Err(CertgenError::PointsNotRational {
                            point: p.coords.iter().map(|z| z.re).collect(),
                        });
                    }
                    let coords = refine_real(gens, p).ok_or_else(|| {
                        CertgenError::PointsNotRational {
                            point: p.coords.iter().map(|z| z.re).collect(),
                        }
                    })?;
                    all_exact = false;
                    blocks.push(Block::Real {
                        coords,
                        multiplicity: p.multiplicity,
                        singular: false,
                    });
                }
            }
        } else {
            // find the conjugate partner
            let partner = points.iter().enumerate().position(|(j, q)| {
                j != i
                    && !used[j]
                    && q.multiplicity == p.multiplicity
                    && q.coords
                        .iter()
                        .zip(&p.coords)
                        .all(|(a, b)| (a - b.conj()).norm() < 1e-6 * (1.0 + b.norm()))
            });
            let Some(j) = partner else {
                return Err(CertgenError::Internal(
                    "complex point without conjugate partner".into(),
                ));
            };
            used[j] = true;
            let rep = canonical_pair_rep(p);
            match recognize_pair(gens, &rep) {
                Some(z) => blocks.push(Block::Pair {
                    z,
                    multiplicity: p.multiplicity,
                    singular: p.is_singular,
                }),
                None => {
                    return Err(CertgenError::PointsNotRational {
                        point: p.coords.iter().map(|z| z.re).collect(),
                    })
                }
            }
        }
    }
    Ok(Blocks { blocks, all_exact })
}

/// Pick the representative with positive imaginary part in the first
/// imaginary coordinate.
fn canonical_pair_rep(p: &VarietyPoint) -> Vec<Complex64> {
    let flip = p
        .coords
        .iter()
        .find(|z| z.im.abs() > 1e-9)
        .map(|z| z.im < 0.0)
        .unwrap_or(false);
    p.coords
        .iter()
        .map(|z| if flip { z.conj() } else { *z })
        .collect()
}

fn recognize_real(gens: &[QPoly], p: &VarietyPoint) -> Option<Vec<BigRational>> {
    let coords: Option<Vec<BigRational>> = p
        .coords
        .iter()
        .map(|z| rationalize(z.re, 1_000_000, 1e-7 * (1.0 + z.re.abs())))
        .collect();
    let coords = coords?;
    gens.iter()
        .all(|g| eval_rat(g, &coords).is_zero())
        .then_some(coords)
}

fn recognize_pair(gens: &[QPoly], z: &[Complex64]) -> Option<Vec<CRat>> {
    let coords: Option<Vec<CRat>> = z
        .iter()
        .map(|c| {
            let re = rationalize(c.re, 1_000_000, 1e-7 * (1.0 + c.re.abs()))?;
            let im = rationalize(c.im, 1_000_000, 1e-7 * (1.0 + c.im.abs()))?;
            Some(CRat::new(re, im))
        })
        .collect();
    let coords = coords?;
    gens.iter()
        .all(|g| Coeff::is_zero(&eval_crat(g, &coords)))
        .then_some(coords)
}

/// Exact-rational Newton refinement of a real nonsingular point to roughly
/// `2^-APPROX_BITS`; intermediate rationals are rounded to keep denominators
/// bounded.
fn refine_real(gens: &[QPoly], p: &VarietyPoint) -> Option<Vec<BigRational>> {
    let n = p.coords.len();
    if gens.len() != n {
        return None;
    }
    let mut x: Vec<BigRational> = p
        .coords
        .iter()
        .map(|z| rationalize(z.re, 1 << 26, 1e-7).unwrap_or_else(|| {
            BigRational::new(
                BigInt::from((z.re * (1u64 << 40) as f64) as i128),
                BigInt::from(1u64 << 40),
            )
        }))
        .collect();
    let grads: Vec<Vec<QPoly>> = gens.iter().map(|g| g.gradient()).collect();
    for _ in 0..5 {
        let jac = FMat::from_fn(n, n, |i, j| eval_rat(&grads[i][j], &x));
        let rhs: Vec<BigRational> = gens.iter().map(|g| -eval_rat(g, &x)).collect();
        let delta = jac.solve(&rhs)?;
        for (xi, d) in x.iter_mut().zip(delta) {
            *xi += d;
        }
        // round to 2*APPROX_BITS fractional bits
        let denom = BigInt::from(1) << (2 * APPROX_BITS as usize);
        for xi in x.iter_mut() {
            let scaled = (&*xi * BigRational::from_integer(denom.clone())).round();
            *xi = BigRational::new(scaled.to_integer(), denom.clone());
        }
    }
    let tol = BigRational::new(BigInt::from(1), BigInt::from(1) << (APPROX_BITS as usize + 20));
    gens.iter()
        .all(|g| eval_rat(g, &x).abs() < tol)
        .then_some(x)
}

/// Exact minimum of `f` over the real points, with an attaining block index.
pub fn minimum_over_real_points(f: &QPoly, blocks: &Blocks) -> Option<BigRational> {
    blocks
        .blocks
        .iter()
        .filter_map(|b| match b {
            Block::Real { coords, .. } => Some(eval_rat(f, coords)),
            Block::Pair { .. } => None,
        })
        .min()
}

// ---------------------------------------------------------------------------
// block square-root values

/// Square-root target at one maximal ideal: `re + im*i`, components in
/// `Q(sqrt m)`.
#[derive(Clone, Debug)]
struct BlockSqrt {
    re: Quad,
    im: Quad,
    exact: bool,
}

fn rational_square_root(v: &BigRational) -> Option<BigRational> {
    if v.is_negative() {
        return None;
    }
    let rn = v.numer().sqrt();
    let rd = v.denom().sqrt();
    (&rn * &rn == *v.numer() && &rd * &rd == *v.denom())
        .then(|| BigRational::new(rn, rd))
}

/// Exact square root of a complex rational, attempted in `Q(i)` or with one
/// purely-real / purely-imaginary quadratic component.
fn pair_sqrt_exact(w: &CRat) -> Option<BlockSqrt> {
    if w.im.is_zero() {
        if !w.re.is_negative() {
            let q = exact_sqrt(&w.re)?;
            return Some(BlockSqrt {
                re: q,
                im: Quad::from_rat(rat(0)),
                exact: true,
            });
        }
        let q = exact_sqrt(&(-&w.re))?;
        return Some(BlockSqrt {
            re: Quad::from_rat(rat(0)),
            im: q,
            exact: true,
        });
    }
    // omega = x + y i with x^2 = (c + r)/2, y = d/(2x), r = |w|
    let r = rational_square_root(&w.norm_sqr())?;
    let xx = (&w.re + &r) / rat(2);
    let x = rational_square_root(&xx)?;
    if x.is_zero() {
        return None;
    }
    let y = &w.im / (rat(2) * &x);
    Some(BlockSqrt {
        re: Quad::from_rat(x),
        im: Quad::from_rat(y),
        exact: true,
    })
}

/// High-precision rational approximation of the square root of a complex
/// rational.
fn pair_sqrt_approx(w: &CRat) -> BlockSqrt {
    if w.im.is_zero() {
        if !w.re.is_negative() {
            return BlockSqrt {
                re: Quad::from_rat(sqrt_rational_approx(&w.re, APPROX_BITS)),
                im: Quad::from_rat(rat(0)),
                exact: false,
            };
        }
        return BlockSqrt {
            re: Quad::from_rat(rat(0)),
            im: Quad::from_rat(sqrt_rational_approx(&(-&w.re), APPROX_BITS)),
            exact: false,
        };
    }
    let r = sqrt_rational_approx(&w.norm_sqr(), APPROX_BITS);
    let xx = (&w.re + &r) / rat(2);
    let x = sqrt_rational_approx(&xx.abs(), APPROX_BITS);
    let y = if x.is_zero() {
        sqrt_rational_approx(&r, APPROX_BITS)
    } else {
        &w.im / (rat(2) * &x)
    };
    BlockSqrt {
        re: Quad::from_rat(x),
        im: Quad::from_rat(y),
        exact: false,
    }
}

// ---------------------------------------------------------------------------
// quotient square root

/// Outcome of the square root in the quotient ring.
#[derive(Clone, Debug)]
pub struct QuotientSqrt {
    /// `h` with `p - h^2` in the ideal (up to the approximation defect when
    /// `exact` is false); degree at most `frak_n` under the at-infinity
    /// condition.
    pub h: Polynomial<Quad>,
    /// Radicand of the quadratic extension used; 0 when rational.
    pub extension: i64,
    /// All square-root values were represented exactly.
    pub exact: bool,
}

/// Per-maximal-ideal square-root tasks, exposed for reporting.
#[derive(Clone, Debug)]
pub struct LocalSquareRootTask {
    pub point: Vec<f64>,
    pub nilpotency_order: usize,
    pub target_value: Complex64,
}

/// Square root of `p` in the quotient algebra: `h` with
/// `normal_form(p - h^2) = 0`, reduced to the standard-monomial basis.
pub fn quotient_sqrt(
    p: &QPoly,
    qa: &QuotientAlgebra<BigRational>,
    points: &[VarietyPoint],
) -> Result<QuotientSqrt, CertgenError> {
    let gens = qa.groebner().source_generators().to_vec();
    let blocks = classify_points(&gens, points)?;
    quotient_sqrt_on_blocks(p, qa, &blocks).map(|(qs, _)| qs)
}

/// As [`quotient_sqrt`], also returning the local task list.
pub fn quotient_sqrt_on_blocks(
    p: &QPoly,
    qa: &QuotientAlgebra<BigRational>,
    blocks: &Blocks,
) -> Result<(QuotientSqrt, Vec<LocalSquareRootTask>), CertgenError> {
    // hypothesis checks: p >= 0 at real points, p != 0 at singular points
    for b in &blocks.blocks {
        match b {
            Block::Real {
                coords, singular, ..
            } => {
                let v = eval_rat(p, coords);
                if v.is_negative() {
                    return Err(CertgenError::NegativeAtRealPoint {
                        point: b.approx_coords(),
                    });
                }
                if *singular && v.is_zero() {
                    return Err(CertgenError::ZeroAtSingularPoint {
                        point: b.approx_coords(),
                    });
                }
            }
            Block::Pair { z, singular, .. } => {
                if *singular && Coeff::is_zero(&eval_crat(p, z)) {
                    return Err(CertgenError::ZeroAtSingularPoint {
                        point: b.approx_coords(),
                    });
                }
            }
        }
    }

    // square-root values per block, deciding exact-vs-approximate
    let mut values: Vec<BlockSqrt> = Vec::new();
    let mut exact_mode = blocks.all_exact;
    for b in &blocks.blocks {
        let val = match b {
            Block::Real { coords, .. } => {
                let v = eval_rat(p, coords);
                match exact_sqrt(&v) {
                    Some(q) => BlockSqrt {
                        re: q,
                        im: Quad::from_rat(rat(0)),
                        exact: true,
                    },
                    None => BlockSqrt {
                        re: Quad::from_rat(sqrt_rational_approx(&v, APPROX_BITS)),
                        im: Quad::from_rat(rat(0)),
                        exact: false,
                    },
                }
            }
            Block::Pair { z, .. } => {
                let w = eval_crat(p, z);
                pair_sqrt_exact(&w).unwrap_or_else(|| pair_sqrt_approx(&w))
            }
        };
        exact_mode &= val.exact;
        values.push(val);
    }

    // a single quadratic extension must cover every exact value
    let mut ext: i64 = 0;
    if exact_mode {
        for v in &values {
            for m in [v.re.m, v.im.m] {
                if m != 0 {
                    if ext == 0 {
                        ext = m;
                    } else if ext != m {
                        exact_mode = false;
                    }
                }
            }
        }
    }
    if !exact_mode {
        ext = 0;
        for (v, b) in values.iter_mut().zip(&blocks.blocks) {
            if v.re.m != 0 || v.im.m != 0 || !v.exact {
                *v = match b {
                    Block::Real { coords, .. } => {
                        let val = eval_rat(p, coords);
                        BlockSqrt {
                            re: Quad::from_rat(sqrt_rational_approx(&val, APPROX_BITS)),
                            im: Quad::from_rat(rat(0)),
                            exact: false,
                        }
                    }
                    Block::Pair { z, .. } => pair_sqrt_approx(&eval_crat(p, z)),
                };
            }
        }
    }

    let tasks: Vec<LocalSquareRootTask> = blocks
        .blocks
        .iter()
        .zip(&values)
        .map(|(b, v)| LocalSquareRootTask {
            point: b.approx_coords(),
            nilpotency_order: b.multiplicity(),
            target_value: Complex64::new(Coeff::to_f64(&v.re), Coeff::to_f64(&v.im)),
        })
        .collect();

    let qa_k = qa.map_coeff(|c| Quad::from_rat(c.clone()));
    let p_k = p.to_quad();

    let radical = blocks.blocks.iter().all(|b| b.multiplicity() == 1);
    let h = if radical {
        interpolate_values(&qa_k, &blocks.blocks, &values)?
    } else {
        if !blocks.all_exact {
            return Err(CertgenError::PointsNotRational {
                point: blocks.blocks[0].approx_coords(),
            });
        }
        glue_blocks(qa, &qa_k, &p_k, &blocks.blocks, &values)?
    };

    // exactness check: NF(p - h^2) must vanish identically in exact mode
    let defect = qa_k.groebner().normal_form(&p_k.sub(&h.mul(&h)));
    if exact_mode && !defect.is_zero() {
        return Err(CertgenError::Internal(
            "exact quotient square root left a nonzero defect".into(),
        ));
    }

    Ok((
        QuotientSqrt {
            h,
            extension: ext,
            exact: exact_mode,
        },
        tasks,
    ))
}

/// Value conditions at every block as one linear system over the standard
/// monomials (the radical case).
fn interpolate_values(
    qa_k: &QuotientAlgebra<Quad>,
    blocks: &[Block],
    values: &[BlockSqrt],
) -> Result<Polynomial<Quad>, CertgenError> {
    let dim = qa_k.dim();
    let mut rows: Vec<Vec<Quad>> = Vec::new();
    let mut rhs: Vec<Quad> = Vec::new();
    for (b, v) in blocks.iter().zip(values) {
        match b {
            Block::Real { coords, .. } => {
                let row: Vec<Quad> = qa_k
                    .basis_monomials()
                    .iter()
                    .map(|m| {
                        let mut acc = rat(1);
                        for (i, &e) in m.0.iter().enumerate() {
                            for _ in 0..e {
                                acc *= &coords[i];
                            }
                        }
                        Quad::from_rat(acc)
                    })
                    .collect();
                rows.push(row);
                rhs.push(v.re.clone());
            }
            Block::Pair { z, .. } => {
                let evals: Vec<CRat> = qa_k
                    .basis_monomials()
                    .iter()
                    .map(|m| {
                        let mut acc = CRat::from_real(rat(1));
                        for (i, &e) in m.0.iter().enumerate() {
                            for _ in 0..e {
                                acc = acc.mul(&z[i]);
                            }
                        }
                        acc
                    })
                    .collect();
                rows.push(evals.iter().map(|c| Quad::from_rat(c.re.clone())).collect());
                rhs.push(v.re.clone());
                rows.push(evals.iter().map(|c| Quad::from_rat(c.im.clone())).collect());
                rhs.push(v.im.clone());
            }
        }
    }
    let mat = FMat::from_fn(rows.len(), dim, |i, j| rows[i][j].clone());
    let coords = mat
        .solve(&rhs)
        .ok_or_else(|| CertgenError::Internal("interpolation system inconsistent".into()))?;
    Ok(qa_k.element(&coords))
}

/// General case: per-maximal-ideal square roots glued with exact idempotents.
fn glue_blocks(
    qa: &QuotientAlgebra<BigRational>,
    qa_k: &QuotientAlgebra<Quad>,
    p_k: &Polynomial<Quad>,
    blocks: &[Block],
    values: &[BlockSqrt],
) -> Result<Polynomial<Quad>, CertgenError> {
    let idem = idempotents(qa, blocks)?;
    let gb_k = qa_k.groebner();
    let mut h = Polynomial::<Quad>::zero(qa_k.nvars());
    for ((b, v), e) in blocks.iter().zip(values).zip(&idem) {
        let e_k = e.to_quad();
        let local = match b {
            Block::Real {
                coords,
                multiplicity,
                ..
            } => {
                if *multiplicity == 1 {
                    Polynomial::constant(qa_k.nvars(), v.re.clone())
                } else {
                    // translate the point to the origin and run the
                    // truncated-power-series recursion
                    let shift: Vec<Quad> =
                        coords.iter().map(|c| Quad::from_rat(c.clone())).collect();
                    let neg_shift: Vec<Quad> = shift.iter().map(|c| c.neg()).collect();
                    let p_shifted = p_k.translate(&shift);
                    let b0 = v.re.clone();
                    let q = sqrt_mod_power_with(&p_shifted, *multiplicity, &b0)?;
                    q.translate(&neg_shift)
                }
            }
            Block::Pair { z, multiplicity, .. } => {
                let h0 = pair_interpolant(qa_k, z, v)?;
                if *multiplicity == 1 {
                    h0
                } else {
                    newton_lift(qa_k, p_k, &e_k, h0, *multiplicity)?
                }
            }
        };
        h = h.add(&gb_k.normal_form(&e_k.mul(&local)));
    }
    Ok(gb_k.normal_form(&h))
}

/// Some polynomial with prescribed complex value at a conjugate pair.
fn pair_interpolant(
    qa_k: &QuotientAlgebra<Quad>,
    z: &[CRat],
    v: &BlockSqrt,
) -> Result<Polynomial<Quad>, CertgenError> {
    let dim = qa_k.dim();
    let evals: Vec<CRat> = qa_k
        .basis_monomials()
        .iter()
        .map(|m| {
            let mut acc = CRat::from_real(rat(1));
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    acc = acc.mul(&z[i]);
                }
            }
            acc
        })
        .collect();
    let mut mat = FMat::zeros(2, dim);
    for (j, c) in evals.iter().enumerate() {
        mat.set(0, j, Quad::from_rat(c.re.clone()));
        mat.set(1, j, Quad::from_rat(c.im.clone()));
    }
    let coords = mat
        .solve(&[v.re.clone(), v.im.clone()])
        .ok_or_else(|| CertgenError::Internal("pair interpolation inconsistent".into()))?;
    Ok(qa_k.element(&coords))
}

/// Hensel-style square-root lift inside the local factor selected by the
/// idempotent `e`: each step doubles the power of the maximal ideal to which
/// `h^2` matches `p`.
fn newton_lift(
    qa_k: &QuotientAlgebra<Quad>,
    p_k: &Polynomial<Quad>,
    e: &Polynomial<Quad>,
    mut h: Polynomial<Quad>,
    k: usize,
) -> Result<Polynomial<Quad>, CertgenError> {
    let gb = qa_k.groebner();
    let dim = qa_k.dim();
    let steps = (usize::BITS - k.leading_zeros()) as usize + 1;
    for _ in 0..steps {
        let defect = gb.normal_form(&e.mul(&p_k.sub(&h.mul(&h))));
        if defect.is_zero() {
            return Ok(h);
        }
        // y = h^{-1} on the local factor: solve mult(h) * y = e
        let mut mult_h = FMat::zeros(dim, dim);
        for (j, bm) in qa_k.basis_monomials().iter().enumerate() {
            let bj = Polynomial::from_terms(qa_k.nvars(), [(bm.clone(), Quad::one())]);
            let col = qa_k.coordinates(&h.mul(&bj));
            for (i, c) in col.into_iter().enumerate() {
                mult_h.set(i, j, c);
            }
        }
        let e_coords = qa_k.coordinates(e);
        let y_coords = mult_h
            .solve(&e_coords)
            .ok_or_else(|| CertgenError::Internal("local inverse failed".into()))?;
        let y = qa_k.element(&y_coords);
        // h <- (h + p y) / 2 on the local factor, unchanged elsewhere
        let update = gb.normal_form(&e.mul(&h.add(&p_k.mul(&y))));
        let half = Quad::from_rat(BigRational::new(BigInt::from(1), BigInt::from(2)));
        let one_minus_e = Polynomial::one(qa_k.nvars()).sub(e);
        h = gb.normal_form(&one_minus_e.mul(&h).add(&update.scale(&half)));
    }
    let defect = gb.normal_form(&e.mul(&p_k.sub(&h.mul(&h))));
    if defect.is_zero() {
        Ok(h)
    } else {
        Err(CertgenError::Internal(
            "Hensel lift did not converge to an exact local square root".into(),
        ))
    }
}

/// Exact idempotents of the Artinian quotient, one per block, via the
/// characteristic polynomial of a separating multiplication operator and
/// partial-fraction inversion.
fn idempotents(
    qa: &QuotientAlgebra<BigRational>,
    blocks: &[Block],
) -> Result<Vec<QPoly>, CertgenError> {
    let n = qa.nvars();
    let dim = qa.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0xce27);
    'retry: for _ in 0..8 {
        let coeffs: Vec<BigRational> = (0..n).map(|_| rat(rng.gen_range(-9..=9))).collect();
        let ell: QPoly = (0..n).fold(QPoly::zero(n), |acc, v| {
            acc.add(&QPoly::variable(n, v).scale(&coeffs[v]))
        });

        // block factors of the characteristic polynomial of mult-by-ell
        let mut factors: Vec<UniPoly> = Vec::new();
        for b in blocks {
            let f = match b {
                Block::Real { coords, .. } => {
                    let lam = eval_rat(&ell, coords);
                    UniPoly::new(vec![-lam, rat(1)])
                }
                Block::Pair { z, .. } => {
                    let mu = eval_crat(&ell, z);
                    // (T - mu)(T - conj mu) = T^2 - 2 Re(mu) T + |mu|^2
                    UniPoly::new(vec![
                        mu.norm_sqr(),
                        -(rat(2) * &mu.re),
                        rat(1),
                    ])
                }
            };
            factors.push(f);
        }
        // the separating element must give pairwise coprime factors
        for i in 0..factors.len() {
            for j in (i + 1)..factors.len() {
                if factors[i].gcd(&factors[j]).degree() != Some(0) {
                    continue 'retry;
                }
            }
        }

        let mut chi = UniPoly::one();
        for (f, b) in factors.iter().zip(blocks) {
            for _ in 0..b.multiplicity() {
                chi = chi.mul(f);
            }
        }
        // cross-check against the matrix characteristic polynomial
        let mut combo = FMat::<BigRational>::zeros(dim, dim);
        for (c, m) in coeffs.iter().zip(qa.multiplication_matrices()) {
            combo = combo.add_mat(&m.scale(c));
        }
        if chi != matrix_charpoly(&combo) {
            continue 'retry;
        }

        let gb = qa.groebner();
        let mut result = Vec::with_capacity(blocks.len());
        let mut total = QPoly::zero(n);
        for (f, b) in factors.iter().zip(blocks) {
            let mut fk = UniPoly::one();
            for _ in 0..b.multiplicity() {
                fk = fk.mul(f);
            }
            let u = chi.div_exact(&fk);
            let (g, w, _) = u.xgcd(&fk);
            if g.degree() != Some(0) {
                continue 'retry;
            }
            let (_, p_i) = u.mul(&w).divmod(&chi);
            let e = unipoly_at_element(&p_i, &ell, gb);
            // idempotency is the correctness certificate here
            if !gb.normal_form(&e.mul(&e).sub(&e)).is_zero() {
                continue 'retry;
            }
            total = total.add(&e);
            result.push(e);
        }
        if !gb.normal_form(&total.sub(&QPoly::one(n))).is_zero() {
            continue 'retry;
        }
        return Ok(result);
    }
    Err(CertgenError::Internal(
        "failed to construct idempotents with a separating element".into(),
    ))
}

fn matrix_charpoly(m: &FMat<BigRational>) -> UniPoly {
    let n = m.rows();
    let mut coeffs = vec![rat(0); n + 1];
    coeffs[n] = rat(1);
    if n == 0 {
        return UniPoly::new(coeffs);
    }
    let mut b = m.clone();
    coeffs[n - 1] = -b.trace();
    for k in 2..=n {
        let mut shifted = b;
        for i in 0..n {
            let v = shifted.get(i, i) + &coeffs[n - k + 1];
            shifted.set(i, i, v);
        }
        b = m.mul_mat(&shifted);
        coeffs[n - k] = -b.trace() / rat(k as i64);
    }
    UniPoly::new(coeffs)
}

fn unipoly_at_element(p: &UniPoly, elem: &QPoly, gb: &GroebnerBasis<BigRational>) -> QPoly {
    let n = elem.nvars();
    let mut acc = QPoly::zero(n);
    for c in p.coeffs().iter().rev() {
        acc = gb
            .normal_form(&acc.mul(elem))
            .add(&QPoly::constant(n, c.clone()));
    }
    gb.normal_form(&acc)
}

// ---------------------------------------------------------------------------
// certificates

/// Exact or floating scalar, for the reported minimum.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(BigRational),
    Float(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => rational_to_f64(r),
            Value::Float(v) => *v,
        }
    }
}

/// Gram-matrix form of the SOS part of a numeric certificate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GramBlock {
    pub monomials: Vec<Monomial>,
    pub matrix: Vec<Vec<f64>>,
}

impl GramBlock {
    /// `sigma(x) = v^T G v` over the monomial vector.
    pub fn to_polynomial(&self, nvars: usize) -> FPoly {
        let mut out = FPoly::zero(nvars);
        for (j, mj) in self.monomials.iter().enumerate() {
            for (k, mk) in self.monomials.iter().enumerate() {
                out.add_term(mj.mul(mk), self.matrix[j][k]);
            }
        }
        out
    }
}

/// Multipliers of a certificate: exact polynomials in `Q(sqrt m)` or numeric
/// ones from the SDP.
#[derive(Clone, Debug)]
pub enum Multipliers {
    Exact(Vec<Polynomial<Quad>>),
    Numeric(Vec<FPoly>),
}

impl Multipliers {
    pub fn len(&self) -> usize {
        match self {
            Multipliers::Exact(v) => v.len(),
            Multipliers::Numeric(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The representation `f - f* = sum_i lambda_i g_i + h^2` (exact path) or
/// `f - f_d = sum_i lambda_i g_i + sigma` with a Gram-matrix `sigma`
/// (numeric path).
#[derive(Clone, Debug)]
pub struct Certificate {
    pub fstar: Value,
    pub h: Option<Polynomial<Quad>>,
    pub multipliers: Multipliers,
    pub gram: Option<GramBlock>,
    /// Max coefficient magnitude of the defect polynomial; exactly 0 for the
    /// exact path.
    pub residual: f64,
    pub degree_contract_met: bool,
}

/// Build the exact certificate for `f` over `gens` with minimum `fstar`.
pub fn build_certificate(
    f: &QPoly,
    gens: &[QPoly],
    fstar: &BigRational,
) -> Result<Certificate, CertgenError> {
    let gb = GroebnerBasis::new(gens)?;
    let qa = QuotientAlgebra::new(gb)?;
    let points = crate::groebner::solve_variety(
        &qa,
        gens,
        &crate::groebner::VarietyConfig::default(),
    )?;
    build_certificate_with(f, gens, fstar, &qa, &points)
}

/// As [`build_certificate`] with precomputed quotient data.
pub fn build_certificate_with(
    f: &QPoly,
    gens: &[QPoly],
    fstar: &BigRational,
    qa: &QuotientAlgebra<BigRational>,
    points: &[VarietyPoint],
) -> Result<Certificate, CertgenError> {
    let n = f.nvars();
    let p = f.sub(&QPoly::constant(n, fstar.clone()));
    let sqrt = quotient_sqrt(&p, qa, points)?;
    let h = &sqrt.h;

    let p_k = p.to_quad();
    let gens_k: Vec<Polynomial<Quad>> = gens.iter().map(|g| g.to_quad()).collect();
    let gb_k = qa.groebner().map_coeff(|c| Quad::from_rat(c.clone()));

    // p - h^2 = member + defect; the member lifts to multipliers, the defect
    // is the (exactly computed) residual of the certificate
    let r = p_k.sub(&h.mul(h));
    let defect = gb_k.normal_form(&r);
    let member = r.sub(&defect);
    let lift = crate::groebner::lift_membership(&member, &gens_k)?;

    // degree caps
    let degrees: Vec<usize> = gens.iter().map(|g| g.degree().unwrap()).collect();
    let frak_n = crate::degbound::frak_n(&degrees)
        .map_err(|e| CertgenError::Internal(e.to_string()))?;
    let cap = (2 * frak_n).max(f.degree().unwrap_or(0));
    let h_ok = h.degree().map(|d| d <= frak_n).unwrap_or(true);
    let mult_ok = lift
        .multipliers
        .iter()
        .zip(gens)
        .all(|(l, g)| match l.degree() {
            None => true,
            Some(dl) => dl + g.degree().unwrap() <= cap,
        });

    Ok(Certificate {
        fstar: Value::Exact(fstar.clone()),
        h: Some(h.clone()),
        multipliers: Multipliers::Exact(lift.multipliers),
        gram: None,
        residual: defect.max_coeff_abs(),
        degree_contract_met: h_ok && mult_ok,
    })
}

/// Residual report of [`verify_certificate`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifyReport {
    pub residual: f64,
    /// The defect polynomial is identically zero in exact arithmetic.
    pub exactly_zero: bool,
    pub h_degree_ok: bool,
    pub multiplier_degrees_ok: bool,
}

impl VerifyReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.residual <= tol && self.h_degree_ok && self.multiplier_degrees_ok
    }
}

/// Recompute `f - f* - sum_i lambda_i g_i - h^2` (or `- sigma` from the Gram
/// block) and report the worst coefficient along with the degree contracts.
pub fn verify_certificate(f: &QPoly, gens: &[QPoly], cert: &Certificate) -> VerifyReport {
    let n = f.nvars();
    let degrees: Vec<usize> = gens
        .iter()
        .map(|g| g.degree().unwrap_or(0).max(1))
        .collect();
    let frak_n = crate::degbound::frak_n(&degrees).unwrap_or(0);
    let cap = (2 * frak_n).max(f.degree().unwrap_or(0));

    let h_degree_ok = cert
        .h
        .as_ref()
        .and_then(|h| h.degree())
        .map(|d| d <= frak_n)
        .unwrap_or(true);

    match (&cert.multipliers, &cert.fstar) {
        (Multipliers::Exact(mults), fstar) => {
            let fstar_rat = match fstar {
                Value::Exact(r) => r.clone(),
                Value::Float(v) => rationalize(*v, u64::MAX / 2, 1e-12)
                    .unwrap_or_else(|| BigRational::from_float(*v).unwrap_or_else(|| rat(0))),
            };
            let mut d = f
                .sub(&QPoly::constant(n, fstar_rat))
                .to_quad();
            for (l, g) in mults.iter().zip(gens) {
                d = d.sub(&l.mul(&g.to_quad()));
            }
            if let Some(h) = &cert.h {
                d = d.sub(&h.mul(h));
            }
            if let Some(gram) = &cert.gram {
                // mixed certificates are not produced, but stay honest
                let sigma = gram.to_polynomial(n);
                let df = d.map_coeff(|c| Coeff::to_f64(c)).sub(&sigma);
                return VerifyReport {
                    residual: df.max_coeff_abs(),
                    exactly_zero: false,
                    h_degree_ok,
                    multiplier_degrees_ok: exact_mult_degrees_ok(mults, gens, cap),
                };
            }
            VerifyReport {
                residual: d.max_coeff_abs(),
                exactly_zero: d.is_zero(),
                h_degree_ok,
                multiplier_degrees_ok: exact_mult_degrees_ok(mults, gens, cap),
            }
        }
        (Multipliers::Numeric(mults), fstar) => {
            let mut d = f.to_float();
            d.add_term(Monomial::one(n), -fstar.to_f64());
            for (l, g) in mults.iter().zip(gens) {
                d = d.sub(&l.mul(&g.to_float()));
            }
            if let Some(h) = &cert.h {
                let hf = h.map_coeff(|c| Coeff::to_f64(c));
                d = d.sub(&hf.mul(&hf));
            }
            if let Some(gram) = &cert.gram {
                d = d.sub(&gram.to_polynomial(n));
            }
            let multiplier_degrees_ok = mults.iter().zip(gens).all(|(l, g)| {
                match (l.degree(), g.degree()) {
                    (Some(dl), Some(dg)) => dl + dg <= cap,
                    _ => true,
                }
            });
            VerifyReport {
                residual: d.max_coeff_abs(),
                exactly_zero: false,
                h_degree_ok,
                multiplier_degrees_ok,
            }
        }
    }
}

fn exact_mult_degrees_ok(mults: &[Polynomial<Quad>], gens: &[QPoly], cap: usize) -> bool {
    mults.iter().zip(gens).all(|(l, g)| match l.degree() {
        None => true,
        Some(dl) => dl + g.degree().unwrap_or(0) <= cap,
    })
}

// ---------------------------------------------------------------------------
// JSON form

#[derive(Serialize, Deserialize)]
struct QuadTermJson {
    rat: String,
    #[serde(default)]
    irr: String,
    #[serde(default)]
    m: i64,
    e: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct FloatTermJson {
    c: f64,
    e: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct CertificateJson {
    fstar_exact: Option<String>,
    fstar_float: Option<f64>,
    nvars: usize,
    h: Option<Vec<QuadTermJson>>,
    multipliers_exact: Option<Vec<Vec<QuadTermJson>>>,
    multipliers_float: Option<Vec<Vec<FloatTermJson>>>,
    gram: Option<GramBlock>,
    residual: f64,
    degree_contract_met: bool,
}

fn quad_poly_to_json(p: &Polynomial<Quad>) -> Vec<QuadTermJson> {
    p.terms()
        .map(|(m, c)| QuadTermJson {
            rat: c.rat.to_string(),
            irr: c.irr.to_string(),
            m: c.m,
            e: m.0.clone(),
        })
        .collect()
}

fn quad_poly_from_json(nvars: usize, terms: &[QuadTermJson]) -> Result<Polynomial<Quad>, String> {
    let mut p = Polynomial::zero(nvars);
    for t in terms {
        if t.e.len() != nvars {
            return Err("exponent arity mismatch".into());
        }
        let ratp: BigRational = t.rat.parse().map_err(|_| "bad rational")?;
        let irr: BigRational = if t.irr.is_empty() {
            rat(0)
        } else {
            t.irr.parse().map_err(|_| "bad rational")?
        };
        p.add_term(Monomial(t.e.clone()), Quad::new(ratp, irr, t.m));
    }
    Ok(p)
}

impl Certificate {
    pub fn nvars(&self) -> usize {
        match &self.multipliers {
            Multipliers::Exact(v) => v.first().map(|p| p.nvars()).unwrap_or(0),
            Multipliers::Numeric(v) => v.first().map(|p| p.nvars()).unwrap_or(0),
        }
    }
}

impl Serialize for Certificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let json = CertificateJson {
            fstar_exact: match &self.fstar {
                Value::Exact(r) => Some(r.to_string()),
                Value::Float(_) => None,
            },
            fstar_float: match &self.fstar {
                Value::Exact(_) => None,
                Value::Float(v) => Some(*v),
            },
            nvars: self.nvars(),
            h: self.h.as_ref().map(quad_poly_to_json),
            multipliers_exact: match &self.multipliers {
                Multipliers::Exact(v) => Some(v.iter().map(quad_poly_to_json).collect()),
                Multipliers::Numeric(_) => None,
            },
            multipliers_float: match &self.multipliers {
                Multipliers::Exact(_) => None,
                Multipliers::Numeric(v) => Some(
                    v.iter()
                        .map(|p| {
                            p.terms()
                                .map(|(m, c)| FloatTermJson {
                                    c: *c,
                                    e: m.0.clone(),
                                })
                                .collect()
                        })
                        .collect(),
                ),
            },
            gram: self.gram.clone(),
            residual: self.residual,
            degree_contract_met: self.degree_contract_met,
        };
        json.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Certificate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let json = CertificateJson::deserialize(d)?;
        let fstar = match (json.fstar_exact, json.fstar_float) {
            (Some(s), _) => Value::Exact(s.parse().map_err(|_| D::Error::custom("bad fstar"))?),
            (None, Some(v)) => Value::Float(v),
            _ => return Err(D::Error::custom("missing fstar")),
        };
        let h = json
            .h
            .as_ref()
            .map(|terms| quad_poly_from_json(json.nvars, terms))
            .transpose()
            .map_err(D::Error::custom)?;
        let multipliers = if let Some(me) = &json.multipliers_exact {
            Multipliers::Exact(
                me.iter()
                    .map(|terms| quad_poly_from_json(json.nvars, terms))
                    .collect::<Result<_, _>>()
                    .map_err(D::Error::custom)?,
            )
        } else if let Some(mf) = &json.multipliers_float {
            Multipliers::Numeric(
                mf.iter()
                    .map(|terms| {
                        let mut p = FPoly::zero(json.nvars);
                        for t in terms {
                            p.add_term(Monomial(t.e.clone()), t.c);
                        }
                        p
                    })
                    .collect(),
            )
        } else {
            return Err(D::Error::custom("missing multipliers"));
        };
        Ok(Certificate {
            fstar,
            h,
            multipliers,
            gram: json.gram,
            residual: json.residual,
            degree_contract_met: json.degree_contract_met,
        })
    }
}
