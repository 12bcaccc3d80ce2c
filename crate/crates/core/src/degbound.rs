//! Closed-form degree bounds for the SOS relaxation of a square system.
//!
//! Everything here is integer arithmetic on the generator degrees: the
//! square-root degree cap `frak_n = sum deg(g_i) - n`, the coefficients of
//! the truncated-geometric-series product (the numerator of the Hilbert
//! series of a complete intersection), and the relaxation order at which the
//! hierarchy is exact.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::QPoly;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DegBoundError {
    #[error("degree list is empty")]
    EmptyDegrees,
    #[error("generator degrees must be at least 1 (got {0})")]
    DegreeBelowOne(usize),
    #[error("objective degree must be at least 2 for the gradient bound (got {0})")]
    GradientDegreeTooSmall(usize),
    #[error("zero polynomial has no degree")]
    ZeroPolynomial,
}

/// Degree data of one relaxation instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeBoundReport {
    /// `sum deg(g_i) - n`: caps the degree of the square root `h`.
    pub frak_n: usize,
    /// Counts of exponent tuples `(k_1..k_n)` with `sum k_i = k`,
    /// `k_i < deg(g_i)`; indices `0..=frak_n`.
    pub c_coeffs: Vec<u64>,
    /// Relaxation order at which the hierarchy value reaches the minimum:
    /// `max(frak_n, ceil(deg f / 2))`, clamped up to the smallest legal
    /// order of the relaxation.
    pub sos_order: usize,
    /// Cap on `deg(lambda_i g_i)`: `max(2 frak_n, deg f)`.
    pub multiplier_degree_cap: usize,
    /// Cap on `deg(h)`: equals `frak_n`.
    pub h_degree_cap: usize,
    /// False when the no-solutions-at-infinity check was not verified by the
    /// caller, making the bound advisory.
    pub verified: bool,
}

fn check_degrees(degrees: &[usize]) -> Result<(), DegBoundError> {
    if degrees.is_empty() {
        return Err(DegBoundError::EmptyDegrees);
    }
    if let Some(&d) = degrees.iter().find(|&&d| d < 1) {
        return Err(DegBoundError::DegreeBelowOne(d));
    }
    Ok(())
}

/// `sum deg(g_i) - n`.
pub fn frak_n(degrees: &[usize]) -> Result<usize, DegBoundError> {
    check_degrees(degrees)?;
    Ok(degrees.iter().sum::<usize>() - degrees.len())
}

/// Coefficients `c_0..c_frak_n` of `prod_i (1 + t + ... + t^(d_i - 1))`,
/// i.e. the number of tuples with `sum k_i = k` and `0 <= k_i <= d_i - 1`.
pub fn hilbert_coeffs(degrees: &[usize]) -> Result<Vec<u64>, DegBoundError> {
    check_degrees(degrees)?;
    let mut coeffs = vec![1u64];
    for &d in degrees {
        let mut next = vec![0u64; coeffs.len() + d - 1];
        for (i, &c) in coeffs.iter().enumerate() {
            for j in 0..d {
                next[i + j] += c;
            }
        }
        coeffs = next;
    }
    Ok(coeffs)
}

/// `sum_{k=0..d} c_k`: the dimension of the degree-`d` graded piece of the
/// homogeneous coordinate ring of the system; constant `prod d_i` once
/// `d >= frak_n`.
pub fn dim_graded_piece(degrees: &[usize], d: usize) -> Result<u64, DegBoundError> {
    let c = hilbert_coeffs(degrees)?;
    Ok(c.iter().take(d + 1).sum())
}

fn ceil_div2(v: usize) -> usize {
    v.div_ceil(2)
}

/// Full degree-bound report for objective `f` over the given generators.
///
/// `verified` should reflect whether the at-infinity check passed; the
/// numbers are computed either way.
pub fn sos_order(f: &QPoly, gens: &[QPoly], verified: bool) -> Result<DegreeBoundReport, DegBoundError> {
    let degrees: Vec<usize> = gens
        .iter()
        .map(|g| g.degree().ok_or(DegBoundError::ZeroPolynomial))
        .collect::<Result<_, _>>()?;
    let df = f.degree().ok_or(DegBoundError::ZeroPolynomial)?;
    let n = frak_n(&degrees)?;
    let c_coeffs = hilbert_coeffs(&degrees)?;
    // ceil(max(frak_n, df/2)) with integer frak_n is max(frak_n, ceil(df/2));
    // the relaxation itself additionally needs 2d >= max deg(g_i), so clamp.
    let dmax = degrees.iter().copied().max().unwrap();
    let order = n.max(ceil_div2(df)).max(ceil_div2(dmax));
    Ok(DegreeBoundReport {
        frak_n: n,
        c_coeffs,
        sos_order: order,
        multiplier_degree_cap: (2 * n).max(df),
        h_degree_cap: n,
        verified,
    })
}

/// Relaxation order bound for minimization over the gradient ideal of `F`:
/// `ceil(max(n (deg F - 2), deg F / 2))`.
pub fn gradient_order(big_f: &QPoly) -> Result<usize, DegBoundError> {
    let df = big_f.degree().ok_or(DegBoundError::ZeroPolynomial)?;
    if df < 2 {
        return Err(DegBoundError::GradientDegreeTooSmall(df));
    }
    let n = big_f.nvars();
    Ok((n * (df - 2)).max(ceil_div2(df)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;

    fn qp(src: &str, n: usize) -> QPoly {
        let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        parse_polynomial(src, &names).unwrap()
    }

    #[test]
    fn frak_n_examples() {
        assert_eq!(frak_n(&[2, 2, 2]).unwrap(), 3);
        assert_eq!(frak_n(&[3, 4]).unwrap(), 5);
        // gradient system of a quartic in three variables
        assert_eq!(frak_n(&[3, 3, 3]).unwrap(), 6);
        assert_eq!(frak_n(&[]), Err(DegBoundError::EmptyDegrees));
        assert_eq!(frak_n(&[2, 0]), Err(DegBoundError::DegreeBelowOne(0)));
    }

    #[test]
    fn hilbert_coeffs_examples() {
        assert_eq!(hilbert_coeffs(&[2, 2]).unwrap(), vec![1, 2, 1]);
        assert_eq!(hilbert_coeffs(&[2, 2, 2]).unwrap(), vec![1, 3, 3, 1]);
        assert_eq!(hilbert_coeffs(&[3, 4]).unwrap(), vec![1, 2, 3, 3, 2, 1]);
    }

    /// Brute-force tuple count as an independent oracle.
    fn brute_count(degrees: &[usize], k: usize) -> u64 {
        fn rec(degrees: &[usize], k: i64) -> u64 {
            if degrees.is_empty() {
                return (k == 0) as u64;
            }
            let mut total = 0;
            for ki in 0..degrees[0] {
                let rest = k - ki as i64;
                if rest >= 0 {
                    total += rec(&degrees[1..], rest);
                }
            }
            total
        }
        rec(degrees, k as i64)
    }

    #[test]
    fn hilbert_coeffs_match_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let n = rng.gen_range(1..=5);
            let degrees: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=5)).collect();
            let c = hilbert_coeffs(&degrees).unwrap();
            let fn_ = frak_n(&degrees).unwrap();
            assert_eq!(c.len(), fn_ + 1);
            for (k, &ck) in c.iter().enumerate() {
                assert_eq!(ck, brute_count(&degrees, k), "degrees {degrees:?} k {k}");
            }
            // sum identity and symmetry
            let total: u64 = c.iter().sum();
            let prod: u64 = degrees.iter().map(|&d| d as u64).product();
            assert_eq!(total, prod);
            for k in 0..c.len() {
                assert_eq!(c[k], c[fn_ - k]);
            }
        }
    }

    #[test]
    fn graded_piece_examples() {
        assert_eq!(dim_graded_piece(&[2, 2], 2).unwrap(), 4);
        assert_eq!(dim_graded_piece(&[2, 2], 0).unwrap(), 1);
        assert_eq!(dim_graded_piece(&[3, 4], 3).unwrap(), 9);
        // saturates at prod(d_i) past frak_n
        assert_eq!(dim_graded_piece(&[3, 4], 17).unwrap(), 12);
    }

    #[test]
    fn sos_order_examples() {
        // three points plus a double point, linear objective
        let gens = vec![
            qp("x2*(2*(x2-1) - 2*x1)", 2),
            qp("x1*(x1+x2-1)", 2),
        ];
        let f = qp("x1 - x2", 2);
        let rep = sos_order(&f, &gens, true).unwrap();
        assert_eq!(rep.frak_n, 2);
        assert_eq!(rep.sos_order, 2);
        assert_eq!(rep.multiplier_degree_cap, 4);
        assert_eq!(rep.h_degree_cap, 2);

        // binary n=2 with a quadratic objective
        let gens = vec![qp("x1^2-1", 2), qp("x2^2-1", 2)];
        let rep = sos_order(&qp("x1*x2", 2), &gens, true).unwrap();
        assert_eq!(rep.sos_order, 2);

        // degrees (3,3) and deg f = 10: order 5 comes from the objective
        let gens = vec![qp("x1^3 - x1", 2), qp("x2^3 - x2", 2)];
        let rep = sos_order(&qp("x1^10", 2), &gens, true).unwrap();
        assert_eq!(rep.frak_n, 4);
        assert_eq!(rep.sos_order, 5);
        assert_eq!(rep.multiplier_degree_cap, 10);
    }

    #[test]
    fn gradient_order_examples() {
        assert_eq!(gradient_order(&qp("x1^4 + 1", 1)).unwrap(), 2);
        assert_eq!(gradient_order(&qp("x1^4 + x2^4", 2)).unwrap(), 4);
        assert_eq!(gradient_order(&qp("x1^3 + x2^3 + x3^3", 3)).unwrap(), 3);
        assert!(matches!(
            gradient_order(&qp("x1", 1)),
            Err(DegBoundError::GradientDegreeTooSmall(1))
        ));
    }
}
