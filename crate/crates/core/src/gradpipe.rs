//! Minimization over gradient ideals and the copositivity application.
//!
//! For an objective `F`, the constrained problem over its critical set is
//! relaxed with multiplier caps `deg(lambda_i) <= 2d - deg(F) + 1`. The
//! relevant at-infinity condition concerns the partials of the top form of
//! `F` (not the top forms of the partials, which differ when a partial drops
//! degree). Copositivity of a symmetric `P` reduces to the sign of the
//! minimum of `F_lambda = sum P_ij x_i^2 x_j^2 + lambda (|x|^2 - 1)^2`, whose
//! gradient relaxation is exact by order `2n` whenever all principal minors
//! of `P + lambda 11^T` are nonzero.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assumption::{check_at_infinity_seeded, AssumptionError, AssumptionReport};
use crate::degbound::{gradient_order, DegBoundError};
use crate::linalg::FMat;
use crate::poly::{Monomial, QPoly};
use crate::scalar::{rat, Coeff};
use crate::sdp::{build_relaxation, solve, SdpError, SdpSolution, SolveOptions, SolveStatus};

#[derive(Debug, Error)]
pub enum GradPipeError {
    #[error("objective degree must be at least 2")]
    DegreeTooSmall,
    #[error("matrix must be square and symmetric")]
    BadMatrix,
    #[error("principal-minor enumeration refused for n > 20; sample instead")]
    MinorsTooLarge,
    #[error("lambda must be positive")]
    BadLambda,
    #[error(transparent)]
    Assumption(#[from] AssumptionError),
    #[error(transparent)]
    DegBound(#[from] DegBoundError),
    #[error(transparent)]
    Sdp(#[from] SdpError),
}

/// A gradient-ideal minimization instance.
#[derive(Clone, Debug)]
pub struct GradientProblem {
    pub objective: QPoly,
    pub partials: Vec<QPoly>,
    /// Relaxation order from the gradient degree bound.
    pub bound: usize,
    pub assumption: AssumptionReport,
}

/// Assemble the gradient problem for `F`: partials, order bound, and the
/// at-infinity check on the partials of the top form.
pub fn gradient_problem(big_f: &QPoly, seed: u64) -> Result<GradientProblem, GradPipeError> {
    let bound = gradient_order(big_f)?;
    let assumption = check_gradient_assumption_seeded(big_f, seed)?;
    Ok(GradientProblem {
        objective: big_f.clone(),
        partials: big_f.gradient(),
        bound,
        assumption,
    })
}

/// Solve the order-`d` relaxation of minimizing `F` over its critical set,
/// with the gradient-specific multiplier caps.
pub fn gradient_relaxation(
    big_f: &QPoly,
    d: usize,
    opts: &SolveOptions,
) -> Result<SdpSolution, GradPipeError> {
    let df = big_f.degree().ok_or(GradPipeError::DegreeTooSmall)?;
    if df < 2 {
        return Err(GradPipeError::DegreeTooSmall);
    }
    let partials = big_f.gradient();
    // deg(lambda_i) <= 2d - deg(F) + 1
    let cap = (2 * d + 1).saturating_sub(df);
    let caps = vec![cap; partials.len()];
    let prob = build_relaxation(big_f, &partials, d, Some(&caps))?;
    Ok(solve(&prob, opts)?)
}

/// The no-solutions-at-infinity condition for the gradient system: the
/// partials of the top form of `F` must have no common nontrivial zero. A
/// vanishing partial fails immediately, witnessed by the corresponding axis.
pub fn check_gradient_assumption(big_f: &QPoly) -> Result<AssumptionReport, GradPipeError> {
    check_gradient_assumption_seeded(big_f, 91)
}

pub fn check_gradient_assumption_seeded(
    big_f: &QPoly,
    seed: u64,
) -> Result<AssumptionReport, GradPipeError> {
    let df = big_f.degree().ok_or(GradPipeError::DegreeTooSmall)?;
    if df < 2 {
        return Err(GradPipeError::DegreeTooSmall);
    }
    let n = big_f.nvars();
    let top = big_f.top_form().expect("nonzero");
    let partials = top.gradient();
    if let Some(axis) = partials.iter().position(|p| p.is_zero()) {
        // the other partials are homogeneous in the remaining variables, so
        // the axis direction is a common zero
        let mut witness = vec![num_complex::Complex64::new(0.0, 0.0); n];
        witness[axis] = num_complex::Complex64::new(1.0, 0.0);
        return Ok(AssumptionReport {
            resultant_nonzero: false,
            witness: Some(witness),
            bezout_dim: None,
            bezout_product: partials
                .iter()
                .map(|p| p.degree().map(|d| d as u64).unwrap_or(0))
                .product(),
            singular_optimizers: Vec::new(),
        });
    }
    Ok(check_at_infinity_seeded(&partials, seed)?)
}

/// Exact principal-minor scan of a symmetric rational matrix: true iff all
/// `2^n - 1` principal minors are nonzero; otherwise the first vanishing
/// index set (1-based) is reported.
pub fn principal_minors_nonzero(
    m: &[Vec<BigRational>],
) -> Result<(bool, Option<Vec<usize>>), GradPipeError> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(GradPipeError::BadMatrix);
    }
    for i in 0..n {
        for j in 0..n {
            if m[i][j] != m[j][i] {
                return Err(GradPipeError::BadMatrix);
            }
        }
    }
    if n > 20 {
        return Err(GradPipeError::MinorsTooLarge);
    }
    // subsets in size-then-lex order so the reported witness is minimal
    let mut subsets: Vec<Vec<usize>> = (1u32..(1 << n))
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    subsets.sort_by_key(|s| (s.len(), s.clone()));
    for subset in subsets {
        let k = subset.len();
        let sub = FMat::from_fn(k, k, |i, j| m[subset[i]][subset[j]].clone());
        if Coeff::is_zero(&sub.determinant()) {
            return Ok((false, Some(subset.iter().map(|i| i + 1).collect())));
        }
    }
    Ok((true, None))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum CopositivityVerdict {
    Copositive,
    NotCopositive,
    Inconclusive,
}

/// Result of one copositivity certification run.
#[derive(Clone, Debug)]
pub struct CopositivityInstance {
    pub matrix: Vec<Vec<BigRational>>,
    pub lambda: BigRational,
    /// `F_lambda = sum_ij P_ij x_i^2 x_j^2 + lambda (|x|^2 - 1)^2`.
    pub flambda: QPoly,
    pub verdict: CopositivityVerdict,
    /// The certified minimum of `F_lambda` (meaningful for definite
    /// verdicts).
    pub certified_value: f64,
    /// First vanishing principal minor of `P + lambda 11^T`, when the order
    /// bound does not apply (1-based variable indices).
    pub vanishing_minor: Option<Vec<usize>>,
    pub sdp_status: Option<SolveStatus>,
}

/// `F_lambda` for the matrix `P`.
pub fn flambda_polynomial(m: &[Vec<BigRational>], lambda: &BigRational) -> QPoly {
    let n = m.len();
    let mut f = QPoly::zero(n);
    for i in 0..n {
        for j in 0..n {
            let mut e = vec![0u32; n];
            e[i] += 2;
            e[j] += 2;
            f.add_term(Monomial(e), m[i][j].clone());
        }
    }
    // lambda (sum x_i^2 - 1)^2
    let mut sphere = QPoly::constant(n, rat(-1));
    for i in 0..n {
        let x = QPoly::variable(n, i);
        sphere = sphere.add(&x.mul(&x));
    }
    f.add(&sphere.mul(&sphere).scale(lambda))
}

#[derive(Clone, Debug)]
pub struct CopositivityOptions {
    pub solve: SolveOptions,
    /// Verdict threshold on the certified value.
    pub value_tol: f64,
    pub seed: u64,
}

impl Default for CopositivityOptions {
    fn default() -> Self {
        CopositivityOptions {
            solve: SolveOptions::default(),
            value_tol: 1e-6,
            seed: 91,
        }
    }
}

/// Certify copositivity of `P` at a given `lambda`, or by escalating
/// `lambda` through powers of 4 until the verdict is stable across two
/// consecutive values (cap `2^20`, then inconclusive).
pub fn certify_copositivity(
    m: &[Vec<BigRational>],
    lambda: Option<BigRational>,
    opts: &CopositivityOptions,
) -> Result<CopositivityInstance, GradPipeError> {
    if let Some(l) = lambda {
        if l <= rat(0) {
            return Err(GradPipeError::BadLambda);
        }
        return certify_at_lambda(m, &l, opts);
    }
    let mut previous: Option<(CopositivityVerdict, CopositivityInstance)> = None;
    let mut l = rat(1);
    let cap = rat(1 << 20);
    while l <= cap {
        let inst = certify_at_lambda(m, &l, opts)?;
        if let Some((pv, _)) = &previous {
            if *pv == inst.verdict && inst.verdict != CopositivityVerdict::Inconclusive {
                return Ok(inst);
            }
        }
        previous = Some((inst.verdict, inst));
        l *= rat(4);
    }
    let mut last = previous.expect("at least one lambda step").1;
    last.verdict = CopositivityVerdict::Inconclusive;
    Ok(last)
}

fn certify_at_lambda(
    m: &[Vec<BigRational>],
    lambda: &BigRational,
    opts: &CopositivityOptions,
) -> Result<CopositivityInstance, GradPipeError> {
    let n = m.len();
    let flambda = flambda_polynomial(m, lambda);

    // minor condition on P + lambda 11^T: when it holds, the relaxation at
    // the gradient order is exact, so a negative value disproves
    // copositivity; a nonnegative relaxation value is a sound certificate
    // either way, being a lower bound
    let shifted: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| &m[i][j] + lambda).collect())
        .collect();
    let (minors_ok, vanishing) = principal_minors_nonzero(&shifted)?;

    // entrywise positivity of P + lambda 11^T certifies coercivity of
    // F_lambda, which is what makes a nonnegative relaxation value a sound
    // copositivity certificate when the minor condition is unavailable
    // (e.g. P = 0, where lambda 11^T is always singular)
    let entrywise_positive = shifted.iter().flatten().all(|v| v > &rat(0));
    if !minors_ok && !entrywise_positive {
        return Ok(CopositivityInstance {
            matrix: m.to_vec(),
            lambda: lambda.clone(),
            flambda,
            verdict: CopositivityVerdict::Inconclusive,
            certified_value: f64::NAN,
            vanishing_minor: vanishing,
            sdp_status: None,
        });
    }

    let d = gradient_order(&flambda)?;
    let sol = gradient_relaxation(&flambda, d, &opts.solve)?;
    let converged = sol.status == SolveStatus::Optimal && sol.fd.is_finite();
    let verdict = if !converged {
        CopositivityVerdict::Inconclusive
    } else if sol.fd >= -opts.value_tol {
        CopositivityVerdict::Copositive
    } else if minors_ok {
        CopositivityVerdict::NotCopositive
    } else {
        CopositivityVerdict::Inconclusive
    };
    Ok(CopositivityInstance {
        matrix: m.to_vec(),
        lambda: lambda.clone(),
        flambda,
        verdict,
        certified_value: sol.fd,
        vanishing_minor: vanishing,
        sdp_status: Some(sol.status),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;
    use crate::scalar::ratio;

    fn qp(src: &str, n: usize) -> QPoly {
        let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        parse_polynomial(src, &names).unwrap()
    }

    fn mat(entries: &[&[i64]]) -> Vec<Vec<BigRational>> {
        entries
            .iter()
            .map(|row| row.iter().map(|&v| rat(v)).collect())
            .collect()
    }

    #[test]
    fn gradient_relaxation_quartic_single_well() {
        // F = (x^2 - 1)^2 has minimum 0 at x = +-1; bound is 2
        let f = qp("(x1^2 - 1)^2", 1);
        assert_eq!(gradient_order(&f).unwrap(), 2);
        let sol = gradient_relaxation(&f, 2, &SolveOptions::default()).unwrap();
        assert!(sol.fd.abs() < 1e-6, "fd = {}", sol.fd);
    }

    #[test]
    fn gradient_relaxation_convex_quadratic() {
        let f = qp("x1^2 + 1", 1);
        let sol = gradient_relaxation(&f, 1, &SolveOptions::default()).unwrap();
        assert!((sol.fd - 1.0).abs() < 1e-6, "fd = {}", sol.fd);
    }

    #[test]
    fn gradient_relaxation_two_variable_quartic() {
        let f = qp("x1^4 + x2^4", 2);
        let sol = gradient_relaxation(&f, 2, &SolveOptions::default()).unwrap();
        assert!(sol.fd.abs() < 1e-6, "fd = {}", sol.fd);
    }

    #[test]
    fn gradient_assumption_examples() {
        let rep = check_gradient_assumption(&qp("x1^4 + x2^4", 2)).unwrap();
        assert!(rep.resultant_nonzero);

        // both partials of the top form vanish along the diagonal
        let rep = check_gradient_assumption(&qp("(x1 - x2)^4", 2)).unwrap();
        assert!(!rep.resultant_nonzero);
        let w = rep.witness.unwrap();
        assert!((w[0] - w[1]).norm() < 1e-6);

        // a variable missing from the top form fails along its axis
        let rep = check_gradient_assumption(&qp("x1^4 + x2", 2)).unwrap();
        assert!(!rep.resultant_nonzero);
        let w = rep.witness.unwrap();
        assert!(w[0].norm() < 1e-12 && (w[1].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn principal_minors_examples() {
        let (ok, _) = principal_minors_nonzero(&mat(&[&[2, 1], &[1, 2]])).unwrap();
        assert!(ok);

        let (ok, idx) = principal_minors_nonzero(&mat(&[&[1, 1], &[1, 1]])).unwrap();
        assert!(!ok);
        assert_eq!(idx.unwrap(), vec![1, 2]);

        let (ok, _) = principal_minors_nonzero(&mat(&[&[1]])).unwrap();
        assert!(ok);

        assert!(matches!(
            principal_minors_nonzero(&mat(&[&[1, 2], &[3, 4]])),
            Err(GradPipeError::BadMatrix)
        ));
    }

    #[test]
    fn minor_condition_matches_gradient_assumption() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let n = rng.gen_range(2..=3usize);
            let mut p: Vec<Vec<BigRational>> = vec![vec![rat(0); n]; n];
            for i in 0..n {
                for j in i..n {
                    let v = ratio(rng.gen_range(-4i64..=4), rng.gen_range(1i64..=2));
                    p[i][j] = v.clone();
                    p[j][i] = v;
                }
            }
            let lambda = ratio(rng.gen_range(1i64..=8), rng.gen_range(1i64..=2));
            let shifted: Vec<Vec<BigRational>> = (0..n)
                .map(|i| (0..n).map(|j| &p[i][j] + &lambda).collect())
                .collect();
            let (minors_ok, _) = principal_minors_nonzero(&shifted).unwrap();
            let flam = flambda_polynomial(&p, &lambda);
            let rep = check_gradient_assumption(&flam).unwrap();
            assert_eq!(
                minors_ok, rep.resultant_nonzero,
                "P = {p:?}, lambda = {lambda}"
            );
        }
    }

    #[test]
    fn copositivity_identity_matrix() {
        let inst = certify_copositivity(
            &mat(&[&[1, 0], &[0, 1]]),
            Some(rat(1)),
            &CopositivityOptions::default(),
        )
        .unwrap();
        assert_eq!(inst.verdict, CopositivityVerdict::Copositive);
        // F_{lambda,*} = lambda alpha / (alpha + lambda) with alpha = 1/2
        assert!((inst.certified_value - 1.0 / 3.0).abs() < 1e-5);
    }

    #[test]
    fn copositivity_negative_case() {
        let inst = certify_copositivity(
            &mat(&[&[1, -3], &[-3, 1]]),
            Some(rat(2)),
            &CopositivityOptions::default(),
        )
        .unwrap();
        assert_eq!(inst.verdict, CopositivityVerdict::NotCopositive);
        // alpha = -1: certified value -2
        assert!((inst.certified_value + 2.0).abs() < 1e-4);
    }

    #[test]
    fn copositivity_zero_matrix() {
        let inst = certify_copositivity(
            &mat(&[&[0, 0], &[0, 0]]),
            Some(rat(1)),
            &CopositivityOptions::default(),
        )
        .unwrap();
        assert_eq!(inst.verdict, CopositivityVerdict::Copositive);
        assert!(inst.certified_value.abs() < 1e-5);
    }

    #[test]
    fn copositivity_vanishing_minor_is_inconclusive() {
        // det(P + 1 * 11^T) = 0 for P = [[1,-3],[-3,1]]
        let inst = certify_copositivity(
            &mat(&[&[1, -3], &[-3, 1]]),
            Some(rat(1)),
            &CopositivityOptions::default(),
        )
        .unwrap();
        assert_eq!(inst.verdict, CopositivityVerdict::Inconclusive);
        assert_eq!(inst.vanishing_minor, Some(vec![1, 2]));
    }

    #[test]
    fn copositivity_escalation_recovers_verdict() {
        // escalation starts at lambda = 1 where the minor vanishes, then
        // settles on the definite verdict at larger lambda
        let inst = certify_copositivity(
            &mat(&[&[1, -3], &[-3, 1]]),
            None,
            &CopositivityOptions::default(),
        )
        .unwrap();
        assert_eq!(inst.verdict, CopositivityVerdict::NotCopositive);
    }

    #[test]
    fn copositivity_scale_invariance() {
        let p = mat(&[&[1, -3], &[-3, 1]]);
        let scaled: Vec<Vec<BigRational>> = p
            .iter()
            .map(|r| r.iter().map(|v| v * ratio(7, 2)).collect())
            .collect();
        let a = certify_copositivity(&p, Some(rat(2)), &CopositivityOptions::default()).unwrap();
        let b = certify_copositivity(
            &scaled,
            Some(rat(2) * ratio(7, 2)),
            &CopositivityOptions::default(),
        )
        .unwrap();
        assert_eq!(a.verdict, b.verdict);
    }
}
