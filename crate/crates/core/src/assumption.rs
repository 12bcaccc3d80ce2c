//! Checks of the two hypotheses behind the exactness guarantees.
//!
//! The first is a geometric condition on the constraint system alone: the
//! top-degree forms of the generators must have no common complex zero other
//! than the origin. It is decided exactly by a Gröbner computation (the
//! homogeneous ideal of top forms has a finite-dimensional quotient iff its
//! projective zero set is empty); no resultant value is ever produced, the
//! report only carries the predicate. The second concerns the optimization
//! instance: no singular point of the variety may attain the minimum.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groebner::{
    solve_variety, GroebnerBasis, GroebnerError, QuotientAlgebra, QuotientDimension,
    VarietyConfig, VarietyPoint,
};
use crate::poly::QPoly;
use crate::scalar::rat;

pub const WITNESS_TOL: f64 = 1e-8;
pub const VALUE_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum AssumptionError {
    #[error("square system required: {gens} generators in {vars} variables")]
    SquareSystemRequired { gens: usize, vars: usize },
    #[error("generator {0} is the zero polynomial")]
    ZeroGenerator(usize),
    #[error("ideal is positive-dimensional")]
    PositiveDimensional,
    #[error("failed to extract a witness at infinity")]
    WitnessExtraction,
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
}

/// Machine-readable outcome of the hypothesis checks.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AssumptionReport {
    /// The resultant of the top forms does not vanish, i.e. there is no
    /// nontrivial common complex zero at infinity.
    pub resultant_nonzero: bool,
    /// A unit-norm common zero of the top forms when the predicate fails.
    #[serde(with = "opt_complex_serde")]
    pub witness: Option<Vec<Complex64>>,
    /// Vector-space dimension of the quotient ring, when computed.
    pub bezout_dim: Option<QuotientDimension>,
    /// Product of the generator degrees.
    pub bezout_product: u64,
    /// Singular variety points attaining the minimum (empty when the
    /// attainment hypothesis holds or was not evaluated).
    pub singular_optimizers: Vec<VarietyPoint>,
}

mod opt_complex_serde {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<Complex64>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref()
            .map(|v| v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<Option<Vec<Complex64>>, D::Error> {
        let pairs: Option<Vec<[f64; 2]>> = Option::deserialize(d)?;
        Ok(pairs.map(|v| v.into_iter().map(|[re, im]| Complex64::new(re, im)).collect()))
    }
}

fn validate_square(gens: &[QPoly]) -> Result<usize, AssumptionError> {
    let n = gens.first().map(|g| g.nvars()).unwrap_or(0);
    if gens.is_empty() || gens.len() != n {
        return Err(AssumptionError::SquareSystemRequired {
            gens: gens.len(),
            vars: n,
        });
    }
    if let Some(i) = gens.iter().position(|g| g.is_zero()) {
        return Err(AssumptionError::ZeroGenerator(i));
    }
    Ok(n)
}

pub fn bezout_product(gens: &[QPoly]) -> u64 {
    gens.iter()
        .map(|g| g.degree().unwrap_or(0) as u64)
        .product()
}

/// Decide the no-solutions-at-infinity condition for a square system.
///
/// True iff the ideal of top forms has a finite-dimensional quotient. On
/// failure a unit-norm witness is extracted by solving the top-form system on
/// affine charts `x_j = 1`, slicing with random hyperplanes when the zero set
/// at infinity is positive-dimensional.
pub fn check_at_infinity(gens: &[QPoly]) -> Result<AssumptionReport, AssumptionError> {
    check_at_infinity_seeded(gens, 91)
}

pub fn check_at_infinity_seeded(
    gens: &[QPoly],
    seed: u64,
) -> Result<AssumptionReport, AssumptionError> {
    validate_square(gens)?;
    let tops: Vec<QPoly> = gens
        .iter()
        .map(|g| g.top_form().expect("nonzero"))
        .collect();
    let gb = GroebnerBasis::new(&tops)?;
    let holds = matches!(gb.quotient_dimension(), QuotientDimension::Finite(_));
    let witness = if holds {
        None
    } else {
        Some(extract_witness(&tops, seed)?)
    };
    Ok(AssumptionReport {
        resultant_nonzero: holds,
        witness,
        bezout_dim: None,
        bezout_product: bezout_product(gens),
        singular_optimizers: Vec::new(),
    })
}

/// Find a unit-norm nontrivial common zero of the homogeneous system `tops`.
fn extract_witness(tops: &[QPoly], seed: u64) -> Result<Vec<Complex64>, AssumptionError> {
    let n = tops[0].nvars();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for chart in 0..n {
        // substitute x_chart = 1
        let substituted: Vec<QPoly> = tops
            .iter()
            .map(|t| t.substitute(chart, &rat(1)))
            .collect();
        for _attempt in 0..4 {
            let mut system = substituted.clone();
            let mut gb = GroebnerBasis::new(&system)?;
            if gb.is_unit_ideal() {
                break; // no zero meets this chart
            }
            // slice until zero-dimensional
            let mut sliced_ok = true;
            while gb.quotient_dimension() == QuotientDimension::Infinite {
                let mut slice = QPoly::zero(n - 1);
                for v in 0..(n - 1) {
                    slice = slice.add(&QPoly::variable(n - 1, v).scale(&rat(rng.gen_range(-9..=9))));
                }
                slice = slice.add(&QPoly::constant(n - 1, rat(rng.gen_range(1..=9))));
                if slice.degree() != Some(1) {
                    sliced_ok = false;
                    break;
                }
                system.push(slice);
                gb = GroebnerBasis::new(&system)?;
                if gb.is_unit_ideal() {
                    sliced_ok = false;
                    break;
                }
            }
            if !sliced_ok {
                continue;
            }
            let qa = QuotientAlgebra::new(gb)?;
            if qa.dim() == 0 {
                continue;
            }
            let cfg = VarietyConfig {
                seed: seed ^ 0x9e37,
                ..VarietyConfig::default()
            };
            let Ok(points) = solve_variety(&qa, &system, &cfg) else {
                continue;
            };
            for p in &points {
                // prefer an exactly verified rational point when one is close
                let coords = exactify_chart_point(&system, &p.coords).unwrap_or_else(|| p.coords.clone());
                let mut full: Vec<Complex64> = Vec::with_capacity(n);
                full.extend_from_slice(&coords[..chart]);
                full.insert(chart, Complex64::new(1.0, 0.0));
                full.extend_from_slice(&coords[chart..(n - 1)]);
                let norm = full.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                let unit: Vec<Complex64> = full.iter().map(|z| z / norm).collect();
                let ok = tops.iter().all(|t| {
                    t.eval_complex(&unit).map(|v| v.norm()).unwrap_or(f64::NAN) <= WITNESS_TOL
                });
                if ok {
                    return Ok(unit);
                }
            }
        }
    }
    Err(AssumptionError::WitnessExtraction)
}

/// Snap a float chart point to nearby rationals when that solves the system
/// exactly.
fn exactify_chart_point(system: &[QPoly], coords: &[Complex64]) -> Option<Vec<Complex64>> {
    use crate::scalar::{rationalize, CRat};
    let exact: Option<Vec<CRat>> = coords
        .iter()
        .map(|z| {
            let re = rationalize(z.re, 1000, 2e-3 * (1.0 + z.re.abs()))?;
            let im = rationalize(z.im, 1000, 2e-3 * (1.0 + z.im.abs()))?;
            Some(CRat::new(re, im))
        })
        .collect();
    let exact = exact?;
    let ok = system.iter().all(|g| {
        crate::scalar::Coeff::is_zero(&g.map_coeff(|c| CRat::from_real(c.clone())).eval(&exact))
    });
    ok.then(|| {
        exact
            .iter()
            .map(|c| {
                Complex64::new(
                    crate::scalar::rational_to_f64(&c.re),
                    crate::scalar::rational_to_f64(&c.im),
                )
            })
            .collect()
    })
}

/// Bézout cross-check: quotient dimension versus the degree product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BezoutReport {
    pub dim: usize,
    pub product: u64,
    pub equal: bool,
}

pub fn check_bezout(gens: &[QPoly]) -> Result<BezoutReport, AssumptionError> {
    validate_square(gens)?;
    let gb = GroebnerBasis::new(gens)?;
    match gb.quotient_dimension() {
        QuotientDimension::Infinite => Err(AssumptionError::PositiveDimensional),
        QuotientDimension::Finite(dim) => {
            let product = bezout_product(gens);
            Ok(BezoutReport {
                dim,
                product,
                equal: dim as u64 == product,
            })
        }
    }
}

/// Singular points whose objective value is within `VALUE_TOL` of `fstar`.
pub fn check_singular_optimizers(
    f: &QPoly,
    points: &[VarietyPoint],
    fstar: f64,
) -> Vec<VarietyPoint> {
    points
        .iter()
        .filter(|p| {
            p.is_singular
                && f.eval_complex(&p.coords)
                    .map(|v| (v - Complex64::new(fstar, 0.0)).norm() <= VALUE_TOL)
                    .unwrap_or(false)
        })
        .cloned()
        .collect()
}

/// Convenience wrapper for reporting: at-infinity predicate, Bézout data,
/// and, when an objective is supplied and the variety is solvable, the
/// singular optimizers for the attainment hypothesis.
pub fn full_report(
    f: Option<&QPoly>,
    gens: &[QPoly],
    seed: u64,
) -> Result<AssumptionReport, AssumptionError> {
    let mut report = check_at_infinity_seeded(gens, seed)?;
    let gb = GroebnerBasis::new(gens)?;
    let dim = gb.quotient_dimension();
    report.bezout_dim = Some(dim);
    if let (Some(f), QuotientDimension::Finite(d)) = (f, dim) {
        if d > 0 {
            let qa = QuotientAlgebra::new(gb)?;
            let cfg = VarietyConfig {
                seed,
                ..VarietyConfig::default()
            };
            if let Ok(points) = solve_variety(&qa, gens, &cfg) {
                let fstar = points
                    .iter()
                    .filter(|p| p.is_real)
                    .filter_map(|p| f.eval_complex(&p.coords).ok())
                    .map(|v| v.re)
                    .fold(f64::INFINITY, f64::min);
                if fstar.is_finite() {
                    report.singular_optimizers = check_singular_optimizers(f, &points, fstar);
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;

    fn qp(src: &str, n: usize) -> QPoly {
        let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        parse_polynomial(src, &names).unwrap()
    }

    fn radical_pair(a: i64, b: i64) -> Vec<QPoly> {
        vec![
            qp(&format!("x2*({a}*(x2-1) - x1*({b}-1))"), 2),
            qp(&format!("x1*(x2*({a}-1) - {b}*(x1-1))"), 2),
        ]
    }

    fn nonradical_pair(a: i64, b: i64) -> Vec<QPoly> {
        vec![
            qp(&format!("x2*({a}*(x2-1) - x1*({b}-1))"), 2),
            qp("x1*(x1+x2-1)", 2),
        ]
    }

    fn binary_gens(n: usize) -> Vec<QPoly> {
        (0..n)
            .map(|i| {
                let x = QPoly::variable(n, i);
                x.mul(&x).sub(&QPoly::one(n))
            })
            .collect()
    }

    #[test]
    fn holds_on_paper_examples() {
        for gens in [radical_pair(2, 3), nonradical_pair(2, 3), binary_gens(3)] {
            let rep = check_at_infinity(&gens).unwrap();
            assert!(rep.resultant_nonzero);
            assert!(rep.witness.is_none());
        }
    }

    #[test]
    fn fails_with_witness_when_top_forms_share_a_line() {
        // with a = 0 both top forms vanish along x1 = 0
        let gens = nonradical_pair(0, 3);
        let rep = check_at_infinity(&gens).unwrap();
        assert!(!rep.resultant_nonzero);
        let w = rep.witness.expect("witness required");
        // witness is proportional to (0, 1)
        assert!(w[0].norm() < 1e-6);
        assert!((w[1].norm() - 1.0).abs() < 1e-6);
        for g in &gens {
            let t = g.top_form().unwrap();
            assert!(t.eval_complex(&w).unwrap().norm() <= WITNESS_TOL);
        }
    }

    #[test]
    fn square_system_enforced() {
        let gens = vec![qp("x1^2-1", 2)];
        assert!(matches!(
            check_at_infinity(&gens),
            Err(AssumptionError::SquareSystemRequired { gens: 1, vars: 2 })
        ));
    }

    #[test]
    fn bezout_examples() {
        let rep = check_bezout(&radical_pair(2, 3)).unwrap();
        assert_eq!((rep.dim, rep.product, rep.equal), (4, 4, true));

        let rep = check_bezout(&nonradical_pair(2, 3)).unwrap();
        assert_eq!((rep.dim, rep.product, rep.equal), (4, 4, true));

        let rep = check_bezout(&[qp("x1*x2", 2), qp("x1+x2", 2)]).unwrap();
        assert_eq!((rep.dim, rep.product, rep.equal), (2, 2, true));

        assert!(matches!(
            check_bezout(&[qp("x1*x2", 2), qp("x1", 2)]),
            Err(AssumptionError::PositiveDimensional)
        ));
    }

    #[test]
    fn infinity_check_matches_bezout() {
        for gens in [
            radical_pair(2, 3),
            nonradical_pair(2, 3),
            binary_gens(2),
            vec![qp("x1*x2", 2), qp("x1+x2", 2)],
        ] {
            let at_inf = check_at_infinity(&gens).unwrap().resultant_nonzero;
            let bez = check_bezout(&gens).unwrap();
            assert_eq!(at_inf, bez.equal);
        }
    }

    #[test]
    fn scaling_invariance() {
        use crate::scalar::ratio;
        let gens = radical_pair(2, 3);
        let scaled: Vec<QPoly> = gens
            .iter()
            .enumerate()
            .map(|(i, g)| g.scale(&ratio(3 * (i as i64 + 1), 7)))
            .collect();
        assert_eq!(
            check_at_infinity(&gens).unwrap().resultant_nonzero,
            check_at_infinity(&scaled).unwrap().resultant_nonzero
        );

        let bad = nonradical_pair(0, 3);
        let bad_scaled: Vec<QPoly> = bad.iter().map(|g| g.scale(&ratio(-5, 2))).collect();
        assert_eq!(
            check_at_infinity(&bad).unwrap().resultant_nonzero,
            check_at_infinity(&bad_scaled).unwrap().resultant_nonzero
        );
    }

    #[test]
    fn singular_optimizers_examples() {
        use crate::groebner::{solve_variety, GroebnerBasis, QuotientAlgebra, VarietyConfig};
        // three points, minimum -1 attained at the singular double point (0,1)
        let gens = nonradical_pair(2, 3);
        let f = qp("x1 - x2", 2);
        let gb = GroebnerBasis::new(&gens).unwrap();
        let qa = QuotientAlgebra::new(gb).unwrap();
        let points = solve_variety(&qa, &gens, &VarietyConfig::default()).unwrap();
        let sing = check_singular_optimizers(&f, &points, -1.0);
        assert_eq!(sing.len(), 1);
        assert!((sing[0].coords[1] - Complex64::new(1.0, 0.0)).norm() < 1e-6);

        // radical example: no singular points at all
        let gens = radical_pair(2, 3);
        let f = qp("x1 + x2", 2);
        let gb = GroebnerBasis::new(&gens).unwrap();
        let qa = QuotientAlgebra::new(gb).unwrap();
        let points = solve_variety(&qa, &gens, &VarietyConfig::default()).unwrap();
        assert!(check_singular_optimizers(&f, &points, 0.0).is_empty());

        // binary grids are everywhere nonsingular
        let gens = binary_gens(2);
        let gb = GroebnerBasis::new(&gens).unwrap();
        let qa = QuotientAlgebra::new(gb).unwrap();
        let points = solve_variety(&qa, &gens, &VarietyConfig::default()).unwrap();
        assert!(check_singular_optimizers(&qp("x1*x2", 2), &points, -1.0).is_empty());
    }

    #[test]
    fn full_report_includes_bezout_and_attainment() {
        let gens = nonradical_pair(2, 3);
        let f = qp("x1 - x2", 2);
        let rep = full_report(Some(&f), &gens, 91).unwrap();
        assert!(rep.resultant_nonzero);
        assert_eq!(rep.bezout_dim, Some(QuotientDimension::Finite(4)));
        assert_eq!(rep.singular_optimizers.len(), 1);

        let json = serde_json::to_string(&rep).unwrap();
        let back: AssumptionReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.resultant_nonzero, rep.resultant_nonzero);
        assert_eq!(back.singular_optimizers.len(), 1);
    }
}
