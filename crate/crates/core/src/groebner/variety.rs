//! Variety extraction for zero-dimensional ideals.
//!
//! Eigenvalue method on the commuting multiplication matrices: a random
//! rational combination `L = sum c_v M_v` is formed, its characteristic
//! polynomial is computed exactly and squarefree-decomposed, which gives the
//! eigenvalue multiplicities (= local multiplicities of the points) without
//! any float clustering. Points are then read off eigenvectors of `L^T`
//! obtained by complex inverse iteration, Newton-polished where the Jacobian
//! permits, and classified real/complex and singular/nonsingular.

use nalgebra::{Complex, DMatrix, DVector};
use num_complex::Complex64;
use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{GroebnerError, QuotientAlgebra};
use crate::linalg::FMat;
use crate::poly::Polynomial;
use crate::scalar::{rat, rational_to_f64};
use crate::univar::UniPoly;

/// A point of the complex variety with its local data.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VarietyPoint {
    /// Complex coordinates, one per variable, serialized as `[re, im]` pairs.
    #[serde(with = "complex_vec_serde")]
    pub coords: Vec<Complex64>,
    /// Dimension of the local quotient algebra at the point.
    pub multiplicity: usize,
    /// Jacobian of the generators drops rank at the point.
    pub is_singular: bool,
    /// All imaginary parts below the reality tolerance.
    pub is_real: bool,
}

impl VarietyPoint {
    pub fn real_coords(&self) -> Vec<f64> {
        self.coords.iter().map(|z| z.re).collect()
    }
}

/// Serialize complex vectors as `[[re, im], ...]`.
pub mod complex_vec_serde {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let pairs: Vec<[f64; 2]> = Vec::deserialize(d)?;
        Ok(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

#[derive(Clone, Debug)]
pub struct VarietyConfig {
    pub seed: u64,
    /// Two extracted points closer than this are considered a collision.
    pub cluster_tol: f64,
    /// Maximum imaginary magnitude for a point to count as real.
    pub real_tol: f64,
    /// Relative singular-value cutoff for Jacobian rank.
    pub rank_tol: f64,
    /// Relative residual acceptance for extracted points.
    pub residual_tol: f64,
}

impl Default for VarietyConfig {
    fn default() -> Self {
        VarietyConfig {
            seed: 20_240_801,
            cluster_tol: 1e-8,
            real_tol: 1e-8,
            rank_tol: 1e-8,
            residual_tol: 1e-6,
        }
    }
}

/// All points of `V(gens)` with multiplicities summing to the quotient
/// dimension.
pub fn solve_variety(
    qa: &QuotientAlgebra<BigRational>,
    gens: &[Polynomial<BigRational>],
    config: &VarietyConfig,
) -> Result<Vec<VarietyPoint>, GroebnerError> {
    let dim = qa.dim();
    if dim == 0 {
        return Ok(Vec::new());
    }
    let nvars = qa.nvars();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut worst_residual: f64 = f64::INFINITY;

    for _attempt in 0..4 {
        // random rational combination of the multiplication matrices
        let coeffs: Vec<BigRational> = (0..nvars)
            .map(|_| rat(rng.gen_range(1..=64)) - rat(rng.gen_range(1..=64)) / rat(128))
            .collect();
        let mut combo = FMat::<BigRational>::zeros(dim, dim);
        for (c, m) in coeffs.iter().zip(qa.multiplication_matrices()) {
            combo = combo.add_mat(&m.scale(c));
        }

        let chi = charpoly(&combo);
        let parts = chi.squarefree_decomposition();

        let lt = fmat_to_f64(&combo).transpose();
        let lt_c = lt.map(|x| Complex64::new(x, 0.0));

        let mut points: Vec<VarietyPoint> = Vec::new();
        let mut failed = false;
        'factors: for (mult, factor) in &parts {
            for lambda in roots_of_squarefree(factor) {
                let Some(v) = eigenvector(&lt_c, lambda, qa.one_index(), &mut rng) else {
                    failed = true;
                    break 'factors;
                };
                let mut coords: Vec<Complex64> = (0..nvars)
                    .map(|var| {
                        let m = &qa.multiplication_matrices()[var];
                        let mut acc = Complex64::new(0.0, 0.0);
                        for k in 0..dim {
                            let c = m.get(k, qa.one_index());
                            if !num_traits::Zero::is_zero(c) {
                                acc += v[k] * rational_to_f64(c);
                            }
                        }
                        acc
                    })
                    .collect();
                newton_polish(&mut coords, gens);
                let scale = 1.0 + coords.iter().map(|z| z.norm()).fold(0.0, f64::max);
                let residual = gens
                    .iter()
                    .map(|g| {
                        g.eval_complex(&coords).map(|v| v.norm()).unwrap_or(f64::NAN)
                            / poly_scale(g, scale)
                    })
                    .fold(0.0, f64::max);
                worst_residual = worst_residual.min(residual);
                if !residual.is_finite() || residual > config.residual_tol {
                    failed = true;
                    break 'factors;
                }
                let is_real = coords
                    .iter()
                    .all(|z| z.im.abs() <= config.real_tol * scale);
                let is_singular = jacobian_rank_deficient(gens, &coords, config.rank_tol);
                points.push(VarietyPoint {
                    coords,
                    multiplicity: *mult,
                    is_singular,
                    is_real,
                });
            }
        }
        if failed {
            continue;
        }

        // distinct eigenvalues must give distinct points
        let mut collision = false;
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                let d = points[i]
                    .coords
                    .iter()
                    .zip(&points[j].coords)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                if d < config.cluster_tol {
                    collision = true;
                }
            }
        }
        if collision {
            continue;
        }

        let total: usize = points.iter().map(|p| p.multiplicity).sum();
        if total != dim {
            // squarefree bookkeeping can't fail, but guard anyway
            continue;
        }

        points.sort_by(|a, b| {
            a.coords
                .iter()
                .flat_map(|z| [z.re, z.im])
                .partial_cmp(b.coords.iter().flat_map(|z| [z.re, z.im]))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        return Ok(points);
    }

    Err(GroebnerError::EigenFailure {
        cond: worst_residual,
    })
}

/// Exact characteristic polynomial via the Faddeev-LeVerrier recursion.
fn charpoly(m: &FMat<BigRational>) -> UniPoly {
    let n = m.rows();
    let mut coeffs = vec![BigRational::from_integer(0.into()); n + 1];
    coeffs[n] = rat(1);
    if n == 0 {
        return UniPoly::new(coeffs);
    }
    let mut b = m.clone();
    coeffs[n - 1] = -b.trace();
    for k in 2..=n {
        // B <- M (B + c[n-k+1] I)
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

fn fmat_to_f64(m: &FMat<BigRational>) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| rational_to_f64(m.get(i, j)))
}

/// Roots of a squarefree rational polynomial via companion-matrix
/// eigenvalues; the roots are simple, so this is well conditioned.
fn roots_of_squarefree(p: &UniPoly) -> Vec<Complex64> {
    let d = p.degree().unwrap_or(0);
    if d == 0 {
        return Vec::new();
    }
    let monic = p.monic();
    let c: Vec<f64> = monic.coeffs().iter().map(rational_to_f64).collect();
    if d == 1 {
        return vec![Complex64::new(-c[0], 0.0)];
    }
    let companion = DMatrix::from_fn(d, d, |i, j| {
        if j == d - 1 {
            -c[i]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    companion.complex_eigenvalues().iter().copied().collect()
}

/// Eigenvector of `a` for (approximate) eigenvalue `lambda` by shifted
/// inverse iteration; returned normalized so `v[one_index] = 1`.
fn eigenvector(
    a: &DMatrix<Complex64>,
    lambda: Complex64,
    one_index: usize,
    rng: &mut ChaCha8Rng,
) -> Option<DVector<Complex64>> {
    let n = a.nrows();
    let scale = a.iter().map(|z| z.norm()).fold(1.0, f64::max);
    // tiny shift keeps the factorization finite when lambda is nearly exact
    let shift = Complex::new(scale * 1e-13, scale * 0.7e-13);
    let mut shifted = a.clone();
    for i in 0..n {
        shifted[(i, i)] -= lambda + shift;
    }
    let lu = shifted.lu();
    let mut v = DVector::from_fn(n, |i, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) / (1.0 + i as f64)
    });
    for _ in 0..3 {
        let solved = lu.solve(&v)?;
        let norm = solved.norm();
        if !norm.is_finite() || norm == 0.0 {
            return None;
        }
        v = solved / Complex64::new(norm, 0.0);
    }
    let pivot = v[one_index];
    if pivot.norm() < 1e-10 {
        return None;
    }
    Some(v.map(|z| z / pivot))
}

/// A crude magnitude bound of `g` on the ball of radius `scale`, used to make
/// residuals relative.
fn poly_scale(g: &Polynomial<BigRational>, scale: f64) -> f64 {
    let mut acc = 1.0f64;
    for (m, c) in g.terms() {
        acc += rational_to_f64(c).abs() * scale.powi(m.degree() as i32);
    }
    acc
}

/// A few Newton steps on square systems; steps are only accepted while the
/// residual improves, which keeps multiple (singular) points stable.
fn newton_polish(coords: &mut [Complex64], gens: &[Polynomial<BigRational>]) {
    let n = coords.len();
    if gens.len() != n || n == 0 {
        return;
    }
    let gens_f: Vec<_> = gens.to_vec();
    let grads: Vec<Vec<Polynomial<BigRational>>> =
        gens_f.iter().map(|g| g.gradient()).collect();
    let residual = |p: &[Complex64]| -> f64 {
        gens_f
            .iter()
            .map(|g| g.eval_complex(p).map(|v| v.norm()).unwrap_or(f64::NAN))
            .fold(0.0, f64::max)
    };
    let mut best = residual(coords);
    for _ in 0..8 {
        if !best.is_finite() || best == 0.0 {
            return;
        }
        let jac = DMatrix::from_fn(n, n, |i, j| {
            grads[i][j].eval_complex(coords).unwrap_or(Complex64::new(f64::NAN, 0.0))
        });
        let rhs = DVector::from_fn(n, |i, _| -gens_f[i].eval_complex(coords).unwrap());
        let Some(delta) = jac.lu().solve(&rhs) else {
            return;
        };
        let candidate: Vec<Complex64> = coords
            .iter()
            .zip(delta.iter())
            .map(|(c, d)| c + d)
            .collect();
        let cand_res = residual(&candidate);
        if cand_res.is_finite() && cand_res < best {
            coords.copy_from_slice(&candidate);
            best = cand_res;
        } else {
            return;
        }
    }
}

/// True when the Jacobian `[grad g_i]` has numerical rank below the number of
/// variables at the point.
pub fn jacobian_rank_deficient(
    gens: &[Polynomial<BigRational>],
    coords: &[Complex64],
    rank_tol: f64,
) -> bool {
    let n = coords.len();
    if n == 0 {
        return false;
    }
    let jac = DMatrix::from_fn(gens.len(), n, |i, j| {
        gens[i]
            .derivative(j)
            .eval_complex(coords)
            .unwrap_or(Complex64::new(f64::NAN, 0.0))
    });
    let svals = jac.singular_values();
    let smax = svals.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 || !smax.is_finite() {
        return true;
    }
    let rank = svals.iter().filter(|&&s| s > rank_tol * smax).count();
    rank < n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groebner::tests::{binary_gens, nonradical_pair, qp, radical_pair};
    use crate::groebner::{GroebnerBasis, QuotientAlgebra};

    fn solve(gens: &[Polynomial<BigRational>]) -> Vec<VarietyPoint> {
        let gb = GroebnerBasis::new(gens).unwrap();
        let qa = QuotientAlgebra::new(gb).unwrap();
        solve_variety(&qa, gens, &VarietyConfig::default()).unwrap()
    }

    fn find_point(points: &[VarietyPoint], target: &[f64]) -> VarietyPoint {
        points
            .iter()
            .find(|p| {
                p.coords
                    .iter()
                    .zip(target)
                    .all(|(z, t)| (z - Complex64::new(*t, 0.0)).norm() < 1e-6)
            })
            .unwrap_or_else(|| panic!("point {target:?} not found"))
            .clone()
    }

    #[test]
    fn four_simple_points() {
        let points = solve(&radical_pair(2, 3));
        assert_eq!(points.len(), 4);
        for target in [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [2.0, 3.0]] {
            let p = find_point(&points, &target);
            assert_eq!(p.multiplicity, 1);
            assert!(!p.is_singular);
            assert!(p.is_real);
        }
    }

    #[test]
    fn double_point_detected() {
        let points = solve(&nonradical_pair(2, 3));
        assert_eq!(points.len(), 3);
        let total: usize = points.iter().map(|p| p.multiplicity).sum();
        assert_eq!(total, 4);
        let dbl = find_point(&points, &[0.0, 1.0]);
        assert_eq!(dbl.multiplicity, 2);
        assert!(dbl.is_singular);
        for target in [[0.0, 0.0], [1.0, 0.0]] {
            let p = find_point(&points, &target);
            assert_eq!(p.multiplicity, 1);
            assert!(!p.is_singular);
        }
    }

    #[test]
    fn binary_grid_points() {
        let gens = binary_gens(2);
        let points = solve(&gens);
        assert_eq!(points.len(), 4);
        assert!(points.iter().all(|p| p.is_real && !p.is_singular));
    }

    #[test]
    fn complex_conjugate_points() {
        // x^2 + 1 = 0 in one variable
        let gens = vec![qp("x1^2 + 1", 1)];
        let points = solve(&gens);
        assert_eq!(points.len(), 2);
        assert!(points.iter().all(|p| !p.is_real && !p.is_singular));
        let im: Vec<f64> = points.iter().map(|p| p.coords[0].im).collect();
        assert!((im[0] + im[1]).abs() < 1e-9);
        assert!((im[0].abs() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn triple_point_multiplicity() {
        // x^3 = 0, y - 1 = 0: one point (0, 1) with multiplicity 3
        let gens = vec![qp("x1^3", 2), qp("x2 - 1", 2)];
        let points = solve(&gens);
        assert_eq!(points.len(), 1);
        assert_eq!(points[0].multiplicity, 3);
        assert!(points[0].is_singular);
        assert!((points[0].coords[0]).norm() < 1e-6);
    }

    #[test]
    fn charpoly_of_known_matrix() {
        use crate::scalar::rat;
        // [[2, 1], [0, 3]] -> (t-2)(t-3) = t^2 - 5t + 6
        let mut m = FMat::<BigRational>::zeros(2, 2);
        m.set(0, 0, rat(2));
        m.set(0, 1, rat(1));
        m.set(1, 1, rat(3));
        let chi = charpoly(&m);
        assert_eq!(chi, UniPoly::new(vec![rat(6), rat(-5), rat(1)]));
    }
}
