//! The SOS relaxation at a fixed order, and a dense primal-dual
//! interior-point solver for it.
//!
//! The relaxation of order `d` maximizes `c` subject to
//! `f - c = sum_i lambda_i g_i + sigma` with `sigma = v^T Q v` over the
//! monomials of degree at most `d` and `Q` positive semidefinite. Coefficient
//! matching over all monomials of degree at most `2d` gives linear equalities
//! coupling `Q` with the free variables `(c, lambda)`. The free variables are
//! eliminated by an orthogonal projection (SVD of their coefficient block),
//! leaving a standard-form SDP `min <C,X> : <A_j,X> = b_j, X psd` that a
//! Nesterov-Todd-scaled predictor-corrector method solves. Free variables are
//! recovered afterwards by least squares, which yields the numeric
//! multipliers and the bound `f_d`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{FPoly, Monomial, QPoly};
use crate::scalar::rational_to_f64;

#[derive(Debug, Error, PartialEq)]
pub enum SdpError {
    #[error("relaxation order {got} below floor {needed}")]
    OrderBelowFloor { needed: usize, got: usize },
    #[error("objective degree {deg_f} exceeds 2d = {two_d}")]
    ObjectiveTooHigh { deg_f: usize, two_d: usize },
    #[error("generators must be nonzero and share the variable count")]
    BadGenerators,
    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// All monomials of total degree at most `d`, ascending grevlex.
pub fn monomials_up_to(nvars: usize, d: usize) -> Vec<Monomial> {
    fn rec(prefix: &mut Vec<u32>, left: usize, slot: usize, nvars: usize, out: &mut Vec<Monomial>) {
        if slot == nvars {
            out.push(Monomial(prefix.clone()));
            return;
        }
        for e in 0..=left {
            prefix.push(e as u32);
            rec(prefix, left - e, slot + 1, nvars, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), d, 0, nvars, &mut out);
    out.sort();
    out
}

/// The assembled order-`d` relaxation.
#[derive(Clone, Debug)]
pub struct SdpProblem {
    pub nvars: usize,
    pub order: usize,
    /// Basis monomials of the Gram block, size `C(n+d, d)`.
    pub basis: Vec<Monomial>,
    /// Constraint index: all monomials of degree at most `2d`.
    pub rows: Vec<Monomial>,
    /// One symmetric 0/1 matrix per constraint row: entries of the Gram
    /// block contributing to that monomial.
    pub constraint_matrices: Vec<DMatrix<f64>>,
    /// Coefficients of `f` per constraint row.
    pub rhs: DVector<f64>,
    /// Dense block of the free variables `(c, lambda coefficients)`.
    pub free_block: DMatrix<f64>,
    /// Objective over the free variables (`min c_f . y_f`).
    pub objective: DVector<f64>,
    /// Multiplier layout: per generator, the monomials of its multiplier.
    pub multiplier_monomials: Vec<Vec<Monomial>>,
    /// Generators (floats), kept for verification and reporting.
    pub gens: Vec<FPoly>,
}

impl SdpProblem {
    pub fn moment_matrix_size(&self) -> usize {
        self.basis.len()
    }
}

/// Build the order-`d` relaxation of minimizing `f` over `gens = 0`.
///
/// `multiplier_caps` overrides the degree cap of each multiplier (defaults
/// to `2d - deg g_i`; anything larger is clamped to it).
pub fn build_relaxation(
    f: &QPoly,
    gens: &[QPoly],
    d: usize,
    multiplier_caps: Option<&[usize]>,
) -> Result<SdpProblem, SdpError> {
    let nvars = f.nvars();
    if gens.iter().any(|g| g.nvars() != nvars) {
        return Err(SdpError::BadGenerators);
    }
    let nonzero: Vec<(usize, &QPoly)> = gens
        .iter()
        .enumerate()
        .filter(|(_, g)| !g.is_zero())
        .collect();
    let max_dg = nonzero
        .iter()
        .map(|(_, g)| g.degree().unwrap())
        .max()
        .unwrap_or(0);
    let floor = max_dg.div_ceil(2);
    if d < floor {
        return Err(SdpError::OrderBelowFloor { needed: floor, got: d });
    }
    let deg_f = f.degree().unwrap_or(0);
    if deg_f > 2 * d {
        return Err(SdpError::ObjectiveTooHigh { deg_f, two_d: 2 * d });
    }

    let basis = monomials_up_to(nvars, d);
    let rows = monomials_up_to(nvars, 2 * d);
    let row_index: std::collections::BTreeMap<&Monomial, usize> =
        rows.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let nbasis = basis.len();
    let nrows = rows.len();

    let mut constraint_matrices = vec![DMatrix::<f64>::zeros(nbasis, nbasis); nrows];
    for (j, mj) in basis.iter().enumerate() {
        for (k, mk) in basis.iter().enumerate() {
            let prod = mj.mul(mk);
            let r = row_index[&prod];
            constraint_matrices[r][(j, k)] = 1.0;
        }
    }

    let mut rhs = DVector::<f64>::zeros(nrows);
    for (m, c) in f.terms() {
        rhs[row_index[m]] = rational_to_f64(c);
    }

    // free columns: the constant c, then each multiplier coefficient
    let mut multiplier_monomials: Vec<Vec<Monomial>> = vec![Vec::new(); gens.len()];
    let mut columns: Vec<DVector<f64>> = Vec::new();
    let mut c_col = DVector::<f64>::zeros(nrows);
    c_col[row_index[&Monomial::one(nvars)]] = 1.0;
    columns.push(c_col);
    for (i, g) in &nonzero {
        let dg = g.degree().unwrap();
        let mut cap = 2 * d - dg;
        if let Some(caps) = multiplier_caps {
            cap = cap.min(caps[*i]);
        }
        let mons = monomials_up_to(nvars, cap);
        for m in &mons {
            let shifted = g.mul_term(m, &crate::scalar::rat(1));
            let mut col = DVector::<f64>::zeros(nrows);
            for (mm, c) in shifted.terms() {
                col[row_index[mm]] = rational_to_f64(c);
            }
            columns.push(col);
        }
        multiplier_monomials[*i] = mons;
    }
    let free_block = DMatrix::from_columns(&columns);
    let mut objective = DVector::<f64>::zeros(free_block.ncols());
    objective[0] = -1.0;

    Ok(SdpProblem {
        nvars,
        order: d,
        basis,
        rows,
        constraint_matrices,
        rhs,
        free_block,
        objective,
        multiplier_monomials,
        gens: gens.iter().map(|g| g.to_float()).collect(),
    })
}

/// Standard-form data after eliminating the free variables.
pub struct ReducedSdp {
    pub c_mat: DMatrix<f64>,
    pub a_mats: Vec<DMatrix<f64>>,
    pub b: DVector<f64>,
    /// `f_d = -(const_term + <C, X>)` at the optimum.
    pub const_term: f64,
    /// Pseudo-inverse applied to `b - A(X)` recovers the free variables.
    pinv: DMatrix<f64>,
    /// The objective is ill-posed: `c` can be shifted along the null space.
    pub objective_unbounded: bool,
}

impl SdpProblem {
    pub fn reduce(&self) -> ReducedSdp {
        let m = self.rows.len();
        let svd = self.free_block.clone().svd(true, true);
        let u = svd.u.as_ref().unwrap();
        let vt = svd.v_t.as_ref().unwrap();
        let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
        let tol = smax * 1e-12 * (m as f64).sqrt().max(1.0);
        let rank = svd
            .singular_values
            .iter()
            .filter(|&&s| s > tol)
            .count();

        // pinv = V S^-1 U^T (rank-truncated)
        let ncols = self.free_block.ncols();
        let mut sinv = DMatrix::<f64>::zeros(ncols, u.ncols());
        for i in 0..rank {
            sinv[(i, i)] = 1.0 / svd.singular_values[i];
        }
        let pinv = vt.transpose() * sinv * u.transpose();

        // c fails to be determined by X exactly when the objective has a
        // component in the null space of the free block
        let proj = vt.transpose() * (vt * &self.objective);
        let objective_unbounded = (&self.objective - proj).norm() > 1e-9;

        // orthonormal completion of range(U_r): rows of the reduced system
        let u_r = u.columns(0, rank).into_owned();
        let perp = orthonormal_complement(&u_r, m);
        let mtil = perp.ncols();

        let w = pinv.transpose() * &self.objective; // in R^m
        let mut c_mat = DMatrix::<f64>::zeros(self.basis.len(), self.basis.len());
        for (alpha, a) in self.constraint_matrices.iter().enumerate() {
            if w[alpha] != 0.0 {
                c_mat -= a * w[alpha];
            }
        }
        let mut a_mats = Vec::with_capacity(mtil);
        let mut b = DVector::<f64>::zeros(mtil);
        for j in 0..mtil {
            let mut aj = DMatrix::<f64>::zeros(self.basis.len(), self.basis.len());
            for (alpha, a) in self.constraint_matrices.iter().enumerate() {
                let wj = perp[(alpha, j)];
                if wj != 0.0 {
                    aj += a * wj;
                }
            }
            a_mats.push(aj);
            b[j] = perp.column(j).dot(&self.rhs);
        }
        let const_term = self.objective.dot(&(&pinv * &self.rhs));

        ReducedSdp {
            c_mat,
            a_mats,
            b,
            const_term,
            pinv,
            objective_unbounded,
        }
    }

    /// Plain-text dump of the reduced standard form for cross-checking with
    /// external solvers. Format: a size line `psd N m`, then sparse triplets
    /// `C i j v`, `A k i j v`, and values `b k v` (upper triangles only).
    pub fn dump_text(&self) -> String {
        use std::fmt::Write;
        let red = self.reduce();
        let n = self.basis.len();
        let mut out = String::new();
        writeln!(out, "psd {} {}", n, red.a_mats.len()).unwrap();
        writeln!(out, "# f_d = -(const + <C,X>), const = {:.17e}", red.const_term).unwrap();
        for i in 0..n {
            for j in i..n {
                let v = red.c_mat[(i, j)];
                if v != 0.0 {
                    writeln!(out, "C {i} {j} {v:.17e}").unwrap();
                }
            }
        }
        for (k, a) in red.a_mats.iter().enumerate() {
            for i in 0..n {
                for j in i..n {
                    let v = a[(i, j)];
                    if v != 0.0 {
                        writeln!(out, "A {k} {i} {j} {v:.17e}").unwrap();
                    }
                }
            }
            writeln!(out, "b {k} {:.17e}", red.b[k]).unwrap();
        }
        out
    }
}

/// Columns spanning the orthogonal complement of `range(u_r)` in `R^m`,
/// built by Gram-Schmidt over the coordinate vectors (two passes for
/// stability).
fn orthonormal_complement(u_r: &DMatrix<f64>, m: usize) -> DMatrix<f64> {
    let rank = u_r.ncols();
    let target = m - rank;
    let mut cols: Vec<DVector<f64>> = Vec::new();
    for i in 0..m {
        if cols.len() == target {
            break;
        }
        let mut v = DVector::<f64>::zeros(m);
        v[i] = 1.0;
        for _ in 0..2 {
            for j in 0..rank {
                let proj = u_r.column(j).dot(&v);
                v -= u_r.column(j) * proj;
            }
            for b in &cols {
                let proj = b.dot(&v);
                v -= b * proj;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            cols.push(v / norm);
        }
    }
    if cols.is_empty() {
        DMatrix::<f64>::zeros(m, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    UnboundedBelow,
    MaxIter,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub max_iter: usize,
    pub gap_tol: f64,
    pub feas_tol: f64,
    pub step_frac: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iter: 200,
            gap_tol: 1e-8,
            feas_tol: 1e-8,
            step_frac: 0.98,
        }
    }
}

/// Solution of one relaxation order.
#[derive(Clone, Debug)]
pub struct SdpSolution {
    /// The bound `f_d` (the recovered optimal `c`).
    pub fd: f64,
    pub status: SolveStatus,
    pub duality_gap: f64,
    pub iterations: usize,
    /// Gram matrix of the SOS part over `basis_monomials`.
    pub gram: DMatrix<f64>,
    pub basis_monomials: Vec<Monomial>,
    /// Numeric multipliers, one per generator.
    pub multipliers: Vec<FPoly>,
    /// The Gram trace grew by orders of magnitude during the solve, the
    /// symptom of an unattained optimum.
    pub gram_trace_growth: bool,
}

/// Solve the relaxation with the interior-point method.
pub fn solve(prob: &SdpProblem, opts: &SolveOptions) -> Result<SdpSolution, SdpError> {
    let red = prob.reduce();
    let n = prob.basis.len();

    if red.objective_unbounded {
        // c can grow without bound: the constraints admit 1 = sum lambda g
        return Ok(SdpSolution {
            fd: f64::INFINITY,
            status: SolveStatus::Infeasible,
            duality_gap: f64::INFINITY,
            iterations: 0,
            gram: DMatrix::zeros(n, n),
            basis_monomials: prob.basis.clone(),
            multipliers: empty_multipliers(prob),
            gram_trace_growth: false,
        });
    }

    let mtil = red.a_mats.len();
    let scale = 1.0_f64
        .max(red.c_mat.norm())
        .max(red.b.norm());
    let mut x = DMatrix::<f64>::identity(n, n) * scale;
    let mut s = DMatrix::<f64>::identity(n, n) * scale;
    let mut y = DVector::<f64>::zeros(mtil);
    let trace0 = x.trace();
    let mut status = SolveStatus::MaxIter;
    let mut iterations = opts.max_iter;
    let mut gap = f64::INFINITY;
    let mu0 = x.dot(&s) / n as f64;
    let feas0 = {
        let rp0 = (&red.b - &apply_a(&red.a_mats, &x)).norm() / (1.0 + red.b.norm());
        let rd0 = (&red.c_mat - &s).norm() / (1.0 + red.c_mat.norm());
        rp0.max(rd0).max(1e-8)
    };
    let mut stalls = 0usize;

    if mtil == 0 {
        // no coupling constraints: optimum at X = 0 when C is psd
        let eig = nalgebra::SymmetricEigen::new(red.c_mat.clone());
        let min_eig = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        let fd = if min_eig >= -1e-10 {
            -(red.const_term)
        } else {
            f64::INFINITY
        };
        return Ok(SdpSolution {
            fd,
            status: if min_eig >= -1e-10 {
                SolveStatus::Optimal
            } else {
                SolveStatus::Infeasible
            },
            duality_gap: 0.0,
            iterations: 0,
            gram: DMatrix::zeros(n, n),
            basis_monomials: prob.basis.clone(),
            multipliers: empty_multipliers(prob),
            gram_trace_growth: false,
        });
    }

    for iter in 0..opts.max_iter {
        let rp = &red.b - &apply_a(&red.a_mats, &x);
        let rd = &red.c_mat - &s - &apply_at(&red.a_mats, &y);
        let pobj = red.c_mat.dot(&x);
        let dobj = red.b.dot(&y);
        gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        let pfeas = rp.norm() / (1.0 + red.b.norm());
        let dfeas = rd.norm() / (1.0 + red.c_mat.norm());
        if gap <= opts.gap_tol && pfeas <= opts.feas_tol && dfeas <= opts.feas_tol {
            status = SolveStatus::Optimal;
            iterations = iter;
            break;
        }
        if x.trace() > 1e14 * scale || y.norm() > 1e14 * scale {
            // diverging iterates: give up with the best data so far
            iterations = iter;
            break;
        }

        let mu = x.dot(&s) / n as f64;

        // NT scaling: W = G G^T with G = Lx V Sigma^{-1/2},
        // Ls^T Lx = U Sigma V^T
        let lx = match nalgebra::Cholesky::new(x.clone()) {
            Some(c) => c.l(),
            None => break,
        };
        let ls = match nalgebra::Cholesky::new(s.clone()) {
            Some(c) => c.l(),
            None => break,
        };
        let msvd = (ls.transpose() * &lx).svd(true, true);
        let v_t = msvd.v_t.as_ref().unwrap();
        let mut g = &lx * v_t.transpose();
        for j in 0..n {
            let d = msvd.singular_values[j].max(1e-300).sqrt();
            for i in 0..n {
                g[(i, j)] /= d;
            }
        }
        let w = &g * g.transpose();

        // Schur complement H_jk = <A_j, W A_k W>
        let wak: Vec<DMatrix<f64>> = red.a_mats.iter().map(|a| &w * a * &w).collect();
        let mut hmat = DMatrix::<f64>::zeros(mtil, mtil);
        for j in 0..mtil {
            for k in j..mtil {
                let v = red.a_mats[j].dot(&wak[k]);
                hmat[(j, k)] = v;
                hmat[(k, j)] = v;
            }
        }
        let ridge = 1e-13 * (1.0 + hmat.trace() / mtil as f64);
        for j in 0..mtil {
            hmat[(j, j)] += ridge;
        }
        let Some(hchol) = nalgebra::Cholesky::new(hmat) else {
            iterations = iter;
            break;
        };

        let s_inv = match nalgebra::Cholesky::new(s.clone()) {
            Some(c) => c.inverse(),
            None => break,
        };

        // predictor (sigma = 0), then corrector with adaptive centering
        let solve_direction = |sigma: f64| -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
            // complementarity target: sigma mu S^-1 - X
            let comp = &s_inv * (sigma * mu) - &x;
            // H dy = rp - A(comp - W rd W)
            let wrdw = &w * &rd * &w;
            let inner = &comp - &wrdw;
            let mut rhs_vec = rp.clone();
            for j in 0..mtil {
                rhs_vec[j] -= red.a_mats[j].dot(&inner);
            }
            let dy = hchol.solve(&rhs_vec);
            let ds = &rd - &apply_at(&red.a_mats, &dy);
            let dx_raw = &comp - &w * &ds * &w;
            let dx = (&dx_raw + dx_raw.transpose()) * 0.5;
            (dx, dy, ds)
        };

        let (dx_aff, _, ds_aff) = solve_direction(0.0);
        let ap_aff = max_step(&x, &dx_aff, opts.step_frac);
        let ad_aff = max_step(&s, &ds_aff, opts.step_frac);
        let mu_aff = (&x + &dx_aff * ap_aff).dot(&(&s + &ds_aff * ad_aff)) / n as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        let (dx, dy, ds) = solve_direction(sigma);
        let mut ap = max_step(&x, &dx, opts.step_frac);
        let mut ad = max_step(&s, &ds, opts.step_frac);
        // neighborhood guard: the second-order change in XS can crash the
        // complementarity far below the infeasibility, freezing the iterate
        // at an infeasible point; backtrack until mu stays proportionate
        let ratio0 = mu0 / feas0.max(1e-16);
        for _ in 0..40 {
            let xn = &x + &dx * ap;
            let sn = &s + &ds * ad;
            let yn = &y + &dy * ad;
            let mu_n = xn.dot(&sn) / n as f64;
            let pf_n = (&red.b - &apply_a(&red.a_mats, &xn)).norm() / (1.0 + red.b.norm());
            let df_n = (&red.c_mat - &sn - &apply_at(&red.a_mats, &yn)).norm()
                / (1.0 + red.c_mat.norm());
            let feas_n = pf_n.max(df_n);
            if mu_n >= 1e-2 * ratio0 * feas_n || feas_n <= opts.feas_tol {
                break;
            }
            ap *= 0.6;
            ad *= 0.6;
        }
        if std::env::var("SOSCERT_SDP_TRACE").is_ok() {
            eprintln!(
                "it {iter:3} mu {mu:9.2e} gap {gap:9.2e} pfeas {pfeas:9.2e} dfeas {dfeas:9.2e} sigma {sigma:6.3} ap {ap:6.3} ad {ad:6.3} trX {:9.2e}",
                x.trace()
            );
        }
        if ap.max(ad) < 1e-3 {
            stalls += 1;
            if stalls >= 2 {
                // jammed against the cone boundary while still infeasible
                // (typical of unattained optima): lift back into the
                // interior and continue
                stalls = 0;
                let beta = (pfeas.max(dfeas) * scale * 0.1).max(mu.sqrt() * 1e-3);
                for i in 0..n {
                    x[(i, i)] += beta;
                    s[(i, i)] += beta;
                }
                continue;
            }
        } else {
            stalls = 0;
        }
        x += &dx * ap;
        y += &dy * ad;
        s += &ds * ad;
    }

    // recover the free variables by least squares
    let residual_rows = &prob.rhs - &apply_a(&prob.constraint_matrices, &x);
    let y_f = &red.pinv * residual_rows;
    let fd = y_f[0];
    let multipliers = recover_multipliers(prob, &y_f);
    let growth = x.trace() > 50.0 * trace0.max(1.0);

    Ok(SdpSolution {
        fd,
        status,
        duality_gap: gap,
        iterations,
        gram: x,
        basis_monomials: prob.basis.clone(),
        multipliers,
        gram_trace_growth: growth,
    })
}

fn empty_multipliers(prob: &SdpProblem) -> Vec<FPoly> {
    prob.multiplier_monomials
        .iter()
        .map(|_| FPoly::zero(prob.nvars))
        .collect()
}

fn recover_multipliers(prob: &SdpProblem, y_f: &DVector<f64>) -> Vec<FPoly> {
    let mut idx = 1;
    prob.multiplier_monomials
        .iter()
        .map(|mons| {
            let mut p = FPoly::zero(prob.nvars);
            for m in mons {
                p.add_term(m.clone(), y_f[idx]);
                idx += 1;
            }
            p
        })
        .collect()
}

fn apply_a(a_mats: &[DMatrix<f64>], x: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_fn(a_mats.len(), |j, _| a_mats[j].dot(x))
}

fn apply_at(a_mats: &[DMatrix<f64>], y: &DVector<f64>) -> DMatrix<f64> {
    let n = a_mats.first().map(|a| a.nrows()).unwrap_or(0);
    let mut out = DMatrix::<f64>::zeros(n, n);
    for (a, &yj) in a_mats.iter().zip(y.iter()) {
        if yj != 0.0 {
            out += a * yj;
        }
    }
    out
}

/// Largest step `alpha <= 1` keeping `M + alpha D` positive definite, scaled
/// by the step fraction.
fn max_step(m: &DMatrix<f64>, d: &DMatrix<f64>, frac: f64) -> f64 {
    let Some(chol) = nalgebra::Cholesky::new(m.clone()) else {
        return 0.0;
    };
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .unwrap_or_else(|| DMatrix::identity(m.nrows(), m.nrows()));
    let t = &linv * d * linv.transpose();
    let sym = (&t + t.transpose()) * 0.5;
    let eig = nalgebra::SymmetricEigen::new(sym);
    let min_eig = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min_eig >= 0.0 {
        1.0
    } else {
        (frac * (-1.0 / min_eig)).min(1.0)
    }
}

/// Run the relaxation over a range of orders.
pub fn hierarchy_sweep(
    f: &QPoly,
    gens: &[QPoly],
    dmin: usize,
    dmax: usize,
    opts: &SolveOptions,
) -> Result<Vec<SdpSolution>, SdpError> {
    let mut out = Vec::new();
    for d in dmin..=dmax {
        let prob = build_relaxation(f, gens, d, None)?;
        out.push(solve(&prob, opts)?);
    }
    Ok(out)
}

/// Split a Gram matrix into explicit squares: eigendecomposition, dropping
/// eigenvalues below `tol`; errors when an eigenvalue is significantly
/// negative (below `-100 tol`).
pub fn extract_sos(
    gram: &DMatrix<f64>,
    monomials: &[Monomial],
    tol: f64,
) -> Result<Vec<FPoly>, SdpError> {
    let sym = (gram + gram.transpose()) * 0.5;
    let eig = nalgebra::SymmetricEigen::new(sym);
    let nvars = monomials.first().map(|m| m.nvars()).unwrap_or(0);
    let mut out = Vec::new();
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda < -100.0 * tol {
            return Err(SdpError::Numerical(format!(
                "Gram not PSD: eigenvalue {lambda:.3e}"
            )));
        }
        if lambda <= tol {
            continue;
        }
        let w = lambda.sqrt();
        let mut p = FPoly::zero(nvars);
        for (k, m) in monomials.iter().enumerate() {
            p.add_term(m.clone(), w * eig.eigenvectors[(k, j)]);
        }
        out.push(p);
    }
    Ok(out)
}

/// `sigma = v^T Gram v` as a polynomial.
pub fn gram_polynomial(gram: &DMatrix<f64>, monomials: &[Monomial]) -> FPoly {
    let nvars = monomials.first().map(|m| m.nvars()).unwrap_or(0);
    let mut out = FPoly::zero(nvars);
    for (j, mj) in monomials.iter().enumerate() {
        for (k, mk) in monomials.iter().enumerate() {
            out.add_term(mj.mul(mk), gram[(j, k)]);
        }
    }
    out
}
