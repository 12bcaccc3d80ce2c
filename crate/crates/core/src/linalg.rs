//! Dense exact linear algebra over a coefficient field.
//!
//! Used for multiplication matrices, interpolation systems, and membership
//! lifts. Everything is Gaussian elimination with exact pivots; float linear
//! algebra lives in `nalgebra` on the numeric side.

use crate::scalar::Coeff;

/// Row-major dense matrix over the field `C`.
#[derive(Clone, PartialEq, Debug)]
pub struct FMat<C> {
    rows: usize,
    cols: usize,
    data: Vec<C>,
}

impl<C: Coeff> FMat<C> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FMat {
            rows,
            cols,
            data: vec![C::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, C::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        FMat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &C {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul_vec(&self, v: &[C]) -> Vec<C> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = C::zero();
                for j in 0..self.cols {
                    if !self.get(i, j).is_zero() && !v[j].is_zero() {
                        acc = acc.add(&self.get(i, j).mul(&v[j]));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn mul_mat(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j).add(&a.mul(b));
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    pub fn add_mat(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j).add(other.get(i, j)))
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j).mul(c))
    }

    pub fn trace(&self) -> C {
        assert_eq!(self.rows, self.cols);
        let mut acc = C::zero();
        for i in 0..self.rows {
            acc = acc.add(self.get(i, i));
        }
        acc
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> FMat<D> {
        FMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Row echelon elimination on an augmented system `[A | B]`, in place.
    /// Returns the pivot columns of `A`.
    fn eliminate(a: &mut FMat<C>, b: &mut FMat<C>) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..a.cols {
            // exact arithmetic: any nonzero pivot works
            let Some(p) = (row..a.rows).find(|&r| !a.get(r, col).is_zero()) else {
                continue;
            };
            a.swap_rows(row, p);
            b.swap_rows(row, p);
            let inv = a.get(row, col).inv().unwrap();
            a.scale_row(row, &inv);
            b.scale_row(row, &inv);
            for r in 0..a.rows {
                if r != row && !a.get(r, col).is_zero() {
                    let factor = a.get(r, col).clone();
                    a.axpy_row(r, row, &factor);
                    b.axpy_row(r, row, &factor);
                }
            }
            pivots.push(col);
            row += 1;
            if row == a.rows {
                break;
            }
        }
        pivots
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn scale_row(&mut self, i: usize, c: &C) {
        for j in 0..self.cols {
            let v = self.get(i, j).mul(c);
            self.set(i, j, v);
        }
    }

    /// `row_r -= factor * row_src`
    fn axpy_row(&mut self, r: usize, src: usize, factor: &C) {
        for j in 0..self.cols {
            let v = self.get(r, j).sub(&factor.mul(self.get(src, j)));
            self.set(r, j, v);
        }
    }

    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut b = FMat::zeros(self.rows, 0);
        Self::eliminate(&mut a, &mut b).len()
    }

    /// Exact determinant by triangularization.
    pub fn determinant(&self) -> C {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut det = C::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !a.get(r, col).is_zero()) else {
                return C::zero();
            };
            if p != col {
                a.swap_rows(col, p);
                det = det.neg();
            }
            let pivot = a.get(col, col).clone();
            det = det.mul(&pivot);
            let inv = pivot.inv().unwrap();
            for r in (col + 1)..n {
                if !a.get(r, col).is_zero() {
                    let factor = a.get(r, col).mul(&inv);
                    a.axpy_row(r, col, &factor);
                }
            }
        }
        det
    }

    /// Solve `A x = b` exactly. Returns one solution with free variables set
    /// to zero, or `None` when the system is inconsistent.
    pub fn solve(&self, rhs: &[C]) -> Option<Vec<C>> {
        assert_eq!(rhs.len(), self.rows);
        let mut a = self.clone();
        let mut b = FMat {
            rows: self.rows,
            cols: 1,
            data: rhs.to_vec(),
        };
        let pivots = Self::eliminate(&mut a, &mut b);
        // inconsistency: a zero row of A with nonzero rhs
        for r in pivots.len()..self.rows {
            if !b.get(r, 0).is_zero() {
                return None;
            }
        }
        let mut x = vec![C::zero(); self.cols];
        for (r, &col) in pivots.iter().enumerate() {
            x[col] = b.get(r, 0).clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let mut a = self.clone();
        let mut b = Self::identity(self.rows);
        let pivots = Self::eliminate(&mut a, &mut b);
        if pivots.len() == self.rows {
            Some(b)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, ratio};
    use num_rational::BigRational;

    #[test]
    fn solve_and_inverse() {
        let a = FMat::from_fn(2, 2, |i, j| rat([[2, 1], [1, 3]][i][j]));
        let x = a.solve(&[rat(5), rat(10)]).unwrap();
        assert_eq!(x, vec![rat(1), rat(3)]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul_mat(&inv), FMat::<BigRational>::identity(2));
    }

    #[test]
    fn underdetermined_and_inconsistent() {
        // x + y = 2 has a solution with free variable zeroed
        let a = FMat::from_fn(1, 2, |_, _| rat(1));
        let x = a.solve(&[rat(2)]).unwrap();
        assert_eq!(a.mul_vec(&x), vec![rat(2)]);

        // x + y = 1, x + y = 2 inconsistent
        let a = FMat::from_fn(2, 2, |_, _| rat(1));
        assert!(a.solve(&[rat(1), rat(2)]).is_none());
    }

    #[test]
    fn rank_of_rational_matrix() {
        let a = FMat::from_fn(3, 3, |i, j| ratio((i + j) as i64, 1));
        assert_eq!(a.rank(), 2);
    }
}
