//! Dense row-major matrices and the elimination kernel.
//!
//! Exact fields pivot on the first nonzero entry scanning top to bottom, so every basis
//! produced here is reproducible. The approximate field uses partial pivoting with a zero
//! test relative to the largest entry of the input. Rank, kernel, image and solve on the
//! approximate field go through the singular value decomposition instead, with singular values
//! below `tolerance · max(σ_max, 1)` treated as zero.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::field::{tolerance, Scalar};
use nalgebra::DMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Scalar> Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.cols + j]
    }
}

impl<F: Scalar> IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.cols + j]
    }
}

impl<F: Scalar> fmt::Display for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Thin singular value data of a float matrix: `u` is `rows × k`, `v` is `cols × cols`.
struct Svd<F> {
    u: Matrix<F>,
    singular: Vec<f64>,
    v: Matrix<F>,
    rank: usize,
}

/// Result of reduced row-echelon elimination.
struct Echelon<F> {
    reduced: Matrix<F>,
    pivots: Vec<usize>,
}

impl<F: Scalar> Matrix<F> {
    pub fn new(rows: usize, cols: usize, data: Vec<F>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { F::one() } else { F::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Integer entries, for tests and fixtures.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let v = rows.iter().map(|r| r.iter().map(|&x| F::from_i64(x)).collect()).collect();
        Self::from_rows(v).expect("ragged integer matrix")
    }

    /// Column matrix from a vector.
    pub fn column_vector(v: Vec<F>) -> Self {
        Matrix { rows: v.len(), cols: 1, data: v }
    }

    pub fn diagonal(d: &[F]) -> Self {
        Self::from_fn(d.len(), d.len(), |i, j| if i == j { d[i].clone() } else { F::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[F] {
        &self.data
    }

    pub fn row(&self, i: usize) -> Vec<F> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, k| self[(i, idx[k])].clone())
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix<F>) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)].clone();
            }
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<G: Scalar>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn scale(&self, s: &F) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn neg(&self) -> Self {
        self.map(|x| -x.clone())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "add")?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.clone() + b.clone()).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "sub")?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.clone() - b.clone()).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    fn same_shape(&self, other: &Self, op: &str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "{op}: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() && F::EXACT {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if F::EXACT && b.is_zero() {
                        continue;
                    }
                    out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                }
            }
        }
        Ok(out)
    }

    /// Product that panics on a shape mismatch; for internal use where shapes are known.
    pub fn dot(&self, other: &Self) -> Self {
        self.mul(other).expect("matrix product shape")
    }

    pub fn trace(&self) -> F {
        (0..self.rows.min(self.cols)).fold(F::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    /// `[self | other]`
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::Dimension(format!("hstack rows {} vs {}", self.rows, other.rows)));
        }
        Ok(Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        }))
    }

    pub fn hstack_all(rows: usize, parts: &[Matrix<F>]) -> Result<Self> {
        parts.iter().try_fold(Self::zeros(rows, 0), |acc, m| acc.hstack(m))
    }

    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::Dimension(format!("vstack cols {} vs {}", self.cols, other.cols)));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Matrix { rows: self.rows + other.rows, cols: self.cols, data })
    }

    pub fn block_diag(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        out.set_block(0, 0, self);
        out.set_block(self.rows, self.cols, other);
        out
    }

    /// Largest absolute entry as a double; the scale for relative zero tests.
    pub fn max_abs(&self) -> f64 {
        if F::EXACT {
            return 1.0;
        }
        self.data.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.is_zero_at_scale(1.0)
    }

    pub fn is_zero_at_scale(&self, scale: f64) -> bool {
        self.data.iter().all(|x| x.is_negligible(scale))
    }

    pub fn is_skew(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let scale = self.max_abs();
        (0..self.rows).all(|i| {
            (i..self.cols).all(|j| (self[(i, j)].clone() + self[(j, i)].clone()).is_negligible(scale))
        })
    }

    pub fn is_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let scale = self.max_abs();
        (0..self.rows).all(|i| {
            (i + 1..self.cols)
                .all(|j| (self[(i, j)].clone() - self[(j, i)].clone()).is_negligible(scale))
        })
    }

    /// Approximate or exact equality, entrywise, using the field's zero test.
    pub fn approx_eq(&self, other: &Self) -> bool {
        if self.rows != other.rows || self.cols != other.cols {
            return false;
        }
        let scale = self.max_abs().max(other.max_abs());
        self.data
            .iter()
            .zip(&other.data)
            .all(|(a, b)| (a.clone() - b.clone()).is_negligible(scale))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn pivot_row(&self, col: usize, from: usize, scale: f64) -> Option<usize> {
        if F::EXACT {
            (from..self.rows).find(|&i| !self[(i, col)].is_zero())
        } else {
            let best = (from..self.rows).max_by(|&a, &b| {
                let (x, y) = (self[(a, col)].to_f64().abs(), self[(b, col)].to_f64().abs());
                x.total_cmp(&y)
            })?;
            (!self[(best, col)].is_negligible(scale)).then_some(best)
        }
    }

    /// Reduced row-echelon form restricted to pivoting in the first `pivot_cols` columns.
    fn echelon(&self, pivot_cols: usize) -> Echelon<F> {
        let scale = self.max_abs();
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..pivot_cols {
            if r == m.rows {
                break;
            }
            let Some(p) = m.pivot_row(c, r, scale) else {
                if !F::EXACT {
                    for i in r..m.rows {
                        m[(i, c)] = F::zero();
                    }
                }
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].inv().expect("pivot is nonzero");
            for j in c..m.cols {
                m[(r, j)] = m[(r, j)].clone() * inv.clone();
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m[(i, c)].clone();
                if factor.is_zero() && F::EXACT {
                    continue;
                }
                for j in c..m.cols {
                    let t = m[(r, j)].clone() * factor.clone();
                    m[(i, j)] = m[(i, j)].clone() - t;
                }
                m[(i, c)] = F::zero();
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { reduced: m, pivots }
    }

    fn to_na(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].to_f64())
    }

    fn from_na(m: &DMatrix<f64>) -> Self {
        Matrix::from_fn(m.nrows(), m.ncols(), |i, j| F::from_float(m[(i, j)]).expect("inexact field"))
    }

    /// Padded with zero rows so that `v` is square.
    fn svd(&self) -> Svd<F> {
        if self.rows == 0 || self.cols == 0 {
            return Svd {
                u: Matrix::zeros(self.rows, 0),
                singular: Vec::new(),
                v: Matrix::identity(self.cols),
                rank: 0,
            };
        }
        let rows = self.rows.max(self.cols);
        let mut a = DMatrix::zeros(rows, self.cols);
        a.view_mut((0, 0), (self.rows, self.cols)).copy_from(&self.to_na());
        let svd = a.svd(true, true);
        let (u, v_t) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
        let singular: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
        let top = singular.first().copied().unwrap_or(0.0);
        let rank = singular.iter().filter(|&&s| s > tolerance() * top.max(1.0)).count();
        let u = DMatrix::from_fn(self.rows, order.len(), |i, k| u[(i, order[k])]);
        let v = DMatrix::from_fn(self.cols, self.cols, |i, k| v_t[(order[k], i)]);
        Svd { u: Self::from_na(&u), singular, v: Self::from_na(&v), rank }
    }

    fn solve_least_squares(&self, rhs: &Matrix<F>) -> Result<Matrix<F>> {
        let svd = self.svd();
        let mut x = DMatrix::zeros(self.cols, rhs.cols);
        let (u, v, b) = (svd.u.to_na(), svd.v.to_na(), rhs.to_na());
        for k in 0..svd.rank {
            let coeff = u.column(k).transpose() * &b / svd.singular[k];
            x += v.column(k) * coeff;
        }
        let residual = (&self.to_na() * &x - &b).amax();
        if residual > tolerance() * self.max_abs().max(rhs.max_abs()).max(1.0) * (1.0 + x.amax()) {
            return Err(Error::Inconsistent);
        }
        Ok(Self::from_na(&x))
    }

    /// Reduced row-echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix<F>, Vec<usize>) {
        let e = self.echelon(self.cols);
        (e.reduced, e.pivots)
    }

    pub fn rank(&self) -> usize {
        if !F::EXACT {
            return self.svd().rank;
        }
        self.echelon(self.cols).pivots.len()
    }

    /// Columns spanning the kernel, one per free column of the echelon form. Over the
    /// approximate field the columns are orthonormal.
    pub fn kernel_basis(&self) -> Matrix<F> {
        if !F::EXACT {
            let svd = self.svd();
            return svd.v.select_columns(&(svd.rank..self.cols).collect::<Vec<_>>());
        }
        let Echelon { reduced, pivots } = self.echelon(self.cols);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Matrix::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            out[(f, k)] = F::one();
            for (i, &p) in pivots.iter().enumerate() {
                out[(p, k)] = -reduced[(i, f)].clone();
            }
        }
        out
    }

    /// The pivot columns of the original matrix: a basis of the column space. Over the
    /// approximate field, an orthonormal basis of left singular vectors.
    pub fn image_basis(&self) -> Matrix<F> {
        if !F::EXACT {
            let svd = self.svd();
            return svd.u.select_columns(&(0..svd.rank).collect::<Vec<_>>());
        }
        let pivots = self.echelon(self.cols).pivots;
        self.select_columns(&pivots)
    }

    /// One solution `x` of `self · x = rhs`, free variables set to zero.
    pub fn solve(&self, rhs: &Matrix<F>) -> Result<Matrix<F>> {
        if rhs.rows != self.rows {
            return Err(Error::Dimension(format!(
                "solve: {} equations, right-hand side has {} rows",
                self.rows, rhs.rows
            )));
        }
        if !F::EXACT {
            return self.solve_least_squares(rhs);
        }
        let aug = self.hstack(rhs)?;
        let Echelon { reduced, pivots } = aug.echelon(self.cols);
        let rank = pivots.len();
        let scale = aug.max_abs();
        for i in rank..reduced.rows {
            for j in self.cols..reduced.cols {
                if !reduced[(i, j)].is_negligible(scale) {
                    return Err(Error::Inconsistent);
                }
            }
        }
        let mut x = Matrix::zeros(self.cols, rhs.cols);
        for (i, &p) in pivots.iter().enumerate() {
            for k in 0..rhs.cols {
                x[(p, k)] = reduced[(i, self.cols + k)].clone();
            }
        }
        Ok(x)
    }

    pub fn det(&self) -> Result<F> {
        if !self.is_square() {
            return Err(Error::Dimension(format!("det of a {}x{} matrix", self.rows, self.cols)));
        }
        let scale = self.max_abs();
        let mut m = self.clone();
        let n = self.rows;
        let mut acc = F::one();
        for c in 0..n {
            let Some(p) = m.pivot_row(c, c, scale) else {
                return Ok(F::zero());
            };
            if p != c {
                m.swap_rows(c, p);
                acc = -acc;
            }
            let piv = m[(c, c)].clone();
            let inv = piv.inv().expect("pivot is nonzero");
            acc = acc * piv;
            for i in c + 1..n {
                let factor = m[(i, c)].clone() * inv.clone();
                if factor.is_zero() && F::EXACT {
                    continue;
                }
                for j in c + 1..n {
                    let t = m[(c, j)].clone() * factor.clone();
                    m[(i, j)] = m[(i, j)].clone() - t;
                }
                m[(i, c)] = F::zero();
            }
        }
        Ok(acc)
    }

    pub fn inverse(&self) -> Result<Matrix<F>> {
        if !self.is_square() {
            return Err(Error::Dimension(format!("inverse of a {}x{} matrix", self.rows, self.cols)));
        }
        let aug = self.hstack(&Matrix::identity(self.rows))?;
        let Echelon { reduced, pivots } = aug.echelon(self.cols);
        if pivots.len() < self.rows {
            return Err(Error::SingularBasis(format!("rank {} < {}", pivots.len(), self.rows)));
        }
        Ok(reduced.submatrix(0, self.cols, self.rows, self.rows))
    }

    /// Pfaffian of a skew-symmetric matrix by congruence elimination on 2x2 blocks.
    pub fn pfaffian(&self) -> Result<F> {
        if !self.is_square() || self.rows % 2 == 1 {
            return Err(Error::Form(format!(
                "pfaffian needs an even square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        if !self.is_skew() {
            return Err(Error::Form("pfaffian of a matrix that is not skew-symmetric".into()));
        }
        let n = self.rows;
        let scale = self.max_abs();
        let mut a = self.clone();
        let mut pf = F::one();
        let mut k = 0;
        while k < n {
            let candidates = k + 1..n;
            let j = if F::EXACT {
                candidates.clone().find(|&j| !a[(k, j)].is_zero())
            } else {
                candidates
                    .clone()
                    .max_by(|&x, &y| a[(k, x)].to_f64().abs().total_cmp(&a[(k, y)].to_f64().abs()))
                    .filter(|&j| !a[(k, j)].is_negligible(scale))
            };
            let Some(j) = j else {
                return Ok(F::zero());
            };
            if j != k + 1 {
                a.swap_rows(j, k + 1);
                for i in 0..n {
                    a.data.swap(i * n + j, i * n + k + 1);
                }
                pf = -pf;
            }
            let p = a[(k, k + 1)].clone();
            let pinv = p.inv().expect("pivot is nonzero");
            pf = pf * p;
            for i in k + 2..n {
                let x = a[(k + 1, i)].clone() * pinv.clone();
                let y = -(a[(k, i)].clone() * pinv.clone());
                if x.is_zero() && y.is_zero() && F::EXACT {
                    continue;
                }
                for c in 0..n {
                    let t = x.clone() * a[(k, c)].clone() + y.clone() * a[(k + 1, c)].clone();
                    a[(i, c)] = a[(i, c)].clone() + t;
                }
                for r in 0..n {
                    let t = x.clone() * a[(r, k)].clone() + y.clone() * a[(r, k + 1)].clone();
                    a[(r, i)] = a[(r, i)].clone() + t;
                }
            }
            k += 2;
        }
        Ok(pf)
    }
}

/// Determinant of the matrix `T` with `old · T = new`, i.e. `[new, old]`.
pub fn change_base_det<F: Scalar>(new_basis: &Matrix<F>, old_basis: &Matrix<F>) -> Result<F> {
    if !new_basis.is_square() || !old_basis.is_square() || new_basis.rows != old_basis.rows {
        return Err(Error::Dimension(format!(
            "change of basis between {}x{} and {}x{}",
            new_basis.rows, new_basis.cols, old_basis.rows, old_basis.cols
        )));
    }
    let old_det = old_basis.det()?;
    if old_det.is_zero() {
        return Err(Error::SingularBasis("old basis is singular".into()));
    }
    Ok(new_basis.det()? / old_det)
}

/// The standard symplectic Gram matrix `[[0, I], [-I, 0]]` of size `2l`.
pub fn standard_symplectic<F: Scalar>(l: usize) -> Matrix<F> {
    Matrix::from_fn(2 * l, 2 * l, |i, j| {
        if j == i + l {
            F::one()
        } else if i == j + l {
            -F::one()
        } else {
            F::zero()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rational, Approx, Rational};
    use proptest::prelude::*;

    type M = Matrix<Rational>;

    fn r(n: i64) -> Rational {
        rational(n, 1)
    }

    #[test]
    fn det_examples() {
        assert_eq!(M::from_i64(&[&[2, 0], &[0, 3]]).det().unwrap(), r(6));
        assert_eq!(M::identity(4).det().unwrap(), r(1));
        assert_eq!(M::from_i64(&[&[1, 2], &[3, 4]]).det().unwrap(), r(-2));
        assert!(M::zeros(2, 3).det().is_err());
        assert_eq!(M::zeros(0, 0).det().unwrap(), r(1));
    }

    #[test]
    fn pfaffian_examples() {
        assert_eq!(M::from_i64(&[&[0, 5], &[-5, 0]]).pfaffian().unwrap(), r(5));
        let j = M::from_i64(&[&[0, 1], &[-1, 0]]);
        assert_eq!(j.block_diag(&j).pfaffian().unwrap(), r(1));
        assert!(M::identity(2).pfaffian().is_err());
        assert!(M::zeros(3, 3).pfaffian().is_err());
        // Pf of [[0,I],[-I,0]] in size 2l is (-1)^{l(l-1)/2}
        assert_eq!(standard_symplectic::<Rational>(2).pfaffian().unwrap(), r(-1));
        assert_eq!(standard_symplectic::<Rational>(3).pfaffian().unwrap(), r(-1));
        assert_eq!(standard_symplectic::<Rational>(4).pfaffian().unwrap(), r(1));
    }

    #[test]
    fn pfaffian_four_by_four_formula() {
        // Pf = a01 a23 - a02 a13 + a03 a12
        let m = M::from_i64(&[&[0, 1, 2, 3], &[-1, 0, 4, 5], &[-2, -4, 0, 6], &[-3, -5, -6, 0]]);
        assert_eq!(m.pfaffian().unwrap(), r(6 - 10 + 12));
    }

    #[test]
    fn kernel_image_solve_examples() {
        let k = M::from_i64(&[&[1, 1]]).kernel_basis();
        assert_eq!(k, M::from_i64(&[&[-1], &[1]]));
        assert_eq!(M::identity(5).rank(), 5);
        let im = M::from_i64(&[&[1, 2], &[2, 4]]).image_basis();
        assert_eq!(im, M::from_i64(&[&[1], &[2]]));
        let a = M::from_i64(&[&[1, 2], &[2, 4]]);
        assert_eq!(a.solve(&M::from_i64(&[&[1], &[3]])), Err(Error::Inconsistent));
        assert_eq!(a.solve(&M::from_i64(&[&[3], &[6]])).unwrap(), M::from_i64(&[&[3], &[0]]));
    }

    #[test]
    fn change_base_examples() {
        let old = M::identity(1);
        assert_eq!(change_base_det(&M::from_i64(&[&[2]]), &old).unwrap(), r(2));
        let id = M::identity(2);
        assert_eq!(change_base_det(&id, &id).unwrap(), r(1));
        let new = M::from_i64(&[&[1, 1], &[1, -1]]);
        assert_eq!(change_base_det(&new, &id).unwrap(), r(-2));
        assert!(matches!(change_base_det(&id, &M::zeros(2, 2)), Err(Error::SingularBasis(_))));
    }

    #[test]
    fn float_kernel_uses_relative_threshold() {
        let m = Matrix::from_rows(vec![
            vec![Approx(1e6), Approx(2e6)],
            vec![Approx(2e6), Approx(4e6 + 1e-6)],
        ])
        .unwrap();
        assert_eq!(m.rank(), 1);
        assert_eq!(m.kernel_basis().cols(), 1);
    }

    fn small_matrix(rows: usize, cols: usize) -> impl Strategy<Value = M> {
        proptest::collection::vec(-4i64..=4, rows * cols).prop_map(move |v| {
            Matrix::new(rows, cols, v.into_iter().map(|x| r(x)).collect()).unwrap()
        })
    }

    fn shaped() -> impl Strategy<Value = M> {
        (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| small_matrix(r, c))
    }

    fn skew(n: usize) -> impl Strategy<Value = M> {
        proptest::collection::vec(-5i64..=5, n * n).prop_map(move |v| {
            Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
                std::cmp::Ordering::Less => r(v[i * n + j]),
                std::cmp::Ordering::Greater => -r(v[j * n + i]),
                std::cmp::Ordering::Equal => r(0),
            })
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in shaped()) {
            prop_assert_eq!(m.rank() + m.kernel_basis().cols(), m.cols());
            prop_assert!(m.dot(&m.kernel_basis()).is_zero());
        }

        #[test]
        fn solve_reproduces_rhs(m in shaped(), seed in proptest::collection::vec(-3i64..=3, 5)) {
            let x0 = Matrix::column_vector(seed[..m.cols()].iter().map(|&v| r(v)).collect());
            let rhs = m.dot(&x0);
            let x = m.solve(&rhs).unwrap();
            prop_assert_eq!(m.dot(&x), rhs);
        }

        #[test]
        fn det_is_multiplicative(n in 1usize..=6, a in small_matrix(6, 6), b in small_matrix(6, 6)) {
            let a = a.submatrix(0, 0, n, n);
            let b = b.submatrix(0, 0, n, n);
            prop_assert_eq!(a.dot(&b).det().unwrap(), a.det().unwrap() * b.det().unwrap());
        }

        #[test]
        fn pfaffian_squares_to_det(l in 1usize..=4, m in skew(8)) {
            let m = m.submatrix(0, 0, 2 * l, 2 * l);
            let pf = m.pfaffian().unwrap();
            prop_assert_eq!(pf.clone() * pf, m.det().unwrap());
        }

        #[test]
        fn pfaffian_transforms_by_det(m in skew(4), p in small_matrix(4, 4)) {
            // Pf(P^T A P) = det(P) Pf(A)
            let lhs = p.transpose().dot(&m).dot(&p).pfaffian().unwrap();
            prop_assert_eq!(lhs, p.det().unwrap() * m.pfaffian().unwrap());
        }

        #[test]
        fn inverse_roundtrip(m in small_matrix(4, 4)) {
            match m.inverse() {
                Ok(inv) => prop_assert_eq!(m.dot(&inv), M::identity(4)),
                Err(_) => prop_assert_eq!(m.det().unwrap(), r(0)),
            }
        }
    }
}
