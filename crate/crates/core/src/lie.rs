//! The split real Lie algebras `sp(2n)`, `so(n,n)` and `so(n,n+1)` with explicit bases,
//! Killing forms, adjoint actions and the principal `SL(2)` embedding.
//!
//! Each algebra is the set of `X` with `XᵀJ + JX = 0` for the family's form `J`:
//!
//! | family      | `J`                         | Killing constant |
//! |-------------|-----------------------------|------------------|
//! | `sp(2n)`    | `[[0, I], [-I, 0]]`         | `2n + 2`         |
//! | `so(n,n)`   | `[[0, I], [I, 0]]`          | `2n - 2`         |
//! | `so(n,n+1)` | `1 ⊕ [[0, I], [I, 0]]`      | `2n - 1`         |

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{Approx, Scalar};
use crate::matrix::Matrix;
use crate::random::small_rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Sp,
    SoNN,
    SoNN1,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Sp, Family::SoNN, Family::SoNN1];

    pub fn label(self) -> &'static str {
        match self {
            Family::Sp => "sp",
            Family::SoNN => "so_nn",
            Family::SoNN1 => "so_nn1",
        }
    }

    pub fn min_rank(self) -> usize {
        match self {
            Family::Sp | Family::SoNN1 => 2,
            Family::SoNN => 3,
        }
    }

    pub fn ambient_size(self, n: usize) -> usize {
        match self {
            Family::Sp | Family::SoNN => 2 * n,
            Family::SoNN1 => 2 * n + 1,
        }
    }

    pub fn dimension(self, n: usize) -> usize {
        match self {
            Family::Sp | Family::SoNN1 => n * (2 * n + 1),
            Family::SoNN => n * (2 * n - 1),
        }
    }

    /// `c` with `B(X, Y) = c · tr(XY)`.
    pub fn killing_constant(self, n: usize) -> i64 {
        let n = n as i64;
        match self {
            Family::Sp => 2 * n + 2,
            Family::SoNN => 2 * n - 2,
            Family::SoNN1 => 2 * n - 1,
        }
    }

    pub fn form<F: Scalar>(self, n: usize) -> Matrix<F> {
        let m = self.ambient_size(n);
        let off = m - 2 * n;
        Matrix::from_fn(m, m, |i, j| {
            if i < off || j < off {
                return if i == j { F::one() } else { F::zero() };
            }
            let (i, j) = (i - off, j - off);
            if j == i + n {
                F::one()
            } else if i == j + n {
                match self {
                    Family::Sp => -F::one(),
                    _ => F::one(),
                }
            } else {
                F::zero()
            }
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sp" => Ok(Family::Sp),
            "so_nn" => Ok(Family::SoNN),
            "so_nn1" => Ok(Family::SoNN1),
            other => Err(Error::Parse(format!("unknown family {other:?}"))),
        }
    }
}

/// One of the three algebras with its ordered basis and Killing Gram matrix.
#[derive(Clone, Debug)]
pub struct LieAlgebraSpec<F> {
    pub family: Family,
    pub n: usize,
    basis: Vec<Matrix<F>>,
    killing_gram: Matrix<F>,
    form: Matrix<F>,
    probes: Vec<(usize, usize)>,
    probe_inverse: Matrix<F>,
}

/// Matrix unit `E_ij` (one-based indices as in the usual notation).
fn unit<F: Scalar>(m: usize, i: usize, j: usize) -> Matrix<F> {
    let mut e = Matrix::zeros(m, m);
    e[(i - 1, j - 1)] = F::one();
    e
}

fn combo<F: Scalar>(m: usize, terms: &[(i64, usize, usize)]) -> Matrix<F> {
    let mut out = Matrix::<F>::zeros(m, m);
    for &(c, i, j) in terms {
        out[(i - 1, j - 1)] = out[(i - 1, j - 1)].clone() + F::from_i64(c);
    }
    out
}

fn off_diagonal_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=n).flat_map(move |i| (1..=n).filter(move |&j| j != i).map(move |j| (i, j)))
}

fn ordered_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=n).flat_map(move |i| (i + 1..=n).map(move |j| (i, j)))
}

fn raw_basis<F: Scalar>(family: Family, n: usize) -> Vec<Matrix<F>> {
    let m = family.ambient_size(n);
    let mut b = Vec::new();
    match family {
        Family::Sp => {
            b.extend((1..=n).map(|i| combo(m, &[(1, i, i), (-1, n + i, n + i)])));
            b.extend(off_diagonal_pairs(n).map(|(i, j)| combo(m, &[(1, i, j), (-1, n + j, n + i)])));
            b.extend((1..=n).map(|i| unit(m, i, n + i)));
            b.extend((1..=n).map(|i| unit(m, n + i, i)));
            b.extend(ordered_pairs(n).map(|(i, j)| combo(m, &[(1, i, n + j), (1, j, n + i)])));
            b.extend(ordered_pairs(n).map(|(i, j)| combo(m, &[(1, n + i, j), (1, n + j, i)])));
        }
        Family::SoNN => {
            b.extend(off_diagonal_pairs(n).map(|(i, j)| combo(m, &[(1, i, j), (-1, n + j, n + i)])));
            b.extend((1..=n).map(|i| combo(m, &[(1, i, i), (-1, n + i, n + i)])));
            b.extend(ordered_pairs(n).map(|(i, j)| combo(m, &[(1, i, n + j), (-1, j, n + i)])));
            b.extend(ordered_pairs(n).map(|(i, j)| combo(m, &[(1, n + i, j), (-1, n + j, i)])));
        }
        Family::SoNN1 => {
            // E_ii - E_{n+i,n+i} for 2 <= i <= n+1, in the shifted block
            b.extend((1..=n).map(|i| combo(m, &[(1, i + 1, i + 1), (-1, n + i + 1, n + i + 1)])));
            b.extend((1..=n).map(|i| combo(m, &[(1, 1, n + i + 1), (-1, i + 1, 1)])));
            b.extend((1..=n).map(|i| combo(m, &[(1, 1, i + 1), (-1, n + i + 1, 1)])));
            b.extend(
                off_diagonal_pairs(n).map(|(i, j)| combo(m, &[(1, i + 1, j + 1), (-1, n + j + 1, n + i + 1)])),
            );
            b.extend(
                ordered_pairs(n).map(|(i, j)| combo(m, &[(1, i + 1, n + j + 1), (-1, j + 1, n + i + 1)])),
            );
            b.extend(
                ordered_pairs(n).map(|(i, j)| combo(m, &[(1, n + i + 1, j + 1), (-1, n + j + 1, i + 1)])),
            );
        }
    }
    b
}

impl<F: Scalar> LieAlgebraSpec<F> {
    pub fn build(family: Family, n: usize) -> Result<Self> {
        if n < family.min_rank() {
            return Err(Error::Domain(format!(
                "{family} needs n >= {}, got {n}",
                family.min_rank()
            )));
        }
        let spec = Self::from_basis(family, n, raw_basis(family, n))?;
        if spec.basis.len() != family.dimension(n) {
            return Err(Error::Internal(format!("{family}({n}) basis has the wrong size")));
        }
        Ok(spec)
    }

    /// An algebra with an arbitrary basis of the same family; used for basis-change checks.
    pub fn from_basis(family: Family, n: usize, basis: Vec<Matrix<F>>) -> Result<Self> {
        let form: Matrix<F> = family.form(n);
        let m = family.ambient_size(n);
        for (k, x) in basis.iter().enumerate() {
            if x.rows() != m || x.cols() != m {
                return Err(Error::Dimension(format!("basis element {k} is not {m}x{m}")));
            }
            let defect = x.transpose().dot(&form).add(&form.dot(x))?;
            if !defect.is_zero_at_scale(x.max_abs()) {
                return Err(Error::Internal(format!("basis element {k} is not in {family}")));
            }
        }
        // rows = flattened positions, columns = basis elements; pivots pick probe positions
        let flat = Matrix::from_fn(m * m, basis.len(), |r, k| basis[k][(r / m, r % m)].clone());
        let (_, pivots) = flat.transpose().rref();
        if pivots.len() != basis.len() {
            return Err(Error::SingularBasis(format!("{family} basis is linearly dependent")));
        }
        let probes: Vec<(usize, usize)> = pivots.iter().map(|&r| (r / m, r % m)).collect();
        let square = Matrix::from_fn(basis.len(), basis.len(), |a, k| {
            basis[k][probes[a]].clone()
        });
        let probe_inverse = square.inverse()?;
        let c = F::from_i64(family.killing_constant(n));
        let killing_gram = Matrix::from_fn(basis.len(), basis.len(), |i, j| {
            c.clone() * basis[i].dot(&basis[j]).trace()
        });
        Ok(LieAlgebraSpec { family, n, basis, killing_gram, form, probes, probe_inverse })
    }

    /// The algebra with basis `e'_j = Σ_i P_ij e_i`.
    pub fn rebased(&self, p: &Matrix<F>) -> Result<Self> {
        let basis = (0..p.cols())
            .map(|j| {
                (0..p.rows()).fold(Matrix::zeros(self.ambient_size(), self.ambient_size()), |acc, i| {
                    acc.add(&self.basis[i].scale(&p[(i, j)])).expect("same shape")
                })
            })
            .collect();
        Self::from_basis(self.family, self.n, basis)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_size(&self) -> usize {
        self.family.ambient_size(self.n)
    }

    pub fn basis(&self) -> &[Matrix<F>] {
        &self.basis
    }

    pub fn killing_gram(&self) -> &Matrix<F> {
        &self.killing_gram
    }

    pub fn form(&self) -> &Matrix<F> {
        &self.form
    }

    pub fn contains(&self, x: &Matrix<F>) -> bool {
        x.transpose()
            .dot(&self.form)
            .add(&self.form.dot(x))
            .map(|d| d.is_zero_at_scale(x.max_abs()))
            .unwrap_or(false)
    }

    /// Coordinates of `X ∈ 𝔤` in the stored basis.
    pub fn coordinates(&self, x: &Matrix<F>) -> Vec<F> {
        let probe = Matrix::column_vector(self.probes.iter().map(|&ij| x[ij].clone()).collect());
        self.probe_inverse.dot(&probe).column(0)
    }

    pub fn from_coordinates(&self, v: &[F]) -> Matrix<F> {
        let m = self.ambient_size();
        v.iter().zip(&self.basis).fold(Matrix::zeros(m, m), |acc, (c, e)| {
            acc.add(&e.scale(c)).expect("same shape")
        })
    }

    pub fn killing_form(&self, x: &Matrix<F>, y: &Matrix<F>) -> F {
        F::from_i64(self.family.killing_constant(self.n)) * x.dot(y).trace()
    }

    /// Matrix of `ad_X` in the stored basis.
    pub fn ad_matrix(&self, x: &Matrix<F>) -> Matrix<F> {
        let cols: Vec<Vec<F>> =
            self.basis.iter().map(|e| self.coordinates(&bracket(x, e))).collect();
        Matrix::from_fn(self.dim(), self.dim(), |i, j| cols[j][i].clone())
    }

    /// `tr(ad_X ∘ ad_Y)`, the defining expression of the Killing form.
    pub fn killing_via_ad(&self, x: &Matrix<F>, y: &Matrix<F>) -> F {
        self.ad_matrix(x).dot(&self.ad_matrix(y)).trace()
    }

    pub fn is_group_element(&self, g: &Matrix<F>) -> bool {
        g.rows() == self.ambient_size()
            && g.is_square()
            && g.transpose().dot(&self.form).dot(g).approx_eq(&self.form)
    }

    /// Matrix of `X ↦ g X g⁻¹` in the stored basis.
    pub fn ad_action(&self, g: &Matrix<F>) -> Result<Matrix<F>> {
        if !self.is_group_element(g) {
            return Err(Error::GroupMembership(format!(
                "matrix does not preserve the {} form",
                self.family
            )));
        }
        let g_inv = g.inverse()?;
        Ok(self.ad_action_unchecked(g, &g_inv))
    }

    pub(crate) fn ad_action_unchecked(&self, g: &Matrix<F>, g_inv: &Matrix<F>) -> Matrix<F> {
        let cols: Vec<Vec<F>> =
            self.basis.iter().map(|e| self.coordinates(&g.dot(e).dot(g_inv))).collect();
        Matrix::from_fn(self.dim(), self.dim(), |i, j| cols[j][i].clone())
    }

    /// A random element `(I + X)(I - X)⁻¹` for random `X ∈ 𝔤` with small rational coordinates.
    pub fn random_group_element(&self, rng: &mut impl Rng) -> Matrix<F> {
        let m = self.ambient_size();
        loop {
            let coords: Vec<F> =
                (0..self.dim()).map(|_| F::from_rational(&small_rational(rng, 2))).collect();
            let x = self.from_coordinates(&coords);
            let id = Matrix::identity(m);
            if let Ok(inv) = id.sub(&x).expect("square").inverse() {
                return id.add(&x).expect("square").dot(&inv);
            }
        }
    }

    /// `Diag(λ_1..λ_n, 1/λ_1..1/λ_n)`, with a leading 1 for `so(n,n+1)`.
    pub fn loxodromic_diagonal(&self, lambdas: &[F]) -> Result<Matrix<F>> {
        if lambdas.len() != self.n {
            return Err(Error::Dimension(format!("{} eigenvalues for rank {}", lambdas.len(), self.n)));
        }
        let mut d = Vec::with_capacity(self.ambient_size());
        if self.family == Family::SoNN1 {
            d.push(F::one());
        }
        d.extend(lambdas.iter().cloned());
        for l in lambdas {
            d.push(l.inv().ok_or_else(|| Error::Domain("zero eigenvalue".into()))?);
        }
        Ok(Matrix::diagonal(&d))
    }

    /// Diagonal of `Ad_D` predicted row by row from the basis list.
    pub fn predicted_ad_diagonal(&self, lambdas: &[F]) -> Vec<F> {
        let n = self.n;
        let l = |i: usize| lambdas[i - 1].clone();
        let inv = |x: F| x.inv().expect("nonzero eigenvalue");
        let mut out = Vec::with_capacity(self.dim());
        match self.family {
            Family::Sp => {
                out.extend((1..=n).map(|_| F::one()));
                out.extend(off_diagonal_pairs(n).map(|(i, j)| l(i) / l(j)));
                out.extend((1..=n).map(|i| l(i) * l(i)));
                out.extend((1..=n).map(|i| inv(l(i) * l(i))));
                out.extend(ordered_pairs(n).map(|(i, j)| l(i) * l(j)));
                out.extend(ordered_pairs(n).map(|(i, j)| inv(l(i) * l(j))));
            }
            Family::SoNN => {
                out.extend(off_diagonal_pairs(n).map(|(i, j)| l(i) / l(j)));
                out.extend((1..=n).map(|_| F::one()));
                out.extend(ordered_pairs(n).map(|(i, j)| l(i) * l(j)));
                out.extend(ordered_pairs(n).map(|(i, j)| inv(l(i) * l(j))));
            }
            Family::SoNN1 => {
                out.extend((1..=n).map(|_| F::one()));
                out.extend((1..=n).map(l));
                out.extend((1..=n).map(|i| inv(l(i))));
                out.extend(off_diagonal_pairs(n).map(|(i, j)| l(i) / l(j)));
                out.extend(ordered_pairs(n).map(|(i, j)| l(i) * l(j)));
                out.extend(ordered_pairs(n).map(|(i, j)| inv(l(i) * l(j))));
            }
        }
        out
    }
}

pub fn bracket<F: Scalar>(x: &Matrix<F>, y: &Matrix<F>) -> Matrix<F> {
    x.dot(y).sub(&y.dot(x)).expect("square matrices of one size")
}

/// Outcome of [`diagonalize_loxodromic`].
#[derive(Clone, Debug)]
pub enum Loxodromic {
    /// `Q g Q⁻¹ = D`, with `Q` preserving the family's form.
    Diagonal { q: Matrix<Approx>, d: Matrix<Approx>, lambdas: Vec<f64> },
    NotLoxodromic(String),
}

/// Numerical diagonalization of a group element with real simple eigenvalues.
///
/// Eigenvalues are ordered as `λ_1..λ_n` (those of modulus above one, increasing), then their
/// inverses, with the eigenvalue 1 first for `so(n,n+1)`. Eigenvectors are scaled so that the
/// conjugator preserves the form.
pub fn diagonalize_loxodromic<F: Scalar>(family: Family, n: usize, g: &Matrix<F>) -> Loxodromic {
    let m = family.ambient_size(n);
    if g.rows() != m || !g.is_square() {
        return Loxodromic::NotLoxodromic(format!("expected a {m}x{m} matrix"));
    }
    let gm = DMatrix::from_fn(m, m, |i, j| g[(i, j)].to_f64());
    let scale = gm.amax().max(1.0);
    let tol = 1e-8 * scale;
    let eig = gm.clone().complex_eigenvalues();
    if let Some(z) = eig.iter().find(|z| z.im.abs() > tol) {
        return Loxodromic::NotLoxodromic(format!("complex eigenvalue {z}"));
    }
    let mut vals: Vec<f64> = eig.iter().map(|z| z.re).collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    if vals.windows(2).any(|w| (w[1] - w[0]).abs() <= tol.sqrt()) {
        return Loxodromic::NotLoxodromic("repeated eigenvalue".into());
    }
    let mut big: Vec<f64> = vals.iter().copied().filter(|v| v.abs() > 1.0 + tol).collect();
    big.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    if big.len() != n {
        return Loxodromic::NotLoxodromic(format!("{} eigenvalues of modulus above one", big.len()));
    }
    let mut order: Vec<f64> = Vec::with_capacity(m);
    if family == Family::SoNN1 {
        match vals.iter().find(|v| (**v - 1.0).abs() <= tol.sqrt()) {
            Some(&one) => order.push(one),
            None => return Loxodromic::NotLoxodromic("no fixed direction".into()),
        }
    }
    order.extend(&big);
    for &l in &big {
        match vals.iter().min_by(|a, b| (**a - 1.0 / l).abs().total_cmp(&(**b - 1.0 / l).abs())) {
            Some(&v) => order.push(v),
            None => return Loxodromic::NotLoxodromic("unpaired eigenvalue".into()),
        }
    }
    let mut vecs: Vec<nalgebra::DVector<f64>> = order
        .iter()
        .map(|&l| {
            let shifted = &gm - DMatrix::identity(m, m) * l;
            let svd = shifted.svd(false, true);
            let vt = svd.v_t.expect("requested");
            let k = svd.singular_values.imin();
            let mut v = vt.row(k).transpose();
            let big_idx = v.iamax();
            if v[big_idx] < 0.0 {
                v = -v;
            }
            v
        })
        .collect();
    let form = DMatrix::from_fn(m, m, |i, j| family.form::<Approx>(n)[(i, j)].0);
    let off = m - 2 * n;
    if off == 1 {
        let norm = (vecs[0].transpose() * &form * &vecs[0])[(0, 0)];
        if norm <= 0.0 {
            return Loxodromic::NotLoxodromic("fixed direction is not positive".into());
        }
        vecs[0] /= norm.sqrt();
    }
    for i in 0..n {
        let pairing = (vecs[off + i].transpose() * &form * &vecs[off + n + i])[(0, 0)];
        if pairing.abs() <= tol {
            return Loxodromic::NotLoxodromic("degenerate eigenvector pairing".into());
        }
        vecs[off + n + i] /= pairing;
    }
    let p = DMatrix::from_columns(&vecs);
    let Some(q) = p.clone().try_inverse() else {
        return Loxodromic::NotLoxodromic("eigenvectors are dependent".into());
    };
    let to_matrix = |a: &DMatrix<f64>| Matrix::from_fn(m, m, |i, j| Approx(a[(i, j)]));
    let d = Matrix::diagonal(&order.iter().map(|&x| Approx(x)).collect::<Vec<_>>());
    Loxodromic::Diagonal { q: to_matrix(&q), d, lambdas: big }
}

fn binomial(m: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (m - i) as i64 / (i + 1) as i64)
}

/// Coefficients of `(a x + c y)^{m-k} (b x + d y)^k` in the monomials `x^{m-j} y^j`.
fn symmetric_power<F: Scalar>(a: &Matrix<F>, m: usize) -> Matrix<F> {
    let (p, q, r, s) = (a[(0, 0)].clone(), a[(0, 1)].clone(), a[(1, 0)].clone(), a[(1, 1)].clone());
    let poly_pow = |u: &F, v: &F, e: usize| {
        // (u x + v y)^e as coefficients of x^{e-j} y^j
        let mut coeffs = vec![F::one()];
        for _ in 0..e {
            let mut next = vec![F::zero(); coeffs.len() + 1];
            for (j, c) in coeffs.iter().enumerate() {
                next[j] = next[j].clone() + c.clone() * u.clone();
                next[j + 1] = next[j + 1].clone() + c.clone() * v.clone();
            }
            coeffs = next;
        }
        coeffs
    };
    let mut out = Matrix::<F>::zeros(m + 1, m + 1);
    for k in 0..=m {
        let left = poly_pow(&p, &r, m - k);
        let right = poly_pow(&q, &s, k);
        for (i, x) in left.iter().enumerate() {
            for (j, y) in right.iter().enumerate() {
                out[(i + j, k)] = out[(i + j, k)].clone() + x.clone() * y.clone();
            }
        }
    }
    out
}

/// Image of `a ∈ SL(2)` in `Sp(2n)` under the irreducible representation on degree `2n - 1`
/// binary forms.
///
/// The monomial basis `e_j = x^{m-j} y^j` (`m = 2n - 1`) is rescaled to
/// `f_i = e_{i-1}` and `f_{n+i} = (-1)^{i-1} C(m, i-1) e_{m-i+1}` for `i = 1..n`, in which the
/// invariant form is `[[0, I], [-I, 0]]`. `Diag(λ, 1/λ)` maps to
/// `Diag(λ^m, λ^{m-2}, .., λ, λ^{-m}, λ^{-(m-2)}, .., λ^{-1})`.
pub fn principal_sl2_embed<F: Scalar>(a: &Matrix<F>, n: usize) -> Result<Matrix<F>> {
    if a.rows() != 2 || a.cols() != 2 {
        return Err(Error::Dimension("expected a 2x2 matrix".into()));
    }
    if !(a.det()? - F::one()).is_negligible(1.0) {
        return Err(Error::Domain("matrix is not unimodular".into()));
    }
    if n == 0 {
        return Err(Error::Domain("rank must be positive".into()));
    }
    let m = 2 * n - 1;
    let sym = symmetric_power(a, m);
    let mut s = Matrix::zeros(m + 1, m + 1);
    for i in 1..=n {
        s[(i - 1, i - 1)] = F::one();
        let sign = if (i - 1) % 2 == 0 { 1 } else { -1 };
        s[(m - i + 1, n + i - 1)] = F::from_i64(sign * binomial(m, i - 1));
    }
    Ok(s.inverse()?.dot(&sym).dot(&s))
}
