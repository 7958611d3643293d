//! Based chain complexes and their Reidemeister torsion.
//!
//! Degree `p` runs over `0..=n`. The boundary `∂_p : C_p → C_{p-1}` is stored for `p = 1..=n`;
//! `∂_0` and `∂_{n+1}` are the empty maps. For bases `c_p` of the chains and `h_p` of the
//! homology the torsion is
//!
//! ```text
//! T = ∏_p [ b_p ⊔ h_p ⊔ s_p(b_{p-1}), c_p ]^{(-1)^{p+1}}
//! ```
//!
//! where `b_p` spans the boundaries, `s_p` is a section of `∂_p` and `[e, f]` is the
//! determinant of the matrix expressing `e` in terms of `f`.

use crate::error::{Error, Result};
use crate::field::{powi, Scalar};
use crate::matrix::{change_base_det, Matrix};

#[derive(Clone, Debug, PartialEq)]
pub struct ChainComplex<F> {
    dims: Vec<usize>,
    boundaries: Vec<Matrix<F>>,
    chain_bases: Vec<Matrix<F>>,
}

/// Cycle representatives of a homology basis, one matrix per degree.
#[derive(Clone, Debug, PartialEq)]
pub struct HomologyBasis<F> {
    pub bases: Vec<Matrix<F>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TorsionValue<F> {
    pub value: F,
    pub sign_convention: String,
}

/// Which deterministic boundary bases and sections the torsion algorithm uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Sections {
    /// Pivot columns and free variables taken from the left.
    #[default]
    Forward,
    /// The same with the column order reversed.
    Reversed,
}

const SIGN_NOTE: &str =
    "product over p of [b_p | h_p | s_p(b_{p-1}) ; c_p]^((-1)^(p+1)), columns in the given order";

impl<F: Scalar> ChainComplex<F> {
    /// Builds a complex from `dims` and the boundaries `∂_1..∂_n`, with standard chain bases.
    pub fn new(dims: Vec<usize>, boundaries: Vec<Matrix<F>>) -> Result<Self> {
        let bases = dims.iter().map(|&d| Matrix::identity(d)).collect();
        Self::with_bases(dims, boundaries, bases)
    }

    pub fn with_bases(
        dims: Vec<usize>,
        boundaries: Vec<Matrix<F>>,
        chain_bases: Vec<Matrix<F>>,
    ) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Dimension("a chain complex needs at least one degree".into()));
        }
        if boundaries.len() + 1 != dims.len() {
            return Err(Error::Dimension(format!(
                "{} degrees need {} boundaries, got {}",
                dims.len(),
                dims.len() - 1,
                boundaries.len()
            )));
        }
        for (k, d) in boundaries.iter().enumerate() {
            let p = k + 1;
            if d.rows() != dims[p - 1] || d.cols() != dims[p] {
                return Err(Error::Dimension(format!(
                    "boundary {p} is {}x{}, expected {}x{}",
                    d.rows(),
                    d.cols(),
                    dims[p - 1],
                    dims[p]
                )));
            }
        }
        if chain_bases.len() != dims.len() {
            return Err(Error::Dimension(format!(
                "{} chain bases for {} degrees",
                chain_bases.len(),
                dims.len()
            )));
        }
        for (p, c) in chain_bases.iter().enumerate() {
            if c.rows() != dims[p] || c.cols() != dims[p] {
                return Err(Error::Dimension(format!("chain basis {p} has the wrong shape")));
            }
            if c.rank() < dims[p] {
                return Err(Error::SingularBasis(format!("chain basis in degree {p}")));
            }
        }
        for p in 1..boundaries.len() {
            let composite = boundaries[p - 1].dot(&boundaries[p]);
            let scale = boundaries[p - 1].max_abs() * boundaries[p].max_abs();
            if !composite.is_zero_at_scale(scale) {
                return Err(Error::NotAComplex { degree: p });
            }
        }
        Ok(ChainComplex { dims, boundaries, chain_bases })
    }

    /// Highest degree `n`.
    pub fn length(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn chain_bases(&self) -> &[Matrix<F>] {
        &self.chain_bases
    }

    pub fn boundaries(&self) -> &[Matrix<F>] {
        &self.boundaries
    }

    /// `∂_p`, including the empty maps at `p = 0` and `p = n + 1`.
    pub fn boundary(&self, p: usize) -> Matrix<F> {
        if p == 0 {
            Matrix::zeros(0, self.dims[0])
        } else if p > self.length() {
            Matrix::zeros(self.dims[self.length()], 0)
        } else {
            self.boundaries[p - 1].clone()
        }
    }

    pub fn with_chain_bases(&self, bases: Vec<Matrix<F>>) -> Result<Self> {
        Self::with_bases(self.dims.clone(), self.boundaries.clone(), bases)
    }

    /// Extends the complex with zero groups up to degree `n`.
    pub fn padded(&self, n: usize) -> Self {
        let mut out = self.clone();
        while out.length() < n {
            let top = *out.dims.last().unwrap();
            out.boundaries.push(Matrix::zeros(top, 0));
            out.dims.push(0);
            out.chain_bases.push(Matrix::zeros(0, 0));
        }
        out
    }

    pub fn homology_dims(&self) -> Vec<usize> {
        (0..=self.length())
            .map(|p| self.dims[p] - self.boundary(p).rank() - self.boundary(p + 1).rank())
            .collect()
    }

    pub fn is_acyclic(&self) -> bool {
        self.homology_dims().iter().all(|&d| d == 0)
    }
}

fn reversed_columns<F: Scalar>(m: &Matrix<F>) -> Matrix<F> {
    let idx: Vec<usize> = (0..m.cols()).rev().collect();
    m.select_columns(&idx)
}

fn reversed_rows<F: Scalar>(m: &Matrix<F>) -> Matrix<F> {
    Matrix::from_fn(m.rows(), m.cols(), |i, j| m[(m.rows() - 1 - i, j)].clone())
}

/// A basis of `Im ∂`, chosen by the section rule.
fn boundary_basis<F: Scalar>(d: &Matrix<F>, sections: Sections) -> Matrix<F> {
    match sections {
        Sections::Forward => d.image_basis(),
        Sections::Reversed => reversed_columns(d).image_basis(),
    }
}

/// Preimages under `∂` of the columns of `targets`, chosen by the section rule.
fn section<F: Scalar>(d: &Matrix<F>, targets: &Matrix<F>, sections: Sections) -> Result<Matrix<F>> {
    match sections {
        Sections::Forward => d.solve(targets),
        Sections::Reversed => Ok(reversed_rows(&reversed_columns(d).solve(targets)?)),
    }
}

impl<F: Scalar> HomologyBasis<F> {
    /// Empty bases for an acyclic complex.
    pub fn empty(c: &ChainComplex<F>) -> Self {
        HomologyBasis { bases: c.dims.iter().map(|&d| Matrix::zeros(d, 0)).collect() }
    }

    pub fn dims(&self) -> Vec<usize> {
        self.bases.iter().map(Matrix::cols).collect()
    }

    /// Checks the cycle and independence conditions against `c`.
    pub fn validate(&self, c: &ChainComplex<F>) -> Result<()> {
        if self.bases.len() != c.dims.len() {
            return Err(Error::Contract(format!(
                "homology basis has {} degrees, complex has {}",
                self.bases.len(),
                c.dims.len()
            )));
        }
        let hdims = c.homology_dims();
        for (p, h) in self.bases.iter().enumerate() {
            if h.rows() != c.dims[p] || h.cols() != hdims[p] {
                return Err(Error::Contract(format!(
                    "degree {p}: homology basis is {}x{}, expected {}x{}",
                    h.rows(),
                    h.cols(),
                    c.dims[p],
                    hdims[p]
                )));
            }
            let d = c.boundary(p);
            let scale = d.max_abs() * h.max_abs();
            if !d.dot(h).is_zero_at_scale(scale) {
                return Err(Error::Contract(format!("degree {p}: a basis column is not a cycle")));
            }
            let b = c.boundary(p + 1).image_basis();
            if b.hstack(h)?.rank() != b.cols() + h.cols() {
                return Err(Error::Contract(format!(
                    "degree {p}: columns are dependent modulo boundaries"
                )));
            }
        }
        Ok(())
    }
}

/// Echelon-selected cycle representatives of each homology group.
pub fn homology_basis_default<F: Scalar>(c: &ChainComplex<F>) -> HomologyBasis<F> {
    let bases = (0..=c.length())
        .map(|p| {
            let z = c.boundary(p).kernel_basis();
            let b = c.boundary(p + 1).image_basis();
            if !F::EXACT {
                // boundaries projected into the orthonormal cycle basis, then the complement
                let bz = z.dot(&z.transpose().dot(&b)).image_basis();
                let residue = z.sub(&bz.dot(&bz.transpose().dot(&z))).expect("same shape");
                return residue.image_basis();
            }
            let (_, pivots) = b.hstack(&z).expect("same ambient space").rref();
            let picked: Vec<usize> =
                pivots.into_iter().filter(|&k| k >= b.cols()).map(|k| k - b.cols()).collect();
            z.select_columns(&picked)
        })
        .collect();
    HomologyBasis { bases }
}

/// Coordinates of the cycles `v` in the homology basis `h`, modulo boundaries `b`.
pub fn homology_coordinates<F: Scalar>(
    h: &Matrix<F>,
    b: &Matrix<F>,
    v: &Matrix<F>,
) -> Result<Matrix<F>> {
    let x = h.hstack(b)?.solve(v).map_err(|e| match e {
        Error::Inconsistent => Error::Contract("vector is not a cycle in the span of the basis".into()),
        other => other,
    })?;
    Ok(x.submatrix(0, 0, h.cols(), v.cols()))
}

/// Determinant `[h', h]` of a change of homology basis, computed modulo boundaries.
pub fn homology_change_det<F: Scalar>(
    c: &ChainComplex<F>,
    p: usize,
    new: &Matrix<F>,
    old: &Matrix<F>,
) -> Result<F> {
    let b = c.boundary(p + 1).image_basis();
    homology_coordinates(old, &b, new)?.det()
}

pub fn torsion<F: Scalar>(c: &ChainComplex<F>, h: &HomologyBasis<F>) -> Result<TorsionValue<F>> {
    torsion_with(c, h, Sections::Forward)
}

pub fn torsion_with<F: Scalar>(
    c: &ChainComplex<F>,
    h: &HomologyBasis<F>,
    sections: Sections,
) -> Result<TorsionValue<F>> {
    h.validate(c)?;
    let n = c.length();
    let b: Vec<Matrix<F>> =
        (0..=n).map(|p| boundary_basis(&c.boundary(p + 1), sections)).collect();
    let mut value = F::one();
    for p in 0..=n {
        let lifted = if p == 0 {
            Matrix::zeros(c.dims[0], 0)
        } else {
            section(&c.boundary(p), &b[p - 1], sections)?
        };
        let assembled = Matrix::hstack_all(c.dims[p], &[b[p].clone(), h.bases[p].clone(), lifted])?;
        if !assembled.is_square() {
            return Err(Error::Internal(format!(
                "degree {p}: assembled {} vectors in dimension {}",
                assembled.cols(),
                c.dims[p]
            )));
        }
        let factor = change_base_det(&assembled, &c.chain_bases[p])?;
        let singular = if F::EXACT { factor.is_zero() } else { assembled.rank() < assembled.rows() };
        if singular {
            return Err(Error::Internal(format!("degree {p}: assembled basis is singular")));
        }
        value = if p % 2 == 0 { value / factor } else { value * factor };
    }
    Ok(TorsionValue { value, sign_convention: SIGN_NOTE.into() })
}

/// Torsion recomputed directly with new chain and homology bases.
pub fn apply_change_base<F: Scalar>(
    c: &ChainComplex<F>,
    new_chain_bases: Vec<Matrix<F>>,
    new_homology: &HomologyBasis<F>,
) -> Result<TorsionValue<F>> {
    let changed = c.with_chain_bases(new_chain_bases)?;
    torsion(&changed, new_homology)
}

/// The factor `∏_p ([c'_p, c_p] / [h'_p, h_p])^{(-1)^p}` relating torsions in two sets of bases.
pub fn change_base_factor<F: Scalar>(
    c: &ChainComplex<F>,
    h: &HomologyBasis<F>,
    new_chain_bases: &[Matrix<F>],
    new_homology: &HomologyBasis<F>,
) -> Result<F> {
    let mut acc = F::one();
    for p in 0..=c.length() {
        let dc = change_base_det(&new_chain_bases[p], &c.chain_bases[p])?;
        let dh = homology_change_det(c, p, &new_homology.bases[p], &h.bases[p])?;
        if dh.is_zero() {
            return Err(Error::SingularBasis(format!("homology basis in degree {p}")));
        }
        let ratio = dc / dh;
        acc = acc * powi(&ratio, if p % 2 == 0 { 1 } else { -1 });
    }
    Ok(acc)
}

/// Block-diagonal direct sum, padding the shorter complex with zero groups.
pub fn direct_sum<F: Scalar>(a: &ChainComplex<F>, d: &ChainComplex<F>) -> ChainComplex<F> {
    let n = a.length().max(d.length());
    let (a, d) = (a.padded(n), d.padded(n));
    let dims = a.dims.iter().zip(&d.dims).map(|(x, y)| x + y).collect();
    let boundaries = a.boundaries.iter().zip(&d.boundaries).map(|(x, y)| x.block_diag(y)).collect();
    let bases = a.chain_bases.iter().zip(&d.chain_bases).map(|(x, y)| x.block_diag(y)).collect();
    ChainComplex { dims, boundaries, chain_bases: bases }
}

pub fn direct_sum_homology<F: Scalar>(
    a: &HomologyBasis<F>,
    d: &HomologyBasis<F>,
) -> HomologyBasis<F> {
    let n = a.bases.len().max(d.bases.len());
    let get = |h: &HomologyBasis<F>, p: usize| {
        h.bases.get(p).cloned().unwrap_or_else(|| Matrix::zeros(0, 0))
    };
    HomologyBasis { bases: (0..n).map(|p| get(a, p).block_diag(&get(d, p))).collect() }
}

/// Sign `±1` with `T(A ⊕ D) = sign · T(A) · T(D)` for the concatenated bases.
///
/// It counts the transpositions that turn `b^A b^D | h^A h^D | s^A s^D` into
/// `b^A h^A s^A | b^D h^D s^D` in each degree.
pub fn direct_sum_sign<F: Scalar>(a: &ChainComplex<F>, d: &ChainComplex<F>) -> i32 {
    let n = a.length().max(d.length());
    let (a, d) = (a.padded(n), d.padded(n));
    let (ha, hd) = (a.homology_dims(), d.homology_dims());
    let mut parity = 0usize;
    for p in 0..=n {
        let b_d = d.boundary(p + 1).rank();
        let s_a = a.boundary(p).rank();
        parity += b_d * (ha[p] + s_a) + hd[p] * s_a;
    }
    if parity % 2 == 0 {
        1
    } else {
        -1
    }
}

/// A short exact sequence `0 → A → B → D → 0` of based chain complexes.
pub struct ShortExact<'a, F> {
    pub a: &'a ChainComplex<F>,
    pub b: &'a ChainComplex<F>,
    pub d: &'a ChainComplex<F>,
    pub inclusion: &'a [Matrix<F>],
    pub projection: &'a [Matrix<F>],
}

impl<F: Scalar> ShortExact<'_, F> {
    fn check(&self) -> Result<()> {
        let n = self.b.length();
        if self.a.length() != n || self.d.length() != n {
            return Err(Error::Exactness("complexes have different lengths".into()));
        }
        if self.inclusion.len() != n + 1 || self.projection.len() != n + 1 {
            return Err(Error::Exactness("one inclusion and one projection per degree".into()));
        }
        for p in 0..=n {
            let (i, q) = (&self.inclusion[p], &self.projection[p]);
            let (da, db, dd) = (self.a.dims[p], self.b.dims[p], self.d.dims[p]);
            if i.rows() != db || i.cols() != da || q.rows() != dd || q.cols() != db {
                return Err(Error::Exactness(format!("degree {p}: map shapes")));
            }
            if i.rank() != da {
                return Err(Error::Exactness(format!("degree {p}: inclusion is not injective")));
            }
            if q.rank() != dd {
                return Err(Error::Exactness(format!("degree {p}: projection is not surjective")));
            }
            if da + dd != db || !q.dot(i).is_zero_at_scale(q.max_abs() * i.max_abs()) {
                return Err(Error::Exactness(format!("degree {p}: not exact in the middle")));
            }
            if p >= 1 {
                let lhs = self.b.boundary(p).dot(i);
                let rhs = self.inclusion[p - 1].dot(&self.a.boundary(p));
                if !lhs.approx_eq(&rhs) {
                    return Err(Error::Exactness(format!("degree {p}: inclusion is not a chain map")));
                }
                let lhs = self.d.boundary(p).dot(q);
                let rhs = self.projection[p - 1].dot(&self.b.boundary(p));
                if !lhs.approx_eq(&rhs) {
                    return Err(Error::Exactness(format!("degree {p}: projection is not a chain map")));
                }
            }
        }
        Ok(())
    }

    /// `[c^B_p, i(c^A_p) ⊔ lift(c^D_p)]` in each degree.
    pub fn compatibility_dets(&self) -> Result<Vec<F>> {
        (0..=self.b.length())
            .map(|p| {
                let lift = self.projection[p].solve(&self.d.chain_bases[p])?;
                let pair = self.inclusion[p].dot(&self.a.chain_bases[p]).hstack(&lift)?;
                change_base_det(&self.b.chain_bases[p], &pair)
            })
            .collect()
    }

    /// `∏_p [c^B_p, i(c^A_p) ⊔ lift(c^D_p)]^{(-1)^{p+1}}`, which is `±1` for compatible bases.
    pub fn compatibility_factor(&self) -> Result<F> {
        let mut acc = F::one();
        for (p, det) in self.compatibility_dets()?.into_iter().enumerate() {
            acc = if p % 2 == 0 { acc / det } else { acc * det };
        }
        Ok(acc)
    }

    /// The long exact homology sequence as an acyclic complex based by `hd, hb, ha`.
    ///
    /// Degree `3p` holds `H_p(D)`, degree `3p+1` holds `H_p(B)` and degree `3p+2` holds
    /// `H_p(A)`, so the maps `i_*`, `π_*` and the connecting map all lower the degree by one.
    pub fn homology_sequence(
        &self,
        ha: &HomologyBasis<F>,
        hb: &HomologyBasis<F>,
        hd: &HomologyBasis<F>,
    ) -> Result<ChainComplex<F>> {
        self.check()?;
        ha.validate(self.a)?;
        hb.validate(self.b)?;
        hd.validate(self.d)?;
        let n = self.b.length();
        let im = |c: &ChainComplex<F>, p: usize| c.boundary(p + 1).image_basis();
        let mut dims = Vec::with_capacity(3 * n + 3);
        let mut boundaries = Vec::with_capacity(3 * n + 2);
        for p in 0..=n {
            dims.extend([hd.bases[p].cols(), hb.bases[p].cols(), ha.bases[p].cols()]);
        }
        for p in 0..=n {
            if p >= 1 {
                // connecting map H_p(D) → H_{p-1}(A), sitting at degree 3p
                let lift = self.projection[p].solve(&hd.bases[p])?;
                let down = self.b.boundary(p).dot(&lift);
                let cycle = self.inclusion[p - 1].solve(&down)?;
                let coords = homology_coordinates(&ha.bases[p - 1], &im(self.a, p - 1), &cycle)?;
                boundaries.push(coords);
            }
            // π_*: H_p(B) → H_p(D) at degree 3p+1
            let pushed = self.projection[p].dot(&hb.bases[p]);
            boundaries.push(homology_coordinates(&hd.bases[p], &im(self.d, p), &pushed)?);
            // i_*: H_p(A) → H_p(B) at degree 3p+2
            let pushed = self.inclusion[p].dot(&ha.bases[p]);
            boundaries.push(homology_coordinates(&hb.bases[p], &im(self.b, p), &pushed)?);
        }
        let seq = ChainComplex::new(dims, boundaries)?;
        if !seq.is_acyclic() {
            return Err(Error::Internal("homology sequence is not exact".into()));
        }
        Ok(seq)
    }
}

/// Torsion of the long exact homology sequence, after checking exactness and compatibility.
pub fn les_torsion<F: Scalar>(
    seq: &ShortExact<'_, F>,
    ha: &HomologyBasis<F>,
    hb: &HomologyBasis<F>,
    hd: &HomologyBasis<F>,
) -> Result<TorsionValue<F>> {
    let h = seq.homology_sequence(ha, hb, hd)?;
    for (p, det) in seq.compatibility_dets()?.into_iter().enumerate() {
        let one = F::one();
        if !((det.clone() - one.clone()).is_negligible(1.0) || (det + one).is_negligible(1.0)) {
            return Err(Error::Compatibility(format!("degree {p}")));
        }
    }
    torsion(&h, &HomologyBasis::empty(&h))
}

fn cumulative(v: &[usize], i: isize) -> usize {
    if i < 0 {
        0
    } else {
        v[..=(i as usize).min(v.len() - 1)].iter().sum()
    }
}

/// Sign `±1` with `T(B) = sign · T(A) · T(D) · T(H)` for a short exact sequence whose chain
/// bases satisfy `[c^B_p, i(c^A_p) ⊔ lift(c^D_p)] = 1`.
///
/// With `α_i`, `β_i` the running sums of chain and homology dimensions up to degree `i`, the
/// parity is `Σ_i α_{i-1}(A) α_i(D) + (β_i(B)+1)(β_i(A)+β_i(D)) + β_{i-1}(A) β_i(D)` plus
/// `N(A) + N(B) + N(D)` where `N(C) = Σ_i α_i(C) β_i(C)`.
pub fn milnor_sign<F: Scalar>(a: &ChainComplex<F>, b: &ChainComplex<F>, d: &ChainComplex<F>) -> i32 {
    let (ca, cb, cd) = (a.dims(), b.dims(), d.dims());
    let (ha, hb, hd) = (a.homology_dims(), b.homology_dims(), d.homology_dims());
    let mut parity = 0usize;
    for i in 0..=b.length() as isize {
        let s = |v: &[usize], k: isize| cumulative(v, k);
        parity += s(ca, i - 1) * s(cd, i);
        parity += (s(&hb, i) + 1) * (s(&ha, i) + s(&hd, i));
        parity += s(&ha, i - 1) * s(&hd, i);
        parity += s(ca, i) * s(&ha, i) + s(cb, i) * s(&hb, i) + s(cd, i) * s(&hd, i);
    }
    if parity % 2 == 0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rational, Rational};

    type M = Matrix<Rational>;

    fn r(n: i64) -> Rational {
        rational(n, 1)
    }

    fn times(k: i64) -> ChainComplex<Rational> {
        ChainComplex::new(vec![1, 1], vec![M::from_i64(&[&[k]])]).unwrap()
    }

    #[test]
    fn times_two_complex() {
        let c = times(2);
        let h = homology_basis_default(&c);
        assert_eq!(h.dims(), vec![0, 0]);
        assert_eq!(torsion(&c, &h).unwrap().value, rational(1, 2));
        assert_eq!(torsion(&times(1), &h).unwrap().value, r(1));
    }

    #[test]
    fn zero_boundaries_give_one() {
        let c = ChainComplex::new(vec![1, 1], vec![M::zeros(1, 1)]).unwrap();
        let h = homology_basis_default(&c);
        assert_eq!(h.bases, vec![M::identity(1), M::identity(1)]);
        assert_eq!(torsion(&c, &h).unwrap().value, r(1));
    }

    #[test]
    fn broken_complex_is_rejected() {
        let d1 = M::from_i64(&[&[1]]);
        let d2 = M::from_i64(&[&[1]]);
        let err = ChainComplex::new(vec![1, 1, 1], vec![d1, d2]).unwrap_err();
        assert_eq!(err, Error::NotAComplex { degree: 1 });
    }

    #[test]
    fn change_base_examples() {
        // C_1 = ℚ with zero boundary into C_0 = ℚ: H_0 = H_1 = ℚ
        let c = ChainComplex::new(vec![1, 1], vec![M::zeros(1, 1)]).unwrap();
        let h = homology_basis_default(&c);
        let t = torsion(&c, &h).unwrap().value;
        let new_c = vec![M::identity(1), M::from_i64(&[&[3]])];
        let t3 = apply_change_base(&c, new_c.clone(), &h).unwrap().value;
        assert_eq!(t3, t.clone() / r(3));
        assert_eq!(change_base_factor(&c, &h, &new_c, &h).unwrap(), rational(1, 3));
        let h2 = HomologyBasis { bases: vec![M::identity(1), M::from_i64(&[&[2]])] };
        let t2 = apply_change_base(&c, c.chain_bases().to_vec(), &h2).unwrap().value;
        assert_eq!(t2, t * r(2));
    }

    #[test]
    fn direct_sum_examples() {
        let c = times(2);
        let s = direct_sum(&c, &c);
        let h = homology_basis_default(&s);
        assert_eq!(torsion(&s, &h).unwrap().value, rational(1, 4));
        assert_eq!(direct_sum_sign(&c, &c), 1);
        let zero = ChainComplex::new(vec![0], vec![]).unwrap();
        assert_eq!(direct_sum(&c, &zero), c);
    }

    #[test]
    fn incompatible_homology_is_a_contract_error() {
        let c = ChainComplex::new(vec![1, 1], vec![M::zeros(1, 1)]).unwrap();
        let bad = HomologyBasis { bases: vec![M::identity(1), M::zeros(1, 0)] };
        assert!(matches!(torsion(&c, &bad), Err(Error::Contract(_))));
    }

    mod properties {
        use super::*;
        use crate::random::{random_complex, random_homology_basis, random_invertible, random_short_exact, rng};
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn sections_do_not_matter(seed in any::<u64>()) {
                let mut g = rng(seed);
                let c: ChainComplex<Rational> = random_complex(&mut g, 3, 4);
                let h = random_homology_basis(&mut g, &c);
                let fwd = torsion_with(&c, &h, Sections::Forward).unwrap().value;
                let rev = torsion_with(&c, &h, Sections::Reversed).unwrap().value;
                prop_assert_eq!(fwd, rev);
            }

            #[test]
            fn change_base_formula(seed in any::<u64>()) {
                let mut g = rng(seed);
                let c: ChainComplex<Rational> = random_complex(&mut g, 3, 5);
                let h = random_homology_basis(&mut g, &c);
                let new_c: Vec<M> = c.dims().iter().map(|&d| random_invertible(&mut g, d)).collect();
                let new_h = random_homology_basis(&mut g, &c);
                let before = torsion(&c, &h).unwrap().value;
                let after = apply_change_base(&c, new_c.clone(), &new_h).unwrap().value;
                let factor = change_base_factor(&c, &h, &new_c, &new_h).unwrap();
                prop_assert_eq!(after, factor * before);
            }

            #[test]
            fn direct_sum_multiplies(seed in any::<u64>()) {
                let mut g = rng(seed);
                let a: ChainComplex<Rational> = random_complex(&mut g, 3, 3);
                let d: ChainComplex<Rational> = random_complex(&mut g, 2, 3);
                let (ha, hd) = (random_homology_basis(&mut g, &a), random_homology_basis(&mut g, &d));
                let s = direct_sum(&a, &d);
                let hs = direct_sum_homology(&ha, &hd);
                let ts = torsion(&s, &hs).unwrap().value;
                let sign = r(direct_sum_sign(&a, &d) as i64);
                let prod = torsion(&a, &ha).unwrap().value * torsion(&d, &hd).unwrap().value;
                prop_assert_eq!(ts, sign * prod);
            }

            #[test]
            fn milnor_multiplicativity(seed in any::<u64>()) {
                let mut g = rng(seed);
                let t = random_short_exact::<Rational>(&mut g, 3, 3);
                let (ha, hb, hd) = (random_homology_basis(&mut g, &t.a), random_homology_basis(&mut g, &t.b), random_homology_basis(&mut g, &t.d));
                let seq = ShortExact { a: &t.a, b: &t.b, d: &t.d, inclusion: &t.inclusion, projection: &t.projection };
                let th = les_torsion(&seq, &ha, &hb, &hd).unwrap().value;
                let tb = torsion(&t.b, &hb).unwrap().value;
                let ta = torsion(&t.a, &ha).unwrap().value;
                let td = torsion(&t.d, &hd).unwrap().value;
                let sign = r(milnor_sign(&t.a, &t.b, &t.d) as i64) * seq.compatibility_factor().unwrap();
                prop_assert_eq!(tb, sign * ta * td * th);
            }
        }
    }
}
