//! Symplectic chain complexes: complexes of length `2n` (`n` odd) with pairings
//! `ω_p : C_p × C_{2n-p} → F` that are compatible with the boundary, graded antisymmetric and
//! nondegenerate.
//!
//! Pairings are stored as matrices `W_p` in the ambient coordinates of the chain groups, so
//! `ω_p(x, y) = xᵀ W_p y` for `p = 0..=n`; the Gram matrix in the chain bases is
//! `c_pᵀ W_p c_{2n-p}`.

use crate::chain::{ChainComplex, HomologyBasis, TorsionValue};
use crate::error::{Error, Result};
use crate::field::{powi, Scalar};
use crate::matrix::{standard_symplectic, Matrix};

#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticChainComplex<F> {
    base: ChainComplex<F>,
    pairings: Vec<Matrix<F>>,
}

fn sign<F: Scalar>(odd: bool) -> F {
    if odd {
        -F::one()
    } else {
        F::one()
    }
}

impl<F: Scalar> SymplecticChainComplex<F> {
    pub fn new(base: ChainComplex<F>, pairings: Vec<Matrix<F>>) -> Result<Self> {
        let len = base.length();
        if len % 2 == 1 || (len / 2) % 2 == 0 {
            return Err(Error::Form(format!("length {len} is not 2n with n odd")));
        }
        let n = len / 2;
        if pairings.len() != n + 1 {
            return Err(Error::Dimension(format!("{} pairings, expected {}", pairings.len(), n + 1)));
        }
        let dims = base.dims();
        for (p, w) in pairings.iter().enumerate() {
            if w.rows() != dims[p] || w.cols() != dims[len - p] {
                return Err(Error::Dimension(format!("pairing {p} has the wrong shape")));
            }
            if w.rank() != dims[p] || dims[p] != dims[len - p] {
                return Err(Error::Degenerate(format!("pairing {p} is degenerate")));
            }
        }
        let s = SymplecticChainComplex { base, pairings };
        if !s.pairing(n).approx_eq(&s.pairing(n).transpose().scale(&sign(n % 2 == 1))) {
            return Err(Error::Form("middle pairing is not graded antisymmetric".into()));
        }
        for p in 0..len {
            // ω_p(∂a, b) = (-1)^{p+1} ω_{p+1}(a, ∂b) for a in C_{p+1}, b in C_{2n-p}
            let lhs = s.base.boundary(p + 1).transpose().dot(&s.pairing(p));
            let rhs = s.pairing(p + 1).dot(&s.base.boundary(len - p)).scale(&sign(p % 2 == 0));
            if !lhs.approx_eq(&rhs) {
                return Err(Error::Form(format!("pairings are not boundary compatible at degree {p}")));
            }
        }
        Ok(s)
    }

    pub fn base(&self) -> &ChainComplex<F> {
        &self.base
    }

    /// Half length `n`.
    pub fn half_length(&self) -> usize {
        self.base.length() / 2
    }

    /// `W_p` for every `p`, using `ω_{2n-p}(b, a) = (-1)^p ω_p(a, b)` above the middle.
    pub fn pairing(&self, p: usize) -> Matrix<F> {
        let n = self.half_length();
        if p <= n {
            self.pairings[p].clone()
        } else {
            let q = 2 * n - p;
            self.pairings[q].transpose().scale(&sign(q % 2 == 1))
        }
    }

    pub fn pairings(&self) -> &[Matrix<F>] {
        &self.pairings
    }

    /// Gram matrix `c_pᵀ W_p c_{2n-p}` in the chain bases.
    pub fn chain_gram(&self, p: usize) -> Matrix<F> {
        let c = self.base.chain_bases();
        let len = self.base.length();
        c[p].transpose().dot(&self.pairing(p)).dot(&c[len - p])
    }

    pub fn with_chain_bases(&self, bases: Vec<Matrix<F>>) -> Result<Self> {
        Ok(SymplecticChainComplex {
            base: self.base.with_chain_bases(bases)?,
            pairings: self.pairings.clone(),
        })
    }
}

/// True when every Gram matrix in the chain bases is the identity, or the standard symplectic
/// matrix in the middle degree.
pub fn is_omega_compatible_bases<F: Scalar>(s: &SymplecticChainComplex<F>) -> bool {
    let n = s.half_length();
    (0..=n).all(|p| {
        let g = s.chain_gram(p);
        let target = if p == n {
            standard_symplectic(g.rows() / 2)
        } else {
            Matrix::identity(g.rows())
        };
        g.approx_eq(&target)
    })
}

/// Symplectic basis of a skew form: columns `e_1..e_l, f_1..f_l` of a change matrix `M` with
/// `Mᵀ G M = [[0, I], [-I, 0]]`.
pub fn darboux_basis<F: Scalar>(g: &Matrix<F>) -> Result<Matrix<F>> {
    if !g.is_skew() {
        return Err(Error::Form("Darboux basis of a form that is not skew".into()));
    }
    let m = g.rows();
    let scale = g.max_abs();
    let form = |x: &Matrix<F>, y: &Matrix<F>| x.transpose().dot(g).dot(y)[(0, 0)].clone();
    let mut pool: Vec<Matrix<F>> = (0..m)
        .map(|j| Matrix::from_fn(m, 1, |i, _| if i == j { F::one() } else { F::zero() }))
        .collect();
    let (mut es, mut fs) = (Vec::new(), Vec::new());
    while !pool.is_empty() {
        let e = pool.remove(0);
        let pick = if F::EXACT {
            pool.iter().position(|v| !form(&e, v).is_zero())
        } else {
            pool.iter()
                .enumerate()
                .max_by(|a, b| form(&e, a.1).to_f64().abs().total_cmp(&form(&e, b.1).to_f64().abs()))
                .filter(|(_, v)| !form(&e, v).is_negligible(scale))
                .map(|(k, _)| k)
        };
        let Some(k) = pick else {
            return Err(Error::Degenerate("skew form has a null vector".into()));
        };
        let v = pool.remove(k);
        let f = v.scale(&form(&e, &v).inv().expect("nonzero pairing"));
        pool = pool
            .into_iter()
            .map(|v| {
                let a = form(&v, &f);
                let b = -form(&v, &e);
                v.sub(&e.scale(&a)).and_then(|w| w.sub(&f.scale(&b))).expect("same shape")
            })
            .collect();
        es.push(e);
        fs.push(f);
    }
    es.extend(fs);
    Matrix::hstack_all(m, &es)
}

/// New chain bases in which the pairings take the standard shapes.
///
/// Below the middle degree `c_p` is kept and `c_{2n-p}` is replaced by the dual basis; in the
/// middle degree a Darboux basis is built.
pub fn make_omega_compatible<F: Scalar>(s: &SymplecticChainComplex<F>) -> Result<Vec<Matrix<F>>> {
    let n = s.half_length();
    let len = 2 * n;
    let mut bases = s.base.chain_bases().to_vec();
    for p in 0..n {
        let g = s.chain_gram(p);
        let inv = g
            .inverse()
            .map_err(|_| Error::Degenerate(format!("pairing {p} is degenerate")))?;
        bases[len - p] = bases[len - p].dot(&inv);
    }
    let change = darboux_basis(&s.chain_gram(n))?;
    bases[n] = bases[n].dot(&change);
    Ok(bases)
}

/// Gram matrix of the induced pairing `H_p × H_{2n-p} → F` in the given homology bases.
pub fn homology_gram<F: Scalar>(
    s: &SymplecticChainComplex<F>,
    h: &HomologyBasis<F>,
    p: usize,
) -> Result<Matrix<F>> {
    h.validate(&s.base)?;
    let len = s.base.length();
    let g = h.bases[p].transpose().dot(&s.pairing(p)).dot(&h.bases[len - p]);
    if g.rank() != g.rows() || !g.is_square() {
        return Err(Error::Degenerate(format!("induced pairing on H_{p} is degenerate")));
    }
    Ok(g)
}

/// `Δ_p`: determinant of the induced pairing on homology.
pub fn delta<F: Scalar>(s: &SymplecticChainComplex<F>, h: &HomologyBasis<F>, p: usize) -> Result<F> {
    if p > s.half_length() {
        return Err(Error::Domain(format!("Δ_p is defined for p <= n, got {p}")));
    }
    homology_gram(s, h, p)?.det()
}

/// Torsion from the pairings on homology alone:
///
/// ```text
/// ∏_{p<n} (Δ_p / det Γ_p)^{(-1)^{p+1}} · (√Δ_n / (Pf Γ_n / Pf J))^{(-1)^{n+1}}
/// ```
///
/// where `Γ_p` is the Gram matrix in the chain bases (`Γ_p = I`, `Γ_n = J` for ω-compatible
/// bases) and `√Δ_n` is the principal root `|Pf|` of the middle homology Gram matrix. It equals
/// [`crate::chain::torsion`] up to sign; [`symplectic_sign`] gives the sign.
pub fn torsion_via_symplectic<F: Scalar>(
    s: &SymplecticChainComplex<F>,
    h: &HomologyBasis<F>,
) -> Result<TorsionValue<F>> {
    let n = s.half_length();
    let mut value = F::one();
    for p in 0..n {
        let gamma = s.chain_gram(p).det()?;
        let ratio = delta(s, h, p)? / gamma;
        value = value * powi(&ratio, if p % 2 == 0 { -1 } else { 1 });
    }
    let root = homology_gram(s, h, n)?.pfaffian()?.abs();
    let gamma = s.chain_gram(n);
    let chain_factor = gamma.pfaffian()? / standard_symplectic::<F>(gamma.rows() / 2).pfaffian()?;
    let middle = root / chain_factor;
    value = value * powi(&middle, if n % 2 == 0 { -1 } else { 1 });
    Ok(TorsionValue {
        value,
        sign_convention: "principal root |Pf| of the middle homology pairing".into(),
    })
}

/// Sign relating the signed middle root to the torsion for length-2 complexes.
///
/// With `r = rank ∂_1 = rank ∂_2` and `h_0`, `h_1` the homology dimensions the sign is
/// `(-1)^{r (h_0 + h_1 / 2)}`.
pub fn symplectic_sign<F: Scalar>(s: &SymplecticChainComplex<F>) -> Result<i32> {
    if s.half_length() != 1 {
        return Err(Error::Domain("the signed formula is implemented for length 2".into()));
    }
    let r = s.base.boundary(1).rank();
    let h = s.base.homology_dims();
    Ok(if (r * (h[0] + h[1] / 2)) % 2 == 0 { 1 } else { -1 })
}

/// [`torsion_via_symplectic`] with the signed root `Pf(H_1) / Pf(J)` and [`symplectic_sign`];
/// it reproduces the torsion including its sign. Length 2 only.
pub fn torsion_via_symplectic_signed<F: Scalar>(
    s: &SymplecticChainComplex<F>,
    h: &HomologyBasis<F>,
) -> Result<TorsionValue<F>> {
    let sgn = symplectic_sign(s)?;
    let d0 = delta(s, h, 0)? / s.chain_gram(0).det()?;
    let mid = homology_gram(s, h, 1)?;
    let root = mid.pfaffian()? / standard_symplectic::<F>(mid.rows() / 2).pfaffian()?;
    let gamma = s.chain_gram(1);
    let chain_factor = gamma.pfaffian()? / standard_symplectic::<F>(gamma.rows() / 2).pfaffian()?;
    let value = F::from_i64(sgn as i64) * root / (chain_factor * d0);
    Ok(TorsionValue { value, sign_convention: "signed Pfaffian root with the rank sign".into() })
}
