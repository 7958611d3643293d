//! Kronecker pairing, the Atiyah-Bott-Goldman form, the dual-Gram identity, the main-theorem
//! verifier and Thurston-form utilities.
//!
//! Cochains are crossed homomorphisms listed edge by edge (see [`twisted_coboundaries`]).
//! The Kronecker pairing of a cochain `u` and a chain `h` is `Σ_e B(u_e, h_e)`, and
//! `ω_B(u, v)` is the cup product `B(u ∪ v)` evaluated on the fundamental class
//!
//! ```text
//! [Σ] = Σ_j [p_{j-1} | y_j] - Σ_{y_j = x⁻¹} [x | x⁻¹]
//! ```
//!
//! of the relator `y_1 ⋯ y_L` with prefixes `p_j`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::chain::{homology_basis_default, ChainComplex, HomologyBasis};
use crate::error::{Error, Result};
use crate::field::{powi, rational, Approx, Scalar};
use crate::matrix::Matrix;
use crate::surface::{
    build_twisted_complex, default_homology, surface_torsion, twisted_coboundaries, SurfaceRepresentation,
    Word,
};

/// Columns are 1-cocycles spanning `H¹` modulo coboundaries.
#[derive(Clone, Debug, PartialEq)]
pub struct CochainBasis<F> {
    pub matrix: Matrix<F>,
}

/// The cochain complex `C⁰ → C¹ → C²` as a chain complex with degrees reversed.
pub fn cochain_complex<F: Scalar>(rep: &SurfaceRepresentation<F>) -> ChainComplex<F> {
    let (delta0, delta1) = twisted_coboundaries(rep);
    let d = rep.lie_dim();
    ChainComplex::new(vec![d, rep.presentation.rank() * d, d], vec![delta1, delta0])
        .expect("coboundaries compose to zero when the relator holds")
}

pub fn cochain_basis_default<F: Scalar>(rep: &SurfaceRepresentation<F>) -> Result<CochainBasis<F>> {
    let h = homology_basis_default(&cochain_complex(rep));
    if h.bases[0].cols() != 0 || h.bases[2].cols() != 0 {
        return Err(Error::Reducible(format!(
            "dim H^2 = {}, dim H^0 = {}",
            h.bases[0].cols(),
            h.bases[2].cols()
        )));
    }
    Ok(CochainBasis { matrix: h.bases[1].clone() })
}

/// Checks that every column is a cocycle and that the columns are independent modulo
/// coboundaries.
pub fn validate_cochains<F: Scalar>(rep: &SurfaceRepresentation<F>, u: &CochainBasis<F>) -> Result<()> {
    let c = cochain_complex(rep);
    let expected = c.homology_dims()[1];
    HomologyBasis { bases: vec![Matrix::zeros(c.dims()[0], 0), u.matrix.clone(), Matrix::zeros(c.dims()[2], 0)] }
        .validate(&c)
        .map_err(|e| match e {
            Error::Contract(msg) => Error::Contract(format!("cochain basis of rank {expected}: {msg}")),
            other => other,
        })
}

fn block_gram<F: Scalar>(rep: &SurfaceRepresentation<F>) -> Matrix<F> {
    let g = rep.spec.killing_gram();
    (1..rep.presentation.rank()).fold(g.clone(), |acc, _| acc.block_diag(g))
}

/// `K_ij = Σ_e B(u_i(e), h_j(e))`.
pub fn kronecker_matrix<F: Scalar>(
    rep: &SurfaceRepresentation<F>,
    u: &CochainBasis<F>,
    h1: &Matrix<F>,
) -> Result<Matrix<F>> {
    if u.matrix.rows() != h1.rows() || u.matrix.cols() != h1.cols() {
        return Err(Error::Dimension(format!(
            "cochains are {}x{}, cycles are {}x{}",
            u.matrix.rows(),
            u.matrix.cols(),
            h1.rows(),
            h1.cols()
        )));
    }
    let k = u.matrix.transpose().dot(&block_gram(rep)).dot(h1);
    if k.rank() != k.rows() {
        return Err(Error::BasisMismatch(format!("Kronecker matrix has rank {} < {}", k.rank(), k.rows())));
    }
    Ok(k)
}

/// Values `u(x_k)` of the cocycles on edge `k`, as a `d × m` block.
fn edge_values<F: Scalar>(u: &Matrix<F>, d: usize, k: usize) -> Matrix<F> {
    u.submatrix(k * d, 0, d, u.cols())
}

/// Matrix `Ω_ij = ω_B(u_i, u_j)`.
pub fn abg_form<F: Scalar>(rep: &SurfaceRepresentation<F>, u: &CochainBasis<F>) -> Result<Matrix<F>> {
    if cochain_complex(rep).homology_dims()[0] != 0 {
        return Err(Error::Reducible("H^2 is nonzero, the fundamental class pairing degenerates".into()));
    }
    let d = rep.lie_dim();
    let m = u.matrix.cols();
    let g = rep.spec.killing_gram();
    let relator = rep.presentation.relator();
    let mut omega = Matrix::zeros(m, m);
    let mut prefix = Word::identity();
    let mut ad_prefix = Matrix::identity(d);
    let mut u_prefix = Matrix::zeros(d, m);
    let magnitude = |m: &Matrix<F>| m.map(|x| Approx(x.to_f64().abs()));
    let g_abs = magnitude(g);
    let mut scale = 0.0f64;
    for l in relator.letters() {
        let ux = edge_values(&u.matrix, d, l.generator);
        let ad_x = rep.ad_word(&Word::letter(l.generator, 1));
        let u_letter = if l.exponent > 0 {
            ux.clone()
        } else {
            ad_x.inverse()?.dot(&ux).neg()
        };
        let moved = ad_prefix.dot(&u_letter);
        omega = omega.add(&u_prefix.transpose().dot(g).dot(&moved))?;
        if l.exponent < 0 {
            omega = omega.add(&ux.transpose().dot(g).dot(&ux))?;
        }
        if !F::EXACT {
            let term = magnitude(&u_prefix).transpose().dot(&g_abs).dot(&magnitude(&moved));
            scale = scale.max(term.max_abs());
        }
        u_prefix = u_prefix.add(&moved)?;
        prefix = prefix.concat(&Word::letter(l.generator, l.exponent));
        ad_prefix = rep.ad_word(&prefix);
    }
    let sym = omega.add(&omega.transpose())?;
    if !sym.is_zero_at_scale(scale.max(omega.max_abs())) {
        return Err(Error::Internal("cup-product form is not skew-symmetric".into()));
    }
    if F::EXACT {
        return Ok(omega);
    }
    Ok(omega.sub(&omega.transpose())?.scale(&F::from_rational(&rational(1, 2))))
}

/// `(G⁻¹)ᵀ`, the Gram matrix of the dual form in the dual basis; asserts `G*·Gᵀ = I`.
pub fn dual_gram<F: Scalar>(g: &Matrix<F>) -> Result<Matrix<F>> {
    if !g.is_square() || g.rows() % 2 != 0 {
        return Err(Error::Form(format!("expected an even square matrix, got {}x{}", g.rows(), g.cols())));
    }
    if !g.is_skew() {
        return Err(Error::Form("Gram matrix is not skew-symmetric".into()));
    }
    let inv = g.inverse().map_err(|_| Error::Degenerate("Gram matrix is singular".into()))?;
    let dual = inv.transpose();
    if !dual.dot(&g.transpose()).approx_eq(&Matrix::identity(g.rows())) {
        return Err(Error::Internal("dual Gram identity failed".into()));
    }
    Ok(dual)
}

/// Both sides of the main identity for one representation.
///
/// With torsion taken as `∏ [b ⊔ h ⊔ s(b), c]^{(-1)^{p+1}}`, the identity reads
/// `|T| · |Pf Ω^u| = |det K(u, h₁)|`, where `T` is the torsion in a `B`-orthonormal Lie basis.
/// In the reciprocal convention `τ = 1/T` this is `|τ| · |det K| = |Pf Ω^u|`, i.e.
/// `|τ| = √det Ω` in the basis Kronecker-dual to `h₁`.
#[derive(Clone, Debug)]
pub struct MainTheoremReport<F> {
    pub torsion_abs: F,
    pub pfaffian: F,
    pub kronecker_det: F,
    /// `|T| · |Pf Ω^u|`.
    pub lhs: F,
    /// `|det K|`.
    pub rhs: F,
    pub relative_gap: f64,
    pub pass: bool,
}

pub fn verify_main_theorem<F: Scalar>(
    rep: &SurfaceRepresentation<F>,
    h1: &Matrix<F>,
    u: &CochainBasis<F>,
    tolerance: f64,
) -> Result<MainTheoremReport<F>> {
    rep.require_irreducible()?;
    let c = build_twisted_complex(rep);
    let d = rep.lie_dim();
    let h = HomologyBasis { bases: vec![Matrix::zeros(d, 0), h1.clone(), Matrix::zeros(d, 0)] };
    let torsion_abs = surface_torsion(rep, &c, &h)?.orthonormal_abs;
    let omega = abg_form(rep, u)?;
    let pfaffian = omega.pfaffian()?;
    let degenerate = if F::EXACT { pfaffian.is_zero() } else { omega.rank() < omega.rows() };
    if degenerate {
        return Err(Error::Degenerate("Atiyah-Bott-Goldman form is degenerate".into()));
    }
    let kronecker_det = kronecker_matrix(rep, u, h1)?.det()?;
    let lhs = torsion_abs.clone() * pfaffian.abs();
    let rhs = kronecker_det.abs();
    let relative_gap = ((lhs.to_f64() - rhs.to_f64()) / rhs.to_f64()).abs();
    let pass = if F::EXACT { lhs == rhs } else { relative_gap <= tolerance };
    Ok(MainTheoremReport { torsion_abs, pfaffian, kronecker_det, lhs, rhs, relative_gap, pass })
}

/// The main identity on the default homology and cochain bases.
pub fn verify_main_theorem_default<F: Scalar>(
    rep: &SurfaceRepresentation<F>,
    tolerance: f64,
) -> Result<MainTheoremReport<F>> {
    rep.require_irreducible()?;
    let h = default_homology(&build_twisted_complex(rep))?;
    let u = cochain_basis_default(rep)?;
    verify_main_theorem(rep, &h.bases[1], &u, tolerance)
}

/// `|T| · |det K| / |Pf Ω^u|` with torsion in the convention above; equals `|det K|² / |Pf Ω^u|²`
/// by the main identity, so it is not invariant under rescaling `h₁`.
pub fn literal_ratio<F: Scalar>(r: &MainTheoremReport<F>) -> F {
    r.torsion_abs.clone() * r.kronecker_det.abs() / r.pfaffian.abs()
}

/// `|det Gram(B)|^{g-1}`, the factor turning torsion in the given Lie basis into torsion in a
/// `B`-orthonormal one.
pub fn gram_correction<F: Scalar>(rep: &SurfaceRepresentation<F>) -> Result<F> {
    Ok(powi(&rep.spec.killing_gram().det()?.abs(), rep.genus() as i64 - 1))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Switch {
    pub left: String,
    pub right: String,
    /// Edge entering the switch from the other side; its weight must equal left plus right.
    pub incoming: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrainTrack {
    pub edges: Vec<String>,
    pub switches: Vec<Switch>,
}

/// Edge weights of a transverse cocycle.
pub type Cocycle<F> = BTreeMap<String, F>;

impl TrainTrack {
    pub fn new(edges: Vec<String>, switches: Vec<Switch>) -> Result<Self> {
        for s in &switches {
            for e in [Some(&s.left), Some(&s.right), s.incoming.as_ref()].into_iter().flatten() {
                if !edges.contains(e) {
                    return Err(Error::Parse(format!("switch refers to unknown edge {e:?}")));
                }
            }
        }
        Ok(TrainTrack { edges, switches })
    }

    pub fn check_admissible<F: Scalar>(&self, sigma: &Cocycle<F>) -> Result<()> {
        for e in sigma.keys() {
            if !self.edges.contains(e) {
                return Err(Error::Admissibility(format!("weight on unknown edge {e:?}")));
            }
        }
        for s in &self.switches {
            if let Some(inc) = &s.incoming {
                let lhs = weight(sigma, inc);
                let rhs = weight(sigma, &s.left) + weight(sigma, &s.right);
                if !(lhs.clone() - rhs.clone()).is_negligible(lhs.to_f64().abs().max(1.0)) {
                    return Err(Error::Admissibility(format!(
                        "switch at {inc}: {lhs} != {rhs} = {} + {}",
                        s.left, s.right
                    )));
                }
            }
        }
        Ok(())
    }
}

fn weight<F: Scalar>(sigma: &Cocycle<F>, e: &str) -> F {
    sigma.get(e).cloned().unwrap_or_else(F::zero)
}

/// `½ Σ_s det [[σ₁(l), σ₁(r)], [σ₂(l), σ₂(r)]]` over the switches.
pub fn thurston_form<F: Scalar>(track: &TrainTrack, s1: &Cocycle<F>, s2: &Cocycle<F>) -> Result<F> {
    track.check_admissible(s1)?;
    track.check_admissible(s2)?;
    let sum = track.switches.iter().fold(F::zero(), |acc, s| {
        acc + weight(s1, &s.left) * weight(s2, &s.right) - weight(s1, &s.right) * weight(s2, &s.left)
    });
    Ok(sum / F::from_i64(2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymplecticForm {
    WeilPetersson,
    Psl2,
    Thurston,
}

impl SymplecticForm {
    /// The form as a multiple of the Thurston form: `ω_PSL2 = 2 ω_Th`, `ω_WP = -8 ω_PSL2`.
    pub fn thurston_multiple(self) -> i64 {
        match self {
            SymplecticForm::Thurston => 1,
            SymplecticForm::Psl2 => 2,
            SymplecticForm::WeilPetersson => -16,
        }
    }
}

impl FromStr for SymplecticForm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wp" | "weil-petersson" | "weil_petersson" => Ok(SymplecticForm::WeilPetersson),
            "psl2" | "psl2r" => Ok(SymplecticForm::Psl2),
            "thurston" => Ok(SymplecticForm::Thurston),
            _ => Err(Error::UnknownForm(s.to_string())),
        }
    }
}

impl fmt::Display for SymplecticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymplecticForm::WeilPetersson => "wp",
            SymplecticForm::Psl2 => "psl2",
            SymplecticForm::Thurston => "thurston",
        })
    }
}

/// The value of `to` on the same pair of tangent vectors on which `from` takes `value`.
pub fn form_conversion<F: Scalar>(value: &F, from: SymplecticForm, to: SymplecticForm) -> F {
    value.clone() * F::from_i64(to.thurston_multiple()) / F::from_i64(from.thurston_multiple())
}
