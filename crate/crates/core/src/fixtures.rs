//! Representation fixtures used by the verification suites and the CLI.

use num::Signed;
use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{rational, Approx, Quad, Rational, Scalar};
use crate::json::AnyRepresentation;
use crate::lie::{principal_sl2_embed, Family, LieAlgebraSpec};
use crate::matrix::Matrix;
use crate::random::{rng, small_rational};
use crate::surface::{solve_relator_genus2, SurfaceRepresentation};

fn sl2<F: Scalar>(a: i64, b: i64, c: i64, d: i64) -> Matrix<F> {
    Matrix::from_i64(&[&[a, b], &[c, d]]).map(|x: &Rational| F::from_rational(x))
}

fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer(), q.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (&rn * &rn == *n && &rd * &rd == *d).then(|| Rational::new(rn, rd))
}

/// Four matrices `a₁, b₁, a₂, b₂ ∈ SL(2, ℚ(√2))` with `[a₁, b₁][a₂, b₂] = I`.
///
/// `a₁, b₁, a₂` are rational, with `a₂` chosen so that `a₂⁻¹` and `a₂⁻¹C` (`C = [b₁, a₁]`)
/// have equal trace. Rational solutions `X` of `X a₂⁻¹ = a₂⁻¹ C X` form a plane; a lattice
/// point with `det X = 2s²` gives `b₂ = X / (s√2)`.
pub fn quad_genus2_sl2() -> [Matrix<Quad>; 4] {
    let a1: Matrix<Rational> = sl2(2, 1, 1, 1);
    let b1: Matrix<Rational> = sl2(1, 2, 1, 3);
    let c = b1.dot(&a1).dot(&b1.inverse().expect("unimodular")).dot(&a1.inverse().expect("unimodular"));
    let (c11, c12, c21, c22) = (c[(0, 0)].clone(), c[(0, 1)].clone(), c[(1, 0)].clone(), c[(1, 1)].clone());
    let one = rational(1, 1);
    let ps = [(1, 1), (2, 1), (3, 1), (4, 1), (5, 1), (1, 2), (3, 2), (-1, 1), (-2, 1), (-3, 1)];
    let qs = [(1, 1), (2, 1), (-1, 1), (3, 1), (-2, 1), (4, 1), (1, 2), (1, 3)];
    for &(pn, pd) in &ps {
        for &(qn, qd) in &qs {
            let (p, q) = (rational(pn, pd), rational(qn, qd));
            let coef = q.clone() * (c11.clone() - one.clone()) / p.clone() - c12.clone();
            if coef.is_zero() {
                continue;
            }
            let r = (q.clone() * c21.clone() - p.clone() * (c22.clone() - one.clone())
                - (c11.clone() - one.clone()) / p.clone())
                / coef;
            let s = (one.clone() + q.clone() * r.clone()) / p.clone();
            let a2 = Matrix::from_rows(vec![vec![p, q], vec![r, s]]).expect("2x2");
            let ai = a2.inverse().expect("unimodular");
            let lhs = ai.dot(&c);
            let linear = Matrix::from_fn(4, 4, |row, col| {
                let mut e = Matrix::<Rational>::zeros(2, 2);
                e[(col / 2, col % 2)] = one.clone();
                e.dot(&ai).sub(&lhs.dot(&e)).expect("2x2")[(row / 2, row % 2)].clone()
            });
            let kernel = linear.kernel_basis();
            if kernel.cols() != 2 {
                continue;
            }
            let plane: Vec<Matrix<Rational>> =
                (0..2).map(|k| Matrix::from_fn(2, 2, |i, j| kernel[(2 * i + j, k)].clone())).collect();
            for x in -12i64..=12 {
                for y in -12i64..=12 {
                    if x == 0 && y == 0 {
                        continue;
                    }
                    let m = plane[0].scale(&rational(x, 1)).add(&plane[1].scale(&rational(y, 1))).expect("2x2");
                    let det = m.det().expect("square");
                    let Some(s) = rational_sqrt(&(det / rational(2, 1))) else { continue };
                    if s.is_zero() {
                        continue;
                    }
                    // 1/(s√2) = √2/(2s)
                    let factor = Quad::new(Rational::zero(), one.clone() / (rational(2, 1) * s), 2);
                    let b2 = m.map(|v| Quad::rational(v.clone()) * factor.clone());
                    let lift = |m: &Matrix<Rational>| m.map(|v| Quad::rational(v.clone()));
                    return [lift(&a1), lift(&b1), lift(&a2), b2];
                }
            }
        }
    }
    unreachable!("the search space contains a solution")
}

/// The `ℚ(√2)` genus-2 representation pushed into `Sp(4)` by the principal embedding.
pub fn quad_sp4_genus2() -> Result<SurfaceRepresentation<Quad>> {
    let images = quad_genus2_sl2().iter().map(|m| principal_sl2_embed(m, 2)).collect::<Result<Vec<_>>>()?;
    SurfaceRepresentation::new(2, LieAlgebraSpec::build(Family::Sp, 2)?, images)
}

/// Two group elements of the family: principal images of fixed `SL(2, ℤ)` matrices for `sp`,
/// seeded Cayley transforms otherwise.
fn generating_pair<F: Scalar>(spec: &LieAlgebraSpec<F>, seed: u64) -> Result<(Matrix<F>, Matrix<F>)> {
    match spec.family {
        Family::Sp => Ok((
            principal_sl2_embed(&sl2(2, 1, 1, 1), spec.n)?,
            principal_sl2_embed(&sl2(1, 2, 1, 3), spec.n)?,
        )),
        _ => {
            let mut g = rng(seed);
            Ok((spec.random_group_element(&mut g), spec.random_group_element(&mut g)))
        }
    }
}

/// `(g₁, g₂, g₂, g₁)` in genus 2, followed by commuting pairs `(h, h²)` in higher genus; the
/// relator holds because `[g₁, g₂][g₂, g₁] = I`.
pub fn commutator_rep<F: Scalar>(family: Family, n: usize, genus: usize, seed: u64) -> Result<SurfaceRepresentation<F>> {
    let spec = LieAlgebraSpec::build(family, n)?;
    let (g1, g2) = generating_pair(&spec, seed)?;
    let mut images = vec![g1.clone(), g2.clone(), g2, g1];
    let mut g = rng(seed ^ 0x5eed);
    for _ in 2..genus {
        let h = spec.random_group_element(&mut g);
        images.push(h.clone());
        images.push(h.dot(&h));
    }
    SurfaceRepresentation::new(genus, spec, images)
}

pub fn trivial_rep<F: Scalar>(family: Family, n: usize, genus: usize) -> Result<SurfaceRepresentation<F>> {
    let spec = LieAlgebraSpec::build(family, n)?;
    let id = Matrix::identity(spec.ambient_size());
    SurfaceRepresentation::new(genus, spec, vec![id; 2 * genus])
}

/// Largest entry allowed in the `SL(2)` images of a float fixture; larger entries are cubed
/// by the embedding and squared again by `Ad`, which exhausts double precision.
const FLOAT_ENTRY_BOUND: f64 = 4.0;

/// Largest relator defect accepted after embedding into `Sp(2n)`.
pub const FLOAT_DEFECT_BOUND: f64 = 1e-12;

/// A float genus-2 representation in `Sp(2n)` from [`solve_relator_genus2`] on seeded
/// rational starting data, retried until the solved images are small.
pub fn float_sp_genus2(n: usize, seed: u64) -> Result<SurfaceRepresentation<Approx>> {
    let mut g = rng(seed);
    let spec = LieAlgebraSpec::build(Family::Sp, n)?;
    for _ in 0..4096 {
        let random_sl2 = |g: &mut rand_chacha::ChaCha8Rng| loop {
            let (a, b, c) = (small_rational(g, 3), small_rational(g, 3), small_rational(g, 3));
            if !a.is_zero() && g.gen_bool(0.9) {
                let d = (rational(1, 1) + b.clone() * c.clone()) / a.clone();
                let m = Matrix::from_rows(vec![vec![a, b], vec![c, d]]).expect("2x2");
                break m.map(|x| Approx(x.to_f64()));
            }
        };
        let (a1, b1, a2) = (random_sl2(&mut g), random_sl2(&mut g), random_sl2(&mut g));
        let Ok(solved) = solve_relator_genus2(&a1, &b1, &a2, &mut g) else { continue };
        if solved.iter().any(|m| m.max_abs() > FLOAT_ENTRY_BOUND) {
            continue;
        }
        let images = solved.iter().map(|m| principal_sl2_embed(m, n)).collect::<Result<Vec<_>>>()?;
        if let Ok(rep) = SurfaceRepresentation::new(2, spec.clone(), images) {
            if rep.relator_defect <= FLOAT_DEFECT_BOUND && rep.require_irreducible().is_ok() {
                return Ok(rep);
            }
        }
    }
    Err(Error::NoConvergence(format!("no float representation found for seed {seed}")))
}

/// `images` with one entry of the first generator nudged, which breaks the relator.
pub fn perturbed_images<F: Scalar>(images: &[Matrix<F>]) -> Vec<Matrix<F>> {
    let mut out = images.to_vec();
    let nudged = out[0][(0, 0)].clone() + F::from_rational(&rational(1, 1000));
    out[0][(0, 0)] = nudged;
    out
}

/// Named fixtures accepted by the CLI.
pub const FIXTURE_NAMES: [&str; 7] = [
    "quad_sp4_genus2",
    "commutator_sp4_genus2",
    "commutator_so33_genus2",
    "commutator_so23_genus2",
    "commutator_sp4_genus3",
    "trivial_sp4_genus2",
    "float_sp4_genus2",
];

/// Builds a fixture by name; `seed` drives the Cayley and float fixtures.
pub fn named_fixture(name: &str, seed: u64) -> Result<AnyRepresentation> {
    use AnyRepresentation::Rational as R;
    Ok(match name {
        "quad_sp4_genus2" => AnyRepresentation::Quad(quad_sp4_genus2()?),
        "commutator_sp4_genus2" => R(commutator_rep(Family::Sp, 2, 2, seed)?),
        "commutator_so33_genus2" => R(commutator_rep(Family::SoNN, 3, 2, seed)?),
        "commutator_so23_genus2" => R(commutator_rep(Family::SoNN1, 2, 2, seed)?),
        "commutator_sp4_genus3" => R(commutator_rep(Family::Sp, 2, 3, seed)?),
        "trivial_sp4_genus2" => R(trivial_rep(Family::Sp, 2, 2)?),
        "float_sp4_genus2" => AnyRepresentation::Float(float_sp_genus2(2, seed)?),
        other => return Err(Error::Domain(format!("unknown fixture {other:?}; known: {}", FIXTURE_NAMES.join(", ")))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::build_twisted_complex;

    #[test]
    fn quad_fixture_satisfies_relator_exactly() {
        let [a1, b1, a2, b2] = quad_genus2_sl2();
        let comm = |x: &Matrix<Quad>, y: &Matrix<Quad>| {
            x.dot(y).dot(&x.inverse().unwrap()).dot(&y.inverse().unwrap())
        };
        assert_eq!(comm(&a1, &b1).dot(&comm(&a2, &b2)), Matrix::identity(2));
        assert!(b2.entries().iter().any(|v| v.radicand() == Some(2)));
        for m in [&a1, &b1, &a2, &b2] {
            assert_eq!(m.det().unwrap(), Quad::one());
        }
        let rep = quad_sp4_genus2().unwrap();
        assert_eq!(rep.relator_defect, 0.0);
        assert_eq!(build_twisted_complex(&rep).complex.homology_dims(), vec![0, 20, 0]);
    }

    #[test]
    fn commutator_reps_are_irreducible() {
        for (f, n, g) in [(Family::Sp, 2, 2), (Family::SoNN, 3, 2), (Family::SoNN1, 2, 2), (Family::Sp, 2, 3)] {
            let rep: SurfaceRepresentation<Rational> = commutator_rep(f, n, g, 7).unwrap();
            let d = rep.lie_dim();
            let dims = build_twisted_complex(&rep).complex.homology_dims();
            assert_eq!(dims, vec![0, (2 * g - 2) * d, 0], "{f}({n}) genus {g}");
        }
    }

    #[test]
    fn float_rep_is_valid() {
        let rep = float_sp_genus2(2, 1).unwrap();
        assert!(rep.relator_defect <= 1e-9);
        assert_eq!(build_twisted_complex(&rep).complex.homology_dims(), vec![0, 20, 0]);
    }

    #[test]
    fn every_named_fixture_builds() {
        for name in FIXTURE_NAMES {
            assert!(named_fixture(name, 5).is_ok(), "{name}");
        }
        assert!(matches!(named_fixture("octagon", 0), Err(Error::Domain(_))));
    }

    #[test]
    fn perturbation_breaks_relator() {
        let rep: SurfaceRepresentation<Rational> = commutator_rep(Family::Sp, 2, 2, 0).unwrap();
        let bad = perturbed_images(rep.images());
        assert!(matches!(
            SurfaceRepresentation::new(2, rep.spec.clone(), bad),
            Err(Error::InvalidRepresentation { .. })
        ));
    }
}
