//! Acceptance criteria, one test per criterion. Each test prints a single
//! `criterion NN: PASS|FAIL <detail>` line and fails when the criterion does.
//!
//! Tolerances: exact fields compare with `==`; the float pipeline of criterion 7 uses a
//! relative gap of 1e-6 and a relator residual of 1e-12.

use std::time::Instant;

use torsionlab::chain::{apply_change_base, change_base_factor, les_torsion, milnor_sign, torsion, ShortExact};
use torsionlab::field::rational;
use torsionlab::fixtures::{commutator_rep, float_sp_genus2, perturbed_images, quad_sp4_genus2};
use torsionlab::lie::{Family, LieAlgebraSpec};
use torsionlab::pairings::{
    dual_gram, form_conversion, literal_ratio, thurston_form, verify_main_theorem_default, Cocycle, Switch,
    SymplecticForm, TrainTrack,
};
use torsionlab::random::{
    random_complex, random_homology_basis, random_invertible, random_seed_list, random_short_exact,
    random_skew_nondegenerate, random_symplectic_complex, rng, small_rational,
};
use torsionlab::surface::{build_twisted_complex, invariance_suite, SurfaceRepresentation};
use torsionlab::symplectic::{torsion_via_symplectic, torsion_via_symplectic_signed};
use torsionlab::{chain::homology_basis_default, Error, Matrix, Rational, Scalar};

const FLOAT_GAP: f64 = 1e-6;
const RELATOR_RESIDUAL: f64 = 1e-12;

fn report(n: u32, pass: bool, detail: impl AsRef<str>) {
    println!("criterion {n:02}: {} {}", if pass { "PASS" } else { "FAIL" }, detail.as_ref());
    assert!(pass, "criterion {n} failed: {}", detail.as_ref());
}

#[test]
fn criterion_01_symplectic_torsion_matches_chain_torsion() {
    let start = Instant::now();
    let mut failures = 0;
    let seeds = random_seed_list(101, 120);
    for &seed in &seeds {
        let mut g = rng(seed);
        let s = random_symplectic_complex::<Rational>(&mut g, 3);
        let h = random_homology_basis(&mut g, s.base());
        let t = torsion(s.base(), &h).unwrap().value;
        let signed = torsion_via_symplectic_signed(&s, &h).unwrap().value;
        let principal = torsion_via_symplectic(&s, &h).unwrap().value;
        if signed != t || principal.abs() != t.abs() {
            failures += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        1,
        failures == 0 && secs < 10.0,
        format!("{} complexes, {failures} mismatches, {secs:.2}s (signed formula exact, |Pf| formula = |T|)", seeds.len()),
    );
}

#[test]
fn criterion_02_change_base_formula() {
    let mut failures = 0;
    let seeds = random_seed_list(202, 120);
    for &seed in &seeds {
        let mut g = rng(seed);
        let c = random_complex::<Rational>(&mut g, 3, 5);
        let h = random_homology_basis(&mut g, &c);
        let new_c: Vec<Matrix<Rational>> = c.dims().iter().map(|&d| random_invertible(&mut g, d)).collect();
        let new_h = random_homology_basis(&mut g, &c);
        let before = torsion(&c, &h).unwrap().value;
        let after = apply_change_base(&c, new_c.clone(), &new_h).unwrap().value;
        let factor = change_base_factor(&c, &h, &new_c, &new_h).unwrap();
        if after != factor * before {
            failures += 1;
        }
    }
    report(2, failures == 0, format!("{} pairs, {failures} mismatches", seeds.len()));
}

#[test]
fn criterion_03_milnor_multiplicativity() {
    let mut failures = 0;
    let seeds = random_seed_list(303, 60);
    for &seed in &seeds {
        let mut g = rng(seed);
        let t = random_short_exact::<Rational>(&mut g, 3, 3);
        let (ha, hb, hd) =
            (random_homology_basis(&mut g, &t.a), random_homology_basis(&mut g, &t.b), random_homology_basis(&mut g, &t.d));
        let seq = ShortExact { a: &t.a, b: &t.b, d: &t.d, inclusion: &t.inclusion, projection: &t.projection };
        let th = les_torsion(&seq, &ha, &hb, &hd).unwrap().value;
        let tb = torsion(&t.b, &hb).unwrap().value;
        let ta = torsion(&t.a, &ha).unwrap().value;
        let td = torsion(&t.d, &hd).unwrap().value;
        let sign = rational(milnor_sign(&t.a, &t.b, &t.d) as i64, 1) * seq.compatibility_factor().unwrap();
        if tb != sign * ta * td * th {
            failures += 1;
        }
    }
    report(
        3,
        failures == 0,
        format!("{} triples, {failures} mismatches (refined sign and basis-compatibility factor included)", seeds.len()),
    );
}

#[test]
fn criterion_04_adjoint_determinant_and_diagonal() {
    let mut failures = Vec::new();
    let mut g = rng(404);
    for (family, n) in [(Family::Sp, 2), (Family::Sp, 3), (Family::SoNN, 3), (Family::SoNN1, 2)] {
        let spec = LieAlgebraSpec::<Rational>::build(family, n).unwrap();
        for _ in 0..50 {
            let lambdas: Vec<Rational> = (0..n)
                .map(|_| loop {
                    let x = small_rational(&mut g, 9);
                    if x != rational(0, 1) && x != rational(1, 1) && x != rational(-1, 1) {
                        break x;
                    }
                })
                .collect();
            let d = spec.loxodromic_diagonal(&lambdas).unwrap();
            let ad = spec.ad_action(&d).unwrap();
            if ad.det().unwrap() != rational(1, 1) {
                failures.push(format!("{family}({n}) det"));
            }
        }
    }
    for (family, n) in [(Family::Sp, 2), (Family::Sp, 3), (Family::SoNN, 3), (Family::SoNN1, 2), (Family::SoNN1, 3)] {
        let spec = LieAlgebraSpec::<Rational>::build(family, n).unwrap();
        let lambdas: Vec<Rational> = (0..n).map(|i| rational([2, 3, 5][i], [1, 1, 7][i])).collect();
        let ad = spec.ad_action(&spec.loxodromic_diagonal(&lambdas).unwrap()).unwrap();
        if ad != Matrix::diagonal(&spec.predicted_ad_diagonal(&lambdas)) {
            failures.push(format!("{family}({n}) diagonal"));
        }
    }
    report(4, failures.is_empty(), format!("50 elements in each of sp(4), sp(6), so(3,3), so(2,3); failures {failures:?}"));
}

#[test]
fn criterion_05_killing_constants() {
    let mut failures = Vec::new();
    let mut pairs = 0;
    for (family, n) in [(Family::Sp, 2), (Family::Sp, 3), (Family::SoNN, 3), (Family::SoNN1, 2), (Family::SoNN1, 3)] {
        let spec = LieAlgebraSpec::<Rational>::build(family, n).unwrap();
        for x in spec.basis() {
            for y in spec.basis() {
                pairs += 1;
                if spec.killing_form(x, y) != spec.killing_via_ad(x, y) {
                    failures.push(format!("{family}({n})"));
                }
            }
        }
    }
    failures.dedup();
    report(5, failures.is_empty(), format!("{pairs} basis pairs; c = 2n+2, 2n-2, 2n-1; failures {failures:?}"));
}

#[test]
fn criterion_06_well_definedness() {
    let rep = quad_sp4_genus2().unwrap();
    let report_ = invariance_suite(&rep, &mut rng(606), 0.0).unwrap();
    let baseline = report_.baseline.raw.clone();
    let raw_checks: Vec<_> = report_.checks.iter().filter(|c| c.raw_must_match).collect();
    let identical = raw_checks.iter().all(|c| c.torsion.raw == baseline);
    let lifts = raw_checks.iter().filter(|c| c.label.starts_with("lift")).count();
    report(
        6,
        identical && report_.all_pass() && lifts == 4,
        format!(
            "baseline torsion {baseline}; {} unimodular changes identical ({lifts} lift changes, permutation, conjugation); general basis change agrees after Gram correction",
            raw_checks.len()
        ),
    );
}

#[test]
fn criterion_07_main_theorem() {
    let start = Instant::now();
    let rep = quad_sp4_genus2().unwrap();
    let exact = verify_main_theorem_default(&rep, 0.0).unwrap();
    let exact_secs = start.elapsed().as_secs_f64();
    let mut worst_gap: f64 = 0.0;
    let mut worst_secs: f64 = 0.0;
    let mut worst_residual: f64 = 0.0;
    let mut float_ok = true;
    let mut count = 0;
    for seed in 1..=5 {
        let t = Instant::now();
        let frep = float_sp_genus2(2, seed).unwrap();
        let r = verify_main_theorem_default(&frep, FLOAT_GAP).unwrap();
        worst_gap = worst_gap.max(r.relative_gap);
        worst_secs = worst_secs.max(t.elapsed().as_secs_f64());
        worst_residual = worst_residual.max(frep.relator_defect);
        float_ok &= r.pass;
        count += 1;
    }
    let literal = literal_ratio(&exact);
    report(
        7,
        exact.pass && float_ok && exact_secs < 60.0 && worst_secs < 60.0,
        format!(
            "|T|·|Pf Ω^u| = |det K| (torsion in the reciprocal convention of the literal statement): \
             quad fixture exact ({exact_secs:.1}s, |det K| = {}); {count} float reps, max gap {worst_gap:.2e}, \
             max sp(4) relator defect {worst_residual:.1e} (SL2 residual ≤ {RELATOR_RESIDUAL:e}), {worst_secs:.1}s; \
             literal |T|·|det K|/|Pf| = {:.3e} in this convention",
            exact.rhs,
            literal.to_f64()
        ),
    );
}

#[test]
fn criterion_08_dual_gram() {
    let mut failures = 0;
    let mut g = rng(808);
    for k in 0..60 {
        let size = 2 * (k % 4 + 1);
        let m: Matrix<Rational> = random_skew_nondegenerate(&mut g, size);
        let dual = dual_gram(&m).unwrap();
        if dual.dot(&m.transpose()) != Matrix::identity(size) {
            failures += 1;
        }
    }
    report(8, failures == 0, format!("60 skew matrices of size 2..8, {failures} failures"));
}

#[test]
fn criterion_09_twisted_complex_sanity() {
    let mut lines = Vec::new();
    let mut ok = true;
    let quad = quad_sp4_genus2().unwrap();
    let c = build_twisted_complex(&quad).complex;
    let dims = c.homology_dims();
    ok &= c.boundary(1).dot(&c.boundary(2)).is_zero() && dims == vec![0, 20, 0];
    lines.push(format!("quad sp(4) g=2 H={dims:?}"));
    for (family, n, genus) in [(Family::Sp, 2, 2), (Family::SoNN, 3, 2), (Family::SoNN1, 2, 2), (Family::Sp, 2, 3), (Family::SoNN1, 2, 3)] {
        let rep: SurfaceRepresentation<Rational> = commutator_rep(family, n, genus, 9).unwrap();
        let c = build_twisted_complex(&rep).complex;
        let dims = c.homology_dims();
        ok &= c.boundary(1).dot(&c.boundary(2)).is_zero() && dims == vec![0, (2 * genus - 2) * rep.lie_dim(), 0];
        lines.push(format!("{family}({n}) g={genus} H={dims:?}"));
    }
    let frep = float_sp_genus2(2, 3).unwrap();
    let fc = build_twisted_complex(&frep).complex;
    let (d1, d2) = (fc.boundary(1), fc.boundary(2));
    let float_scale = d1.max_abs() * d2.max_abs() * d1.cols() as f64;
    let float_composite = d1.dot(&d2).max_abs() / float_scale;
    ok &= float_composite <= RELATOR_RESIDUAL && fc.homology_dims() == vec![0, 20, 0];
    let base: SurfaceRepresentation<Rational> = commutator_rep(Family::Sp, 2, 2, 0).unwrap();
    let rejected = matches!(
        SurfaceRepresentation::new(2, base.spec.clone(), perturbed_images(base.images())),
        Err(Error::InvalidRepresentation { .. })
    );
    ok &= rejected;
    report(9, ok, format!(
            "{}; float sp(4) H={:?} with relative |∂₁∂₂| = {float_composite:.1e}; relator violation rejected: {rejected}",
            lines.join(", "),
            fc.homology_dims()
        ));
}

#[test]
fn criterion_10_thurston_form() {
    let k = 5;
    let edges: Vec<String> = (0..k).flat_map(|i| [format!("l{i}"), format!("r{i}"), format!("in{i}")]).collect();
    let switches = (0..k)
        .map(|i| Switch { left: format!("l{i}"), right: format!("r{i}"), incoming: Some(format!("in{i}")) })
        .collect();
    let track = TrainTrack::new(edges, switches).unwrap();
    let mut g = rng(1010);
    let mut random_cocycle = || -> Cocycle<Rational> {
        let mut c = Cocycle::new();
        for i in 0..k {
            let (l, r) = (small_rational(&mut g, 5), small_rational(&mut g, 5));
            c.insert(format!("in{i}"), l.clone() + r.clone());
            c.insert(format!("l{i}"), l);
            c.insert(format!("r{i}"), r);
        }
        c
    };
    let mut ok = true;
    for _ in 0..50 {
        let (s1, s2) = (random_cocycle(), random_cocycle());
        let a = thurston_form(&track, &s1, &s2).unwrap();
        let b = thurston_form(&track, &s2, &s1).unwrap();
        ok &= a == -b;
        ok &= thurston_form(&track, &s1, &s1).unwrap() == rational(0, 1);
        let wp = form_conversion(&a, SymplecticForm::Thurston, SymplecticForm::WeilPetersson);
        let psl = form_conversion(&a, SymplecticForm::Thurston, SymplecticForm::Psl2);
        ok &= wp == psl.clone() * rational(-8, 1) && wp == a.clone() * rational(-16, 1);
        ok &= form_conversion(&wp, SymplecticForm::WeilPetersson, SymplecticForm::Thurston) == a;
    }
    let one_switch = TrainTrack::new(
        vec!["l".into(), "r".into()],
        vec![Switch { left: "l".into(), right: "r".into(), incoming: None }],
    )
    .unwrap();
    let unit = |l: i64, r: i64| -> Cocycle<Rational> {
        [("l".to_string(), rational(l, 1)), ("r".to_string(), rational(r, 1))].into_iter().collect()
    };
    ok &= thurston_form(&one_switch, &unit(1, 0), &unit(0, 1)).unwrap() == rational(1, 2);
    report(10, ok, "50 random cocycle pairs on 5 switches: antisymmetric, zero on the diagonal, ω_WP = -8 ω_PSL2 = -16 ω_Th");
}

#[test]
fn homology_default_is_a_valid_basis() {
    let mut g = rng(1);
    let c = random_complex::<Rational>(&mut g, 3, 4);
    assert!(homology_basis_default(&c).validate(&c).is_ok());
}
