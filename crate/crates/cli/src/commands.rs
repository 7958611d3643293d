use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Value};
use torsionlab::chain::{homology_basis_default, torsion};
use torsionlab::field::{set_tolerance, ParseScalar};
use torsionlab::fixtures::named_fixture;
use torsionlab::json::{
    chain_complex_from_json, cocycle_from_json, homology_from_json, homology_to_json, matrix_to_json, parse_json,
    representation_header, train_track_from_json, AnyRepresentation,
};
use torsionlab::pairings::{form_conversion, thurston_form, verify_main_theorem_default, SymplecticForm};
use torsionlab::random::{random_homology_basis, random_seed_list, random_symplectic_complex, rng};
use torsionlab::surface::{invariance_suite, SurfaceRepresentation};
use torsionlab::symplectic::{torsion_via_symplectic, torsion_via_symplectic_signed};
use torsionlab::{Approx, Error, FieldKind, Quad, Rational, Scalar};

use crate::report::Report;
use crate::{exit_code, Cli, Command, Suite, EXIT_CHECK_FAILED, EXIT_OTHER};

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: exit_code(&e), message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: EXIT_OTHER, message: e.to_string() }
    }
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure { code: EXIT_OTHER, message: format!("{}: {e}", path.display()) })?;
    parse_json(&text).map_err(|e| Failure { code: exit_code(&e), message: format!("{}: {e}", path.display()) })
}

fn header(cli: &Cli, command: &str) -> Value {
    json!({"record": "header", "command": command, "seed": cli.seed, "tol": cli.tol})
}

pub fn run(cli: &Cli) -> Result<u8, Failure> {
    set_tolerance(cli.tol)?;
    let mut report = Report::open(cli.out.as_deref())?;
    let code = match &cli.command {
        Command::Torsion { complex, homology } => {
            let kind = cli.field.unwrap_or(FieldKind::Rational);
            let c = read_json(complex)?;
            let h = homology.as_deref().map(read_json).transpose()?;
            let body = match kind {
                FieldKind::Rational => torsion_record::<Rational>(&c, h.as_ref(), kind)?,
                FieldKind::Quad(_) => torsion_record::<Quad>(&c, h.as_ref(), kind)?,
                FieldKind::Float => torsion_record::<Approx>(&c, h.as_ref(), kind)?,
            };
            report.lines([&header(cli, "torsion"), &body])?;
            0
        }
        Command::Verify { representations, suite, gap, samples } => {
            let mut head = header(cli, "verify");
            head["suite"] = json!(suite.label());
            head["gap"] = json!(gap);
            report.line(&head)?;
            verify(cli, representations, *suite, *gap, *samples, &mut report)?
        }
        Command::Thurston { track, first, second, form } => {
            let kind = cli.field.unwrap_or(FieldKind::Rational);
            let (t, s1, s2) = (read_json(track)?, read_json(first)?, read_json(second)?);
            let value = match kind {
                FieldKind::Rational => thurston_value::<Rational>(&t, &s1, &s2, kind, *form)?,
                FieldKind::Quad(_) => thurston_value::<Quad>(&t, &s1, &s2, kind, *form)?,
                FieldKind::Float => thurston_value::<Approx>(&t, &s1, &s2, kind, *form)?,
            };
            report.lines([
                &header(cli, "thurston"),
                &json!({"record": "thurston", "form": form.to_string(), "field": kind.to_string(), "value": value}),
            ])?;
            0
        }
        Command::Fixture { name } => {
            report.line(&named_fixture(name, cli.seed)?.to_json())?;
            0
        }
    };
    report.finish()?;
    Ok(code)
}

fn torsion_record<F: ParseScalar>(c: &Value, h: Option<&Value>, kind: FieldKind) -> torsionlab::Result<Value> {
    let complex = chain_complex_from_json::<F>(c, kind)?;
    let basis = match h {
        Some(h) => homology_from_json(h, kind, &complex)?,
        None => homology_basis_default(&complex),
    };
    let t = torsion(&complex, &basis)?;
    Ok(json!({
        "record": "torsion",
        "field": kind.to_string(),
        "torsion": t.value.to_json(),
        "sign_convention": t.sign_convention,
        "chain_bases": complex.chain_bases().iter().map(matrix_to_json).collect::<Vec<_>>(),
        "homology": homology_to_json(&basis),
    }))
}

fn thurston_value<F: ParseScalar>(
    t: &Value,
    s1: &Value,
    s2: &Value,
    kind: FieldKind,
    form: SymplecticForm,
) -> torsionlab::Result<Value> {
    let track = train_track_from_json(t)?;
    let (c1, c2) = (cocycle_from_json::<F>(s1, kind)?, cocycle_from_json::<F>(s2, kind)?);
    let value = thurston_form(&track, &c1, &c2)?;
    Ok(form_conversion(&value, SymplecticForm::Thurston, form).to_json())
}

/// Outcome of all suites on one representation file.
struct FixtureRun {
    name: String,
    path: PathBuf,
    lines: Vec<Value>,
    failed: usize,
    error: Option<Error>,
}

fn verify(
    cli: &Cli,
    paths: &[PathBuf],
    suite: Suite,
    gap: f64,
    samples: usize,
    report: &mut Report,
) -> Result<u8, Failure> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = std::env::var("TORSIONLAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        pool = pool.num_threads(n.max(1));
    }
    let pool = pool.build().map_err(|e| Failure { code: EXIT_OTHER, message: e.to_string() })?;
    let mut runs: Vec<FixtureRun> = pool.install(|| {
        paths.par_iter().map(|p| verify_file(cli, p, suite, gap, samples)).collect::<Result<Vec<_>, Failure>>()
    })?;
    runs.sort_by(|a, b| (&a.name, &a.path).cmp(&(&b.name, &b.path)));

    let mut code = 0;
    for run in &runs {
        report.lines(&run.lines)?;
        let mut summary = json!({
            "record": "summary",
            "fixture": run.name,
            "checks": run.lines.len(),
            "failed": run.failed,
            "pass": run.failed == 0 && run.error.is_none(),
        });
        if let Some(e) = &run.error {
            summary["error"] = json!(e.to_string());
            summary["exit_code"] = json!(exit_code(e));
            if code == 0 {
                code = exit_code(e);
            }
        }
        report.line(&summary)?;
    }
    if code == 0 && runs.iter().any(|r| r.failed > 0) {
        code = EXIT_CHECK_FAILED;
    }
    report.line(&json!({"record": "result", "fixtures": runs.len(), "pass": code == 0, "exit_code": code}))?;
    Ok(code)
}

fn verify_file(cli: &Cli, path: &Path, suite: Suite, gap: f64, samples: usize) -> Result<FixtureRun, Failure> {
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut run = FixtureRun { name, path: path.to_path_buf(), lines: Vec::new(), failed: 0, error: None };
    let text = fs::read_to_string(path)
        .map_err(|e| Failure { code: EXIT_OTHER, message: format!("{}: {e}", path.display()) })?;
    let loaded = parse_json(&text).and_then(|v| {
        let kind = match cli.field {
            Some(k) => k,
            None => representation_header(&v)?.field,
        };
        Ok((AnyRepresentation::from_json(&v, kind)?, kind))
    });
    match loaded {
        Ok((AnyRepresentation::Rational(rep), kind)) => run_suites(&rep, kind, cli.seed, suite, gap, &mut run),
        Ok((AnyRepresentation::Quad(rep), kind)) => run_suites(&rep, kind, cli.seed, suite, gap, &mut run),
        Ok((AnyRepresentation::Float(rep), kind)) => run_suites(&rep, kind, cli.seed, suite, gap, &mut run),
        Err(e) => run.error = Some(e),
    }
    if suite.includes(Suite::Symplectic) {
        symplectic_suite(cli.seed, samples, &mut run);
    }
    Ok(run)
}

fn record(run: &mut FixtureRun, suite: Suite, pass: bool, mut body: Value) {
    body["record"] = json!("check");
    body["suite"] = json!(suite.label());
    body["fixture"] = json!(run.name);
    body["pass"] = json!(pass);
    if !pass {
        run.failed += 1;
    }
    run.lines.push(body);
}

fn run_suites<F: Scalar>(
    rep: &SurfaceRepresentation<F>,
    kind: FieldKind,
    seed: u64,
    suite: Suite,
    gap: f64,
    run: &mut FixtureRun,
) {
    let field = kind.to_string();
    if suite.includes(Suite::Invariance) {
        match invariance_suite(rep, &mut rng(seed), gap) {
            Ok(r) => {
                for c in &r.checks {
                    let body = json!({
                        "label": c.label,
                        "field": field,
                        "torsion": c.torsion.raw.to_json(),
                        "baseline": r.baseline.raw.to_json(),
                        "orthonormal_abs": c.torsion.orthonormal_abs.to_json(),
                        "raw_must_match": c.raw_must_match,
                    });
                    record(run, Suite::Invariance, c.pass, body);
                }
            }
            Err(e) => run.error = run.error.take().or(Some(e)),
        }
    }
    if suite.includes(Suite::MainTheorem) {
        match verify_main_theorem_default(rep, gap) {
            Ok(r) => {
                let body = json!({
                    "lhs": r.lhs.to_json(),
                    "rhs": r.rhs.to_json(),
                    "relative_gap": r.relative_gap,
                    "field": field,
                    "torsion_abs": r.torsion_abs.to_json(),
                    "pfaffian": r.pfaffian.to_json(),
                    "kronecker_det": r.kronecker_det.to_json(),
                });
                record(run, Suite::MainTheorem, r.pass, body);
            }
            Err(e) => run.error = run.error.take().or(Some(e)),
        }
    }
}

/// Seeded random symplectic complexes: the closed formula against the torsion.
fn symplectic_suite(seed: u64, samples: usize, run: &mut FixtureRun) {
    for (i, s) in random_seed_list(seed, samples).into_iter().enumerate() {
        let mut g = rng(s);
        let complex = random_symplectic_complex::<Rational>(&mut g, 3);
        let h = random_homology_basis(&mut g, complex.base());
        let outcome = (|| -> torsionlab::Result<(Rational, Rational, Rational)> {
            Ok((
                torsion(complex.base(), &h)?.value,
                torsion_via_symplectic_signed(&complex, &h)?.value,
                torsion_via_symplectic(&complex, &h)?.value,
            ))
        })();
        match outcome {
            Ok((t, signed, principal)) => {
                let pass = signed == t && principal.clone().abs() == t.clone().abs();
                let body = json!({
                    "sample": i,
                    "sample_seed": s,
                    "dims": complex.base().dims(),
                    "torsion": t.to_json(),
                    "signed": signed.to_json(),
                    "principal": principal.to_json(),
                });
                record(run, Suite::Symplectic, pass, body);
            }
            Err(e) => run.error = run.error.take().or(Some(e)),
        }
    }
}
