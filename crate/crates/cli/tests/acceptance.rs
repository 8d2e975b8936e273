//! Acceptance gate. Prints one line per criterion and exits nonzero if any fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use schouten_core::catalog::{check_matrix, load_catalog, verify_all, Category, Record, Status, VerifyReport};
use schouten_core::exactpoly::rational::{ratio, to_f64};
use schouten_core::exactpoly::{Polynomial, Rational};
use schouten_core::geometry::{
    connection, curvature, metric_compatibility_residual, nabla_j, torsion, ConnectionKind, CurvatureSign, Matrix3,
    OperatorMatrix,
};
use schouten_core::liealgebras::{all_families, sample_parameters, Eta, FamilyId, ProductStructure, SampleMode};
use schouten_core::soliton::{derivation_residuals, scan, DEFAULT_LAMBDA0_GRID};

const SEED: u64 = 0;
/// Float tolerance of the non-existence scan.
const SCAN_TOLERANCE: f64 = 1e-9;
const SCAN_POINTS: usize = 500;
/// Absolute tolerance of the float oracle, relative to the residual scale.
const ORACLE_TOLERANCE: f64 = 1e-9;
const ORACLE_OPERATORS: usize = 200;
/// Runtime bound for the matrix fidelity check.
const MATRIX_SECONDS: f64 = 5.0;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome { passed, detail: detail.into() }
    }
}

fn in_category(report: &VerifyReport, category: Category) -> Vec<&Record> {
    report.records.iter().filter(|r| r.category == category).collect()
}

fn failures(records: &[&Record], bad: impl Fn(&Record) -> bool) -> Vec<String> {
    records.iter().filter(|r| bad(r)).map(|r| format!("{} {} {}", r.label, r.family, r.kind)).collect()
}

fn summarize(total: usize, failed: Vec<String>) -> Outcome {
    if failed.is_empty() {
        Outcome::new(true, format!("{total} of {total}"))
    } else {
        Outcome::new(false, format!("{} of {total} failed: {}", failed.len(), failed.join(", ")))
    }
}

fn matrix_fidelity() -> Outcome {
    let catalog = load_catalog().expect("catalog loads");
    let start = Instant::now();
    let owned: Vec<Record> = catalog.matrices.iter().flat_map(check_matrix).collect();
    let seconds = start.elapsed().as_secs_f64();
    let records: Vec<&Record> = owned.iter().collect();
    let mut out = summarize(records.len(), failures(&records, |r| r.status != Status::Pass));
    if seconds > MATRIX_SECONDS {
        out.passed = false;
    }
    out.detail = format!("{} in {seconds:.2}s", out.detail);
    out
}

fn scalar_fidelity(report: &VerifyReport) -> Outcome {
    let records = in_category(report, Category::Scalar);
    summarize(records.len(), failures(&records, |r| r.status != Status::Pass))
}

fn case_verification(report: &VerifyReport) -> Outcome {
    let records = in_category(report, Category::Case);
    // Suspect cases must warn and variants are informational.
    summarize(records.len(), failures(&records, |r| matches!(r.status, Status::Fail | Status::Skip)))
}

fn negative_controls(report: &VerifyReport) -> Outcome {
    let records = in_category(report, Category::Control);
    summarize(records.len(), failures(&records, |r| r.status == Status::Fail))
}

fn non_existence() -> Outcome {
    let grid: Vec<Rational> = DEFAULT_LAMBDA0_GRID.iter().map(|&(n, d)| ratio(n, d)).collect();
    let mut solvable = 0;
    let mut pairs = 0;
    for eta in Eta::BOTH {
        let fam = schouten_core::liealgebras::build_family(&FamilyId::G4, Some(eta)).expect("g4 builds");
        let report = scan(&fam, ConnectionKind::KobayashiNomizu, SEED, SCAN_POINTS, &grid, SCAN_TOLERANCE)
            .expect("g4 kn system is linear in c");
        solvable += report.solvable_count();
        pairs += report.entries.len();
    }
    Outcome::new(solvable == 0, format!("{solvable} of {pairs} g4 kn (point, lambda0) pairs solvable"))
}

fn completeness(report: &VerifyReport) -> Outcome {
    let records = in_category(report, Category::Completeness);
    summarize(records.len(), failures(&records, |r| r.status == Status::Fail))
}

fn structural_identities() -> Outcome {
    let j = ProductStructure::STANDARD;
    let mut broken = Vec::new();
    let mut checks = 0;
    for fam in all_families() {
        let label = fam.label();
        let mut check = |name: &str, ok: bool| {
            checks += 1;
            if !ok {
                broken.push(format!("{label} {name}"));
            }
        };
        let zero = |a: &[[[Polynomial; 3]; 3]; 3]| a.iter().flatten().flatten().all(Polynomial::is_zero);
        let lc = connection(&fam, ConnectionKind::LeviCivita);
        check("lc torsion", zero(&torsion(&lc, &fam)));
        check("lc metric", zero(&metric_compatibility_residual(&lc, &fam)));
        let canonical = connection(&fam, ConnectionKind::Canonical);
        check("canonical metric", zero(&metric_compatibility_residual(&canonical, &fam)));
        check("canonical J", nabla_j(&canonical, &j).iter().all(|op| op.0.is_zero()));
        let kn = connection(&fam, ConnectionKind::KobayashiNomizu);
        check("kn J", nabla_j(&kn, &j).iter().all(|op| op.0.is_zero()));
        for kind in ConnectionKind::ALL {
            let conn = connection(&fam, kind);
            let r = curvature(&conn, &fam, CurvatureSign::for_kind(kind));
            check(&format!("{kind} curvature antisymmetry"), r.is_antisymmetric());
        }
        let data = schouten_core::geometry::curvature_operator_pipeline(&fam, ConnectionKind::LeviCivita);
        check("lc ricci symmetry", data.raw_form.0.is_symmetric());
    }
    summarize(checks, broken)
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4))
}

/// `D[x, y] - [Dx, y] - [x, Dy]` on basis pairs, in plain floats.
fn brute_force(c: &[[[f64; 3]; 3]; 3], d: &[[f64; 3]; 3]) -> Vec<f64> {
    let bracket = |x: &[f64; 3], y: &[f64; 3]| -> [f64; 3] {
        let mut out = [0.0; 3];
        for i in 0..3 {
            for j in 0..3 {
                for (k, o) in out.iter_mut().enumerate() {
                    *o += x[i] * y[j] * c[i][j][k];
                }
            }
        }
        out
    };
    let apply = |v: &[f64; 3]| -> [f64; 3] { std::array::from_fn(|j| (0..3).map(|i| v[i] * d[i][j]).sum()) };
    let basis = |i: usize| -> [f64; 3] { std::array::from_fn(|k| if k == i { 1.0 } else { 0.0 }) };
    let mut out = Vec::new();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let (x, y) = (basis(i), basis(j));
        let lhs = apply(&bracket(&x, &y));
        let a = bracket(&apply(&x), &y);
        let b = bracket(&x, &apply(&y));
        out.extend((0..3).map(|k| lhs[k] - a[k] - b[k]));
    }
    out
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0_f64;
    let mut mismatches = Vec::new();
    let mut total = 0;
    for fam in all_families() {
        let vars = fam.vars().clone();
        let points = sample_parameters(&fam, SEED, ORACLE_OPERATORS, SampleMode::Float);
        for point in &points {
            let values = point.float_assignment(vars.len());
            let c: [[[f64; 3]; 3]; 3] = std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    std::array::from_fn(|k| fam.structure.get(i, j, k).eval_f64(&values).expect("parameters bound"))
                })
            });
            let entries: [[Rational; 3]; 3] =
                std::array::from_fn(|_| std::array::from_fn(|_| random_rational(&mut rng)));
            let d = OperatorMatrix(Matrix3::from_fn(|i, j| Polynomial::constant(&vars, entries[i][j].clone())));
            let floats: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| to_f64(&entries[i][j])));
            let expected = brute_force(&c, &floats);
            let got: Vec<f64> = derivation_residuals(&d, &fam.structure)
                .iter()
                .map(|r| r.eval_f64(&values).expect("parameters bound"))
                .collect();
            let scale = 1.0 + expected.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            let err = got.iter().zip(&expected).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs())) / scale;
            worst = worst.max(err);
            total += 1;
            if err > ORACLE_TOLERANCE {
                mismatches.push(fam.label());
            }
        }
    }
    mismatches.dedup();
    let mut out = summarize(total, mismatches);
    out.detail = format!("{} operators, worst relative error {worst:.1e}", out.detail);
    out
}

fn determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_schouten"))
            .args(["verify", "--seed", "0", "--format", "machine"])
            .output()
            .expect("binary runs")
    };
    let (a, b) = (run(), run());
    let same = a.stdout == b.stdout && a.status.code() == b.status.code() && !a.stdout.is_empty();
    Outcome::new(same, format!("{} bytes, identical = {same}", a.stdout.len()))
}

fn main() -> ExitCode {
    let report = verify_all(SEED).expect("catalog loads");
    let outcomes = [
        ("matrix fidelity", matrix_fidelity()),
        ("scalar fidelity", scalar_fidelity(&report)),
        ("case verification", case_verification(&report)),
        ("negative controls", negative_controls(&report)),
        ("non-existence g4 kn", non_existence()),
        ("completeness", completeness(&report)),
        ("structural identities", structural_identities()),
        ("oracle equivalence", oracle_equivalence()),
        ("determinism", determinism()),
    ];
    let mut all = true;
    for (n, (name, outcome)) in outcomes.iter().enumerate() {
        all &= outcome.passed;
        let status = if outcome.passed { "PASS" } else { "FAIL" };
        println!("criterion {} {status} {name}: {}", n + 1, outcome.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
