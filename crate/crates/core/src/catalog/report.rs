use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::{load_catalog, Catalog, CatalogError, MatrixFixture, ScalarFixture};
use crate::exactpoly::{rational, IdealBasis};
use crate::geometry::{curvature_operator_pipeline, ConnectionKind};
use crate::liealgebras::{build_family, Eta, FamilyId, LieAlgebraFamily};
use crate::soliton::{
    completeness_check, negative_control, soliton_system, verify_case, CompletenessReport, Method,
    NegativeControlReport, SolitonSystem, TheoremCase, VerificationReport, Witness, DEFAULT_TOLERANCE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Matrix,
    Scalar,
    Case,
    Control,
    Completeness,
}

impl Category {
    fn name(self) -> &'static str {
        match self {
            Category::Matrix => "matrix",
            Category::Scalar => "scalar",
            Category::Case => "case",
            Category::Control => "control",
            Category::Completeness => "completeness",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Suspect statements: reported with evidence, never failing.
    Warn,
    /// Alternative readings of a statement.
    Info,
    Skip,
}

impl Status {
    fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Warn => "warn",
            Status::Info => "info",
            Status::Skip => "skip",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub category: Category,
    pub label: String,
    pub family: String,
    pub kind: ConnectionKind,
    pub status: Status,
    pub method: Option<String>,
    pub witness: Option<String>,
    pub detail: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub warnings: usize,
    pub info: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub only: Option<String>,
    pub records: Vec<Record>,
    pub summary: Summary,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Restricts the run to one display label or one statement (with its cases).
    pub only: Option<String>,
    pub tolerance: f64,
    /// Generic points per completeness scan.
    pub scan_points: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { seed: 0, only: None, tolerance: DEFAULT_TOLERANCE, scan_points: 500 }
    }
}

impl VerifyReport {
    pub fn has_failures(&self) -> bool {
        self.summary.failed > 0
    }

    pub fn records_in(&self, category: Category) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(move |r| r.category == category)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let _ = writeln!(
                out,
                "{:<5} {:<12} {:<18} {:<10} {:<9} {}",
                r.status.name(),
                r.category.name(),
                r.label,
                r.family,
                r.kind.short_name(),
                r.method.as_deref().unwrap_or("-")
            );
            if let Some(w) = &r.witness {
                let _ = writeln!(out, "      witness: {w}");
            }
            for d in &r.detail {
                let _ = writeln!(out, "      {d}");
            }
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "summary: {} passed, {} failed, {} warnings, {} info, {} skipped (seed {})",
            s.passed, s.failed, s.warnings, s.info, s.skipped, self.seed
        );
        out
    }
}

fn selected(only: Option<&str>, label: &str) -> bool {
    match only {
        None => true,
        Some(o) => label == o || label.strip_prefix(o).is_some_and(|rest| rest.starts_with('.')),
    }
}

fn family_on(id: &FamilyId, eta: Option<Eta>) -> Result<LieAlgebraFamily, String> {
    build_family(id, eta).map_err(|e| e.to_string())
}

fn fail_record(category: Category, label: &str, family: String, kind: ConnectionKind, message: String) -> Record {
    Record {
        category,
        label: label.to_string(),
        family,
        kind,
        status: Status::Fail,
        method: None,
        witness: None,
        detail: vec![message],
    }
}

/// Compares a display against the computed operator, on every branch it covers.
/// Entries must agree as polynomials, or modulo the family constraints.
pub fn check_matrix(fixture: &MatrixFixture) -> Vec<Record> {
    fixture
        .branches
        .etas()
        .into_iter()
        .map(|eta| {
            let fam = match family_on(&fixture.family, eta) {
                Ok(f) => f,
                Err(e) => {
                    return fail_record(Category::Matrix, &fixture.label, fixture.family.to_string(), fixture.kind, e)
                }
            };
            let computed = curvature_operator_pipeline(&fam, fixture.kind).operator.0;
            let expected = fixture.on_branch(eta);
            let diff = expected.zip(&computed, |a, b| a - b);
            let mut record = Record {
                category: Category::Matrix,
                label: fixture.label.clone(),
                family: fam.label(),
                kind: fixture.kind,
                status: Status::Pass,
                method: Some("exact".to_string()),
                witness: None,
                detail: Vec::new(),
            };
            if diff.is_zero() {
                return record;
            }
            let reduced = !fam.constraints.is_empty()
                && IdealBasis::new(&fam.constraints)
                    .map(|ideal| diff.0.iter().flatten().all(|d| ideal.contains(d)))
                    .unwrap_or(false);
            if reduced {
                record.method = Some("reduced".to_string());
                record.detail.push(format!(
                    "equal modulo {}",
                    fam.constraints.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
                ));
                return record;
            }
            record.status = Status::Fail;
            record.method = Some("failed".to_string());
            for i in 0..3 {
                for j in 0..3 {
                    if !diff.get(i, j).is_zero() {
                        record.detail.push(format!(
                            "entry ({},{}): stated {}, computed {}",
                            i + 1,
                            j + 1,
                            expected.get(i, j),
                            computed.get(i, j)
                        ));
                    }
                }
            }
            record
        })
        .collect()
}

/// Compares a stated scalar curvature with the computed one, exactly.
pub fn check_scalar(fixture: &ScalarFixture) -> Vec<Record> {
    fixture
        .branches
        .etas()
        .into_iter()
        .map(|eta| {
            let fam = match family_on(&fixture.family, eta) {
                Ok(f) => f,
                Err(e) => {
                    return fail_record(Category::Scalar, &fixture.label, fixture.family.to_string(), fixture.kind, e)
                }
            };
            let computed = curvature_operator_pipeline(&fam, fixture.kind).scalar;
            let stated = fixture.on_branch(eta);
            let mut record = Record {
                category: Category::Scalar,
                label: fixture.label.clone(),
                family: fam.label(),
                kind: fixture.kind,
                status: Status::Pass,
                method: Some("exact".to_string()),
                witness: None,
                detail: Vec::new(),
            };
            if stated != computed {
                record.status = Status::Fail;
                record.method = Some("failed".to_string());
                record.detail.push(format!("stated {stated}, computed {computed}"));
                record.detail.push(format!("stated minus computed: {}", &stated - &computed));
            }
            record
        })
        .collect()
}

fn describe_witness(w: &Witness) -> String {
    format!(
        "{}; lambda0={}; c={}; solved c={}; max residual {:.3e}",
        w.point, w.lambda0, w.c, w.solved_c, w.max_residual
    )
}

fn case_status(case: &TheoremCase, ok: bool) -> Status {
    if case.variant_of.is_some() {
        Status::Info
    } else if case.suspect.is_some() {
        Status::Warn
    } else if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn case_record(case: &TheoremCase, report: &VerificationReport) -> Record {
    let ok = if case.no_solutions { report.method != Method::Failed } else { report.is_proven() };
    let mut detail = Vec::new();
    if let Some(reason) = &case.suspect {
        detail.push(format!("suspect: {reason}"));
    }
    if let Some(v) = &case.variant_of {
        detail.push(format!("alternative reading of {v}: {}", if report.residual_zero { "holds" } else { "fails" }));
    }
    if case.no_solutions {
        detail.push("stated: no solutions".to_string());
    } else {
        detail.push(format!("stated c: {}", case.c));
        detail.push(format!(
            "{} sampled points, max residual {}",
            report.sampled_points,
            report.max_residual.map_or_else(|| "-".to_string(), |r| format!("{r:.3e}"))
        ));
    }
    if let Some(w) = &report.counterexample {
        detail.push(format!("counterexample: {}", describe_witness(w)));
    }
    detail.extend(report.notes.iter().cloned());
    Record {
        category: Category::Case,
        label: case.id(),
        family: report.family.clone(),
        kind: report.kind,
        status: case_status(case, ok),
        method: Some(report.method.to_string()),
        witness: report.witnesses.first().map(describe_witness),
        detail,
    }
}

fn control_record(case: &TheoremCase, report: &NegativeControlReport) -> Record {
    let status = if !report.applicable { Status::Skip } else { case_status(case, report.passed()) };
    Record {
        category: Category::Control,
        label: case.id(),
        family: report.family.clone(),
        kind: report.kind,
        status,
        method: Some(format!("c + {}", report.perturbation)),
        witness: report.witness.as_ref().map(describe_witness),
        detail: report.notes.clone(),
    }
}

fn completeness_record(theorem: &str, report: &CompletenessReport) -> Record {
    let mut detail = vec![format!(
        "{} of {} generic (point, lambda0) pairs solvable over {} points",
        report.solvable_pairs, report.generic_pairs, report.generic_points
    )];
    for (id, hits) in &report.case_hits {
        detail.push(match hits {
            Some(h) => format!("case {id}: {h} solvable locus pairs with the stated c"),
            None => format!("case {id}: locus admits no samples"),
        });
    }
    for d in &report.discrepancies {
        let mut line = format!("{} {:?}", if d.suspect { "warning" } else { "discrepancy" }, d.kind);
        if let Some(id) = &d.case_id {
            let _ = write!(line, " case {id}");
        }
        if let Some(p) = &d.point {
            let _ = write!(line, " at {p}");
        }
        if let Some(l) = &d.lambda0 {
            let _ = write!(line, "; lambda0={l}");
        }
        if let Some(c) = &d.solved_c {
            let _ = write!(line, "; solved c={c}");
        }
        if let Some(c) = &d.stated_c {
            let _ = write!(line, "; stated c={c}");
        }
        detail.push(line);
    }
    if report.failure_count + report.warning_count > report.discrepancies.len() {
        detail.push(format!("{} discrepancies and {} warnings in total", report.failure_count, report.warning_count));
    }
    Record {
        category: Category::Completeness,
        label: theorem.to_string(),
        family: report.family.clone(),
        kind: report.kind,
        status: if report.passed() {
            if report.warning_count > 0 {
                Status::Warn
            } else {
                Status::Pass
            }
        } else {
            Status::Fail
        },
        method: Some("scan".to_string()),
        witness: None,
        detail,
    }
}

type SystemKey = (FamilyId, Option<i64>, ConnectionKind);

fn system_key(case: &TheoremCase) -> SystemKey {
    (case.family.clone(), case.eta.map(Eta::value), case.kind)
}

fn build_systems(cases: &[&TheoremCase]) -> BTreeMap<SystemKey, Result<SolitonSystem, String>> {
    let mut keys: Vec<SystemKey> = cases.iter().map(|c| system_key(c)).collect();
    keys.sort();
    keys.dedup();
    keys.into_par_iter()
        .map(|key| {
            let sys = build_family(&key.0, key.1.and_then(Eta::from_value))
                .map(|fam| soliton_system(&fam, key.2))
                .map_err(|e| e.to_string());
            (key, sys)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

fn case_family_label(case: &TheoremCase) -> String {
    match case.eta {
        Some(eta) => format!("{}(eta={eta})", case.family),
        None => case.family.to_string(),
    }
}

/// Runs every check in the catalog. Output order is fixed: matrices,
/// scalars, then per case its verification and negative control, then
/// completeness scans per statement.
pub fn verify_catalog(catalog: &Catalog, options: &VerifyOptions) -> VerifyReport {
    let only = options.only.as_deref();
    let mut records: Vec<Record> =
        catalog.matrices.par_iter().filter(|m| selected(only, &m.label)).flat_map_iter(check_matrix).collect();
    records.extend(
        catalog.scalars.par_iter().filter(|s| selected(only, &s.label)).flat_map_iter(check_scalar).collect::<Vec<_>>(),
    );

    let cases: Vec<&TheoremCase> = catalog.cases.iter().filter(|c| selected(only, &c.id())).collect();
    let systems = build_systems(&cases);
    let perturbation = rational::int(1);
    let case_records: Vec<Vec<Record>> = cases
        .par_iter()
        .map(|case| {
            let sys = match &systems[&system_key(case)] {
                Ok(sys) => sys,
                Err(e) => {
                    return vec![fail_record(Category::Case, &case.id(), case_family_label(case), case.kind, e.clone())]
                }
            };
            let mut out = Vec::new();
            match verify_case(sys, case, options.seed, options.tolerance) {
                Ok(report) => out.push(case_record(case, &report)),
                Err(e) => {
                    out.push(fail_record(Category::Case, &case.id(), sys.family.label(), case.kind, e.to_string()))
                }
            }
            match negative_control(sys, case, &perturbation, options.seed, options.tolerance) {
                Ok(report) => out.push(control_record(case, &report)),
                Err(e) => {
                    out.push(fail_record(Category::Control, &case.id(), sys.family.label(), case.kind, e.to_string()))
                }
            }
            out
        })
        .collect();
    records.extend(case_records.into_iter().flatten());

    // One completeness scan per statement and branch.
    let mut groups: Vec<(String, SystemKey)> = Vec::new();
    for case in &cases {
        let key = (case.theorem.clone(), system_key(case));
        if !groups.contains(&key) {
            groups.push(key);
        }
    }
    let completeness: Vec<Record> = groups
        .par_iter()
        .map(|(theorem, key)| {
            let statement: Vec<TheoremCase> =
                catalog.cases.iter().filter(|c| &c.theorem == theorem && &system_key(c) == key).cloned().collect();
            let family = statement.first().map(case_family_label).unwrap_or_default();
            let sys = match &systems[key] {
                Ok(sys) => sys,
                Err(e) => return fail_record(Category::Completeness, theorem, family, key.2, e.clone()),
            };
            match completeness_check(sys, &statement, options.seed, options.scan_points, options.tolerance) {
                Ok(report) => completeness_record(theorem, &report),
                Err(e) => fail_record(Category::Completeness, theorem, family, key.2, e.to_string()),
            }
        })
        .collect();
    records.extend(completeness);

    let mut summary = Summary::default();
    for r in &records {
        match r.status {
            Status::Pass => summary.passed += 1,
            Status::Fail => summary.failed += 1,
            Status::Warn => summary.warnings += 1,
            Status::Info => summary.info += 1,
            Status::Skip => summary.skipped += 1,
        }
    }
    VerifyReport { seed: options.seed, only: options.only.clone(), records, summary }
}

/// Loads the built-in catalog and verifies it with default options.
pub fn verify_all(seed: u64) -> Result<VerifyReport, CatalogError> {
    let catalog = load_catalog()?;
    Ok(verify_catalog(&catalog, &VerifyOptions { seed, ..VerifyOptions::default() }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::parse_catalog;

    #[test]
    fn selection_matches_whole_label_components() {
        assert!(selected(Some("3.3"), "3.3"));
        assert!(selected(Some("3.3"), "3.3.ii"));
        assert!(!selected(Some("3.3"), "3.31"));
        assert!(selected(None, "4.8"));
    }

    #[test]
    fn an_altered_entry_is_the_only_matrix_failure() {
        let altered = crate::catalog::catalog_source().replacen(
            "row1 = 1/2*beta^2, alpha*beta, alpha*beta",
            "row1 = beta^2, alpha*beta, alpha*beta",
            1,
        );
        let cat = parse_catalog(&altered).unwrap();
        let failures: Vec<Record> =
            cat.matrices.iter().flat_map(check_matrix).filter(|r| r.status == Status::Fail).collect();
        assert_eq!(failures.len(), 1);
        assert_eq!(failures[0].label, "3.9");
        assert_eq!(failures[0].detail.len(), 1);
    }
}
