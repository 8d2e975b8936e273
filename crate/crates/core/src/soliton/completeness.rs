use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::scan::{scan_points, ScanEntry};
use super::solve::CSolution;
use super::verify::{lambda0_grid, CClaim, Prepared, TheoremCase};
use super::{derived_seed, SolitonError, SolitonSystem};
use crate::exactpoly::{rational, Polynomial, Rational};
use crate::liealgebras::{sample_on_locus, sample_parameters, ParameterPoint, SampleMode, Value};

/// Locus points drawn per case when looking for solutions inside it.
pub const LOCUS_POINTS: usize = 20;
const RECORDED_DISCREPANCIES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscrepancyKind {
    /// A solvable point satisfies no case's parameter conditions.
    OutsideConditions,
    /// A solvable point satisfies a case's conditions with a different `c`.
    CMismatch,
    /// A case's locus has samples but none of them is a solution with the stated `c`.
    EmptyCase,
    /// A solvable point is covered only by an alternative reading of a suspect case.
    VariantOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrepancy {
    pub kind: DiscrepancyKind,
    pub case_id: Option<String>,
    /// Discrepancies against suspect cases are warnings.
    pub suspect: bool,
    pub point: Option<ParameterPoint>,
    pub lambda0: Option<Value>,
    pub solved_c: Option<String>,
    pub stated_c: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompletenessReport {
    pub family: String,
    pub kind: crate::geometry::ConnectionKind,
    pub generic_points: usize,
    pub generic_pairs: usize,
    pub solvable_pairs: usize,
    /// Solvable locus pairs matching each case, in case order. `None` when
    /// the locus admitted no samples.
    pub case_hits: Vec<(String, Option<usize>)>,
    pub failure_count: usize,
    pub warning_count: usize,
    /// The first few discrepancies of each severity.
    pub discrepancies: Vec<Discrepancy>,
}

impl CompletenessReport {
    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    fn record(&mut self, d: Discrepancy) {
        if d.suspect {
            self.warning_count += 1;
        } else {
            self.failure_count += 1;
        }
        let same_severity = self.discrepancies.iter().filter(|x| x.suspect == d.suspect).count();
        if same_severity < RECORDED_DISCREPANCIES {
            self.discrepancies.push(d);
        }
    }
}

struct CaseTest<'a> {
    case: &'a TheoremCase,
    conditions: Vec<Polynomial>,
    nonvanishing: Vec<Polynomial>,
    c: Option<Polynomial>,
}

enum Point<'a> {
    Exact(&'a [Option<Rational>]),
    Float(&'a [Option<f64>]),
}

fn is_zero(p: &Polynomial, at: &Point<'_>, tol: f64) -> Result<bool, SolitonError> {
    Ok(match at {
        Point::Exact(a) => p.eval_indexed(a)?.is_zero(),
        Point::Float(f) => p.eval_f64(f)?.abs() < tol,
    })
}

impl CaseTest<'_> {
    fn parameters_match(&self, at: &Point<'_>, tol: f64) -> Result<bool, SolitonError> {
        for p in &self.conditions {
            if !is_zero(p, at, tol)? {
                return Ok(false);
            }
        }
        for p in &self.nonvanishing {
            if is_zero(p, at, tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn c_matches(&self, solved: &CSolution, at: &Point<'_>, tol: f64) -> Result<bool, SolitonError> {
        Ok(match (&self.case.c, solved) {
            (CClaim::Any, CSolution::Any) | (CClaim::Nonzero, CSolution::Any) => true,
            (CClaim::Nonzero, CSolution::Unique(v)) => v.to_f64().abs() > tol,
            (CClaim::Expr(_), CSolution::Unique(v)) => {
                let c = self.c.as_ref().expect("expression claim");
                match (at, v) {
                    (Point::Exact(a), Value::Exact(v)) => &c.eval_indexed(a)? == v,
                    (Point::Exact(a), Value::Float(v)) => {
                        (rational::to_f64(&c.eval_indexed(a)?) - v).abs() < tol * (1.0 + v.abs())
                    }
                    (Point::Float(f), v) => (c.eval_f64(f)? - v.to_f64()).abs() < tol * (1.0 + v.to_f64().abs()),
                }
            }
            _ => false,
        })
    }
}

fn assignment<'a>(
    point: &ParameterPoint,
    lambda0: &Value,
    lambda_index: usize,
    nvars: usize,
    exact: &'a mut Vec<Option<Rational>>,
    floats: &'a mut Vec<Option<f64>>,
) -> Point<'a> {
    match (point.exact_assignment(nvars), lambda0) {
        (Some(mut a), Value::Exact(l)) => {
            a[lambda_index] = Some(l.clone());
            *exact = a;
            Point::Exact(exact)
        }
        _ => {
            let mut f = point.float_assignment(nvars);
            f[lambda_index] = Some(lambda0.to_f64());
            *floats = f;
            Point::Float(floats)
        }
    }
}

/// Scans generic family points and checks that every solution lies in some
/// stated case with the stated `c`. Each case locus is then sampled to check
/// that the case contributes solutions. Variant cases are ignored.
pub fn completeness_check(
    sys: &SolitonSystem,
    cases: &[TheoremCase],
    seed: u64,
    count: usize,
    tol: f64,
) -> Result<CompletenessReport, SolitonError> {
    let vars = sys.family.vars().clone();
    let nvars = vars.len();
    let lambda_index = vars.require("lambda0")?;
    let grid = lambda0_grid();
    let suspect_ids: Vec<String> = cases.iter().filter(|c| c.suspect.is_some()).map(TheoremCase::id).collect();
    let variants: Vec<&TheoremCase> = cases
        .iter()
        .filter(|c| c.applies_to(sys) && c.variant_of.as_ref().is_some_and(|v| suspect_ids.contains(v)))
        .collect();
    let cases: Vec<&TheoremCase> = cases.iter().filter(|c| c.applies_to(sys) && c.variant_of.is_none()).collect();
    let tests = case_tests(sys, &cases)?;
    let variant_tests = case_tests(sys, &variants)?;

    let label = format!("{}/{}/completeness", sys.family.label(), sys.kind);
    let points = sample_parameters(&sys.family, derived_seed(seed, &label), count, SampleMode::Exact);
    let entries = scan_points(sys, &points, &grid, tol)?;
    let mut report = CompletenessReport {
        family: sys.family.label(),
        kind: sys.kind,
        generic_points: points.len(),
        generic_pairs: entries.len(),
        solvable_pairs: entries.iter().filter(|e| e.solvable).count(),
        case_hits: Vec::new(),
        failure_count: 0,
        warning_count: 0,
        discrepancies: Vec::new(),
    };

    let (mut exact, mut floats) = (Vec::new(), Vec::new());
    for e in entries.iter().filter(|e| e.solvable) {
        let point = &points[e.point];
        let solved = e.c.as_ref().expect("solvable entry");
        let at = assignment(point, &e.lambda0, lambda_index, nvars, &mut exact, &mut floats);
        let mut in_parameters = Vec::new();
        let mut matched = false;
        for t in &tests {
            if t.parameters_match(&at, tol)? {
                if t.c_matches(solved, &at, tol)? {
                    matched = true;
                    break;
                }
                in_parameters.push(t);
            }
        }
        if matched {
            continue;
        }
        if in_parameters.is_empty() {
            let mut variant = None;
            for t in &variant_tests {
                if t.parameters_match(&at, tol)? && t.c_matches(solved, &at, tol)? {
                    variant = Some(t);
                    break;
                }
            }
            if let Some(t) = variant {
                report.record(Discrepancy {
                    kind: DiscrepancyKind::VariantOnly,
                    case_id: Some(t.case.id()),
                    suspect: true,
                    point: Some(point.clone()),
                    lambda0: Some(e.lambda0.clone()),
                    solved_c: Some(solved.to_string()),
                    stated_c: stated_c(t, &at)?,
                });
                continue;
            }
        }
        report.record(discrepancy_at(e, point, in_parameters.first().copied(), &at)?);
    }

    for t in &tests {
        let prepared = Prepared::new(sys, t.case)?;
        let mut rng = ChaCha8Rng::seed_from_u64(derived_seed(seed, &format!("{label}/{}", t.case.id())));
        let locus_points = sample_on_locus(
            &prepared.locus(sys),
            nvars,
            &|i| vars.name(i).to_string(),
            &mut rng,
            LOCUS_POINTS,
            SampleMode::Exact,
        );
        if locus_points.is_empty() {
            report.case_hits.push((t.case.id(), None));
            continue;
        }
        let locus_entries = scan_points(sys, &locus_points, &grid, tol)?;
        let mut hits = 0;
        for e in locus_entries.iter().filter(|e| e.solvable) {
            let at = assignment(&locus_points[e.point], &e.lambda0, lambda_index, nvars, &mut exact, &mut floats);
            if t.c_matches(e.c.as_ref().expect("solvable entry"), &at, tol)? {
                hits += 1;
            }
        }
        report.case_hits.push((t.case.id(), Some(hits)));
        if hits == 0 {
            let first = &locus_entries[0];
            let at =
                assignment(&locus_points[first.point], &first.lambda0, lambda_index, nvars, &mut exact, &mut floats);
            let stated_c = stated_c(t, &at)?;
            report.record(Discrepancy {
                kind: DiscrepancyKind::EmptyCase,
                case_id: Some(t.case.id()),
                suspect: t.case.suspect.is_some(),
                point: Some(locus_points[first.point].clone()),
                lambda0: Some(first.lambda0.clone()),
                solved_c: Some(first.c.as_ref().map_or_else(|| "none".to_string(), ToString::to_string)),
                stated_c,
            });
        }
    }
    Ok(report)
}

fn case_tests<'a>(sys: &SolitonSystem, cases: &[&'a TheoremCase]) -> Result<Vec<CaseTest<'a>>, SolitonError> {
    let vars = sys.family.vars();
    let mut tests = Vec::new();
    for case in cases.iter().filter(|c| !c.no_solutions) {
        let prepared = Prepared::new(sys, case)?;
        let mut conditions: Vec<Polynomial> =
            prepared.substitutions.iter().map(|(v, e)| &Polynomial::var_at(vars, *v) - e).collect();
        conditions.extend(prepared.side_relations.iter().cloned());
        tests.push(CaseTest { case, conditions, nonvanishing: prepared.nonvanishing.clone(), c: prepared.c.clone() });
    }
    Ok(tests)
}

fn stated_c(t: &CaseTest<'_>, at: &Point<'_>) -> Result<Option<String>, SolitonError> {
    Ok(match (&t.c, at) {
        (Some(c), Point::Exact(a)) => Some(c.eval_indexed(a)?.to_string()),
        (Some(c), Point::Float(f)) => Some(format!("{:.12e}", c.eval_f64(f)?)),
        (None, _) => Some(t.case.c.to_string()),
    })
}

fn discrepancy_at(
    e: &ScanEntry,
    point: &ParameterPoint,
    case: Option<&CaseTest<'_>>,
    at: &Point<'_>,
) -> Result<Discrepancy, SolitonError> {
    Ok(Discrepancy {
        kind: if case.is_some() { DiscrepancyKind::CMismatch } else { DiscrepancyKind::OutsideConditions },
        case_id: case.map(|t| t.case.id()),
        suspect: case.is_some_and(|t| t.case.suspect.is_some()),
        point: Some(point.clone()),
        lambda0: Some(e.lambda0.clone()),
        solved_c: e.c.as_ref().map(ToString::to_string),
        stated_c: match case {
            Some(t) => stated_c(t, at)?,
            None => None,
        },
    })
}
