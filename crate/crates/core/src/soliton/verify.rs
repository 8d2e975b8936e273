use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::solve::{solve_for_c, LinearInC};
use super::{derived_seed, SolitonError, SolitonSystem, DEFAULT_LAMBDA0_GRID};
use crate::exactpoly::{rational, IdealBasis, Polynomial, Rational};
use crate::geometry::ConnectionKind;
use crate::liealgebras::{sample_on_locus, Eta, FamilyId, LocusSpec, ParameterPoint, SampleMode, Value};

/// Number of locus points drawn by the sampled stage and by negative controls.
pub const SAMPLE_POINTS: usize = 100;
const WITNESS_LIMIT: usize = 3;

/// The value of `c` a case asserts.
#[derive(Debug, Clone, PartialEq)]
pub enum CClaim {
    Expr(Polynomial),
    /// Every value of `c` is a solution.
    Any,
    /// Every nonzero value of `c` is a solution.
    Nonzero,
}

impl std::fmt::Display for CClaim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CClaim::Expr(p) => write!(f, "{p}"),
            CClaim::Any => f.write_str("any"),
            CClaim::Nonzero => f.write_str("nonzero"),
        }
    }
}

/// One sub-case of a classification statement.
#[derive(Debug, Clone)]
pub struct TheoremCase {
    /// Statement label such as `3.3`.
    pub theorem: String,
    /// Roman numeral of the sub-case, empty for single-case statements.
    pub case: String,
    pub family: FamilyId,
    /// `None` applies the case to every branch of the family.
    pub eta: Option<Eta>,
    pub kind: ConnectionKind,
    /// Applied in order; later expressions may mention earlier variables.
    pub substitutions: Vec<(String, Polynomial)>,
    /// Relations `p = 0` that hold on the case locus.
    pub side_relations: Vec<Polynomial>,
    pub nonvanishing: Vec<Polynomial>,
    pub c: CClaim,
    /// The statement claims there are no solutions at all.
    pub no_solutions: bool,
    pub suspect: Option<String>,
    /// Set for alternative readings of a case. Variants are informational.
    pub variant_of: Option<String>,
}

impl TheoremCase {
    pub fn id(&self) -> String {
        if self.case.is_empty() || self.case.starts_with('-') {
            format!("{}{}", self.theorem, self.case)
        } else {
            format!("{}.{}", self.theorem, self.case)
        }
    }

    pub fn applies_to(&self, sys: &SolitonSystem) -> bool {
        self.family == sys.family.id && self.kind == sys.kind && (self.eta.is_none() || self.eta == sys.family.eta)
    }

    fn check_target(&self, sys: &SolitonSystem) -> Result<(), SolitonError> {
        if self.applies_to(sys) {
            return Ok(());
        }
        let expected = match self.eta {
            Some(eta) => format!("{}(eta={eta}) {}", self.family, self.kind),
            None => format!("{} {}", self.family, self.kind),
        };
        Err(SolitonError::FamilyMismatch {
            case: self.id(),
            expected,
            actual: format!("{} {}", sys.family.label(), sys.kind),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Every residual is the zero polynomial after substitution.
    Exact,
    /// Every residual vanishes modulo the side relations and family constraints.
    Reduced,
    /// Every residual vanishes at the sampled locus points.
    Sampled,
    /// A locus point with a nonzero residual was found, or no evidence exists.
    Failed,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::Reduced => "reduced",
            Method::Sampled => "sampled",
            Method::Failed => "failed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub point: ParameterPoint,
    pub lambda0: Value,
    /// The value of `c` that was plugged in.
    pub c: Value,
    /// What the system actually allows at this point and `lambda0`.
    pub solved_c: String,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub case_id: String,
    pub family: String,
    pub kind: ConnectionKind,
    pub method: Method,
    pub residual_zero: bool,
    pub sampled_points: usize,
    /// Largest residual magnitude over the sampled points.
    pub max_residual: Option<f64>,
    pub witnesses: Vec<Witness>,
    pub counterexample: Option<Witness>,
    pub suspect: Option<String>,
    pub variant_of: Option<String>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    /// Exact or reduced evidence.
    pub fn is_proven(&self) -> bool {
        matches!(self.method, Method::Exact | Method::Reduced)
    }
}

/// A case with the family branch and its own substitutions folded in.
pub(super) struct Prepared {
    pub(super) substitutions: Vec<(usize, Polynomial)>,
    pub(super) side_relations: Vec<Polynomial>,
    pub(super) nonvanishing: Vec<Polynomial>,
    pub(super) c: Option<Polynomial>,
}

impl Prepared {
    pub(super) fn new(sys: &SolitonSystem, case: &TheoremCase) -> Result<Self, SolitonError> {
        let vars = sys.family.vars().clone();
        let branch = |p: &Polynomial| -> Result<Polynomial, SolitonError> {
            let p = p.retable(&vars)?;
            match (sys.family.eta, vars.index_of("eta")) {
                (Some(eta), Some(i)) => Ok(p.substitute(i, &Polynomial::integer(&vars, eta.value()))?),
                _ => Ok(p),
            }
        };
        let mut substitutions = Vec::new();
        for (name, e) in &case.substitutions {
            substitutions.push((vars.require(name)?, branch(e)?));
        }
        let prepared = Prepared {
            substitutions,
            side_relations: case.side_relations.iter().map(&branch).collect::<Result<_, _>>()?,
            nonvanishing: case.nonvanishing.iter().map(&branch).collect::<Result<_, _>>()?,
            c: match &case.c {
                CClaim::Expr(e) => Some(branch(e)?),
                _ => None,
            },
        };
        Ok(Prepared { c: prepared.c.as_ref().map(|c| prepared.apply(c)), ..prepared })
    }

    fn apply(&self, p: &Polynomial) -> Polynomial {
        self.substitutions.iter().fold(p.clone(), |acc, (v, e)| acc.substitute(*v, e).expect("same table"))
    }

    fn check_resolved(&self, ps: &[Polynomial]) -> Result<(), SolitonError> {
        for p in ps {
            for (v, _) in &self.substitutions {
                if p.degree_in(*v) > 0 {
                    return Err(SolitonError::Unresolved(p.vars().name(*v).to_string()));
                }
            }
        }
        Ok(())
    }

    /// Residuals with the substitutions and, when given, `c` applied.
    fn residuals(&self, sys: &SolitonSystem, c: Option<&Polynomial>) -> Result<Vec<Polynomial>, SolitonError> {
        let c_index = sys.family.vars().require("c")?;
        let out: Vec<Polynomial> = sys
            .residuals
            .iter()
            .map(|r| {
                let r = self.apply(r);
                match c {
                    Some(c) => r.substitute(c_index, c).expect("same table"),
                    None => r,
                }
            })
            .collect();
        self.check_resolved(&out)?;
        Ok(out)
    }

    fn relations(&self, sys: &SolitonSystem) -> Vec<Polynomial> {
        sys.family
            .constraints
            .iter()
            .chain(&self.side_relations)
            .map(|p| self.apply(p))
            .filter(|p| !p.is_zero())
            .collect()
    }

    pub(super) fn locus(&self, sys: &SolitonSystem) -> LocusSpec {
        LocusSpec {
            parameters: sys.family.parameters(),
            substitutions: self.substitutions.clone(),
            relations: sys.family.constraints.iter().chain(&self.side_relations).cloned().collect(),
            nonvanishing: sys.family.nonvanishing.iter().chain(&self.nonvanishing).cloned().collect(),
        }
    }
}

/// `var^2 - rhs` form of a relation, when one variable occurs only squared
/// with a constant coefficient.
fn square_rule(relation: &Polynomial) -> Option<(usize, Polynomial)> {
    relation.variables().into_iter().rev().find_map(|v| {
        if relation.degree_in(v) != 2 || !relation.coefficient_of(v, 1).is_zero() {
            return None;
        }
        let lead = relation.coefficient_of(v, 2).constant_value()?;
        let rhs = relation.coefficient_of(v, 0).scale(&(-Rational::from_integer(1.into()) / lead));
        Some((v, rhs))
    })
}

/// True when every residual vanishes on the variety of `relations`.
fn reduces_to_zero(residuals: &[Polynomial], relations: &[Polynomial]) -> Result<bool, SolitonError> {
    if relations.is_empty() {
        return Ok(false);
    }
    let mut reduced = residuals.to_vec();
    for rel in relations {
        if let Some((v, rhs)) = square_rule(rel) {
            reduced = reduced.iter().map(|r| r.reduce_square(v, &rhs)).collect::<Result<_, _>>()?;
        }
    }
    if reduced.iter().all(Polynomial::is_zero) {
        return Ok(true);
    }
    let ideal = IdealBasis::new(relations)?;
    Ok(residuals.iter().all(|r| ideal.contains(r)))
}

pub(super) fn lambda0_grid() -> Vec<Rational> {
    DEFAULT_LAMBDA0_GRID.iter().map(|&(n, d)| rational::ratio(n, d)).collect()
}

const NONZERO_C: [(i64, i64); 4] = [(1, 1), (-2, 1), (1, 2), (3, 1)];

struct Evaluation {
    lambda0: Value,
    c: Value,
    max_residual: f64,
    zero: bool,
}

/// Evaluates the system residuals at a point with chosen `lambda0` and `c`.
fn evaluate(
    sys: &SolitonSystem,
    lin: &LinearInC,
    point: &ParameterPoint,
    lambda0: &Rational,
    c: &CChoice,
    tol: f64,
) -> Result<Evaluation, SolitonError> {
    let nvars = sys.family.vars().len();
    if let Some(mut exact) = point.exact_assignment(nvars) {
        exact[lin.lambda_index()] = Some(lambda0.clone());
        let c_value = match c {
            CChoice::Expr(e) => e.eval_indexed(&exact)?,
            CChoice::Value(v) => v.clone(),
        };
        exact[lin.c_index()] = Some(c_value.clone());
        let values = sys.residuals.iter().map(|r| r.eval_indexed(&exact)).collect::<Result<Vec<_>, _>>()?;
        return Ok(Evaluation {
            lambda0: Value::Exact(lambda0.clone()),
            c: Value::Exact(c_value),
            max_residual: super::solve::max_abs(&values),
            zero: values.iter().all(Zero::is_zero),
        });
    }
    let mut floats = point.float_assignment(nvars);
    floats[lin.lambda_index()] = Some(rational::to_f64(lambda0));
    let c_value = match c {
        CChoice::Expr(e) => e.eval_f64(&floats)?,
        CChoice::Value(v) => rational::to_f64(v),
    };
    floats[lin.c_index()] = Some(c_value);
    let max_residual = sys
        .residuals
        .iter()
        .map(|r| r.eval_f64(&floats).map(f64::abs))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(Evaluation {
        lambda0: Value::Float(rational::to_f64(lambda0)),
        c: Value::Float(c_value),
        max_residual,
        zero: max_residual < tol,
    })
}

enum CChoice {
    Expr(Polynomial),
    Value(Rational),
}

fn choose_c(claim: Option<&Polynomial>, rng: &mut ChaCha8Rng) -> CChoice {
    match claim {
        Some(e) => CChoice::Expr(e.clone()),
        None => {
            let (n, d) = NONZERO_C[rng.gen_range(0..NONZERO_C.len())];
            CChoice::Value(rational::ratio(n, d))
        }
    }
}

fn witness(sys: &SolitonSystem, point: &ParameterPoint, ev: Evaluation, tol: f64) -> Result<Witness, SolitonError> {
    let solved = solve_for_c(&sys.residuals, point, &ev.lambda0, tol)?;
    Ok(Witness {
        point: point.clone(),
        lambda0: ev.lambda0,
        c: ev.c,
        solved_c: solved.map_or_else(|| "none".to_string(), |s| s.to_string()),
        max_residual: ev.max_residual,
    })
}

/// Checks a case against its system, recording the strongest evidence found.
/// The sampled stage always runs so that every report carries sample points.
pub fn verify_case(
    sys: &SolitonSystem,
    case: &TheoremCase,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport, SolitonError> {
    case.check_target(sys)?;
    if case.no_solutions {
        return verify_no_solutions(sys, case, seed, tol);
    }
    let prepared = Prepared::new(sys, case)?;
    let c_poly = prepared.c.as_ref();
    let residuals = prepared.residuals(sys, c_poly)?;
    let mut notes = Vec::new();

    let mut method = if residuals.iter().all(Polynomial::is_zero) {
        Method::Exact
    } else if reduces_to_zero(&residuals, &prepared.relations(sys))? {
        Method::Reduced
    } else {
        Method::Failed
    };

    if case.c == CClaim::Nonzero && method != Method::Failed {
        notes.push("also holds at c = 0".to_string());
    }
    if let Some(c) = c_poly {
        if c.degree_in(sys.family.vars().require("c")?) > 0 {
            notes.push("stated c mentions c".to_string());
        }
    }

    let lin = LinearInC::new(&sys.residuals)?;
    let mut rng = ChaCha8Rng::seed_from_u64(derived_seed(seed, &format!("{}/{}", case.id(), sys.family.label())));
    let vars = sys.family.vars().clone();
    let points = sample_on_locus(
        &prepared.locus(sys),
        vars.len(),
        &|i| vars.name(i).to_string(),
        &mut rng,
        SAMPLE_POINTS,
        SampleMode::Exact,
    );
    if points.iter().any(|p| p.float_fallback) {
        notes.push("some locus points needed irrational values; checked in floating point".to_string());
    }
    let grid = lambda0_grid();
    let mut witnesses = Vec::new();
    let mut counterexample = None;
    let mut max_residual = 0.0f64;
    for point in &points {
        let lambda0 = &grid[rng.gen_range(0..grid.len())];
        let choice = choose_c(c_poly, &mut rng);
        let ev = evaluate(sys, &lin, point, lambda0, &choice, tol)?;
        max_residual = max_residual.max(ev.max_residual);
        if !ev.zero && counterexample.is_none() {
            counterexample = Some(witness(sys, point, ev, tol)?);
        } else if ev.zero && witnesses.len() < WITNESS_LIMIT {
            witnesses.push(witness(sys, point, ev, tol)?);
        }
    }
    if points.is_empty() {
        notes.push("no locus points could be sampled".to_string());
    }
    if method == Method::Failed && counterexample.is_none() && !points.is_empty() {
        method = Method::Sampled;
    }
    if method != Method::Failed && counterexample.is_some() {
        // Symbolic evidence is authoritative; a float mismatch is only noted.
        notes.push("sampled residual exceeded tolerance".to_string());
    }

    Ok(VerificationReport {
        case_id: case.id(),
        family: sys.family.label(),
        kind: sys.kind,
        method,
        residual_zero: method != Method::Failed,
        sampled_points: points.len(),
        max_residual: (!points.is_empty()).then_some(max_residual),
        witnesses,
        counterexample,
        suspect: case.suspect.clone(),
        variant_of: case.variant_of.clone(),
        notes,
    })
}

/// Number of points scanned when a case claims there are no solutions.
pub const NO_SOLUTION_POINTS: usize = 500;

fn verify_no_solutions(
    sys: &SolitonSystem,
    case: &TheoremCase,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport, SolitonError> {
    let mut notes = Vec::new();
    let report =
        super::scan(&sys.family, sys.kind, derived_seed(seed, &case.id()), NO_SOLUTION_POINTS, &lambda0_grid(), tol)?;
    let solvable: Vec<_> = report.entries.iter().filter(|e| e.solvable).collect();
    let counterexample = solvable.first().map(|e| Witness {
        point: report.points[e.point].clone(),
        lambda0: e.lambda0.clone(),
        c: e.c.clone().map_or(Value::Exact(Rational::zero()), |c| match c {
            super::CSolution::Unique(v) => v,
            super::CSolution::Any => Value::Exact(Rational::zero()),
        }),
        solved_c: e.c.as_ref().map_or_else(|| "none".to_string(), ToString::to_string),
        max_residual: e.residual_norm,
    });
    let method = if counterexample.is_some() { Method::Failed } else { Method::Sampled };
    notes.push(format!("{} of {} scanned (point, lambda0) pairs solvable", solvable.len(), report.entries.len()));
    Ok(VerificationReport {
        case_id: case.id(),
        family: sys.family.label(),
        kind: sys.kind,
        method,
        residual_zero: method != Method::Failed,
        sampled_points: report.points.len(),
        max_residual: None,
        witnesses: Vec::new(),
        counterexample,
        suspect: case.suspect.clone(),
        variant_of: case.variant_of.clone(),
        notes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NegativeControlReport {
    pub case_id: String,
    pub family: String,
    pub kind: ConnectionKind,
    pub perturbation: String,
    pub applicable: bool,
    /// A locus point where the perturbed `c` leaves a nonzero residual.
    pub witness: Option<Witness>,
    pub notes: Vec<String>,
}

impl NegativeControlReport {
    pub fn passed(&self) -> bool {
        !self.applicable || self.witness.is_some()
    }
}

/// Perturbs the stated `c` and looks for a locus point where the system no
/// longer vanishes. Skipped when the bracket vanishes on the case locus or
/// the case leaves `c` free.
pub fn negative_control(
    sys: &SolitonSystem,
    case: &TheoremCase,
    perturbation: &Rational,
    seed: u64,
    tol: f64,
) -> Result<NegativeControlReport, SolitonError> {
    case.check_target(sys)?;
    let mut report = NegativeControlReport {
        case_id: case.id(),
        family: sys.family.label(),
        kind: sys.kind,
        perturbation: perturbation.to_string(),
        applicable: false,
        witness: None,
        notes: Vec::new(),
    };
    if case.no_solutions {
        report.notes.push("no stated solution to perturb".to_string());
        return Ok(report);
    }
    let prepared = Prepared::new(sys, case)?;
    if sys.family.structure.map(|p| prepared.apply(p)).is_abelian() {
        report.notes.push("bracket vanishes on the case locus".to_string());
        return Ok(report);
    }
    let Some(c) = &prepared.c else {
        report.notes.push("case leaves c free".to_string());
        return Ok(report);
    };
    report.applicable = true;
    let shifted = c + &Polynomial::constant(c.vars(), perturbation.clone());
    let lin = LinearInC::new(&sys.residuals)?;
    let mut rng =
        ChaCha8Rng::seed_from_u64(derived_seed(seed, &format!("{}/{}/control", case.id(), sys.family.label())));
    let vars = sys.family.vars().clone();
    let points = sample_on_locus(
        &prepared.locus(sys),
        vars.len(),
        &|i| vars.name(i).to_string(),
        &mut rng,
        SAMPLE_POINTS,
        SampleMode::Exact,
    );
    let grid = lambda0_grid();
    for point in &points {
        let lambda0 = &grid[rng.gen_range(0..grid.len())];
        let ev = evaluate(sys, &lin, point, lambda0, &CChoice::Expr(shifted.clone()), tol)?;
        if !ev.zero && ev.max_residual.abs() > 0.0 {
            report.witness = Some(witness(sys, point, ev, tol)?);
            break;
        }
    }
    if report.witness.is_none() {
        report.notes.push(format!("perturbed c still solves the system at {} sampled points", points.len()));
    }
    Ok(report)
}
