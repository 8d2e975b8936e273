//! The seven three-dimensional Lorentzian Lie algebra families, custom
//! bracket tables, and constrained parameter sampling.

mod custom;
mod sampling;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::exactpoly::{parse_polynomial, Polynomial, VariableTable};

pub use custom::parse_custom_algebra;
pub use sampling::{
    sample_on_locus, sample_parameters, solve_linear_constraint, LocusSpec, ParameterPoint, SampleMode, Value,
};

/// Coordinates of a vector in the basis `e1, e2, e3`.
pub type Vec3 = [Polynomial; 3];

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FamilyId {
    G1,
    G2,
    G3,
    G4,
    G5,
    G6,
    G7,
    Custom(String),
}

impl FamilyId {
    pub const STANDARD: [FamilyId; 7] =
        [FamilyId::G1, FamilyId::G2, FamilyId::G3, FamilyId::G4, FamilyId::G5, FamilyId::G6, FamilyId::G7];

    pub fn needs_eta(&self) -> bool {
        matches!(self, FamilyId::G4)
    }

    pub fn is_unimodular(&self) -> Option<bool> {
        match self {
            FamilyId::G1 | FamilyId::G2 | FamilyId::G3 | FamilyId::G4 => Some(true),
            FamilyId::G5 | FamilyId::G6 | FamilyId::G7 => Some(false),
            FamilyId::Custom(_) => None,
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyId::Custom(name) => write!(f, "custom:{name}"),
            other => {
                let n = FamilyId::STANDARD.iter().position(|x| x == other).expect("standard id") + 1;
                write!(f, "g{n}")
            }
        }
    }
}

impl FromStr for FamilyId {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        if let Some(name) = lower.strip_prefix("custom:") {
            return Ok(FamilyId::Custom(name.to_string()));
        }
        match lower.as_str() {
            "g1" => Ok(FamilyId::G1),
            "g2" => Ok(FamilyId::G2),
            "g3" => Ok(FamilyId::G3),
            "g4" => Ok(FamilyId::G4),
            "g5" => Ok(FamilyId::G5),
            "g6" => Ok(FamilyId::G6),
            "g7" => Ok(FamilyId::G7),
            _ => Err(FamilyError::UnknownFamily(s.to_string())),
        }
    }
}

/// The sign `eta` of the fourth family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Eta {
    Plus,
    Minus,
}

impl Eta {
    pub const BOTH: [Eta; 2] = [Eta::Plus, Eta::Minus];

    pub fn value(self) -> i64 {
        match self {
            Eta::Plus => 1,
            Eta::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Eta> {
        match v {
            1 => Some(Eta::Plus),
            -1 => Some(Eta::Minus),
            _ => None,
        }
    }
}

impl fmt::Display for Eta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("unknown family `{0}` (expected g1..g7 or custom:<path>)")]
    UnknownFamily(String),
    #[error("family g4 needs an eta branch (1 or -1)")]
    EtaRequired,
    #[error("only family g4 takes an eta branch")]
    EtaNotAllowed,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Diagonal metric `g(e_i, e_j) = eps_i delta_ij`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MetricSignature(pub [i64; 3]);

impl MetricSignature {
    pub const LORENTZIAN: MetricSignature = MetricSignature([1, 1, -1]);

    pub fn eps(&self, i: usize) -> i64 {
        self.0[i]
    }

    /// `g(x, y)` for coordinate vectors.
    pub fn inner(&self, x: &Vec3, y: &Vec3) -> Polynomial {
        let vars = x[0].vars();
        let mut acc = Polynomial::zero(vars);
        for i in 0..3 {
            acc = &acc + &(&x[i] * &y[i]).scale(&crate::exactpoly::rational::int(self.0[i]));
        }
        acc
    }
}

impl Default for MetricSignature {
    fn default() -> Self {
        Self::LORENTZIAN
    }
}

/// `[e_i, e_j] = sum_k c[i][j][k] e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    c: [[Vec3; 3]; 3],
}

impl StructureConstants {
    /// Builds the full antisymmetric table from the three brackets
    /// `[e1,e2]`, `[e1,e3]`, `[e2,e3]`.
    pub fn from_brackets(b12: Vec3, b13: Vec3, b23: Vec3) -> Self {
        let vars = b12[0].vars().clone();
        let zero = || std::array::from_fn(|_| Polynomial::zero(&vars));
        let mut c: [[Vec3; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| zero()));
        for ((i, j), b) in [((0, 1), b12), ((0, 2), b13), ((1, 2), b23)] {
            c[j][i] = std::array::from_fn(|k| -&b[k]);
            c[i][j] = b;
        }
        StructureConstants { c }
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Polynomial {
        &self.c[i][j][k]
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> &Vec3 {
        &self.c[i][j]
    }

    pub fn vars(&self) -> &Arc<VariableTable> {
        self.c[0][0][0].vars()
    }

    pub fn is_antisymmetric(&self) -> bool {
        (0..3).all(|i| (0..3).all(|j| (0..3).all(|k| (&self.c[i][j][k] + &self.c[j][i][k]).is_zero())))
    }

    pub fn is_abelian(&self) -> bool {
        self.c.iter().flatten().flatten().all(Polynomial::is_zero)
    }

    pub fn map(&self, f: impl Fn(&Polynomial) -> Polynomial) -> Self {
        StructureConstants {
            c: std::array::from_fn(|i| std::array::from_fn(|j| std::array::from_fn(|k| f(&self.c[i][j][k])))),
        }
    }
}

/// A metric Lie algebra together with the side conditions on its parameters.
#[derive(Debug, Clone)]
pub struct LieAlgebraFamily {
    pub id: FamilyId,
    pub eta: Option<Eta>,
    pub structure: StructureConstants,
    pub metric: MetricSignature,
    pub constraints: Vec<Polynomial>,
    pub nonvanishing: Vec<Polynomial>,
}

impl LieAlgebraFamily {
    pub fn vars(&self) -> &Arc<VariableTable> {
        self.structure.vars()
    }

    /// `g4(eta=1)`, `g5`, `custom:name`.
    pub fn label(&self) -> String {
        match self.eta {
            Some(eta) => format!("{}(eta={})", self.id, eta),
            None => self.id.to_string(),
        }
    }

    /// Indices of the parameters the family depends on, in table order.
    /// `lambda0`, `c` and `eta` are never parameters.
    pub fn parameters(&self) -> Vec<usize> {
        let vars = self.vars();
        let excluded: Vec<usize> = ["lambda0", "c", "eta"].iter().filter_map(|n| vars.index_of(n)).collect();
        let mut used = std::collections::BTreeSet::new();
        for p in self.structure.c.iter().flatten().flatten() {
            used.extend(p.variables());
        }
        for p in self.constraints.iter().chain(&self.nonvanishing) {
            used.extend(p.variables());
        }
        used.into_iter().filter(|i| !excluded.contains(i)).collect()
    }

    /// The family with a polynomial map applied to every structure constant
    /// and side condition. Side conditions that become trivially true are dropped.
    pub fn map(&self, f: impl Fn(&Polynomial) -> Polynomial) -> Self {
        LieAlgebraFamily {
            id: self.id.clone(),
            eta: self.eta,
            structure: self.structure.map(&f),
            metric: self.metric,
            constraints: self.constraints.iter().map(&f).filter(|p| !p.is_zero()).collect(),
            nonvanishing: self.nonvanishing.iter().map(&f).collect(),
        }
    }
}

fn parse_row(vars: &Arc<VariableTable>, row: [&str; 3]) -> Vec3 {
    row.map(|s| parse_polynomial(s, vars).expect("built-in table parses"))
}

/// Builds one of `g1..g7` over the standard variable table. `eta` must be
/// given exactly for `g4`, and is substituted immediately.
pub fn build_family(id: &FamilyId, eta: Option<Eta>) -> Result<LieAlgebraFamily, FamilyError> {
    match (id.needs_eta(), eta) {
        (true, None) => return Err(FamilyError::EtaRequired),
        (false, Some(_)) => return Err(FamilyError::EtaNotAllowed),
        _ => {}
    }
    let vars = VariableTable::standard();
    let p = |s: &str| parse_polynomial(s, &vars).expect("built-in table parses");
    let (rows, constraints, nonvanishing): ([[&str; 3]; 3], Vec<&str>, Vec<&str>) = match id {
        FamilyId::G1 => {
            ([["alpha", "0", "-beta"], ["-alpha", "-beta", "0"], ["beta", "alpha", "alpha"]], vec![], vec!["alpha"])
        }
        FamilyId::G2 => {
            ([["0", "gamma", "-beta"], ["0", "-beta", "-gamma"], ["alpha", "0", "0"]], vec![], vec!["gamma"])
        }
        FamilyId::G3 => ([["0", "0", "-gamma"], ["0", "-beta", "0"], ["alpha", "0", "0"]], vec![], vec![]),
        FamilyId::G4 => ([["0", "-1", "2*eta - beta"], ["0", "-beta", "1"], ["alpha", "0", "0"]], vec![], vec![]),
        FamilyId::G5 => (
            [["0", "0", "0"], ["alpha", "beta", "0"], ["gamma", "delta", "0"]],
            vec!["alpha*gamma + beta*delta"],
            vec!["alpha + delta"],
        ),
        FamilyId::G6 => (
            [["0", "alpha", "beta"], ["0", "gamma", "delta"], ["0", "0", "0"]],
            vec!["alpha*gamma - beta*delta"],
            vec!["alpha + delta"],
        ),
        FamilyId::G7 => (
            [["-alpha", "-beta", "-beta"], ["alpha", "beta", "beta"], ["gamma", "delta", "delta"]],
            vec!["alpha*gamma"],
            vec!["alpha + delta"],
        ),
        FamilyId::Custom(name) => return Err(FamilyError::UnknownFamily(format!("custom:{name}"))),
    };
    let [r12, r13, r23] = rows;
    let family = LieAlgebraFamily {
        id: id.clone(),
        eta,
        structure: StructureConstants::from_brackets(
            parse_row(&vars, r12),
            parse_row(&vars, r13),
            parse_row(&vars, r23),
        ),
        metric: MetricSignature::LORENTZIAN,
        constraints: constraints.into_iter().map(p).collect(),
        nonvanishing: nonvanishing.into_iter().map(p).collect(),
    };
    Ok(match eta {
        Some(eta) => {
            let value = Polynomial::integer(&vars, eta.value());
            family.map(|q| q.substitute_var("eta", &value).expect("eta is standard"))
        }
        None => family,
    })
}

/// Every standard family, with both eta branches of `g4`.
pub fn all_families() -> Vec<LieAlgebraFamily> {
    let mut out = Vec::new();
    for id in FamilyId::STANDARD {
        if id.needs_eta() {
            for eta in Eta::BOTH {
                out.push(build_family(&id, Some(eta)).expect("valid"));
            }
        } else {
            out.push(build_family(&id, None).expect("valid"));
        }
    }
    out
}

pub fn basis_vector(vars: &Arc<VariableTable>, i: usize) -> Vec3 {
    std::array::from_fn(|k| if k == i { Polynomial::one(vars) } else { Polynomial::zero(vars) })
}

/// Bilinear extension of the bracket table.
pub fn bracket(structure: &StructureConstants, x: &Vec3, y: &Vec3) -> Vec3 {
    let vars = structure.vars();
    std::array::from_fn(|k| {
        let mut acc = Polynomial::zero(vars);
        for i in 0..3 {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..3 {
                if y[j].is_zero() || structure.get(i, j, k).is_zero() {
                    continue;
                }
                acc = &acc + &(&(&x[i] * &y[j]) * structure.get(i, j, k));
            }
        }
        acc
    })
}

/// Components of `[[e1,e2],e3] + [[e2,e3],e1] + [[e3,e1],e2]`.
pub fn jacobi_residuals(fam: &LieAlgebraFamily) -> Vec3 {
    let vars = fam.vars();
    let e: [Vec3; 3] = std::array::from_fn(|i| basis_vector(vars, i));
    let s = &fam.structure;
    let t1 = bracket(s, &bracket(s, &e[0], &e[1]), &e[2]);
    let t2 = bracket(s, &bracket(s, &e[1], &e[2]), &e[0]);
    let t3 = bracket(s, &bracket(s, &e[2], &e[0]), &e[1]);
    std::array::from_fn(|k| &(&t1[k] + &t2[k]) + &t3[k])
}

/// The product structure `J = diag(1, 1, -1)` as an operator in row form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProductStructure(pub [i64; 3]);

impl ProductStructure {
    pub const STANDARD: ProductStructure = ProductStructure([1, 1, -1]);

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        std::array::from_fn(|k| v[k].scale(&crate::exactpoly::rational::int(self.0[k])))
    }

    /// `J^2 = Id`.
    pub fn is_involution(&self) -> bool {
        self.0.iter().all(|j| j * j == 1)
    }

    /// `g(J e_i, J e_j) = g(e_i, e_j)` for a diagonal metric.
    pub fn preserves(&self, metric: &MetricSignature) -> bool {
        (0..3).all(|i| self.0[i] * self.0[i] * metric.eps(i) == metric.eps(i))
    }
}

impl Default for ProductStructure {
    fn default() -> Self {
        Self::STANDARD
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Polynomial {
        parse_polynomial(s, &VariableTable::standard()).unwrap()
    }

    #[test]
    fn printed_tables() {
        let g1 = build_family(&FamilyId::G1, None).unwrap();
        assert_eq!(g1.structure.bracket_basis(1, 2), &[p("beta"), p("alpha"), p("alpha")]);
        let g5 = build_family(&FamilyId::G5, None).unwrap();
        assert!(g5.structure.bracket_basis(0, 1).iter().all(Polynomial::is_zero));
        let g4 = build_family(&FamilyId::G4, Some(Eta::Plus)).unwrap();
        assert_eq!(g4.structure.bracket_basis(0, 1), &[p("0"), p("-1"), p("2 - beta")]);
    }

    #[test]
    fn eta_rules() {
        assert_eq!(build_family(&FamilyId::G4, None).unwrap_err(), FamilyError::EtaRequired);
        assert_eq!(build_family(&FamilyId::G1, Some(Eta::Minus)).unwrap_err(), FamilyError::EtaNotAllowed);
        assert!("g8".parse::<FamilyId>().is_err());
    }

    #[test]
    fn brackets_of_basis_vectors() {
        let vars = VariableTable::standard();
        let e: [Vec3; 3] = std::array::from_fn(|i| basis_vector(&vars, i));
        let g3 = build_family(&FamilyId::G3, None).unwrap();
        assert_eq!(bracket(&g3.structure, &e[0], &e[1]), [p("0"), p("0"), p("-gamma")]);
        let g7 = build_family(&FamilyId::G7, None).unwrap();
        assert_eq!(bracket(&g7.structure, &e[1], &e[2]), [p("gamma"), p("delta"), p("delta")]);
        let x = [p("alpha"), p("beta + 1"), p("c")];
        assert!(bracket(&g7.structure, &x, &x).iter().all(Polynomial::is_zero));
    }

    #[test]
    fn antisymmetric_and_jacobi() {
        for fam in all_families() {
            assert!(fam.structure.is_antisymmetric(), "{}", fam.label());
            assert!(jacobi_residuals(&fam).iter().all(Polynomial::is_zero), "{}", fam.label());
        }
    }

    #[test]
    fn product_structure_identities() {
        let j = ProductStructure::STANDARD;
        assert!(j.is_involution());
        assert!(j.preserves(&MetricSignature::LORENTZIAN));
    }

    #[test]
    fn family_parameters() {
        let names =
            |f: &LieAlgebraFamily| f.parameters().iter().map(|&i| f.vars().name(i).to_string()).collect::<Vec<_>>();
        assert_eq!(names(&build_family(&FamilyId::G4, Some(Eta::Plus)).unwrap()), ["alpha", "beta"]);
        assert_eq!(names(&build_family(&FamilyId::G6, None).unwrap()), ["alpha", "beta", "gamma", "delta"]);
    }
}
