//! Transcribed Ricci operators, scalar curvatures and classification cases,
//! with a driver that checks all of them.

mod report;

use std::sync::Arc;

use thiserror::Error;

use crate::exactpoly::{parse_polynomial, Polynomial, VariableTable};
use crate::geometry::{ConnectionKind, Matrix3};
use crate::liealgebras::{Eta, FamilyId};
use crate::soliton::{CClaim, TheoremCase};

pub use report::{
    check_matrix, check_scalar, verify_all, verify_catalog, Category, Record, Status, Summary, VerifyOptions,
    VerifyReport,
};

const CATALOG: &str = include_str!("../../data/catalog.txt");

#[derive(Debug, Clone, PartialEq, Error)]
#[error("catalog entry `{label}` (line {line}): {message}")]
pub struct CatalogError {
    pub label: String,
    pub line: usize,
    pub message: String,
}

/// Which `g4` branches a fixture covers. Other families have no branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branches {
    NotApplicable,
    Both,
    One(Eta),
}

impl Branches {
    pub fn etas(self) -> Vec<Option<Eta>> {
        match self {
            Branches::NotApplicable => vec![None],
            Branches::Both => Eta::BOTH.iter().copied().map(Some).collect(),
            Branches::One(eta) => vec![Some(eta)],
        }
    }
}

#[derive(Debug, Clone)]
pub struct MatrixFixture {
    pub label: String,
    pub family: FamilyId,
    pub kind: ConnectionKind,
    pub branches: Branches,
    /// Auxiliary definitions as written.
    pub aux: Vec<(String, String)>,
    pub rows: [[String; 3]; 3],
    /// Entries over the standard table with auxiliaries expanded. `eta` is
    /// still a variable.
    pub entries: Matrix3,
}

impl MatrixFixture {
    /// Entries on one branch.
    pub fn on_branch(&self, eta: Option<Eta>) -> Matrix3 {
        self.entries.map(|p| on_branch(p, eta))
    }
}

#[derive(Debug, Clone)]
pub struct ScalarFixture {
    pub label: String,
    pub family: FamilyId,
    pub kind: ConnectionKind,
    pub branches: Branches,
    pub text: String,
    pub value: Polynomial,
}

impl ScalarFixture {
    pub fn on_branch(&self, eta: Option<Eta>) -> Polynomial {
        on_branch(&self.value, eta)
    }
}

fn on_branch(p: &Polynomial, eta: Option<Eta>) -> Polynomial {
    match eta {
        Some(eta) => {
            p.substitute_var("eta", &Polynomial::integer(p.vars(), eta.value())).expect("standard table has eta")
        }
        None => p.clone(),
    }
}

#[derive(Debug, Clone)]
pub struct Catalog {
    pub matrices: Vec<MatrixFixture>,
    pub scalars: Vec<ScalarFixture>,
    /// Cases in file order; `g4` cases covering both branches appear once per branch.
    pub cases: Vec<TheoremCase>,
}

impl Catalog {
    pub fn matrix(&self, label: &str) -> Option<&MatrixFixture> {
        self.matrices.iter().find(|m| m.label == label)
    }

    pub fn scalar(&self, label: &str) -> Option<&ScalarFixture> {
        self.scalars.iter().find(|s| s.label == label)
    }

    /// Matrix fixtures for one family and connection.
    pub fn matrices_for(&self, family: &FamilyId, kind: ConnectionKind) -> Vec<&MatrixFixture> {
        self.matrices.iter().filter(|m| &m.family == family && m.kind == kind).collect()
    }

    pub fn scalars_for(&self, family: &FamilyId, kind: ConnectionKind) -> Vec<&ScalarFixture> {
        self.scalars.iter().filter(|s| &s.family == family && s.kind == kind).collect()
    }

    /// Theorem labels in file order, without repetition.
    pub fn theorems(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for c in &self.cases {
            if !out.contains(&c.theorem) {
                out.push(c.theorem.clone());
            }
        }
        out
    }
}

/// The built-in catalog.
pub fn load_catalog() -> Result<Catalog, CatalogError> {
    parse_catalog(CATALOG)
}

/// Raw text of the built-in catalog.
pub fn catalog_source() -> &'static str {
    CATALOG
}

/// Extended table, auxiliaries as written, auxiliaries expanded.
type AuxTable = (Arc<VariableTable>, Vec<(String, String)>, Vec<(usize, Polynomial)>);

struct Section {
    header: String,
    label: String,
    line: usize,
    entries: Vec<(String, String, usize)>,
}

impl Section {
    fn error(&self, line: usize, message: impl Into<String>) -> CatalogError {
        CatalogError { label: self.label.clone(), line, message: message.into() }
    }

    fn get(&self, key: &str) -> Option<(&str, usize)> {
        self.entries.iter().find(|(k, _, _)| k == key).map(|(_, v, l)| (v.as_str(), *l))
    }

    fn require(&self, key: &str) -> Result<(&str, usize), CatalogError> {
        self.get(key).ok_or_else(|| self.error(self.line, format!("missing `{key}`")))
    }

    fn family(&self) -> Result<FamilyId, CatalogError> {
        let (v, line) = self.require("family")?;
        v.parse().map_err(|e: crate::liealgebras::FamilyError| self.error(line, e.to_string()))
    }

    fn kind(&self) -> Result<ConnectionKind, CatalogError> {
        let (v, line) = self.require("kind")?;
        v.parse().map_err(|e: String| self.error(line, e))
    }

    fn branches(&self, family: &FamilyId) -> Result<Branches, CatalogError> {
        let Some((v, line)) = self.get("eta") else {
            return if family.needs_eta() {
                Err(self.error(self.line, "`eta` is required for g4"))
            } else {
                Ok(Branches::NotApplicable)
            };
        };
        if !family.needs_eta() {
            return Err(self.error(line, format!("`eta` given for {family}")));
        }
        match v {
            "both" => Ok(Branches::Both),
            _ => v
                .parse::<i64>()
                .ok()
                .and_then(Eta::from_value)
                .map(Branches::One)
                .ok_or_else(|| self.error(line, format!("eta must be 1, -1 or both, got `{v}`"))),
        }
    }

    /// The table extended by the `aux.*` names, and the expanded auxiliaries.
    fn aux(&self) -> Result<AuxTable, CatalogError> {
        let aux: Vec<(String, String, usize)> = self
            .entries
            .iter()
            .filter_map(|(k, v, l)| k.strip_prefix("aux.").map(|n| (n.to_string(), v.clone(), *l)))
            .collect();
        let table = VariableTable::standard()
            .extended(aux.iter().map(|(n, _, _)| n.clone()))
            .map_err(|e| self.error(self.line, e.to_string()))?;
        let mut expanded: Vec<(usize, Polynomial)> = Vec::new();
        for (name, text, line) in &aux {
            let mut p = self.parse(text, &table, *line)?;
            for (i, q) in &expanded {
                p = p.substitute(*i, q).expect("same table");
            }
            let index = table.index_of(name).expect("extended above");
            if p.degree_in(index) > 0 {
                return Err(self.error(*line, format!("`{name}` refers to itself")));
            }
            expanded.push((index, p));
        }
        let raw = aux.into_iter().map(|(n, v, _)| (n, v)).collect();
        Ok((table, raw, expanded))
    }

    fn parse(&self, text: &str, table: &Arc<VariableTable>, line: usize) -> Result<Polynomial, CatalogError> {
        parse_polynomial(text, table).map_err(|e| self.error(line, format!("`{text}`: {e}")))
    }

    /// Parses with auxiliaries expanded, then moves to the standard table.
    fn parse_expanded(
        &self,
        text: &str,
        table: &Arc<VariableTable>,
        aux: &[(usize, Polynomial)],
        line: usize,
    ) -> Result<Polynomial, CatalogError> {
        let mut p = self.parse(text, table, line)?;
        for (i, q) in aux {
            p = p.substitute(*i, q).expect("same table");
        }
        p.retable(&VariableTable::standard()).map_err(|e| self.error(line, format!("auxiliary left unexpanded: {e}")))
    }

    fn list(&self, key: &str) -> Result<Vec<Polynomial>, CatalogError> {
        let Some((v, line)) = self.get(key) else {
            return Ok(Vec::new());
        };
        let table = VariableTable::standard();
        v.split(';').map(str::trim).filter(|s| !s.is_empty()).map(|s| self.parse(s, &table, line)).collect()
    }
}

fn split_sections(text: &str) -> Result<Vec<Section>, CatalogError> {
    let mut sections: Vec<Section> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(inner) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let mut parts = inner.split_whitespace();
            let (Some(header), Some(label), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(CatalogError {
                    label: inner.to_string(),
                    line,
                    message: "expected `[matrix|scalar|case <label>]`".to_string(),
                });
            };
            if sections.iter().any(|s| s.header == header && s.label == label) {
                return Err(CatalogError {
                    label: label.to_string(),
                    line,
                    message: format!("duplicate {header} section"),
                });
            }
            sections.push(Section { header: header.to_string(), label: label.to_string(), line, entries: Vec::new() });
            continue;
        }
        let Some(section) = sections.last_mut() else {
            return Err(CatalogError { label: String::new(), line, message: "entry outside a section".to_string() });
        };
        let Some((key, value)) = content.split_once('=') else {
            return Err(section.error(line, format!("expected `key = value`, got `{content}`")));
        };
        let key = key.trim().to_string();
        if section.entries.iter().any(|(k, _, _)| *k == key) {
            return Err(section.error(line, format!("duplicate key `{key}`")));
        }
        section.entries.push((key, value.trim().to_string(), line));
    }
    Ok(sections)
}

fn parse_matrix(s: &Section) -> Result<MatrixFixture, CatalogError> {
    let family = s.family()?;
    let kind = s.kind()?;
    let branches = s.branches(&family)?;
    let (table, aux, expanded) = s.aux()?;
    let mut rows: [[String; 3]; 3] = Default::default();
    let mut entries: Vec<Vec<Polynomial>> = Vec::new();
    for (i, row) in rows.iter_mut().enumerate() {
        let (text, line) = s.require(&format!("row{}", i + 1))?;
        let cells: Vec<&str> = text.split(',').map(str::trim).collect();
        if cells.len() != 3 {
            return Err(s.error(line, format!("row{} needs 3 entries, found {}", i + 1, cells.len())));
        }
        let mut parsed = Vec::new();
        for (j, cell) in cells.iter().enumerate() {
            row[j] = cell.to_string();
            parsed.push(s.parse_expanded(cell, &table, &expanded, line)?);
        }
        entries.push(parsed);
    }
    Ok(MatrixFixture {
        label: s.label.clone(),
        family,
        kind,
        branches,
        aux,
        rows,
        entries: Matrix3::from_fn(|i, j| entries[i][j].clone()),
    })
}

fn parse_scalar(s: &Section) -> Result<ScalarFixture, CatalogError> {
    let family = s.family()?;
    let kind = s.kind()?;
    let branches = s.branches(&family)?;
    let (table, _, expanded) = s.aux()?;
    let (text, line) = s.require("s")?;
    Ok(ScalarFixture {
        label: s.label.clone(),
        family,
        kind,
        branches,
        text: text.to_string(),
        value: s.parse_expanded(text, &table, &expanded, line)?,
    })
}

/// `3.3.ii` → (`3.3`, `ii`), `4.8` → (`4.8`, ``).
fn split_case_label(label: &str) -> (String, String) {
    let mut dots = label.match_indices('.').map(|(i, _)| i);
    match (dots.next(), dots.next()) {
        (Some(_), Some(second)) => (label[..second].to_string(), label[second + 1..].to_string()),
        _ => match label.find('-') {
            Some(dash) => (label[..dash].to_string(), label[dash..].to_string()),
            None => (label.to_string(), String::new()),
        },
    }
}

fn parse_case(s: &Section) -> Result<Vec<TheoremCase>, CatalogError> {
    let family = s.family()?;
    let kind = s.kind()?;
    let branches = s.branches(&family)?;
    let table = VariableTable::standard();
    let mut substitutions = Vec::new();
    if let Some((text, line)) = s.get("substitute") {
        for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let Some((var, expr)) = part.split_once('=') else {
                return Err(s.error(line, format!("expected `var = expression`, got `{part}`")));
            };
            let var = var.trim();
            if table.index_of(var).is_none() {
                return Err(s.error(line, format!("unknown variable `{var}`")));
            }
            substitutions.push((var.to_string(), s.parse(expr.trim(), &table, line)?));
        }
    }
    let (c_text, c_line) = s.require("c")?;
    let (c, no_solutions) = match c_text {
        "any" => (CClaim::Any, false),
        "nonzero" => (CClaim::Nonzero, false),
        "none" => (CClaim::Any, true),
        text => (CClaim::Expr(s.parse(text, &table, c_line)?), false),
    };
    let (theorem, case) = split_case_label(&s.label);
    let base = TheoremCase {
        theorem,
        case,
        family,
        eta: None,
        kind,
        substitutions,
        side_relations: s.list("side")?,
        nonvanishing: s.list("nonvanishing")?,
        c,
        no_solutions,
        suspect: s.get("suspect").map(|(v, _)| v.to_string()),
        variant_of: s.get("variant_of").map(|(v, _)| v.to_string()),
    };
    Ok(branches.etas().into_iter().map(|eta| TheoremCase { eta, ..base.clone() }).collect())
}

pub fn parse_catalog(text: &str) -> Result<Catalog, CatalogError> {
    let mut catalog = Catalog { matrices: Vec::new(), scalars: Vec::new(), cases: Vec::new() };
    for s in split_sections(text)? {
        const KEYS: [&str; 3] = ["family", "kind", "eta"];
        let allowed = |k: &str| -> bool {
            KEYS.contains(&k)
                || match s.header.as_str() {
                    "matrix" => k.starts_with("aux.") || ["row1", "row2", "row3"].contains(&k),
                    "scalar" => k.starts_with("aux.") || k == "s",
                    "case" => ["substitute", "side", "nonvanishing", "c", "suspect", "variant_of"].contains(&k),
                    _ => false,
                }
        };
        if let Some((k, _, line)) = s.entries.iter().find(|(k, _, _)| !allowed(k)) {
            return Err(s.error(*line, format!("unknown key `{k}` in {} section", s.header)));
        }
        match s.header.as_str() {
            "matrix" => catalog.matrices.push(parse_matrix(&s)?),
            "scalar" => catalog.scalars.push(parse_scalar(&s)?),
            "case" => catalog.cases.extend(parse_case(&s)?),
            other => return Err(s.error(s.line, format!("unknown section kind `{other}`"))),
        }
    }
    Ok(catalog)
}
