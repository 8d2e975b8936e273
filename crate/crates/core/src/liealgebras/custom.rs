//! Custom bracket tables from a flat `key = value` document.
//!
//! ```text
//! # lines starting with '#' are comments
//! name = heisenberg
//! variables = t            # optional extra parameter names
//! bracket.12 = 0, 0, t
//! bracket.13 = 0, 0, 0
//! bracket.23 = 0, 0, 0
//! constraints = ...        # optional, ';'-separated expressions that vanish
//! nonvanishing = t         # optional, ';'-separated expressions that do not
//! ```
//!
//! Expressions use the polynomial grammar over the standard variables plus
//! any names listed under `variables`.

use std::collections::BTreeMap;

use crate::exactpoly::{parse_polynomial, Polynomial, VariableTable};

use super::{FamilyError, FamilyId, LieAlgebraFamily, MetricSignature, StructureConstants, Vec3};

const KEYS: [&str; 7] = ["name", "variables", "bracket.12", "bracket.13", "bracket.23", "constraints", "nonvanishing"];

pub fn parse_custom_algebra(text: &str, default_name: &str) -> Result<LieAlgebraFamily, FamilyError> {
    let mut entries: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| FamilyError::Parse { line, message: format!("expected `key = value`, got `{content}`") })?;
        let key = key.trim();
        let Some(key) = KEYS.iter().find(|k| **k == key) else {
            return Err(FamilyError::Parse { line, message: format!("unknown key `{key}`") });
        };
        if entries.insert(key, (line, value.trim())).is_some() {
            return Err(FamilyError::Parse { line, message: format!("duplicate key `{key}`") });
        }
    }

    let extra: Vec<String> = entries
        .get("variables")
        .map(|(_, v)| v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect())
        .unwrap_or_default();
    let vars = if extra.is_empty() {
        VariableTable::standard()
    } else {
        VariableTable::standard()
            .extended(extra)
            .map_err(|e| FamilyError::Parse { line: entries["variables"].0, message: e.to_string() })?
    };

    let parse_at = |line: usize, s: &str| {
        parse_polynomial(s.trim(), &vars).map_err(|e| FamilyError::Parse { line, message: e.to_string() })
    };

    let mut rows: Vec<Vec3> = Vec::new();
    for key in ["bracket.12", "bracket.13", "bracket.23"] {
        let (line, value) =
            *entries.get(key).ok_or_else(|| FamilyError::Parse { line: 0, message: format!("missing `{key}`") })?;
        let parts: Vec<&str> = value.split(',').collect();
        if parts.len() != 3 {
            return Err(FamilyError::Parse {
                line,
                message: format!("`{key}` needs three comma-separated components, got {}", parts.len()),
            });
        }
        let row = [parse_at(line, parts[0])?, parse_at(line, parts[1])?, parse_at(line, parts[2])?];
        rows.push(row);
    }

    let list = |key: &str| -> Result<Vec<Polynomial>, FamilyError> {
        match entries.get(key) {
            None => Ok(Vec::new()),
            Some(&(line, value)) => {
                value.split(';').map(str::trim).filter(|s| !s.is_empty()).map(|s| parse_at(line, s)).collect()
            }
        }
    };

    let name = entries.get("name").map_or(default_name, |(_, v)| v).to_string();
    let [b12, b13, b23]: [Vec3; 3] = rows.try_into().expect("three rows");
    Ok(LieAlgebraFamily {
        id: FamilyId::Custom(name),
        eta: None,
        structure: StructureConstants::from_brackets(b12, b13, b23),
        metric: MetricSignature::LORENTZIAN,
        constraints: list("constraints")?,
        nonvanishing: list("nonvanishing")?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealgebras::jacobi_residuals;

    #[test]
    fn abelian_table() {
        let text = "# abelian\nbracket.12 = 0, 0, 0\nbracket.13 = 0,0,0\nbracket.23 = 0, 0, 0\n";
        let fam = parse_custom_algebra(text, "abelian").unwrap();
        assert_eq!(fam.id, FamilyId::Custom("abelian".into()));
        assert!(fam.structure.is_abelian());
        assert!(jacobi_residuals(&fam).iter().all(Polynomial::is_zero));
    }

    #[test]
    fn extra_variables_and_lists() {
        let text = "name = h\nvariables = t, u\nbracket.12 = 0, 0, t\nbracket.13 = 0, 0, 0\n\
                    bracket.23 = 0, 0, 0\nconstraints = t*u\nnonvanishing = t; u + 1\n";
        let fam = parse_custom_algebra(text, "x").unwrap();
        assert_eq!(fam.id, FamilyId::Custom("h".into()));
        assert_eq!(fam.vars().len(), 9);
        assert_eq!(fam.constraints.len(), 1);
        assert_eq!(fam.nonvanishing.len(), 2);
    }

    #[test]
    fn errors_name_lines() {
        let bad = "bracket.12 = 0, 0\nbracket.13 = 0,0,0\nbracket.23 = 0,0,0";
        assert!(matches!(parse_custom_algebra(bad, "x"), Err(FamilyError::Parse { line: 1, .. })));
        let unknown = "bracket.12 = 0, 0, e\nbracket.13 = 0,0,0\nbracket.23 = 0,0,0";
        assert!(matches!(parse_custom_algebra(unknown, "x"), Err(FamilyError::Parse { line: 1, .. })));
        let missing = "bracket.12 = 0, 0, 0";
        assert!(parse_custom_algebra(missing, "x").is_err());
        assert!(parse_custom_algebra("colour = red", "x").is_err());
    }
}
