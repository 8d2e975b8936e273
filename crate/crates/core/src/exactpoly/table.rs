use std::fmt;
use std::sync::{Arc, OnceLock};

use super::PolyError;

/// Variable names of the standard table, in monomial-order priority.
pub const STANDARD_VARIABLES: [&str; 7] = ["alpha", "beta", "gamma", "delta", "eta", "lambda0", "c"];

/// Ordered, duplicate-free list of variable names. The position of a name
/// fixes its place in the monomial order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VariableTable {
    names: Vec<String>,
}

impl VariableTable {
    pub fn new<I, S>(names: I) -> Result<Arc<Self>, PolyError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out: Vec<String> = Vec::new();
        for name in names {
            let name = name.into();
            if !is_identifier(&name) {
                return Err(PolyError::InvalidVariableName(name));
            }
            if out.contains(&name) {
                return Err(PolyError::DuplicateVariable(name));
            }
            out.push(name);
        }
        Ok(Arc::new(Self { names: out }))
    }

    /// The shared default table `alpha, beta, gamma, delta, eta, lambda0, c`.
    pub fn standard() -> Arc<Self> {
        static STANDARD: OnceLock<Arc<VariableTable>> = OnceLock::new();
        STANDARD.get_or_init(|| VariableTable::new(STANDARD_VARIABLES).expect("standard names are valid")).clone()
    }

    /// A new table with `extra` appended after the existing names.
    pub fn extended<I, S>(&self, extra: I) -> Result<Arc<Self>, PolyError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let all = self.names.iter().cloned().chain(extra.into_iter().map(Into::into));
        Self::new(all)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn require(&self, name: &str) -> Result<usize, PolyError> {
        self.index_of(name).ok_or_else(|| PolyError::UnknownVariable(name.to_string()))
    }
}

impl fmt::Display for VariableTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.names.join(", "))
    }
}

fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
