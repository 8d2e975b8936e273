//! Connections on a metric Lie algebra and their curvature.
//!
//! Vectors are coordinate triples in the basis `e1, e2, e3`. Operators are
//! stored in row form: row `i` holds the coordinates of the image of `e_i`.

mod connection;
mod curvature;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::exactpoly::rational::{int, ratio};
use crate::exactpoly::{Polynomial, VariableTable};
use crate::liealgebras::{MetricSignature, Vec3};

pub use connection::{
    canonical_connection, connection, kobayashi_nomizu, levi_civita, metric_compatibility_residual, nabla_j, torsion,
};
pub use curvature::{
    curvature, curvature_operator_pipeline, ricci_form, ricci_operator, scalar_curvature, schouten_form, symmetrize,
    CurvatureSign, CurvatureTensor, RicciData,
};

pub type Array3 = [[[Polynomial; 3]; 3]; 3];

pub(crate) fn zero_array(vars: &Arc<VariableTable>) -> Array3 {
    std::array::from_fn(|_| std::array::from_fn(|_| std::array::from_fn(|_| Polynomial::zero(vars))))
}

pub(crate) fn array_is_zero(a: &Array3) -> bool {
    a.iter().flatten().flatten().all(Polynomial::is_zero)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConnectionKind {
    LeviCivita,
    Canonical,
    KobayashiNomizu,
}

impl ConnectionKind {
    pub const ALL: [ConnectionKind; 3] =
        [ConnectionKind::LeviCivita, ConnectionKind::Canonical, ConnectionKind::KobayashiNomizu];

    pub fn short_name(self) -> &'static str {
        match self {
            ConnectionKind::LeviCivita => "lc",
            ConnectionKind::Canonical => "canonical",
            ConnectionKind::KobayashiNomizu => "kn",
        }
    }
}

impl fmt::Display for ConnectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for ConnectionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lc" | "levi-civita" | "levi_civita" => Ok(ConnectionKind::LeviCivita),
            "canonical" | "0" => Ok(ConnectionKind::Canonical),
            "kn" | "kobayashi-nomizu" | "kobayashi_nomizu" | "1" => Ok(ConnectionKind::KobayashiNomizu),
            other => Err(format!("unknown connection kind `{other}` (expected lc, canonical or kn)")),
        }
    }
}

/// `nabla_{e_i} e_j = sum_k gamma[i][j][k] e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionCoefficients {
    pub kind: ConnectionKind,
    pub gamma: Array3,
}

impl ConnectionCoefficients {
    pub fn vars(&self) -> &Arc<VariableTable> {
        self.gamma[0][0][0].vars()
    }

    /// `nabla_x y` for constant coordinate vectors.
    pub fn apply(&self, x: &Vec3, y: &Vec3) -> Vec3 {
        let vars = self.vars();
        std::array::from_fn(|k| {
            let mut acc = Polynomial::zero(vars);
            for i in 0..3 {
                if x[i].is_zero() {
                    continue;
                }
                for j in 0..3 {
                    if y[j].is_zero() || self.gamma[i][j][k].is_zero() {
                        continue;
                    }
                    acc = &acc + &(&(&x[i] * &y[j]) * &self.gamma[i][j][k]);
                }
            }
            acc
        })
    }

    pub fn is_zero(&self) -> bool {
        array_is_zero(&self.gamma)
    }
}

/// A 3x3 polynomial matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix3(pub [[Polynomial; 3]; 3]);

impl Matrix3 {
    pub fn zero(vars: &Arc<VariableTable>) -> Self {
        Matrix3(std::array::from_fn(|_| std::array::from_fn(|_| Polynomial::zero(vars))))
    }

    pub fn identity(vars: &Arc<VariableTable>) -> Self {
        Self::diagonal(vars, [1, 1, 1])
    }

    pub fn diagonal(vars: &Arc<VariableTable>, d: [i64; 3]) -> Self {
        Matrix3(std::array::from_fn(|i| {
            std::array::from_fn(|j| if i == j { Polynomial::integer(vars, d[i]) } else { Polynomial::zero(vars) })
        }))
    }

    pub fn from_fn(f: impl Fn(usize, usize) -> Polynomial) -> Self {
        Matrix3(std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))))
    }

    pub fn vars(&self) -> &Arc<VariableTable> {
        self.0[0][0].vars()
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.0[i][j]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].clone())
    }

    pub fn map(&self, f: impl Fn(&Polynomial) -> Polynomial) -> Self {
        Self::from_fn(|i, j| f(&self.0[i][j]))
    }

    pub fn zip(&self, other: &Matrix3, f: impl Fn(&Polynomial, &Polynomial) -> Polynomial) -> Self {
        Self::from_fn(|i, j| f(&self.0[i][j], &other.0[i][j]))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().flatten().all(Polynomial::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..3).all(|i| (0..3).all(|j| self.0[i][j] == self.0[j][i]))
    }

    /// Row-convention composition: `(self then other)`, i.e. the matrix of
    /// `v -> other(self(v))`.
    pub fn then(&self, other: &Matrix3) -> Self {
        let vars = self.vars();
        Self::from_fn(|i, k| {
            let mut acc = Polynomial::zero(vars);
            for j in 0..3 {
                acc = &acc + &(&self.0[i][j] * &other.0[j][k]);
            }
            acc
        })
    }

    pub fn rows_as_strings(&self) -> [[String; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.0[i][j].to_string()))
    }
}

impl fmt::Display for Matrix3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells = self.rows_as_strings();
        let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
        for row in &cells {
            let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            writeln!(f, "[ {} ]", line.join("  "))?;
        }
        Ok(())
    }
}

/// A linear map in row form: row `i` is the image of `e_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix(pub Matrix3);

impl OperatorMatrix {
    pub fn apply(&self, v: &Vec3) -> Vec3 {
        let vars = self.0.vars();
        std::array::from_fn(|j| {
            let mut acc = Polynomial::zero(vars);
            for i in 0..3 {
                if !v[i].is_zero() {
                    acc = &acc + &(&v[i] * &self.0 .0[i][j]);
                }
            }
            acc
        })
    }

    /// `g(op(e_i), e_j)`, the bilinear form this operator represents.
    pub fn lower(&self, metric: &MetricSignature) -> BilinearForm {
        BilinearForm(self.0.map_indexed(|_, j, p| p.scale(&int(metric.eps(j)))))
    }

    pub fn trace(&self) -> Polynomial {
        &(&self.0 .0[0][0] + &self.0 .0[1][1]) + &self.0 .0[2][2]
    }
}

/// A bilinear form given by its values `form(e_i, e_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearForm(pub Matrix3);

impl BilinearForm {
    pub fn metric(vars: &Arc<VariableTable>, metric: &MetricSignature) -> Self {
        BilinearForm(Matrix3::diagonal(vars, metric.0))
    }
}

impl Matrix3 {
    fn map_indexed(&self, f: impl Fn(usize, usize, &Polynomial) -> Polynomial) -> Self {
        Self::from_fn(|i, j| f(i, j, &self.0[i][j]))
    }
}

pub(crate) fn half() -> crate::exactpoly::Rational {
    ratio(1, 2)
}
