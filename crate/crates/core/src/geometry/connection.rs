use crate::exactpoly::rational::{int, ratio};
use crate::liealgebras::{basis_vector, LieAlgebraFamily, ProductStructure, Vec3};

use super::{half, zero_array, Array3, ConnectionCoefficients, ConnectionKind, Matrix3, OperatorMatrix};

/// Levi-Civita connection of the left-invariant metric, from the Koszul
/// formula `2g(nabla_X Y, Z) = g([X,Y],Z) - g([Y,Z],X) + g([Z,X],Y)`.
pub fn levi_civita(fam: &LieAlgebraFamily) -> ConnectionCoefficients {
    let s = &fam.structure;
    let eps = |i: usize| int(fam.metric.eps(i));
    let mut gamma = zero_array(fam.vars());
    for (i, plane) in gamma.iter_mut().enumerate() {
        for (j, row) in plane.iter_mut().enumerate() {
            for (k, entry) in row.iter_mut().enumerate() {
                let koszul =
                    &(&s.get(i, j, k).scale(&eps(k)) - &s.get(j, k, i).scale(&eps(i))) + &s.get(k, i, j).scale(&eps(j));
                *entry = koszul.scale(&(half() * eps(k)));
            }
        }
    }
    ConnectionCoefficients { kind: ConnectionKind::LeviCivita, gamma }
}

/// The three operators `(nabla_{e_i} J) Y = nabla_{e_i}(JY) - J nabla_{e_i} Y`.
pub fn nabla_j(conn: &ConnectionCoefficients, j: &ProductStructure) -> [OperatorMatrix; 3] {
    let vars = conn.vars();
    std::array::from_fn(|i| {
        let ei = basis_vector(vars, i);
        let rows: [Vec3; 3] = std::array::from_fn(|r| {
            let er = basis_vector(vars, r);
            let a = conn.apply(&ei, &j.apply(&er));
            let b = j.apply(&conn.apply(&ei, &er));
            std::array::from_fn(|k| &a[k] - &b[k])
        });
        OperatorMatrix(Matrix3(rows))
    })
}

/// `nabla_Y J` for an arbitrary direction `Y`, by linearity in `Y`.
fn nabla_j_along(ops: &[OperatorMatrix; 3], y: &Vec3) -> OperatorMatrix {
    let vars = ops[0].0.vars();
    let mut acc = Matrix3::zero(vars);
    for (m, op) in ops.iter().enumerate() {
        if y[m].is_zero() {
            continue;
        }
        acc = acc.zip(&op.0, |a, b| a + &(&y[m] * b));
    }
    OperatorMatrix(acc)
}

/// `nabla0_X Y = nabla_X Y - 1/2 (nabla_X J) J Y`.
pub fn canonical_connection(fam: &LieAlgebraFamily) -> ConnectionCoefficients {
    let lc = levi_civita(fam);
    let j = ProductStructure::STANDARD;
    let dj = nabla_j(&lc, &j);
    let vars = fam.vars();
    let mut gamma = lc.gamma.clone();
    for (i, plane) in gamma.iter_mut().enumerate() {
        for (r, row) in plane.iter_mut().enumerate() {
            let correction = dj[i].apply(&j.apply(&basis_vector(vars, r)));
            for (k, entry) in row.iter_mut().enumerate() {
                *entry = &*entry - &correction[k].scale(&half());
            }
        }
    }
    ConnectionCoefficients { kind: ConnectionKind::Canonical, gamma }
}

/// `nabla1_X Y = nabla0_X Y - 1/4 [(nabla_Y J) J X - (nabla_{JY} J) X]`.
pub fn kobayashi_nomizu(fam: &LieAlgebraFamily) -> ConnectionCoefficients {
    let lc = levi_civita(fam);
    let j = ProductStructure::STANDARD;
    let dj = nabla_j(&lc, &j);
    let vars = fam.vars();
    let mut gamma = canonical_connection(fam).gamma;
    let quarter = ratio(1, 4);
    for (i, plane) in gamma.iter_mut().enumerate() {
        let x = basis_vector(vars, i);
        for (r, row) in plane.iter_mut().enumerate() {
            let y = basis_vector(vars, r);
            let a = dj[r].apply(&j.apply(&x));
            let b = nabla_j_along(&dj, &j.apply(&y)).apply(&x);
            for (k, entry) in row.iter_mut().enumerate() {
                *entry = &*entry - &(&a[k] - &b[k]).scale(&quarter);
            }
        }
    }
    ConnectionCoefficients { kind: ConnectionKind::KobayashiNomizu, gamma }
}

pub fn connection(fam: &LieAlgebraFamily, kind: ConnectionKind) -> ConnectionCoefficients {
    match kind {
        ConnectionKind::LeviCivita => levi_civita(fam),
        ConnectionKind::Canonical => canonical_connection(fam),
        ConnectionKind::KobayashiNomizu => kobayashi_nomizu(fam),
    }
}

/// `T(e_i, e_j) = nabla_{e_i} e_j - nabla_{e_j} e_i - [e_i, e_j]`, as `t[i][j][k]`.
pub fn torsion(conn: &ConnectionCoefficients, fam: &LieAlgebraFamily) -> Array3 {
    let g = &conn.gamma;
    std::array::from_fn(|i| {
        std::array::from_fn(|j| std::array::from_fn(|k| &(&g[i][j][k] - &g[j][i][k]) - fam.structure.get(i, j, k)))
    })
}

/// `(nabla_{e_i} g)(e_j, e_k) = -g(nabla_{e_i} e_j, e_k) - g(e_j, nabla_{e_i} e_k)`.
pub fn metric_compatibility_residual(conn: &ConnectionCoefficients, fam: &LieAlgebraFamily) -> Array3 {
    let g = &conn.gamma;
    let eps = |i: usize| int(fam.metric.eps(i));
    std::array::from_fn(|i| {
        std::array::from_fn(|j| std::array::from_fn(|k| -&(&g[i][j][k].scale(&eps(k)) + &g[i][k][j].scale(&eps(j)))))
    })
}
