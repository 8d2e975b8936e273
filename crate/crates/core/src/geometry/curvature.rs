use crate::exactpoly::rational::int;
use crate::exactpoly::Polynomial;
use crate::liealgebras::{LieAlgebraFamily, MetricSignature};

use super::{connection, half, BilinearForm, ConnectionCoefficients, ConnectionKind, Matrix3, OperatorMatrix};

/// Overall sign applied to `R(X,Y) = [nabla_X, nabla_Y] - nabla_{[X,Y]}`.
///
/// The Levi-Civita Ricci data of the seven families is conventionally
/// tabulated with the opposite sign, `R(X,Y) = nabla_{[X,Y]} - [nabla_X, nabla_Y]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvatureSign {
    AsDefined,
    Opposite,
}

impl CurvatureSign {
    /// The sign under which each connection's Ricci data is reported.
    pub fn for_kind(kind: ConnectionKind) -> Self {
        match kind {
            ConnectionKind::LeviCivita => CurvatureSign::Opposite,
            ConnectionKind::Canonical | ConnectionKind::KobayashiNomizu => CurvatureSign::AsDefined,
        }
    }
}

/// `R(e_i, e_j) e_k = sum_l r[i][j][k][l] e_l`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensor {
    pub r: [[[[Polynomial; 3]; 3]; 3]; 3],
}

impl CurvatureTensor {
    pub fn is_antisymmetric(&self) -> bool {
        (0..3).all(|i| {
            (0..3).all(|j| (0..3).all(|k| (0..3).all(|l| (&self.r[i][j][k][l] + &self.r[j][i][k][l]).is_zero())))
        })
    }

    pub fn is_zero(&self) -> bool {
        self.r.iter().flatten().flatten().flatten().all(Polynomial::is_zero)
    }
}

pub fn curvature(conn: &ConnectionCoefficients, fam: &LieAlgebraFamily, sign: CurvatureSign) -> CurvatureTensor {
    let g = &conn.gamma;
    let s = &fam.structure;
    let vars = conn.vars();
    let factor = int(match sign {
        CurvatureSign::AsDefined => 1,
        CurvatureSign::Opposite => -1,
    });
    let r = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            std::array::from_fn(|k| {
                std::array::from_fn(|l| {
                    let mut acc = Polynomial::zero(vars);
                    for p in 0..3 {
                        // nabla_i nabla_j e_k - nabla_j nabla_i e_k
                        if !g[j][k][p].is_zero() && !g[i][p][l].is_zero() {
                            acc = &acc + &(&g[j][k][p] * &g[i][p][l]);
                        }
                        if !g[i][k][p].is_zero() && !g[j][p][l].is_zero() {
                            acc = &acc - &(&g[i][k][p] * &g[j][p][l]);
                        }
                    }
                    for m in 0..3 {
                        // nabla_{[e_i, e_j]} e_k
                        if !s.get(i, j, m).is_zero() && !g[m][k][l].is_zero() {
                            acc = &acc - &(s.get(i, j, m) * &g[m][k][l]);
                        }
                    }
                    acc.scale(&factor)
                })
            })
        })
    });
    CurvatureTensor { r }
}

/// `rho(X, Y) = -sum_m eps_m g(R(X, e_m) Y, e_m)`.
pub fn ricci_form(curv: &CurvatureTensor, metric: &MetricSignature) -> BilinearForm {
    let vars = curv.r[0][0][0][0].vars();
    BilinearForm(Matrix3::from_fn(|a, b| {
        let mut acc = Polynomial::zero(vars);
        for m in 0..3 {
            let eps = metric.eps(m);
            acc = &acc - &curv.r[a][m][b][m].scale(&int(eps * eps));
        }
        acc
    }))
}

/// `(form(X,Y) + form(Y,X)) / 2`.
pub fn symmetrize(form: &BilinearForm) -> BilinearForm {
    BilinearForm(form.0.zip(&form.0.transpose(), |a, b| (a + b).scale(&half())))
}

/// The operator `A` with `g(A e_i, e_j) = form(e_i, e_j)`, in row form.
pub fn ricci_operator(form: &BilinearForm, metric: &MetricSignature) -> OperatorMatrix {
    OperatorMatrix(Matrix3::from_fn(|i, j| form.0.get(i, j).scale(&int(metric.eps(j)))))
}

/// `sum_i eps_i form(e_i, e_i)`.
pub fn scalar_curvature(form: &BilinearForm, metric: &MetricSignature) -> Polynomial {
    let vars = form.0.vars();
    (0..3).fold(Polynomial::zero(vars), |acc, i| &acc + &form.0.get(i, i).scale(&int(metric.eps(i))))
}

/// `S = form - s * lambda0 * g`.
pub fn schouten_form(
    form: &BilinearForm,
    s: &Polynomial,
    lambda0: &Polynomial,
    metric: &MetricSignature,
) -> BilinearForm {
    let shift = s * lambda0;
    BilinearForm(Matrix3::from_fn(|i, j| {
        if i == j {
            form.0.get(i, j) - &shift.scale(&int(metric.eps(i)))
        } else {
            form.0.get(i, j).clone()
        }
    }))
}

/// Curvature data of one family under one connection.
#[derive(Debug, Clone)]
pub struct RicciData {
    pub kind: ConnectionKind,
    pub connection: ConnectionCoefficients,
    pub curvature: CurvatureTensor,
    /// The Ricci form as computed from the curvature.
    pub raw_form: BilinearForm,
    /// The form the operator is built from: raw for Levi-Civita, symmetrized otherwise.
    pub form: BilinearForm,
    pub operator: OperatorMatrix,
    pub scalar: Polynomial,
}

pub fn curvature_operator_pipeline(fam: &LieAlgebraFamily, kind: ConnectionKind) -> RicciData {
    let conn = connection(fam, kind);
    let curv = curvature(&conn, fam, CurvatureSign::for_kind(kind));
    let raw_form = ricci_form(&curv, &fam.metric);
    let form = match kind {
        ConnectionKind::LeviCivita => raw_form.clone(),
        ConnectionKind::Canonical | ConnectionKind::KobayashiNomizu => symmetrize(&raw_form),
    };
    let operator = ricci_operator(&form, &fam.metric);
    let scalar = scalar_curvature(&form, &fam.metric);
    RicciData { kind, connection: conn, curvature: curv, raw_form, form, operator, scalar }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::{parse_polynomial, VariableTable};
    use crate::liealgebras::{all_families, build_family, parse_custom_algebra, FamilyId};

    fn p(s: &str) -> Polynomial {
        parse_polynomial(s, &VariableTable::standard()).unwrap()
    }

    #[test]
    fn curvature_is_antisymmetric_everywhere() {
        for fam in all_families() {
            for kind in ConnectionKind::ALL {
                let data = curvature_operator_pipeline(&fam, kind);
                assert!(data.curvature.is_antisymmetric(), "{} {kind}", fam.label());
            }
        }
    }

    #[test]
    fn levi_civita_ricci_is_symmetric() {
        for fam in all_families() {
            let data = curvature_operator_pipeline(&fam, ConnectionKind::LeviCivita);
            assert!(data.raw_form.0.is_symmetric(), "{}", fam.label());
        }
    }

    #[test]
    fn abelian_is_flat() {
        let fam = parse_custom_algebra("bracket.12 = 0,0,0\nbracket.13 = 0,0,0\nbracket.23 = 0,0,0", "a").unwrap();
        for kind in ConnectionKind::ALL {
            let data = curvature_operator_pipeline(&fam, kind);
            assert!(data.curvature.is_zero());
            assert!(data.operator.0.is_zero());
            assert!(data.scalar.is_zero());
        }
    }

    #[test]
    fn known_scalars() {
        let s = |id, kind| curvature_operator_pipeline(&build_family(&id, None).unwrap(), kind).scalar;
        assert_eq!(s(FamilyId::G1, ConnectionKind::LeviCivita), p("3/2*beta^2"));
        assert_eq!(s(FamilyId::G7, ConnectionKind::LeviCivita), p("-1/2*gamma^2"));
        assert_eq!(s(FamilyId::G3, ConnectionKind::Canonical), p("-gamma*(alpha + beta - gamma)"));
        assert_eq!(s(FamilyId::G1, ConnectionKind::Canonical), p("-2*(alpha^2 + 1/2*beta^2)"));
    }

    #[test]
    fn symmetrize_properties() {
        let a = BilinearForm(Matrix3::from_fn(|i, j| p(&format!("{}*alpha", i as i64 - j as i64))));
        assert!(symmetrize(&a).0.is_zero());
        let s = BilinearForm(Matrix3::from_fn(|i, j| p(&format!("{}*beta", i + j))));
        assert_eq!(symmetrize(&s), s);
        assert_eq!(symmetrize(&symmetrize(&a)), symmetrize(&a));
    }

    #[test]
    fn schouten_shift() {
        let fam = build_family(&FamilyId::G2, None).unwrap();
        let data = curvature_operator_pipeline(&fam, ConnectionKind::LeviCivita);
        let zero = Polynomial::zero(fam.vars());
        assert_eq!(schouten_form(&data.form, &data.scalar, &zero, &fam.metric), data.form);
        let quarter = p("1/4");
        let classical = schouten_form(&data.form, &data.scalar, &quarter, &fam.metric);
        for i in 0..3 {
            let expected = data.form.0.get(i, i) - &(&data.scalar * &quarter).scale(&int(fam.metric.eps(i)));
            assert_eq!(classical.0.get(i, i), &expected);
        }
    }
}
