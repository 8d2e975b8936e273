use schouten_core::catalog::{check_matrix, load_catalog, Status};
use schouten_core::exactpoly::Polynomial;
use schouten_core::geometry::{
    connection, curvature, curvature_operator_pipeline, metric_compatibility_residual, nabla_j, torsion, Array3,
    ConnectionKind, CurvatureSign,
};
use schouten_core::liealgebras::{all_families, jacobi_residuals, ProductStructure};

fn is_zero(a: &Array3) -> bool {
    a.iter().flatten().flatten().all(Polynomial::is_zero)
}

#[test]
fn levi_civita_is_torsion_free_and_metric() {
    for fam in all_families() {
        let lc = connection(&fam, ConnectionKind::LeviCivita);
        assert!(is_zero(&torsion(&lc, &fam)), "{}", fam.label());
        assert!(is_zero(&metric_compatibility_residual(&lc, &fam)), "{}", fam.label());
    }
}

#[test]
fn product_structure_is_parallel_for_both_corrections() {
    let j = ProductStructure::STANDARD;
    for fam in all_families() {
        for kind in [ConnectionKind::Canonical, ConnectionKind::KobayashiNomizu] {
            let conn = connection(&fam, kind);
            assert!(nabla_j(&conn, &j).iter().all(|op| op.0.is_zero()), "{} {kind}", fam.label());
        }
        let canonical = connection(&fam, ConnectionKind::Canonical);
        assert!(is_zero(&metric_compatibility_residual(&canonical, &fam)), "{}", fam.label());
    }
}

#[test]
fn curvature_is_antisymmetric_and_lc_ricci_symmetric() {
    for fam in all_families() {
        assert!(jacobi_residuals(&fam).iter().all(Polynomial::is_zero), "{}", fam.label());
        for kind in ConnectionKind::ALL {
            let conn = connection(&fam, kind);
            assert!(curvature(&conn, &fam, CurvatureSign::for_kind(kind)).is_antisymmetric());
            let data = curvature_operator_pipeline(&fam, kind);
            assert!(data.form.0.is_symmetric(), "{} {kind}", fam.label());
        }
        let lc = curvature_operator_pipeline(&fam, ConnectionKind::LeviCivita);
        assert!(lc.raw_form.0.is_symmetric(), "{}", fam.label());
    }
}

#[test]
fn every_catalogued_operator_matches() {
    let catalog = load_catalog().unwrap();
    for fixture in &catalog.matrices {
        for record in check_matrix(fixture) {
            assert_eq!(record.status, Status::Pass, "{} {}: {:?}", record.label, record.family, record.detail);
        }
    }
}
