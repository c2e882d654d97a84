use std::sync::Arc;

use curvscan_core::catalog::{self, Params, NAMES};
use curvscan_core::identities::{check_identities, pair_symmetry_defect, scalar_commutator_defect};
use curvscan_core::probe::{fresh_test_functions, test_torsion, torsional_bundle, Ansatz};
use curvscan_core::symbolic::Expr;
use curvscan_core::{christoffel, connection_with_torsion, CurvatureBundle};

#[test]
fn torsion_free_identities_on_catalog() {
    for name in NAMES {
        let e = catalog::get(name, &Params::new()).unwrap();
        let b = CurvatureBundle::new(e.metric.clone(), 1).unwrap();
        let rep = check_identities(&b).unwrap();
        assert!(!rep.torsional);
        assert!(rep.all_pass(), "{name}: {rep:?}");
        assert!(pair_symmetry_defect(&b).unwrap().is_zero().unwrap(), "{name}");
    }
}

fn torsional_cases() -> Vec<(String, Arc<curvscan_core::Metric>, Ansatz)> {
    let mut out = Vec::new();
    for name in ["minkowski", "pp_wave_vacuum"] {
        let g = catalog::get(name, &Params::new()).unwrap().metric;
        for a in [Ansatz::Gradient, Ansatz::LeviCivita] {
            out.push((name.to_string(), g.clone(), a));
        }
    }
    out
}

#[test]
fn torsional_identities() {
    for (name, g, a) in torsional_cases() {
        let tests = fresh_test_functions(&[&g], a.test_function_count(g.dim())).unwrap();
        let b = torsional_bundle(&g, a, &tests, 0).unwrap();
        let rep = check_identities(&b).unwrap();
        assert!(rep.torsional);
        assert!(rep.all_pass(), "{name} {a:?}: {rep:?}");
        let coords = g.chart().coords();
        let phi = Expr::function("phi", &[coords[0].as_str(), coords[2].as_str()]).unwrap();
        assert!(scalar_commutator_defect(&b, &phi).unwrap().is_zero().unwrap(), "{name} {a:?}");
    }
}

#[test]
fn connection_reproduces_its_torsion() {
    for (name, g, a) in torsional_cases() {
        let tests = fresh_test_functions(&[&g], a.test_function_count(g.dim())).unwrap();
        let tau = test_torsion(&g, a, &tests).unwrap();
        let conn = connection_with_torsion(&g, &tau).unwrap();
        let back = conn.torsion();
        assert!(back.to_tensor().equals(&tau.to_tensor()).unwrap(), "{name} {a:?}");
    }
}

#[test]
fn totally_antisymmetric_torsion_keeps_christoffel_symmetric_part() {
    for name in ["minkowski", "pp_wave_vacuum"] {
        let g = catalog::get(name, &Params::new()).unwrap().metric;
        let tests = fresh_test_functions(&[&g], Ansatz::LeviCivita.test_function_count(4)).unwrap();
        let tau = test_torsion(&g, Ansatz::LeviCivita, &tests).unwrap();
        let conn = connection_with_torsion(&g, &tau).unwrap();
        let lc = christoffel(&g);
        for (s, c) in conn.symmetric_part().iter().zip(lc.coefficients()) {
            assert!((s - c).is_zero_checked().unwrap(), "{name}");
        }
    }
}

#[test]
fn gradient_torsion_changes_symmetric_part() {
    let g = catalog::get("minkowski", &Params::new()).unwrap().metric;
    let tests = fresh_test_functions(&[&g], 1).unwrap();
    let tau = test_torsion(&g, Ansatz::Gradient, &tests).unwrap();
    let conn = connection_with_torsion(&g, &tau).unwrap();
    assert!(conn.symmetric_part().iter().any(|e| !e.is_zero()));
}
