use std::sync::Arc;

use curvscan_core::catalog::{self, Params, NAMES};
use curvscan_core::symbolic::Expr;
use curvscan_core::tensor::multi_indices;
use curvscan_core::{Chart, CoreError, Metric, Signature, Tensor, Variance};
use proptest::prelude::*;

fn chart() -> Arc<Chart> {
    Chart::new(&["x", "y", "z"]).unwrap()
}

fn entry(k: i64) -> Expr {
    match k.rem_euclid(4) {
        0 => Expr::int(k),
        1 => &Expr::int(k) * &Expr::symbol("x"),
        2 => &Expr::symbol("y") + &Expr::int(k),
        _ => Expr::zero(),
    }
}

fn tensor(slots: Vec<Variance>, seed: &[i64]) -> Tensor {
    let c = chart();
    let total = 3usize.pow(slots.len() as u32);
    let comps = (0..total).map(|i| entry(seed[i % seed.len()] + i as i64)).collect();
    Tensor::from_components(c, slots, comps).unwrap()
}

fn metric() -> Metric {
    let x = Expr::symbol("x");
    let rows = vec![
        vec![&Expr::int(1) + &x.pow(2), Expr::symbol("y"), Expr::zero()],
        vec![Expr::symbol("y"), Expr::int(2), Expr::zero()],
        vec![Expr::zero(), Expr::zero(), -&Expr::exp(&x)],
    ];
    Metric::new(chart(), rows, Signature::new(2, 1)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn contraction_matches_brute_force(seed in proptest::collection::vec(-5i64..6, 1..30)) {
        use Variance::*;
        let t = tensor(vec![Up, Down, Down], &seed);
        let c = t.contract(0, 2).unwrap();
        for j in 0..3 {
            let mut acc = Expr::zero();
            for m in 0..3 {
                acc = &acc + t.get(&[m, j, m]);
            }
            prop_assert!((c.get(&[j]) - &acc).is_zero());
        }
    }

    #[test]
    fn product_matches_brute_force(s1 in proptest::collection::vec(-5i64..6, 1..10), s2 in proptest::collection::vec(-5i64..6, 1..10)) {
        use Variance::*;
        let a = tensor(vec![Up, Down], &s1);
        let b = tensor(vec![Down], &s2);
        let p = a.tensor_product(&b).unwrap();
        for idx in multi_indices(3, 3) {
            let want = a.get(&idx[..2]) * b.get(&idx[2..]);
            prop_assert!((p.get(&idx) - &want).is_zero());
        }
    }

    #[test]
    fn raising_then_lowering_round_trips(seed in proptest::collection::vec(-5i64..6, 1..20)) {
        use Variance::*;
        let g = metric();
        let t = tensor(vec![Down, Down], &seed);
        let back = t.raise_index(1, &g).unwrap().lower_index(1, &g).unwrap();
        prop_assert!(back.equals(&t).unwrap());
    }

    #[test]
    fn antisymmetrization_is_a_projection(seed in proptest::collection::vec(-5i64..6, 1..30)) {
        use Variance::*;
        let t = tensor(vec![Down, Down, Down], &seed);
        let a = t.antisymmetrize(&[0, 1, 2]).unwrap();
        prop_assert!(a.antisymmetrize(&[0, 1, 2]).unwrap().equals(&a).unwrap());
        let swapped = a.permute(&[1, 0, 2]).unwrap();
        prop_assert!(swapped.add(&a).unwrap().is_zero().unwrap());
    }
}

#[test]
fn metric_times_inverse_is_identity() {
    use Variance::*;
    let g = metric();
    let prod = Tensor::metric(&g).tensor_product(&Tensor::inverse_metric(&g)).unwrap();
    let mixed = prod.contract(1, 2).unwrap();
    assert_eq!(mixed.slots(), &[Down, Up]);
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { Expr::one() } else { Expr::zero() };
            assert!((mixed.get(&[i, j]) - &want).is_zero());
        }
    }
}

#[test]
fn invalid_metrics_are_rejected() {
    let c = Chart::new(&["x", "y"]).unwrap();
    let x = Expr::symbol("x");
    let asym = vec![vec![Expr::one(), x.clone()], vec![Expr::zero(), Expr::one()]];
    assert!(matches!(Metric::new(c.clone(), asym, Signature::riemannian(2)), Err(CoreError::NotSymmetric(..))));
    let degen = vec![vec![x.clone(), x.clone()], vec![x.clone(), x.clone()]];
    assert!(matches!(Metric::new(c.clone(), degen, Signature::riemannian(2)), Err(CoreError::DegenerateMetric)));
    assert!(Chart::new(&["x", "x"]).is_err());
}

#[test]
fn catalog_entries_build_with_consistent_alternates() {
    for name in NAMES {
        let e = catalog::get(name, &Params::new()).unwrap();
        assert_eq!(e.name, *name);
        assert_eq!(e.metric.dim(), e.alternate.metric.dim());
        assert_eq!(e.metric.signature(), e.alternate.metric.signature());
        let declared: std::collections::BTreeSet<String> = e.functions.iter().map(|(f, _)| f.clone()).collect();
        assert_eq!(declared, e.metric.free_functions(), "{name}");
        if e.properties.flat {
            let b = curvscan_core::CurvatureBundle::new(e.metric.clone(), 0).unwrap();
            assert!(b.riemann().is_zero().unwrap());
        }
        if e.properties.vacuum {
            let b = curvscan_core::CurvatureBundle::new(e.metric.clone(), 0).unwrap();
            assert!(b.ricci().is_zero().unwrap(), "{name}");
        }
        if e.properties.vsi {
            use curvscan_core::invariants::{evaluate_invariants, standard_invariant_set};
            let b = curvscan_core::CurvatureBundle::new(e.metric.clone(), 2).unwrap();
            let r = evaluate_invariants(&standard_invariant_set(2, e.metric.dim()), &b).unwrap();
            assert!(r.all_zero(), "{name}");
        }
        if e.properties.kundt {
            assert!(curvscan_core::kundt::kundt_form_check(&e.metric).unwrap(), "{name}");
        }
    }
}

#[test]
fn catalog_parameters_are_validated() {
    let p = |k: &str, v: &str| Params::from([(k.to_string(), v.to_string())]);
    assert!(catalog::get("nowhere", &Params::new()).is_err());
    assert!(catalog::get("minkowski", &p("n", "1")).is_err());
    assert!(catalog::get("minkowski", &p("n", "x")).is_err());
    assert!(catalog::get("minkowski", &p("colour", "red")).is_err());
    assert!(catalog::get("schwarzschild", &p("M", "1+")).is_err());
    let m5 = catalog::get("minkowski", &p("n", "5")).unwrap();
    assert_eq!(m5.metric.dim(), 5);
    let tl = catalog::get("minkowski", &p("signature", "+++-")).unwrap();
    assert_eq!(tl.metric.chart().coords().last().unwrap(), "t");
    let k3 = catalog::get("kundt_generic", &p("n", "3")).unwrap();
    assert_eq!(k3.metric.dim(), 3);
}
