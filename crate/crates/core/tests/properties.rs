mod common;

use proptest::prelude::*;
use wkstab_core::measures::{catalog, MeasurePair};
use wkstab_core::poly::{int, isolate_roots, rat, to_f64, PiecewisePoly, Polynomial, Rational};
use wkstab_core::stability::{
    classify, default_lambda_range, destabilizing_weight, find_threshold, insensitivity_certificate,
    pairing_along, Classification, DEFAULT_REL_TOL,
};
use wkstab_core::weights::{pair, pair_exact, pair_quadrature, ClosedFormCase, WeightSpec};

fn small_rat() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

fn poly(max_len: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(small_rat(), 0..=max_len).prop_map(Polynomial::new)
}

fn case_ids() -> impl Strategy<Value = &'static str> {
    prop::sample::select(catalog().iter().map(|c| c.dm_id).collect::<Vec<_>>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eval_respects_ring_operations(p in poly(5), q in poly(5), x in small_rat()) {
        prop_assert_eq!((&p + &q).eval(&x), p.eval(&x) + q.eval(&x));
        prop_assert_eq!((&p * &q).eval(&x), p.eval(&x) * q.eval(&x));
        prop_assert_eq!(p.compose(&q).eval(&x), p.eval(&q.eval(&x)));
    }

    #[test]
    fn integral_is_additive(p in poly(6), a in small_rat(), b in small_rat(), c in small_rat()) {
        prop_assert_eq!(p.integrate(&a, &b) + p.integrate(&b, &c), p.integrate(&a, &c));
        prop_assert_eq!(p.antiderivative().derivative(), p.clone());
        let mut v = [a, b, c];
        v.sort();
        if v[0] < v[2] {
            let pw = PiecewisePoly::single(v[0].clone(), v[2].clone(), p.clone()).unwrap();
            prop_assert_eq!(
                pw.integrate(&v[0], &v[1]).unwrap() + pw.integrate(&v[1], &v[2]).unwrap(),
                pw.total()
            );
        }
    }

    #[test]
    fn isolation_finds_every_planted_root(
        roots in prop::collection::btree_set((-30i64..=30, 1i64..=4), 1..5),
        extra in prop::collection::vec(-30i64..=30, 0..2),
    ) {
        let mut planted: Vec<Rational> = roots.iter().map(|&(n, d)| rat(n, d)).collect();
        planted.sort();
        planted.dedup();
        let mut all = planted.clone();
        all.extend(extra.iter().map(|&e| rat(e, 1)));
        let p = Polynomial::from_roots(int(1), &all);
        let res = rat(1, 1000);
        let found = isolate_roots(&p, &int(-31), &int(31), &res).unwrap();
        let mut distinct = all.clone();
        distinct.sort();
        distinct.dedup();
        prop_assert_eq!(found.len(), distinct.len());
        for (r, x) in found.iter().zip(&distinct) {
            prop_assert!(r.contains(x));
            prop_assert!(r.width() <= res);
            let mult = all.iter().filter(|y| *y == x).count();
            prop_assert_eq!(r.multiplicity, mult);
        }
        prop_assert!(found.windows(2).all(|w| w[0].hi < w[1].lo));
    }

    #[test]
    fn pairing_is_linear(id in case_ids(), c1 in 0.1f64..3.0, c2 in 0.1f64..3.0, r1 in -2.0f64..2.0, r2 in -2.0f64..2.0) {
        let case = MeasurePair::by_id(id).unwrap();
        let g1 = WeightSpec::ExpSum(vec![(1.0, r1)]);
        let g2 = WeightSpec::ExpSum(vec![(1.0, r2)]);
        let both = WeightSpec::ExpSum(vec![(c1, r1), (c2, r2)]);
        for m in [&case.mu, &case.nu] {
            let a = pair(m, &g1, 1e-12).unwrap();
            let b = pair(m, &g2, 1e-12).unwrap();
            let s = pair(m, &both, 1e-12).unwrap();
            let combined = c1 * a.value + c2 * b.value;
            let bound = s.error_bound + c1 * a.error_bound + c2 * b.error_bound + 1e-12 * (1.0 + s.value.abs());
            prop_assert!((s.value - combined).abs() <= bound, "{} vs {}", s.value, combined);
        }
    }

    #[test]
    fn quadrature_agrees_with_exact_rational(id in case_ids(), p in poly(4)) {
        let case = MeasurePair::by_id(id).unwrap();
        let g = WeightSpec::Polynomial(p);
        for m in [&case.mu, &case.nu] {
            let exact = to_f64(pair_exact(m, &g).unwrap().exact.as_ref().unwrap());
            let quad = pair_quadrature(m, &g, 1e-13).unwrap().value;
            let scale = m.density.abs_mass() * g.sup_bound(-6.0, 6.0);
            prop_assert!((quad - exact).abs() <= 1e-12 * exact.abs().max(scale), "{quad} vs {exact}");
        }
    }

    #[test]
    fn even_polynomials_kill_nu_exactly(id in case_ids(), coeffs in prop::collection::vec(small_rat(), 1..4)) {
        let case = MeasurePair::by_id(id).unwrap();
        prop_assume!(case.y_symmetric);
        let mut dense = Vec::new();
        for c in coeffs {
            dense.push(c);
            dense.push(int(0));
        }
        let g = WeightSpec::Polynomial(Polynomial::new(dense));
        prop_assert!(g.is_even());
        prop_assert_eq!(pair(&case.nu, &g, 1e-12).unwrap().exact, Some(int(0)));
    }

    #[test]
    fn polystable_pairs_nonpositively(id in case_ids(), a in 0.0f64..1.2, xis in prop::collection::vec((0.0f64..5.0, -5.0f64..5.0), 100)) {
        let case = MeasurePair::by_id(id).unwrap();
        let g = WeightSpec::cosh(a);
        let v = classify(&case, &g, DEFAULT_REL_TOL).unwrap();
        if v.classification == Classification::Polystable {
            for &(x1, x2) in &xis {
                let p = pairing_along(&case, (x1, x2), &g, 1e-12).unwrap();
                prop_assert!(p <= v.tolerance * (x1.abs() + x2.abs()));
                if x1 > 1e-9 {
                    prop_assert!(p < 0.0);
                }
            }
            prop_assert_eq!(pairing_along(&case, (0.0, 1.0), &g, 1e-12).unwrap().abs() <= v.tolerance, true);
        }
    }

    #[test]
    fn verdict_is_scale_invariant(id in case_ids(), a in 0.0f64..4.0, c in 0.01f64..100.0) {
        let case = MeasurePair::by_id(id).unwrap();
        let g = WeightSpec::cosh(a);
        let scaled = g.scaled(c).unwrap();
        let v = classify(&case, &g, DEFAULT_REL_TOL).unwrap();
        let w = classify(&case, &scaled, DEFAULT_REL_TOL).unwrap();
        prop_assert_eq!(v.classification, w.classification);
        prop_assert!((w.margin.value - c * v.margin.value).abs() <= 1e-9 * (1.0 + (c * v.margin.value).abs()));
    }
}

#[test]
fn threshold_consistency() {
    for case in [ClosedFormCase::Q3, ClosedFormCase::MM2_29] {
        let pair_case = MeasurePair::by_id(case.dm_id()).unwrap();
        let t = find_threshold(case, (0.1, 4.0), 1e-12).unwrap();
        let at = |a: f64| classify(&pair_case, &WeightSpec::cosh(a), DEFAULT_REL_TOL).unwrap().classification;
        assert_eq!(at(t.a0 - 0.1), Classification::Polystable, "{case:?}");
        assert_eq!(at(t.a0), Classification::StrictlySemistable, "{case:?}");
        assert_eq!(at(t.a0 + 0.1), Classification::Unstable, "{case:?}");
    }
}

#[test]
fn certificates_survive_dense_sampling() {
    let (lo, hi) = default_lambda_range();
    for c in catalog() {
        let case = MeasurePair::for_case(c);
        if let Some(cert) = insensitivity_certificate(&case, (&lo, &hi), 200) {
            assert!(cert.verify(&case));
            assert!(common::min_by_sampling(&cert.combined_density, 1000) >= int(0), "{}", c.dm_id);
        }
    }
}

#[test]
fn certificate_and_destabilizer_are_exclusive() {
    let (lo, hi) = default_lambda_range();
    for c in catalog() {
        let case = MeasurePair::for_case(c);
        let cert = insensitivity_certificate(&case, (&lo, &hi), 200);
        let destab = destabilizing_weight(&case, 4, DEFAULT_REL_TOL).ok();
        assert!(cert.is_none() || destab.is_none(), "{}", c.dm_id);
        if let Some((_, v)) = destab {
            assert_eq!(v.futaki.exact, Some(int(0)));
            assert!(v.margin.value < -v.tolerance);
        }
    }
}
