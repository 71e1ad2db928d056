mod common;

use common::{members_of, naive_vc, pairwise, PolynomialCatalogue};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sumset_vc::clp::{diagonal_slice_rank_bounds, slice_decompose, sum_tensor, SizeGuard};
use sumset_vc::family::{embed_01, PointSet, SetFamily, SetOp};
use sumset_vc::interpolation::{
    deg_on_set, int_deg, represent_monomial, PartialFunction, ReducedPolynomial,
};
use sumset_vc::vc::vc_dim;
use sumset_vc::verify::{
    check_instance, counterexample_demo, exhaustive_scan, search_open_question, Question,
    SearchMode, SearchSpec, TheoremId,
};

#[test]
fn vc_dim_matches_naive_search() {
    for n in 1..=4u32 {
        for c in 1..(1u64 << (1 << n)) {
            let members = members_of(n, c);
            let a = SetFamily::new(n, members.iter().copied()).unwrap();
            assert_eq!(vc_dim(&a).unwrap(), naive_vc(n, &members), "n={n} c={c}");
        }
    }
}

#[test]
fn deg_on_set_matches_enumeration_over_f2() {
    for n in 1..=3u32 {
        let catalogue = PolynomialCatalogue::new(2, n);
        for c in 1..(1u64 << (1 << n)) {
            let domain = members_of(n, c);
            let points = PointSet::new(2, n, domain.iter().copied()).unwrap();
            for (values, degree) in catalogue.restriction_degrees(&domain) {
                let f = PartialFunction::new(points.clone(), values).unwrap();
                assert_eq!(deg_on_set(&f).unwrap(), degree);
            }
        }
    }
}

#[test]
fn deg_on_set_matches_enumeration_over_f3() {
    let catalogue = PolynomialCatalogue::new(3, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for c in 1u64..512 {
        let domain: Vec<u64> = (0..9u64).filter(|x| c >> x & 1 == 1).collect();
        let points = PointSet::new(3, 2, domain.iter().copied()).unwrap();
        let degrees = catalogue.restriction_degrees(&domain);
        assert_eq!(
            int_deg(&points).unwrap(),
            catalogue.int_deg(&domain),
            "c={c}"
        );
        for _ in 0..4 {
            let values: Vec<u64> = domain.iter().map(|_| rng.gen_range(0..3)).collect();
            let f = PartialFunction::new(points.clone(), values.clone()).unwrap();
            assert_eq!(deg_on_set(&f).unwrap(), degrees[&values]);
        }
    }
}

#[test]
fn int_deg_is_the_largest_indicator_degree() {
    for (p, n) in [(2u64, 3u32), (3, 2), (5, 1)] {
        let size = p.pow(n);
        let mut rng = ChaCha8Rng::seed_from_u64(p);
        for _ in 0..40 {
            let points: Vec<u64> = (0..size).filter(|_| rng.gen_bool(0.5)).collect();
            if points.is_empty() {
                continue;
            }
            let domain = PointSet::new(p, n, points.iter().copied()).unwrap();
            let max_indicator = points
                .iter()
                .map(|&x| {
                    deg_on_set(&PartialFunction::indicator(domain.clone(), x).unwrap()).unwrap()
                })
                .max()
                .unwrap();
            assert_eq!(int_deg(&domain).unwrap(), max_indicator);
        }
    }
}

#[test]
fn represent_monomial_is_low_degree_and_agrees() {
    for n in 1..=4u32 {
        for c in 1..(1u64 << (1 << n)) {
            let a = SetFamily::from_characteristic(n, c).unwrap();
            let d = vc_dim(&a).unwrap();
            for s in 0..(1u64 << n) {
                let q = represent_monomial(&a, s).unwrap();
                assert!(q.degree() <= d, "n={n} c={c} s={s}");
                for &m in a.members() {
                    assert_eq!(q.evaluate_encoded(m), u64::from(m & s == s));
                }
            }
        }
    }
}

#[test]
fn every_exhaustive_scan_is_clean() {
    for id in [
        TheoremId::Sauer,
        TheoremId::Main,
        TheoremId::IntdegMain,
        TheoremId::IntdegLeVc,
        TheoremId::VcMonotone,
    ] {
        for n in 1..=4 {
            let r = exhaustive_scan(id, n, None).unwrap();
            assert_eq!(r.instances_checked, (1u64 << (1 << n)) - 1);
            assert!(r.ok && r.violations.is_empty(), "{id} n={n}");
        }
    }
    for p in [2, 3, 5] {
        for n in 1..=3 {
            let r = exhaustive_scan(TheoremId::Psums, n, Some(p)).unwrap();
            assert!(r.ok, "psums p={p} n={n}");
        }
    }
    for (p, n) in [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2)] {
        let r = exhaustive_scan(TheoremId::ClpBound, n, Some(p)).unwrap();
        assert_eq!(r.instances_checked, p.pow(p.pow(n) as u32));
        assert!(r.ok, "clp p={p} n={n}");
    }
}

#[test]
fn intdeg_bound_implies_main_bound() {
    for n in 1..=4u32 {
        for c in 1..(1u64 << (1 << n)) {
            let a = SetFamily::from_characteristic(n, c).unwrap();
            if check_instance(TheoremId::IntdegMain, &a, None).unwrap() {
                assert!(
                    check_instance(TheoremId::Main, &a, None).unwrap(),
                    "n={n} c={c}"
                );
            }
        }
    }
}

#[test]
fn demo_separates_for_all_tested_n() {
    for n in 4..=20 {
        for op in [SetOp::Intersect, SetOp::Union] {
            let r = counterexample_demo(op, n, 2).unwrap();
            let choose = |n: u64, k: u64| (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1));
            let n64 = u64::from(n);
            assert_eq!(r.family_size, 1 + n64 + choose(n64, 2));
            assert_eq!(r.half_bound, 2 * (1 + n64));
            assert_eq!(r.vc_star, 2);
            assert!(r.witness && r.closed_under_op);
        }
    }
}

#[test]
fn q1_exhaustive_maximum_at_n4_d2() {
    let mut best = 0;
    for c in 1u64..(1 << 16) {
        let a = members_of(4, c);
        if a.len() <= best {
            continue;
        }
        if naive_vc(4, &pairwise(&a, |s, t| s & t)) <= 2
            && naive_vc(4, &pairwise(&a, |s, t| s | t)) <= 2
        {
            best = a.len();
        }
    }
    assert_eq!(best, 9);
    let table = search_open_question(&SearchSpec {
        question: Question::Q1,
        n: 4,
        d: Some(2),
        mode: SearchMode::Exhaustive,
        budget: 0,
        seed: 0,
    })
    .unwrap();
    assert_eq!(table.rows[0].best_size, 9);
    assert!(table.all_verified());
}

#[test]
fn search_certificates_satisfy_constraints() {
    for (question, mode, n) in [
        (Question::Q1, SearchMode::Exhaustive, 3),
        (Question::Q2, SearchMode::Exhaustive, 3),
        (Question::Q1, SearchMode::Heuristic, 6),
        (Question::Q2, SearchMode::Heuristic, 6),
    ] {
        let table = search_open_question(&SearchSpec {
            question,
            n,
            d: None,
            mode,
            budget: 2000,
            seed: 5,
        })
        .unwrap();
        assert_eq!(table.rows.len() as u32, n + 1);
        for row in &table.rows {
            let a = &row.certificate;
            assert_eq!(a.len() as u64, row.best_size);
            let ok = match question {
                Question::Q1 => {
                    naive_vc(n, &pairwise(a, |s, t| s & t)) <= row.d
                        && naive_vc(n, &pairwise(a, |s, t| s | t)) <= row.d
                }
                Question::Q2 => {
                    let aa = pairwise(a, |s, t| s ^ t);
                    let aaa: Vec<u64> = {
                        let mut v: Vec<u64> = aa
                            .iter()
                            .flat_map(|&s| a.iter().map(move |&t| s ^ t))
                            .collect();
                        v.sort_unstable();
                        v.dedup();
                        v
                    };
                    naive_vc(n, &aaa) <= row.d
                }
            };
            assert!(ok, "{question:?} {mode:?} d={}", row.d);
        }
    }
}

#[test]
fn sum_tensor_rank_is_squeezed_by_diagonal_and_decomposition() {
    let guard = SizeGuard::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in [2u64, 3] {
        for n in 1..=3u32 {
            let f = ReducedPolynomial::indicator_of_zero(p, n).unwrap();
            let decomposition = slice_decompose(&f, 2, &guard).unwrap();
            for _ in 0..20 {
                let c = rng.gen_range(1..(1u64 << (1 << n)));
                let a = SetFamily::from_characteristic(n, c).unwrap();
                let points = embed_01(&a, p).unwrap();
                let t = sum_tensor(&f, &points, 2, &guard).unwrap();
                let report = diagonal_slice_rank_bounds(&t);
                let rank = t.to_matrix().unwrap().rank() as u64;
                if report.is_diagonal {
                    assert!(report.lower_bound <= rank);
                }
                assert!(rank <= decomposition.len() as u64);
            }
        }
    }
}

#[test]
fn random_polynomial_tensors_obey_decomposition_rank_bound() {
    let guard = SizeGuard::default();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for p in [2u64, 3, 5] {
        for n in 1..=3u32 {
            for _ in 0..10 {
                let d = rng.gen_range(0..=(p as u32 - 1) * n);
                let f = ReducedPolynomial::random(p, n, d, &mut rng).unwrap();
                let decomposition = slice_decompose(&f, 2, &guard).unwrap();
                let points = PointSet::full_space(p, n).unwrap();
                let t = sum_tensor(&f, &points, 2, &guard).unwrap();
                assert!(t.to_matrix().unwrap().rank() <= decomposition.len());
                assert!(decomposition.len() as u64 <= decomposition.term_bound().unwrap());
            }
        }
    }
}
