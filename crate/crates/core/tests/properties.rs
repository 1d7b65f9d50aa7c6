use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use reebcone::arith::{format_rational, parse_rational, q_frac, q_int, Q};
use reebcone::catalog;
use reebcone::cone::GoodCone;
use reebcone::fixed_locus::{class_multiply, dataset_from_cone, inverse_euler, LocalizationDataset, TruncatedClass};
use reebcone::lattice::{rank_q, smith_invariants};
use reebcone::localize::{evaluate, evaluate_limit, jet, jet_limit, pairings, Functional};
use reebcone::oracle::{truncated_cone_volume, truncated_cone_volume_with_order};

fn catalog_cone() -> impl Strategy<Value = (GoodCone, LocalizationDataset)> {
    prop::sample::select(catalog::names()).prop_map(|n| {
        let cone = catalog::get(n).unwrap();
        let ds = dataset_from_cone(&cone, &catalog::normal_sum(&cone)).unwrap();
        (cone, ds)
    })
}

/// Positive combination of the normals with the given coefficients.
fn combine(cone: &GoodCone, coeffs: &[(i64, i64)]) -> Vec<Q> {
    let mut b = vec![Q::zero(); cone.rank];
    for (u, &(p, q)) in cone.normals_q().iter().zip(coeffs.iter().cycle()) {
        let c = q_frac(p, q);
        b.iter_mut().zip(u).for_each(|(x, y)| *x += y * &c);
    }
    b
}

fn coeffs() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((1i64..30, 1i64..8), 6)
}

fn generic(ds: &LocalizationDataset, b: &[Q]) -> bool {
    pairings(ds, b).iter().all(|(_, _, w)| !w.is_zero())
}

fn class(m: usize, terms: &[(usize, i64)]) -> TruncatedClass<Q> {
    terms.iter().fold(TruncatedClass::scalar(m, 3, q_int(0)), |acc, &(i, c)| {
        let t = if i == 3 { TruncatedClass::scalar(m, 3, q_int(c)) } else { TruncatedClass::symbol(m, 3, i).scale(&q_int(c)) };
        acc.add(&t).unwrap()
    })
}

fn class_terms() -> impl Strategy<Value = Vec<(usize, i64)>> {
    prop::collection::vec((0usize..4, -5i64..6), 0..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn class_ring_axioms(a in class_terms(), b in class_terms(), c in class_terms(), m in 0usize..4) {
        let (a, b, c) = (class(m, &a), class(m, &b), class(m, &c));
        let ab = class_multiply(&a, &b).unwrap();
        prop_assert_eq!(&ab, &class_multiply(&b, &a).unwrap());
        prop_assert_eq!(
            class_multiply(&ab, &c).unwrap(),
            class_multiply(&a, &class_multiply(&b, &c).unwrap()).unwrap()
        );
        prop_assert_eq!(
            class_multiply(&a, &b.add(&c).unwrap()).unwrap(),
            ab.add(&class_multiply(&a, &c).unwrap()).unwrap()
        );
        let one = TruncatedClass::scalar(m, 3, q_int(1));
        prop_assert_eq!(class_multiply(&a, &one).unwrap(), a);
    }

    #[test]
    fn inverse_euler_inverts(w in prop::collection::vec((1i64..9, 1i64..5), 2), m in 0usize..4) {
        // (w_j - E_j) times its inverse is one, up to degree m
        let ws: Vec<Q> = w.iter().map(|&(p, q)| q_frac(p, q)).collect();
        let inv = inverse_euler(&ws, m).unwrap();
        let euler = ws.iter().enumerate().fold(TruncatedClass::scalar(m, 3, q_int(1)), |acc, (j, x)| {
            let f = TruncatedClass::scalar(m, 3, x.clone()).add(&TruncatedClass::symbol(m, 3, j).scale(&q_int(-1))).unwrap();
            class_multiply(&acc, &f).unwrap()
        });
        prop_assert_eq!(class_multiply(&euler, &inv).unwrap(), TruncatedClass::scalar(m, 3, q_int(1)));
    }

    #[test]
    fn rank_ignores_scaling(rows in prop::collection::vec(prop::collection::vec(-6i64..7, 3), 1..5), t in 1i64..9) {
        let q: Vec<Vec<Q>> = rows.iter().map(|r| r.iter().map(|&x| q_int(x)).collect()).collect();
        let scaled: Vec<Vec<Q>> = q.iter().map(|r| r.iter().map(|x| x * q_frac(t, 3)).collect()).collect();
        prop_assert_eq!(rank_q(&q), rank_q(&scaled));
        let z: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| x.into()).collect()).collect();
        let nonzero = smith_invariants(&z).iter().filter(|d| !d.is_zero()).count();
        prop_assert_eq!(nonzero, rank_q(&q));
    }

    #[test]
    fn reeb_cone_is_a_cone((cone, _) in catalog_cone(), c in coeffs(), t in (1i64..20, 1i64..20)) {
        let b = combine(&cone, &c);
        let s = q_frac(t.0, t.1);
        let tb: Vec<Q> = b.iter().map(|x| x * &s).collect();
        prop_assert!(cone.reeb_cone_contains(&b));
        prop_assert!(cone.reeb_cone_contains(&tb));
        let neg: Vec<Q> = b.iter().map(|x| -x).collect();
        prop_assert!(!cone.reeb_cone_contains(&neg));
    }

    #[test]
    fn triangulation_independent((cone, _) in catalog_cone(), c in coeffs(), seed in any::<u64>()) {
        let b = combine(&cone, &c);
        let mut order: Vec<usize> = (0..cone.rays.len()).collect();
        let len = order.len();
        for i in (1..len).rev() {
            order.swap(i, (seed.rotate_left(i as u32) % (i as u64 + 1)) as usize);
        }
        prop_assert_eq!(truncated_cone_volume_with_order(&cone, &b, &order).unwrap(), truncated_cone_volume(&cone, &b).unwrap());
    }

    #[test]
    fn homogeneity((cone, ds) in catalog_cone(), c in coeffs(), t in (1i64..15, 1i64..15)) {
        let b = combine(&cone, &c);
        prop_assume!(generic(&ds, &b));
        let s = q_frac(t.0, t.1);
        let tb: Vec<Q> = b.iter().map(|x| x * &s).collect();
        let n = ds.n as i32;
        let v = evaluate(Functional::V, &ds, &b).unwrap().exact;
        let sc = evaluate(Functional::S, &ds, &b).unwrap().exact;
        prop_assert_eq!(evaluate(Functional::V, &ds, &tb).unwrap().exact, v * s.pow(-(n + 1)));
        prop_assert_eq!(evaluate(Functional::S, &ds, &tb).unwrap().exact, sc * s.pow(-n));
        prop_assert_eq!(evaluate(Functional::H, &ds, &tb).unwrap(), evaluate(Functional::H, &ds, &b).unwrap());
    }

    #[test]
    fn limit_ignores_direction((cone, ds) in catalog_cone(), c in coeffs(), d1 in prop::collection::vec(-9i64..10, 4), d2 in prop::collection::vec(-9i64..10, 4)) {
        let b = combine(&cone, &c);
        let d1: Vec<Q> = d1[..cone.rank].iter().map(|&x| q_int(x)).collect();
        let d2: Vec<Q> = d2[..cone.rank].iter().map(|&x| q_int(x)).collect();
        let a = evaluate_limit(Functional::H, &ds, &b, &d1);
        let z = evaluate_limit(Functional::H, &ds, &b, &d2);
        prop_assume!(a.is_ok() && z.is_ok());
        prop_assert_eq!(a.unwrap(), z.unwrap());
    }

    #[test]
    fn limit_jet_matches_direct_jet((cone, ds) in catalog_cone(), c in coeffs(), d in prop::collection::vec(-9i64..10, 4)) {
        let b = combine(&cone, &c);
        prop_assume!(generic(&ds, &b));
        let d: Vec<Q> = d[..cone.rank].iter().map(|&x| q_int(x)).collect();
        prop_assume!(d.iter().any(|x| !x.is_zero()));
        let direct = jet(&ds, &b).unwrap();
        let limit = jet_limit(&ds, &b, &d).unwrap();
        prop_assert_eq!(direct.v, limit.v);
        prop_assert_eq!(direct.s, limit.s);
        prop_assert_eq!(direct.grad_v, limit.grad_v);
        prop_assert_eq!(direct.grad_s, limit.grad_s);
    }

    #[test]
    fn rational_text_round_trip(p in any::<i64>(), q in 1i64..i64::MAX) {
        let x = q_frac(p, q);
        prop_assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
    }
}
