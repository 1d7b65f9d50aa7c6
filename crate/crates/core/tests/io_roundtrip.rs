use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reebcone::arith::{q_frac, Q};
use reebcone::catalog;
use reebcone::fixed_locus::dataset_from_cone;
use reebcone::io::{cone_to_json, parse_cone, parse_dataset};
use reebcone::localize::{evaluate, Functional};

#[test]
fn dataset_json_preserves_every_functional() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for name in catalog::names() {
        let cone = catalog::get(name).unwrap();
        let again = parse_cone(&cone_to_json(&cone).to_string()).unwrap();
        assert_eq!(again.normals, cone.normals, "{name}");
        let ds = dataset_from_cone(&cone, &catalog::normal_sum(&cone)).unwrap();
        let text = serde_json::to_string_pretty(&ds.to_json()).unwrap();
        let loaded = parse_dataset(&text).unwrap();
        for _ in 0..5 {
            let mut b = vec![Q::from_integer(0.into()); cone.rank];
            for u in cone.normals_q() {
                let c = q_frac(rng.gen_range(1..15), rng.gen_range(1..6));
                b.iter_mut().zip(&u).for_each(|(x, y)| *x += y * &c);
            }
            for f in Functional::ALL {
                let direct = evaluate(f, &ds, &b);
                let via_json = evaluate(f, &loaded, &b);
                assert_eq!(format!("{direct:?}"), format!("{via_json:?}"), "{name} {f}");
            }
        }
    }
}
