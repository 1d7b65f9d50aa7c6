use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reebcone::arith::{q_int, Q};
use reebcone::catalog;
use reebcone::fixed_locus::dataset_from_cone;
use reebcone::localize::{toric_vertex_sum, total_scalar, volume};
use reebcone::oracle::{oracle_scalar, oracle_volume};

#[test]
fn catalog_matches_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for name in catalog::names() {
        let cone = catalog::get(name).unwrap();
        let b_o = catalog::normal_sum(&cone);
        let ds = dataset_from_cone(&cone, &b_o).unwrap();
        for _ in 0..5 {
            let coeffs: Vec<i64> = cone.normals.iter().map(|_| rng.gen_range(1..20)).collect();
            let b: Vec<Q> = (0..cone.rank)
                .map(|i| cone.primitive_normals.iter().zip(&coeffs).map(|(u, &c)| Q::from_integer(u[i].clone()) * q_int(c)).sum())
                .collect();
            let (Ok(v), Ok(s)) = (volume(&ds, &b), total_scalar(&ds, &b)) else { continue };
            assert_eq!(v, oracle_volume(&cone, &b).unwrap(), "{name} V");
            assert_eq!(s, oracle_scalar(&cone, &b).unwrap(), "{name} S");
            let (tv, ts) = toric_vertex_sum(&cone, &b_o, &b).unwrap();
            assert_eq!((tv, ts), (v, s));
        }
    }
}
