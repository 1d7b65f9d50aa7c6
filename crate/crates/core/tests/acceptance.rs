//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; exits nonzero on any failure.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reebcone::arith::{dot_q, format_rational_vec, q_frac, q_int, q_to_f64, Q};
use reebcone::catalog;
use reebcone::cone::GoodCone;
use reebcone::fixed_locus::{dataset_from_cone, LocalizationDataset};
use reebcone::localize::{
    evaluate, evaluate_auto, evaluate_limit, generic_direction, gradient, pairings, toric_vertex_sum, Functional,
    LocalizeError,
};
use reebcone::optimize::{build_slice, critical_rays_2d, ray_angle, SliceProblem};
use reebcone::oracle::{oracle_scalar, oracle_volume};
use reebcone::verify::{boundary_approach, boundary_target};

// Tolerances and sizes fixed by the acceptance contract.
const ORACLE_SAMPLES: usize = 20;
const ORACLE_BUDGET: Duration = Duration::from_secs(60);
const HOMOGENEITY_SAMPLES: usize = 50;
const BOUNDARY_RAYS: usize = 100;
const BOUNDARY_GROWTH: f64 = 1e6;
const GRADIENT_SAMPLES: usize = 50;
const GRADIENT_TOL: f64 = 1e-6;
const GRADIENT_BUDGET: Duration = Duration::from_secs(30);
const DIAGONAL_ANGLE: f64 = 1e-8;
const MIN_GRADIENT: f64 = 1e-10;
const CONIFOLD_ORACLE_TOL: f64 = 1e-8;
const CONIFOLD_CLOSED_FORM_TOL: f64 = 1e-6;
const SUBCONES: usize = 5;
const LIMIT_TOL: f64 = 1e-9;

type Outcome = Result<String, String>;

fn cones() -> Vec<(GoodCone, LocalizationDataset)> {
    catalog::names()
        .into_iter()
        .map(|n| {
            let cone = catalog::get(n).unwrap();
            let ds = dataset_from_cone(&cone, &catalog::normal_sum(&cone)).unwrap();
            (cone, ds)
        })
        .collect()
}

fn generic(ds: &LocalizationDataset, b: &[Q]) -> bool {
    pairings(ds, b).iter().all(|(_, _, w)| !w.is_zero())
}

/// Positive rational combination of the facet normals, off every weight
/// hyperplane.
fn interior(cone: &GoodCone, ds: &LocalizationDataset, rng: &mut ChaCha8Rng) -> Vec<Q> {
    loop {
        let mut b = vec![Q::zero(); cone.rank];
        for u in cone.normals_q() {
            let c = q_frac(rng.gen_range(1..=20), rng.gen_range(1..=9));
            b.iter_mut().zip(&u).for_each(|(x, y)| *x += y * &c);
        }
        if generic(ds, &b) {
            return b;
        }
    }
}

fn name(cone: &GoodCone) -> &str {
    cone.name.as_deref().unwrap_or("?")
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let all = cones();
    let ranks: Vec<usize> = all.iter().map(|(c, _)| c.rank).collect();
    if all.len() < 8 || !(2..=4).all(|k| ranks.contains(&k)) {
        return Err(format!("catalog too small: {} cones, ranks {ranks:?}", all.len()));
    }
    for (cone, ds) in &all {
        for _ in 0..ORACLE_SAMPLES {
            let b = interior(cone, ds, &mut rng);
            let v = evaluate(Functional::V, ds, &b).map_err(|e| e.to_string())?;
            let s = evaluate(Functional::S, ds, &b).map_err(|e| e.to_string())?;
            let ov = oracle_volume(cone, &b).map_err(|e| e.to_string())?;
            let os = oracle_scalar(cone, &b).map_err(|e| e.to_string())?;
            if v != ov || s != os {
                return Err(format!("{} at {}: V {v} vs {ov}, S {s} vs {os}", name(cone), format_rational_vec(&b)));
            }
        }
    }
    let t = start.elapsed();
    if t > ORACLE_BUDGET {
        return Err(format!("took {t:?}"));
    }
    Ok(format!("{} cones x {ORACLE_SAMPLES} points exact, {t:.1?}", all.len()))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut count = 0;
    for (cone, ds) in cones() {
        let n = ds.n as i32;
        for _ in 0..HOMOGENEITY_SAMPLES {
            let b = interior(&cone, &ds, &mut rng);
            let t = q_frac(rng.gen_range(1..=12), rng.gen_range(1..=12));
            let tb: Vec<Q> = b.iter().map(|x| x * &t).collect();
            let fail = |what: &str| format!("{} at {}: {what}", name(&cone), format_rational_vec(&b));
            let e = |f, p: &[Q]| evaluate(f, &ds, p).map(|v| v.exact).map_err(|e| e.to_string());
            let (v, s, h) = (e(Functional::V, &b)?, e(Functional::S, &b)?, e(Functional::H, &b)?);
            if e(Functional::V, &tb)? != &v * t.pow(-(n + 1)) {
                return Err(fail("V(tb)"));
            }
            if e(Functional::S, &tb)? != &s * t.pow(-n) {
                return Err(fail("S(tb)"));
            }
            if e(Functional::H, &tb)? != h {
                return Err(fail("H(tb)"));
            }
            let g = |f| gradient(f, &ds, &b).map(|g| g.exact).map_err(|e| e.to_string());
            if dot_q(&g(Functional::V)?, &b) != -q_int(n as i64 + 1) * &v {
                return Err(fail("<grad V, b>"));
            }
            if dot_q(&g(Functional::S)?, &b) != -q_int(n as i64) * &s {
                return Err(fail("<grad S, b>"));
            }
            if !dot_q(&g(Functional::H)?, &b).is_zero() {
                return Err(fail("<grad H, b>"));
            }
            count += 1;
        }
    }
    Ok(format!("{count} points, all six identities exact"))
}

fn criterion_3() -> Outcome {
    let anchors: [(&str, Vec<Q>, [i64; 3]); 2] =
        [("orthant2", vec![q_int(1); 2], [2, 16, 128]), ("orthant3", vec![q_int(1); 3], [1, 24, 13824])];
    for (cone_name, b, expected) in anchors {
        let cone = catalog::get(cone_name).unwrap();
        let ds = dataset_from_cone(&cone, &catalog::normal_sum(&cone)).unwrap();
        let d = generic_direction(&ds, &b);
        for (f, want) in [Functional::V, Functional::S, Functional::H].into_iter().zip(expected) {
            let v = evaluate_limit(f, &ds, &b, &d).map_err(|e| e.to_string())?;
            let (auto, _) = evaluate_auto(f, &ds, &b).map_err(|e| e.to_string())?;
            if v.exact != q_int(want) || v.pi_power != cone.rank as u32 || auto != v {
                return Err(format!("{cone_name} {f}: got {v}, expected {want} * pi^{}", cone.rank));
            }
        }
    }
    Ok("(2, 16, 128) pi^2 and (1, 24, 13824) pi^3".into())
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let problems: Vec<SliceProblem> =
        cones().into_iter().map(|(c, ds)| build_slice(ds, Some(&c), None, Functional::H).unwrap()).collect();
    let mut min_ratio = f64::INFINITY;
    let mut min_leading = f64::INFINITY;
    for i in 0..BOUNDARY_RAYS {
        let p = &problems[i % problems.len()];
        let target = boundary_target(p, &mut rng);
        let out = boundary_approach(p, &target, 12)?;
        for (r, c) in out.ratios.iter().zip(&out.leading_coefficients) {
            min_ratio = min_ratio.min(*r);
            min_leading = min_leading.min(*c);
            if !(*r > BOUNDARY_GROWTH && *c > 0.0) {
                return Err(format!("ray {i} toward {}: {out:?}", format_rational_vec(&target)));
            }
        }
    }
    Ok(format!("{BOUNDARY_RAYS} rays, min growth {min_ratio:.2e}, min leading coefficient {min_leading:.3e}"))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for (cone, ds) in cones() {
        for _ in 0..GRADIENT_SAMPLES {
            let b = interior(&cone, &ds, &mut rng);
            let top = b.iter().map(|x| x.abs()).max().unwrap();
            let h = top * q_frac(1, 1_000_000);
            for f in [Functional::V, Functional::S, Functional::H] {
                let exact: Vec<f64> = gradient(f, &ds, &b).map_err(|e| e.to_string())?.to_f64();
                let mut fd = Vec::new();
                for i in 0..b.len() {
                    let mut hi = b.clone();
                    let mut lo = b.clone();
                    hi[i] += &h;
                    lo[i] -= &h;
                    let e = |p: &[Q]| evaluate(f, &ds, p).map(|v| v.exact).map_err(|e| e.to_string());
                    fd.push(q_to_f64(&((e(&hi)? - e(&lo)?) / (&h * q_int(2)))) * PI.powi(ds.n as i32 + 1));
                }
                let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
                let value = evaluate(f, &ds, &b).map_err(|e| e.to_string())?.to_f64();
                let bn = norm(&b.iter().map(q_to_f64).collect::<Vec<_>>());
                let scale = norm(&exact).max(value.abs() / bn);
                let diff: Vec<f64> = exact.iter().zip(&fd).map(|(a, c)| a - c).collect();
                let rel = norm(&diff) / scale;
                worst = worst.max(rel);
                if rel > GRADIENT_TOL {
                    return Err(format!("{} {f} at {}: relative deviation {rel:.2e}", name(&cone), format_rational_vec(&b)));
                }
            }
        }
    }
    let t = start.elapsed();
    if t > GRADIENT_BUDGET {
        return Err(format!("took {t:?}"));
    }
    Ok(format!("max relative deviation {worst:.2e}, {t:.1?}"))
}

fn criterion_6() -> Outcome {
    let mut notes = Vec::new();
    for (cone, ds) in cones() {
        let p = build_slice(ds, Some(&cone), None, Functional::H).map_err(|e| e.to_string())?;
        let r = p.minimize().map_err(|e| format!("{}: {e}", name(&cone)))?;
        if !(r.distance_to_boundary > 0.0) {
            return Err(format!("{}: minimizer {:?} not interior", name(&cone), r.argmin));
        }
        if matches!(name(&cone), "orthant2" | "orthant3") {
            let diagonal = vec![1.0; cone.rank];
            let angle = ray_angle(&r.argmin, &diagonal);
            if angle > DIAGONAL_ANGLE || r.gradient_norm >= MIN_GRADIENT {
                return Err(format!("{}: angle {angle:.2e}, gradient {:.2e}", name(&cone), r.gradient_norm));
            }
            notes.push(format!("{} angle {angle:.1e} |g| {:.1e}", name(&cone), r.gradient_norm));
        }
    }
    Ok(format!("{}; all {} minimizers interior", notes.join(", "), catalog::names().len()))
}

/// Golden-section search for the minimum of `f` on `[a, b]`.
fn golden(mut a: f64, mut b: f64, tol: f64, f: &dyn Fn(f64) -> f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) / 2.0;
    (x, f(x))
}

fn criterion_7() -> Outcome {
    let cone = catalog::get("conifold").unwrap();
    let ds = dataset_from_cone(&cone, &catalog::normal_sum(&cone)).unwrap();
    let zeta = vec![q_frac(1, 3), q_int(0), q_int(0)];
    let p = build_slice(ds, Some(&cone), Some(zeta), Functional::V).map_err(|e| e.to_string())?;
    let r = p.minimize().map_err(|e| e.to_string())?;
    // independent: nested exact-oracle minimization over the square b = (3, x, y)
    let q = |x: f64| Q::from_float(x).unwrap();
    let vol = |x: f64, y: f64| oracle_volume(&cone, &[q_int(3), q(x), q(y)]).unwrap().to_f64();
    let inner = |x: f64| golden(1e-6, 3.0 - 1e-6, 1e-10, &|y| vol(x, y)).1;
    let (_, oracle_min) = golden(1e-6, 3.0 - 1e-6, 1e-10, &inner);
    let closed = 16.0 / 27.0 * PI.powi(3);
    let rel_oracle = (r.value - oracle_min).abs() / oracle_min;
    let rel_closed = (r.value - closed).abs() / closed;
    let detail = format!("V* = {:.15e}, oracle {:.15e} (rel {rel_oracle:.1e}), 16pi^3/27 rel {rel_closed:.1e}", r.value, oracle_min);
    if rel_oracle <= CONIFOLD_ORACLE_TOL && rel_closed <= CONIFOLD_CLOSED_FORM_TOL {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut counts = Vec::new();
    let census = |cone_name: &str, b1: &[Q], b2: &[Q]| -> Result<usize, String> {
        let cone = catalog::get(cone_name).unwrap();
        let ds = dataset_from_cone(&cone, &catalog::normal_sum(&cone)).unwrap();
        let p = build_slice(ds, Some(&cone), None, Functional::H).unwrap();
        let c = critical_rays_2d(&p, b1, b2, 64, 40)
            .map_err(|e| format!("{cone_name} span {} ; {}: {e}", format_rational_vec(b1), format_rational_vec(b2)))?;
        let ts: Vec<(Q, Q)> = c
            .rays
            .iter()
            .map(|r| (reebcone::arith::parse_rational(&r.t_lo).unwrap(), reebcone::arith::parse_rational(&r.t_hi).unwrap()))
            .collect();
        for w in ts.windows(2) {
            if q_to_f64(&(&w[1].0 - &w[0].1)) <= c.bracket_width {
                return Err(format!("{cone_name}: brackets {:?} not separated", w));
            }
        }
        Ok(c.rays.len())
    };
    let s3 = census("orthant2", &[q_int(1), q_int(0)], &[q_int(0), q_int(1)])?;
    if s3 != 1 {
        return Err(format!("orthant2: {s3} critical rays"));
    }
    let named = census("orthant3", &[q_int(1), q_int(1), q_int(1)], &[q_int(1), q_int(1), q_int(2)])?;
    if named == 0 {
        return Err("orthant3 span (1,1,1),(1,1,2): no critical ray".into());
    }
    for cone_name in ["orthant3", "conifold"] {
        let cone = catalog::get(cone_name).unwrap();
        let ds = dataset_from_cone(&cone, &catalog::normal_sum(&cone)).unwrap();
        for _ in 0..SUBCONES {
            let b1 = interior(&cone, &ds, &mut rng);
            let b2 = interior(&cone, &ds, &mut rng);
            counts.push(census(cone_name, &b1, &b2)?);
        }
    }
    Ok(format!("orthant2: 1, orthant3 (1,1,1)/(1,1,2): {named}, random subcones: {counts:?}"))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut hits = 0;
    let mut worst: f64 = 0.0;
    for (cone, ds) in cones() {
        let weights: Vec<Vec<Q>> =
            ds.components.iter().flat_map(|c| c.weights[1..].iter().cloned()).collect::<Vec<_>>();
        for kappa in &weights {
            // move a generic point along a random direction onto the hyperplane
            let mut found = None;
            for _ in 0..20 {
                let b0 = interior(&cone, &ds, &mut rng);
                let w: Vec<Q> = (0..cone.rank).map(|_| q_int(rng.gen_range(-5..=5))).collect();
                let kw = dot_q(kappa, &w);
                if kw.is_zero() {
                    continue;
                }
                let s = -dot_q(kappa, &b0) / kw;
                let b: Vec<Q> = b0.iter().zip(&w).map(|(x, y)| x + y * &s).collect();
                if cone.reeb_cone_contains(&b) {
                    found = Some(b);
                    break;
                }
            }
            let Some(b) = found else { continue };
            for f in [Functional::V, Functional::S, Functional::H] {
                match evaluate(f, &ds, &b) {
                    Err(LocalizeError::VanishingWeight { .. }) => {}
                    other => return Err(format!("{} direct evaluation at {}: {other:?}", name(&cone), format_rational_vec(&b))),
                }
                let (v, limit) = evaluate_auto(f, &ds, &b).map_err(|e| e.to_string())?;
                let x = v.to_f64();
                if !limit || !x.is_finite() {
                    return Err(format!("{}: limit value {x}", name(&cone)));
                }
                let d = generic_direction(&ds, &b);
                let near: Vec<Q> = b.iter().zip(&d).map(|(p, e)| p + e * q_frac(1, 1_000_000_000_000)).collect();
                let y = evaluate(f, &ds, &near).map_err(|e| e.to_string())?.to_f64();
                let rel = (x - y).abs() / x.abs();
                worst = worst.max(rel);
                if rel > LIMIT_TOL {
                    return Err(format!("{} {f} at {}: limit {x} vs nearby {y}", name(&cone), format_rational_vec(&b)));
                }
            }
            hits += 1;
        }
    }
    if hits == 0 {
        return Err("no weight hyperplane met the Reeb cone".into());
    }
    Ok(format!("{hits} hyperplane points, max relative gap to nearby generic point {worst:.1e}"))
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut count = 0;
    for (cone, _) in cones() {
        let base = catalog::normal_sum(&cone);
        let first: Vec<Q> = cone.normals_q()[0].clone();
        let shifted: Vec<Q> = base.iter().zip(&first).map(|(a, b)| a + b).collect();
        for b_o in [base, shifted] {
            let ds = dataset_from_cone(&cone, &b_o).map_err(|e| e.to_string())?;
            for _ in 0..ORACLE_SAMPLES {
                let b = interior(&cone, &ds, &mut rng);
                let v = evaluate(Functional::V, &ds, &b).map_err(|e| e.to_string())?;
                let s = evaluate(Functional::S, &ds, &b).map_err(|e| e.to_string())?;
                let (tv, ts) = toric_vertex_sum(&cone, &b_o, &b).map_err(|e| e.to_string())?;
                if (tv, ts) != (v.clone(), s.clone()) {
                    return Err(format!("{} b_o {} at {}", name(&cone), format_rational_vec(&b_o), format_rational_vec(&b)));
                }
                count += 1;
            }
        }
    }
    Ok(format!("{count} evaluations, two slicing fields per cone, exact"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("oracle equivalence", criterion_1),
        ("homogeneity and Euler", criterion_2),
        ("sphere anchors", criterion_3),
        ("boundary properness", criterion_4),
        ("gradient fidelity", criterion_5),
        ("minimization", criterion_6),
        ("conifold cross-check", criterion_7),
        ("critical-ray isolation", criterion_8),
        ("non-generic handling", criterion_9),
        ("path equality", criterion_10),
    ];
    let results: Vec<(Outcome, Duration)> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|(_, f)| {
                s.spawn(move || {
                    let t = Instant::now();
                    let out = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
                    (out, t.elapsed())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut failed = 0;
    for (i, ((label, _), (out, t))) in criteria.iter().zip(&results).enumerate() {
        let (status, detail) = match out {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {status} {label}: {detail} [{t:.1?}]", i + 1);
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
