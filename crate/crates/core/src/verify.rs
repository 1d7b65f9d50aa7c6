//! Seeded self-consistency suites: oracle equivalence, path equality,
//! homogeneity, Euler relations, finite-difference gradients and boundary
//! blow-up.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{dot_q, format_rational_vec, q_frac, q_int, q_to_f64, Q};
use crate::catalog;
use crate::cone::GoodCone;
use crate::fixed_locus::{dataset_from_cone, LocalizationDataset};
use crate::localize::{
    boundary_leading_term, combine, identically_zero_pairing, jet, pairings, toric_vertex_sum, volume_and_scalar, Functional, LocalizeError,
};
use crate::optimize::{build_slice, probe_boundary, SliceProblem};
use crate::oracle::{oracle_scalar, oracle_volume};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: String,
    pub subject: String,
    pub samples: usize,
    pub passed: bool,
    /// First failure, if any.
    pub detail: String,
}

impl Check {
    fn new(suite: &str, subject: &str) -> Check {
        Check { suite: suite.into(), subject: subject.into(), samples: 0, passed: true, detail: String::new() }
    }

    fn fail(&mut self, detail: String) {
        if self.passed {
            self.detail = detail;
        }
        self.passed = false;
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.samples += 1;
        if !ok {
            self.fail(detail());
        }
    }
}

/// The object under test: a cone with its generated dataset, or a bare
/// dataset.
pub struct Subject {
    pub name: String,
    pub cone: Option<GoodCone>,
    pub dataset: LocalizationDataset,
}

impl Subject {
    pub fn from_cone(cone: GoodCone) -> Result<Subject, crate::cone::ConeError> {
        let dataset = dataset_from_cone(&cone, &catalog::normal_sum(&cone))?;
        let name = cone.name.clone().unwrap_or_else(|| "cone".into());
        Ok(Subject { name, cone: Some(cone), dataset })
    }

    pub fn from_dataset(name: &str, dataset: LocalizationDataset) -> Subject {
        Subject { name: name.into(), cone: None, dataset }
    }

    pub fn slice(&self, target: Functional) -> Result<SliceProblem, crate::optimize::OptimizeError> {
        build_slice(self.dataset.clone(), self.cone.as_ref(), None, target)
    }
}

/// The generator behind every seeded suite.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn is_generic(ds: &LocalizationDataset, b: &[Q]) -> bool {
    pairings(ds, b).iter().all(|(_, _, w)| !w.is_zero())
}

/// Random interior point avoiding every weight hyperplane: a positive
/// integer combination of the facet normals for cones, of the slice vertices
/// otherwise.
pub fn sample_point(subject: &Subject, slice_vertices: &[Vec<Q>], rng: &mut ChaCha8Rng) -> Vec<Q> {
    let gens: Vec<Vec<Q>> = match &subject.cone {
        Some(c) => c.normals_q(),
        None => slice_vertices.to_vec(),
    };
    let k = subject.dataset.rank;
    loop {
        let mut b = vec![Q::zero(); k];
        for g in &gens {
            let c = q_int(rng.gen_range(1..=20));
            b.iter_mut().zip(g).for_each(|(x, y)| *x += y * &c);
        }
        if is_generic(&subject.dataset, &b) {
            return b;
        }
    }
}

fn random_scale(rng: &mut ChaCha8Rng) -> Q {
    q_frac(rng.gen_range(1..=9), rng.gen_range(1..=9))
}

pub fn oracle_suite(subject: &Subject, points: &[Vec<Q>]) -> Check {
    let mut check = Check::new("oracle", &subject.name);
    let Some(cone) = &subject.cone else {
        check.detail = "no cone: skipped".into();
        return check;
    };
    for b in points {
        let (v, s) = match volume_and_scalar(&subject.dataset, b) {
            Ok(x) => x,
            Err(e) => {
                check.record(false, || format!("b = {}: {e}", format_rational_vec(b)));
                continue;
            }
        };
        let ov = oracle_volume(cone, b).map(|x| x.exact);
        let os = oracle_scalar(cone, b).map(|x| x.exact);
        check.record(ov.as_ref() == Ok(&v) && os.as_ref() == Ok(&s), || {
            format!("b = {}: V {v} vs {ov:?}, S {s} vs {os:?}", format_rational_vec(b))
        });
    }
    check
}

pub fn path_suite(subject: &Subject, points: &[Vec<Q>]) -> Check {
    let mut check = Check::new("path", &subject.name);
    let Some(cone) = &subject.cone else {
        check.detail = "no cone: skipped".into();
        return check;
    };
    let b_o = catalog::normal_sum(cone);
    for b in points {
        let direct = volume_and_scalar(&subject.dataset, b);
        let vertex = toric_vertex_sum(cone, &b_o, b).map(|(v, s)| (v.exact, s.exact));
        check.record(direct.is_ok() && direct == vertex, || {
            format!("b = {}: {direct:?} vs {vertex:?}", format_rational_vec(b))
        });
    }
    check
}

pub fn homogeneity_suite(subject: &Subject, points: &[Vec<Q>], rng: &mut ChaCha8Rng) -> Check {
    let mut check = Check::new("homogeneity", &subject.name);
    let ds = &subject.dataset;
    let n = ds.n as i32;
    for b in points {
        let t = random_scale(rng);
        let tb: Vec<Q> = b.iter().map(|x| x * &t).collect();
        let ok = (|| -> Result<bool, LocalizeError> {
            let (v, s) = volume_and_scalar(ds, b)?;
            let (tv, ts) = volume_and_scalar(ds, &tb)?;
            let h = combine(Functional::H, &v, &s, ds.n)?.exact;
            let th = combine(Functional::H, &tv, &ts, ds.n)?.exact;
            Ok(tv == v * t.pow(-(n + 1)) && ts == s * t.pow(-n) && th == h)
        })();
        check.record(ok == Ok(true), || format!("b = {}, t = {t}: {ok:?}", format_rational_vec(b)));
    }
    check
}

pub fn euler_suite(subject: &Subject, points: &[Vec<Q>]) -> Check {
    let mut check = Check::new("euler", &subject.name);
    let n = subject.dataset.n;
    for b in points {
        let ok = (|| -> Result<bool, LocalizeError> {
            let j = jet(&subject.dataset, b)?;
            let gh = j.gradient(Functional::H)?.exact;
            let nq = |x: usize| q_int(x as i64);
            Ok(dot_q(&j.grad_v, b) == -nq(n + 1) * &j.v && dot_q(&j.grad_s, b) == -nq(n) * &j.s && dot_q(&gh, b).is_zero())
        })();
        check.record(ok == Ok(true), || format!("b = {}: {ok:?}", format_rational_vec(b)));
    }
    check
}

/// Largest relative deviation of central finite differences (step `1e-6`
/// relative to `|b|`, exact arithmetic) from the exact gradients of `V`, `S`
/// and `H`. The scale for each functional is `max(|∇F|, |F| / |b|)`.
pub fn gradient_deviation(ds: &LocalizationDataset, b: &[Q]) -> Result<f64, LocalizeError> {
    let j = jet(ds, b)?;
    let top = b.iter().map(|x| x.abs()).max().unwrap_or_else(|| q_int(1));
    let h = top * q_frac(1, 1_000_000);
    let k = b.len();
    let mut fd = vec![vec![0.0; k]; 3];
    let values = |p: &[Q]| -> Result<[Q; 3], LocalizeError> {
        let (v, s) = volume_and_scalar(ds, p)?;
        let hh = combine(Functional::H, &v, &s, ds.n)?.exact;
        Ok([v, s, hh])
    };
    for i in 0..k {
        let mut plus = b.to_vec();
        let mut minus = b.to_vec();
        plus[i] += &h;
        minus[i] -= &h;
        let (fp, fm) = (values(&plus)?, values(&minus)?);
        for f in 0..3 {
            fd[f][i] = q_to_f64(&((&fp[f] - &fm[f]) / (&h * q_int(2))));
        }
    }
    let exact = [
        j.grad_v.clone(),
        j.grad_s.clone(),
        j.gradient(Functional::H)?.exact,
    ];
    let vals = [j.v.clone(), j.s.clone(), j.value(Functional::H)?.exact];
    let bnorm = b.iter().map(|x| q_to_f64(x).powi(2)).sum::<f64>().sqrt();
    let mut worst: f64 = 0.0;
    for f in 0..3 {
        let g: Vec<f64> = exact[f].iter().map(q_to_f64).collect();
        let gnorm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        let scale = gnorm.max(q_to_f64(&vals[f]).abs() / bnorm);
        let diff = g.iter().zip(&fd[f]).map(|(a, c)| (a - c).powi(2)).sum::<f64>().sqrt();
        worst = worst.max(diff / scale);
    }
    Ok(worst)
}

pub fn gradient_suite(subject: &Subject, points: &[Vec<Q>], tol: f64) -> Check {
    let mut check = Check::new("gradient", &subject.name);
    let mut worst: f64 = 0.0;
    for b in points {
        let dev = gradient_deviation(&subject.dataset, b);
        if let Ok(d) = dev {
            worst = worst.max(d);
        }
        check.record(dev.as_ref().is_ok_and(|&d| d <= tol), || format!("b = {}: {dev:?}", format_rational_vec(b)));
    }
    if check.passed {
        check.detail = format!("max relative deviation {worst:.2e}");
    }
    check
}

/// A point on the relative boundary of the slice meeting exactly one fiber
/// weight hyperplane, reached from the center along a random direction. Rays
/// on which a weight pairing vanishes identically are redrawn, since the
/// leading-term expansion needs a generic line.
pub fn boundary_target(problem: &SliceProblem, rng: &mut ChaCha8Rng) -> Vec<Q> {
    loop {
        let w: Vec<Q> = (0..problem.dataset.rank).map(|_| q_int(rng.gen_range(-10..=10))).collect();
        let u = problem.tangent(&w);
        if u.iter().all(|x| x.is_zero()) {
            continue;
        }
        let Some(p) = problem.exit_point(&problem.center, &u) else { continue };
        let hits = problem.dataset.components.iter().filter(|c| dot_q(&c.weights[0], &p).is_zero()).count();
        let back: Vec<Q> = problem.center.iter().zip(&p).map(|(c, x)| c - x).collect();
        if hits == 1 && !identically_zero_pairing(&problem.dataset, &p, &back) {
            return p;
        }
    }
}

/// Outcome of one boundary approach for all three functionals.
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryOutcome {
    pub ratios: [f64; 3],
    pub leading_coefficients: [f64; 3],
    pub passed: bool,
}

pub fn boundary_approach(problem: &SliceProblem, p: &[Q], steps: u32) -> Result<BoundaryOutcome, String> {
    let dir: Vec<Q> = problem.center.iter().zip(p).map(|(c, x)| c - x).collect();
    let mut ratios = [0.0; 3];
    let mut leading = [0.0; 3];
    let mut passed = true;
    for (i, f) in [Functional::V, Functional::S, Functional::H].into_iter().enumerate() {
        let mut pr = problem.clone();
        pr.target = f;
        let report = probe_boundary(&pr, p, steps).map_err(|e| e.to_string())?;
        let last = report.rows.last().map_or(f64::NAN, |r| r.value);
        ratios[i] = last / report.base_value;
        let lt = boundary_leading_term(f, &problem.dataset, p, &dir).map_err(|e| e.to_string())?;
        leading[i] = q_to_f64(&lt.coefficient);
        passed &= report.blows_up && lt.coefficient.is_positive() && lt.exponent > 0;
    }
    Ok(BoundaryOutcome { ratios, leading_coefficients: leading, passed })
}

pub fn boundary_suite(subject: &Subject, rays: usize, rng: &mut ChaCha8Rng) -> Check {
    let mut check = Check::new("boundary", &subject.name);
    let problem = match subject.slice(Functional::H) {
        Ok(p) => p,
        Err(e) => {
            check.fail(e.to_string());
            return check;
        }
    };
    for _ in 0..rays {
        let p = boundary_target(&problem, rng);
        let out = boundary_approach(&problem, &p, 12);
        check.record(out.as_ref().is_ok_and(|o| o.passed), || format!("p = {}: {out:?}", format_rational_vec(&p)));
    }
    check
}

/// Every suite on one subject.
pub fn run_subject(subject: &Subject, samples: usize, seed: u64) -> Vec<Check> {
    let mut rng = seeded_rng(seed);
    let vertices = subject.slice(Functional::H).map(|p| p.vertices).unwrap_or_default();
    let points: Vec<Vec<Q>> = (0..samples).map(|_| sample_point(subject, &vertices, &mut rng)).collect();
    let mut out = vec![
        oracle_suite(subject, &points),
        path_suite(subject, &points),
        homogeneity_suite(subject, &points, &mut rng),
        euler_suite(subject, &points),
        gradient_suite(subject, &points, 1e-6),
        boundary_suite(subject, samples.clamp(1, 5), &mut rng),
    ];
    out.retain(|c| !(c.samples == 0 && c.passed && c.detail.ends_with("skipped")));
    out
}
