//! Minimization over a transversal slice of the Reeb cone, boundary probes
//! and critical-ray census on two-dimensional subcones.
//!
//! Iterates are floats, but every function and gradient value is computed
//! exactly at the rational value of the iterate and rounded afterwards, so
//! nothing cancels catastrophically near weight hyperplanes.

use num_bigint::BigInt;
use num_traits::{FromPrimitive, One, Signed, Zero};
use serde::Serialize;

use crate::arith::{dot_q, format_rational, format_rational_vec, q_int, q_to_f64, rationalize, Q};
use crate::cone::{extreme_rays, GoodCone};
use crate::fixed_locus::LocalizationDataset;
use crate::lattice::{rank_q, to_q};
use crate::localize::{evaluate_auto, generic_direction, gradient_auto, jet, jet_auto, Functional, FunctionalValue, LocalizeError};

const GRID_BITS: usize = 50;
const PERTURB_BITS: usize = 40;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OptimizeError {
    #[error("normalization {0} is not positive on the closed Reeb cone")]
    NotTransversal(String),
    #[error("every start failed to converge")]
    NonConvergence,
    #[error("span vectors are linearly dependent")]
    DegenerateSpan,
    #[error("the plane meets the Reeb cone in less than a 2D subcone")]
    EmptySubcone,
    #[error("critical points at t = {0} and t = {1} cannot be separated")]
    GridTooCoarse(f64, f64),
    #[error("vertex index {0} out of range")]
    BadVertex(usize),
    #[error("point is not on the slice boundary")]
    NotOnBoundary,
    #[error(transparent)]
    Localize(#[from] LocalizeError),
}

#[derive(Debug, Clone)]
pub struct MinimizeOptions {
    /// Relative gradient tolerance: `|g| <= tol * max(1, |f|)`.
    pub tol: f64,
    pub max_iter: usize,
    pub starts: usize,
    pub seed: u64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions { tol: 1e-10, max_iter: 200, starts: 16, seed: 0 }
    }
}

/// `P = {b in closed Reeb cone : <ζ, b> = 1}` with its target functional.
#[derive(Debug, Clone)]
pub struct SliceProblem {
    pub dataset: LocalizationDataset,
    pub zeta: Vec<Q>,
    /// Covectors whose nonnegativity cuts out the closed Reeb cone.
    pub constraints: Vec<Vec<Q>>,
    pub vertices: Vec<Vec<Q>>,
    pub center: Vec<Q>,
    pub target: Functional,
    pub options: MinimizeOptions,
    center_f: Vec<f64>,
    /// Orthonormal basis of `ζ^perp`.
    basis_f: Vec<Vec<f64>>,
}

/// Build the slice. Without `zeta`, the sum of the ray generators of the
/// moment cone is used for cones and `Σ κ_0` for bare datasets.
pub fn build_slice(
    dataset: LocalizationDataset,
    cone: Option<&GoodCone>,
    zeta: Option<Vec<Q>>,
    target: Functional,
) -> Result<SliceProblem, OptimizeError> {
    let zeta = match (zeta, cone) {
        (Some(z), _) => z,
        (None, Some(c)) => {
            let rq = c.rays_q();
            (0..c.rank).map(|i| rq.iter().map(|r| r[i].clone()).sum()).collect()
        }
        (None, None) => dataset.kappa0_sum(),
    };
    let k = dataset.rank;
    let not_transversal = || OptimizeError::NotTransversal(format_rational_vec(&zeta));
    if zeta.len() != k {
        return Err(not_transversal());
    }
    let mut constraints: Vec<Vec<Q>> = Vec::new();
    for c in &dataset.components {
        let r = to_q(&crate::lattice::clear_denominators(&c.weights[0]));
        if !constraints.contains(&r) {
            constraints.push(r);
        }
    }
    if rank_q(&constraints) < k {
        return Err(not_transversal());
    }
    let (rays, _) = extreme_rays(&constraints);
    let mut vertices = Vec::new();
    for e in rays.iter().map(|r| to_q(r)) {
        let z = dot_q(&zeta, &e);
        if !z.is_positive() {
            return Err(not_transversal());
        }
        vertices.push(e.iter().map(|x| x / &z).collect::<Vec<Q>>());
    }
    let m = Q::from_integer(vertices.len().into());
    let center: Vec<Q> = (0..k).map(|i| vertices.iter().map(|v| v[i].clone()).sum::<Q>() / &m).collect();
    let basis_f = tangent_basis(&zeta.iter().map(q_to_f64).collect::<Vec<_>>());
    Ok(SliceProblem {
        dataset,
        zeta,
        constraints,
        vertices,
        center_f: center.iter().map(q_to_f64).collect(),
        center,
        target,
        options: MinimizeOptions::default(),
        basis_f,
    })
}

/// Orthonormal basis of the orthogonal complement of `z` (Gram-Schmidt).
fn tangent_basis(z: &[f64]) -> Vec<Vec<f64>> {
    let k = z.len();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut frame: Vec<Vec<f64>> = vec![z.iter().map(|x| x / norm(z)).collect()];
    let mut e: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    // prefer coordinate vectors least aligned with z
    e.sort_by(|a, b| {
        let da = dot_f(a, &frame[0]).abs();
        let db = dot_f(b, &frame[0]).abs();
        da.partial_cmp(&db).unwrap()
    });
    for mut v in e {
        for _ in 0..2 {
            for f in &frame {
                let c = dot_f(&v, f);
                v.iter_mut().zip(f).for_each(|(x, y)| *x -= c * y);
            }
        }
        let nv = norm(&v);
        if nv > 1e-8 {
            frame.push(v.iter().map(|x| x / nv).collect());
        }
        if frame.len() == k {
            break;
        }
    }
    frame.remove(0);
    frame
}

fn dot_f(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm_f(a: &[f64]) -> f64 {
    dot_f(a, a).sqrt()
}

/// One evaluation of the target at a slice point.
#[derive(Debug, Clone)]
struct Eval {
    value: f64,
    grad: Vec<f64>,
    /// The point lies on, or within 1e-12 of, a weight hyperplane.
    flagged: bool,
}

impl SliceProblem {
    pub fn dim(&self) -> usize {
        self.basis_f.len()
    }

    /// `b = center + B y`, rounded to the dyadic grid `2^-50 Z^k`.
    pub fn point(&self, y: &[f64]) -> Vec<Q> {
        let den = BigInt::one() << GRID_BITS;
        (0..self.dataset.rank)
            .map(|i| {
                let x = self.center_f[i] + self.basis_f.iter().zip(y).map(|(col, yj)| col[i] * yj).sum::<f64>();
                let num = BigInt::from_f64((x * (1u64 << GRID_BITS) as f64).round()).unwrap_or_default();
                Q::new(num, den.clone())
            })
            .collect()
    }

    pub fn point_f(&self, y: &[f64]) -> Vec<f64> {
        self.point(y).iter().map(q_to_f64).collect()
    }

    fn coords(&self, b: &[Q]) -> Vec<f64> {
        let d: Vec<f64> = b.iter().zip(&self.center).map(|(x, c)| q_to_f64(&(x - c))).collect();
        self.basis_f.iter().map(|col| dot_f(col, &d)).collect()
    }

    /// Constraint values `<c_i, b>`.
    fn slack(&self, b: &[Q]) -> Vec<f64> {
        self.constraints.iter().map(|c| q_to_f64(&dot_q(c, b))).collect()
    }

    /// Euclidean distance within the slice to its relative boundary.
    pub fn distance_to_boundary(&self, b: &[Q]) -> f64 {
        self.constraints
            .iter()
            .map(|c| {
                let cf: Vec<f64> = c.iter().map(q_to_f64).collect();
                let t: Vec<f64> = self.basis_f.iter().map(|col| dot_f(col, &cf)).collect();
                q_to_f64(&dot_q(c, b)) / norm_f(&t)
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_interior(&self, b: &[Q]) -> bool {
        self.constraints.iter().all(|c| dot_q(c, b).is_positive())
    }

    fn near_hyperplane(&self, b: &[Q]) -> bool {
        let bf: Vec<f64> = b.iter().map(q_to_f64).collect();
        let nb = norm_f(&bf);
        self.dataset.components.iter().flat_map(|c| &c.weights).any(|k| {
            let kf: Vec<f64> = k.iter().map(q_to_f64).collect();
            (dot_q(k, b).abs() / Q::from_float(norm_f(&kf) * nb).unwrap_or_else(|| q_int(1)))
                < Q::from_float(1e-12).unwrap()
        })
    }

    pub fn value_exact(&self, b: &[Q]) -> Result<(FunctionalValue, bool), LocalizeError> {
        evaluate_auto(self.target, &self.dataset, b)
    }

    fn eval(&self, y: &[f64]) -> Result<Eval, LocalizeError> {
        self.eval_at(&self.point(y), false)
    }

    /// Exact evaluation at `b`. On a weight hyperplane the point is either
    /// handed to the limit evaluator or shifted by `2^-40` along a generic
    /// direction; both cases are flagged.
    fn eval_at(&self, b: &[Q], exact_limit: bool) -> Result<Eval, LocalizeError> {
        let (jet, hit) = match jet(&self.dataset, b) {
            Ok(j) => (j, false),
            Err(LocalizeError::VanishingWeight { .. }) if !exact_limit => {
                let d = generic_direction(&self.dataset, b);
                let top = d.iter().map(|x| x.abs()).max().unwrap_or_else(Q::one);
                let eps = Q::new(BigInt::one(), BigInt::one() << PERTURB_BITS) / top;
                let shifted: Vec<Q> = b.iter().zip(&d).map(|(x, dx)| x + dx * &eps).collect();
                (jet_auto(&self.dataset, &shifted)?.0, true)
            }
            Err(LocalizeError::VanishingWeight { .. }) => (jet_auto(&self.dataset, b)?.0, true),
            Err(e) => return Err(e),
        };
        let (value, gf) = jet.to_f64(self.target)?;
        let grad = self.basis_f.iter().map(|col| dot_f(col, &gf)).collect();
        Ok(Eval { value, grad, flagged: hit || self.near_hyperplane(b) })
    }

    /// Largest step along `p` that keeps 10% of every constraint slack.
    fn max_step(&self, y: &[f64], p: &[f64]) -> f64 {
        let b = self.point(y);
        let slack = self.slack(&b);
        let dir: Vec<f64> = (0..self.dataset.rank).map(|i| self.basis_f.iter().zip(p).map(|(c, pj)| c[i] * pj).sum()).collect();
        self.constraints
            .iter()
            .zip(slack)
            .filter_map(|(c, s)| {
                let rate = dot_f(&c.iter().map(q_to_f64).collect::<Vec<_>>(), &dir);
                (rate < 0.0).then(|| 0.9 * s / -rate)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Finite-difference Hessian of the exact gradient.
    fn hessian(&self, y: &[f64]) -> Option<Vec<Vec<f64>>> {
        let m = self.dim();
        let h = 1e-6;
        let mut hess = vec![vec![0.0; m]; m];
        for j in 0..m {
            let mut yp = y.to_vec();
            let mut ym = y.to_vec();
            yp[j] += h;
            ym[j] -= h;
            if !self.is_interior(&self.point(&yp)) || !self.is_interior(&self.point(&ym)) {
                return None;
            }
            let gp = self.eval(&yp).ok()?.grad;
            let gm = self.eval(&ym).ok()?.grad;
            for i in 0..m {
                hess[i][j] = (gp[i] - gm[i]) / (2.0 * h);
            }
        }
        for i in 0..m {
            for j in 0..i {
                let s = 0.5 * (hess[i][j] + hess[j][i]);
                hess[i][j] = s;
                hess[j][i] = s;
            }
        }
        Some(hess)
    }

    fn newton_direction(&self, y: &[f64], g: &[f64]) -> Option<Vec<f64>> {
        let hess = self.hessian(y)?;
        let l = cholesky(&hess)?;
        let p = cholesky_solve(&l, &g.iter().map(|x| -x).collect::<Vec<_>>());
        (dot_f(&p, g) < 0.0).then_some(p)
    }

    fn converged(&self, e: &Eval) -> bool {
        norm_f(&e.grad) <= self.options.tol * e.value.abs().max(1.0)
    }

    fn run_start(&self, id: usize, y0: Vec<f64>) -> StartTrace {
        let mut trace = StartTrace {
            id,
            start: self.point_f(&y0),
            end: Vec::new(),
            iterations: 0,
            converged: false,
            value: f64::NAN,
            gradient_norm: f64::NAN,
            flagged_evaluations: 0,
            error: None,
        };
        let mut y = y0;
        let mut cur = match self.eval_at(&self.point(&y), true) {
            Ok(e) => e,
            Err(err) => {
                trace.error = Some(err.to_string());
                return trace;
            }
        };
        let mut flagged = usize::from(cur.flagged);
        for it in 0..self.options.max_iter {
            trace.iterations = it;
            if self.converged(&cur) {
                trace.converged = true;
                break;
            }
            let newton = self.newton_direction(&y, &cur.grad);
            let mut accepted = None;
            for (p, is_newton) in [(newton, true), (Some(cur.grad.iter().map(|x| -x).collect()), false)] {
                let Some(p) = p else { continue };
                let slope = dot_f(&p, &cur.grad);
                let mut alpha = if is_newton { 1.0 } else { 1.0 / norm_f(&cur.grad).max(1e-300) * 0.1 };
                alpha = alpha.min(self.max_step(&y, &p));
                for _ in 0..80 {
                    let yn: Vec<f64> = y.iter().zip(&p).map(|(a, b)| a + alpha * b).collect();
                    if let Ok(e) = self.eval(&yn) {
                        flagged += usize::from(e.flagged);
                        // below the rounding level of the value, a smaller gradient decides
                        let flat = e.value <= cur.value + 1e-13 * cur.value.abs()
                            && norm_f(&e.grad) < norm_f(&cur.grad);
                        if e.value <= cur.value + 1e-4 * alpha * slope || flat {
                            accepted = Some((yn, e));
                            break;
                        }
                    }
                    alpha *= 0.5;
                }
                if accepted.is_some() {
                    break;
                }
            }
            match accepted {
                Some((yn, e)) => {
                    y = yn;
                    cur = e;
                }
                None => break,
            }
        }
        if self.converged(&cur) {
            trace.converged = true;
        }
        if trace.converged {
            // plain Newton steps while the gradient keeps shrinking
            for _ in 0..5 {
                let Some(p) = self.newton_direction(&y, &cur.grad) else { break };
                let yn: Vec<f64> = y.iter().zip(&p).map(|(a, b)| a + b).collect();
                if !self.is_interior(&self.point(&yn)) {
                    break;
                }
                match self.eval(&yn) {
                    Ok(e) if norm_f(&e.grad) < norm_f(&cur.grad) => {
                        flagged += usize::from(e.flagged);
                        y = yn;
                        cur = e;
                    }
                    _ => break,
                }
            }
        }
        trace.end = self.point_f(&y);
        trace.value = cur.value;
        trace.gradient_norm = norm_f(&cur.grad);
        trace.flagged_evaluations = flagged;
        if !trace.converged {
            trace.error = Some(format!("no convergence after {} iterations", trace.iterations));
        }
        trace
    }

    /// Interior start points: the center, then Halton points mapped to convex
    /// weights on the vertices and pulled 10% toward the center.
    pub fn start_points(&self) -> Vec<Vec<f64>> {
        let m = self.vertices.len();
        let mut out = vec![vec![0.0; self.dim()]];
        let offset = self.options.seed.wrapping_mul(7919) + 1;
        for i in 1..self.options.starts as u64 {
            let idx = offset + i;
            let w: Vec<f64> = (0..m).map(|j| -(halton(idx, PRIMES[j % PRIMES.len()])).ln()).collect();
            let total: f64 = w.iter().sum();
            let mut b = vec![Q::zero(); self.dataset.rank];
            for (v, wj) in self.vertices.iter().zip(&w) {
                let c = Q::from_float(0.9 * wj / total).unwrap_or_else(Q::zero);
                b.iter_mut().zip(v).for_each(|(x, vi)| *x += vi * &c);
            }
            let tenth = Q::new(1.into(), 10.into());
            b.iter_mut().zip(&self.center).for_each(|(x, c)| *x += c * &tenth);
            out.push(self.coords(&b));
        }
        out
    }

    pub fn minimize(&self) -> Result<MinimizerReport, OptimizeError> {
        let traces: Vec<StartTrace> =
            self.start_points().into_iter().enumerate().map(|(i, y)| self.run_start(i, y)).collect();
        let good: Vec<&StartTrace> = traces.iter().filter(|t| t.converged).collect();
        if good.is_empty() {
            return Err(OptimizeError::NonConvergence);
        }
        let mut rays: Vec<CriticalRay> = Vec::new();
        for t in &good {
            let u = unit(&t.end);
            match rays.iter_mut().find(|r| angle(&unit(&r.b), &u) < 1e-6) {
                Some(r) => {
                    r.starts.push(t.id);
                    if t.gradient_norm < r.gradient_norm {
                        r.b = t.end.clone();
                        r.value = t.value;
                        r.gradient_norm = t.gradient_norm;
                    }
                }
                None => rays.push(CriticalRay {
                    b: t.end.clone(),
                    value: t.value,
                    gradient_norm: t.gradient_norm,
                    starts: vec![t.id],
                    global: false,
                }),
            }
        }
        for r in &mut rays {
            let b: Vec<Q> = r.b.iter().map(|&x| Q::from_float(x).unwrap_or_else(Q::zero)).collect();
            let e = self.eval_at(&b, true)?;
            r.value = e.value;
            r.gradient_norm = norm_f(&e.grad);
        }
        rays.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap());
        rays[0].global = true;
        let best = rays[0].clone();
        let certificate: Vec<Q> = best.b.iter().map(|&x| rationalize(x, 1_000_000)).collect();
        let (cert_value, _) = self.value_exact(&certificate)?;
        let cert_f = cert_value.to_f64();
        let rel = (cert_f - best.value).abs() / best.value.abs().max(f64::MIN_POSITIVE);
        let bq: Vec<Q> = best.b.iter().map(|&x| Q::from_float(x).unwrap_or_else(Q::zero)).collect();
        Ok(MinimizerReport {
            functional: self.target.to_string(),
            zeta: self.zeta.iter().map(format_rational).collect(),
            argmin: best.b.clone(),
            value: best.value,
            gradient_norm: best.gradient_norm,
            distance_to_boundary: self.distance_to_boundary(&bq),
            certificate: certificate.iter().map(format_rational).collect(),
            certificate_value: cert_value.to_string(),
            certificate_relative_change: rel,
            critical_rays: rays,
            starts: traces,
        })
    }

    /// Exit point of the ray `c + s u`, `s > 0`, from the slice.
    pub fn exit_point(&self, c: &[Q], u: &[Q]) -> Option<Vec<Q>> {
        let s = self
            .constraints
            .iter()
            .filter_map(|k| {
                let rate = dot_q(k, u);
                rate.is_negative().then(|| dot_q(k, c) / -rate)
            })
            .min()?;
        Some(c.iter().zip(u).map(|(a, b)| a + b * &s).collect())
    }

    /// Project a vector onto `ζ^perp` exactly.
    pub fn tangent(&self, w: &[Q]) -> Vec<Q> {
        let f = dot_q(&self.zeta, w) / dot_q(&self.zeta, &self.zeta);
        w.iter().zip(&self.zeta).map(|(a, z)| a - z * &f).collect()
    }

    pub fn on_boundary(&self, p: &[Q]) -> bool {
        self.constraints.iter().all(|c| !dot_q(c, p).is_negative())
            && self.constraints.iter().any(|c| dot_q(c, p).is_zero())
    }
}

const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Radical inverse of `i` in base `p`, in (0, 1) for `i >= 1`.
fn halton(mut i: u64, p: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= p as f64;
        r += f * (i % p) as f64;
        i /= p;
    }
    r
}

fn unit(v: &[f64]) -> Vec<f64> {
    let n = norm_f(v);
    v.iter().map(|x| x / n).collect()
}

fn angle(a: &[f64], b: &[f64]) -> f64 {
    // robust for tiny angles
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    2.0 * (0.5 * norm_f(&diff)).min(1.0).asin()
}

/// Angle between two rays.
pub fn ray_angle(a: &[f64], b: &[f64]) -> f64 {
    angle(&unit(a), &unit(b))
}

fn cholesky(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

fn cholesky_solve(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = l.len();
    let mut z = vec![0.0; n];
    for i in 0..n {
        z[i] = (b[i] - (0..i).map(|k| l[i][k] * z[k]).sum::<f64>()) / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        x[i] = (z[i] - (i + 1..n).map(|k| l[k][i] * x[k]).sum::<f64>()) / l[i][i];
    }
    x
}

#[derive(Debug, Clone, Serialize)]
pub struct StartTrace {
    pub id: usize,
    pub start: Vec<f64>,
    pub end: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub value: f64,
    pub gradient_norm: f64,
    /// Evaluations on or within 1e-12 of a weight hyperplane.
    pub flagged_evaluations: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalRay {
    pub b: Vec<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    pub starts: Vec<usize>,
    pub global: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimizerReport {
    pub functional: String,
    pub zeta: Vec<String>,
    pub argmin: Vec<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    pub distance_to_boundary: f64,
    pub certificate: Vec<String>,
    pub certificate_value: String,
    pub certificate_relative_change: f64,
    pub critical_rays: Vec<CriticalRay>,
    pub starts: Vec<StartTrace>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeRow {
    pub step: u32,
    pub b: Vec<f64>,
    pub value: f64,
    pub exact: String,
    pub limit: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub functional: String,
    pub boundary_point: Vec<String>,
    pub base_value: f64,
    pub rows: Vec<ProbeRow>,
    /// Final value exceeds `1e6` times the base value.
    pub blows_up: bool,
    /// Values increase over the last half of the steps.
    pub monotone_tail: bool,
    pub skipped: Vec<u32>,
}

/// Evaluate the target at `p + 10^-j (center - p)` for `j = 1..=steps`.
pub fn probe_boundary(problem: &SliceProblem, p: &[Q], steps: u32) -> Result<ProbeReport, OptimizeError> {
    if !problem.on_boundary(p) {
        return Err(OptimizeError::NotOnBoundary);
    }
    let (base, _) = problem.value_exact(&problem.center)?;
    let base_value = base.to_f64();
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    let mut eps = Q::one_tenth();
    for step in 1..=steps {
        let b: Vec<Q> = p.iter().zip(&problem.center).map(|(a, c)| a + (c - a) * &eps).collect();
        match problem.value_exact(&b) {
            Ok((v, limit)) => rows.push(ProbeRow {
                step,
                b: b.iter().map(q_to_f64).collect(),
                value: v.to_f64(),
                exact: v.to_string(),
                limit,
            }),
            Err(_) => skipped.push(step),
        }
        eps /= q_int(10);
    }
    let last = rows.last().map_or(f64::NAN, |r| r.value);
    let tail = &rows[rows.len() / 2..];
    Ok(ProbeReport {
        functional: problem.target.to_string(),
        boundary_point: p.iter().map(format_rational).collect(),
        base_value,
        blows_up: last > 1e6 * base_value,
        monotone_tail: tail.windows(2).all(|w| w[1].value > w[0].value),
        rows,
        skipped,
    })
}

trait OneTenth {
    fn one_tenth() -> Self;
}

impl OneTenth for Q {
    fn one_tenth() -> Q {
        Q::new(1.into(), 10.into())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CensusRay {
    /// Bracket `[t_lo, t_hi]` on the segment `(1-t) e_L + t e_R`.
    pub t_lo: String,
    pub t_hi: String,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Census {
    pub e_left: Vec<String>,
    pub e_right: Vec<String>,
    pub bracket_width: f64,
    pub rays: Vec<CensusRay>,
}

/// Boundary rays of the subcone `span(b1, b2) ∩ closed Reeb cone`.
pub fn subcone_edges(problem: &SliceProblem, b1: &[Q], b2: &[Q]) -> Result<(Vec<Q>, Vec<Q>), OptimizeError> {
    if rank_q(&[b1.to_vec(), b2.to_vec()]) < 2 {
        return Err(OptimizeError::DegenerateSpan);
    }
    // constraints in plane coordinates (α, β): a α + b β >= 0
    let cons: Vec<(Q, Q)> = problem.constraints.iter().map(|c| (dot_q(c, b1), dot_q(c, b2))).collect();
    let feasible = |x: &Q, y: &Q| cons.iter().all(|(a, b)| !(a * x + b * y).is_negative());
    let mut cands: Vec<(Q, Q)> = Vec::new();
    for (a, b) in &cons {
        for (x, y) in [(-b.clone(), a.clone()), (b.clone(), -a.clone())] {
            if (x.is_zero() && y.is_zero()) || !feasible(&x, &y) {
                continue;
            }
            cands.push((x, y));
        }
    }
    // the two extreme directions by angle
    let ang = |(x, y): &(Q, Q)| q_to_f64(y).atan2(q_to_f64(x));
    cands.sort_by(|p, q| ang(p).partial_cmp(&ang(q)).unwrap());
    let (Some(lo), Some(hi)) = (cands.first(), cands.last()) else { return Err(OptimizeError::EmptySubcone) };
    if (&lo.0 * &hi.1 - &lo.1 * &hi.0).is_zero() {
        return Err(OptimizeError::EmptySubcone);
    }
    let lift = |(x, y): &(Q, Q)| -> Vec<Q> {
        let v: Vec<Q> = b1.iter().zip(b2).map(|(p, q)| p * x + q * y).collect();
        let z = dot_q(&problem.zeta, &v);
        v.iter().map(|a| a / &z).collect()
    };
    Ok((lift(lo), lift(hi)))
}

/// Sign changes of `dH/dt` on the segment between the boundary rays of a 2D
/// subcone, located on a grid and refined by exact bisection.
pub fn critical_rays_2d(
    problem: &SliceProblem,
    b1: &[Q],
    b2: &[Q],
    grid: usize,
    refinements: u32,
) -> Result<Census, OptimizeError> {
    let (el, er) = subcone_edges(problem, b1, b2)?;
    let dir: Vec<Q> = er.iter().zip(&el).map(|(a, b)| a - b).collect();
    let at = |t: &Q| -> Vec<Q> { el.iter().zip(&dir).map(|(a, d)| a + d * t).collect() };
    let dsign = |t: &Q| -> Result<i32, OptimizeError> {
        let (g, _) = gradient_auto(Functional::H, &problem.dataset, &at(t))?;
        let d = dot_q(&g.exact, &dir);
        Ok(if d.is_positive() { 1 } else if d.is_negative() { -1 } else { 0 })
    };
    let den = Q::from_integer((grid + 1).into());
    let ts: Vec<Q> = (1..=grid).map(|i| Q::from_integer(i.into()) / &den).collect();
    let signs: Vec<i32> = ts.iter().map(&dsign).collect::<Result<_, _>>()?;
    let mut brackets: Vec<(Q, Q)> = Vec::new();
    for i in 0..ts.len() {
        if signs[i] == 0 {
            brackets.push((ts[i].clone(), ts[i].clone()));
        }
        if i + 1 < ts.len() && signs[i] * signs[i + 1] < 0 {
            let (mut lo, mut hi) = (ts[i].clone(), ts[i + 1].clone());
            let slo = signs[i];
            for _ in 0..refinements {
                let mid = (&lo + &hi) / q_int(2);
                match dsign(&mid)? {
                    0 => {
                        lo = mid.clone();
                        hi = mid;
                        break;
                    }
                    s if s == slo => lo = mid,
                    _ => hi = mid,
                }
            }
            brackets.push((lo, hi));
        }
    }
    let width = q_to_f64(&(Q::one_tenth() * q_int(10) / &den)) / 2f64.powi(refinements as i32);
    for w in brackets.windows(2) {
        let gap = q_to_f64(&(&w[1].0 - &w[0].1));
        if gap <= 2.0 * width {
            return Err(OptimizeError::GridTooCoarse(q_to_f64(&w[0].1), q_to_f64(&w[1].0)));
        }
    }
    let rays = brackets
        .iter()
        .map(|(lo, hi)| {
            let mid = (lo + hi) / q_int(2);
            CensusRay { t_lo: format_rational(lo), t_hi: format_rational(hi), b: at(&mid).iter().map(q_to_f64).collect() }
        })
        .collect();
    Ok(Census {
        e_left: el.iter().map(format_rational).collect(),
        e_right: er.iter().map(format_rational).collect(),
        bracket_width: width,
        rays,
    })
}

#[derive(Debug, Clone)]
pub struct ScanRow {
    pub t: Q,
    pub b: Vec<Q>,
    pub v: f64,
    pub s: f64,
    pub h: f64,
    pub dh_dt: f64,
}

/// `V, S, H, dH/dt` at `t = (i+1)/(grid+1)` on the segment `p0 -> p1`.
pub fn scan_segment(problem: &SliceProblem, p0: &[Q], p1: &[Q], grid: usize) -> Result<Vec<ScanRow>, OptimizeError> {
    let dir: Vec<Q> = p1.iter().zip(p0).map(|(a, b)| a - b).collect();
    let den = Q::from_integer((grid + 1).into());
    let ds = &problem.dataset;
    (0..grid)
        .map(|i| {
            let t = Q::from_integer((i + 1).into()) / &den;
            let b: Vec<Q> = p0.iter().zip(&dir).map(|(a, d)| a + d * &t).collect();
            let (v, _) = evaluate_auto(Functional::V, ds, &b)?;
            let (s, _) = evaluate_auto(Functional::S, ds, &b)?;
            let (h, _) = evaluate_auto(Functional::H, ds, &b)?;
            let (g, _) = gradient_auto(Functional::H, ds, &b)?;
            let dh = FunctionalValue { exact: dot_q(&g.exact, &dir), pi_power: g.pi_power };
            Ok(ScanRow { t, b, v: v.to_f64(), s: s.to_f64(), h: h.to_f64(), dh_dt: dh.to_f64() })
        })
        .collect()
}

/// Chord of the slice through its center parallel to `v_j - v_i`.
pub fn vertex_chord(problem: &SliceProblem, i: usize, j: usize) -> Result<(Vec<Q>, Vec<Q>), OptimizeError> {
    let nv = problem.vertices.len();
    for x in [i, j] {
        if x >= nv {
            return Err(OptimizeError::BadVertex(x));
        }
    }
    let u: Vec<Q> = problem.vertices[j].iter().zip(&problem.vertices[i]).map(|(a, b)| a - b).collect();
    if u.iter().all(|x| x.is_zero()) {
        return Err(OptimizeError::DegenerateSpan);
    }
    let back: Vec<Q> = u.iter().map(|x| -x).collect();
    let p0 = problem.exit_point(&problem.center, &back).ok_or(OptimizeError::DegenerateSpan)?;
    let p1 = problem.exit_point(&problem.center, &u).ok_or(OptimizeError::DegenerateSpan)?;
    Ok((p0, p1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q_vec;
    use crate::catalog;
    use crate::fixed_locus::dataset_from_cone;

    fn problem(name: &str, target: Functional, zeta: Option<Vec<Q>>) -> SliceProblem {
        let cone = catalog::get(name).unwrap();
        let ds = dataset_from_cone(&cone, &catalog::normal_sum(&cone)).unwrap();
        build_slice(ds, Some(&cone), zeta, target).unwrap()
    }

    #[test]
    fn default_slices() {
        let p = problem("orthant2", Functional::H, None);
        assert_eq!(p.zeta, q_vec(&[1, 1]));
        let mut v = p.vertices.clone();
        v.sort();
        assert_eq!(v, vec![q_vec(&[0, 1]), q_vec(&[1, 0])]);
        let cone = catalog::get("orthant2").unwrap();
        let ds = dataset_from_cone(&cone, &q_vec(&[1, 1])).unwrap();
        assert!(matches!(
            build_slice(ds, Some(&cone), Some(q_vec(&[1, -1])), Functional::H),
            Err(OptimizeError::NotTransversal(_))
        ));
    }

    #[test]
    fn three_sphere_minimum_is_round() {
        let p = problem("orthant2", Functional::H, None);
        let r = p.minimize().unwrap();
        assert!((r.argmin[0] - 0.5).abs() < 1e-9 && (r.argmin[1] - 0.5).abs() < 1e-9, "{:?}", r.argmin);
        assert!((r.value / std::f64::consts::PI.powi(2) - 128.0).abs() < 1e-9);
        assert_eq!(r.critical_rays.len(), 1);
    }

    #[test]
    fn halton_is_in_unit_interval() {
        for i in 1..100 {
            let h = halton(i, 3);
            assert!(h > 0.0 && h < 1.0);
        }
    }

    #[test]
    fn probe_three_sphere() {
        let p = problem("orthant2", Functional::H, None);
        let r = probe_boundary(&p, &q_vec(&[1, 0]), 10).unwrap();
        assert!(r.blows_up && r.monotone_tail);
    }

    #[test]
    fn census_on_the_three_sphere() {
        let p = problem("orthant2", Functional::H, None);
        let c = critical_rays_2d(&p, &q_vec(&[1, 0]), &q_vec(&[0, 1]), 20, 30).unwrap();
        assert_eq!(c.rays.len(), 1);
        assert!(matches!(
            critical_rays_2d(&p, &q_vec(&[1, 1]), &q_vec(&[2, 2]), 20, 30),
            Err(OptimizeError::DegenerateSpan)
        ));
    }

    #[test]
    fn five_sphere_minimum_is_diagonal() {
        let p = problem("orthant3", Functional::H, None);
        let r = p.minimize().unwrap();
        let d = [1.0 / 3.0; 3];
        assert!(ray_angle(&r.argmin, &d) < 1e-8, "{:?}", r.argmin);
        assert!(r.gradient_norm < 1e-10);
    }

    #[test]
    fn conifold_volume_minimum() {
        let p = problem("conifold", Functional::V, Some(vec![crate::arith::q_frac(1, 3), Q::zero(), Q::zero()]));
        let r = p.minimize().unwrap();
        let expect = 16.0 / 27.0 * std::f64::consts::PI.powi(3);
        assert!((r.value - expect).abs() / expect < 1e-9, "{} {:?}", r.value, r.argmin);
    }
}
