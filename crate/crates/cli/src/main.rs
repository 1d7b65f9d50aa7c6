use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use reebcone::arith::{format_decimal, format_rational_vec, parse_rational_vec, Q};
use reebcone::catalog;
use reebcone::cone::GoodCone;
use reebcone::fixed_locus::{dataset_from_cone, LocalizationDataset};
use reebcone::io::{cone_to_json, load_cone, load_dataset, scan_csv, IoError};
use reebcone::localize::{evaluate_auto, Functional, LocalizeError};
use reebcone::optimize::{
    build_slice, critical_rays_2d, probe_boundary, scan_segment, subcone_edges, vertex_chord, OptimizeError,
    SliceProblem,
};
use reebcone::verify::{boundary_target, run_subject, seeded_rng, Subject};

const INVALID: u8 = 1;
const INFEASIBLE: u8 = 2;
const LIMIT_FAILED: u8 = 3;
const NO_CONVERGENCE: u8 = 4;
const VERIFY_FAILED: u8 = 5;

#[derive(Parser)]
#[command(name = "reebcone", version, about = "Volume, total transverse scalar curvature and Einstein-Hilbert functionals on Reeb cones")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a cone is good and report orbifold labels.
    Validate {
        /// `catalog:NAME` or a cone JSON file.
        cone: String,
    },
    /// Evaluate a functional at a Reeb vector.
    Eval {
        #[command(flatten)]
        input: Input,
        /// Comma-separated rationals, e.g. `1,3/2`.
        #[arg(long, allow_hyphen_values = true)]
        reeb: String,
        #[arg(long, default_value = "H")]
        functional: Functional,
        /// Print only the exact value.
        #[arg(long)]
        exact: bool,
    },
    /// Multi-start minimization over a transversal slice; prints JSON.
    Minimize {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "H")]
        functional: Functional,
        #[command(flatten)]
        slice: SliceArgs,
        #[arg(long, default_value_t = 16)]
        starts: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// CSV of V, S, H and dH/dt along a segment of the slice.
    Scan {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        slice: SliceArgs,
        /// Chord through the slice center parallel to `v_j - v_i` (1-based
        /// slice vertex indices).
        #[arg(long, conflicts_with = "span")]
        plane: Option<String>,
        /// Two vectors `b1;b2`; scans the 2D subcone they span.
        #[arg(long)]
        span: Option<String>,
        #[arg(long, default_value_t = 101)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Locate the critical rays of H in a 2D subcone; prints JSON.
    Census {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        slice: SliceArgs,
        /// Two vectors `b1;b2` spanning the subcone.
        #[arg(long)]
        span: String,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        /// Bisection steps per bracket.
        #[arg(long, default_value_t = 40)]
        refine: u32,
    },
    /// Evaluate along a geometric approach to the slice boundary; prints JSON.
    ProbeBoundary {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "H")]
        functional: Functional,
        #[command(flatten)]
        slice: SliceArgs,
        /// Boundary point (rescaled onto the slice); random when omitted.
        #[arg(long)]
        toward: Option<String>,
        #[arg(long, default_value_t = 12)]
        steps: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Export the localization dataset of a cone as JSON.
    Dataset {
        cone: String,
        /// Quasi-regular slicing field; defaults to the sum of the normals.
        #[arg(long)]
        slicing: Option<String>,
    },
    /// List built-in cones, or print one as cone JSON.
    Catalog { name: Option<String> },
    /// Run the self-consistency suites.
    Verify {
        /// Cone to check; the whole catalog when neither input is given.
        #[arg(long, conflicts_with = "dataset")]
        cone: Option<String>,
        /// Localization dataset JSON file; skips the cone-only suites.
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct Input {
    /// `catalog:NAME` or a cone JSON file.
    #[arg(long, conflicts_with = "dataset", required_unless_present = "dataset")]
    cone: Option<String>,
    /// Localization dataset JSON file.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Slicing field used to build the dataset of a cone.
    #[arg(long)]
    slicing: Option<String>,
}

#[derive(Args)]
struct SliceArgs {
    /// Normalization covector of the slice `<zeta, b> = 1`.
    #[arg(long, allow_hyphen_values = true)]
    zeta: Option<String>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl ToString) -> Failure {
        Failure { code, message: message.to_string() }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::new(INVALID, e)
    }
}

impl From<LocalizeError> for Failure {
    fn from(e: LocalizeError) -> Self {
        Failure::new(LIMIT_FAILED, e)
    }
}

impl From<OptimizeError> for Failure {
    fn from(e: OptimizeError) -> Self {
        let code = match e {
            OptimizeError::NonConvergence | OptimizeError::GridTooCoarse(..) => NO_CONVERGENCE,
            OptimizeError::Localize(_) => LIMIT_FAILED,
            OptimizeError::NotOnBoundary => INFEASIBLE,
            _ => INVALID,
        };
        Failure::new(code, e)
    }
}

fn rationals(s: &str) -> Result<Vec<Q>, Failure> {
    parse_rational_vec(s).map_err(|e| Failure::new(INVALID, e))
}

fn two_vectors(s: &str) -> Result<(Vec<Q>, Vec<Q>), Failure> {
    match s.split(';').collect::<Vec<_>>().as_slice() {
        [a, b] => Ok((rationals(a)?, rationals(b)?)),
        _ => Err(Failure::new(INVALID, format!("expected two vectors `b1;b2`, got `{s}`"))),
    }
}

fn check_rank(v: &[Q], rank: usize, what: &str) -> Result<(), Failure> {
    if v.len() != rank {
        return Err(Failure::new(INVALID, format!("{what} has {} entries, expected {rank}", v.len())));
    }
    Ok(())
}

fn load(input: &Input) -> Result<(Option<GoodCone>, LocalizationDataset), Failure> {
    match (&input.cone, &input.dataset) {
        (Some(src), _) => {
            let cone = load_cone(src)?;
            let b_o = match &input.slicing {
                Some(s) => rationals(s)?,
                None => catalog::normal_sum(&cone),
            };
            check_rank(&b_o, cone.rank, "slicing field")?;
            let ds = dataset_from_cone(&cone, &b_o).map_err(|e| Failure::new(INVALID, e))?;
            Ok((Some(cone), ds))
        }
        (None, Some(path)) => {
            let ds = load_dataset(path)?;
            ds.validate().map_err(|e| Failure::new(INVALID, e))?;
            Ok((None, ds))
        }
        (None, None) => Err(Failure::new(INVALID, "either --cone or --dataset is required")),
    }
}

fn problem(input: &Input, slice: &SliceArgs, target: Functional) -> Result<SliceProblem, Failure> {
    let (cone, ds) = load(input)?;
    let zeta = slice.zeta.as_deref().map(rationals).transpose()?;
    Ok(build_slice(ds, cone.as_ref(), zeta, target)?)
}

fn json(value: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(value).expect("serializable report")
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Validate { cone } => {
            let cone = load_cone(&cone)?;
            let mut out = format!(
                "good cone{}: rank {}, {} facets, {} rays\n",
                cone.name.as_deref().map(|n| format!(" `{n}`")).unwrap_or_default(),
                cone.rank,
                cone.normals.len(),
                cone.rays.len()
            );
            for w in &cone.warnings {
                out.push_str(&format!("warning: {w}\n"));
            }
            Ok(out)
        }
        Command::Eval { input, reeb, functional, exact } => {
            let (cone, ds) = load(&input)?;
            let b = rationals(&reeb)?;
            check_rank(&b, ds.rank, "Reeb vector")?;
            let inside = match &cone {
                Some(c) => c.reeb_cone_contains(&b),
                None => ds.components.iter().all(|c| reebcone::arith::dot_q(&c.weights[0], &b) > Q::from_integer(0.into())),
            };
            if !inside {
                return Err(Failure::new(INFEASIBLE, format!("{} is not in the open Reeb cone", format_rational_vec(&b))));
            }
            let (value, limit) = evaluate_auto(functional, &ds, &b)?;
            let mut out = format!("{value}\n");
            if !exact {
                out.push_str(&format!("{}\n", format_decimal(value.to_f64())));
            }
            if limit {
                out.push_str("note: b lies on a weight hyperplane; value taken as a limit\n");
            }
            Ok(out)
        }
        Command::Minimize { input, functional, slice, starts, tol, max_iter, seed } => {
            let mut p = problem(&input, &slice, functional)?;
            p.options.starts = starts.max(1);
            p.options.tol = tol;
            p.options.max_iter = max_iter;
            p.options.seed = seed;
            Ok(json(&p.minimize()?) + "\n")
        }
        Command::Scan { input, slice, plane, span, grid, out } => {
            let p = problem(&input, &slice, Functional::H)?;
            let (p0, p1) = match (plane, span) {
                (_, Some(span)) => {
                    let (b1, b2) = two_vectors(&span)?;
                    check_rank(&b1, p.dataset.rank, "span vector")?;
                    check_rank(&b2, p.dataset.rank, "span vector")?;
                    subcone_edges(&p, &b1, &b2)?
                }
                (Some(plane), None) => {
                    let idx: Vec<usize> = plane
                        .split(',')
                        .map(|s| s.trim().parse::<usize>())
                        .collect::<Result<_, _>>()
                        .map_err(|e| Failure::new(INVALID, format!("--plane: {e}")))?;
                    match idx.as_slice() {
                        [i, j] if *i >= 1 && *j >= 1 => vertex_chord(&p, i - 1, j - 1)?,
                        _ => return Err(Failure::new(INVALID, "--plane expects two 1-based vertex indices `i,j`")),
                    }
                }
                (None, None) => vertex_chord(&p, 0, 1)?,
            };
            let csv = scan_csv(&scan_segment(&p, &p0, &p1, grid)?, p.dataset.rank);
            match out {
                Some(path) => {
                    std::fs::write(&path, csv).map_err(|e| Failure::new(INVALID, format!("{}: {e}", path.display())))?;
                    Ok(String::new())
                }
                None => Ok(csv),
            }
        }
        Command::Census { input, slice, span, grid, refine } => {
            let p = problem(&input, &slice, Functional::H)?;
            let (b1, b2) = two_vectors(&span)?;
            check_rank(&b1, p.dataset.rank, "span vector")?;
            check_rank(&b2, p.dataset.rank, "span vector")?;
            Ok(json(&critical_rays_2d(&p, &b1, &b2, grid, refine)?) + "\n")
        }
        Command::ProbeBoundary { input, functional, slice, toward, steps, seed } => {
            let p = problem(&input, &slice, functional)?;
            let target = match toward {
                Some(s) => {
                    let v = rationals(&s)?;
                    check_rank(&v, p.dataset.rank, "boundary point")?;
                    let z = reebcone::arith::dot_q(&p.zeta, &v);
                    if z <= Q::from_integer(0.into()) {
                        return Err(Failure::new(INFEASIBLE, "boundary point is not on the positive side of the slice"));
                    }
                    v.iter().map(|x| x / &z).collect()
                }
                None => boundary_target(&p, &mut seeded_rng(seed)),
            };
            Ok(json(&probe_boundary(&p, &target, steps)?) + "\n")
        }
        Command::Dataset { cone, slicing } => {
            let cone = load_cone(&cone)?;
            let b_o = match slicing {
                Some(s) => rationals(&s)?,
                None => catalog::normal_sum(&cone),
            };
            check_rank(&b_o, cone.rank, "slicing field")?;
            let ds = dataset_from_cone(&cone, &b_o).map_err(|e| Failure::new(INVALID, e))?;
            Ok(json(&ds.to_json()) + "\n")
        }
        Command::Catalog { name: None } => Ok(catalog::entries()
            .iter()
            .map(|e| format!("{:<12} {}\n", e.name, e.description))
            .collect::<String>()
            + "ypq:P,Q      Y^{p,q} for any 0 < q < p\n"),
        Command::Catalog { name: Some(name) } => {
            let cone = catalog::get(&name).map_err(|e| Failure::new(INVALID, e))?;
            Ok(json(&cone_to_json(&cone)) + "\n")
        }
        Command::Verify { cone, dataset, samples, seed } => {
            let subjects: Vec<Subject> = match (cone, dataset) {
                (Some(src), _) => vec![Subject::from_cone(load_cone(&src)?).map_err(|e| Failure::new(INVALID, e))?],
                (None, Some(path)) => {
                    let ds = load_dataset(&path)?;
                    ds.validate().map_err(|e| Failure::new(INVALID, e))?;
                    vec![Subject::from_dataset(&path.display().to_string(), ds)]
                }
                (None, None) => catalog::names()
                    .into_iter()
                    .map(|n| Subject::from_cone(catalog::get(n).expect("catalog entry")).expect("catalog cone"))
                    .collect(),
            };
            let mut out = String::new();
            let mut failed = 0;
            for s in &subjects {
                for c in run_subject(s, samples, seed) {
                    failed += usize::from(!c.passed);
                    let status = if c.passed { "PASS" } else { "FAIL" };
                    out.push_str(&format!("{status} {:<12} {:<12} n={:<3} {}\n", c.suite, c.subject, c.samples, c.detail));
                }
            }
            if failed > 0 {
                print!("{out}");
                return Err(Failure::new(VERIFY_FAILED, format!("{failed} check(s) failed")));
            }
            Ok(out)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
