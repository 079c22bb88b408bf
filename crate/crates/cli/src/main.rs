use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use equilateral::bounds_lab::{
    ap_partition, approx_identity_certificate, e2_classify, known_bounds, lattice_round,
    lattice_window, minimax_abs_p, nonnegative_lift, numerical_rank, rank_lower_bound,
    smyth_matrix, ApproxPolynomial, IdentityCertificate, LatticeRounding, NormFamily,
    SmythMatrix, DEFAULT_AP_CONSTANT,
};
use equilateral::cayley_menger::{embed_metric, menger_check, DistanceMatrix, DEFAULT_TOL};
use equilateral::codes::greedy_sign_code;
use equilateral::constructions::{
    cross_polytope_set, flm_set, hypercube_set, petty_cone_example, simplex_with_apex,
    two_block_set, PointSet,
};
use equilateral::search::{
    energy_search, euclidean_comparison, extend_fixed_point_with, verify_equilateral,
    winding_certificate, DEFAULT_PLANE_SAMPLES,
};
use equilateral::{json, Error, Exponent, NormSpec};

#[derive(Parser)]
#[command(name = "equilateral", version, about = "Build, certify and search for equilateral sets in normed spaces")]
struct Cli {
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Seed for every randomised step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Tolerance override for commands that compare numbers.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    CrossPolytope,
    Hypercube,
    SimplexApex,
    TwoBlock,
    Flm,
    PettyCone,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Lp,
    StrictlyConvex,
    General,
}

#[derive(Subcommand)]
enum Command {
    /// Build one of the explicit equilateral sets.
    Construct {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        n: Option<usize>,
        /// Exponent for simplex-apex.
        #[arg(long)]
        p: Option<f64>,
        /// log2 of the Hadamard order for two-block.
        #[arg(long)]
        k: Option<u32>,
        /// Inner-product threshold for flm.
        #[arg(long)]
        delta: Option<f64>,
        /// Starting even exponent for the flm norm synthesis.
        #[arg(long, default_value_t = 2)]
        p_start: u32,
        /// Use the root λ > 0 of the apex equation instead of λ < 0.
        #[arg(long)]
        positive_root: bool,
    },
    /// Check that a point set is equilateral.
    Verify {
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Embed a distance matrix in Euclidean space.
    Embed {
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Signs of the prefix Cayley–Menger determinants.
    CmCheck {
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Known bounds on the largest equilateral set.
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "lp")]
        family: Family,
        /// Exponent for the lp family, a number or "inf".
        #[arg(long)]
        p: Option<String>,
    },
    /// Rank bounds for a matrix, or the lattice-rounding pipeline for a point set.
    LabRank {
        #[arg(long)]
        input: Option<PathBuf>,
        /// Lattice size N; chosen from the admissible window when omitted.
        #[arg(long)]
        grid: Option<u64>,
    },
    /// Polynomial approximation of |t|^p, optionally with the Smyth matrix of a point set.
    LabApprox {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Base/regular/singular interval partition of a point set in l_1.
    LabAp {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_AP_CONSTANT)]
        c: f64,
    },
    /// Greedy almost-orthogonal sign code.
    Code {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: f64,
    },
    /// Multi-start energy search for m equilateral points.
    Search {
        /// Norm as inline JSON or @path.
        #[arg(long)]
        norm: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Explicit seed list; defaults to seed, seed+1, … (--restarts values).
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        #[arg(long, default_value_t = 16)]
        restarts: u64,
    },
    /// Add one point to an equilateral set by the fixed-point method.
    Extend {
        #[arg(long)]
        input: Option<PathBuf>,
        /// Comparison constant; derived for l_p norms when omitted.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Euclidean scale α in ‖x‖ ≤ α‖x‖₂ ≤ (1 + ε)‖x‖.
        #[arg(long)]
        scale: Option<f64>,
    },
    /// Winding number certificate for extending {0, b, c}.
    Winding {
        #[arg(long)]
        norm: String,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        b: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        c: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_PLANE_SAMPLES)]
        samples: usize,
    },
    /// e(X) for a planar norm.
    Classify2d {
        #[arg(long)]
        norm: String,
    },
}

enum Failure {
    Validation(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

/// Lets `?` lift any module error through the crate-wide error.
macro_rules! core {
    ($e:expr) => {
        $e.map_err(|e| Failure::from(Error::from(e)))
    };
}

fn read_source(path: Option<&PathBuf>) -> Result<String, Failure> {
    match path {
        Some(p) => fs::read_to_string(p)
            .map_err(|e| Failure::Validation(format!("cannot read {}: {e}", p.display()))),
        None => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Failure::Validation(format!("cannot read stdin: {e}")))?;
            Ok(s)
        }
    }
}

fn parse<T: DeserializeOwned>(text: &str, what: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::Validation(format!("malformed {what}: {e}")))
}

fn read_input<T: DeserializeOwned>(path: Option<&PathBuf>, what: &str) -> Result<T, Failure> {
    parse(&read_source(path)?, what)
}

/// Inline JSON, or @path for a file.
fn parse_norm(arg: &str) -> Result<NormSpec, Failure> {
    let text = match arg.strip_prefix('@') {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| Failure::Validation(format!("cannot read {path}: {e}")))?,
        None => arg.to_string(),
    };
    parse(&text, "norm")
}

fn parse_exponent(s: &str) -> Result<Exponent, Failure> {
    if s == "inf" {
        return Ok(Exponent::Infinity);
    }
    s.parse::<f64>()
        .map(Exponent::Finite)
        .map_err(|_| Failure::Validation(format!("exponent {s:?} is neither a number nor \"inf\"")))
}

fn need<T>(value: Option<T>, flag: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::Validation(format!("--{flag} is required here")))
}

fn validated(set: PointSet) -> Result<PointSet, Failure> {
    core!(set.validate())?;
    Ok(set)
}

fn render<T: Serialize>(value: &T) -> Result<String, Failure> {
    json::to_string(value).map_err(|e| Failure::Numerical(format!("cannot serialise result: {e}")))
}

#[derive(Serialize)]
struct Embedding {
    n: usize,
    points: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct RankReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    lattice: Option<LatticeRounding>,
    numerical_rank: usize,
    rank_lower_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<IdentityCertificate>,
}

#[derive(Serialize)]
struct ApproxReport {
    polynomial: ApproxPolynomial,
    smyth: SmythMatrix,
}

#[derive(Serialize)]
struct Classification {
    e: u8,
}

fn run(cli: &Cli) -> Result<String, Failure> {
    match &cli.command {
        Command::Construct {
            kind,
            n,
            p,
            k,
            delta,
            p_start,
            positive_root,
        } => {
            let set = match kind {
                Kind::CrossPolytope => core!(cross_polytope_set(need(*n, "n")?))?,
                Kind::Hypercube => core!(hypercube_set(need(*n, "n")?))?,
                Kind::SimplexApex => {
                    core!(simplex_with_apex(need(*n, "n")?, need(*p, "p")?, *positive_root))?
                }
                Kind::TwoBlock => core!(two_block_set(need(*k, "k")?))?.0,
                Kind::Flm => core!(flm_set(need(*n, "n")?, need(*delta, "delta")?, *p_start))?.1,
                Kind::PettyCone => core!(petty_cone_example(need(*n, "n")?))?.1,
            };
            render(&set)
        }
        Command::Verify { input } => {
            let set = validated(read_input(input.as_ref(), "point set")?)?;
            let tol = cli.tol.unwrap_or(1e-9);
            render(&core!(verify_equilateral(&set.points, &set.norm, tol))?)
        }
        Command::Embed { input } => {
            let d: DistanceMatrix = read_input(input.as_ref(), "distance matrix")?;
            let points = core!(embed_metric(&d))?;
            render(&Embedding {
                n: d.m().saturating_sub(1),
                points,
            })
        }
        Command::CmCheck { input } => {
            let d: DistanceMatrix = read_input(input.as_ref(), "distance matrix")?;
            render(&core!(menger_check(&d, cli.tol.unwrap_or(DEFAULT_TOL)))?)
        }
        Command::Bounds { n, family, p } => {
            let family = match family {
                Family::Lp => NormFamily::Lp {
                    p: parse_exponent(&need(p.clone(), "p")?)?,
                },
                Family::StrictlyConvex => NormFamily::StrictlyConvex,
                Family::General => NormFamily::General,
            };
            render(&core!(known_bounds(*n, family))?)
        }
        Command::LabRank { input, grid } => {
            let value: Value = read_input(input.as_ref(), "lab-rank input")?;
            let (lattice, matrix) = if value.is_array() {
                let a: Vec<Vec<f64>> = parse(&value.to_string(), "matrix")?;
                (None, a)
            } else {
                let set: PointSet = validated(parse(&value.to_string(), "point set")?)?;
                let p = match set.norm {
                    NormSpec::Lp {
                        p: Exponent::Finite(p),
                    } => p,
                    _ => return Err(Failure::Validation("lattice rounding needs a finite l_p norm".into())),
                };
                let grid = match grid {
                    Some(g) => *g,
                    None => lattice_window(p, set.n, set.len()).ok_or_else(|| {
                        Failure::Validation("the lattice window contains no integer; pass --grid".into())
                    })?,
                };
                let r = core!(lattice_round(&set, grid))?;
                let q = r.q.clone();
                (Some(r), q)
            };
            let certificate = approx_identity_certificate(&matrix).ok();
            render(&RankReport {
                lattice,
                numerical_rank: core!(numerical_rank(&matrix))?,
                rank_lower_bound: core!(rank_lower_bound(&matrix))?,
                certificate,
            })
        }
        Command::LabApprox { p, degree, input } => {
            let poly = core!(minimax_abs_p(*p, *degree))?;
            match input {
                None => render(&poly),
                Some(path) => {
                    let set = validated(read_input(Some(path), "point set")?)?;
                    let smyth = core!(smyth_matrix(&set, &poly))?;
                    render(&ApproxReport {
                        polynomial: poly,
                        smyth,
                    })
                }
            }
        }
        Command::LabAp { input, c } => {
            let set = validated(read_input(input.as_ref(), "point set")?)?;
            let points = if set.points.iter().flatten().any(|&x| x < 0.0) {
                nonnegative_lift(&set.points)
            } else {
                set.points
            };
            render(&core!(ap_partition(&points, *c, cli.seed))?)
        }
        Command::Code { n, delta } => render(&core!(greedy_sign_code(*n, *delta))?),
        Command::Search {
            norm,
            n,
            m,
            seeds,
            restarts,
        } => {
            let norm = parse_norm(norm)?;
            let seeds = match seeds {
                Some(s) => s.clone(),
                None => (0..*restarts).map(|i| cli.seed.wrapping_add(i)).collect(),
            };
            render(&core!(energy_search(&norm, *n, *m, &seeds))?)
        }
        Command::Extend {
            input,
            epsilon,
            scale,
        } => {
            let set = validated(read_input(input.as_ref(), "point set")?)?;
            let derived = euclidean_comparison(&set.norm, set.n);
            let epsilon = match (epsilon, derived) {
                (Some(e), _) => *e,
                (None, Some((_, e))) => e,
                (None, None) => {
                    return Err(Failure::Validation("--epsilon is required for this norm".into()))
                }
            };
            let scale = scale.or(derived.map(|(s, _)| s)).unwrap_or(1.0);
            render(&core!(extend_fixed_point_with(&set.points, &set.norm, epsilon, scale))?)
        }
        Command::Winding {
            norm,
            b,
            c,
            samples,
        } => {
            let norm = parse_norm(norm)?;
            render(&core!(winding_certificate(&norm, b, c, *samples))?)
        }
        Command::Classify2d { norm } => {
            let norm = parse_norm(norm)?;
            render(&Classification {
                e: core!(e2_classify(&norm))?,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (message, code) = match run(&cli) {
        Ok(doc) => {
            let written = match &cli.output {
                Some(path) => fs::write(path, format!("{doc}\n")),
                None => writeln!(io::stdout(), "{doc}"),
            };
            match written {
                Ok(()) => return ExitCode::SUCCESS,
                Err(e) => (format!("cannot write output: {e}"), 2),
            }
        }
        Err(Failure::Validation(m)) => (m, 2),
        Err(Failure::Numerical(m)) => (m, 3),
    };
    eprintln!("error: {message}");
    ExitCode::from(code)
}
