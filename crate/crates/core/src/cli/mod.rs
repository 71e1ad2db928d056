//! Command-line front end.
//!
//! Exit status: 0 on success, 1 when a checked bound is violated (or a
//! replayed report does not reproduce), 2 on usage, input or resource errors.

mod report;

pub use report::{content_digest, report_schema, Envelope, VerifyEnvelope, TOOL_VERSION};

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::clp::{
    diagonal_slice_rank_bounds, slice_decompose, sum_tensor, verify_clp_bound, DiagonalReport,
    SizeGuard,
};
use crate::error::Error;
use crate::family::{
    binom_sum, embed_01, format_family_text, generate_family, k_fold_sumset, pairwise_family,
    parse_family_text, FamilyKind, PointSet, SetFamily, SetOp,
};
use crate::interpolation::{
    deg_on_set, evaluation_matrix, find_unshattered_witness, int_deg, monomial_basis,
    represent_monomial, PartialFunction, ReducedPolynomial,
};
use crate::vc::{is_shattered, shattered_sets};
use crate::verify::{
    counterexample_demo, exhaustive_scan_with, instance_report, random_scan_with,
    search_open_question, Question, ScanMode, ScanOptions, SearchMode, SearchSpec, TheoremId,
    VerificationReport,
};

/// Which subcommand reaches each library operation.
pub const OPERATION_COVERAGE: &[(&str, &str)] = &[
    ("binom_sum", "vcdim"),
    ("pairwise_family", "family-op"),
    ("k_fold_sumset", "family-op"),
    ("embed_01", "family-op"),
    ("generate_family", "gen-family"),
    ("is_shattered", "vcdim"),
    ("shattered_sets", "vcdim"),
    ("vc_dim", "vcdim"),
    ("monomial_count", "intdeg"),
    ("monomial_basis", "intdeg"),
    ("evaluation_matrix", "intdeg"),
    ("rank", "clp-rank"),
    ("deg_on_set", "intdeg"),
    ("int_deg", "intdeg"),
    ("find_unshattered_witness", "vcdim"),
    ("represent_monomial", "intdeg"),
    ("clp_matrix", "clp-rank"),
    ("verify_clp_bound", "clp-rank"),
    ("slice_decompose", "slice-decompose"),
    ("sum_tensor", "slice-decompose"),
    ("diagonal_slice_rank_bounds", "slice-decompose"),
    ("check_instance", "verify"),
    ("exhaustive_scan", "verify"),
    ("random_scan", "verify"),
    ("counterexample_demo", "demo-counterexample"),
    ("search_open_question", "search"),
    ("report_schema", "schema"),
];

#[derive(Debug, Parser)]
#[command(
    name = "sumset-vc",
    version,
    about = "VC dimension, interpolation degree and CLP bounds for set families"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Output format (default depends on the subcommand)
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for scans [default: available parallelism]
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Record wall-clock time in reports (breaks byte-for-byte reproducibility)
    #[arg(long, global = true)]
    pub timing: bool,
    /// Suppress progress lines on standard error
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Largest p^n for CLP matrices
    #[arg(long, global = true, default_value_t = 4096)]
    pub max_clp_dim: u64,
    /// Largest p^(k*n) grid for slice decompositions
    #[arg(long, global = true, default_value_t = 1 << 24)]
    pub max_grid: u64,
    /// Largest |A|^k for dense sum tensors
    #[arg(long, global = true, default_value_t = 1 << 24)]
    pub max_tensor_entries: u64,
}

impl CommonArgs {
    fn guard(&self) -> SizeGuard {
        SizeGuard {
            max_clp_dim: self.max_clp_dim,
            max_grid: self.max_grid,
            max_tensor_entries: self.max_tensor_entries,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Lowweight,
    Highweight,
    Powerset,
    Random,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OpArg {
    SymDiff,
    Intersect,
    Union,
    Sum,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DemoOpArg {
    Intersect,
    Union,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Exhaustive,
    Random,
    Instance,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SearchModeArg {
    Exhaustive,
    Heuristic,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum QuestionArg {
    Q1,
    Q2,
}

#[derive(Debug, Args)]
pub struct PolyArgs {
    /// Field modulus
    #[arg(long, default_value_t = 2)]
    pub p: u64,
    /// Number of variables (defaults to the family's n when --in is given)
    #[arg(long)]
    pub n: Option<u32>,
    /// Terms as "coefficient:e1,...,en" separated by ';'
    #[arg(long, conflicts_with_all = ["indicator_zero", "random_degree"])]
    pub poly: Option<String>,
    /// Use the indicator of the origin, prod_i (1 - x_i^(p-1))
    #[arg(long, conflicts_with = "random_degree")]
    pub indicator_zero: bool,
    /// Use a seeded random polynomial of this exact degree
    #[arg(long)]
    pub random_degree: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// VC dimension, shattered sets and unshattered witnesses of a family
    Vcdim {
        #[arg(long = "in")]
        input: PathBuf,
        /// Test whether this set (n binary digits) is shattered
        #[arg(long)]
        y: Option<String>,
        /// List every shattered set level by level
        #[arg(long)]
        levels: bool,
        /// Smallest absent pattern on this set (n binary digits)
        #[arg(long)]
        witness: Option<String>,
    },
    /// Interpolation degree of a point set
    Intdeg {
        #[arg(long = "in")]
        input: PathBuf,
        /// Minimal degree of the function with these comma-separated values
        #[arg(long)]
        values: Option<String>,
        /// Low-degree representation of the monomial x_S on the family (p = 2)
        #[arg(long)]
        represent: Option<String>,
        /// List the monomial basis of this degree and its evaluation rank
        #[arg(long)]
        basis: Option<u64>,
    },
    /// Pairwise families A*B and k-fold sumsets
    FamilyOp {
        #[arg(long = "in")]
        input: PathBuf,
        /// Second family (defaults to the first)
        #[arg(long = "in2")]
        input2: Option<PathBuf>,
        #[arg(long, value_enum)]
        op: OpArg,
        /// Number of summands for --op sum
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Embed a 0/1 family into F_p^n before summing
        #[arg(long)]
        p: Option<u64>,
    },
    /// Rank of the CLP matrix P(x+y) against 2*m_{floor(d/2)}(p,n)
    ClpRank {
        #[command(flatten)]
        poly: PolyArgs,
    },
    /// Slice-rank decomposition of f(X1+...+Xk), optionally with the sum tensor on a family
    SliceDecompose {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Family whose 0/1 points span the axes of the sum tensor
        #[arg(long = "in")]
        input: Option<PathBuf>,
    },
    /// Check a bound exhaustively, on seeded random instances, or on one family
    Verify {
        #[arg(long)]
        theorem: String,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, value_enum, default_value = "exhaustive")]
        mode: ModeArg,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Family file for --mode instance
        #[arg(long = "in")]
        input: Option<PathBuf>,
    },
    /// Families closed under intersection or union that exceed the sumset bound
    DemoCounterexample {
        #[arg(long, value_enum)]
        op: DemoOpArg,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: u32,
    },
    /// Finite search for large families under the open-question constraints
    Search {
        #[arg(long, value_enum)]
        question: QuestionArg,
        #[arg(long)]
        n: u32,
        /// Single d (default: every d in 0..=n)
        #[arg(long)]
        d: Option<u32>,
        #[arg(long, value_enum, default_value = "exhaustive")]
        mode: SearchModeArg,
        /// Constraint evaluations per row in heuristic mode
        #[arg(long, default_value_t = 20000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a family generated by a named construction
    GenFamily {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        d: Option<u32>,
        /// Number of members for --kind random
        #[arg(long)]
        size: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the JSON schema of verification reports
    Schema,
    /// Re-run a saved verification report and compare digests
    Replay {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

/// A usage, input or resource error (exit status 2).
#[derive(Debug)]
enum Failure {
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

/// Output of one run.
struct Output {
    body: String,
    /// Set when a bound failed; the body is still written.
    violation: Option<String>,
}

impl Output {
    fn ok(body: String) -> Self {
        Output {
            body,
            violation: None,
        }
    }
}

fn read_points(path: &Path) -> CliResult<PointSet> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_family_text(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_family(path: &Path) -> CliResult<SetFamily> {
    let points = read_points(path)?;
    points
        .to_set_family()
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// Parses `n` binary digits, coordinate 1 first.
fn parse_mask(s: &str, n: u32) -> CliResult<u64> {
    if s.len() != n as usize || !s.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Failure::Usage(format!(
            "'{s}' is not a string of {n} binary digits"
        )));
    }
    Ok(s.bytes()
        .enumerate()
        .fold(0, |acc, (i, b)| acc | (u64::from(b - b'0') << i)))
}

fn format_mask(mask: u64, n: u32) -> String {
    (0..n)
        .map(|i| if mask >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for row in rows {
        w.write_record(row).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
}

fn unsupported(format: Format, command: &str) -> Failure {
    Failure::Usage(format!("format {format:?} is not supported by {command}").to_lowercase())
}

fn build_polynomial(args: &PolyArgs, n: u32) -> CliResult<ReducedPolynomial> {
    let poly = if let Some(terms) = &args.poly {
        ReducedPolynomial::parse_terms(args.p, n, terms)?
    } else if args.indicator_zero {
        ReducedPolynomial::indicator_of_zero(args.p, n)?
    } else if let Some(d) = args.random_degree {
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
        ReducedPolynomial::random(args.p, n, d, &mut rng)?
    } else {
        return Err(Failure::Usage(
            "one of --poly, --indicator-zero or --random-degree is required".into(),
        ));
    };
    Ok(poly)
}

struct Ctx<'a> {
    common: &'a CommonArgs,
    echo: String,
    started: Instant,
}

impl Ctx<'_> {
    fn timing(&self) -> Option<u64> {
        self.common
            .timing
            .then(|| self.started.elapsed().as_millis() as u64)
    }

    fn format_or(&self, default: Format) -> Format {
        self.common.format.unwrap_or(default)
    }

    fn envelope<T: Serialize>(&self, kind: &'static str, result: T) -> String {
        to_json(&Envelope::new(
            kind,
            result,
            self.echo.clone(),
            self.timing(),
        ))
    }

    fn scan_options(&self) -> ScanOptions {
        ScanOptions {
            workers: self.common.workers,
            progress: !self.common.quiet,
            guard: self.common.guard(),
        }
    }
}

#[derive(Serialize)]
struct ShatterQuery {
    set: String,
    shattered: bool,
}

#[derive(Serialize)]
struct WitnessOut {
    set: String,
    pattern: String,
}

#[derive(Serialize)]
struct VcOut {
    ground_size: u32,
    family_size: usize,
    vc_dim: u32,
    sauer_bound: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    shattered_sets_by_level: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    query: Option<ShatterQuery>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<WitnessOut>,
}

fn cmd_vcdim(
    ctx: &Ctx,
    input: &Path,
    y: Option<&str>,
    levels: bool,
    witness: Option<&str>,
) -> CliResult<Output> {
    let a = read_family(input)?;
    let n = a.ground_size();
    let report = shattered_sets(&a)?;
    let query = y
        .map(|s| -> CliResult<ShatterQuery> {
            let mask = parse_mask(s, n)?;
            Ok(ShatterQuery {
                set: s.to_string(),
                shattered: is_shattered(&a, mask)?,
            })
        })
        .transpose()?;
    let witness = witness
        .map(|s| -> CliResult<WitnessOut> {
            let mask = parse_mask(s, n)?;
            let v = find_unshattered_witness(&a, mask)?;
            let pattern = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| if v.values >> i & 1 == 1 { '1' } else { '0' })
                .collect();
            Ok(WitnessOut {
                set: s.to_string(),
                pattern,
            })
        })
        .transpose()?;
    let out = VcOut {
        ground_size: n,
        family_size: a.len(),
        vc_dim: report.vc_dim,
        sauer_bound: binom_sum(u64::from(n), u64::from(report.vc_dim))?,
        shattered_sets_by_level: levels.then(|| {
            report
                .shattered_sets_by_level
                .iter()
                .map(|level| level.iter().map(|&m| format_mask(m, n)).collect())
                .collect()
        }),
        query,
        witness,
    };
    Ok(Output::ok(match ctx.format_or(Format::Text) {
        Format::Json => ctx.envelope("vcdim", out),
        Format::Text => {
            let mut s = format!("{}\n", out.vc_dim);
            if let Some(levels) = &out.shattered_sets_by_level {
                for (k, level) in levels.iter().enumerate() {
                    s.push_str(&format!("level {k}: {}\n", level.join(" ")));
                }
            }
            if let Some(q) = &out.query {
                s.push_str(&format!("shattered {}: {}\n", q.set, q.shattered));
            }
            if let Some(w) = &out.witness {
                s.push_str(&format!("witness {}: {}\n", w.set, w.pattern));
            }
            s
        }
        f => return Err(unsupported(f, "vcdim")),
    }))
}

#[derive(Serialize)]
struct BasisOut {
    max_degree: u32,
    count: usize,
    monomials: Vec<String>,
    evaluation_rank: usize,
}

#[derive(Serialize)]
struct IntdegOut {
    modulus: u64,
    dimension: u32,
    domain_size: usize,
    int_deg: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    deg_on_set: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    representation: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    basis: Option<BasisOut>,
}

fn cmd_intdeg(
    ctx: &Ctx,
    input: &Path,
    values: Option<&str>,
    represent: Option<&str>,
    basis: Option<u64>,
) -> CliResult<Output> {
    let domain = read_points(input)?;
    let degree = int_deg(&domain)?;
    let deg_f = values
        .map(|v| -> CliResult<u32> {
            let vals = v
                .split(',')
                .map(|x| x.trim().parse::<u64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| Failure::Usage(format!("malformed value list '{v}'")))?;
            Ok(deg_on_set(&PartialFunction::new(domain.clone(), vals)?)?)
        })
        .transpose()?;
    let representation = represent
        .map(|s| -> CliResult<Vec<String>> {
            if domain.modulus() != 2 {
                return Err(Failure::Usage("--represent needs a p=2 family".into()));
            }
            let family = domain.to_set_family()?;
            let mask = parse_mask(s, family.ground_size())?;
            Ok(represent_monomial(&family, mask)?.to_term_strings())
        })
        .transpose()?;
    let basis = basis
        .map(|d| -> CliResult<BasisOut> {
            let b = monomial_basis(domain.modulus(), domain.dimension(), d)?;
            let m = evaluation_matrix(&domain, &b)?;
            Ok(BasisOut {
                max_degree: b.max_degree,
                count: b.len(),
                monomials: b.monomials.iter().map(|m| m.to_exponent_string()).collect(),
                evaluation_rank: m.rank(),
            })
        })
        .transpose()?;
    let out = IntdegOut {
        modulus: domain.modulus(),
        dimension: domain.dimension(),
        domain_size: domain.len(),
        int_deg: degree,
        deg_on_set: deg_f,
        representation,
        basis,
    };
    Ok(Output::ok(match ctx.format_or(Format::Text) {
        Format::Json => ctx.envelope("intdeg", out),
        Format::Text => {
            let mut s = format!("{}\n", out.int_deg);
            if let Some(d) = out.deg_on_set {
                s.push_str(&format!("deg_on_set: {d}\n"));
            }
            if let Some(r) = &out.representation {
                s.push_str(&format!(
                    "representation: {}\n",
                    if r.is_empty() {
                        "0".to_string()
                    } else {
                        r.join(";")
                    }
                ));
            }
            if let Some(b) = &out.basis {
                s.push_str(&format!(
                    "basis degree {}: {} monomials, evaluation rank {}\n",
                    b.max_degree, b.count, b.evaluation_rank
                ));
            }
            s
        }
        f => return Err(unsupported(f, "intdeg")),
    }))
}

fn cmd_family_op(
    ctx: &Ctx,
    input: &Path,
    input2: Option<&Path>,
    op: OpArg,
    k: usize,
    p: Option<u64>,
) -> CliResult<Output> {
    let result: PointSet = match op {
        OpArg::Sum => {
            let mut points = read_points(input)?;
            if let Some(p) = p {
                if p != points.modulus() {
                    points = embed_01(&points.to_set_family()?, p)?;
                }
            }
            k_fold_sumset(&points, k)?
        }
        OpArg::SymDiff | OpArg::Intersect | OpArg::Union => {
            let set_op = match op {
                OpArg::SymDiff => SetOp::SymDiff,
                OpArg::Intersect => SetOp::Intersect,
                _ => SetOp::Union,
            };
            let a = read_family(input)?;
            let b = match input2 {
                Some(path) => read_family(path)?,
                None => a.clone(),
            };
            embed_01(&pairwise_family(&a, &b, set_op)?, 2)?
        }
    };
    Ok(Output::ok(match ctx.format_or(Format::Text) {
        Format::Text => format_family_text(&result),
        Format::Json => ctx.envelope("family-op", &result),
        f => return Err(unsupported(f, "family-op")),
    }))
}

fn cmd_clp_rank(ctx: &Ctx, args: &PolyArgs) -> CliResult<Output> {
    let n = args
        .n
        .ok_or_else(|| Failure::Usage("--n is required".into()))?;
    let poly = build_polynomial(args, n)?;
    let report = verify_clp_bound(&poly, &ctx.common.guard())?;
    let violation =
        (!report.ok).then(|| format!("CLP rank {} exceeds bound {}", report.rank, report.bound));
    #[derive(Serialize)]
    struct ClpOut {
        polynomial: Vec<String>,
        #[serde(flatten)]
        report: crate::clp::ClpReport,
    }
    let out = ClpOut {
        polynomial: poly.to_term_strings(),
        report,
    };
    let body = match ctx.format_or(Format::Json) {
        Format::Json => ctx.envelope("clp-rank", &out),
        Format::Text => format!(
            "rank={} bound={} degree={} ok={}\n",
            out.report.rank, out.report.bound, out.report.degree, out.report.ok
        ),
        Format::Csv => csv_text(
            &["p", "n", "degree", "rank", "bound", "ok"],
            vec![vec![
                out.report.modulus.to_string(),
                out.report.num_vars.to_string(),
                out.report.degree.to_string(),
                out.report.rank.to_string(),
                out.report.bound.to_string(),
                out.report.ok.to_string(),
            ]],
        ),
    };
    Ok(Output { body, violation })
}

#[derive(Serialize)]
struct TermOut {
    axis: usize,
    axis_monomial: String,
    residual: Vec<String>,
}

#[derive(Serialize)]
struct TensorOut {
    shape: Vec<usize>,
    content_digest: String,
    #[serde(flatten)]
    diagonal: DiagonalReport,
}

#[derive(Serialize)]
struct SliceOut {
    modulus: u64,
    num_vars: u32,
    arity: usize,
    degree: u32,
    degree_bound: u32,
    term_count: usize,
    term_bound: u64,
    within_bound: bool,
    reconstruction_ok: bool,
    terms: Vec<TermOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tensor: Option<TensorOut>,
}

fn cmd_slice(ctx: &Ctx, args: &PolyArgs, k: usize, input: Option<&Path>) -> CliResult<Output> {
    let guard = ctx.common.guard();
    let points = input
        .map(|path| -> CliResult<PointSet> {
            let raw = read_points(path)?;
            if raw.modulus() == args.p {
                Ok(raw)
            } else {
                Ok(embed_01(&raw.to_set_family()?, args.p)?)
            }
        })
        .transpose()?;
    let n = match (args.n, &points) {
        (Some(n), _) => n,
        (None, Some(points)) => points.dimension(),
        (None, None) => return Err(Failure::Usage("--n is required without --in".into())),
    };
    let f = build_polynomial(args, n)?;
    let decomposition = slice_decompose(&f, k, &guard)?;
    let term_bound = decomposition.term_bound()?;
    let reconstruction_ok = decomposition.reconstructs(&f, &guard)?;
    let tensor = points
        .map(|pts| -> CliResult<TensorOut> {
            let t = sum_tensor(&f, &pts, k, &guard)?;
            Ok(TensorOut {
                shape: t.shape(),
                content_digest: t.digest(),
                diagonal: diagonal_slice_rank_bounds(&t),
            })
        })
        .transpose()?;
    let out = SliceOut {
        modulus: f.modulus(),
        num_vars: n,
        arity: k,
        degree: f.degree(),
        degree_bound: decomposition.degree_bound,
        term_count: decomposition.len(),
        term_bound,
        within_bound: decomposition.len() as u64 <= term_bound,
        reconstruction_ok,
        terms: decomposition
            .terms
            .iter()
            .map(|t| TermOut {
                axis: t.axis,
                axis_monomial: t.axis_monomial.to_exponent_string(),
                residual: t.residual.to_term_strings(),
            })
            .collect(),
        tensor,
    };
    let violation = if !out.within_bound {
        Some(format!(
            "{} terms exceed the bound {}",
            out.term_count, out.term_bound
        ))
    } else if !out.reconstruction_ok {
        Some("decomposition does not reconstruct f(X1+...+Xk)".to_string())
    } else {
        None
    };
    let body = match ctx.format_or(Format::Json) {
        Format::Json => ctx.envelope("slice-decompose", &out),
        Format::Text => {
            let mut s = format!(
                "terms={} bound={} reconstruction_ok={}\n",
                out.term_count, out.term_bound, out.reconstruction_ok
            );
            if let Some(t) = &out.tensor {
                s.push_str(&format!(
                    "tensor diagonal={} lower_bound={} digest={}\n",
                    t.diagonal.is_diagonal, t.diagonal.lower_bound, t.content_digest
                ));
            }
            s
        }
        f => return Err(unsupported(f, "slice-decompose")),
    };
    Ok(Output { body, violation })
}

fn render_verify(ctx: &Ctx, report: VerificationReport) -> CliResult<Output> {
    let env = VerifyEnvelope::new(report, ctx.echo.clone(), ctx.timing());
    let violation = (!env.ok).then(|| {
        format!(
            "{} violation(s) of {} found",
            env.violations.len(),
            env.theorem
        )
    });
    let body = match ctx.format_or(Format::Json) {
        Format::Json => to_json(&env),
        Format::Text => format!(
            "theorem={} n={} mode={} instances_checked={} violations={} ok={}\n",
            env.theorem,
            env.parameters.n,
            env.parameters.mode.name(),
            env.instances_checked,
            env.violations.len(),
            env.ok
        ),
        Format::Csv => {
            let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
            let (inst, lhs, rhs) = env
                .extremes
                .as_ref()
                .map(|e| (e.instance.clone(), e.lhs.to_string(), e.rhs.to_string()))
                .unwrap_or_default();
            csv_text(
                &[
                    "theorem",
                    "n",
                    "p",
                    "mode",
                    "seed",
                    "samples",
                    "instances_checked",
                    "violation_count",
                    "ok",
                    "extreme_lhs",
                    "extreme_rhs",
                    "extreme_instance",
                    "content_digest",
                ],
                vec![vec![
                    env.theorem.to_string(),
                    env.parameters.n.to_string(),
                    opt(env.parameters.p),
                    env.parameters.mode.name().to_string(),
                    opt(env.parameters.seed),
                    opt(env.parameters.samples),
                    env.instances_checked.to_string(),
                    env.violations.len().to_string(),
                    env.ok.to_string(),
                    lhs,
                    rhs,
                    inst,
                    env.content_digest.clone(),
                ]],
            )
        }
    };
    Ok(Output { body, violation })
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    ctx: &Ctx,
    theorem: &str,
    n: Option<u32>,
    p: Option<u64>,
    mode: ModeArg,
    samples: u64,
    seed: u64,
    input: Option<&Path>,
) -> CliResult<Output> {
    let theorem: TheoremId = theorem.parse()?;
    let options = ctx.scan_options();
    let report = match mode {
        ModeArg::Instance => {
            let path = input.ok_or_else(|| Failure::Usage("--mode instance needs --in".into()))?;
            instance_report(theorem, &read_family(path)?, p)?
        }
        ModeArg::Exhaustive | ModeArg::Random => {
            let n = n.ok_or_else(|| Failure::Usage("--n is required".into()))?;
            if matches!(mode, ModeArg::Exhaustive) {
                exhaustive_scan_with(theorem, n, p, &options)?
            } else {
                random_scan_with(theorem, n, p, samples, seed, &options)?
            }
        }
    };
    render_verify(ctx, report)
}

fn cmd_demo(ctx: &Ctx, op: DemoOpArg, n: u32, d: u32) -> CliResult<Output> {
    let op = match op {
        DemoOpArg::Intersect => SetOp::Intersect,
        DemoOpArg::Union => SetOp::Union,
    };
    let r = counterexample_demo(op, n, d)?;
    Ok(Output::ok(match ctx.format_or(Format::Json) {
        Format::Json => ctx.envelope("demo-counterexample", &r),
        Format::Text => format!(
            "op={} n={} d={} family_size={} vc_star={} half_bound={} witness={}\n",
            r.op.name(),
            r.n,
            r.d,
            r.family_size,
            r.vc_star,
            r.half_bound,
            r.witness
        ),
        Format::Csv => csv_text(
            &[
                "op",
                "n",
                "d",
                "family_size",
                "vc_star",
                "half_bound",
                "witness",
                "closed_under_op",
            ],
            vec![vec![
                r.op.name().to_string(),
                r.n.to_string(),
                r.d.to_string(),
                r.family_size.to_string(),
                r.vc_star.to_string(),
                r.half_bound.to_string(),
                r.witness.to_string(),
                r.closed_under_op.to_string(),
            ]],
        ),
    }))
}

fn cmd_search(ctx: &Ctx, spec: SearchSpec) -> CliResult<Output> {
    let table = search_open_question(&spec)?;
    let violation = (!table.all_verified())
        .then(|| "a reported certificate failed re-verification".to_string());
    let n = spec.n;
    let body = match ctx.format_or(Format::Json) {
        Format::Json => ctx.envelope("search", &table),
        Format::Csv | Format::Text => {
            let certificate = |members: &[u64]| {
                members
                    .iter()
                    .map(|&m| format_mask(m, n))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            let rows = table
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.d.to_string(),
                        r.best_size.to_string(),
                        r.binom_sum_n_d.to_string(),
                        r.half_bound.to_string(),
                        r.verified.to_string(),
                        certificate(&r.certificate),
                    ]
                })
                .collect();
            format!(
                "# {}\n{}",
                table.label,
                csv_text(
                    &[
                        "n",
                        "d",
                        "best_size",
                        "binom_sum_n_d",
                        "half_bound",
                        "verified",
                        "certificate"
                    ],
                    rows,
                )
            )
        }
    };
    Ok(Output { body, violation })
}

fn cmd_gen_family(
    ctx: &Ctx,
    n: u32,
    kind: KindArg,
    d: Option<u32>,
    size: Option<u64>,
    seed: u64,
) -> CliResult<Output> {
    let need_d = || d.ok_or_else(|| Failure::Usage("--d is required for weight families".into()));
    let kind = match kind {
        KindArg::Lowweight => FamilyKind::LowWeight(need_d()?),
        KindArg::Highweight => FamilyKind::HighWeight(need_d()?),
        KindArg::Powerset => FamilyKind::Powerset,
        KindArg::Random => FamilyKind::Random {
            size: size
                .ok_or_else(|| Failure::Usage("--size is required for random families".into()))?,
            seed,
        },
    };
    let family = generate_family(n, kind)?;
    Ok(Output::ok(match ctx.format_or(Format::Text) {
        Format::Text => format_family_text(&embed_01(&family, 2)?),
        Format::Json => ctx.envelope("gen-family", &family),
        f => return Err(unsupported(f, "gen-family")),
    }))
}

#[derive(Serialize)]
struct ReplayOut {
    theorem: TheoremId,
    stored_digest: String,
    recomputed_digest: String,
    stored_content_intact: bool,
    reproduced: bool,
    stored_violations: usize,
}

fn parse_instance(s: &str) -> CliResult<SetFamily> {
    let bad = || Failure::Usage(format!("cannot parse instance '{s}'"));
    let rest = s.strip_prefix("n=").ok_or_else(bad)?;
    let (n, members) = rest.split_once(" members=[").ok_or_else(bad)?;
    let members = members.strip_suffix(']').ok_or_else(bad)?;
    let n: u32 = n.parse().map_err(|_| bad())?;
    let masks = members
        .split(',')
        .filter(|m| !m.is_empty())
        .map(|m| m.parse::<u64>().map_err(|_| bad()))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(SetFamily::new(n, masks)?)
}

fn cmd_replay(ctx: &Ctx, input: &Path) -> CliResult<Output> {
    let text = fs::read_to_string(input)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", input.display())))?;
    let stored: VerifyEnvelope = serde_json::from_str(&text).map_err(|e| {
        Failure::Usage(format!(
            "{}: not a verification report: {e}",
            input.display()
        ))
    })?;
    let params = &stored.parameters;
    let options = ScanOptions {
        progress: false,
        ..ctx.scan_options()
    };
    let rerun = match params.mode {
        ScanMode::Exhaustive => exhaustive_scan_with(stored.theorem, params.n, params.p, &options)?,
        ScanMode::Random => {
            let (Some(samples), Some(seed)) = (params.samples, params.seed) else {
                return Err(Failure::Usage(
                    "random report without samples or seed".into(),
                ));
            };
            random_scan_with(stored.theorem, params.n, params.p, samples, seed, &options)?
        }
        ScanMode::Instance => {
            let extreme = stored
                .extremes
                .as_ref()
                .ok_or_else(|| Failure::Usage("instance report without its instance".into()))?;
            instance_report(
                stored.theorem,
                &parse_instance(&extreme.instance)?,
                params.p,
            )?
        }
    };
    let recomputed = VerifyEnvelope::new(rerun, String::new(), None);
    let out = ReplayOut {
        theorem: stored.theorem,
        stored_content_intact: stored.recomputed_digest() == stored.content_digest,
        reproduced: recomputed.content_digest == stored.content_digest,
        stored_digest: stored.content_digest.clone(),
        recomputed_digest: recomputed.content_digest.clone(),
        stored_violations: stored.violations.len(),
    };
    let violation = if out.stored_violations > 0 {
        Some(format!(
            "stored report lists {} violation(s)",
            out.stored_violations
        ))
    } else if !out.stored_content_intact {
        Some("stored report does not match its content digest".to_string())
    } else if !out.reproduced {
        Some("re-run does not reproduce the stored report".to_string())
    } else if !recomputed.ok {
        Some("re-run found violations".to_string())
    } else {
        None
    };
    let body = match ctx.format_or(Format::Json) {
        Format::Json => ctx.envelope("replay", &out),
        Format::Text => format!(
            "reproduced={} intact={} stored_violations={}\n",
            out.reproduced, out.stored_content_intact, out.stored_violations
        ),
        f => return Err(unsupported(f, "replay")),
    };
    Ok(Output { body, violation })
}

fn dispatch(cli: &Cli, ctx: &Ctx) -> CliResult<Output> {
    match &cli.command {
        Command::Vcdim {
            input,
            y,
            levels,
            witness,
        } => cmd_vcdim(ctx, input, y.as_deref(), *levels, witness.as_deref()),
        Command::Intdeg {
            input,
            values,
            represent,
            basis,
        } => cmd_intdeg(ctx, input, values.as_deref(), represent.as_deref(), *basis),
        Command::FamilyOp {
            input,
            input2,
            op,
            k,
            p,
        } => cmd_family_op(ctx, input, input2.as_deref(), *op, *k, *p),
        Command::ClpRank { poly } => cmd_clp_rank(ctx, poly),
        Command::SliceDecompose { poly, k, input } => cmd_slice(ctx, poly, *k, input.as_deref()),
        Command::Verify {
            theorem,
            n,
            p,
            mode,
            samples,
            seed,
            input,
        } => cmd_verify(
            ctx,
            theorem,
            *n,
            *p,
            *mode,
            *samples,
            *seed,
            input.as_deref(),
        ),
        Command::DemoCounterexample { op, n, d } => cmd_demo(ctx, *op, *n, *d),
        Command::Search {
            question,
            n,
            d,
            mode,
            budget,
            seed,
        } => cmd_search(
            ctx,
            SearchSpec {
                question: match question {
                    QuestionArg::Q1 => Question::Q1,
                    QuestionArg::Q2 => Question::Q2,
                },
                n: *n,
                d: *d,
                mode: match mode {
                    SearchModeArg::Exhaustive => SearchMode::Exhaustive,
                    SearchModeArg::Heuristic => SearchMode::Heuristic,
                },
                budget: *budget,
                seed: *seed,
            },
        ),
        Command::GenFamily {
            n,
            kind,
            d,
            size,
            seed,
        } => cmd_gen_family(ctx, *n, *kind, *d, *size, *seed),
        Command::Schema => Ok(Output::ok(to_json(&report_schema()))),
        Command::Replay { input } => cmd_replay(ctx, input),
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(rendered.as_bytes());
            } else {
                let _ = stderr.write_all(rendered.as_bytes());
            }
            return if code == 0 { 0 } else { 2 };
        }
    };
    let echo = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join(" ");
    let ctx = Ctx {
        common: &cli.common,
        echo,
        started: Instant::now(),
    };
    let output = match dispatch(&cli, &ctx) {
        Ok(output) => output,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            return 2;
        }
    };
    let written = match &cli.common.out {
        Some(path) => fs::write(path, &output.body)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => stdout
            .write_all(output.body.as_bytes())
            .map_err(|e| format!("cannot write output: {e}")),
    };
    if let Err(msg) = written {
        let _ = writeln!(stderr, "error: {msg}");
        return 2;
    }
    match output.violation {
        Some(msg) => {
            let _ = writeln!(stderr, "violation: {msg}");
            1
        }
        None => 0,
    }
}
