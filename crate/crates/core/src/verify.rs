//! Instance checks of the bounds, scan harnesses, the `∩`/`∪`
//! counterexamples and finite searches for the two open questions.
//!
//! Every theorem is checked in bound form: an instance yields a pair
//! `(lhs, rhs)` and passes when `lhs ≤ rhs`.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clp::{verify_clp_bound, SizeGuard};
use crate::error::{Error, Result};
use crate::family::{
    binom_sum, embed_01, floyd_sample, generate_family, k_fold_sumset, masks_of_weight,
    pairwise_family, space_size, FamilyKind, SetFamily, SetOp,
};
use crate::field::check_modulus;
use crate::interpolation::{int_deg, monomial_basis, monomial_count, ReducedPolynomial};
use crate::vc::vc_dim;

/// Instances per progress checkpoint and per parallel chunk.
pub const CHECKPOINT: u64 = 1 << 12;

/// Largest ground size accepted by `exhaustive_scan`.
pub const MAX_EXHAUSTIVE_N: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    /// `|A| ≤ (n choose ≤ VC-dim(A))`.
    Sauer,
    /// `|A| ≤ 2·(n choose ≤ ⌊d/2⌋)` with `d = VC-dim(A△A)`.
    Main,
    /// `|A| ≤ 2·(n choose ≤ ⌊e/2⌋)` with `e = int-deg(A+A)`.
    IntdegMain,
    /// `int-deg(A) ≤ VC-dim(A)`.
    IntdegLeVc,
    /// `rank(P(x+y)) ≤ 2·|𝓜_{⌊d/2⌋}(p,n)|`; instances are polynomials.
    ClpBound,
    /// `|A| ≤ p·|𝓜_{⌊e/p⌋}(p,n)|` with `e = int-deg_p(p·A)`.
    Psums,
    /// `VC-dim(A) ≤ VC-dim(A⋆A)` for `⋆ ∈ {△, ∩, ∪}`.
    VcMonotone,
}

impl TheoremId {
    pub const ALL: [TheoremId; 7] = [
        TheoremId::Sauer,
        TheoremId::Main,
        TheoremId::IntdegMain,
        TheoremId::IntdegLeVc,
        TheoremId::ClpBound,
        TheoremId::Psums,
        TheoremId::VcMonotone,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::Sauer => "sauer",
            TheoremId::Main => "main",
            TheoremId::IntdegMain => "intdeg_main",
            TheoremId::IntdegLeVc => "intdeg_le_vc",
            TheoremId::ClpBound => "clp_bound",
            TheoremId::Psums => "psums",
            TheoremId::VcMonotone => "vc_monotone",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown theorem '{s}'")))
    }
}

/// Both sides of an instance inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measure {
    pub lhs: u64,
    pub rhs: u64,
}

impl Measure {
    pub fn ok(self) -> bool {
        self.lhs <= self.rhs
    }

    /// `lhs/rhs` strictly larger than `other`'s; `0/0` counts as 1 and
    /// `x/0` as infinite.
    fn tighter_than(self, other: Measure) -> bool {
        let norm = |m: Measure| match (m.lhs, m.rhs) {
            (0, 0) => (1u128, 1u128),
            (l, r) => (u128::from(l), u128::from(r)),
        };
        let (a, b) = norm(self);
        let (c, d) = norm(other);
        match (b, d) {
            (0, 0) => false,
            (0, _) => true,
            (_, 0) => false,
            _ => a * d > c * b,
        }
    }
}

fn overflow(what: &str) -> Error {
    Error::Overflow(what.to_string())
}

/// Evaluates the instance inequality for a family.
pub fn measure_instance(id: TheoremId, a: &SetFamily, p: Option<u64>) -> Result<Measure> {
    a.require_nonempty("check_instance")?;
    let n = u64::from(a.ground_size());
    let size = a.len() as u64;
    Ok(match id {
        TheoremId::Sauer => Measure {
            lhs: size,
            rhs: binom_sum(n, u64::from(vc_dim(a)?))?,
        },
        TheoremId::Main => {
            let d = vc_dim(&pairwise_family(a, a, SetOp::SymDiff)?)?;
            Measure {
                lhs: size,
                rhs: binom_sum(n, u64::from(d / 2))?
                    .checked_mul(2)
                    .ok_or_else(|| overflow("main bound"))?,
            }
        }
        TheoremId::IntdegMain => {
            let sumset = pairwise_family(a, a, SetOp::SymDiff)?;
            let e = int_deg(&embed_01(&sumset, 2)?)?;
            Measure {
                lhs: size,
                rhs: binom_sum(n, u64::from(e / 2))?
                    .checked_mul(2)
                    .ok_or_else(|| overflow("int-deg bound"))?,
            }
        }
        TheoremId::IntdegLeVc => Measure {
            lhs: u64::from(int_deg(&embed_01(a, 2)?)?),
            rhs: u64::from(vc_dim(a)?),
        },
        TheoremId::Psums => {
            let p = p.ok_or_else(|| Error::Parameter("psums requires a prime p".into()))?;
            check_modulus(p)?;
            let sums = k_fold_sumset(&embed_01(a, p)?, p as usize)?;
            let e = u64::from(int_deg(&sums)?);
            Measure {
                lhs: size,
                rhs: monomial_count(p, a.ground_size(), e / p)?
                    .checked_mul(p)
                    .ok_or_else(|| overflow("p-sums bound"))?,
            }
        }
        TheoremId::VcMonotone => {
            let mut rhs = u64::MAX;
            for op in SetOp::ALL {
                rhs = rhs.min(u64::from(vc_dim(&pairwise_family(a, a, op)?)?));
            }
            Measure {
                lhs: u64::from(vc_dim(a)?),
                rhs,
            }
        }
        TheoremId::ClpBound => {
            return Err(Error::Parameter(
                "clp_bound instances are polynomials, not families".into(),
            ))
        }
    })
}

/// Whether a family satisfies the instance inequality of `id`.
pub fn check_instance(id: TheoremId, a: &SetFamily, p: Option<u64>) -> Result<bool> {
    measure_instance(id, a, p).map(Measure::ok)
}

/// The CLP inequality for one polynomial.
pub fn measure_polynomial(poly: &ReducedPolynomial, guard: &SizeGuard) -> Result<Measure> {
    let r = verify_clp_bound(poly, guard)?;
    Ok(Measure {
        lhs: r.rank,
        rhs: r.bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanMode {
    Exhaustive,
    Random,
    Instance,
}

impl ScanMode {
    pub fn name(self) -> &'static str {
        match self {
            ScanMode::Exhaustive => "exhaustive",
            ScanMode::Random => "random",
            ScanMode::Instance => "instance",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanParameters {
    pub n: u32,
    pub p: Option<u64>,
    pub mode: ScanMode,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
}

/// The tightest instance seen: largest `lhs/rhs`, first one on ties.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extreme {
    pub instance: String,
    pub lhs: u64,
    pub rhs: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub theorem: TheoremId,
    pub parameters: ScanParameters,
    pub instances_checked: u64,
    pub violations: Vec<String>,
    pub extremes: Option<Extreme>,
    pub ok: bool,
}

/// Execution settings shared by the scans.
#[derive(Debug, Clone, Default)]
pub struct ScanOptions {
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    /// Print a line to standard error at every checkpoint.
    pub progress: bool,
    pub guard: SizeGuard,
}

#[derive(Debug, Default)]
struct Partial {
    checked: u64,
    violations: Vec<String>,
    extreme: Option<(Measure, String)>,
}

impl Partial {
    fn record(&mut self, m: Measure, describe: impl FnOnce() -> String) {
        self.checked += 1;
        let tighter = self
            .extreme
            .as_ref()
            .is_none_or(|(best, _)| m.tighter_than(*best));
        if !m.ok() {
            let s = describe();
            if tighter {
                self.extreme = Some((m, s.clone()));
            }
            self.violations.push(s);
        } else if tighter {
            self.extreme = Some((m, describe()));
        }
    }

    /// Order-preserving merge: `self` covers instances before `other`.
    fn merge(mut self, other: Partial) -> Partial {
        self.checked += other.checked;
        self.violations.extend(other.violations);
        if let Some((m, s)) = other.extreme {
            if self
                .extreme
                .as_ref()
                .is_none_or(|(best, _)| m.tighter_than(*best))
            {
                self.extreme = Some((m, s));
            }
        }
        self
    }

    fn into_report(self, theorem: TheoremId, parameters: ScanParameters) -> VerificationReport {
        VerificationReport {
            theorem,
            parameters,
            instances_checked: self.checked,
            ok: self.violations.is_empty(),
            violations: self.violations,
            extremes: self.extreme.map(|(m, instance)| Extreme {
                instance,
                lhs: m.lhs,
                rhs: m.rhs,
            }),
        }
    }
}

fn describe_poly(poly: &ReducedPolynomial) -> String {
    format!("p={} n={} poly={}", poly.modulus(), poly.num_vars(), poly)
}

fn run_in_pool<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(job()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::Parameter(format!("cannot start {w} workers: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// Splits `0..total` into checkpoint-sized chunks, evaluates them in
/// parallel and merges the partial results in index order.
fn scan_chunks<F>(total: u64, label: &str, options: &ScanOptions, eval: F) -> Result<Partial>
where
    F: Fn(u64, &mut Partial) -> Result<()> + Sync,
{
    let done = AtomicU64::new(0);
    let chunks = total.div_ceil(CHECKPOINT);
    let parts = run_in_pool(options.workers, || {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut part = Partial::default();
                for i in c * CHECKPOINT..((c + 1) * CHECKPOINT).min(total) {
                    eval(i, &mut part)?;
                }
                if options.progress {
                    let so_far = done.fetch_add(part.checked, Ordering::Relaxed) + part.checked;
                    eprintln!("[{label}] {so_far}/{total} instances");
                }
                Ok(part)
            })
            .collect::<Result<Vec<Partial>>>()
    })??;
    Ok(parts.into_iter().fold(Partial::default(), Partial::merge))
}

fn require_prime_for(id: TheoremId, p: Option<u64>) -> Result<Option<u64>> {
    match (id, p) {
        (TheoremId::Psums, None) => Err(Error::Parameter("psums requires a prime p".into())),
        (TheoremId::ClpBound, None) => Ok(Some(2)),
        (_, Some(p)) => check_modulus(p).map(|_| Some(p)),
        (_, None) => Ok(None),
    }
}

/// Checks every nonempty family over `[n]` (or, for `clp_bound`, every
/// reduced polynomial in `n` variables), for `n ≤ 4`.
pub fn exhaustive_scan(id: TheoremId, n: u32, p: Option<u64>) -> Result<VerificationReport> {
    exhaustive_scan_with(id, n, p, &ScanOptions::default())
}

pub fn exhaustive_scan_with(
    id: TheoremId,
    n: u32,
    p: Option<u64>,
    options: &ScanOptions,
) -> Result<VerificationReport> {
    if n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    if n > MAX_EXHAUSTIVE_N {
        return Err(Error::Resource(format!(
            "exhaustive scans need n ≤ {MAX_EXHAUSTIVE_N}; use random_scan for n = {n}"
        )));
    }
    let p = require_prime_for(id, p)?;
    let parameters = ScanParameters {
        n,
        p,
        mode: ScanMode::Exhaustive,
        seed: None,
        samples: None,
    };
    let label = format!("verify {id} n={n}");
    let partial = if id == TheoremId::ClpBound {
        let p = p.expect("defaulted above");
        let basis = monomial_basis(p, n, u64::MAX)?.monomials;
        let count = p
            .checked_pow(basis.len() as u32)
            .filter(|&count| count <= 1 << 20)
            .ok_or_else(|| {
                Error::Resource(format!("too many polynomials over F_{p} in {n} variables"))
            })?;
        scan_chunks(count, &label, options, |index, part| {
            let mut rest = index;
            let terms = basis.iter().map(|m| {
                let c = rest % p;
                rest /= p;
                (m.clone(), c)
            });
            let poly = ReducedPolynomial::from_terms(p, n, terms.collect::<Vec<_>>())?;
            let m = measure_polynomial(&poly, &options.guard)?;
            part.record(m, || describe_poly(&poly));
            Ok(())
        })?
    } else {
        let count = (1u64 << (1u64 << n)) - 1;
        scan_chunks(count, &label, options, |index, part| {
            let a = SetFamily::from_characteristic(n, index + 1)?;
            let m = measure_instance(id, &a, p)?;
            part.record(m, || a.to_string());
            Ok(())
        })?
    };
    Ok(partial.into_report(id, parameters))
}

/// Generator for sample `index` of a seeded scan: stream `index` of the
/// `ChaCha8` generator seeded with `seed`, independent of scheduling.
fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A uniformly random size in `1..=2^n`, then a uniform family of that size.
fn random_family(rng: &mut ChaCha8Rng, n: u32) -> Result<SetFamily> {
    let universe = 1u64 << n;
    let size = rng.gen_range(1..=universe);
    SetFamily::new(n, floyd_sample(rng, universe, size))
}

/// Checks `samples` seeded random instances.
///
/// Families get a uniform size in `1..=2^n` and uniform members. For
/// `clp_bound`, sample `i` is a random polynomial of exact degree
/// `i mod ((p-1)n + 1)`, so every degree is covered.
pub fn random_scan(
    id: TheoremId,
    n: u32,
    p: Option<u64>,
    samples: u64,
    seed: u64,
) -> Result<VerificationReport> {
    random_scan_with(id, n, p, samples, seed, &ScanOptions::default())
}

pub fn random_scan_with(
    id: TheoremId,
    n: u32,
    p: Option<u64>,
    samples: u64,
    seed: u64,
    options: &ScanOptions,
) -> Result<VerificationReport> {
    if samples == 0 {
        return Err(Error::Parameter("samples must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    let p = require_prime_for(id, p)?;
    let parameters = ScanParameters {
        n,
        p,
        mode: ScanMode::Random,
        seed: Some(seed),
        samples: Some(samples),
    };
    let label = format!("verify {id} n={n} seed={seed}");
    let partial = if id == TheoremId::ClpBound {
        let p = p.expect("defaulted above");
        space_size(p, n)?;
        let grades = (p - 1) * u64::from(n) + 1;
        scan_chunks(samples, &label, options, |index, part| {
            let mut rng = sample_rng(seed, index);
            let d = (index % grades) as u32;
            let poly = ReducedPolynomial::random(p, n, d, &mut rng)?;
            let m = measure_polynomial(&poly, &options.guard)?;
            part.record(m, || describe_poly(&poly));
            Ok(())
        })?
    } else {
        if n > 20 {
            return Err(Error::Resource(format!(
                "random families need n ≤ 20, got {n}"
            )));
        }
        scan_chunks(samples, &label, options, |index, part| {
            let mut rng = sample_rng(seed, index);
            let a = random_family(&mut rng, n)?;
            let m = measure_instance(id, &a, p)?;
            part.record(m, || a.to_string());
            Ok(())
        })?
    };
    Ok(partial.into_report(id, parameters))
}

/// Checks a single family and reports it in scan form.
pub fn instance_report(id: TheoremId, a: &SetFamily, p: Option<u64>) -> Result<VerificationReport> {
    let p = require_prime_for(id, p)?;
    let mut part = Partial::default();
    part.record(measure_instance(id, a, p)?, || a.to_string());
    Ok(part.into_report(
        id,
        ScanParameters {
            n: a.ground_size(),
            p,
            mode: ScanMode::Instance,
            seed: None,
            samples: None,
        },
    ))
}

/// The `∩`/`∪` families whose size breaks the `△`-shaped bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemoReport {
    pub op: SetOp,
    pub n: u32,
    pub d: u32,
    pub family_size: u64,
    /// `VC-dim(A⋆A)`.
    pub vc_star: u32,
    /// `2·(n choose ≤ ⌊d/2⌋)`.
    pub half_bound: u64,
    /// `family_size > half_bound`.
    pub witness: bool,
    /// `A⋆A = A`.
    pub closed_under_op: bool,
}

/// Builds `{S : |S| ≤ d}` for `∩` or `{S : |S| ≥ n-d}` for `∪` and measures it.
pub fn counterexample_demo(op: SetOp, n: u32, d: u32) -> Result<DemoReport> {
    let kind = match op {
        SetOp::Intersect => FamilyKind::LowWeight(d),
        SetOp::Union => FamilyKind::HighWeight(d),
        SetOp::SymDiff => {
            return Err(Error::Parameter(
                "the counterexample applies to intersect and union only".into(),
            ))
        }
    };
    if d < 2 || d > n {
        return Err(Error::Parameter(format!(
            "need 2 ≤ d ≤ n, got d = {d}, n = {n}"
        )));
    }
    let a = generate_family(n, kind)?;
    let star = pairwise_family(&a, &a, op)?;
    let family_size = a.len() as u64;
    let half_bound = binom_sum(u64::from(n), u64::from(d / 2))?
        .checked_mul(2)
        .ok_or_else(|| overflow("half bound"))?;
    Ok(DemoReport {
        op,
        n,
        d,
        family_size,
        vc_star: vc_dim(&star)?,
        half_bound,
        witness: family_size > half_bound,
        closed_under_op: star == a,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Question {
    /// Families with `VC-dim(A∩A) ≤ d` and `VC-dim(A∪A) ≤ d`.
    Q1,
    /// Families with `VC-dim(A△A△A) ≤ d`.
    Q2,
}

impl FromStr for Question {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "q1" => Ok(Question::Q1),
            "q2" => Ok(Question::Q2),
            _ => Err(Error::Parameter(format!("unknown question '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    Exhaustive,
    Heuristic,
}

/// Largest `n` accepted by the heuristic search.
pub const MAX_HEURISTIC_N: u32 = 8;

pub const EVIDENCE_LABEL: &str = "finite evidence only: maxima found at a single finite n \
cannot confirm or refute a bound of the form n^(c*d + O(1)), whose additive slack is unspecified";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceRow {
    pub n: u32,
    pub d: u32,
    pub best_size: u64,
    /// `(n choose ≤ d)`.
    pub binom_sum_n_d: u64,
    /// `2·(n choose ≤ ⌊d/2⌋)`.
    pub half_bound: u64,
    /// Members of the best family found.
    pub certificate: Vec<u64>,
    /// Constraint evaluations spent.
    pub evaluations: u64,
    /// Re-checked with an unpruned shattering test.
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceTable {
    pub question: Question,
    pub mode: SearchMode,
    pub seed: Option<u64>,
    pub budget: Option<u64>,
    pub label: String,
    pub rows: Vec<EvidenceRow>,
}

impl EvidenceTable {
    pub fn all_verified(&self) -> bool {
        self.rows.iter().all(|r| r.verified)
    }
}

fn constrained_vc(q: Question, a: &SetFamily) -> Result<u32> {
    match q {
        Question::Q1 => Ok(vc_dim(&pairwise_family(a, a, SetOp::Intersect)?)?
            .max(vc_dim(&pairwise_family(a, a, SetOp::Union)?)?)),
        Question::Q2 => {
            let twice = pairwise_family(a, a, SetOp::SymDiff)?;
            vc_dim(&pairwise_family(&twice, a, SetOp::SymDiff)?)
        }
    }
}

/// VC dimension by testing every subset of the ground set directly.
fn unpruned_vc(a: &SetFamily) -> u32 {
    let mut best = 0;
    for y in 0..=a.universe() {
        let k = y.count_ones();
        if k <= best {
            continue;
        }
        let mut traces: Vec<u64> = a.members().iter().map(|&s| s & y).collect();
        traces.sort_unstable();
        traces.dedup();
        if traces.len() as u64 == 1u64 << k {
            best = k;
        }
    }
    best
}

fn reverify(q: Question, a: &SetFamily, d: u32) -> Result<bool> {
    let value = match q {
        Question::Q1 => unpruned_vc(&pairwise_family(a, a, SetOp::Intersect)?)
            .max(unpruned_vc(&pairwise_family(a, a, SetOp::Union)?)),
        Question::Q2 => {
            let twice = pairwise_family(a, a, SetOp::SymDiff)?;
            unpruned_vc(&pairwise_family(&twice, a, SetOp::SymDiff)?)
        }
    };
    Ok(value <= d)
}

fn exhaustive_best(q: Question, n: u32, d: u32) -> Result<(SetFamily, u64)> {
    let universe = 1u32 << n;
    let mut evaluations = 0u64;
    // The constraint is inherited by subfamilies, so the first feasible
    // size from the top is the maximum.
    for size in (1..=universe).rev() {
        for characteristic in masks_of_weight(universe, size) {
            let a = SetFamily::from_characteristic(n, characteristic)?;
            evaluations += 1;
            if constrained_vc(q, &a)? <= d {
                return Ok((a, evaluations));
            }
        }
    }
    unreachable!("singletons satisfy every constraint")
}

/// Seeded local search: greedy additions, plateau swaps when stuck, random
/// restarts until the evaluation budget is spent.
fn heuristic_best(q: Question, n: u32, d: u32, budget: u64, seed: u64) -> Result<(SetFamily, u64)> {
    let universe = 1u64 << n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut evaluations = 0u64;
    let mut best: Vec<u64> = vec![rng.gen_range(0..universe)];
    let feasible = |members: &[u64], evaluations: &mut u64| -> Result<bool> {
        *evaluations += 1;
        let a = SetFamily::new(n, members.iter().copied())?;
        Ok(constrained_vc(q, &a)? <= d)
    };
    'restart: while evaluations < budget {
        let mut current = vec![rng.gen_range(0..universe)];
        let mut plateau_moves = 0;
        loop {
            let mut outside: Vec<u64> = (0..universe).filter(|m| !current.contains(m)).collect();
            outside.shuffle(&mut rng);
            let mut moved = false;
            for &c in &outside {
                if evaluations >= budget {
                    break 'restart;
                }
                current.push(c);
                if feasible(&current, &mut evaluations)? {
                    moved = true;
                    plateau_moves = 0;
                    break;
                }
                current.pop();
            }
            if current.len() > best.len() {
                best = current.clone();
            }
            if outside.is_empty() {
                // the whole power set is feasible
                break 'restart;
            }
            if moved {
                continue;
            }
            if plateau_moves >= 4 {
                continue 'restart;
            }
            // swap one member for one outsider
            let mut swapped = false;
            for _ in 0..2 * n {
                if evaluations >= budget {
                    break 'restart;
                }
                let r = rng.gen_range(0..current.len());
                let c = outside[rng.gen_range(0..outside.len())];
                let old = std::mem::replace(&mut current[r], c);
                if feasible(&current, &mut evaluations)? {
                    swapped = true;
                    break;
                }
                current[r] = old;
            }
            if !swapped {
                continue 'restart;
            }
            plateau_moves += 1;
        }
    }
    Ok((SetFamily::new(n, best)?, evaluations))
}

/// Settings for [`search_open_question`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchSpec {
    pub question: Question,
    pub n: u32,
    /// `None` searches every `d` in `0..=n`.
    pub d: Option<u32>,
    pub mode: SearchMode,
    /// Constraint evaluations per row (heuristic mode).
    pub budget: u64,
    pub seed: u64,
}

/// Largest families found under the open-question constraints.
pub fn search_open_question(spec: &SearchSpec) -> Result<EvidenceTable> {
    let n = spec.n;
    if n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    match spec.mode {
        SearchMode::Exhaustive if n > MAX_EXHAUSTIVE_N => {
            return Err(Error::Resource(format!(
                "exhaustive search needs n ≤ {MAX_EXHAUSTIVE_N}, got {n}"
            )))
        }
        SearchMode::Heuristic if n > MAX_HEURISTIC_N => {
            return Err(Error::Resource(format!(
                "heuristic search needs n ≤ {MAX_HEURISTIC_N}, got {n}"
            )))
        }
        SearchMode::Heuristic if spec.budget == 0 => {
            return Err(Error::Resource("search budget must be positive".into()))
        }
        _ => {}
    }
    let ds: Vec<u32> = match spec.d {
        Some(d) if d > n => {
            return Err(Error::Parameter(format!("d = {d} exceeds n = {n}")));
        }
        Some(d) => vec![d],
        None => (0..=n).collect(),
    };
    let mut rows = Vec::with_capacity(ds.len());
    for d in ds {
        let (family, evaluations) = match spec.mode {
            SearchMode::Exhaustive => exhaustive_best(spec.question, n, d)?,
            SearchMode::Heuristic => heuristic_best(spec.question, n, d, spec.budget, spec.seed)?,
        };
        let verified = reverify(spec.question, &family, d)?;
        rows.push(EvidenceRow {
            n,
            d,
            best_size: family.len() as u64,
            binom_sum_n_d: binom_sum(u64::from(n), u64::from(d))?,
            half_bound: binom_sum(u64::from(n), u64::from(d / 2))?
                .checked_mul(2)
                .ok_or_else(|| overflow("half bound"))?,
            certificate: family.members().to_vec(),
            evaluations,
            verified,
        });
    }
    let heuristic = spec.mode == SearchMode::Heuristic;
    Ok(EvidenceTable {
        question: spec.question,
        mode: spec.mode,
        seed: heuristic.then_some(spec.seed),
        budget: heuristic.then_some(spec.budget),
        label: EVIDENCE_LABEL.to_string(),
        rows,
    })
}
