//! Set families over `[n]` and point sets in `F_p^n`.
//!
//! A set `S ⊆ [n]` is stored as a `u64` bitmask with bit `i - 1` standing
//! for ground element `i`. A point of `F_p^n` is stored as a base-`p`
//! integer whose least-significant digit is coordinate 1, so for `p = 2`
//! the two encodings coincide.

mod text;

pub use text::{format_family_text, parse_family_text};

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::check_modulus;

/// Encodings of `F_p^n` must fit in 48 bits.
pub const MAX_SPACE_SIZE: u64 = 1 << 48;

/// Families with more members than this are refused by the generators.
pub const MAX_GENERATED_SIZE: u64 = 1 << 26;

/// Sumsets use a dense presence table when `p^n` is at most this size.
const PRESENCE_TABLE_LIMIT: u64 = 1 << 24;

/// `p^n`, refusing spaces beyond [`MAX_SPACE_SIZE`].
pub fn space_size(p: u64, n: u32) -> Result<u64> {
    let mut size: u64 = 1;
    for _ in 0..n {
        size = size
            .checked_mul(p)
            .filter(|&s| s <= MAX_SPACE_SIZE)
            .ok_or_else(|| Error::Resource(format!("{p}^{n} exceeds the 2^48 encoding limit")))?;
    }
    Ok(size)
}

/// `(n choose ≤ d) = Σ_{i=0}^{min(d,n)} C(n, i)`.
pub fn binom_sum(n: u64, d: u64) -> Result<u64> {
    let top = d.min(n);
    let overflow = || Error::Overflow(format!("binom_sum({n}, {d})"));
    let mut term: u128 = 1;
    let mut total: u64 = 1;
    for i in 0..top {
        term = term * u128::from(n - i) / u128::from(i + 1);
        let t = u64::try_from(term).map_err(|_| overflow())?;
        total = total.checked_add(t).ok_or_else(overflow)?;
    }
    Ok(total)
}

/// A family `A ⊆ 2^[n]` in canonical form: members strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SetFamily {
    ground_size: u32,
    members: Vec<u64>,
}

impl SetFamily {
    pub const MAX_GROUND_SIZE: u32 = 63;

    /// Builds a family from arbitrary masks, sorting and deduplicating them.
    pub fn new(ground_size: u32, members: impl IntoIterator<Item = u64>) -> Result<Self> {
        if ground_size == 0 || ground_size > Self::MAX_GROUND_SIZE {
            return Err(Error::Parameter(format!(
                "ground size {ground_size} outside 1..={}",
                Self::MAX_GROUND_SIZE
            )));
        }
        let limit = 1u64 << ground_size;
        let mut members: Vec<u64> = members.into_iter().collect();
        if let Some(&bad) = members.iter().find(|&&m| m >= limit) {
            return Err(Error::Dimension(format!(
                "member {bad:#b} does not fit a ground set of size {ground_size}"
            )));
        }
        members.sort_unstable();
        members.dedup();
        Ok(SetFamily {
            ground_size,
            members,
        })
    }

    pub fn empty(ground_size: u32) -> Result<Self> {
        Self::new(ground_size, std::iter::empty())
    }

    /// The family whose members are the set bits of `characteristic`
    /// (bit `m` set means mask `m` is a member). Requires `2^n ≤ 64`.
    pub fn from_characteristic(ground_size: u32, characteristic: u64) -> Result<Self> {
        if ground_size > 6 {
            return Err(Error::Parameter(format!(
                "characteristic vectors need ground size ≤ 6, got {ground_size}"
            )));
        }
        let universe = 1u64 << ground_size;
        Self::new(
            ground_size,
            (0..universe).filter(|m| characteristic >> m & 1 == 1),
        )
    }

    #[inline]
    pub fn ground_size(&self) -> u32 {
        self.ground_size
    }

    #[inline]
    pub fn members(&self) -> &[u64] {
        &self.members
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, mask: u64) -> bool {
        self.members.binary_search(&mask).is_ok()
    }

    pub fn is_subfamily_of(&self, other: &SetFamily) -> bool {
        self.members.iter().all(|&m| other.contains(m))
    }

    /// Mask of the whole ground set.
    #[inline]
    pub fn universe(&self) -> u64 {
        (1u64 << self.ground_size) - 1
    }

    pub(crate) fn require_nonempty(&self, op: &'static str) -> Result<()> {
        if self.is_empty() {
            Err(Error::EmptyFamily(op))
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} members=[", self.ground_size)?;
        for (i, m) in self.members.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("]")
    }
}

/// A subset of `F_p^n` in canonical form: encoded points strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PointSet {
    modulus: u64,
    dimension: u32,
    points: Vec<u64>,
}

impl PointSet {
    pub fn new(
        modulus: u64,
        dimension: u32,
        points: impl IntoIterator<Item = u64>,
    ) -> Result<Self> {
        check_modulus(modulus)?;
        if dimension == 0 {
            return Err(Error::Parameter("dimension must be at least 1".into()));
        }
        let size = space_size(modulus, dimension)?;
        let mut points: Vec<u64> = points.into_iter().collect();
        if let Some(&bad) = points.iter().find(|&&x| x >= size) {
            return Err(Error::Dimension(format!(
                "point {bad} is not an encoding of F_{modulus}^{dimension}"
            )));
        }
        points.sort_unstable();
        points.dedup();
        Ok(PointSet {
            modulus,
            dimension,
            points,
        })
    }

    /// All of `F_p^n`.
    pub fn full_space(modulus: u64, dimension: u32) -> Result<Self> {
        let size = space_size(modulus, dimension)?;
        if size > MAX_GENERATED_SIZE {
            return Err(Error::Resource(format!(
                "F_{modulus}^{dimension} is too large to list"
            )));
        }
        Self::new(modulus, dimension, 0..size)
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    #[inline]
    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    #[inline]
    pub fn points(&self) -> &[u64] {
        &self.points
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, point: u64) -> bool {
        self.points.binary_search(&point).is_ok()
    }

    pub fn space_size(&self) -> u64 {
        // Validated at construction.
        self.modulus.pow(self.dimension)
    }

    /// Coordinates of an encoded point, coordinate 1 first.
    pub fn digits(&self, point: u64) -> Vec<u64> {
        decode_point(self.modulus, self.dimension, point)
    }

    /// Coordinatewise sum of two encoded points.
    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        add_points(self.modulus, self.dimension, a, b)
    }

    /// Reinterprets a set of 0/1 points as a family of subsets of `[n]`.
    pub fn to_set_family(&self) -> Result<SetFamily> {
        let masks = self
            .points
            .iter()
            .map(|&x| {
                let mut mask = 0u64;
                for (i, d) in self.digits(x).into_iter().enumerate() {
                    match d {
                        0 => {}
                        1 => mask |= 1 << i,
                        _ => {
                            return Err(Error::Parameter(format!(
                                "point {x} has a coordinate outside {{0,1}}"
                            )))
                        }
                    }
                }
                Ok(mask)
            })
            .collect::<Result<Vec<_>>>()?;
        SetFamily::new(self.dimension, masks)
    }

    pub(crate) fn require_nonempty(&self, op: &'static str) -> Result<()> {
        if self.is_empty() {
            Err(Error::EmptyFamily(op))
        } else {
            Ok(())
        }
    }
}

pub(crate) fn decode_point(p: u64, n: u32, mut point: u64) -> Vec<u64> {
    (0..n)
        .map(|_| {
            let d = point % p;
            point /= p;
            d
        })
        .collect()
}

pub(crate) fn encode_point(p: u64, digits: &[u64]) -> u64 {
    digits.iter().rev().fold(0, |acc, &d| acc * p + d)
}

#[inline]
pub(crate) fn add_points(p: u64, n: u32, mut a: u64, mut b: u64) -> u64 {
    if p == 2 {
        return a ^ b;
    }
    let mut sum = 0;
    let mut place = 1;
    for _ in 0..n {
        sum += (a % p + b % p) % p * place;
        a /= p;
        b /= p;
        place *= p;
    }
    sum
}

/// Binary set operation used to build `A⋆B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetOp {
    SymDiff,
    Intersect,
    Union,
}

impl SetOp {
    pub const ALL: [SetOp; 3] = [SetOp::SymDiff, SetOp::Intersect, SetOp::Union];

    #[inline]
    pub fn apply(self, s: u64, t: u64) -> u64 {
        match self {
            SetOp::SymDiff => s ^ t,
            SetOp::Intersect => s & t,
            SetOp::Union => s | t,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SetOp::SymDiff => "sym_diff",
            SetOp::Intersect => "intersect",
            SetOp::Union => "union",
        }
    }
}

impl FromStr for SetOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sym_diff" | "sym-diff" | "xor" => Ok(SetOp::SymDiff),
            "intersect" | "and" => Ok(SetOp::Intersect),
            "union" | "or" => Ok(SetOp::Union),
            _ => Err(Error::Parameter(format!("unknown set operation '{s}'"))),
        }
    }
}

/// `A⋆B = {S⋆T : S ∈ A, T ∈ B}`.
pub fn pairwise_family(a: &SetFamily, b: &SetFamily, op: SetOp) -> Result<SetFamily> {
    if a.ground_size != b.ground_size {
        return Err(Error::Dimension(format!(
            "ground sizes {} and {} differ",
            a.ground_size, b.ground_size
        )));
    }
    a.require_nonempty("pairwise_family")?;
    b.require_nonempty("pairwise_family")?;
    let n = a.ground_size;
    let members = if n <= 20 {
        let mut seen = vec![false; 1 << n];
        for &s in &a.members {
            for &t in &b.members {
                seen[op.apply(s, t) as usize] = true;
            }
        }
        collect_present(&seen)
    } else {
        let mut out: Vec<u64> = Vec::with_capacity(a.len() * b.len());
        for &s in &a.members {
            out.extend(b.members.iter().map(|&t| op.apply(s, t)));
        }
        out.sort_unstable();
        out.dedup();
        out
    };
    Ok(SetFamily {
        ground_size: n,
        members,
    })
}

fn collect_present(seen: &[bool]) -> Vec<u64> {
    seen.iter()
        .enumerate()
        .filter_map(|(i, &hit)| hit.then_some(i as u64))
        .collect()
}

/// `k·A = {a_1 + … + a_k : a_i ∈ A}` with coordinatewise addition mod `p`.
///
/// Built one summand at a time with deduplication after every step, so the
/// cost is `O(k·|A|·|k·A|)` rather than `|A|^k`.
pub fn k_fold_sumset(a: &PointSet, k: usize) -> Result<PointSet> {
    a.require_nonempty("k_fold_sumset")?;
    if k == 0 {
        return Err(Error::Parameter("k-fold sumset needs k ≥ 1".into()));
    }
    let size = a.space_size();
    let mut current = a.points.clone();
    for _ in 1..k {
        current = if size <= PRESENCE_TABLE_LIMIT {
            let mut seen = vec![false; size as usize];
            for &x in &current {
                for &y in &a.points {
                    seen[a.add(x, y) as usize] = true;
                }
            }
            collect_present(&seen)
        } else {
            let mut next: Vec<u64> = Vec::with_capacity(current.len() * a.len());
            for &x in &current {
                next.extend(a.points.iter().map(|&y| a.add(x, y)));
            }
            next.sort_unstable();
            next.dedup();
            next
        };
    }
    Ok(PointSet {
        modulus: a.modulus,
        dimension: a.dimension,
        points: current,
    })
}

/// Views each member of `A` as a 0/1 vector of `F_p^n`.
pub fn embed_01(a: &SetFamily, p: u64) -> Result<PointSet> {
    check_modulus(p)?;
    a.require_nonempty("embed_01")?;
    let n = a.ground_size;
    space_size(p, n)?;
    let points = a.members.iter().map(|&mask| {
        let digits: Vec<u64> = (0..n).map(|i| mask >> i & 1).collect();
        encode_point(p, &digits)
    });
    PointSet::new(p, n, points)
}

/// Named family constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// All sets of size at most `d`.
    LowWeight(u32),
    /// All sets of size at least `n - d`.
    HighWeight(u32),
    Powerset,
    /// `size` distinct masks drawn uniformly from `[0, 2^n)`.
    Random {
        size: u64,
        seed: u64,
    },
}

/// Builds one of the named families over `[n]`.
///
/// `Random` uses Robert Floyd's distinct-sampling algorithm driven by a
/// `ChaCha8` generator seeded with `seed_from_u64(seed)`: for
/// `j = N-m, …, N-1` draw `t` uniformly from `0..=j` and insert `t`, or `j`
/// when `t` was already taken. The sample is then sorted, so a seed fixes
/// the family byte-for-byte on every platform.
pub fn generate_family(n: u32, kind: FamilyKind) -> Result<SetFamily> {
    if n == 0 || n > SetFamily::MAX_GROUND_SIZE {
        return Err(Error::Parameter(format!(
            "ground size {n} outside 1..={}",
            SetFamily::MAX_GROUND_SIZE
        )));
    }
    let universe = 1u64 << n;
    match kind {
        FamilyKind::LowWeight(d) | FamilyKind::HighWeight(d) => {
            if d > n {
                return Err(Error::Parameter(format!(
                    "weight bound {d} exceeds n = {n}"
                )));
            }
            let count = binom_sum(u64::from(n), u64::from(d))?;
            if count > MAX_GENERATED_SIZE {
                return Err(Error::Resource(format!(
                    "family of size {count} is too large"
                )));
            }
            let full = universe - 1;
            let mut members = Vec::with_capacity(count as usize);
            for w in 0..=d {
                members.extend(masks_of_weight(n, w));
            }
            if matches!(kind, FamilyKind::HighWeight(_)) {
                for m in &mut members {
                    *m ^= full;
                }
            }
            SetFamily::new(n, members)
        }
        FamilyKind::Powerset => {
            if universe > MAX_GENERATED_SIZE {
                return Err(Error::Resource(format!("powerset of [{n}] is too large")));
            }
            SetFamily::new(n, 0..universe)
        }
        FamilyKind::Random { size, seed } => {
            if size == 0 || size > universe {
                return Err(Error::Parameter(format!(
                    "random family size {size} outside 1..=2^{n}"
                )));
            }
            if size > MAX_GENERATED_SIZE {
                return Err(Error::Resource(format!(
                    "family of size {size} is too large"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            SetFamily::new(n, floyd_sample(&mut rng, universe, size))
        }
    }
}

/// Floyd's algorithm: `m` distinct values from `0..universe`, unsorted.
pub(crate) fn floyd_sample<R: Rng>(rng: &mut R, universe: u64, m: u64) -> Vec<u64> {
    let mut chosen = HashSet::with_capacity(m as usize);
    let mut out = Vec::with_capacity(m as usize);
    for j in universe - m..universe {
        let t = rng.gen_range(0..=j);
        let pick = if chosen.contains(&t) { j } else { t };
        chosen.insert(pick);
        out.push(pick);
    }
    out
}

/// All masks over `[n]` with exactly `w` bits, in increasing order.
pub(crate) fn masks_of_weight(n: u32, w: u32) -> impl Iterator<Item = u64> {
    let limit = 1u64 << n;
    let first = if w == 0 { 0 } else { (1u64 << w) - 1 };
    let mut next = Some(first);
    std::iter::from_fn(move || {
        let current = next?;
        if current >= limit {
            return None;
        }
        next = if current == 0 {
            None
        } else {
            // Gosper's hack.
            let c = current & current.wrapping_neg();
            let r = current + c;
            let n = (((r ^ current) >> 2) / c) | r;
            (r != 0 && n > current).then_some(n)
        };
        Some(current)
    })
}
