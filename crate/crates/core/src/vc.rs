//! Shattering and VC dimension.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::SetFamily;

/// Bits of `s` selected by `y`, packed into the low `popcount(y)` bits.
#[inline]
pub(crate) fn compress(s: u64, mut y: u64) -> u64 {
    let mut out = 0u64;
    let mut k = 0;
    while y != 0 {
        let bit = y & y.wrapping_neg();
        if s & bit != 0 {
            out |= 1 << k;
        }
        k += 1;
        y ^= bit;
    }
    out
}

/// Inverse of [`compress`]: spreads the low bits of `t` onto the set bits of `y`.
#[inline]
pub(crate) fn expand(t: u64, mut y: u64) -> u64 {
    let mut out = 0u64;
    let mut k = 0;
    while y != 0 {
        let bit = y & y.wrapping_neg();
        if t >> k & 1 == 1 {
            out |= bit;
        }
        k += 1;
        y ^= bit;
    }
    out
}

/// Presence table of the traces `{S ∩ Y : S ∈ A}`, indexed by compressed trace.
pub(crate) fn trace_table(a: &SetFamily, y: u64) -> Vec<bool> {
    let mut seen = vec![false; 1usize << y.count_ones()];
    for &s in a.members() {
        seen[compress(s, y) as usize] = true;
    }
    seen
}

fn shattered_unchecked(a: &SetFamily, y: u64) -> bool {
    let k = y.count_ones();
    // 2^|Y| distinct traces need at least that many members.
    if k >= 64 || (1u64 << k) > a.len() as u64 {
        return false;
    }
    trace_table(a, y).into_iter().all(|hit| hit)
}

/// `true` iff `{S ∩ Y : S ∈ A} = 2^Y`.
pub fn is_shattered(a: &SetFamily, y: u64) -> Result<bool> {
    a.require_nonempty("is_shattered")?;
    if y & !a.universe() != 0 {
        return Err(Error::Dimension(format!(
            "set {y:#b} is not a subset of [{}]",
            a.ground_size()
        )));
    }
    Ok(shattered_unchecked(a, y))
}

/// Every set shattered by a family, grouped by size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShatterReport {
    pub family_size: usize,
    pub vc_dim: u32,
    /// `shattered_sets_by_level[k]` lists the shattered sets of size `k` in
    /// increasing numeric order.
    pub shattered_sets_by_level: Vec<Vec<u64>>,
}

impl ShatterReport {
    pub fn shattered_count(&self) -> usize {
        self.shattered_sets_by_level.iter().map(Vec::len).sum()
    }
}

/// All shattered sets, level by level.
///
/// Level `k + 1` candidates are `Y ∪ {j}` for level-`k` survivors `Y` and `j`
/// above the top element of `Y`; a candidate is tested only when all of its
/// `k`-subsets survived. The search stops at the first empty level.
pub fn shattered_sets(a: &SetFamily) -> Result<ShatterReport> {
    a.require_nonempty("shattered_sets")?;
    let n = a.ground_size();
    let mut levels: Vec<Vec<u64>> = vec![vec![0]];
    loop {
        let prev = levels.last().expect("level 0 always present");
        let mut next = Vec::new();
        for &y in prev {
            let start = if y == 0 { 0 } else { 64 - y.leading_zeros() };
            for j in start..n {
                let cand = y | 1 << j;
                let mut rest = cand;
                let subsets_ok = std::iter::from_fn(|| {
                    (rest != 0).then(|| {
                        let bit = rest & rest.wrapping_neg();
                        rest ^= bit;
                        cand ^ bit
                    })
                })
                .all(|sub| prev.binary_search(&sub).is_ok());
                if subsets_ok && shattered_unchecked(a, cand) {
                    next.push(cand);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort_unstable();
        levels.push(next);
    }
    Ok(ShatterReport {
        family_size: a.len(),
        vc_dim: (levels.len() - 1) as u32,
        shattered_sets_by_level: levels,
    })
}

/// Size of the largest shattered set.
pub fn vc_dim(a: &SetFamily) -> Result<u32> {
    a.require_nonempty("vc_dim")?;
    Ok(shattered_sets(a)?.vc_dim)
}
