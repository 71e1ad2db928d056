//! Croot–Lev–Pach matrices and slice-rank decompositions of sum tensors.
//!
//! For a reduced polynomial `f` of degree `d`, the tensor
//! `T(X¹, …, X^k) = f(X¹ + ⋯ + X^k)` expands into monomials in `k` groups of
//! variables. Every expanded monomial has total degree `≤ d`, so some group
//! carries degree `≤ ⌊d/k⌋`; grouping monomials by the lowest such group and
//! by that group's monomial writes `T` as at most `k·|𝓜_{⌊d/k⌋}(p,n)|`
//! slice-rank-one terms.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::family::{decode_point, space_size, PointSet};
use crate::field::Field;
use crate::interpolation::{monomial_count, FieldMatrix, Monomial, ReducedPolynomial};

/// Configurable limits for the dense constructions in this module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeGuard {
    /// Largest `p^n` for which `clp_matrix` builds the `p^n × p^n` matrix.
    pub max_clp_dim: u64,
    /// Largest `p^(k·n)` grid a slice decomposition is built and checked on.
    pub max_grid: u64,
    /// Largest number of entries `|A|^k` in a dense sum tensor.
    pub max_tensor_entries: u64,
}

impl Default for SizeGuard {
    fn default() -> Self {
        SizeGuard {
            max_clp_dim: 4096,
            max_grid: 1 << 24,
            max_tensor_entries: 1 << 24,
        }
    }
}

fn checked_power(base: u64, exp: u64, limit: u64, what: &str) -> Result<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc
            .checked_mul(base)
            .filter(|&v| v <= limit)
            .ok_or_else(|| {
                Error::Resource(format!("{what} {base}^{exp} exceeds the limit {limit}"))
            })?;
    }
    Ok(acc)
}

/// `M_{x,y} = P(x + y)` over all of `F_p^n`, rows and columns in encoded order.
pub fn clp_matrix(poly: &ReducedPolynomial, guard: &SizeGuard) -> Result<FieldMatrix> {
    let p = poly.modulus();
    let n = poly.num_vars();
    let size = checked_power(p, u64::from(n), guard.max_clp_dim, "CLP matrix dimension")? as usize;
    let table = poly.value_table()?;
    let mut entries = Vec::with_capacity(size * size);
    for x in 0..size as u64 {
        for y in 0..size as u64 {
            entries.push(table[crate::family::add_points(p, n, x, y) as usize]);
        }
    }
    FieldMatrix::new(p, size, size, entries)
}

/// Rank of the CLP matrix against `2·|𝓜_{⌊d/2⌋}(p, n)|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClpReport {
    pub modulus: u64,
    pub num_vars: u32,
    pub degree: u32,
    pub rank: u64,
    pub bound: u64,
    pub ok: bool,
}

pub fn verify_clp_bound(poly: &ReducedPolynomial, guard: &SizeGuard) -> Result<ClpReport> {
    let m = clp_matrix(poly, guard)?;
    let degree = poly.degree();
    let half = monomial_count(poly.modulus(), poly.num_vars(), u64::from(degree / 2))?;
    let bound = half
        .checked_mul(2)
        .ok_or_else(|| Error::Overflow("CLP bound".into()))?;
    let rank = m.rank() as u64;
    Ok(ClpReport {
        modulus: poly.modulus(),
        num_vars: poly.num_vars(),
        degree,
        rank,
        bound,
        ok: rank <= bound,
    })
}

/// One slice-rank-one term: `axis_monomial(X^axis) · residual(other axes)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceTerm {
    /// 1-based axis index.
    pub axis: usize,
    pub axis_monomial: Monomial,
    /// Polynomial in the `(k-1)·n` variables of the remaining axes, in axis order.
    pub residual: ReducedPolynomial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceDecomposition {
    pub modulus: u64,
    pub num_vars: u32,
    pub arity: usize,
    /// `⌊deg(f)/k⌋`, the degree cap on every axis monomial.
    pub degree_bound: u32,
    pub terms: Vec<SliceTerm>,
}

impl SliceDecomposition {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `k·|𝓜_{⌊d/k⌋}(p, n)|`.
    pub fn term_bound(&self) -> Result<u64> {
        let m = monomial_count(self.modulus, self.num_vars, u64::from(self.degree_bound))?;
        m.checked_mul(self.arity as u64)
            .ok_or_else(|| Error::Overflow("slice-rank bound".into()))
    }

    /// Value of the decomposition at `(X¹, …, X^k)` given as coordinate lists.
    pub fn evaluate(&self, axes: &[Vec<u64>]) -> u64 {
        let field = Field::new(self.modulus).expect("validated modulus");
        self.terms.iter().fold(0, |acc, term| {
            let head = term.axis_monomial.evaluate(field, &axes[term.axis - 1]);
            if head == 0 {
                return acc;
            }
            let rest: Vec<u64> = axes
                .iter()
                .enumerate()
                .filter(|&(i, _)| i + 1 != term.axis)
                .flat_map(|(_, x)| x.iter().copied())
                .collect();
            field.add(acc, field.mul(head, term.residual.evaluate(&rest)))
        })
    }

    /// Checks `Σ terms = f(X¹ + ⋯ + X^k)` at every point of `(F_p^n)^k`.
    pub fn reconstructs(&self, f: &ReducedPolynomial, guard: &SizeGuard) -> Result<bool> {
        let p = self.modulus;
        let n = self.num_vars;
        let k = self.arity;
        if f.modulus() != p || f.num_vars() != n {
            return Err(Error::Dimension(
                "polynomial does not match the decomposition".into(),
            ));
        }
        let block = space_size(p, n)? as usize;
        let grid = checked_power(
            p,
            k as u64 * u64::from(n),
            guard.max_grid,
            "evaluation grid",
        )?;
        let field = Field::new(p)?;
        let target = f.value_table()?;
        // Tabulate each term's two factors once.
        let tables: Vec<(usize, Vec<u64>, Vec<u64>)> = self
            .terms
            .iter()
            .map(|t| {
                let head = (0..block as u64)
                    .map(|x| t.axis_monomial.evaluate(field, &decode_point(p, n, x)))
                    .collect();
                Ok((t.axis, head, t.residual.value_table()?))
            })
            .collect::<Result<_>>()?;
        let mut axes = vec![0usize; k];
        for idx in 0..grid as usize {
            let mut rest = idx;
            let mut sum = 0u64;
            for slot in axes.iter_mut() {
                *slot = rest % block;
                rest /= block;
                sum = crate::family::add_points(p, n, sum, *slot as u64);
            }
            let mut value = 0u64;
            for (axis, head, residual) in &tables {
                let h = head[axes[axis - 1]];
                if h == 0 {
                    continue;
                }
                let other = axes
                    .iter()
                    .enumerate()
                    .rev()
                    .filter(|&(i, _)| i + 1 != *axis)
                    .fold(0usize, |acc, (_, &x)| acc * block + x);
                value = field.add(value, field.mul(h, residual[other]));
            }
            if value != target[sum as usize] {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// All ways to split exponent `e` over `k` axes, with multinomial
/// coefficients mod `p` (nonzero since `e < p`).
fn compositions(e: u32, k: usize, field: Field, factorials: &[u64]) -> Vec<(Vec<u32>, u64)> {
    fn walk(left: u32, k: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == k {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for a in 0..=left {
            prefix.push(a);
            walk(left - a, k, prefix, out);
            prefix.pop();
        }
    }
    let mut parts = Vec::new();
    walk(e, k, &mut Vec::with_capacity(k), &mut parts);
    parts
        .into_iter()
        .map(|split| {
            let denom = split
                .iter()
                .fold(1, |acc, &a| field.mul(acc, factorials[a as usize]));
            let coeff = field.mul(factorials[e as usize], field.inv(denom));
            (split, coeff)
        })
        .collect()
}

/// Decomposes `f(X¹ + ⋯ + X^k)` into slice-rank-one terms.
///
/// Each expanded monomial goes to the lowest-index axis whose group degree
/// is at most `⌊deg(f)/k⌋`; terms are ordered by axis, then by axis monomial.
pub fn slice_decompose(
    f: &ReducedPolynomial,
    k: usize,
    guard: &SizeGuard,
) -> Result<SliceDecomposition> {
    if k < 2 {
        return Err(Error::Parameter(format!(
            "slice decomposition needs k ≥ 2, got {k}"
        )));
    }
    let p = f.modulus();
    let n = f.num_vars() as usize;
    checked_power(p, (k * n) as u64, guard.max_grid, "evaluation grid")?;
    let field = f.field();
    let mut factorials = vec![1u64; p as usize];
    for i in 1..p as usize {
        factorials[i] = field.mul(factorials[i - 1], i as u64);
    }

    // Expanded polynomial in k·n variables, axis-major.
    let mut expanded: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
    for (m, &c) in f.terms() {
        let mut partial: Vec<(Vec<u32>, u64)> = vec![(vec![0; k * n], c)];
        for (j, &e) in m.exponents().iter().enumerate() {
            if e == 0 {
                continue;
            }
            let splits = compositions(e, k, field, &factorials);
            let mut next = Vec::with_capacity(partial.len() * splits.len());
            for (exps, coeff) in &partial {
                for (split, mult) in &splits {
                    let mut exps = exps.clone();
                    for (axis, &a) in split.iter().enumerate() {
                        exps[axis * n + j] = a;
                    }
                    next.push((exps, field.mul(*coeff, *mult)));
                }
            }
            partial = next;
        }
        for (exps, coeff) in partial {
            let slot = expanded.entry(exps).or_insert(0);
            *slot = field.add(*slot, coeff);
        }
    }

    let degree_bound = f.degree() / k as u32;
    let mut grouped: BTreeMap<(usize, Monomial), Vec<(Monomial, u64)>> = BTreeMap::new();
    for (exps, coeff) in expanded {
        if coeff == 0 {
            continue;
        }
        let axis = (0..k)
            .find(|&i| exps[i * n..(i + 1) * n].iter().sum::<u32>() <= degree_bound)
            .expect("some axis has group degree at most ⌊d/k⌋");
        let head = Monomial::new(exps[axis * n..(axis + 1) * n].to_vec());
        let rest: Vec<u32> = (0..k)
            .filter(|&i| i != axis)
            .flat_map(|i| exps[i * n..(i + 1) * n].iter().copied())
            .collect();
        grouped
            .entry((axis + 1, head))
            .or_default()
            .push((Monomial::new(rest), coeff));
    }

    let residual_vars = ((k - 1) * n) as u32;
    let mut terms = Vec::with_capacity(grouped.len());
    for ((axis, axis_monomial), parts) in grouped {
        let residual = ReducedPolynomial::from_terms(p, residual_vars, parts)?;
        if !residual.is_zero() {
            terms.push(SliceTerm {
                axis,
                axis_monomial,
                residual,
            });
        }
    }
    Ok(SliceDecomposition {
        modulus: p,
        num_vars: n as u32,
        arity: k,
        degree_bound,
        terms,
    })
}

/// Dense `T(a₁, …, a_k) = f(a₁ + ⋯ + a_k)` for `a_i` ranging over a point set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumTensor {
    pub arity: usize,
    pub axis_points: PointSet,
    pub generator: ReducedPolynomial,
    /// Row-major: the first axis varies slowest.
    pub values: Vec<u64>,
}

impl SumTensor {
    pub fn modulus(&self) -> u64 {
        self.axis_points.modulus()
    }

    pub fn side(&self) -> usize {
        self.axis_points.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.side(); self.arity]
    }

    pub fn get(&self, index: &[usize]) -> u64 {
        let flat = index.iter().fold(0, |acc, &i| acc * self.side() + i);
        self.values[flat]
    }

    /// The tensor as a matrix when `arity = 2`.
    pub fn to_matrix(&self) -> Result<FieldMatrix> {
        if self.arity != 2 {
            return Err(Error::Parameter(format!(
                "a {}-tensor is not a matrix",
                self.arity
            )));
        }
        FieldMatrix::new(
            self.modulus(),
            self.side(),
            self.side(),
            self.values.clone(),
        )
    }

    /// SHA-256 over modulus, arity, dimension, axis points and values.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.modulus().to_le_bytes());
        h.update((self.arity as u64).to_le_bytes());
        h.update(u64::from(self.axis_points.dimension()).to_le_bytes());
        for &x in self.axis_points.points() {
            h.update(x.to_le_bytes());
        }
        for &v in &self.values {
            h.update(v.to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}

pub fn sum_tensor(
    f: &ReducedPolynomial,
    points: &PointSet,
    k: usize,
    guard: &SizeGuard,
) -> Result<SumTensor> {
    points.require_nonempty("sum_tensor")?;
    if k == 0 {
        return Err(Error::Parameter("tensor arity must be at least 1".into()));
    }
    if f.modulus() != points.modulus() || f.num_vars() != points.dimension() {
        return Err(Error::Dimension(
            "polynomial and point set live in different spaces".into(),
        ));
    }
    let side = points.len();
    let entries = checked_power(
        side as u64,
        k as u64,
        guard.max_tensor_entries,
        "tensor size",
    )?;
    let mut cache: BTreeMap<u64, u64> = BTreeMap::new();
    let mut values = Vec::with_capacity(entries as usize);
    let mut index = vec![0usize; k];
    for _ in 0..entries {
        let sum = index
            .iter()
            .fold(0, |acc, &i| points.add(acc, points.points()[i]));
        let v = *cache.entry(sum).or_insert_with(|| f.evaluate_encoded(sum));
        values.push(v);
        // odometer, last axis fastest
        for slot in index.iter_mut().rev() {
            *slot += 1;
            if *slot < side {
                break;
            }
            *slot = 0;
        }
    }
    Ok(SumTensor {
        arity: k,
        axis_points: points.clone(),
        generator: f.clone(),
        values,
    })
}

/// Diagonality and the slice-rank lower bound for diagonal tensors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalReport {
    pub is_diagonal: bool,
    /// Nonzero diagonal count for a diagonal tensor, otherwise 0.
    pub lower_bound: u64,
    pub nonzero_diagonal_count: u64,
}

/// A diagonal tensor with `D` nonzero diagonal entries has slice rank `D`
/// exactly.
pub fn diagonal_slice_rank_bounds(t: &SumTensor) -> DiagonalReport {
    let side = t.side();
    let step: usize = (0..t.arity).fold(0, |acc, _| acc * side + 1);
    let mut is_diagonal = true;
    let mut nonzero = 0u64;
    for (flat, &v) in t.values.iter().enumerate() {
        let on_diagonal = flat % step == 0 && flat / step < side;
        if on_diagonal {
            nonzero += u64::from(v != 0);
        } else if v != 0 {
            is_diagonal = false;
        }
    }
    DiagonalReport {
        is_diagonal,
        lower_bound: if is_diagonal { nonzero } else { 0 },
        nonzero_diagonal_count: nonzero,
    }
}
