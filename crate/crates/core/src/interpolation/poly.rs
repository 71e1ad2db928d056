//! Monomials with bounded individual degree and p-reduced polynomials.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::family::{decode_point, space_size};
use crate::field::Field;

/// Value tables and interpolation refuse spaces larger than this.
pub const MAX_TABLE_SIZE: u64 = 1 << 24;

/// Listing a monomial basis larger than this is refused.
pub const MAX_BASIS_SIZE: u64 = 1 << 24;

/// Exponent vector `(e_1, …, e_n)` of `x_1^{e_1} ⋯ x_n^{e_n}`.
///
/// Ordered by total degree, then lexicographically with larger leading
/// exponents first, so `1 < x_1 < x_2 < x_1^2 < x_1 x_2 < x_2^2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(n: u32) -> Self {
        Monomial(vec![0; n as usize])
    }

    /// The multilinear monomial `x_S` for a bitmask `S`.
    pub fn from_mask(n: u32, mask: u64) -> Self {
        Monomial((0..n).map(|i| (mask >> i & 1) as u32).collect())
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn num_vars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn evaluate(&self, field: Field, point: &[u64]) -> u64 {
        self.0
            .iter()
            .zip(point)
            .fold(1 % field.modulus(), |acc, (&e, &x)| {
                if e == 0 {
                    acc
                } else {
                    field.mul(acc, field.pow(x, u64::from(e)))
                }
            })
    }

    /// Comma-separated exponents, e.g. `1,0,2`.
    pub fn to_exponent_string(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        parts.join(",")
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Reduces an exponent using `x^p = x` on `F_p`.
#[inline]
fn reduce_exponent(e: u32, p: u64) -> u32 {
    let p = p as u32;
    if e < p {
        e
    } else {
        (e - 1) % (p - 1) + 1
    }
}

/// `|𝓜_d(p, n)|`: monomials in `n` variables with individual degree `≤ p-1`
/// and total degree `≤ d`. Degrees beyond `(p-1)n` clamp to `p^n`.
pub fn monomial_count(p: u64, n: u32, d: u64) -> Result<u64> {
    crate::field::check_modulus(p)?;
    let top = p - 1;
    let d = d.min(top * u64::from(n)) as usize;
    // ways[r] = number of exponent prefixes with total degree r
    let mut ways = vec![0u64; d + 1];
    ways[0] = 1;
    for _ in 0..n {
        let mut next = vec![0u64; d + 1];
        for (r, &w) in ways.iter().enumerate() {
            if w == 0 {
                continue;
            }
            for e in 0..=top.min((d - r) as u64) as usize {
                next[r + e] = next[r + e]
                    .checked_add(w)
                    .ok_or_else(|| Error::Overflow(format!("monomial_count({p}, {n}, {d})")))?;
            }
        }
        ways = next;
    }
    ways.into_iter().try_fold(0u64, |acc, w| {
        acc.checked_add(w)
            .ok_or_else(|| Error::Overflow(format!("monomial_count({p}, {n}, {d})")))
    })
}

/// Monomials of total degree exactly `g`, in canonical order.
pub fn monomials_of_degree(p: u64, n: u32, g: u32) -> Vec<Monomial> {
    fn walk(top: u32, remaining_vars: u32, g: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if remaining_vars == 0 {
            if g == 0 {
                out.push(Monomial(prefix.clone()));
            }
            return;
        }
        let rest_capacity = top * (remaining_vars - 1);
        let hi = top.min(g);
        let lo = g.saturating_sub(rest_capacity);
        for e in (lo..=hi).rev() {
            prefix.push(e);
            walk(top, remaining_vars - 1, g - e, prefix, out);
            prefix.pop();
        }
    }
    let top = (p - 1) as u32;
    let mut out = Vec::new();
    if g <= top * n {
        walk(top, n, g, &mut Vec::with_capacity(n as usize), &mut out);
    }
    out
}

/// The monomials of `𝓜_d(p, n)` in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialBasis {
    pub modulus: u64,
    pub dimension: u32,
    pub max_degree: u32,
    pub monomials: Vec<Monomial>,
}

impl MonomialBasis {
    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }
}

pub fn monomial_basis(p: u64, n: u32, d: u64) -> Result<MonomialBasis> {
    let count = monomial_count(p, n, d)?;
    space_size(p, n)?;
    if count > MAX_BASIS_SIZE {
        return Err(Error::Resource(format!(
            "basis of {count} monomials is too large"
        )));
    }
    let d = d.min((p - 1) * u64::from(n)) as u32;
    let monomials = (0..=d).flat_map(|g| monomials_of_degree(p, n, g)).collect();
    Ok(MonomialBasis {
        modulus: p,
        dimension: n,
        max_degree: d,
        monomials,
    })
}

/// A polynomial over `F_p` with every individual degree at most `p - 1`.
///
/// Terms are kept in canonical monomial order with nonzero coefficients.
/// The zero polynomial has degree 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedPolynomial {
    field: Field,
    num_vars: u32,
    terms: BTreeMap<Monomial, u64>,
}

impl ReducedPolynomial {
    pub fn zero(p: u64, n: u32) -> Result<Self> {
        Ok(ReducedPolynomial {
            field: Field::new(p)?,
            num_vars: n,
            terms: BTreeMap::new(),
        })
    }

    pub fn constant(p: u64, n: u32, c: u64) -> Result<Self> {
        Self::from_terms(p, n, [(Monomial::one(n), c)])
    }

    /// `x_i` for `i` in `0..n`.
    pub fn variable(p: u64, n: u32, i: u32) -> Result<Self> {
        if i >= n {
            return Err(Error::Dimension(format!(
                "variable index {i} out of range for n = {n}"
            )));
        }
        let mut e = vec![0; n as usize];
        e[i as usize] = 1;
        Self::from_terms(p, n, [(Monomial(e), 1)])
    }

    /// Sums the given terms. Exponents are reduced with `x^p = x` and
    /// coefficients modulo `p`; zero terms are dropped.
    pub fn from_terms(
        p: u64,
        n: u32,
        terms: impl IntoIterator<Item = (Monomial, u64)>,
    ) -> Result<Self> {
        let mut poly = Self::zero(p, n)?;
        for (m, c) in terms {
            if m.num_vars() != n as usize {
                return Err(Error::Dimension(format!(
                    "monomial has {} variables, expected {n}",
                    m.num_vars()
                )));
            }
            let m = Monomial(m.0.into_iter().map(|e| reduce_exponent(e, p)).collect());
            poly.add_term(m, c % p);
        }
        Ok(poly)
    }

    fn add_term(&mut self, m: Monomial, c: u64) {
        if c == 0 {
            return;
        }
        let f = self.field;
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = f.add(*o.get(), c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.field.modulus()
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }

    #[inline]
    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, u64> {
        &self.terms
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest total degree of a stored term; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.field != other.field || self.num_vars != other.num_vars {
            return Err(Error::Dimension(format!(
                "polynomials over F_{}[{} vars] and F_{}[{} vars]",
                self.modulus(),
                self.num_vars,
                other.modulus(),
                other.num_vars
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: u64) -> Self {
        let c = c % self.modulus();
        let f = self.field;
        let mut out = ReducedPolynomial {
            field: f,
            num_vars: self.num_vars,
            terms: BTreeMap::new(),
        };
        for (m, &a) in &self.terms {
            out.add_term(m.clone(), f.mul(a, c));
        }
        out
    }

    /// Product, reduced back to individual degree `≤ p - 1`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let f = self.field;
        let p = self.modulus();
        let mut out = ReducedPolynomial {
            field: f,
            num_vars: self.num_vars,
            terms: BTreeMap::new(),
        };
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                let m =
                    ma.0.iter()
                        .zip(&mb.0)
                        .map(|(&x, &y)| reduce_exponent(x + y, p))
                        .collect();
                out.add_term(Monomial(m), f.mul(ca, cb));
            }
        }
        Ok(out)
    }

    /// Value at a point given by its coordinates.
    pub fn evaluate(&self, point: &[u64]) -> u64 {
        let f = self.field;
        self.terms
            .iter()
            .fold(0, |acc, (m, &c)| f.add(acc, f.mul(c, m.evaluate(f, point))))
    }

    /// Value at a base-`p` encoded point.
    pub fn evaluate_encoded(&self, point: u64) -> u64 {
        self.evaluate(&decode_point(self.modulus(), self.num_vars, point))
    }

    /// Values at every point of `F_p^n`, indexed by encoded point.
    pub fn value_table(&self) -> Result<Vec<u64>> {
        let p = self.modulus();
        let n = self.num_vars;
        let size = table_size(p, n)?;
        let mut table = vec![0u64; size];
        for (m, &c) in &self.terms {
            let index =
                m.0.iter()
                    .rev()
                    .fold(0u64, |acc, &e| acc * p + u64::from(e));
            table[index as usize] = c;
        }
        let v = transfer_matrix(self.field, false);
        transform(&mut table, p, n, &v);
        Ok(table)
    }

    /// The unique reduced polynomial with the given value table.
    pub fn interpolate(p: u64, n: u32, table: &[u64]) -> Result<Self> {
        let size = table_size(p, n)?;
        if table.len() != size {
            return Err(Error::Dimension(format!(
                "value table has {} entries, F_{p}^{n} has {size}",
                table.len()
            )));
        }
        let field = Field::new(p)?;
        let mut coeffs: Vec<u64> = table.iter().map(|&v| v % p).collect();
        let w = transfer_matrix(field, true);
        transform(&mut coeffs, p, n, &w);
        let mut poly = Self::zero(p, n)?;
        for (index, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                let e = decode_point(p, n, index as u64)
                    .into_iter()
                    .map(|d| d as u32)
                    .collect();
                poly.terms.insert(Monomial(e), c);
            }
        }
        Ok(poly)
    }

    /// `δ_0(x) = Π_i (1 - x_i^{p-1})`, equal to 1 at the origin and 0 elsewhere.
    pub fn indicator_of_zero(p: u64, n: u32) -> Result<Self> {
        let mut acc = Self::constant(p, n, 1)?;
        for i in 0..n {
            let mut e = vec![0; n as usize];
            e[i as usize] = (p - 1) as u32;
            let factor = Self::from_terms(p, n, [(Monomial::one(n), 1), (Monomial(e), p - 1)])?;
            acc = acc.mul(&factor)?;
        }
        Ok(acc)
    }

    /// Uniform coefficients on every monomial of degree `≤ d`, with at least
    /// one degree-`d` term forced nonzero so the degree is exactly `d`.
    pub fn random<R: Rng>(p: u64, n: u32, d: u32, rng: &mut R) -> Result<Self> {
        let top = (p - 1) as u32 * n;
        if d > top {
            return Err(Error::Parameter(format!(
                "degree {d} exceeds (p-1)n = {top}"
            )));
        }
        let basis = monomial_basis(p, n, u64::from(d))?;
        let mut poly = Self::zero(p, n)?;
        for m in basis.monomials {
            let c = rng.gen_range(0..p);
            poly.add_term(m, c);
        }
        if poly.degree() < d || poly.is_zero() {
            let top_grade = monomials_of_degree(p, n, d);
            let m = top_grade[rng.gen_range(0..top_grade.len())].clone();
            let c = rng.gen_range(1..p);
            poly.terms.insert(m, c);
        }
        Ok(poly)
    }

    /// Terms as `coefficient:exponents` strings in canonical order.
    pub fn to_term_strings(&self) -> Vec<String> {
        self.terms
            .iter()
            .map(|(m, c)| format!("{c}:{}", m.to_exponent_string()))
            .collect()
    }

    /// Parses `;`-separated `coefficient:e1,…,en` terms. An empty string is
    /// the zero polynomial.
    pub fn parse_terms(p: u64, n: u32, input: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for raw in input.split(';') {
            let raw = raw.trim();
            if raw.is_empty() {
                continue;
            }
            let bad = || Error::Parameter(format!("malformed polynomial term '{raw}'"));
            let (c, e) = raw.split_once(':').ok_or_else(bad)?;
            let c: u64 = c.trim().parse().map_err(|_| bad())?;
            let e = e
                .split(',')
                .map(|x| x.trim().parse::<u32>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            if e.len() != n as usize {
                return Err(Error::Dimension(format!(
                    "term '{raw}' has {} exponents, expected {n}",
                    e.len()
                )));
            }
            terms.push((Monomial(e), c));
        }
        Self::from_terms(p, n, terms)
    }
}

impl fmt::Display for ReducedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        f.write_str(&self.to_term_strings().join(";"))
    }
}

fn table_size(p: u64, n: u32) -> Result<usize> {
    let size = space_size(p, n)?;
    if size > MAX_TABLE_SIZE || p > 4096 {
        return Err(Error::Resource(format!(
            "value table of F_{p}^{n} is too large"
        )));
    }
    Ok(size as usize)
}

/// One-variable change of basis between values at `0..p` and coefficients
/// of `1, x, …, x^{p-1}`.
///
/// Forward (`inverse = false`): `V[a][e] = a^e`. Inverse: from
/// `g(x) = Σ_a g(a)(1 - (x-a)^{p-1})` the coefficient of `x^e` is
/// `[e = 0]·Σ_a g(a) - Σ_a g(a)·a^{p-1-e}`.
fn transfer_matrix(field: Field, inverse: bool) -> Vec<u64> {
    let p = field.modulus();
    let mut m = vec![0u64; (p * p) as usize];
    for r in 0..p {
        for c in 0..p {
            let v = if inverse {
                let (e, a) = (r, c);
                let base = if e == 0 { 1 } else { 0 };
                field.sub(base, field.pow(a, p - 1 - e))
            } else {
                field.pow(r, c)
            };
            m[(r * p + c) as usize] = v;
        }
    }
    m
}

/// Applies `matrix` along every coordinate of a `p^n` table.
fn transform(table: &mut [u64], p: u64, n: u32, matrix: &[u64]) {
    let p_us = p as usize;
    let mut input = vec![0u64; p_us];
    let mut stride = 1usize;
    for _ in 0..n {
        let block = stride * p_us;
        for base in (0..table.len()).step_by(block) {
            for offset in 0..stride {
                for (a, slot) in input.iter_mut().enumerate() {
                    *slot = table[base + offset + a * stride];
                }
                for r in 0..p_us {
                    let row = &matrix[r * p_us..(r + 1) * p_us];
                    let acc = row
                        .iter()
                        .zip(&input)
                        .fold(0u64, |acc, (&m, &x)| (acc + m * x % p) % p);
                    table[base + offset + r * stride] = acc;
                }
            }
        }
        stride = block;
    }
}
