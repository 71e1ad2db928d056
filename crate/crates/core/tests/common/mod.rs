//! Brute-force oracles shared by the integration tests.

#![allow(dead_code)]

use std::collections::HashMap;

/// Largest |Y| with every pattern on Y realized, by trying every Y.
pub fn naive_vc(n: u32, members: &[u64]) -> u32 {
    let mut best = 0;
    for y in 0u64..(1 << n) {
        let size = y.count_ones();
        if size <= best {
            continue;
        }
        let mut seen = vec![false; 1 << n];
        for &m in members {
            seen[(m & y) as usize] = true;
        }
        let mut sub = y;
        let mut all = true;
        loop {
            all &= seen[sub as usize];
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & y;
        }
        if all {
            best = size;
        }
    }
    best
}

/// Members of the characteristic-vector family `c` over `[n]`.
pub fn members_of(n: u32, c: u64) -> Vec<u64> {
    (0..1u64 << n).filter(|m| c >> m & 1 == 1).collect()
}

pub fn pairwise(a: &[u64], op: impl Fn(u64, u64) -> u64) -> Vec<u64> {
    let mut out: Vec<u64> = a
        .iter()
        .flat_map(|&s| a.iter().map(move |&t| (s, t)))
        .map(|(s, t)| op(s, t))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Digits of `x` in base `p`, coordinate 1 first.
pub fn digits(p: u64, n: u32, mut x: u64) -> Vec<u64> {
    (0..n)
        .map(|_| {
            let d = x % p;
            x /= p;
            d
        })
        .collect()
}

/// Every polynomial with individual degrees below `p`, tabulated on all of
/// F_p^n together with its degree.
pub struct PolynomialCatalogue {
    pub p: u64,
    pub n: u32,
    pub entries: Vec<(Vec<u64>, u32)>,
}

impl PolynomialCatalogue {
    pub fn new(p: u64, n: u32) -> Self {
        let size = p.pow(n) as usize;
        let exponents: Vec<Vec<u64>> = (0..size as u64).map(|e| digits(p, n, e)).collect();
        let points = exponents.clone();
        let monomial_values: Vec<Vec<u64>> = exponents
            .iter()
            .map(|e| {
                points
                    .iter()
                    .map(|x| {
                        x.iter()
                            .zip(e)
                            .fold(1, |acc, (&xi, &ei)| acc * xi.pow(ei as u32) % p)
                    })
                    .collect()
            })
            .collect();
        let total = (p as usize).pow(size as u32);
        let mut entries = Vec::with_capacity(total);
        for index in 0..total as u64 {
            let coefficients = digits(p, size as u32, index);
            let mut table = vec![0; size];
            let mut degree = 0;
            for (m, &c) in coefficients.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                degree = degree.max(exponents[m].iter().sum::<u64>() as u32);
                for (t, v) in table.iter_mut().zip(&monomial_values[m]) {
                    *t = (*t + c * v) % p;
                }
            }
            entries.push((table, degree));
        }
        PolynomialCatalogue { p, n, entries }
    }

    /// Minimal degree of each function on `domain` (encoded points).
    pub fn restriction_degrees(&self, domain: &[u64]) -> HashMap<Vec<u64>, u32> {
        let mut best: HashMap<Vec<u64>, u32> = HashMap::new();
        for (table, degree) in &self.entries {
            let key: Vec<u64> = domain.iter().map(|&x| table[x as usize]).collect();
            let slot = best.entry(key).or_insert(*degree);
            *slot = (*slot).min(*degree);
        }
        best
    }

    /// Interpolation degree of `domain`: the largest minimal degree.
    pub fn int_deg(&self, domain: &[u64]) -> u32 {
        let degrees = self.restriction_degrees(domain);
        assert_eq!(degrees.len() as u64, self.p.pow(domain.len() as u32));
        degrees.values().copied().max().unwrap_or(0)
    }
}

/// Evaluates `Σ c·x^e` with plain modular arithmetic.
pub fn evaluate_terms<'a>(
    p: u64,
    terms: impl IntoIterator<Item = (&'a [u32], u64)>,
    point: &[u64],
) -> u64 {
    terms.into_iter().fold(0, |acc, (exponents, c)| {
        let value = exponents
            .iter()
            .zip(point)
            .fold(c % p, |v, (&e, &x)| v * x.pow(e) % p);
        (acc + value) % p
    })
}

pub fn choose(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Monomials in `n` variables, exponents below `p`, total degree at most `d`.
pub fn count_monomials(p: u64, n: u32, d: u64) -> u64 {
    (0..p.pow(n))
        .filter(|&e| digits(p, n, e).iter().sum::<u64>() <= d)
        .count() as u64
}
