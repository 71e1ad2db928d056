//! Interpolation degree over `F_p`.
//!
//! `deg_A(f)` is the least `d` such that the value vector of `f` lies in the
//! column span of the evaluation matrix of `𝓜_d(p, n)` on `A`, and
//! `int-deg(A)` is the least `d` at which that matrix reaches rank `|A|`.
//! Both are computed with one elimination state that grows a degree grade
//! at a time.

mod matrix;
mod poly;

pub use matrix::{EchelonBasis, FieldMatrix};
pub use poly::{
    monomial_basis, monomial_count, monomials_of_degree, Monomial, MonomialBasis,
    ReducedPolynomial, MAX_BASIS_SIZE, MAX_TABLE_SIZE,
};

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{PointSet, SetFamily};
use crate::field::Field;
use crate::vc::{expand, is_shattered, trace_table};

/// Entry `(i, j)` is basis monomial `j` evaluated at domain point `i`.
pub fn evaluation_matrix(domain: &PointSet, basis: &MonomialBasis) -> Result<FieldMatrix> {
    if domain.modulus() != basis.modulus || domain.dimension() != basis.dimension {
        return Err(Error::Dimension(format!(
            "domain in F_{}^{} but basis over F_{}[{} vars]",
            domain.modulus(),
            domain.dimension(),
            basis.modulus,
            basis.dimension
        )));
    }
    let field = Field::new(domain.modulus())?;
    let mut entries = Vec::with_capacity(domain.len() * basis.len());
    for &x in domain.points() {
        let coords = domain.digits(x);
        entries.extend(basis.monomials.iter().map(|m| m.evaluate(field, &coords)));
    }
    FieldMatrix::new(domain.modulus(), domain.len(), basis.len(), entries)
}

/// A function from a point set to `F_p`, values aligned with domain order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialFunction {
    domain: PointSet,
    values: Vec<u64>,
}

impl PartialFunction {
    pub fn new(domain: PointSet, values: Vec<u64>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::Dimension(format!(
                "{} values for a domain of {} points",
                values.len(),
                domain.len()
            )));
        }
        if let Some(bad) = values.iter().find(|&&v| v >= domain.modulus()) {
            return Err(Error::Parameter(format!(
                "value {bad} is not an element of F_{}",
                domain.modulus()
            )));
        }
        Ok(PartialFunction { domain, values })
    }

    /// The indicator of one domain point.
    pub fn indicator(domain: PointSet, point: u64) -> Result<Self> {
        let values = domain
            .points()
            .iter()
            .map(|&x| u64::from(x == point))
            .collect();
        Self::new(domain, values)
    }

    pub fn domain(&self) -> &PointSet {
        &self.domain
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }
}

/// Column span of monomial evaluations on a domain, grown one degree at a time.
struct GradedSpan<'a> {
    domain: &'a PointSet,
    field: Field,
    coords: Vec<Vec<u64>>,
    span: EchelonBasis,
    next_grade: u32,
    max_grade: u32,
}

impl<'a> GradedSpan<'a> {
    fn new(domain: &'a PointSet) -> Result<Self> {
        let field = Field::new(domain.modulus())?;
        let coords = domain.points().iter().map(|&x| domain.digits(x)).collect();
        Ok(GradedSpan {
            domain,
            field,
            coords,
            span: EchelonBasis::new(field, domain.len()),
            next_grade: 0,
            max_grade: (domain.modulus() - 1) as u32 * domain.dimension(),
        })
    }

    /// Adds every monomial of the next degree; returns that degree.
    fn advance(&mut self) -> Option<u32> {
        if self.next_grade > self.max_grade {
            return None;
        }
        let g = self.next_grade;
        for m in monomials_of_degree(self.domain.modulus(), self.domain.dimension(), g) {
            if self.span.is_full() {
                break;
            }
            let column = self
                .coords
                .iter()
                .map(|c| m.evaluate(self.field, c))
                .collect();
            self.span.insert(column);
        }
        self.next_grade += 1;
        Some(g)
    }
}

/// Least degree of a reduced polynomial agreeing with `f` on its domain.
pub fn deg_on_set(f: &PartialFunction) -> Result<u32> {
    f.domain.require_nonempty("deg_on_set")?;
    let mut span = GradedSpan::new(&f.domain)?;
    while let Some(g) = span.advance() {
        if span.span.contains(&f.values) {
            return Ok(g);
        }
    }
    unreachable!("reduced monomials of degree ≤ (p-1)n span every function")
}

/// Least `d` such that every function on `domain` has a representative of
/// degree at most `d`.
pub fn int_deg(domain: &PointSet) -> Result<u32> {
    domain.require_nonempty("int_deg")?;
    let mut span = GradedSpan::new(domain)?;
    while let Some(g) = span.advance() {
        if span.span.is_full() {
            return Ok(g);
        }
    }
    unreachable!("reduced monomials of degree ≤ (p-1)n span every function")
}

/// A 0/1 assignment to the elements of `set`; `values ⊆ set` marks the ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pattern {
    pub set: u64,
    pub values: u64,
}

/// The numerically smallest pattern on `S` that no member of `A` exhibits.
pub fn find_unshattered_witness(a: &SetFamily, s: u64) -> Result<Pattern> {
    a.require_nonempty("find_unshattered_witness")?;
    if s & !a.universe() != 0 {
        return Err(Error::Dimension(format!(
            "set {s:#b} is not a subset of [{}]",
            a.ground_size()
        )));
    }
    if s.count_ones() > 24 {
        return Err(Error::Resource(format!(
            "trace table for |S| = {}",
            s.count_ones()
        )));
    }
    let seen = trace_table(a, s);
    let absent = seen
        .iter()
        .position(|&hit| !hit)
        .ok_or(Error::WitnessNotFound { set: s })?;
    Ok(Pattern {
        set: s,
        values: expand(absent as u64, s),
    })
}

/// A multilinear polynomial of degree `≤ VC-dim(A)` equal to `x_S` on `A`.
///
/// Shattered `S` is returned as `x_S`. Otherwise an absent pattern `v` gives
/// `Π_{i∈S}(x_i + v_i + 1) = 0` on `A`; expanding, `x_S` equals the sum of
/// `x_T` over `S∖Z ⊆ T ⊊ S` where `Z = {i ∈ S : v_i = 0}`, and each `x_T`
/// is reduced the same way.
pub fn represent_monomial(a: &SetFamily, s: u64) -> Result<ReducedPolynomial> {
    a.require_nonempty("represent_monomial")?;
    if s & !a.universe() != 0 {
        return Err(Error::Dimension(format!(
            "set {s:#b} is not a subset of [{}]",
            a.ground_size()
        )));
    }
    let mut memo = HashMap::new();
    let support = reduce_monomial(a, s, &mut memo)?;
    let n = a.ground_size();
    ReducedPolynomial::from_terms(
        2,
        n,
        support.into_iter().map(|t| (Monomial::from_mask(n, t), 1)),
    )
}

/// The reduction as a set of monomial masks (coefficients in `F_2`).
fn reduce_monomial(
    a: &SetFamily,
    s: u64,
    memo: &mut HashMap<u64, BTreeSet<u64>>,
) -> Result<BTreeSet<u64>> {
    if let Some(done) = memo.get(&s) {
        return Ok(done.clone());
    }
    let result = if is_shattered(a, s)? {
        BTreeSet::from([s])
    } else {
        let v = find_unshattered_witness(a, s)?;
        let zeros = s & !v.values;
        let forced = s & !zeros;
        let mut acc = BTreeSet::new();
        // proper subsets of `zeros`
        let mut sub = zeros;
        while sub != 0 {
            sub = (sub - 1) & zeros;
            for t in reduce_monomial(a, forced | sub, memo)? {
                if !acc.remove(&t) {
                    acc.insert(t);
                }
            }
        }
        acc
    };
    memo.insert(s, result.clone());
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{embed_01, generate_family, FamilyKind};

    fn fam(n: u32, m: &[u64]) -> SetFamily {
        SetFamily::new(n, m.iter().copied()).unwrap()
    }

    fn pts(p: u64, n: u32, x: &[u64]) -> PointSet {
        PointSet::new(p, n, x.iter().copied()).unwrap()
    }

    #[test]
    fn evaluation_matrix_examples() {
        let m = evaluation_matrix(&pts(2, 3, &[0]), &monomial_basis(2, 3, 0).unwrap()).unwrap();
        assert_eq!(m.entries(), &[1]);
        let m = evaluation_matrix(&pts(2, 1, &[0, 1]), &monomial_basis(2, 1, 1).unwrap()).unwrap();
        assert_eq!(m.entries(), &[1, 0, 1, 1]);
        let m = evaluation_matrix(&pts(3, 2, &[4]), &monomial_basis(3, 2, 2).unwrap()).unwrap();
        assert_eq!(m.entries(), &[1, 1, 1, 1, 1, 1]);
        assert!(matches!(
            evaluation_matrix(&pts(3, 2, &[4]), &monomial_basis(2, 2, 2).unwrap()),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn deg_on_set_examples() {
        let cube = PointSet::full_space(2, 2).unwrap();
        let one = PartialFunction::new(cube.clone(), vec![1; 4]).unwrap();
        assert_eq!(deg_on_set(&one).unwrap(), 0);
        let corner = PartialFunction::indicator(cube, 0b11).unwrap();
        assert_eq!(deg_on_set(&corner).unwrap(), 2);
        let f = PartialFunction::new(pts(2, 2, &[0b00, 0b11]), vec![0, 1]).unwrap();
        assert_eq!(deg_on_set(&f).unwrap(), 1);
        let empty = PartialFunction::new(pts(2, 2, &[]), vec![]).unwrap();
        assert!(matches!(deg_on_set(&empty), Err(Error::EmptyFamily(_))));
        assert!(PartialFunction::new(pts(2, 2, &[0]), vec![2]).is_err());
    }

    #[test]
    fn int_deg_examples() {
        assert_eq!(int_deg(&pts(3, 3, &[7])).unwrap(), 0);
        for n in 1..=5 {
            assert_eq!(int_deg(&PointSet::full_space(2, n).unwrap()).unwrap(), n);
        }
        assert_eq!(int_deg(&pts(2, 2, &[0b00, 0b11])).unwrap(), 1);
        assert_eq!(int_deg(&PointSet::full_space(3, 2).unwrap()).unwrap(), 4);
        assert!(matches!(
            int_deg(&pts(2, 2, &[])),
            Err(Error::EmptyFamily(_))
        ));
    }

    #[test]
    fn witness_examples() {
        let a = fam(2, &[0, 0b01]);
        assert_eq!(
            find_unshattered_witness(&a, 0b10).unwrap(),
            Pattern {
                set: 0b10,
                values: 0b10
            }
        );
        let low = generate_family(4, FamilyKind::LowWeight(2)).unwrap();
        assert_eq!(find_unshattered_witness(&low, 0b111).unwrap().values, 0b111);
        let cube = generate_family(2, FamilyKind::Powerset).unwrap();
        assert_eq!(
            find_unshattered_witness(&cube, 0b01),
            Err(Error::WitnessNotFound { set: 0b01 })
        );
    }

    #[test]
    fn represent_examples() {
        let a = fam(2, &[0, 0b01]);
        assert!(represent_monomial(&a, 0b10).unwrap().is_zero());

        let cube = generate_family(3, FamilyKind::Powerset).unwrap();
        let x = represent_monomial(&cube, 0b101).unwrap();
        assert_eq!(x.to_term_strings(), vec!["1:1,0,1"]);

        let low = generate_family(3, FamilyKind::LowWeight(1)).unwrap();
        let r = represent_monomial(&low, 0b011).unwrap();
        assert!(r.degree() <= 1);
        for &m in low.members() {
            let point: Vec<u64> = (0..3).map(|i| m >> i & 1).collect();
            assert_eq!(r.evaluate(&point), point[0] * point[1]);
        }
    }

    #[test]
    fn int_deg_bounded_by_vc_dim_small() {
        for c in 1u64..1 << 8 {
            let a = SetFamily::from_characteristic(3, c).unwrap();
            let e = int_deg(&embed_01(&a, 2).unwrap()).unwrap();
            assert!(e <= crate::vc::vc_dim(&a).unwrap());
        }
    }
}
