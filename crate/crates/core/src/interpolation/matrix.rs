//! Dense matrices over `F_p` and exact rank.

use crate::error::{Error, Result};
use crate::field::Field;

/// Row-major dense matrix over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

impl FieldMatrix {
    pub fn new(p: u64, rows: usize, cols: usize, entries: Vec<u64>) -> Result<Self> {
        let field = Field::new(p)?;
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|&&v| v >= p) {
            return Err(Error::Parameter(format!(
                "entry {bad} is not reduced mod {p}"
            )));
        }
        Ok(FieldMatrix {
            field,
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(p: u64, rows: &[Vec<u64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(p, rows.len(), cols, rows.concat())
    }

    pub fn zeros(p: u64, rows: usize, cols: usize) -> Result<Self> {
        Self::new(p, rows, cols, vec![0; rows * cols])
    }

    pub fn identity(p: u64, size: usize) -> Result<Self> {
        let mut m = Self::zeros(p, size, size)?;
        for i in 0..size {
            m.entries[i * size + i] = 1 % p;
        }
        Ok(m)
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.field.modulus()
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn transpose(&self) -> FieldMatrix {
        let mut entries = vec![0; self.entries.len()];
        for r in 0..self.rows {
            for c in 0..self.cols {
                entries[c * self.rows + r] = self.get(r, c);
            }
        }
        FieldMatrix {
            field: self.field,
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    /// Row `i` of the result is row `order[i]` of `self`.
    pub fn permute_rows(&self, order: &[usize]) -> Result<FieldMatrix> {
        let mut seen = vec![false; self.rows];
        if order.len() != self.rows
            || order
                .iter()
                .any(|&r| r >= self.rows || std::mem::replace(&mut seen[r], true))
        {
            return Err(Error::Parameter("row order is not a permutation".into()));
        }
        let entries = order
            .iter()
            .flat_map(|&r| self.row(r).iter().copied())
            .collect();
        Ok(FieldMatrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    /// Exact rank. Dispatches to the word-packed kernel when `p = 2`.
    pub fn rank(&self) -> usize {
        if self.modulus() == 2 {
            self.rank_packed_f2()
        } else {
            self.rank_generic()
        }
    }

    /// Gaussian elimination with modular inverses. Columns are swept left to
    /// right; the pivot is the first remaining row with a nonzero entry.
    pub fn rank_generic(&self) -> usize {
        let f = self.field;
        let cols = self.cols;
        let mut m = self.entries.clone();
        let mut rank = 0;
        for c in 0..cols {
            if rank == self.rows {
                break;
            }
            let Some(pivot) = (rank..self.rows).find(|&r| m[r * cols + c] != 0) else {
                continue;
            };
            if pivot != rank {
                for j in c..cols {
                    m.swap(pivot * cols + j, rank * cols + j);
                }
            }
            let inv = f.inv(m[rank * cols + c]);
            for j in c..cols {
                m[rank * cols + j] = f.mul(m[rank * cols + j], inv);
            }
            for r in rank + 1..self.rows {
                let factor = m[r * cols + c];
                if factor == 0 {
                    continue;
                }
                for j in c..cols {
                    let v = f.mul(factor, m[rank * cols + j]);
                    m[r * cols + j] = f.sub(m[r * cols + j], v);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Rank over `F_2` with rows packed into 64-bit words and XOR elimination.
    /// Same pivot rule as [`rank_generic`](Self::rank_generic).
    ///
    /// # Panics
    ///
    /// If the modulus is not 2.
    pub fn rank_packed_f2(&self) -> usize {
        assert_eq!(self.modulus(), 2, "packed rank requires p = 2");
        let words = self.cols.div_ceil(64);
        let mut m: Vec<u64> = vec![0; self.rows * words];
        for r in 0..self.rows {
            for (c, &v) in self.row(r).iter().enumerate() {
                if v != 0 {
                    m[r * words + c / 64] |= 1 << (c % 64);
                }
            }
        }
        let mut rank = 0;
        for c in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let (w, bit) = (c / 64, 1u64 << (c % 64));
            let Some(pivot) = (rank..self.rows).find(|&r| m[r * words + w] & bit != 0) else {
                continue;
            };
            if pivot != rank {
                for j in 0..words {
                    m.swap(pivot * words + j, rank * words + j);
                }
            }
            let (head, tail) = m.split_at_mut((rank + 1) * words);
            let pivot_row = &head[rank * words..];
            for row in tail.chunks_exact_mut(words) {
                if row[w] & bit != 0 {
                    for (x, &y) in row[w..].iter_mut().zip(&pivot_row[w..]) {
                        *x ^= y;
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Incrementally maintained reduced echelon basis of a subspace of `F_p^m`.
///
/// Every stored vector is normalized at its pivot (first nonzero index) and
/// is zero at the pivots of all other stored vectors.
#[derive(Debug, Clone)]
pub struct EchelonBasis {
    field: Field,
    len: usize,
    vectors: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl EchelonBasis {
    pub fn new(field: Field, len: usize) -> Self {
        EchelonBasis {
            field,
            len,
            vectors: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_full(&self) -> bool {
        self.vectors.len() == self.len
    }

    fn reduce(&self, v: &mut [u64]) {
        let f = self.field;
        for (b, &q) in self.vectors.iter().zip(&self.pivots) {
            let c = v[q];
            if c != 0 {
                for (x, &y) in v.iter_mut().zip(b) {
                    if y != 0 {
                        *x = f.sub(*x, f.mul(c, y));
                    }
                }
            }
        }
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, mut v: Vec<u64>) -> bool {
        debug_assert_eq!(v.len(), self.len);
        self.reduce(&mut v);
        let Some(q) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let f = self.field;
        let inv = f.inv(v[q]);
        for x in v.iter_mut() {
            *x = f.mul(*x, inv);
        }
        for b in &mut self.vectors {
            let c = b[q];
            if c != 0 {
                for (x, &y) in b.iter_mut().zip(&v) {
                    if y != 0 {
                        *x = f.sub(*x, f.mul(c, y));
                    }
                }
            }
        }
        self.vectors.push(v);
        self.pivots.push(q);
        true
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }
}
