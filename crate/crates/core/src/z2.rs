//! Bit vectors and matrices over GF(2), sized for boundary operators of
//! cubical complexes with up to a few hundred thousand cells.
//!
//! Vectors pack 64 bits per word. Matrices are dense rows of bit vectors;
//! elimination routines work row-wise with XOR and leave pivot choices
//! fully determined by index order, so every reduction here is
//! deterministic.

use std::fmt;

/// A fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_indices(len: usize, ones: &[usize]) -> Self {
        let mut v = BitVec::zeros(len);
        for &i in ones {
            v.set(i, true);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % 64);
        if bit {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w ^= o;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the lowest set bit, if any.
    pub fn first_one(&self) -> Option<usize> {
        for (k, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(k * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.get(i))
    }

    /// Parity of the AND with another vector, the GF(2) inner product.
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot");
        let mut acc = 0u64;
        for (w, o) in self.words.iter().zip(&other.words) {
            acc ^= w & o;
        }
        acc.count_ones() % 2 == 1
    }

    /// Dense "0101" form, lowest index first. Used by JSON exports.
    pub fn to_bitstring(&self) -> String {
        (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect()
    }

    pub fn from_bitstring(text: &str) -> Option<Self> {
        let mut v = BitVec::zeros(text.len());
        for (i, ch) in text.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => v.set(i, true),
                _ => return None,
            }
        }
        Some(v)
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({})", self.to_bitstring())
    }
}

/// A dense matrix over GF(2), stored as rows.
#[derive(Clone, PartialEq, Eq)]
pub struct Z2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVec>,
}

impl Z2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Z2Matrix {
            rows,
            cols,
            data: vec![BitVec::zeros(cols); rows],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        self.data[r].set(c, bit);
    }

    pub fn row(&self, r: usize) -> &BitVec {
        &self.data[r]
    }

    pub fn column(&self, c: usize) -> BitVec {
        let mut v = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    pub fn transpose(&self) -> Z2Matrix {
        let mut t = Z2Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.data[r].iter_ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, other: &Z2Matrix) -> Z2Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        let mut out = Z2Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in self.data[r].iter_ones() {
                out.data[r].xor_assign(&other.data[k]);
            }
        }
        out
    }

    /// Matrix-vector product over GF(2).
    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        assert_eq!(self.cols, v.len(), "dimension mismatch in mul_vec");
        let mut out = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            if self.data[r].dot(v) {
                out.set(r, true);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BitVec::is_zero)
    }

    /// Rank via row elimination on a copy, pivoting on the lowest set
    /// column of each surviving row in row order.
    pub fn rank(&self) -> usize {
        Echelon::from_rows(self.data.iter().cloned()).len()
    }
}

impl fmt::Debug for Z2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Z2Matrix({}x{})", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {}", self.data[r].to_bitstring())?;
        }
        Ok(())
    }
}

/// A growing row-echelon family over GF(2): each stored row has a distinct
/// pivot (its lowest set bit). Insertion order plus pivot choice make the
/// reduced forms canonical for a fixed input order.
pub struct Echelon {
    // Pivot index -> position in `rows`.
    by_pivot: std::collections::HashMap<usize, usize>,
    rows: Vec<BitVec>,
}

impl Default for Echelon {
    fn default() -> Self {
        Self::new()
    }
}

impl Echelon {
    pub fn new() -> Self {
        Echelon {
            by_pivot: std::collections::HashMap::new(),
            rows: Vec::new(),
        }
    }

    pub fn from_rows(rows: impl IntoIterator<Item = BitVec>) -> Self {
        let mut e = Echelon::new();
        for row in rows {
            e.insert(row);
        }
        e
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Reduces `row` against the family in place, returning the pivot
    /// positions of the rows that were XORed in.
    pub fn reduce(&self, row: &mut BitVec) -> Vec<usize> {
        let mut used = Vec::new();
        while let Some(p) = row.first_one() {
            match self.by_pivot.get(&p) {
                Some(&idx) => {
                    row.xor_assign(&self.rows[idx]);
                    used.push(idx);
                }
                None => break,
            }
        }
        used
    }

    /// Reduces and, if a nonzero residue remains, stores it as a new row.
    /// Returns true when the row was independent of the family.
    pub fn insert(&mut self, mut row: BitVec) -> bool {
        self.reduce(&mut row);
        match row.first_one() {
            Some(p) => {
                self.by_pivot.insert(p, self.rows.len());
                self.rows.push(row);
                true
            }
            None => false,
        }
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }
}
