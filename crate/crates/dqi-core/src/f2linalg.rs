//! GF(2) linear algebra: bit vectors, bit matrices, Gauss-Jordan elimination
//! with an auditable row-operation trace, and a brute-force syndrome decoder.
//!
//! Bits are packed into `u64` words per row; the external contract is only
//! the `{0,1}` entry semantics. All values are immutable in spirit: the
//! mutating methods are used during construction, and every pipeline
//! operation takes inputs by reference and returns fresh values.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// A vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
}

impl BitVector {
    /// All-zero vector of length `len`.
    pub fn zeros(len: usize) -> Self {
        assert!(len >= 1, "BitVector must have length >= 1");
        Self { words: vec![0; words_for(len)], len }
    }

    /// Build from 0/1 entries.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            assert!(b <= 1, "entries must be 0 or 1");
            v.set(i, b == 1);
        }
        v
    }

    /// Unit vector `e_i` of length `len`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    /// All-ones vector of length `len`.
    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len {
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
        assert!(i < self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// In-place XOR with another vector of the same length.
    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "length mismatch in xor_assign");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Parity of the bitwise AND, i.e. the GF(2) inner product.
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            % 2
            == 1
    }

    /// Indices of the 1-bits, ascending.
    pub fn ones_indices(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.get(i)).collect()
    }

    /// The bitstring read as a binary number, bit 0 most significant.
    /// Used for lexicographic tie-breaking and for basis-state indices.
    pub fn as_index(&self) -> u64 {
        assert!(self.len <= 64, "as_index supports up to 64 bits");
        let mut x = 0u64;
        for i in 0..self.len {
            x = (x << 1) | self.get(i) as u64;
        }
        x
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", self.get(i) as u8)?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Parse("empty bitstring".into()));
        }
        let mut v = BitVector::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                _ => return Err(Error::Parse(format!("invalid bit character {c:?}"))),
            }
        }
        Ok(v)
    }
}

/// A dense matrix over GF(2), packed row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "BitMatrix must be nonempty");
        let words_per_row = words_for(cols);
        Self { rows, cols, words_per_row, words: vec![0; rows * words_per_row] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Build from 0/1 row slices; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<u8>]) -> Self {
        assert!(!rows.is_empty());
        let cols = rows[0].len();
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (c, &b) in row.iter().enumerate() {
                assert!(b <= 1, "entries must be 0 or 1");
                m.set(r, c, b == 1);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        (self.words[r * self.words_per_row + c / WORD_BITS] >> (c % WORD_BITS)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols);
        let idx = r * self.words_per_row + c / WORD_BITS;
        let mask = 1u64 << (c % WORD_BITS);
        if value {
            self.words[idx] |= mask;
        } else {
            self.words[idx] &= !mask;
        }
    }

    pub fn row(&self, r: usize) -> BitVector {
        assert!(r < self.rows);
        let start = r * self.words_per_row;
        BitVector {
            words: self.words[start..start + self.words_per_row].to_vec(),
            len: self.cols,
        }
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row(r).weight()
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        assert!(i < self.rows && j < self.rows);
        if i == j {
            return;
        }
        for w in 0..self.words_per_row {
            self.words.swap(i * self.words_per_row + w, j * self.words_per_row + w);
        }
    }

    /// Row `dst` += row `src` over GF(2).
    pub fn add_row(&mut self, src: usize, dst: usize) {
        assert!(src < self.rows && dst < self.rows && src != dst);
        for w in 0..self.words_per_row {
            let s = self.words[src * self.words_per_row + w];
            self.words[dst * self.words_per_row + w] ^= s;
        }
    }

    /// Number of 1-entries in the whole matrix.
    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn rank(&self) -> usize {
        rref_with_trace(self).rank
    }

    /// Parse the fixture text format: first line `rows cols`, then `rows`
    /// lines of space-separated 0/1 entries.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty matrix text".into()))?;
        let mut parts = header.split_whitespace();
        let rows: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse("bad matrix header".into()))?;
        let cols: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse("bad matrix header".into()))?;
        if rows == 0 || cols == 0 {
            return Err(Error::Parse("matrix dimensions must be positive".into()));
        }
        let mut m = BitMatrix::zeros(rows, cols);
        for r in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing matrix row {}", r + 1)))?;
            let entries: Vec<&str> = line.split_whitespace().collect();
            if entries.len() != cols {
                return Err(Error::Parse(format!(
                    "row {} has {} entries, expected {}",
                    r + 1,
                    entries.len(),
                    cols
                )));
            }
            for (c, e) in entries.iter().enumerate() {
                match *e {
                    "0" => {}
                    "1" => m.set(r, c, true),
                    other => {
                        return Err(Error::Parse(format!("invalid entry {other:?} in row {}", r + 1)))
                    }
                }
            }
        }
        Ok(m)
    }

    /// Render the fixture text format accepted by [`BitMatrix::parse_text`].
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for r in 0..self.rows {
            let row: Vec<String> =
                (0..self.cols).map(|c| (self.get(r, c) as u8).to_string()).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|r| self.row(r).to_bits()).collect()
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {}", self.row(r))?;
        }
        Ok(())
    }
}

/// Matrix-vector product over GF(2): `out[i] = XOR_j M[i][j] x[j]`.
pub fn mat_vec(m: &BitMatrix, x: &BitVector) -> Result<BitVector> {
    if m.cols != x.len() {
        return Err(Error::DimensionMismatch(format!(
            "mat_vec: matrix has {} columns, vector has length {}",
            m.cols,
            x.len()
        )));
    }
    let mut out = BitVector::zeros(m.rows);
    for r in 0..m.rows {
        let parity = m.words[r * m.words_per_row..(r + 1) * m.words_per_row]
            .iter()
            .zip(&x.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            % 2;
        if parity == 1 {
            out.set(r, true);
        }
    }
    Ok(out)
}

/// An elementary row operation over GF(2). Both operations are involutions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowOp {
    Swap(usize, usize),
    /// Row `dst` += row `src`.
    AddRow { src: usize, dst: usize },
}

/// Ordered record of row operations; replaying it on the original matrix
/// reproduces the reduced matrix, and it compiles directly to SWAP/CNOT
/// gates on the syndrome register.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RowOpTrace {
    pub ops: Vec<RowOp>,
}

impl RowOpTrace {
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Apply the recorded operations to a copy of `m`.
    pub fn replay(&self, m: &BitMatrix) -> BitMatrix {
        let mut out = m.clone();
        for op in &self.ops {
            match *op {
                RowOp::Swap(i, j) => out.swap_rows(i, j),
                RowOp::AddRow { src, dst } => out.add_row(src, dst),
            }
        }
        out
    }

    /// The inverse trace: operations reversed (each op is self-inverse).
    pub fn inverse(&self) -> RowOpTrace {
        RowOpTrace { ops: self.ops.iter().rev().copied().collect() }
    }
}

/// Result of Gauss-Jordan elimination with trace.
#[derive(Clone, Debug)]
pub struct RrefResult {
    pub reduced: BitMatrix,
    pub trace: RowOpTrace,
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
}

impl RrefResult {
    /// Pivot pairs `(row, col)` in processing order.
    pub fn pivots(&self) -> Vec<(usize, usize)> {
        self.pivot_cols.iter().enumerate().map(|(r, &c)| (r, c)).collect()
    }
}

/// Reduced row-echelon form over GF(2) with a full row-operation trace.
///
/// Pivot rule: for each column, scan rows from the current diagonal row
/// downward and take the first 1. Columns without a pivot candidate are
/// skipped without emitting operations. Within a column, elimination
/// AddRows are emitted in ascending target-row order. These choices make
/// the trace deterministic.
pub fn rref_with_trace(m: &BitMatrix) -> RrefResult {
    let mut a = m.clone();
    let mut trace = RowOpTrace::default();
    let mut pivot_cols = Vec::new();
    let mut pivot_row = 0;

    for col in 0..a.cols {
        if pivot_row == a.rows {
            break;
        }
        let Some(found) = (pivot_row..a.rows).find(|&r| a.get(r, col)) else {
            continue;
        };
        if found != pivot_row {
            a.swap_rows(found, pivot_row);
            trace.ops.push(RowOp::Swap(found, pivot_row));
        }
        for r in 0..a.rows {
            if r != pivot_row && a.get(r, col) {
                a.add_row(pivot_row, r);
                trace.ops.push(RowOp::AddRow { src: pivot_row, dst: r });
            }
        }
        pivot_cols.push(col);
        pivot_row += 1;
    }

    RrefResult { reduced: a, rank: pivot_cols.len(), trace, pivot_cols }
}

/// Visit all index combinations of size `k` from `0..n` in lexicographic
/// order of the index tuples.
pub fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Minimum-weight solution of `H y = s` with `weight(y) <= max_weight`,
/// found by exhaustive enumeration. Ties are broken by the lexicographically
/// smallest bitstring. Returns `None` when no such `y` exists.
pub fn brute_force_decode(
    h: &BitMatrix,
    s: &BitVector,
    max_weight: usize,
) -> Option<BitVector> {
    assert_eq!(h.rows(), s.len(), "brute_force_decode: H rows must match syndrome length");
    let m = h.cols();
    for w in 0..=max_weight.min(m) {
        let mut best: Option<BitVector> = None;
        for_each_combination(m, w, |idx| {
            let mut y = BitVector::zeros(m);
            for &i in idx {
                y.set(i, true);
            }
            if &mat_vec(h, &y).expect("dimensions checked") == s {
                let better = match &best {
                    None => true,
                    Some(b) => y.as_index() < b.as_index(),
                };
                if better {
                    best = Some(y);
                }
            }
        });
        if best.is_some() {
            return best;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_b() -> BitMatrix {
        // the 6-bit worked instance
        BitMatrix::from_rows(&[
            vec![1, 0, 0, 0, 0, 1],
            vec![1, 1, 0, 0, 0, 0],
            vec![0, 1, 0, 0, 1, 0],
            vec![0, 1, 0, 1, 0, 0],
            vec![0, 1, 0, 0, 0, 1],
            vec![0, 0, 0, 1, 0, 1],
        ])
    }

    #[test]
    fn rref_identity_is_noop() {
        let m = BitMatrix::identity(3);
        let r = rref_with_trace(&m);
        assert!(r.trace.is_empty());
        assert_eq!(r.rank, 3);
        assert_eq!(r.reduced, m);
        assert_eq!(r.pivot_cols, vec![0, 1, 2]);
    }

    #[test]
    fn rref_antidiagonal_swaps_once() {
        let m = BitMatrix::from_rows(&[vec![0, 1], vec![1, 0]]);
        let r = rref_with_trace(&m);
        assert_eq!(r.trace.ops, vec![RowOp::Swap(1, 0)]);
        assert_eq!(r.rank, 2);
        assert_eq!(r.reduced, BitMatrix::identity(2));
    }

    #[test]
    fn rref_paper_instance_replays() {
        let bt = paper_b().transpose();
        let r = rref_with_trace(&bt);
        // column of zeros in B means a zero row in B^T; the graph behind the
        // instance is connected on 5 vertices, so the rank is 4
        assert_eq!(r.rank, 4);
        assert_eq!(r.trace.replay(&bt), r.reduced);
        // idempotence: reducing the reduced matrix is a no-op
        let again = rref_with_trace(&r.reduced);
        assert!(again.trace.is_empty());
        assert_eq!(again.reduced, r.reduced);
    }

    #[test]
    fn rref_is_reduced_row_echelon() {
        let bt = paper_b().transpose();
        let r = rref_with_trace(&bt);
        for (row, &col) in r.pivot_cols.iter().enumerate() {
            assert!(r.reduced.get(row, col));
            for other in 0..r.reduced.rows() {
                if other != row {
                    assert!(!r.reduced.get(other, col), "pivot column {col} not cleared");
                }
            }
        }
    }

    #[test]
    fn mat_vec_identity_and_cancellation() {
        let id = BitMatrix::identity(4);
        let x = BitVector::from_bits(&[1, 0, 1, 1]);
        assert_eq!(mat_vec(&id, &x).unwrap(), x);

        let m = BitMatrix::from_rows(&[vec![1, 1]]);
        let x = BitVector::from_bits(&[1, 1]);
        assert_eq!(mat_vec(&m, &x).unwrap(), BitVector::zeros(1));
    }

    #[test]
    fn mat_vec_extracts_columns() {
        let bt = paper_b().transpose();
        let e1 = BitVector::unit(6, 1);
        let col = mat_vec(&bt, &e1).unwrap();
        for r in 0..6 {
            assert_eq!(col.get(r), bt.get(r, 1));
        }
    }

    #[test]
    fn mat_vec_rejects_dimension_mismatch() {
        let m = BitMatrix::identity(3);
        let x = BitVector::zeros(4);
        assert!(matches!(mat_vec(&m, &x), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn decode_zero_syndrome() {
        let h = paper_b().transpose();
        let s = BitVector::zeros(6);
        let y = brute_force_decode(&h, &s, 2).unwrap();
        assert!(y.is_zero());
    }

    #[test]
    fn decode_identity_returns_syndrome() {
        let h = BitMatrix::identity(5);
        let s = BitVector::from_bits(&[0, 1, 0, 1, 0]);
        assert_eq!(brute_force_decode(&h, &s, 2).unwrap(), s);
        assert_eq!(brute_force_decode(&h, &s, 1), None);
    }

    #[test]
    fn decode_inverts_invertible_h_up_to_weight_two() {
        // fixed invertible 6x6 matrix; exhaustively decode all 22 patterns
        let h = BitMatrix::from_rows(&[
            vec![1, 0, 0, 1, 0, 1],
            vec![0, 1, 0, 0, 1, 0],
            vec![1, 1, 1, 0, 0, 0],
            vec![0, 0, 1, 1, 0, 0],
            vec![0, 1, 0, 1, 1, 0],
            vec![0, 0, 0, 0, 1, 1],
        ]);
        assert_eq!(h.rank(), 6);
        let mut checked = 0;
        for w in 0..=2 {
            for_each_combination(6, w, |idx| {
                let mut y = BitVector::zeros(6);
                for &i in idx {
                    y.set(i, true);
                }
                let s = mat_vec(&h, &y).unwrap();
                assert_eq!(brute_force_decode(&h, &s, 2).unwrap(), y);
                checked += 1;
            });
        }
        assert_eq!(checked, 22);
    }

    #[test]
    fn text_format_round_trip() {
        let m = paper_b();
        let parsed = BitMatrix::parse_text(&m.to_text()).unwrap();
        assert_eq!(parsed, m);
        assert!(BitMatrix::parse_text("2 2\n1 0\n").is_err());
        assert!(BitMatrix::parse_text("2 2\n1 0\n1 2\n").is_err());
    }

    #[test]
    fn combination_count_matches_binomial() {
        let mut count = 0;
        for_each_combination(6, 2, |_| count += 1);
        assert_eq!(count, 15);
        let mut seen = Vec::new();
        for_each_combination(4, 2, |c| seen.push(c.to_vec()));
        assert_eq!(seen[0], vec![0, 1]);
        assert_eq!(seen.last().unwrap(), &vec![2, 3]);
    }

    #[test]
    fn bitvector_lexicographic_index() {
        // "001" < "010" < "100" as bitstrings
        let a: BitVector = "001".parse().unwrap();
        let b: BitVector = "010".parse().unwrap();
        let c: BitVector = "100".parse().unwrap();
        assert!(a.as_index() < b.as_index());
        assert!(b.as_index() < c.as_index());
    }
}
