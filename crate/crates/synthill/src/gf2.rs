//! Dense linear algebra over GF(2) on bit-packed matrices.
//!
//! Rows are stored as runs of `u64` words, so row operations and inner
//! products are word-parallel. Dimensions in this crate stay small (a few
//! dozen rows, at most a few hundred columns).

use std::fmt;
use std::str::FromStr;

use crate::error::{parse_err, Error, Result};

const WORD: usize = 64;

fn words_for(cols: usize) -> usize {
    cols.div_ceil(WORD)
}

/// A binary matrix with row-major packed storage.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        BitMatrix {
            rows,
            cols,
            stride,
            bits: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.put(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows of 0/1 entries.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => m.put(i, j, true),
                    _ => return Err(Error::Dimension(format!("entry ({i}, {j}) is {v}, not 0 or 1"))),
                }
            }
        }
        Ok(m)
    }

    /// Builds a `rows`-row matrix whose column `j` has bit `i` of `columns[j]` in row `i`.
    pub fn from_columns(rows: usize, columns: &[u64]) -> Result<Self> {
        if rows > WORD {
            return Err(Error::Limit {
                name: "column-mask rows",
                value: rows,
                limit: WORD,
            });
        }
        let mut m = Self::zeros(rows, columns.len());
        for (j, &c) in columns.iter().enumerate() {
            if rows < WORD && c >> rows != 0 {
                return Err(Error::Dimension(format!("column {j} has bits beyond row {rows}")));
            }
            for i in 0..rows {
                if c >> i & 1 == 1 {
                    m.put(i, j, true);
                }
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    fn check(&self, row: usize, col: usize) -> Result<()> {
        if row >= self.rows || col >= self.cols {
            return Err(Error::OutOfRange {
                row,
                col,
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(())
    }

    /// Entry at `(row, col)` as 0 or 1.
    pub fn get(&self, row: usize, col: usize) -> Result<u8> {
        self.check(row, col)?;
        Ok(self.bit(row, col) as u8)
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) -> Result<()> {
        self.check(row, col)?;
        self.put(row, col, value);
        Ok(())
    }

    pub(crate) fn bit(&self, row: usize, col: usize) -> bool {
        debug_assert!(row < self.rows && col < self.cols);
        self.bits[row * self.stride + col / WORD] >> (col % WORD) & 1 == 1
    }

    pub(crate) fn put(&mut self, row: usize, col: usize, value: bool) {
        debug_assert!(row < self.rows && col < self.cols);
        let w = &mut self.bits[row * self.stride + col / WORD];
        let mask = 1u64 << (col % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    /// Toggles one entry.
    pub fn flip(&mut self, row: usize, col: usize) {
        self.bits[row * self.stride + col / WORD] ^= 1u64 << (col % WORD);
    }

    /// Packed words of one row; bits past `cols` are always zero.
    pub fn row_words(&self, row: usize) -> &[u64] {
        &self.bits[row * self.stride..(row + 1) * self.stride]
    }

    /// Row as a single mask. Only valid for matrices with at most 64 columns.
    pub fn row_mask(&self, row: usize) -> u64 {
        assert!(self.cols <= WORD, "row_mask needs at most 64 columns");
        self.row_words(row).first().copied().unwrap_or(0)
    }

    /// Column as a mask over rows. Only valid for matrices with at most 64 rows.
    pub fn column_mask(&self, col: usize) -> u64 {
        assert!(self.rows <= WORD, "column_mask needs at most 64 rows");
        (0..self.rows).fold(0, |acc, i| acc | (self.bit(i, col) as u64) << i)
    }

    pub fn columns(&self) -> Vec<u64> {
        (0..self.cols).map(|j| self.column_mask(j)).collect()
    }

    pub fn row_weight(&self, row: usize) -> usize {
        self.row_words(row).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn column_is_zero(&self, col: usize) -> bool {
        (0..self.rows).all(|i| !self.bit(i, col))
    }

    fn xor_row(&mut self, dst: usize, src: usize) {
        if dst == src {
            return;
        }
        let s = self.stride;
        for w in 0..s {
            let v = self.bits[src * s + w];
            self.bits[dst * s + w] ^= v;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let s = self.stride;
        for w in 0..s {
            self.bits.swap(a * s + w, b * s + w);
        }
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.bit(i, j) {
                    t.put(j, i, true);
                }
            }
        }
        t
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.rows != other.rows {
            return Err(Error::Dimension(format!(
                "hstack of {} and {} rows",
                self.rows, other.rows
            )));
        }
        let mut m = BitMatrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.put(i, j, self.bit(i, j));
            }
            for j in 0..other.cols {
                m.put(i, self.cols + j, other.bit(i, j));
            }
        }
        Ok(m)
    }

    /// Vertical concatenation, `self` on top.
    pub fn vstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "vstack of {} and {} columns",
                self.cols, other.cols
            )));
        }
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        Ok(BitMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            stride: self.stride,
            bits,
        })
    }

    /// Rows `start..end` as a new matrix.
    pub fn row_block(&self, start: usize, end: usize) -> BitMatrix {
        assert!(start <= end && end <= self.rows);
        BitMatrix {
            rows: end - start,
            cols: self.cols,
            stride: self.stride,
            bits: self.bits[start * self.stride..end * self.stride].to_vec(),
        }
    }

    pub fn select_columns(&self, cols: &[usize]) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (jj, &j) in cols.iter().enumerate() {
                m.put(i, jj, self.bit(i, j));
            }
        }
        m
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut m = BitMatrix::zeros(self.rows, other.cols);
        let s = m.stride;
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.bit(i, k) {
                    for w in 0..s {
                        m.bits[i * s + w] ^= other.bits[k * s + w];
                    }
                }
            }
        }
        Ok(m)
    }

    /// Row echelon form together with the invertible transform that produces it.
    ///
    /// Returns `(E, T, rank)` with `T * self = E`; the first `rank` rows of `E`
    /// are linearly independent and the rest are zero.
    pub fn row_reduce(&self) -> (BitMatrix, BitMatrix, usize) {
        let mut e = self.clone();
        let mut t = BitMatrix::identity(self.rows);
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(p) = (rank..self.rows).find(|&r| e.bit(r, col)) else {
                continue;
            };
            e.swap_rows(rank, p);
            t.swap_rows(rank, p);
            for r in 0..self.rows {
                if r != rank && e.bit(r, col) {
                    e.xor_row(r, rank);
                    t.xor_row(r, rank);
                }
            }
            rank += 1;
        }
        (e, t, rank)
    }

    pub fn rank(&self) -> usize {
        let mut e = self.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(p) = (rank..self.rows).find(|&r| e.bit(r, col)) else {
                continue;
            };
            e.swap_rows(rank, p);
            for r in rank + 1..self.rows {
                if e.bit(r, col) {
                    e.xor_row(r, rank);
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }

    pub fn inverse(&self) -> Option<BitMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let (_, t, rank) = self.row_reduce();
        (rank == self.rows).then_some(t)
    }

    /// Rows that, stacked under `self`, give an invertible square matrix.
    pub fn complete_to_invertible(&self) -> Result<BitMatrix> {
        let (e, _, rank) = self.row_reduce();
        if rank < self.rows {
            return Err(Error::RankDeficient {
                rank,
                rows: self.rows,
            });
        }
        // Reduced echelon form: every column that is not a pivot gets a unit row.
        let mut pivots = vec![false; self.cols];
        let mut col = 0;
        for r in 0..rank {
            while !e.bit(r, col) {
                col += 1;
            }
            pivots[col] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !pivots[c]).collect();
        let mut m = BitMatrix::zeros(free.len(), self.cols);
        for (i, &c) in free.iter().enumerate() {
            m.put(i, c, true);
        }
        Ok(m)
    }

    /// Nonzero rows of a row echelon form: a basis of the row space.
    pub fn row_basis(&self) -> BitMatrix {
        let (e, _, rank) = self.row_reduce();
        e.row_block(0, rank)
    }

    /// Every vector of the row space exactly once, starting from zero.
    ///
    /// The caller bounds the rank; the output has `2^rank` entries.
    pub fn row_span(&self) -> Vec<Vec<u64>> {
        let basis = self.row_basis();
        let r = basis.rows();
        let mut out = Vec::with_capacity(1 << r);
        let mut cur = vec![0u64; self.stride];
        out.push(cur.clone());
        for g in 1u64..(1u64 << r) {
            let flip = g.trailing_zeros() as usize;
            for (c, w) in cur.iter_mut().zip(basis.row_words(flip)) {
                *c ^= w;
            }
            out.push(cur.clone());
        }
        out
    }

    /// Hamming weights of the row space vectors, in `row_span` order.
    pub fn row_span_weights(&self) -> Vec<usize> {
        self.row_span()
            .iter()
            .map(|v| v.iter().map(|w| w.count_ones() as usize).sum())
            .collect()
    }

    /// True when the packed vector `v` lies in the row space.
    pub fn in_row_span(&self, v: &[u64]) -> bool {
        let mut ext = self.clone();
        ext.bits.extend_from_slice(v);
        ext.rows += 1;
        ext.rank() == self.rank()
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.bit(i, j) == self.bit(j, i)))
    }

    /// Symmetric factorization `self = B * B^T` with the fewest columns.
    pub fn lempel_factorize(&self) -> Result<BitMatrix> {
        lempel_factorize(self)
    }

    /// Parses the text format: one row of '0'/'1' per line, ended by a blank line or EOF.
    pub fn parse(text: &str) -> Result<BitMatrix> {
        Self::parse_lines(text.lines().enumerate().map(|(i, l)| (i + 1, l)))
    }

    pub(crate) fn parse_lines<'a>(lines: impl Iterator<Item = (usize, &'a str)>) -> Result<BitMatrix> {
        let mut rows: Vec<Vec<u8>> = Vec::new();
        for (no, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                break;
            }
            let mut row = Vec::with_capacity(line.len());
            for ch in line.chars() {
                match ch {
                    '0' => row.push(0),
                    '1' => row.push(1),
                    _ => return Err(parse_err(no, format!("unexpected character {ch:?} in matrix row"))),
                }
            }
            if let Some(first) = rows.first() {
                if first.len() != row.len() {
                    return Err(parse_err(
                        no,
                        format!("row has {} columns, expected {}", row.len(), first.len()),
                    ));
                }
            }
            rows.push(row);
        }
        BitMatrix::from_rows(&rows)
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            for j in 0..self.cols {
                f.write_str(if self.bit(i, j) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for BitMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BitMatrix::parse(s)
    }
}

fn beta(q: &[u64], u: u64, v: u64) -> u64 {
    let mut acc = 0u64;
    let mut bits = u;
    while bits != 0 {
        let i = bits.trailing_zeros() as usize;
        acc ^= (q[i] & v).count_ones() as u64 & 1;
        bits &= bits - 1;
    }
    acc
}

/// Lempel factorization of a symmetric binary matrix.
///
/// Returns `B` with `B * B^T = Q`. The column count is `rank(Q)` when some
/// diagonal entry is set, `rank(Q) + 1` when the diagonal is zero and `Q != 0`,
/// and 0 for `Q = 0`; no factorization uses fewer columns.
pub fn lempel_factorize(q: &BitMatrix) -> Result<BitMatrix> {
    if !q.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let k = q.rows();
    if k > WORD {
        return Err(Error::Limit {
            name: "Lempel dimension",
            value: k,
            limit: WORD,
        });
    }
    let qrows: Vec<u64> = (0..k).map(|i| q.row_mask(i)).collect();

    // Split the standard basis into an orthonormal part, hyperbolic pairs and the radical.
    let mut pool: Vec<u64> = (0..k).map(|i| 1u64 << i).collect();
    let mut ortho: Vec<u64> = Vec::new();
    let mut pairs: Vec<(u64, u64)> = Vec::new();
    loop {
        if let Some(pos) = pool.iter().position(|&v| beta(&qrows, v, v) == 1) {
            let f = pool.remove(pos);
            for v in pool.iter_mut() {
                if beta(&qrows, *v, f) == 1 {
                    *v ^= f;
                }
            }
            ortho.push(f);
            continue;
        }
        let mut found = None;
        'search: for a in 0..pool.len() {
            for b in a + 1..pool.len() {
                if beta(&qrows, pool[a], pool[b]) == 1 {
                    found = Some((a, b));
                    break 'search;
                }
            }
        }
        let Some((a, b)) = found else { break };
        let w = pool.remove(b);
        let u = pool.remove(a);
        for v in pool.iter_mut() {
            let mut nv = *v;
            if beta(&qrows, *v, w) == 1 {
                nv ^= u;
            }
            if beta(&qrows, *v, u) == 1 {
                nv ^= w;
            }
            *v = nv;
        }
        pairs.push((u, w));
    }
    let radical = pool;

    // Images of the new basis; Gram matrix diag(I, H, .., H, 0).
    let ncols = if !ortho.is_empty() {
        ortho.len() + 2 * pairs.len()
    } else if !pairs.is_empty() {
        2 * pairs.len() + 1
    } else {
        0
    };
    let mut images: Vec<u64> = Vec::with_capacity(k);
    let mut basis: Vec<u64> = Vec::with_capacity(k);
    let mut next = 0usize;
    for &f in &ortho {
        basis.push(f);
        images.push(1u64 << next);
        next += 1;
    }
    // Anchor: the image of one vector of self-product 1, possibly a virtual one.
    let anchor_slot = if ortho.is_empty() {
        None
    } else {
        Some(0usize)
    };
    let mut anchor = match anchor_slot {
        Some(i) => images[i],
        None if !pairs.is_empty() => {
            let v = 1u64 << next;
            next += 1;
            v
        }
        None => 0,
    };
    for &(u, w) in &pairs {
        let (qc, rc) = (1u64 << next, 1u64 << (next + 1));
        next += 2;
        basis.push(u);
        images.push(anchor ^ rc);
        basis.push(w);
        images.push(anchor ^ qc);
        anchor ^= qc ^ rc;
        if let Some(i) = anchor_slot {
            images[i] = anchor;
        }
    }
    for &r in &radical {
        basis.push(r);
        images.push(0);
    }
    debug_assert_eq!(next, ncols);

    // B = T^{-1} * Phi, where T has the basis vectors as rows.
    let t = BitMatrix::from_columns(k, &basis)?.transpose();
    let t_inv = t
        .inverse()
        .ok_or_else(|| Error::Internal("Lempel basis is singular".into()))?;
    let mut phi = BitMatrix::zeros(k, ncols);
    for (i, &img) in images.iter().enumerate() {
        for j in 0..ncols {
            if img >> j & 1 == 1 {
                phi.put(i, j, true);
            }
        }
    }
    let b = t_inv.mul(&phi)?;
    if b.mul(&b.transpose())? != *q {
        return Err(Error::Internal("Lempel factorization does not reproduce Q".into()));
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&str]) -> BitMatrix {
        BitMatrix::parse(&rows.join("\n")).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(BitMatrix::identity(2).rank(), 2);
        assert_eq!(BitMatrix::zeros(3, 4).rank(), 0);
        assert_eq!(m(&["101", "011"]).rank(), 2);
    }

    #[test]
    fn accessors_check_bounds() {
        let a = m(&["10", "01"]);
        assert_eq!(a.get(1, 1), Ok(1));
        assert!(matches!(a.get(2, 0), Err(Error::OutOfRange { .. })));
        let empty = BitMatrix::zeros(0, 5);
        assert_eq!(empty.rank(), 0);
        assert!(empty.is_empty());
    }

    #[test]
    fn completion() {
        assert_eq!(BitMatrix::identity(2).complete_to_invertible().unwrap().rows(), 0);
        let g = m(&["11"]);
        let c = g.complete_to_invertible().unwrap();
        assert_eq!(c.rows(), 1);
        assert_eq!(g.vstack(&c).unwrap().rank(), 2);
        let g = m(&["1111111", "0000000"]);
        assert!(matches!(
            g.complete_to_invertible(),
            Err(Error::RankDeficient { rank: 1, rows: 2 })
        ));
    }

    #[test]
    fn span_collapses_duplicates() {
        assert_eq!(m(&["11"]).row_span(), vec![vec![0], vec![3]]);
        assert_eq!(m(&["101", "101"]).row_span().len(), 2);
    }

    #[test]
    fn text_round_trip() {
        let a = m(&["1001", "0110", "1111"]);
        assert_eq!(a.to_string().parse::<BitMatrix>().unwrap(), a);
        let err = BitMatrix::parse("101\n1x1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let stop = BitMatrix::parse("10\n01\n\n11\n").unwrap();
        assert_eq!(stop.rows(), 2);
    }

    #[test]
    fn lempel_small_cases() {
        let b = lempel_factorize(&m(&["1"])).unwrap();
        assert_eq!(b.cols(), 1);
        let x = m(&["01", "10"]);
        let b = lempel_factorize(&x).unwrap();
        assert_eq!(b.cols(), 3);
        assert_eq!(b.mul(&b.transpose()).unwrap(), x);
        assert_eq!(lempel_factorize(&BitMatrix::zeros(3, 3)).unwrap().cols(), 0);
        assert_eq!(lempel_factorize(&m(&["01", "00"])), Err(Error::NotSymmetric));
        assert_eq!(lempel_factorize(&m(&["01"])), Err(Error::NotSymmetric));
    }

    #[test]
    fn pauli_x_needs_three_columns() {
        // No 2x1 or 2x2 matrix factors the antidiagonal; check all of them.
        let x = m(&["01", "10"]);
        for t in 1..=2usize {
            for bits in 0u32..(1 << (2 * t)) {
                let b = BitMatrix::from_columns(2, &(0..t).map(|j| (bits >> (2 * j) & 3) as u64).collect::<Vec<_>>()).unwrap();
                assert_ne!(b.mul(&b.transpose()).unwrap(), x);
            }
        }
    }

    // Minimal column count by breadth-first search over sums of c c^T.
    fn min_columns_oracle(k: usize) -> std::collections::HashMap<Vec<u64>, usize> {
        let outer = |c: u64| -> Vec<u64> {
            (0..k).map(|i| if c >> i & 1 == 1 { c } else { 0 }).collect()
        };
        let gens: Vec<Vec<u64>> = (1u64..1 << k).map(outer).collect();
        let mut dist = std::collections::HashMap::new();
        let start = vec![0u64; k];
        dist.insert(start.clone(), 0usize);
        let mut frontier = vec![start];
        let mut d = 0;
        while !frontier.is_empty() {
            d += 1;
            let mut next = Vec::new();
            for s in &frontier {
                for g in &gens {
                    let t: Vec<u64> = s.iter().zip(g).map(|(a, b)| a ^ b).collect();
                    if !dist.contains_key(&t) {
                        dist.insert(t.clone(), d);
                        next.push(t);
                    }
                }
            }
            frontier = next;
        }
        dist
    }

    #[test]
    fn lempel_is_minimal_up_to_five() {
        for k in 1..=5usize {
            let oracle = min_columns_oracle(k);
            // Every symmetric matrix is reachable.
            assert_eq!(oracle.len(), 1 << (k * (k + 1) / 2));
            for (rows, &best) in &oracle {
                let q = BitMatrix::from_columns(k, rows).unwrap();
                let b = lempel_factorize(&q).unwrap();
                assert_eq!(b.mul(&b.transpose()).unwrap(), q);
                assert_eq!(b.cols(), best, "Q = {q:?}");
            }
        }
    }

    fn arb_matrix(rows: usize, cols: usize) -> impl Strategy<Value = BitMatrix> {
        proptest::collection::vec(proptest::collection::vec(0u8..2, cols), rows)
            .prop_map(|r| BitMatrix::from_rows(&r).unwrap())
    }

    proptest! {
        #[test]
        fn rank_is_transpose_invariant(a in arb_matrix(8, 12)) {
            prop_assert_eq!(a.rank(), a.transpose().rank());
        }

        #[test]
        fn span_size_is_two_to_rank(a in arb_matrix(5, 9)) {
            let span = a.row_span();
            prop_assert_eq!(span.len(), 1 << a.rank());
            let distinct: std::collections::HashSet<_> = span.iter().collect();
            prop_assert_eq!(distinct.len(), span.len());
        }

        #[test]
        fn completion_is_invertible(a in arb_matrix(4, 9)) {
            let basis = a.row_basis();
            let c = basis.complete_to_invertible().unwrap();
            prop_assert_eq!(basis.vstack(&c).unwrap().rank(), 9);
        }

        #[test]
        fn reduce_transform_is_consistent(a in arb_matrix(6, 10)) {
            let (e, t, rank) = a.row_reduce();
            prop_assert_eq!(t.mul(&a).unwrap(), e.clone());
            prop_assert_eq!(rank, a.rank());
            prop_assert!(t.inverse().is_some());
            for r in rank..a.rows() {
                prop_assert_eq!(e.row_weight(r), 0);
            }
        }

        #[test]
        fn wide_rows_multiply(a in arb_matrix(3, 130), b in arb_matrix(130, 70)) {
            let ab = a.mul(&b).unwrap();
            for i in 0..3 {
                for j in 0..70 {
                    let dot = (0..130).filter(|&k| a.bit(i, k) && b.bit(k, j)).count() % 2 == 1;
                    prop_assert_eq!(ab.bit(i, j), dot);
                }
            }
        }
    }
}
