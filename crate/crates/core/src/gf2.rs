//! Dense matrices over GF(2).
//!
//! Rows are packed little-endian into `u64` words: column `c` lives in word
//! `c / 64`, bit `c % 64`. Every row occupies a whole number of words and the
//! padding bits past `cols` are kept at zero, so row equality and XOR can work
//! word-at-a-time.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported `n` for length-`2^n` objects.
pub const MAX_LOG_LEN: usize = 16;

const WORD: usize = 64;

#[inline]
fn words_for(cols: usize) -> usize {
    cols.div_ceil(WORD)
}

/// A dense binary matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        BitMatrix {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows of 0/1 bytes. All rows must share a length.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for (j, &bit) in row.iter().enumerate() {
                match bit {
                    0 => {}
                    1 => m.set(i, j, true),
                    other => {
                        return Err(Error::Parse(format!("entry ({i},{j}) is {other}, not 0/1")))
                    }
                }
            }
        }
        Ok(m)
    }

    /// Permutation matrix with a single 1 at `(i, perm[i])` for every row `i`.
    pub fn from_row_permutation(perm: &[usize]) -> Self {
        let mut m = Self::zeros(perm.len(), perm.len());
        for (i, &p) in perm.iter().enumerate() {
            m.set(i, p, true);
        }
        m
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
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.data[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.stride + c / WORD];
        let mask = 1u64 << (c % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn toggle(&mut self, r: usize, c: usize) {
        self.data[r * self.stride + c / WORD] ^= 1u64 << (c % WORD);
    }

    /// Packed words of row `r`.
    #[inline]
    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    /// Row `r` as 0/1 bytes.
    pub fn row(&self, r: usize) -> Vec<u8> {
        (0..self.cols).map(|c| self.get(r, c) as u8).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of ones in the whole matrix.
    pub fn weight(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// Column indices of the ones in row `r`, ascending.
    pub fn row_support(&self, r: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (wi, &w) in self.row_words(r).iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                out.push(wi * WORD + b);
                w &= w - 1;
            }
        }
        out
    }

    /// Highest column holding a one in row `r`.
    pub fn last_one(&self, r: usize) -> Option<usize> {
        self.row_words(r)
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(wi, &w)| wi * WORD + (WORD - 1 - w.leading_zeros() as usize))
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        let s = self.stride;
        if src == dst {
            self.data[dst * s..(dst + 1) * s].fill(0);
            return;
        }
        let (a, b) = if src < dst {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&lo[src * s..(src + 1) * s], &mut hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&hi[..s], &mut lo[dst * s..(dst + 1) * s])
        };
        for (d, x) in b.iter_mut().zip(a) {
            *d ^= *x;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let s = self.stride;
        for k in 0..s {
            self.data.swap(a * s + k, b * s + k);
        }
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.row_support(r) {
                t.set(c, r, true);
            }
        }
        t
    }

    /// GF(2) product `self * rhs`.
    pub fn mul(&self, rhs: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = BitMatrix::zeros(self.rows, rhs.cols);
        let s = rhs.stride;
        for r in 0..self.rows {
            let dst = &mut out.data[r * s..(r + 1) * s];
            for k in self.row_support(r) {
                for (d, x) in dst.iter_mut().zip(rhs.row_words(k)) {
                    *d ^= *x;
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix: `v * self`.
    pub fn vec_mul(&self, v: &[u8]) -> Result<Vec<u8>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} times {}x{} matrix",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        let mut acc = vec![0u64; self.stride];
        for (r, &bit) in v.iter().enumerate() {
            if bit & 1 == 1 {
                for (a, x) in acc.iter_mut().zip(self.row_words(r)) {
                    *a ^= *x;
                }
            }
        }
        Ok((0..self.cols)
            .map(|c| ((acc[c / WORD] >> (c % WORD)) & 1) as u8)
            .collect())
    }

    /// Matrix with column order reversed.
    pub fn reverse_columns(&self) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for c in self.row_support(r) {
                out.set(r, self.cols - 1 - c, true);
            }
        }
        out
    }

    /// Reduced row-echelon form with zero rows dropped, plus the ascending
    /// pivot columns.
    pub fn rref(&self) -> (BitMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..m.cols {
            if lead == m.rows {
                break;
            }
            let Some(p) = (lead..m.rows).find(|&r| m.get(r, c)) else {
                continue;
            };
            m.swap_rows(lead, p);
            for r in 0..m.rows {
                if r != lead && m.get(r, c) {
                    m.xor_row_into(lead, r);
                }
            }
            pivots.push(c);
            lead += 1;
        }
        m.rows = lead;
        m.data.truncate(lead * m.stride);
        (m, pivots)
    }

    /// Echelon form where each row's pivot is its *last* one and no other row
    /// has a one in that column. Rows are ordered by ascending pivot.
    pub fn rref_trailing(&self) -> (BitMatrix, Vec<usize>) {
        let (red, pivots) = self.reverse_columns().rref();
        let cols = self.cols;
        let mut order: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .map(|(row, &p)| (cols - 1 - p, row))
            .collect();
        order.sort_unstable();
        let flipped = red.reverse_columns();
        let mut out = BitMatrix::zeros(order.len(), cols);
        for (dst, &(_, src)) in order.iter().enumerate() {
            out.data[dst * out.stride..(dst + 1) * out.stride].copy_from_slice(flipped.row_words(src));
        }
        (out, order.into_iter().map(|(p, _)| p).collect())
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Inverse of a square matrix, by Gauss-Jordan on `[self | I]`.
    pub fn inverse(&self) -> Result<BitMatrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix has no inverse",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut aug = BitMatrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in self.row_support(r) {
                aug.set(r, c, true);
            }
            aug.set(r, n + r, true);
        }
        let (red, pivots) = aug.rref();
        if pivots.len() < n || (n > 0 && pivots[n - 1] >= n) {
            return Err(Error::Singular);
        }
        let mut inv = BitMatrix::zeros(n, n);
        for r in 0..n {
            for c in red.row_support(r) {
                if c >= n {
                    inv.set(r, c - n, true);
                }
            }
        }
        Ok(inv)
    }

    /// True iff both matrices span the same row space.
    pub fn row_space_equal(&self, other: &BitMatrix) -> Result<bool> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "row spaces over {} and {} columns are not comparable",
                self.cols, other.cols
            )));
        }
        Ok(self.rref().0 == other.rref().0)
    }

    /// `G_2^{⊗n}` with `G_2 = [[1,0],[1,1]]`.
    pub fn kron_power(n: usize) -> Result<BitMatrix> {
        if n > MAX_LOG_LEN {
            return Err(Error::DimensionOverflow(n));
        }
        let size = 1usize << n;
        let mut m = BitMatrix::zeros(size, size);
        // entry (k, m) is one iff the bits of m are a subset of the bits of k
        for k in 0..size {
            let mut sub = k;
            loop {
                m.set(k, sub, true);
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & k;
            }
        }
        Ok(m)
    }
}

/// In-place `x = u * G_N` for `N = u.len()` a power of two.
pub fn polar_transform(u: &mut [u8]) {
    let len = u.len();
    debug_assert!(len.is_power_of_two());
    let mut half = 1;
    while half < len {
        for start in (0..len).step_by(2 * half) {
            for k in start..start + half {
                u[k] ^= u[k + half];
            }
        }
        half *= 2;
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        fmt::Display::fmt(self, f)
    }
}

/// One row per line, `0`/`1` characters, no separators.
impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let line: String = (0..self.cols)
                .map(|c| if self.get(r, c) { '1' } else { '0' })
                .collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

impl FromStr for BitMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rows: Vec<Vec<u8>> = s
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| {
                l.chars()
                    .map(|ch| match ch {
                        '0' => Ok(0),
                        '1' => Ok(1),
                        other => Err(Error::Parse(format!("unexpected character {other:?}"))),
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        BitMatrix::from_rows(&rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&str]) -> BitMatrix {
        rows.join("\n").parse().unwrap()
    }

    #[test]
    fn kron_small_powers() {
        assert_eq!(BitMatrix::kron_power(0).unwrap(), m(&["1"]));
        assert_eq!(BitMatrix::kron_power(1).unwrap(), m(&["10", "11"]));
        assert_eq!(
            BitMatrix::kron_power(2).unwrap(),
            m(&["1000", "1100", "1010", "1111"])
        );
        assert!(matches!(BitMatrix::kron_power(17), Err(Error::DimensionOverflow(17))));
    }

    #[test]
    fn kron_matches_explicit_kronecker_product() {
        // independent construction: block recursion [[G, 0], [G, G]]
        let mut g = m(&["1"]);
        for n in 1..=6 {
            let s = g.rows();
            let mut next = BitMatrix::zeros(2 * s, 2 * s);
            for r in 0..s {
                for c in 0..s {
                    if g.get(r, c) {
                        next.set(r, c, true);
                        next.set(r + s, c, true);
                        next.set(r + s, c + s, true);
                    }
                }
            }
            g = next;
            assert_eq!(BitMatrix::kron_power(n).unwrap(), g, "n = {n}");
        }
    }

    #[test]
    fn polar_transform_matches_matrix() {
        let g = BitMatrix::kron_power(4).unwrap();
        for seed in 0u32..50 {
            let u: Vec<u8> = (0..16).map(|i| ((seed.wrapping_mul(2654435761) >> i) & 1) as u8).collect();
            let mut x = u.clone();
            polar_transform(&mut x);
            assert_eq!(x, g.vec_mul(&u).unwrap());
        }
    }

    #[test]
    fn mul_dimension_mismatch() {
        let a = BitMatrix::zeros(2, 3);
        assert!(a.mul(&a).is_err());
    }

    #[test]
    fn rref_examples() {
        let id = BitMatrix::identity(5);
        let (r, p) = id.rref();
        assert_eq!(r, id);
        assert_eq!(p, vec![0, 1, 2, 3, 4]);

        let dup = m(&["0110", "0110", "0110"]);
        let (r, p) = dup.rref();
        assert_eq!(r, m(&["0110"]));
        assert_eq!(p, vec![1]);
    }

    #[test]
    fn rref_trailing_puts_pivot_last() {
        let a = m(&["1000", "1100", "1010", "1011"]);
        let (r, p) = a.rref_trailing();
        assert_eq!(p, vec![0, 1, 2, 3]);
        for (row, &piv) in p.iter().enumerate() {
            assert_eq!(r.last_one(row), Some(piv));
            for other in 0..r.rows() {
                if other != row {
                    assert!(!r.get(other, piv));
                }
            }
        }
        assert!(r.row_space_equal(&a).unwrap());
    }

    #[test]
    fn inverse_round_trip() {
        let a = m(&["100", "010", "101"]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), BitMatrix::identity(3));
        assert!(matches!(m(&["11", "11"]).inverse(), Err(Error::Singular)));
        assert_eq!(BitMatrix::zeros(0, 0).inverse().unwrap(), BitMatrix::zeros(0, 0));
    }

    #[test]
    fn last_one_and_support() {
        let a = m(&["0101000", "0000000"]);
        assert_eq!(a.last_one(0), Some(3));
        assert_eq!(a.last_one(1), None);
        assert_eq!(a.row_support(0), vec![1, 3]);
    }

    #[test]
    fn text_round_trip_wide() {
        let mut a = BitMatrix::zeros(3, 130);
        a.set(0, 0, true);
        a.set(1, 64, true);
        a.set(2, 129, true);
        let back: BitMatrix = a.to_string().parse().unwrap();
        assert_eq!(a, back);
        assert!("0102".parse::<BitMatrix>().is_err());
        assert!("01\n011".parse::<BitMatrix>().is_err());
    }
}
