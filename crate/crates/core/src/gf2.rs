//! Dense bit-packed vectors and matrices over GF(2).
//!
//! Rows are packed into `u64` words, least-significant bit first, and every
//! bit past the last column is kept at zero so that structural equality is
//! plain word equality. The byte encoding used by key files follows from the
//! same layout: bit `j` of a row lives in byte `j / 8` at bit `j % 8`.

use std::fmt;

use rand::Rng;
use thiserror::Error;

const WORD: usize = 64;

/// Magic prefix of a serialized [`BitMatrix`].
pub const MATRIX_MAGIC: &[u8; 4] = b"RKB1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("matrix is singular")]
    Singular,
    #[error("malformed matrix encoding: {0}")]
    Format(String),
}

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

#[inline]
fn tail_mask(bits: usize) -> u64 {
    match bits % WORD {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

fn pack_bytes(words: &[u64], bits: usize, out: &mut Vec<u8>) {
    let nbytes = bits.div_ceil(8);
    out.extend(words.iter().flat_map(|w| w.to_le_bytes()).take(nbytes));
}

fn unpack_bytes(bytes: &[u8], bits: usize) -> Vec<u64> {
    let mut words = vec![0u64; words_for(bits)];
    for (i, b) in bytes.iter().enumerate() {
        words[i / 8] |= (*b as u64) << (8 * (i % 8));
    }
    if let Some(last) = words.last_mut() {
        *last &= tail_mask(bits);
    }
    words
}

/// A packed vector of bits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut v = Self::zeros(0);
        for b in bits {
            v.push(b);
        }
        v
    }

    /// Uniform i.i.d. bits.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut words: Vec<u64> = (0..words_for(len)).map(|_| rng.random()).collect();
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(len);
        }
        Self { len, words }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let m = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= m;
        } else {
            self.words[i / WORD] &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn push(&mut self, value: bool) {
        if self.len.is_multiple_of(WORD) {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, value);
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + b)
            })
        })
    }

    pub fn xor_assign(&mut self, other: &BitVector) -> Result<(), Gf2Error> {
        if self.len != other.len {
            return Err(Gf2Error::DimensionMismatch {
                op: "xor",
                left: (self.len, 1),
                right: (other.len, 1),
            });
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    pub fn xor(&self, other: &BitVector) -> Result<BitVector, Gf2Error> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    /// Bits `start..end` as a new vector.
    pub fn slice(&self, start: usize, end: usize) -> BitVector {
        assert!(start <= end && end <= self.len);
        BitVector::from_bits((start..end).map(|i| self.get(i)))
    }

    /// Copy of `self` padded with zeros (or truncated) to `len` bits.
    pub fn resized(&self, len: usize) -> BitVector {
        let mut out = BitVector::zeros(len);
        let keep = words_for(len.min(self.len));
        out.words[..keep].copy_from_slice(&self.words[..keep]);
        if let Some(last) = out.words.last_mut() {
            *last &= tail_mask(len);
        }
        out
    }

    /// Packed bytes, LSB-first, `ceil(len / 8)` of them.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.len.div_ceil(8));
        pack_bytes(&self.words, self.len, &mut out);
        out
    }

    pub fn from_bytes(len: usize, bytes: &[u8]) -> Result<Self, Gf2Error> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Gf2Error::Format(format!(
                "expected {} bytes for {len} bits, got {}",
                len.div_ceil(8),
                bytes.len()
            )));
        }
        let words = unpack_bytes(bytes, len);
        let v = Self { len, words };
        if v.to_bytes() != bytes {
            return Err(Gf2Error::Format("nonzero padding bits".into()));
        }
        Ok(v)
    }
}

impl FromIterator<bool> for BitVector {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        BitVector::from_bits(iter)
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector[{}](", self.len)?;
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        f.write_str(")")
    }
}

/// A dense row-major matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    /// All-zero matrix. Both dimensions must be at least one.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "empty matrix {rows}x{cols}");
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Permutation matrix with a single one at `(i, perm[i])` in each row.
    pub fn from_permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut m = Self::zeros(n, n);
        for (i, &j) in perm.iter().enumerate() {
            m.set(i, j, true);
        }
        m
    }

    /// Builds a matrix from rows of 0/1 values.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged rows");
            for (j, &b) in r.iter().enumerate() {
                m.set(i, j, b != 0);
            }
        }
        m
    }

    /// Uniform i.i.d. entries.
    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let mut m = Self::zeros(rows, cols);
        let mask = tail_mask(cols);
        for i in 0..rows {
            let row = m.row_words_mut(i);
            for w in row.iter_mut() {
                *w = rng.random();
            }
            *row.last_mut().unwrap() &= mask;
        }
        m
    }

    /// Uniformly random `n x n` permutation matrix.
    pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self::from_permutation(&random_perm(n, rng))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols);
        (self.data[i * self.stride + j / WORD] >> (j % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.rows && j < self.cols);
        let w = &mut self.data[i * self.stride + j / WORD];
        let m = 1u64 << (j % WORD);
        if value {
            *w |= m;
        } else {
            *w &= !m;
        }
    }

    #[inline]
    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    fn row_words_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn row(&self, i: usize) -> BitVector {
        BitVector {
            len: self.cols,
            words: self.row_words(i).to_vec(),
        }
    }

    pub fn column(&self, j: usize) -> BitVector {
        BitVector::from_bits((0..self.rows).map(|i| self.get(i, j)))
    }

    fn xor_row_from(&mut self, dst: usize, src: &[u64]) {
        for (a, b) in self.row_words_mut(dst).iter_mut().zip(src) {
            *a ^= b;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.stride {
            self.data.swap(a * self.stride + k, b * self.stride + k);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// Number of ones.
    pub fn weight(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn row_weight(&self, i: usize) -> usize {
        self.row_words(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Entry-wise sum (XOR).
    pub fn add(&self, other: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.shape() != other.shape() {
            return Err(Gf2Error::DimensionMismatch {
                op: "add",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a ^= b;
        }
        Ok(out)
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.cols != other.rows {
            return Err(Gf2Error::DimensionMismatch {
                op: "mul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let dst = &mut out.data[i * out.stride..(i + 1) * out.stride];
            for (wi, &w) in self.row_words(i).iter().enumerate() {
                let mut w = w;
                while w != 0 {
                    let k = wi * WORD + w.trailing_zeros() as usize;
                    w &= w - 1;
                    for (a, b) in dst.iter_mut().zip(other.row_words(k)) {
                        *a ^= b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product `A x`.
    pub fn mat_vec(&self, x: &BitVector) -> Result<BitVector, Gf2Error> {
        if self.cols != x.len() {
            return Err(Gf2Error::DimensionMismatch {
                op: "mat_vec",
                left: self.shape(),
                right: (x.len(), 1),
            });
        }
        let mut y = BitVector::zeros(self.rows);
        for i in 0..self.rows {
            let parity = self
                .row_words(i)
                .iter()
                .zip(x.words())
                .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
                & 1;
            if parity == 1 {
                y.set(i, true);
            }
        }
        Ok(y)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in self.row(i).iter_ones() {
                t.set(j, i, true);
            }
        }
        t
    }

    /// Gauss-Jordan inverse; the pivot for each column is the first row at or
    /// below the diagonal with that bit set.
    pub fn invert(&self) -> Result<BitMatrix, Gf2Error> {
        if self.rows != self.cols {
            return Err(Gf2Error::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        let mut work = self.clone();
        let mut inv = BitMatrix::identity(n);
        for col in 0..n {
            let (wi, bit) = (col / WORD, 1u64 << (col % WORD));
            let pivot = (col..n)
                .find(|&r| work.data[r * work.stride + wi] & bit != 0)
                .ok_or(Gf2Error::Singular)?;
            work.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let prow = work.row_words(col).to_vec();
            let pinv = inv.row_words(col).to_vec();
            for r in 0..n {
                if r != col && work.data[r * work.stride + wi] & bit != 0 {
                    work.xor_row_from(r, &prow);
                    inv.xor_row_from(r, &pinv);
                }
            }
        }
        Ok(inv)
    }

    /// Row rank over GF(2).
    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let (wi, bit) = (col / WORD, 1u64 << (col % WORD));
            let Some(pivot) = (rank..self.rows).find(|&r| work.data[r * work.stride + wi] & bit != 0) else {
                continue;
            };
            work.swap_rows(rank, pivot);
            let prow = work.row_words(rank).to_vec();
            for r in rank + 1..self.rows {
                if work.data[r * work.stride + wi] & bit != 0 {
                    work.xor_row_from(r, &prow);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Copy of the `rows x cols` block whose top-left corner is `(r0, c0)`.
    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> BitMatrix {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols);
        let mut out = BitMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if self.get(r0 + i, c0 + j) {
                    out.set(i, j, true);
                }
            }
        }
        out
    }

    /// Writes `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn paste(&mut self, r0: usize, c0: usize, block: &BitMatrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j));
            }
        }
    }

    /// Stacks `top` above `bottom`.
    pub fn vstack(top: &BitMatrix, bottom: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if top.cols != bottom.cols {
            return Err(Gf2Error::DimensionMismatch {
                op: "vstack",
                left: top.shape(),
                right: bottom.shape(),
            });
        }
        let mut data = top.data.clone();
        data.extend_from_slice(&bottom.data);
        Ok(BitMatrix {
            rows: top.rows + bottom.rows,
            cols: top.cols,
            stride: top.stride,
            data,
        })
    }

    /// Assembles `[[tl, tr], [bl, br]]`.
    pub fn from_blocks(tl: &BitMatrix, tr: &BitMatrix, bl: &BitMatrix, br: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if tl.rows != tr.rows || bl.rows != br.rows {
            return Err(Gf2Error::DimensionMismatch {
                op: "from_blocks rows",
                left: tl.shape(),
                right: tr.shape(),
            });
        }
        if tl.cols != bl.cols || tr.cols != br.cols {
            return Err(Gf2Error::DimensionMismatch {
                op: "from_blocks cols",
                left: tl.shape(),
                right: bl.shape(),
            });
        }
        let mut out = BitMatrix::zeros(tl.rows + bl.rows, tl.cols + tr.cols);
        out.paste(0, 0, tl);
        out.paste(0, tl.cols, tr);
        out.paste(tl.rows, 0, bl);
        out.paste(tl.rows, tl.cols, br);
        Ok(out)
    }

    /// Block-diagonal matrix with the given blocks along the diagonal.
    pub fn block_diag(blocks: &[&BitMatrix]) -> BitMatrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = BitMatrix::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            out.paste(r0, c0, b);
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// `RKB1` encoding: magic, `u32` rows, `u32` cols (little-endian), then each
    /// row packed LSB-first into whole bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let row_bytes = self.cols.div_ceil(8);
        let mut out = Vec::with_capacity(12 + self.rows * row_bytes);
        out.extend_from_slice(MATRIX_MAGIC);
        out.extend_from_slice(&(self.rows as u32).to_le_bytes());
        out.extend_from_slice(&(self.cols as u32).to_le_bytes());
        for i in 0..self.rows {
            pack_bytes(self.row_words(i), self.cols, &mut out);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<BitMatrix, Gf2Error> {
        if bytes.len() < 12 || &bytes[..4] != MATRIX_MAGIC {
            return Err(Gf2Error::Format("missing RKB1 header".into()));
        }
        let rows = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
        let cols = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        if rows == 0 || cols == 0 {
            return Err(Gf2Error::Format(format!("empty shape {rows}x{cols}")));
        }
        let row_bytes = cols.div_ceil(8);
        let body = &bytes[12..];
        if body.len() != rows * row_bytes {
            return Err(Gf2Error::Format(format!(
                "expected {} payload bytes, got {}",
                rows * row_bytes,
                body.len()
            )));
        }
        let mut m = BitMatrix::zeros(rows, cols);
        for (i, chunk) in body.chunks(row_bytes).enumerate() {
            let words = unpack_bytes(chunk, cols);
            if words.iter().zip(chunk.chunks(8)).any(|(w, c)| {
                let mut full = [0u8; 8];
                full[..c.len()].copy_from_slice(c);
                u64::from_le_bytes(full) != *w
            }) {
                return Err(Gf2Error::Format(format!("nonzero padding in row {i}")));
            }
            m.row_words_mut(i).copy_from_slice(&words);
        }
        Ok(m)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(32) {
            let row: String = (0..self.cols.min(64))
                .map(|j| if self.get(i, j) { '1' } else { '0' })
                .collect();
            writeln!(f, "  {row}")?;
        }
        f.write_str("]")
    }
}

/// Uniform permutation of `0..n` (Fisher-Yates).
pub fn random_perm<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}
