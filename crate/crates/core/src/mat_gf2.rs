//! Dense matrices over GF(2), 64 entries per word.
//!
//! Row `i` occupies `stride` consecutive words; bit `j % 64` of word `j / 64`
//! holds entry `(i, j)`. Bits past `ncols` in the last word of a row are kept
//! zero by every operation, so two matrices are equal iff their words are.
//!
//! Sub-blocks are handled as copies: [`BitMatrix::copy_window`] extracts one
//! and [`BitMatrix::paste_window`] / [`BitMatrix::xor_window`] write one back.
//! Windows may start at any bit offset.

use std::fmt;

use crate::error::{Error, Result};
use crate::rng::MatrixRng;
use crate::strassen::{winograd, WinogradOperand};

pub const WORD_BITS: usize = 64;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

#[inline]
fn low_mask(len: usize) -> u64 {
    if len >= WORD_BITS {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// Reads `len <= 64` bits starting at bit `start`. Bits past the end of the
/// slice read as zero.
#[inline]
pub(crate) fn read_bits(row: &[u64], start: usize, len: usize) -> u64 {
    if len == 0 {
        return 0;
    }
    let wi = start / WORD_BITS;
    let sh = start % WORD_BITS;
    let mut v = row.get(wi).copied().unwrap_or(0) >> sh;
    if sh != 0 && sh + len > WORD_BITS {
        v |= row.get(wi + 1).copied().unwrap_or(0) << (WORD_BITS - sh);
    }
    v & low_mask(len)
}

#[inline]
fn combine_bits(row: &mut [u64], start: usize, len: usize, val: u64, xor: bool) {
    if len == 0 {
        return;
    }
    let mask = low_mask(len);
    let val = val & mask;
    let wi = start / WORD_BITS;
    let sh = start % WORD_BITS;
    if xor {
        row[wi] ^= val << sh;
    } else {
        row[wi] = (row[wi] & !(mask << sh)) | (val << sh);
    }
    if sh != 0 && sh + len > WORD_BITS {
        let hi_mask = mask >> (WORD_BITS - sh);
        let hi_val = val >> (WORD_BITS - sh);
        if xor {
            row[wi + 1] ^= hi_val;
        } else {
            row[wi + 1] = (row[wi + 1] & !hi_mask) | hi_val;
        }
    }
}

#[inline]
pub(crate) fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= *s;
    }
}

/// Fills `out` (`2^k` rows of `stride` words) with every XOR combination of
/// the `k` source rows: row `x` is the sum of the rows whose bit is set in
/// `x`. Rows are visited in Gray-code order so each costs one row XOR.
/// Returns the number of row XORs performed (always `2^k - 1`).
pub(crate) fn gray_combinations(src: &[&[u64]], stride: usize, out: &mut [u64]) -> usize {
    let k = src.len();
    debug_assert!(out.len() >= (stride << k));
    out[..stride].fill(0);
    let mut adds = 0;
    for i in 1usize..(1 << k) {
        let g = i ^ (i >> 1);
        let prev = (i - 1) ^ ((i - 1) >> 1);
        let bit = (g ^ prev).trailing_zeros() as usize;
        out.copy_within(prev * stride..(prev + 1) * stride, g * stride);
        xor_into(&mut out[g * stride..(g + 1) * stride], &src[bit][..stride]);
        adds += 1;
    }
    adds
}

/// Multiplication kernels. All of them produce bit-identical results.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MulStrategy {
    /// Row-XOR triple loop.
    Cubic,
    /// Gray-code tables over blocks of rows of the right operand.
    M4rm,
    /// Strassen-Winograd recursion with an M4RM base case.
    Strassen,
    /// Strassen above the crossover, M4RM below.
    Auto,
}

/// Run-time tuning knobs for GF(2) multiplication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gf2Tuning {
    /// Bits of the left operand consumed per M4RM table (1..=10).
    pub m4rm_bits: usize,
    /// Number of M4RM tables used simultaneously.
    pub m4rm_tables: usize,
    /// Smallest dimension at which Strassen-Winograd recurses further.
    pub strassen_crossover: usize,
}

pub const DEFAULT_STRASSEN_CROSSOVER: usize = 2048;

impl Default for Gf2Tuning {
    fn default() -> Self {
        Self {
            m4rm_bits: 8,
            m4rm_tables: 2,
            strassen_crossover: DEFAULT_STRASSEN_CROSSOVER,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    nrows: usize,
    ncols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        let stride = words_for(ncols);
        Self {
            nrows,
            ncols,
            stride,
            data: vec![0; nrows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows of 0/1 values.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), ncols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != ncols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {ncols}",
                    r.len()
                )));
            }
            for (j, &b) in r.iter().enumerate() {
                m.set(i, j, b != 0);
            }
        }
        Ok(m)
    }

    /// Uniformly random matrix drawn from `rng`.
    pub fn random(nrows: usize, ncols: usize, rng: &mut MatrixRng) -> Self {
        let mut m = Self::zeros(nrows, ncols);
        m.fill_random(rng);
        m
    }

    /// Overwrites every entry with bits derived from `seed`.
    pub fn randomize(&mut self, seed: u64) {
        self.fill_random(&mut MatrixRng::new(seed));
    }

    fn fill_random(&mut self, rng: &mut MatrixRng) {
        let tail = self.tail_mask();
        for i in 0..self.nrows {
            let row = self.row_mut(i);
            for w in row.iter_mut() {
                *w = rng.next_u64();
            }
            if let Some(last) = row.last_mut() {
                *last &= tail;
            }
        }
    }

    #[inline]
    fn tail_mask(&self) -> u64 {
        match self.ncols % WORD_BITS {
            0 => u64::MAX,
            r => (1u64 << r) - 1,
        }
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Words per row.
    #[inline]
    pub fn stride(&self) -> usize {
        self.stride
    }

    /// Raw row-major words, padding included.
    pub fn words(&self) -> &[u64] {
        &self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.stride..(i + 1) * self.stride]
    }

    /// Mutable access to two distinct rows at once.
    pub(crate) fn rows_pair_mut(&mut self, i: usize, j: usize) -> (&mut [u64], &mut [u64]) {
        assert_ne!(i, j);
        let s = self.stride;
        if i < j {
            let (a, b) = self.data.split_at_mut(j * s);
            (&mut a[i * s..(i + 1) * s], &mut b[..s])
        } else {
            let (a, b) = self.data.split_at_mut(i * s);
            let (rj, ri) = (&mut a[j * s..(j + 1) * s], &mut b[..s]);
            (ri, rj)
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.nrows && j < self.ncols, "index ({i}, {j}) out of bounds");
        (self.data[i * self.stride + j / WORD_BITS] >> (j % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        assert!(i < self.nrows && j < self.ncols, "index ({i}, {j}) out of bounds");
        let w = &mut self.data[i * self.stride + j / WORD_BITS];
        let bit = 1u64 << (j % WORD_BITS);
        if v {
            *w |= bit;
        } else {
            *w &= !bit;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    fn check_same_shape(&self, other: &Self, what: &str) -> Result<()> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::DimensionMismatch(format!(
                "{what}: {}x{} vs {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut c = self.clone();
        c.add_assign(other)?;
        Ok(c)
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        self.check_same_shape(other, "add")?;
        xor_into(&mut self.data, &other.data);
        Ok(())
    }

    pub fn row_swap(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_row(i)?;
        self.check_row(j)?;
        if i != j {
            let (a, b) = self.rows_pair_mut(i, j);
            a.swap_with_slice(b);
        }
        Ok(())
    }

    pub fn col_swap(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_col(a)?;
        self.check_col(b)?;
        if a == b {
            return Ok(());
        }
        for i in 0..self.nrows {
            let x = self.get(i, a);
            let y = self.get(i, b);
            if x != y {
                self.set(i, a, y);
                self.set(i, b, x);
            }
        }
        Ok(())
    }

    fn check_row(&self, i: usize) -> Result<()> {
        if i >= self.nrows {
            return Err(self.oob(i, 0));
        }
        Ok(())
    }

    fn check_col(&self, j: usize) -> Result<()> {
        if j >= self.ncols {
            return Err(self.oob(0, j));
        }
        Ok(())
    }

    fn oob(&self, row: usize, col: usize) -> Error {
        Error::IndexOutOfBounds {
            row,
            col,
            nrows: self.nrows,
            ncols: self.ncols,
        }
    }

    fn check_window(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Result<()> {
        if r0 + nr > self.nrows || c0 + nc > self.ncols {
            return Err(self.oob(r0 + nr, c0 + nc));
        }
        Ok(())
    }

    /// Copy of the `nr x nc` block whose top-left entry is `(r0, c0)`.
    pub fn copy_window(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Result<Self> {
        self.check_window(r0, c0, nr, nc)?;
        let mut out = Self::zeros(nr, nc);
        if nc == 0 {
            return Ok(out);
        }
        let tail = out.tail_mask();
        for i in 0..nr {
            let src = self.row(r0 + i);
            let dst = out.row_mut(i);
            if c0.is_multiple_of(WORD_BITS) {
                let w0 = c0 / WORD_BITS;
                let n = dst.len();
                dst.copy_from_slice(&src[w0..w0 + n]);
                dst[n - 1] &= tail;
            } else {
                for (w, d) in dst.iter_mut().enumerate() {
                    let len = (nc - w * WORD_BITS).min(WORD_BITS);
                    *d = read_bits(src, c0 + w * WORD_BITS, len);
                }
            }
        }
        Ok(out)
    }

    /// Overwrites the block at `(r0, c0)` with `src`.
    pub fn paste_window(&mut self, r0: usize, c0: usize, src: &Self) -> Result<()> {
        self.combine_window(r0, c0, src, false)
    }

    /// Adds `src` into the block at `(r0, c0)`.
    pub fn xor_window(&mut self, r0: usize, c0: usize, src: &Self) -> Result<()> {
        self.combine_window(r0, c0, src, true)
    }

    fn combine_window(&mut self, r0: usize, c0: usize, src: &Self, xor: bool) -> Result<()> {
        self.check_window(r0, c0, src.nrows, src.ncols)?;
        let nc = src.ncols;
        for i in 0..src.nrows {
            let s = src.row(i);
            let d = self.row_mut(r0 + i);
            for (w, &val) in s.iter().enumerate() {
                let len = (nc - w * WORD_BITS).min(WORD_BITS);
                combine_bits(d, c0 + w * WORD_BITS, len, val, xor);
            }
        }
        Ok(())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    fn check_mul(&self, b: &Self) -> Result<()> {
        if self.ncols != b.nrows {
            return Err(Error::DimensionMismatch(format!(
                "mul: {}x{} by {}x{}",
                self.nrows, self.ncols, b.nrows, b.ncols
            )));
        }
        Ok(())
    }

    /// Matrix product with the default strategy and tuning.
    pub fn mul(&self, b: &Self) -> Result<Self> {
        self.mul_with(b, MulStrategy::Auto, &Gf2Tuning::default())
    }

    pub fn mul_with(&self, b: &Self, strategy: MulStrategy, tuning: &Gf2Tuning) -> Result<Self> {
        self.check_mul(b)?;
        Ok(match strategy {
            MulStrategy::Cubic => mul_cubic(self, b),
            MulStrategy::M4rm => mul_m4rm(self, b, tuning),
            MulStrategy::Strassen => {
                winograd(self, b, tuning.strassen_crossover.max(1), &mut |x: &Self, y: &Self| {
                    mul_m4rm(x, y, tuning)
                })
            }
            MulStrategy::Auto => {
                let crossover = tuning.strassen_crossover.max(1);
                if self.nrows.min(self.ncols).min(b.ncols) > crossover {
                    winograd(self, b, crossover, &mut |x: &Self, y: &Self| mul_m4rm(x, y, tuning))
                } else {
                    mul_m4rm(self, b, tuning)
                }
            }
        })
    }
}

fn mul_cubic(a: &BitMatrix, b: &BitMatrix) -> BitMatrix {
    let mut c = BitMatrix::zeros(a.nrows, b.ncols);
    for i in 0..a.nrows {
        for k in 0..a.ncols {
            if a.get(i, k) {
                let s = b.stride;
                xor_into(&mut c.data[i * s..(i + 1) * s], b.row(k));
            }
        }
    }
    c
}

fn mul_m4rm(a: &BitMatrix, b: &BitMatrix, tuning: &Gf2Tuning) -> BitMatrix {
    let mut c = BitMatrix::zeros(a.nrows, b.ncols);
    let stride = b.stride;
    if stride == 0 || a.nrows == 0 {
        return c;
    }
    let k = tuning.m4rm_bits.clamp(1, 10);
    let ntables = tuning.m4rm_tables.max(1);
    let mut tables: Vec<Vec<u64>> = vec![vec![0; stride << k]; ntables];
    let mut widths = vec![0usize; ntables];

    let mut start = 0;
    while start < a.ncols {
        let mut used = 0;
        let mut pos = start;
        while used < ntables && pos < a.ncols {
            let kk = k.min(a.ncols - pos);
            let src: Vec<&[u64]> = (pos..pos + kk).map(|r| b.row(r)).collect();
            gray_combinations(&src, stride, &mut tables[used]);
            widths[used] = kk;
            used += 1;
            pos += kk;
        }
        for i in 0..a.nrows {
            let arow = a.row(i);
            let crow = &mut c.data[i * stride..(i + 1) * stride];
            let mut off = start;
            match used {
                1 => {
                    let x = read_bits(arow, off, widths[0]) as usize;
                    xor_into(crow, &tables[0][x * stride..(x + 1) * stride]);
                }
                2 => {
                    let x0 = read_bits(arow, off, widths[0]) as usize;
                    let x1 = read_bits(arow, off + widths[0], widths[1]) as usize;
                    let t0 = &tables[0][x0 * stride..(x0 + 1) * stride];
                    let t1 = &tables[1][x1 * stride..(x1 + 1) * stride];
                    for ((d, p), q) in crow.iter_mut().zip(t0).zip(t1) {
                        *d ^= p ^ q;
                    }
                }
                _ => {
                    for t in 0..used {
                        let x = read_bits(arow, off, widths[t]) as usize;
                        xor_into(crow, &tables[t][x * stride..(x + 1) * stride]);
                        off += widths[t];
                    }
                }
            }
        }
        start = pos;
    }
    c
}

/// Every XOR combination of the rows of `m`: row `x` of the result is the sum
/// of the rows `i` of `m` with bit `i` of `x` set.
pub fn linear_combinations(m: &BitMatrix) -> BitMatrix {
    linear_combinations_counted(m).0
}

/// Like [`linear_combinations`], also returning the number of row XORs used.
pub fn linear_combinations_counted(m: &BitMatrix) -> (BitMatrix, usize) {
    let k = m.nrows;
    assert!(k <= 16, "at most 16 rows supported, got {k}");
    let mut t = BitMatrix::zeros(1 << k, m.ncols);
    let src: Vec<&[u64]> = (0..k).map(|i| m.row(i)).collect();
    let adds = gray_combinations(&src, m.stride, &mut t.data);
    (t, adds)
}

impl WinogradOperand for BitMatrix {
    fn nrows(&self) -> usize {
        self.nrows
    }
    fn ncols(&self) -> usize {
        self.ncols
    }
    fn col_quantum(&self) -> usize {
        WORD_BITS
    }
    fn zeros_like(&self, nrows: usize, ncols: usize) -> Self {
        Self::zeros(nrows, ncols)
    }
    fn window(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        self.copy_window(r0, c0, nr, nc).expect("window in bounds")
    }
    fn paste(&mut self, r0: usize, c0: usize, src: &Self) {
        self.paste_window(r0, c0, src).expect("window in bounds")
    }
    fn xor_at(&mut self, r0: usize, c0: usize, src: &Self) {
        self.xor_window(r0, c0, src).expect("window in bounds")
    }
    fn xor_assign(&mut self, other: &Self) {
        xor_into(&mut self.data, &other.data);
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.nrows, self.ncols)?;
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.nrows {
            write!(f, "[")?;
            for j in 0..self.ncols {
                f.write_str(if self.get(i, j) { "1" } else { "0" })?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}
