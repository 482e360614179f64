//! Packed GF(2^e) matrices: each element occupies a `w`-bit slot of a 64-bit
//! word, where `w` is the smallest divisor of 64 that is at least `e`.
//!
//! Slot `j` of a row starts at bit `j * w`; the top `w - e` bits of every slot
//! are zero. Since `w` divides 64 a slot never straddles two words, which the
//! word-parallel kernels below rely on.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf2e::{Elem, FieldCtx};
use crate::mat_gf2::{BitMatrix, WORD_BITS};
use crate::rng::MatrixRng;
use crate::strassen::WinogradOperand;

/// Slot width used to store elements of GF(2^e).
pub fn pack_width(e: u32) -> Result<usize> {
    if !(crate::gf2e::MIN_DEGREE..=crate::gf2e::MAX_DEGREE).contains(&e) {
        return Err(Error::InvalidDegree(e));
    }
    Ok(match e {
        2 => 2,
        3 | 4 => 4,
        5..=8 => 8,
        _ => 16,
    })
}

/// Per-field word masks for the word-parallel kernels.
#[derive(Clone, Copy, Debug)]
pub(crate) struct SlotLayout {
    pub degree: u32,
    pub width: usize,
    /// Bit 0 of every slot.
    pub low: u64,
    /// Bit `e - 1` of every slot.
    pub top: u64,
    /// The modulus without its leading term.
    pub f_low: u64,
}

impl SlotLayout {
    pub fn new(ctx: &FieldCtx) -> Self {
        let e = ctx.degree();
        let width = pack_width(e).expect("field degree already validated");
        let mut low = 0u64;
        for s in 0..WORD_BITS / width {
            low |= 1 << (s * width);
        }
        Self {
            degree: e,
            width,
            low,
            top: low << (e - 1),
            f_low: (ctx.modulus() ^ (1 << e)) as u64,
        }
    }

    #[inline]
    pub fn per_word(&self) -> usize {
        WORD_BITS / self.width
    }

    /// Multiplies every slot of `w` by alpha.
    #[inline]
    pub fn times_alpha(&self, w: u64) -> u64 {
        let carry = (w & self.top) >> (self.degree - 1);
        ((w & !self.top) << 1) ^ carry.wrapping_mul(self.f_low)
    }

    pub fn times_alpha_row(&self, row: &mut [u64]) {
        for w in row.iter_mut() {
            *w = self.times_alpha(*w);
        }
    }
}

/// Scales packed words by a fixed element through byte-indexed tables.
pub(crate) struct RowScaler {
    kind: ScaleKind,
}

enum ScaleKind {
    Zero,
    One,
    Table { lanes: usize, table: Box<[[u64; 256]; 2]> },
}

impl RowScaler {
    pub fn new(ctx: &FieldCtx, layout: &SlotLayout, c: Elem) -> Self {
        let kind = match c {
            0 => ScaleKind::Zero,
            1 => ScaleKind::One,
            _ => {
                let w = layout.width;
                let lanes = if w == 16 { 2 } else { 1 };
                let mut table = Box::new([[0u64; 256]; 2]);
                for (lane, t) in table.iter_mut().enumerate().take(lanes) {
                    let mut single = [0u64; 8];
                    for (b, s) in single.iter_mut().enumerate() {
                        let (slot, bit) = if w == 16 {
                            (0, 8 * lane + b)
                        } else {
                            (b / w, b % w)
                        };
                        if bit < layout.degree as usize {
                            *s = (ctx.mul(c, 1 << bit) as u64) << (slot * w);
                        }
                    }
                    for x in 1usize..256 {
                        let lowbit = x.trailing_zeros() as usize;
                        t[x] = t[x & (x - 1)] ^ single[lowbit];
                    }
                }
                ScaleKind::Table { lanes, table }
            }
        };
        Self { kind }
    }

    #[inline]
    pub fn scale_word(&self, w: u64) -> u64 {
        match &self.kind {
            ScaleKind::Zero => 0,
            ScaleKind::One => w,
            ScaleKind::Table { lanes, table } => {
                let mut out = 0;
                if *lanes == 1 {
                    for p in 0..8 {
                        out |= table[0][((w >> (8 * p)) & 0xff) as usize] << (8 * p);
                    }
                } else {
                    for p in (0..8).step_by(2) {
                        let lo = table[0][((w >> (8 * p)) & 0xff) as usize];
                        let hi = table[1][((w >> (8 * p + 8)) & 0xff) as usize];
                        out |= (lo ^ hi) << (8 * p);
                    }
                }
                out
            }
        }
    }

    pub fn scale_in_place(&self, row: &mut [u64]) {
        match self.kind {
            ScaleKind::One => {}
            ScaleKind::Zero => row.fill(0),
            _ => {
                for w in row.iter_mut() {
                    *w = self.scale_word(*w);
                }
            }
        }
    }

    /// `dst += c * src`
    pub fn add_scaled(&self, dst: &mut [u64], src: &[u64]) {
        match self.kind {
            ScaleKind::Zero => {}
            ScaleKind::One => crate::mat_gf2::xor_into(dst, src),
            _ => {
                for (d, &s) in dst.iter_mut().zip(src) {
                    *d ^= self.scale_word(s);
                }
            }
        }
    }
}

#[derive(Clone)]
pub struct PackedMatrix {
    ctx: Arc<FieldCtx>,
    nrows: usize,
    ncols: usize,
    width: usize,
    bits: BitMatrix,
}

impl PartialEq for PackedMatrix {
    fn eq(&self, other: &Self) -> bool {
        *self.ctx == *other.ctx && self.bits == other.bits
    }
}

impl Eq for PackedMatrix {}

impl PackedMatrix {
    pub fn zeros(ctx: &Arc<FieldCtx>, nrows: usize, ncols: usize) -> Self {
        let width = pack_width(ctx.degree()).expect("field degree already validated");
        Self {
            ctx: Arc::clone(ctx),
            nrows,
            ncols,
            width,
            bits: BitMatrix::zeros(nrows, ncols * width),
        }
    }

    pub fn identity(ctx: &Arc<FieldCtx>, n: usize) -> Self {
        let mut m = Self::zeros(ctx, n, n);
        for i in 0..n {
            m.put(i, i, 1);
        }
        m
    }

    pub fn from_rows<R: AsRef<[Elem]>>(ctx: &Arc<FieldCtx>, rows: &[R]) -> Result<Self> {
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(ctx, rows.len(), ncols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != ncols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {ncols}",
                    r.len()
                )));
            }
            for (j, &x) in r.iter().enumerate() {
                m.try_set(i, j, x)?;
            }
        }
        Ok(m)
    }

    pub fn to_rows(&self) -> Vec<Vec<Elem>> {
        (0..self.nrows)
            .map(|i| (0..self.ncols).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn random(ctx: &Arc<FieldCtx>, nrows: usize, ncols: usize, rng: &mut MatrixRng) -> Self {
        let mut m = Self::zeros(ctx, nrows, ncols);
        m.fill_random(rng);
        m
    }

    /// Overwrites every entry with elements derived from `seed`.
    pub fn randomize(&mut self, seed: u64) {
        self.fill_random(&mut MatrixRng::new(seed));
    }

    fn fill_random(&mut self, rng: &mut MatrixRng) {
        let mask = self.ctx.elem_mask() as u64;
        let layout = self.layout();
        let elem_mask = layout.low.wrapping_mul(mask);
        let tail = self.tail_mask();
        for i in 0..self.nrows {
            let row = self.bits.row_mut(i);
            for w in row.iter_mut() {
                *w = rng.next_u64() & elem_mask;
            }
            if let Some(last) = row.last_mut() {
                *last &= tail;
            }
        }
    }

    fn tail_mask(&self) -> u64 {
        match (self.ncols * self.width) % WORD_BITS {
            0 => u64::MAX,
            r => (1u64 << r) - 1,
        }
    }

    #[inline]
    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Bits per element slot.
    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    /// The underlying GF(2) storage (`nrows x ncols*width`).
    pub fn bits(&self) -> &BitMatrix {
        &self.bits
    }

    pub(crate) fn bits_mut(&mut self) -> &mut BitMatrix {
        &mut self.bits
    }

    pub(crate) fn layout(&self) -> SlotLayout {
        SlotLayout::new(&self.ctx)
    }

    #[inline]
    pub(crate) fn row_words(&self, i: usize) -> &[u64] {
        self.bits.row(i)
    }

    #[inline]
    pub(crate) fn row_words_mut(&mut self, i: usize) -> &mut [u64] {
        self.bits.row_mut(i)
    }

    /// Word index holding column `j`.
    #[inline]
    pub(crate) fn word_of(&self, j: usize) -> usize {
        j * self.width / WORD_BITS
    }

    /// Entry `(i, j)`. Panics when out of bounds.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        assert!(i < self.nrows && j < self.ncols, "index ({i}, {j}) out of bounds");
        self.elem(i, j)
    }

    #[inline]
    pub(crate) fn elem(&self, i: usize, j: usize) -> Elem {
        let bit = j * self.width;
        let w = self.bits.row(i)[bit / WORD_BITS];
        ((w >> (bit % WORD_BITS)) as Elem) & self.ctx.elem_mask()
    }

    /// Sets entry `(i, j)`. Panics when out of bounds or `x` is not a field element.
    pub fn set(&mut self, i: usize, j: usize, x: Elem) {
        self.try_set(i, j, x).unwrap_or_else(|e| panic!("{e}"));
    }

    pub fn try_get(&self, i: usize, j: usize) -> Result<Elem> {
        self.check_index(i, j)?;
        Ok(self.elem(i, j))
    }

    pub fn try_set(&mut self, i: usize, j: usize, x: Elem) -> Result<()> {
        self.check_index(i, j)?;
        let x = self.ctx.check_elem(x as u32)?;
        self.put(i, j, x);
        Ok(())
    }

    #[inline]
    pub(crate) fn put(&mut self, i: usize, j: usize, x: Elem) {
        let bit = j * self.width;
        let sh = bit % WORD_BITS;
        let slot = ((1u64 << self.width) - 1) << sh;
        let w = &mut self.bits.row_mut(i)[bit / WORD_BITS];
        *w = (*w & !slot) | ((x as u64) << sh);
    }

    fn check_index(&self, i: usize, j: usize) -> Result<()> {
        if i >= self.nrows || j >= self.ncols {
            return Err(Error::IndexOutOfBounds {
                row: i,
                col: j,
                nrows: self.nrows,
                ncols: self.ncols,
            });
        }
        Ok(())
    }

    pub(crate) fn check_field(&self, other: &Self) -> Result<()> {
        if *self.ctx != *other.ctx {
            return Err(Error::FieldMismatch {
                left: self.ctx.modulus(),
                right: other.ctx.modulus(),
            });
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.bits.is_zero()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut c = self.clone();
        c.add_assign(other)?;
        Ok(c)
    }

    /// Entrywise sum; element boundaries play no role, so this is one XOR per word.
    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        self.check_field(other)?;
        self.bits.add_assign(&other.bits)
    }

    pub fn scalar_mul(&self, c: Elem) -> Result<Self> {
        let mut m = self.clone();
        m.scalar_mul_assign(c)?;
        Ok(m)
    }

    pub fn scalar_mul_assign(&mut self, c: Elem) -> Result<()> {
        let c = self.ctx.check_elem(c as u32)?;
        let scaler = RowScaler::new(&self.ctx, &self.layout(), c);
        for i in 0..self.nrows {
            scaler.scale_in_place(self.bits.row_mut(i));
        }
        Ok(())
    }

    pub fn row_swap(&mut self, i: usize, j: usize) -> Result<()> {
        self.bits.row_swap(i, j)
    }

    pub fn col_swap(&mut self, a: usize, b: usize) -> Result<()> {
        if a.max(b) >= self.ncols {
            return Err(Error::IndexOutOfBounds {
                row: 0,
                col: a.max(b),
                nrows: self.nrows,
                ncols: self.ncols,
            });
        }
        if a != b {
            for i in 0..self.nrows {
                let x = self.elem(i, a);
                let y = self.elem(i, b);
                self.put(i, a, y);
                self.put(i, b, x);
            }
        }
        Ok(())
    }

    pub fn copy_window(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Result<Self> {
        let w = self.width;
        Ok(Self {
            ctx: Arc::clone(&self.ctx),
            nrows: nr,
            ncols: nc,
            width: w,
            bits: self.bits.copy_window(r0, c0 * w, nr, nc * w)?,
        })
    }

    pub fn paste_window(&mut self, r0: usize, c0: usize, src: &Self) -> Result<()> {
        self.check_field(src)?;
        self.bits.paste_window(r0, c0 * self.width, &src.bits)
    }

    pub fn xor_window(&mut self, r0: usize, c0: usize, src: &Self) -> Result<()> {
        self.check_field(src)?;
        self.bits.xor_window(r0, c0 * self.width, &src.bits)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.ctx, self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                t.put(j, i, self.elem(i, j));
            }
        }
        t
    }
}

impl WinogradOperand for PackedMatrix {
    fn nrows(&self) -> usize {
        self.nrows
    }
    fn ncols(&self) -> usize {
        self.ncols
    }
    fn col_quantum(&self) -> usize {
        WORD_BITS / self.width
    }
    fn zeros_like(&self, nrows: usize, ncols: usize) -> Self {
        Self::zeros(&self.ctx, nrows, ncols)
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
        self.bits.add_assign(&other.bits).expect("same shape");
    }
}

impl fmt::Debug for PackedMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "PackedMatrix {}x{} over {:?}", self.nrows, self.ncols, self.ctx)?;
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for PackedMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.nrows {
            write!(f, "[")?;
            for j in 0..self.ncols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:x}", self.elem(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}
