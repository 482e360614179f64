//! Newton-John tables and the algorithms built on them.
//!
//! A Newton-John table for a packed row `B` holds `x * B` for every field
//! element `x`, indexed by the integer encoding of `x`. It costs `e` scaled
//! copies of `B` (by `alpha^0 .. alpha^(e-1)`) plus `2^e - 1` row XORs walked
//! in Gray-code order, after which every scalar-times-row in multiplication,
//! elimination and triangular solving becomes a table lookup and one XOR.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf2e::{Elem, FieldCtx};
use crate::mat_gf2::{gray_combinations, xor_into, WORD_BITS};
use crate::mat_packed::{PackedMatrix, RowScaler, SlotLayout};
use crate::ple_echelon::perm::PermVector;
use crate::ple_echelon::PleFactors;

/// Operation counts for table construction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TableCounts {
    /// Rows produced by multiplying the source row by a power of alpha.
    pub scalar_row_muls: usize,
    /// Row XORs spent combining those rows.
    pub row_additions: usize,
}

impl std::ops::AddAssign for TableCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.scalar_row_muls += rhs.scalar_row_muls;
        self.row_additions += rhs.row_additions;
    }
}

/// All `2^e` multiples of one packed row.
#[derive(Clone, Debug)]
pub struct NjTable {
    ctx: Arc<FieldCtx>,
    ncols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl NjTable {
    /// Packed words of `x * B`.
    pub fn row(&self, x: Elem) -> &[u64] {
        let x = x as usize;
        &self.data[x * self.stride..(x + 1) * self.stride]
    }

    /// The table as a `2^e x n` packed matrix.
    pub fn to_matrix(&self) -> PackedMatrix {
        let order = self.ctx.order();
        let mut m = PackedMatrix::zeros(&self.ctx, order, self.ncols);
        for x in 0..order {
            m.row_words_mut(x).copy_from_slice(self.row(x as Elem));
        }
        m
    }
}

/// Reusable scratch for table construction.
pub(crate) struct TableBuilder {
    layout: SlotLayout,
    alpha_rows: Vec<u64>,
    pub table: Vec<u64>,
    stride: usize,
}

impl TableBuilder {
    pub fn new(layout: SlotLayout) -> Self {
        Self {
            layout,
            alpha_rows: Vec::new(),
            table: Vec::new(),
            stride: 0,
        }
    }

    /// Fills `self.table` with the multiples of `src`.
    pub fn build(&mut self, src: &[u64]) -> TableCounts {
        let e = self.layout.degree as usize;
        let stride = src.len();
        self.stride = stride;
        self.alpha_rows.resize(e * stride, 0);
        self.table.resize(stride << e, 0);
        self.alpha_rows[..stride].copy_from_slice(src);
        for k in 1..e {
            self.alpha_rows.copy_within((k - 1) * stride..k * stride, k * stride);
            self.layout
                .times_alpha_row(&mut self.alpha_rows[k * stride..(k + 1) * stride]);
        }
        let rows: Vec<&[u64]> = self.alpha_rows.chunks_exact(stride.max(1)).take(e).collect();
        let adds = if stride == 0 {
            (1 << e) - 1
        } else {
            gray_combinations(&rows, stride, &mut self.table)
        };
        TableCounts {
            scalar_row_muls: e,
            row_additions: adds,
        }
    }

    #[inline]
    pub fn row(&self, x: Elem) -> &[u64] {
        let x = x as usize;
        &self.table[x * self.stride..(x + 1) * self.stride]
    }
}

pub fn make_table(b: &PackedMatrix) -> Result<NjTable> {
    make_table_counted(b).map(|(t, _)| t)
}

/// Builds the table for the single row `b`, reporting its operation counts.
pub fn make_table_counted(b: &PackedMatrix) -> Result<(NjTable, TableCounts)> {
    if b.nrows() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "make_table expects one row, got {}",
            b.nrows()
        )));
    }
    let mut builder = TableBuilder::new(b.layout());
    let counts = builder.build(b.row_words(0));
    let stride = b.bits().stride();
    Ok((
        NjTable {
            ctx: Arc::clone(b.ctx()),
            ncols: b.ncols(),
            stride,
            data: std::mem::take(&mut builder.table),
        },
        counts,
    ))
}

/// Tuning knobs for the table algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NjTuning {
    /// Tables applied together per pass over the target rows.
    pub tables: usize,
    /// Working-set budget for one column block of tables, in bytes.
    pub block_bytes: usize,
}

impl Default for NjTuning {
    fn default() -> Self {
        Self {
            tables: 1,
            block_bytes: 64 * 1024,
        }
    }
}

fn check_mul(a: &PackedMatrix, b: &PackedMatrix) -> Result<()> {
    a.check_field(b)?;
    if a.ncols() != b.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "mul: {}x{} by {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    Ok(())
}

/// Textbook product: every entry is a sum of `l` field products.
pub fn cubic_mul(a: &PackedMatrix, b: &PackedMatrix) -> Result<PackedMatrix> {
    check_mul(a, b)?;
    let ctx = a.ctx();
    let mut c = PackedMatrix::zeros(ctx, a.nrows(), b.ncols());
    for i in 0..a.nrows() {
        for j in 0..b.ncols() {
            let mut acc = 0;
            for k in 0..a.ncols() {
                acc ^= ctx.mul(a.elem(i, k), b.elem(k, j));
            }
            c.put(i, j, acc);
        }
    }
    Ok(c)
}

pub fn nj_mul(a: &PackedMatrix, b: &PackedMatrix) -> Result<PackedMatrix> {
    nj_mul_with(a, b, &NjTuning::default())
}

pub fn nj_mul_with(a: &PackedMatrix, b: &PackedMatrix, tuning: &NjTuning) -> Result<PackedMatrix> {
    check_mul(a, b)?;
    let mut c = PackedMatrix::zeros(a.ctx(), a.nrows(), b.ncols());
    addmul(&mut c, a, b, tuning);
    Ok(c)
}

/// `c += a * b` with one table per row of `b` (shapes already checked).
pub(crate) fn addmul(c: &mut PackedMatrix, a: &PackedMatrix, b: &PackedMatrix, tuning: &NjTuning) {
    let stride = b.bits().stride();
    if stride == 0 || a.nrows() == 0 {
        return;
    }
    let order = a.ctx().order();
    let ntables = tuning.tables.max(1);
    let chunk = (tuning.block_bytes / (8 * ntables * order)).max(1);
    let mut builders: Vec<TableBuilder> =
        (0..ntables).map(|_| TableBuilder::new(a.layout())).collect();
    let mut xs = vec![0 as Elem; ntables];

    let mut w0 = 0;
    while w0 < stride {
        let w1 = (w0 + chunk).min(stride);
        let mut i0 = 0;
        while i0 < a.ncols() {
            let used = ntables.min(a.ncols() - i0);
            for (s, builder) in builders.iter_mut().enumerate().take(used) {
                builder.build(&b.row_words(i0 + s)[w0..w1]);
            }
            for j in 0..a.nrows() {
                let mut any = false;
                for (s, x) in xs.iter_mut().enumerate().take(used) {
                    *x = a.elem(j, i0 + s);
                    any |= *x != 0;
                }
                if !any {
                    continue;
                }
                let dst = &mut c.row_words_mut(j)[w0..w1];
                for s in 0..used {
                    if xs[s] != 0 {
                        xor_into(dst, builders[s].row(xs[s]));
                    }
                }
            }
            i0 += used;
        }
        w0 = w1;
    }
}

/// Bits of every slot at or below column `j` within the word holding `j`.
fn slots_through(layout: &SlotLayout, j: usize) -> u64 {
    let end = (j % layout.per_word() + 1) * layout.width;
    if end >= WORD_BITS {
        u64::MAX
    } else {
        (1u64 << end) - 1
    }
}

pub fn nj_gauss(a: &mut PackedMatrix, full: bool) -> usize {
    nj_gauss_with(a, full, &NjTuning::default())
}

/// Gaussian elimination with Newton-John tables, in place. Returns the rank.
///
/// With `full` the result is the reduced row echelon form; otherwise only
/// entries below the pivots are cleared. Pivots are the first nonzero entry
/// found scanning rows top-down in the leftmost unfinished column. With more
/// than one table, up to `tables` pivots are collected (and reduced against
/// each other) before a single combined pass updates the remaining rows.
pub fn nj_gauss_with(a: &mut PackedMatrix, full: bool, tuning: &NjTuning) -> usize {
    let ctx = Arc::clone(a.ctx());
    let layout = a.layout();
    let (m, n) = (a.nrows(), a.ncols());
    let ntables = tuning.tables.max(1);
    let mut builders: Vec<TableBuilder> = (0..ntables).map(|_| TableBuilder::new(layout)).collect();
    let mut pivots: Vec<usize> = Vec::with_capacity(ntables);
    let mut xs = vec![0 as Elem; ntables];

    let mut r = 0;
    let mut col = 0;
    while col < n && r < m {
        pivots.clear();
        while pivots.len() < ntables && col < n && r + pivots.len() < m {
            let s = pivots.len();
            let c = col;
            col += 1;
            let found = (r + s..m).find(|&i| {
                let mut v = a.elem(i, c);
                for (t, &pc) in pivots.iter().enumerate() {
                    let x = a.elem(i, pc);
                    if x != 0 {
                        v ^= ctx.mul(x, a.elem(r + t, c));
                    }
                }
                v != 0
            });
            let Some(i) = found else { continue };

            // Entries left of the block's first pivot are already zero.
            let wc = a.word_of(pivots.first().copied().unwrap_or(c));
            for (t, &pc) in pivots.iter().enumerate() {
                let x = a.elem(i, pc);
                if x != 0 {
                    let scaler = RowScaler::new(&ctx, &layout, x);
                    let (dst, src) = a.bits_mut().rows_pair_mut(i, r + t);
                    scaler.add_scaled(&mut dst[wc..], &src[wc..]);
                }
            }
            let inv = ctx.inv(a.elem(i, c)).expect("pivot is nonzero");
            RowScaler::new(&ctx, &layout, inv).scale_in_place(&mut a.row_words_mut(i)[wc..]);
            a.row_swap(i, r + s).expect("rows in range");
            for t in 0..s {
                let y = a.elem(r + t, c);
                if y != 0 {
                    let scaler = RowScaler::new(&ctx, &layout, y);
                    let (dst, src) = a.bits_mut().rows_pair_mut(r + t, r + s);
                    scaler.add_scaled(&mut dst[wc..], &src[wc..]);
                }
            }
            pivots.push(c);
        }
        if pivots.is_empty() {
            break;
        }

        let used = pivots.len();
        let w0 = a.word_of(pivots[0]);
        for (t, builder) in builders.iter_mut().enumerate().take(used) {
            builder.build(&a.row_words(r + t)[w0..]);
        }
        let rows = if full { 0..m } else { r + used..m };
        for k in rows {
            if (r..r + used).contains(&k) {
                continue;
            }
            let mut any = false;
            for (t, x) in xs.iter_mut().enumerate().take(used) {
                *x = a.elem(k, pivots[t]);
                any |= *x != 0;
            }
            if !any {
                continue;
            }
            let dst = &mut a.row_words_mut(k)[w0..];
            for t in 0..used {
                if xs[t] != 0 {
                    xor_into(dst, builders[t].row(xs[t]));
                }
            }
        }
        r += used;
    }
    r
}

/// In-place PLE decomposition with Newton-John tables.
///
/// On return the first `rank` columns hold `L` on and below the diagonal,
/// its diagonal being the pivots. Row `s < rank` holds `E` to the right of
/// the diagonal, with the unit leading entry at column `q[s]` left implicit
/// (stored as zero when `q[s] > s`).
pub fn nj_ple(a: &mut PackedMatrix) -> PleFactors {
    let ctx = Arc::clone(a.ctx());
    let layout = a.layout();
    let (m, n) = (a.nrows(), a.ncols());
    let mut builder = TableBuilder::new(layout);
    let mut prow = Vec::new();
    let mut pcol = Vec::new();
    let mut scratch = Vec::new();

    let mut r = 0;
    for j in 0..n {
        if r == m {
            break;
        }
        let Some(i) = (r..m).find(|&i| a.elem(i, j) != 0) else {
            continue;
        };
        let wj = a.word_of(j);
        let keep = slots_through(&layout, j);

        let inv = ctx.inv(a.elem(i, j)).expect("pivot is nonzero");
        let row = &mut a.row_words_mut(i)[wj..];
        let first = row[0];
        RowScaler::new(&ctx, &layout, inv).scale_in_place(row);
        row[0] = (row[0] & !keep) | (first & keep);

        a.row_swap(i, r).expect("rows in range");
        prow.push(i);
        pcol.push(j);

        scratch.clear();
        scratch.extend_from_slice(&a.row_words(r)[wj..]);
        scratch[0] &= !keep;
        builder.build(&scratch);
        for k in r + 1..m {
            let x = a.elem(k, j);
            if x != 0 {
                xor_into(&mut a.row_words_mut(k)[wj..], builder.row(x));
            }
        }
        r += 1;
    }

    compress_lower(a, &pcol, 0);
    PleFactors::from_pivots(prow, pcol, m, n)
}

/// Moves the column of `L` stored under pivot column `pcol[s]` to column
/// `offset + s`, for rows at or below the diagonal of that column.
pub(crate) fn compress_lower(a: &mut PackedMatrix, pcol: &[usize], offset: usize) {
    for (s, &q) in pcol.iter().enumerate() {
        let d = offset + s;
        if d == q {
            continue;
        }
        for k in d..a.nrows() {
            let x = a.elem(k, d);
            let y = a.elem(k, q);
            a.put(k, d, y);
            a.put(k, q, x);
        }
    }
}

fn check_triangular_system(t: &PackedMatrix, b: &PackedMatrix) -> Result<()> {
    t.check_field(b)?;
    if t.nrows() != t.ncols() || t.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "triangular solve: {}x{} against {}x{}",
            t.nrows(),
            t.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    Ok(())
}

pub(crate) fn check_diagonal(t: &PackedMatrix) -> Result<()> {
    match (0..t.nrows()).find(|&i| t.elem(i, i) == 0) {
        Some(index) => Err(Error::Singular { index }),
        None => Ok(()),
    }
}

/// Solves `U * X = B` for upper triangular `U`, overwriting `B` with `X`.
/// Only the upper triangle of `u` (diagonal included) is read.
pub fn nj_trsm_upper_left(u: &PackedMatrix, b: &mut PackedMatrix) -> Result<()> {
    check_triangular_system(u, b)?;
    check_diagonal(u)?;
    trsm_upper_base(u, b);
    Ok(())
}

pub(crate) fn trsm_upper_base(u: &PackedMatrix, b: &mut PackedMatrix) {
    let ctx = Arc::clone(u.ctx());
    let layout = b.layout();
    let mut builder = TableBuilder::new(layout);
    for i in (0..u.nrows()).rev() {
        let inv = ctx.inv(u.elem(i, i)).expect("diagonal checked");
        RowScaler::new(&ctx, &layout, inv).scale_in_place(b.row_words_mut(i));
        if i == 0 {
            break;
        }
        builder.build(b.row_words(i));
        for j in 0..i {
            let x = u.elem(j, i);
            if x != 0 {
                xor_into(b.row_words_mut(j), builder.row(x));
            }
        }
    }
}

/// Solves `L * X = B` for lower triangular `L`, overwriting `B` with `X`.
/// Only the lower triangle of `l` is read; with `unit` its diagonal is
/// taken to be all ones and not read either.
pub fn nj_trsm_lower_left(l: &PackedMatrix, b: &mut PackedMatrix, unit: bool) -> Result<()> {
    check_triangular_system(l, b)?;
    if !unit {
        check_diagonal(l)?;
    }
    trsm_lower_base(l, b, unit);
    Ok(())
}

pub(crate) fn trsm_lower_base(l: &PackedMatrix, b: &mut PackedMatrix, unit: bool) {
    let ctx = Arc::clone(l.ctx());
    let layout = b.layout();
    let mut builder = TableBuilder::new(layout);
    let m = l.nrows();
    for i in 0..m {
        if !unit {
            let inv = ctx.inv(l.elem(i, i)).expect("diagonal checked");
            RowScaler::new(&ctx, &layout, inv).scale_in_place(b.row_words_mut(i));
        }
        if i + 1 == m {
            break;
        }
        builder.build(b.row_words(i));
        for j in i + 1..m {
            let x = l.elem(j, i);
            if x != 0 {
                xor_into(b.row_words_mut(j), builder.row(x));
            }
        }
    }
}

impl PleFactors {
    pub(crate) fn from_pivots(prow: Vec<usize>, pcol: Vec<usize>, m: usize, n: usize) -> Self {
        let rank = prow.len();
        let len = m.min(n);
        let mut p: Vec<usize> = (0..len).collect();
        let mut q: Vec<usize> = (0..len).collect();
        p[..rank].copy_from_slice(&prow);
        q[..rank].copy_from_slice(&pcol);
        Self {
            p: PermVector::new(p).expect("pivot rows are chosen at or below the diagonal"),
            q: PermVector::new(q).expect("pivot columns increase"),
            rank,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::MatrixRng;

    fn field(e: u32) -> Arc<FieldCtx> {
        Arc::new(FieldCtx::new(e).unwrap())
    }

    #[test]
    fn table_of_zero_row_is_zero() {
        let k = field(4);
        let t = make_table(&PackedMatrix::zeros(&k, 1, 9)).unwrap();
        assert!(t.to_matrix().is_zero());
    }

    #[test]
    fn gf4_table() {
        let k = field(2);
        let b = PackedMatrix::from_rows(&k, &[[1, 2]]).unwrap();
        let t = make_table(&b).unwrap().to_matrix();
        assert_eq!(t.to_rows(), vec![vec![0, 0], vec![1, 2], vec![2, 3], vec![3, 1]]);
    }

    #[test]
    fn table_rows_are_scalar_multiples() {
        let mut rng = MatrixRng::new(31);
        for e in 2..=10 {
            let k = field(e);
            let b = PackedMatrix::random(&k, 1, 45, &mut rng);
            let (t, counts) = make_table_counted(&b).unwrap();
            assert_eq!(counts.scalar_row_muls, e as usize);
            assert_eq!(counts.row_additions, (1 << e) - 1);
            let t = t.to_matrix();
            for x in 0..k.order() {
                let want = b.scalar_mul(x as Elem).unwrap();
                assert_eq!(t.copy_window(x, 0, 1, 45).unwrap(), want, "e={e} x={x}");
            }
        }
        assert!(make_table(&PackedMatrix::zeros(&field(2), 2, 2)).is_err());
    }

    #[test]
    fn one_by_one_products_exhaustive() {
        for e in 2..=4 {
            let k = field(e);
            for x in 0..k.order() as Elem {
                for y in 0..k.order() as Elem {
                    let a = PackedMatrix::from_rows(&k, &[[x]]).unwrap();
                    let b = PackedMatrix::from_rows(&k, &[[y]]).unwrap();
                    assert_eq!(nj_mul(&a, &b).unwrap().get(0, 0), k.mul(x, y));
                }
            }
        }
    }

    #[test]
    fn identity_products() {
        let k = field(6);
        let mut rng = MatrixRng::new(32);
        let a = PackedMatrix::random(&k, 13, 21, &mut rng);
        assert_eq!(nj_mul(&a, &PackedMatrix::identity(&k, 21)).unwrap(), a);
        assert_eq!(nj_mul(&PackedMatrix::identity(&k, 13), &a).unwrap(), a);
        assert!(nj_mul(&a, &a).is_err());
    }

    #[test]
    fn nj_mul_matches_cubic_for_all_tunings() {
        let mut rng = MatrixRng::new(33);
        for e in 2..=10 {
            let k = field(e);
            let a = PackedMatrix::random(&k, 40, 33, &mut rng);
            let b = PackedMatrix::random(&k, 33, 27, &mut rng);
            let want = cubic_mul(&a, &b).unwrap();
            for tuning in [
                NjTuning::default(),
                NjTuning { tables: 3, block_bytes: 64 * 1024 },
                NjTuning { tables: 8, block_bytes: 1 },
            ] {
                assert_eq!(nj_mul_with(&a, &b, &tuning).unwrap(), want, "e={e} {tuning:?}");
            }
        }
    }

    #[test]
    fn gauss_on_identity_and_zero() {
        let k = field(3);
        let mut i = PackedMatrix::identity(&k, 7);
        assert_eq!(nj_gauss(&mut i, true), 7);
        assert_eq!(i, PackedMatrix::identity(&k, 7));
        let mut z = PackedMatrix::zeros(&k, 4, 9);
        assert_eq!(nj_gauss(&mut z, false), 0);
        assert!(z.is_zero());
    }

    #[test]
    fn gauss_is_idempotent_and_table_count_invariant() {
        let mut rng = MatrixRng::new(34);
        for e in [2, 5, 9] {
            let k = field(e);
            let a = PackedMatrix::random(&k, 30, 45, &mut rng);
            let mut one = a.clone();
            let r1 = nj_gauss(&mut one, true);
            let mut many = a.clone();
            let r6 = nj_gauss_with(&mut many, true, &NjTuning { tables: 6, ..NjTuning::default() });
            assert_eq!((r1, &one), (r6, &many));
            let mut again = one.clone();
            assert_eq!(nj_gauss(&mut again, true), r1);
            assert_eq!(again, one);
        }
    }

    #[test]
    fn ple_of_identity_is_trivial() {
        let k = field(4);
        let mut a = PackedMatrix::identity(&k, 5);
        let f = nj_ple(&mut a);
        assert_eq!(f.rank, 5);
        assert_eq!(f.p, PermVector::identity(5));
        assert_eq!(f.q, PermVector::identity(5));
        assert_eq!(a, PackedMatrix::identity(&k, 5));
    }

    #[test]
    fn ple_of_zero_leaves_matrix_alone() {
        let k = field(4);
        let mut a = PackedMatrix::zeros(&k, 3, 6);
        let f = nj_ple(&mut a);
        assert_eq!(f.rank, 0);
        assert!(a.is_zero());
    }

    #[test]
    fn trsm_small_cases() {
        let k = field(4);
        let mut rng = MatrixRng::new(35);
        let b = PackedMatrix::random(&k, 6, 5, &mut rng);
        let mut x = b.clone();
        nj_trsm_upper_left(&PackedMatrix::identity(&k, 6), &mut x).unwrap();
        assert_eq!(x, b);

        let u = PackedMatrix::from_rows(&k, &[[7]]).unwrap();
        let mut x = PackedMatrix::from_rows(&k, &[[9, 1]]).unwrap();
        nj_trsm_upper_left(&u, &mut x).unwrap();
        let inv = k.inv(7).unwrap();
        assert_eq!(x.to_rows(), vec![vec![k.mul(inv, 9), inv]]);
    }

    #[test]
    fn trsm_reports_singular_index() {
        let k = field(3);
        let mut u = PackedMatrix::identity(&k, 4);
        u.set(2, 2, 0);
        let mut b = PackedMatrix::zeros(&k, 4, 2);
        assert_eq!(nj_trsm_upper_left(&u, &mut b), Err(Error::Singular { index: 2 }));
        assert_eq!(nj_trsm_lower_left(&u, &mut b, false), Err(Error::Singular { index: 2 }));
        assert!(nj_trsm_lower_left(&u, &mut b, true).is_ok());
    }
}
