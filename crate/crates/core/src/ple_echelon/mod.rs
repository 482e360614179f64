//! PLE decomposition, triangular solves and echelon forms built on top of
//! the asymptotically fast products.
//!
//! `ple` overwrites `A` (m x n, rank r) with a compressed form of
//! `P * A = L * E` where `L` is m x r lower triangular holding the pivots on
//! its diagonal and `E` is r x n in row echelon form with unit leading
//! entries. Columns `0..r` hold `L` on and below the diagonal. Row `s < r`
//! holds `E_s` to the right of the diagonal, except that the leading one at
//! column `q[s]` is implicit. `P` and `Q` are LAPACK-style permutation
//! vectors; `Q` lists the pivot columns.

pub mod perm;
mod trsm;

pub use perm::{apply_perm_cols, apply_perm_rows, Direction, PermVector};
pub use trsm::{trsm_lower_left, trsm_lower_left_unit, trsm_upper_left};

use crate::error::{Error, Result};
use crate::mat_gf2::WORD_BITS;
use crate::mat_packed::PackedMatrix;
use crate::newton_john::{self, trsm_lower_base};
use crate::poly_mul::addmul_auto;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PleFactors {
    /// Row transpositions: applying them forward to `A` yields `L * E`.
    pub p: PermVector,
    /// Pivot columns in its first `rank` entries, identity afterwards.
    pub q: PermVector,
    pub rank: usize,
}

impl PleFactors {
    pub fn pivot_columns(&self) -> &[usize] {
        &self.q.as_slice()[..self.rank]
    }

    fn check_shape(&self, a: &PackedMatrix) -> Result<()> {
        if self.p.len() != a.nrows().min(a.ncols()) || self.rank > self.p.len() {
            return Err(Error::DimensionMismatch(format!(
                "factors of rank {} do not fit a {}x{} matrix",
                self.rank,
                a.nrows(),
                a.ncols()
            )));
        }
        Ok(())
    }

    /// Extracts the m x r factor `L` from the compressed matrix.
    pub fn lower(&self, a: &PackedMatrix) -> Result<PackedMatrix> {
        self.check_shape(a)?;
        let r = self.rank;
        let mut l = a.copy_window(0, 0, a.nrows(), r)?;
        for i in 0..r {
            for j in i + 1..r {
                l.put(i, j, 0);
            }
        }
        Ok(l)
    }

    /// Extracts the r x n factor `E` from the compressed matrix.
    pub fn echelon(&self, a: &PackedMatrix) -> Result<PackedMatrix> {
        self.check_shape(a)?;
        let mut e = a.copy_window(0, 0, self.rank, a.ncols())?;
        for (s, &q) in self.pivot_columns().iter().enumerate() {
            let wq = e.word_of(q);
            let keep_from = slot_mask_from(&e, q);
            let row = e.row_words_mut(s);
            row[..wq].fill(0);
            row[wq] &= keep_from;
            e.put(s, q, 1);
        }
        Ok(e)
    }

    /// Rebuilds the original matrix as `P^-1 * L * E`.
    pub fn reconstruct(&self, a: &PackedMatrix) -> Result<PackedMatrix> {
        let mut lu = newton_john::nj_mul(&self.lower(a)?, &self.echelon(a)?)?;
        apply_perm_rows(&mut lu, &self.p, Direction::Backward)?;
        Ok(lu)
    }
}

/// Bits of the slots strictly after column `j` in the word holding it.
fn slot_mask_from(a: &PackedMatrix, j: usize) -> u64 {
    let end = (j % (WORD_BITS / a.width()) + 1) * a.width();
    if end >= WORD_BITS {
        0
    } else {
        !0u64 << end
    }
}

/// PLE decomposition in place, recursing on column halves while both
/// dimensions exceed `crossover` and using the Newton-John elimination below.
pub fn ple(a: &mut PackedMatrix, crossover: usize) -> PleFactors {
    let (m, n) = (a.nrows(), a.ncols());
    let (prow, pcol) = ple_rec(a, crossover.max(1));
    PleFactors::from_pivots(prow, pcol, m, n)
}

fn ple_rec(a: &mut PackedMatrix, crossover: usize) -> (Vec<usize>, Vec<usize>) {
    let (m, n) = (a.nrows(), a.ncols());
    let quantum = WORD_BITS / a.width();
    if m.min(n) <= crossover || n < 2 * quantum {
        let f = newton_john::nj_ple(a);
        let r = f.rank;
        return (f.p.as_slice()[..r].to_vec(), f.q.as_slice()[..r].to_vec());
    }

    let n1 = (n / 2) - (n / 2) % quantum;
    let n2 = n - n1;
    let mut left = a.copy_window(0, 0, m, n1).expect("window in bounds");
    let (prow1, pcol1) = ple_rec(&mut left, crossover);
    let r1 = prow1.len();

    let mut right = a.copy_window(0, n1, m, n2).expect("window in bounds");
    for (i, &p) in prow1.iter().enumerate() {
        right.row_swap(i, p).expect("rows in range");
    }

    let mut a12 = right.copy_window(0, 0, r1, n2).expect("window in bounds");
    let mut a22 = right.copy_window(r1, 0, m - r1, n2).expect("window in bounds");
    if r1 > 0 {
        let l11 = left.copy_window(0, 0, r1, r1).expect("window in bounds");
        if r1 <= crossover {
            trsm_lower_base(&l11, &mut a12, false);
        } else {
            trsm::lower_rec(&l11, &mut a12, false, crossover);
        }
        let l21 = left.copy_window(r1, 0, m - r1, r1).expect("window in bounds");
        addmul_auto(&mut a22, &l21, &a12, crossover);
    }

    let (prow2, pcol2) = ple_rec(&mut a22, crossover);
    let r2 = prow2.len();
    for (i, &p) in prow2.iter().enumerate() {
        left.row_swap(r1 + i, r1 + p).expect("rows in range");
    }

    a.paste_window(0, 0, &left).expect("window in bounds");
    a.paste_window(0, n1, &a12).expect("window in bounds");
    a.paste_window(r1, n1, &a22).expect("window in bounds");

    // The second block of L sits under columns n1.. and moves left next to
    // the first block.
    for c in 0..r2 {
        let (d, s) = (r1 + c, n1 + c);
        for k in d..m {
            let x = a.elem(k, s);
            let y = a.elem(k, d);
            a.put(k, d, x);
            a.put(k, s, y);
        }
    }

    let prow = prow1.into_iter().chain(prow2.into_iter().map(|p| r1 + p)).collect();
    let pcol = pcol1.into_iter().chain(pcol2.into_iter().map(|q| n1 + q)).collect();
    (prow, pcol)
}

/// Row echelon form in place via PLE. With `full` the result is the unique
/// reduced row echelon form. Returns the rank.
pub fn echelonize(a: &mut PackedMatrix, full: bool, crossover: usize) -> usize {
    let f = ple(a, crossover);
    let r = f.rank;
    let mut e = f.echelon(a).expect("factors match");
    if full && r > 0 {
        let n = a.ncols();
        apply_perm_cols(&mut e, &f.q, Direction::Forward).expect("factors match");
        let u = e.copy_window(0, 0, r, r).expect("window in bounds");
        let mut x = e.copy_window(0, r, r, n - r).expect("window in bounds");
        trsm::upper_rec(&u, &mut x, crossover.max(1));
        e = PackedMatrix::zeros(a.ctx(), r, n);
        for i in 0..r {
            e.put(i, i, 1);
        }
        e.paste_window(0, r, &x).expect("window in bounds");
        apply_perm_cols(&mut e, &f.q, Direction::Backward).expect("factors match");
    }
    *a = PackedMatrix::zeros(a.ctx(), a.nrows(), a.ncols());
    a.paste_window(0, 0, &e).expect("window in bounds");
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2e::FieldCtx;
    use crate::newton_john::{nj_gauss, nj_ple};
    use crate::rng::MatrixRng;
    use std::sync::Arc;

    fn field(e: u32) -> Arc<FieldCtx> {
        Arc::new(FieldCtx::new(e).unwrap())
    }

    /// A random m x n matrix of rank at most `r`.
    fn low_rank(k: &Arc<FieldCtx>, m: usize, n: usize, r: usize, rng: &mut MatrixRng) -> PackedMatrix {
        let x = PackedMatrix::random(k, m, r, rng);
        let y = PackedMatrix::random(k, r, n, rng);
        newton_john::nj_mul(&x, &y).unwrap()
    }

    #[test]
    fn nj_ple_reconstructs() {
        let mut rng = MatrixRng::new(61);
        for e in [2, 3, 5, 8, 10] {
            let k = field(e);
            for &(m, n, r) in &[(1, 1, 1), (5, 9, 3), (9, 5, 5), (40, 70, 40), (70, 40, 17), (33, 33, 0)] {
                let a = low_rank(&k, m, n, r, &mut rng);
                let mut c = a.clone();
                let f = nj_ple(&mut c);
                assert!(f.rank <= r);
                assert_eq!(f.reconstruct(&c).unwrap(), a, "e={e} {m}x{n}");
            }
        }
    }

    #[test]
    fn recursive_ple_is_bit_identical_to_base_case() {
        let mut rng = MatrixRng::new(62);
        for e in [2, 4, 6, 9] {
            let k = field(e);
            for &(m, n, r) in &[(100, 150, 100), (150, 100, 90), (130, 130, 61), (64, 200, 64), (7, 300, 7)] {
                let a = low_rank(&k, m, n, r, &mut rng);
                let mut want = a.clone();
                let fw = nj_ple(&mut want);
                for crossover in [1, 8, 40] {
                    let mut got = a.clone();
                    let f = ple(&mut got, crossover);
                    assert_eq!(f, fw, "e={e} {m}x{n} x={crossover}");
                    assert_eq!(got, want, "e={e} {m}x{n} x={crossover}");
                }
            }
        }
    }

    #[test]
    fn echelon_forms_match_gauss() {
        let mut rng = MatrixRng::new(63);
        for e in [2, 3, 7, 10] {
            let k = field(e);
            for &(m, n, r) in &[(60, 90, 60), (90, 60, 33), (75, 75, 75), (10, 130, 6)] {
                let a = low_rank(&k, m, n, r, &mut rng);
                for full in [false, true] {
                    let mut want = a.clone();
                    let rw = nj_gauss(&mut want, full);
                    for crossover in [3, 1000] {
                        let mut got = a.clone();
                        assert_eq!(echelonize(&mut got, full, crossover), rw);
                        assert_eq!(got, want, "e={e} {m}x{n} full={full} x={crossover}");
                    }
                }
            }
        }
    }

    #[test]
    fn factors_have_the_documented_shape() {
        let k = field(4);
        let mut rng = MatrixRng::new(64);
        let a = low_rank(&k, 20, 30, 12, &mut rng);
        let mut c = a.clone();
        let f = ple(&mut c, 4);
        let l = f.lower(&c).unwrap();
        let e = f.echelon(&c).unwrap();
        assert_eq!((l.nrows(), l.ncols()), (20, f.rank));
        assert_eq!((e.nrows(), e.ncols()), (f.rank, 30));
        for (s, &q) in f.pivot_columns().iter().enumerate() {
            assert_ne!(l.get(s, s), 0);
            assert_eq!(e.get(s, q), 1);
            assert!((0..q).all(|j| e.get(s, j) == 0));
            assert!((0..s).all(|j| l.get(j, s) == 0));
        }
        assert!(f.pivot_columns().windows(2).all(|w| w[0] < w[1]));
        assert!(f.lower(&PackedMatrix::zeros(&k, 3, 3)).is_err());
    }
}
