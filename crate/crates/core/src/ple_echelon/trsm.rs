//! Recursive triangular solves with a Newton-John base case.

use crate::error::Result;
use crate::mat_packed::PackedMatrix;
use crate::newton_john::{check_diagonal, trsm_lower_base, trsm_upper_base};
use crate::poly_mul::addmul_auto;

fn check_system(t: &PackedMatrix, b: &PackedMatrix) -> Result<()> {
    t.check_field(b)?;
    if t.nrows() != t.ncols() || t.nrows() != b.nrows() {
        return Err(crate::error::Error::DimensionMismatch(format!(
            "triangular solve: {}x{} against {}x{}",
            t.nrows(),
            t.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    Ok(())
}

/// Solves `L * X = B` in place. Only the lower triangle of `l` is read, and
/// with `unit` its diagonal is taken to be all ones.
pub fn trsm_lower_left(l: &PackedMatrix, b: &mut PackedMatrix, unit: bool, crossover: usize) -> Result<()> {
    check_system(l, b)?;
    if !unit {
        check_diagonal(l)?;
    }
    lower_rec(l, b, unit, crossover.max(1));
    Ok(())
}

/// Solves `L * X = B` in place for unit lower triangular `L`.
pub fn trsm_lower_left_unit(l: &PackedMatrix, b: &mut PackedMatrix, crossover: usize) -> Result<()> {
    trsm_lower_left(l, b, true, crossover)
}

/// Solves `U * X = B` in place. Only the upper triangle of `u` is read.
pub fn trsm_upper_left(u: &PackedMatrix, b: &mut PackedMatrix, crossover: usize) -> Result<()> {
    check_system(u, b)?;
    check_diagonal(u)?;
    upper_rec(u, b, crossover.max(1));
    Ok(())
}

fn split_point(m: &PackedMatrix, n: usize) -> usize {
    let q = crate::mat_gf2::WORD_BITS / m.width();
    let half = n / 2;
    if half >= q {
        half - half % q
    } else {
        half
    }
}

pub(crate) fn lower_rec(l: &PackedMatrix, b: &mut PackedMatrix, unit: bool, crossover: usize) {
    let m = l.nrows();
    if m <= crossover || m < 2 {
        trsm_lower_base(l, b, unit);
        return;
    }
    let h = split_point(l, m);
    let n = b.ncols();
    let w = |r0, c0, nr, nc| l.copy_window(r0, c0, nr, nc).expect("window in bounds");
    let l11 = w(0, 0, h, h);
    let l21 = w(h, 0, m - h, h);
    let l22 = w(h, h, m - h, m - h);
    let mut b1 = b.copy_window(0, 0, h, n).expect("window in bounds");
    let mut b2 = b.copy_window(h, 0, m - h, n).expect("window in bounds");
    lower_rec(&l11, &mut b1, unit, crossover);
    addmul_auto(&mut b2, &l21, &b1, crossover);
    lower_rec(&l22, &mut b2, unit, crossover);
    b.paste_window(0, 0, &b1).expect("window in bounds");
    b.paste_window(h, 0, &b2).expect("window in bounds");
}

pub(crate) fn upper_rec(u: &PackedMatrix, b: &mut PackedMatrix, crossover: usize) {
    let m = u.nrows();
    if m <= crossover || m < 2 {
        trsm_upper_base(u, b);
        return;
    }
    let h = split_point(u, m);
    let n = b.ncols();
    let w = |r0, c0, nr, nc| u.copy_window(r0, c0, nr, nc).expect("window in bounds");
    let u11 = w(0, 0, h, h);
    let u12 = w(0, h, h, m - h);
    let u22 = w(h, h, m - h, m - h);
    let mut b1 = b.copy_window(0, 0, h, n).expect("window in bounds");
    let mut b2 = b.copy_window(h, 0, m - h, n).expect("window in bounds");
    upper_rec(&u22, &mut b2, crossover);
    addmul_auto(&mut b1, &u12, &b2, crossover);
    upper_rec(&u11, &mut b1, crossover);
    b.paste_window(0, 0, &b1).expect("window in bounds");
    b.paste_window(h, 0, &b2).expect("window in bounds");
}
