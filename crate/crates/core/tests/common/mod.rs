//! Slow, independent reference implementations used as test oracles.
//! Nothing here relies on the library's tables or kernels.

#![allow(dead_code)]

use std::sync::Arc;

use gf2e::{FieldCtx, MatrixRng, PackedMatrix};

/// Field multiplication by shift-and-add with reduction at every step.
pub fn fmul(a: u32, b: u32, e: u32, f: u32) -> u32 {
    let mut acc = 0;
    let mut a = a;
    for k in 0..e {
        if b >> k & 1 == 1 {
            acc ^= a;
        }
        a <<= 1;
        if a >> e & 1 == 1 {
            a ^= f;
        }
    }
    acc
}

/// Carry-less product followed by polynomial long division.
pub fn fmul_longdiv(a: u32, b: u32, f: u32) -> u32 {
    let mut p = 0u32;
    for k in 0..16 {
        if b >> k & 1 == 1 {
            p ^= a << k;
        }
    }
    let df = 31 - f.leading_zeros();
    while p != 0 && 31 - p.leading_zeros() >= df {
        p ^= f << (31 - p.leading_zeros() - df);
    }
    p
}

/// Inverse by exhaustive search.
pub fn finv(a: u32, e: u32, f: u32) -> Option<u32> {
    (1..1u32 << e).find(|&x| fmul(a, x, e, f) == 1)
}

/// Plain row-major matrix over GF(2^e).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dense {
    pub e: u32,
    pub f: u32,
    pub rows: Vec<Vec<u32>>,
}

impl Dense {
    pub fn zeros(e: u32, f: u32, m: usize, n: usize) -> Self {
        Self { e, f, rows: vec![vec![0; n]; m] }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn from_packed(a: &PackedMatrix) -> Self {
        let ctx = a.ctx();
        let rows = (0..a.nrows())
            .map(|i| (0..a.ncols()).map(|j| a.get(i, j) as u32).collect())
            .collect();
        Self { e: ctx.degree(), f: ctx.modulus(), rows }
    }

    pub fn to_packed(&self, ctx: &Arc<FieldCtx>) -> PackedMatrix {
        let mut a = PackedMatrix::zeros(ctx, self.nrows(), self.ncols());
        for (i, row) in self.rows.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                a.set(i, j, x as u16);
            }
        }
        a
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (m, l, n) = (self.nrows(), self.ncols(), other.ncols());
        assert_eq!(l, other.nrows());
        let mut c = Self::zeros(self.e, self.f, m, n);
        for i in 0..m {
            for j in 0..n {
                let mut acc = 0;
                for k in 0..l {
                    acc ^= fmul(self.rows[i][k], other.rows[k][j], self.e, self.f);
                }
                c.rows[i][j] = acc;
            }
        }
        c
    }

    pub fn transpose(&self) -> Self {
        let (m, n) = (self.nrows(), self.ncols());
        let rows = (0..n).map(|j| (0..m).map(|i| self.rows[i][j]).collect()).collect();
        Self { e: self.e, f: self.f, rows }
    }

    /// Scalar Gaussian elimination; pivots are the first nonzero entry found
    /// scanning rows top-down in the leftmost unfinished column. Returns the
    /// rank. With `full` entries above pivots are cleared too.
    pub fn gauss(&mut self, full: bool) -> usize {
        let (m, n) = (self.nrows(), self.ncols());
        let (e, f) = (self.e, self.f);
        let mut r = 0;
        for j in 0..n {
            if r == m {
                break;
            }
            let Some(i) = (r..m).find(|&i| self.rows[i][j] != 0) else {
                continue;
            };
            let inv = finv(self.rows[i][j], e, f).unwrap();
            for x in self.rows[i].iter_mut() {
                *x = fmul(*x, inv, e, f);
            }
            self.rows.swap(i, r);
            let pivot = self.rows[r].clone();
            for k in 0..m {
                if k == r || (!full && k < r) {
                    continue;
                }
                let c = self.rows[k][j];
                if c != 0 {
                    for (x, &p) in self.rows[k].iter_mut().zip(&pivot) {
                        *x ^= fmul(c, p, e, f);
                    }
                }
            }
            r += 1;
        }
        r
    }

    pub fn rank(&self) -> usize {
        self.clone().gauss(false)
    }
}

pub fn field(e: u32) -> Arc<FieldCtx> {
    Arc::new(FieldCtx::new(e).unwrap())
}

/// Random m x n matrix of rank at most `r`, as a product of random factors.
pub fn low_rank(k: &Arc<FieldCtx>, m: usize, n: usize, r: usize, rng: &mut MatrixRng) -> PackedMatrix {
    let x = PackedMatrix::random(k, m, r, rng);
    let y = PackedMatrix::random(k, r, n, rng);
    gf2e::nj_mul(&x, &y).unwrap()
}

/// Random triangular matrix with a nonzero (or unit) diagonal.
pub fn triangular(k: &Arc<FieldCtx>, n: usize, upper: bool, unit: bool, rng: &mut MatrixRng) -> PackedMatrix {
    let mut t = PackedMatrix::random(k, n, n, rng);
    for i in 0..n {
        for j in 0..n {
            if (upper && j < i) || (!upper && j > i) {
                t.set(i, j, 0);
            }
        }
        let d = if unit { 1 } else { 1 + rng.below(k.order() as u64 - 1) as u16 };
        t.set(i, i, d);
    }
    t
}

/// Dimensions that straddle word boundaries for every slot width.
pub const EDGE_DIMS: [usize; 9] = [1, 2, 5, 31, 32, 33, 63, 64, 65];
