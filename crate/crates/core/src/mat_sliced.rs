//! Sliced GF(2^e) matrices: a polynomial of degree < e whose coefficients are
//! GF(2) matrices. Slice `k` holds the `x^k` coefficient of every entry.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf2e::{Elem, FieldCtx};
use crate::mat_gf2::{BitMatrix, WORD_BITS};
use crate::mat_packed::PackedMatrix;
use crate::rng::MatrixRng;

#[derive(Clone, Debug)]
pub struct SlicedMatrix {
    ctx: Arc<FieldCtx>,
    nrows: usize,
    ncols: usize,
    slices: Vec<BitMatrix>,
}

impl PartialEq for SlicedMatrix {
    fn eq(&self, other: &Self) -> bool {
        *self.ctx == *other.ctx && self.slices == other.slices
    }
}

impl Eq for SlicedMatrix {}

impl SlicedMatrix {
    pub fn zeros(ctx: &Arc<FieldCtx>, nrows: usize, ncols: usize) -> Self {
        Self {
            ctx: Arc::clone(ctx),
            nrows,
            ncols,
            slices: (0..ctx.degree()).map(|_| BitMatrix::zeros(nrows, ncols)).collect(),
        }
    }

    /// Assembles a matrix from exactly `e` equally shaped slices.
    pub fn from_slices(ctx: &Arc<FieldCtx>, slices: Vec<BitMatrix>) -> Result<Self> {
        if slices.len() != ctx.degree() as usize {
            return Err(Error::DimensionMismatch(format!(
                "expected {} slices, got {}",
                ctx.degree(),
                slices.len()
            )));
        }
        let (nrows, ncols) = (slices[0].nrows(), slices[0].ncols());
        if slices.iter().any(|s| s.nrows() != nrows || s.ncols() != ncols) {
            return Err(Error::DimensionMismatch("slices differ in shape".into()));
        }
        Ok(Self {
            ctx: Arc::clone(ctx),
            nrows,
            ncols,
            slices,
        })
    }

    pub fn random(ctx: &Arc<FieldCtx>, nrows: usize, ncols: usize, rng: &mut MatrixRng) -> Self {
        let slices = (0..ctx.degree()).map(|_| BitMatrix::random(nrows, ncols, rng)).collect();
        Self::from_slices(ctx, slices).expect("shapes agree")
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn slices(&self) -> &[BitMatrix] {
        &self.slices
    }

    pub fn into_slices(self) -> Vec<BitMatrix> {
        self.slices
    }

    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.slices
            .iter()
            .enumerate()
            .fold(0, |acc, (k, s)| acc | ((s.get(i, j) as Elem) << k))
    }

    pub fn is_zero(&self) -> bool {
        self.slices.iter().all(BitMatrix::is_zero)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if *self.ctx != *other.ctx {
            return Err(Error::FieldMismatch {
                left: self.ctx.modulus(),
                right: other.ctx.modulus(),
            });
        }
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::DimensionMismatch(format!(
                "add: {}x{} vs {}x{}",
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
        self.check_compatible(other)?;
        for (a, b) in self.slices.iter_mut().zip(&other.slices) {
            a.add_assign(b)?;
        }
        Ok(())
    }

    /// Multiplies every entry by alpha: slices move up one degree and the
    /// slice pushed past `x^(e-1)` folds back along `f - x^e`.
    pub fn mul_by_alpha(&self) -> Self {
        let e = self.ctx.degree() as usize;
        let f = self.ctx.modulus();
        let overflow = &self.slices[e - 1];
        let mut out = Vec::with_capacity(e);
        for k in 0..e {
            let mut s = if k == 0 {
                BitMatrix::zeros(self.nrows, self.ncols)
            } else {
                self.slices[k - 1].clone()
            };
            if f >> k & 1 == 1 {
                s.add_assign(overflow).expect("same shape");
            }
            out.push(s);
        }
        Self {
            ctx: Arc::clone(&self.ctx),
            nrows: self.nrows,
            ncols: self.ncols,
            slices: out,
        }
    }
}

/// Splits a packed matrix into its coefficient slices.
pub fn slice(a: &PackedMatrix) -> SlicedMatrix {
    let ctx = a.ctx();
    let e = ctx.degree() as usize;
    let w = a.width();
    let per_word = WORD_BITS / w;
    let mut out = SlicedMatrix::zeros(ctx, a.nrows(), a.ncols());
    for i in 0..a.nrows() {
        let src = a.bits().row(i);
        for (k, s) in out.slices.iter_mut().enumerate().take(e) {
            let dst = s.row_mut(i);
            for (wi, &word) in src.iter().enumerate() {
                let bits = word >> k;
                if bits == 0 {
                    continue;
                }
                let mut acc = 0u64;
                for slot in 0..per_word {
                    acc |= ((bits >> (slot * w)) & 1) << slot;
                }
                let col = wi * per_word;
                dst[col / WORD_BITS] |= acc << (col % WORD_BITS);
            }
        }
    }
    out
}

/// Reassembles a packed matrix from its coefficient slices.
pub fn cling(a: &SlicedMatrix) -> PackedMatrix {
    let ctx = a.ctx();
    let mut out = PackedMatrix::zeros(ctx, a.nrows, a.ncols);
    let w = out.width();
    let per_word = WORD_BITS / w;
    let nwords = out.bits().stride();
    for i in 0..a.nrows {
        let dst = out.row_words_mut(i);
        for (k, s) in a.slices.iter().enumerate() {
            let src = s.row(i);
            for (wi, d) in dst.iter_mut().enumerate().take(nwords) {
                let col = wi * per_word;
                let bits = (src[col / WORD_BITS] >> (col % WORD_BITS)) & low_bits(per_word);
                if bits == 0 {
                    continue;
                }
                let mut acc = 0u64;
                for slot in 0..per_word {
                    acc |= ((bits >> slot) & 1) << (slot * w);
                }
                *d |= acc << k;
            }
        }
    }
    out
}

#[inline]
fn low_bits(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1 << n) - 1
    }
}

impl From<&PackedMatrix> for SlicedMatrix {
    fn from(a: &PackedMatrix) -> Self {
        slice(a)
    }
}

impl From<&SlicedMatrix> for PackedMatrix {
    fn from(a: &SlicedMatrix) -> Self {
        cling(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(e: u32) -> Arc<FieldCtx> {
        Arc::new(FieldCtx::new(e).unwrap())
    }

    #[test]
    fn three_bit_fixture_slices() {
        let k = field(3);
        let a = PackedMatrix::from_rows(&k, &[[5, 2], [3, 1]]).unwrap();
        let s = slice(&a);
        let want = [
            BitMatrix::from_rows(&[[1u8, 0], [1, 1]]).unwrap(),
            BitMatrix::from_rows(&[[0u8, 1], [1, 0]]).unwrap(),
            BitMatrix::from_rows(&[[1u8, 0], [0, 0]]).unwrap(),
        ];
        assert_eq!(s.slices(), &want);
        let back = SlicedMatrix::from_slices(&k, want.to_vec()).unwrap();
        assert_eq!(cling(&back), a);
    }

    #[test]
    fn zero_matrix_slices_to_zero() {
        let k = field(6);
        let s = slice(&PackedMatrix::zeros(&k, 3, 70));
        assert_eq!(s.slices().len(), 6);
        assert!(s.is_zero());
        assert!(cling(&s).is_zero());
    }

    #[test]
    fn slices_reconstruct_entries() {
        let k = field(2);
        let mut rng = MatrixRng::new(21);
        let a = PackedMatrix::random(&k, 65, 65, &mut rng);
        let s = slice(&a);
        for i in 0..65 {
            for j in 0..65 {
                let v = (s.slices()[0].get(i, j) as Elem) | (s.slices()[1].get(i, j) as Elem) << 1;
                assert_eq!(v, a.get(i, j));
            }
        }
    }

    #[test]
    fn round_trips_for_every_degree() {
        let mut rng = MatrixRng::new(22);
        for e in 2..=10 {
            let k = field(e);
            for &(m, n) in &[(1, 1), (3, 31), (7, 33), (2, 64), (5, 65), (4, 130)] {
                let a = PackedMatrix::random(&k, m, n, &mut rng);
                assert_eq!(cling(&slice(&a)), a);
                let b = SlicedMatrix::random(&k, m, n, &mut rng);
                assert_eq!(slice(&cling(&b)), b);
            }
        }
    }

    #[test]
    fn add_agrees_with_packed_add() {
        let k = field(5);
        let mut rng = MatrixRng::new(23);
        let a = PackedMatrix::random(&k, 9, 77, &mut rng);
        let b = PackedMatrix::random(&k, 9, 77, &mut rng);
        let sum = slice(&a).add(&slice(&b)).unwrap();
        assert_eq!(sum, slice(&a.add(&b).unwrap()));
        assert!(sum.add(&sum).unwrap().is_zero());
        assert!(sum.add(&SlicedMatrix::zeros(&k, 9, 76)).is_err());
    }

    #[test]
    fn alpha_scaling() {
        let k = field(2);
        let a = slice(&PackedMatrix::from_rows(&k, &[[2, 0, 1, 3]]).unwrap());
        assert_eq!(cling(&a.mul_by_alpha()).to_rows(), vec![vec![3, 0, 2, 1]]);

        let mut rng = MatrixRng::new(24);
        for e in 2..=10 {
            let k = field(e);
            let a = PackedMatrix::random(&k, 6, 40, &mut rng);
            assert_eq!(cling(&slice(&a).mul_by_alpha()), a.scalar_mul(2).unwrap());
        }
    }
}
