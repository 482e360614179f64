//! Multiplication of GF(2^e) matrices as polynomials with GF(2) matrix
//! coefficients, plus the Strassen-Winograd driver over packed matrices.
//!
//! A sliced product is a degree `2e - 2` polynomial product followed by
//! reduction modulo the field polynomial. The polynomial product follows a
//! fixed Karatsuba schedule: a list of bilinear terms, each multiplying one
//! sum of A-slices by the matching sum of B-slices and adding the result to a
//! set of output coefficients.

use crate::error::{Error, Result};
use crate::gf2e::FieldCtx;
use crate::mat_gf2::{BitMatrix, Gf2Tuning, MulStrategy};
use crate::mat_packed::PackedMatrix;
use crate::mat_sliced::{cling, slice, SlicedMatrix};
use crate::newton_john::{self, NjTuning};
use crate::strassen::winograd;

/// Work done by a sliced multiplication.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MulCounters {
    /// GF(2) matrix products.
    pub gf2_products: usize,
    /// GF(2) matrix additions, including those of the final reduction.
    pub gf2_additions: usize,
    /// Largest number of scratch matrices alive at once, not counting the
    /// `2e - 1` coefficient accumulators.
    pub temporaries_peak: usize,
}

/// One bilinear term: `(sum of A_i) * (sum of B_i)` over the coefficient
/// indices set in `inputs`, added to every coefficient set in `outputs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KaratsubaTerm {
    pub inputs: u32,
    pub outputs: u32,
}

/// The product schedule for polynomials with `k` coefficients.
pub fn karatsuba_schedule(k: usize) -> Vec<KaratsubaTerm> {
    assert!((1..=16).contains(&k), "schedule length {k} unsupported");
    let masks: Vec<u32> = (0..k).map(|i| 1 << i).collect();
    schedule_for(&masks)
}

fn schedule_for(inputs: &[u32]) -> Vec<KaratsubaTerm> {
    let k = inputs.len();
    let term = |inputs, outputs| KaratsubaTerm { inputs, outputs };
    match k {
        1 => vec![term(inputs[0], 1)],
        3 => {
            let [a0, a1, a2] = [inputs[0], inputs[1], inputs[2]];
            vec![
                term(a0, 0b00111),
                term(a1, 0b01110),
                term(a2, 0b11100),
                term(a0 ^ a1, 0b00010),
                term(a0 ^ a2, 0b00100),
                term(a1 ^ a2, 0b01000),
            ]
        }
        _ => {
            let lo = k / 2;
            let (low, high) = inputs.split_at(lo);
            let mixed: Vec<u32> = (0..high.len())
                .map(|i| high[i] ^ low.get(i).copied().unwrap_or(0))
                .collect();
            let mut out = Vec::new();
            for t in schedule_for(low) {
                out.push(term(t.inputs, t.outputs ^ (t.outputs << lo)));
            }
            for t in schedule_for(high) {
                out.push(term(t.inputs, (t.outputs << lo) ^ (t.outputs << (2 * lo))));
            }
            for t in schedule_for(&mixed) {
                out.push(term(t.inputs, t.outputs << lo));
            }
            out
        }
    }
}

/// Number of GF(2) products the schedule spends on GF(2^e).
pub fn count_products(e: u32) -> usize {
    karatsuba_schedule(e as usize).len()
}

/// Reduces the `2e - 1` coefficients of a polynomial product modulo the
/// field polynomial, in place, leaving the result in the first `e`.
/// Returns the number of matrix additions.
pub fn reduce_mod_f(coeffs: &mut Vec<BitMatrix>, ctx: &FieldCtx) -> usize {
    let e = ctx.degree() as usize;
    let f = ctx.modulus();
    let mut adds = 0;
    for d in (e..coeffs.len()).rev() {
        let (low, high) = coeffs.split_at_mut(d);
        for k in (0..e).filter(|k| f >> k & 1 == 1) {
            low[d - e + k].add_assign(&high[0]).expect("coefficients share a shape");
            adds += 1;
        }
    }
    coeffs.truncate(e);
    adds
}

fn check_sliced(a: &SlicedMatrix, b: &SlicedMatrix) -> Result<()> {
    if **a.ctx() != **b.ctx() {
        return Err(Error::FieldMismatch {
            left: a.ctx().modulus(),
            right: b.ctx().modulus(),
        });
    }
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

pub fn karatsuba_mul(a: &SlicedMatrix, b: &SlicedMatrix) -> Result<SlicedMatrix> {
    karatsuba_mul_counted(a, b, &Gf2Tuning::default()).map(|(c, _)| c)
}

/// Sliced product using the Karatsuba schedule; GF(2) products use
/// Strassen-Winograd above `tuning.strassen_crossover` and M4RM below.
pub fn karatsuba_mul_counted(
    a: &SlicedMatrix,
    b: &SlicedMatrix,
    tuning: &Gf2Tuning,
) -> Result<(SlicedMatrix, MulCounters)> {
    check_sliced(a, b)?;
    let ctx = a.ctx();
    let e = ctx.degree() as usize;
    let (m, n) = (a.nrows(), b.ncols());
    let mut counters = MulCounters::default();
    let mut coeffs: Vec<BitMatrix> = (0..2 * e - 1).map(|_| BitMatrix::zeros(m, n)).collect();

    for t in karatsuba_schedule(e) {
        let mut live = 0;
        let sum_a = combine(a.slices(), t.inputs, &mut counters, &mut live);
        let sum_b = combine(b.slices(), t.inputs, &mut counters, &mut live);
        let p = sum_a
            .as_ref()
            .mul_with(sum_b.as_ref(), MulStrategy::Auto, tuning)
            .expect("shapes checked");
        live += 1;
        counters.temporaries_peak = counters.temporaries_peak.max(live);
        counters.gf2_products += 1;
        for d in (0..2 * e - 1).filter(|d| t.outputs >> d & 1 == 1) {
            coeffs[d].add_assign(&p).expect("shapes checked");
            counters.gf2_additions += 1;
        }
    }
    counters.gf2_additions += reduce_mod_f(&mut coeffs, ctx);
    Ok((SlicedMatrix::from_slices(ctx, coeffs)?, counters))
}

enum Operand<'a> {
    Borrowed(&'a BitMatrix),
    Owned(BitMatrix),
}

impl AsRef<BitMatrix> for Operand<'_> {
    fn as_ref(&self) -> &BitMatrix {
        match self {
            Operand::Borrowed(m) => m,
            Operand::Owned(m) => m,
        }
    }
}

fn combine<'a>(
    slices: &'a [BitMatrix],
    mask: u32,
    counters: &mut MulCounters,
    live: &mut usize,
) -> Operand<'a> {
    let mut idx = (0..slices.len()).filter(|i| mask >> i & 1 == 1);
    let first = idx.next().expect("terms read at least one coefficient");
    let rest: Vec<usize> = idx.collect();
    if rest.is_empty() {
        return Operand::Borrowed(&slices[first]);
    }
    let mut s = slices[first].clone();
    for i in rest {
        s.add_assign(&slices[i]).expect("slices share a shape");
        counters.gf2_additions += 1;
    }
    *live += 1;
    Operand::Owned(s)
}

/// Karatsuba product of packed operands, converting to and from slices.
pub fn karatsuba_mul_packed(a: &PackedMatrix, b: &PackedMatrix) -> Result<PackedMatrix> {
    a.check_field(b)?;
    karatsuba_mul(&slice(a), &slice(b)).map(|c| cling(&c))
}

/// Default Strassen-Winograd crossover for packed matrices over GF(2^e):
/// the dimension at which a square operand occupies about 256 KiB.
pub fn default_crossover(e: u32) -> usize {
    let w = crate::mat_packed::pack_width(e).unwrap_or(16);
    (((1usize << 21) / w) as f64).sqrt().round() as usize
}

/// Strassen-Winograd over packed matrices with Newton-John base cases.
pub fn strassen_nj_mul(a: &PackedMatrix, b: &PackedMatrix, crossover: usize) -> Result<PackedMatrix> {
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
    let tuning = NjTuning::default();
    Ok(winograd(a, b, crossover.max(1), &mut |x: &PackedMatrix, y: &PackedMatrix| {
        let mut c = PackedMatrix::zeros(x.ctx(), x.nrows(), y.ncols());
        newton_john::addmul(&mut c, x, y, &tuning);
        c
    }))
}

/// `c += a * b` for already validated shapes, choosing the sliced Karatsuba
/// product when every dimension exceeds `crossover`.
pub(crate) fn addmul_auto(c: &mut PackedMatrix, a: &PackedMatrix, b: &PackedMatrix, crossover: usize) {
    if a.nrows().min(a.ncols()).min(b.ncols()) > crossover {
        let p = karatsuba_mul(&slice(a), &slice(b)).expect("shapes checked");
        c.add_assign(&cling(&p)).expect("shapes checked");
    } else {
        newton_john::addmul(c, a, b, &NjTuning::default());
    }
}
