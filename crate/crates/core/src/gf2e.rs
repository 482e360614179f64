//! Arithmetic in GF(2^e) = GF(2)[x] / <f> for 2 <= e <= 10.
//!
//! An element is the integer whose bit `i` is the coefficient of `x^i`, so
//! `alpha` (the class of `x`) is `2` and addition is XOR. Products and
//! inverses come from tables built once per field; a [`FieldCtx`] is immutable
//! afterwards and can be shared freely between threads.

use crate::error::{Error, Result};

/// A field element, encoded as its coefficient vector.
pub type Elem = u16;

pub const MIN_DEGREE: u32 = 2;
pub const MAX_DEGREE: u32 = 10;

/// Default modulus per degree: the lowest-weight irreducible polynomial.
const DEFAULT_MODULI: [u32; 9] = [
    0b111,           // x^2 + x + 1
    0b1011,          // x^3 + x + 1
    0b1_0011,        // x^4 + x + 1
    0b10_0101,       // x^5 + x^2 + 1
    0b100_0011,      // x^6 + x + 1
    0b1000_0011,     // x^7 + x + 1
    0b1_0001_1101,   // x^8 + x^4 + x^3 + x^2 + 1
    0b10_0001_0001,  // x^9 + x^4 + 1
    0b100_0000_1001, // x^10 + x^3 + 1
];

/// Default modulus of degree `e`.
pub fn default_modulus(e: u32) -> Result<u32> {
    check_degree(e)?;
    Ok(DEFAULT_MODULI[(e - MIN_DEGREE) as usize])
}

fn check_degree(e: u32) -> Result<()> {
    if (MIN_DEGREE..=MAX_DEGREE).contains(&e) {
        Ok(())
    } else {
        Err(Error::InvalidDegree(e))
    }
}

fn degree_of(p: u32) -> Option<u32> {
    (p != 0).then(|| 31 - p.leading_zeros())
}

/// Carry-less product of two polynomials over GF(2).
pub(crate) fn clmul(a: u32, b: u32) -> u32 {
    let mut acc = 0;
    let mut a = a;
    let mut b = b;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a;
        }
        a <<= 1;
        b >>= 1;
    }
    acc
}

/// Remainder of `a` modulo the nonzero polynomial `m`.
pub(crate) fn poly_rem(mut a: u32, m: u32) -> u32 {
    let dm = degree_of(m).expect("modulus must be nonzero");
    while let Some(da) = degree_of(a) {
        if da < dm {
            break;
        }
        a ^= m << (da - dm);
    }
    a
}

/// Trial division by every polynomial of degree `1..=deg(f)/2`.
pub fn is_irreducible(f: u32) -> bool {
    let Some(d) = degree_of(f) else {
        return false;
    };
    if d == 0 {
        return false;
    }
    for dg in 1..=d / 2 {
        for g in (1u32 << dg)..(1u32 << (dg + 1)) {
            if poly_rem(f, g) == 0 {
                return false;
            }
        }
    }
    true
}

/// One finite field GF(2^e) together with its lookup tables.
#[derive(Clone)]
pub struct FieldCtx {
    degree: u32,
    modulus: u32,
    mul_table: Vec<Elem>,
    inv_table: Vec<Elem>,
    alpha_pow: Vec<Elem>,
}

impl std::fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldCtx")
            .field("degree", &self.degree)
            .field("modulus", &format_args!("{:#x}", self.modulus))
            .finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

impl FieldCtx {
    /// GF(2^e) with the default modulus for `e`.
    pub fn new(e: u32) -> Result<Self> {
        Self::with_modulus(e, default_modulus(e)?)
    }

    /// GF(2^e) modulo a caller-supplied polynomial, which must have degree
    /// `e` and be irreducible.
    pub fn with_modulus(e: u32, modulus: u32) -> Result<Self> {
        check_degree(e)?;
        if degree_of(modulus) != Some(e) {
            return Err(Error::PolynomialDegree {
                poly: modulus,
                degree: e,
            });
        }
        if !is_irreducible(modulus) {
            return Err(Error::Reducible(modulus));
        }

        let order = 1usize << e;
        let mut mul_table = vec![0; order * order];
        for a in 0..order {
            for b in a..order {
                let p = poly_rem(clmul(a as u32, b as u32), modulus) as Elem;
                mul_table[a * order + b] = p;
                mul_table[b * order + a] = p;
            }
        }

        let mut inv_table = vec![0; order];
        for a in 1..order {
            let row = &mul_table[a * order..(a + 1) * order];
            let inv = row.iter().position(|&p| p == 1).expect("field has no zero divisors");
            inv_table[a] = inv as Elem;
        }

        let mut alpha_pow = Vec::with_capacity(e as usize);
        let mut p: u32 = 1;
        for _ in 0..e {
            alpha_pow.push(p as Elem);
            p = poly_rem(p << 1, modulus);
        }

        Ok(Self {
            degree: e,
            modulus,
            mul_table,
            inv_table,
            alpha_pow,
        })
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// The modulus `f`, including its leading `x^e` term.
    #[inline]
    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Number of field elements, `2^e`.
    #[inline]
    pub fn order(&self) -> usize {
        1 << self.degree
    }

    /// Bit mask covering a reduced element.
    #[inline]
    pub fn elem_mask(&self) -> Elem {
        (self.order() - 1) as Elem
    }

    #[inline]
    pub fn contains(&self, a: Elem) -> bool {
        (a as usize) < self.order()
    }

    /// `alpha^k` for `0 <= k < e`.
    pub fn alpha_pow(&self, k: usize) -> Elem {
        self.alpha_pow[k]
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        debug_assert!(self.contains(a) && self.contains(b));
        self.mul_table[((a as usize) << self.degree) | b as usize]
    }

    /// The row of the multiplication table for `a`, indexed by the other factor.
    #[inline]
    pub fn mul_row(&self, a: Elem) -> &[Elem] {
        let order = self.order();
        &self.mul_table[a as usize * order..(a as usize + 1) * order]
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.inv_table[a as usize])
    }

    /// Whether `alpha` generates the multiplicative group.
    pub fn is_primitive(&self) -> bool {
        let group = self.order() - 1;
        let mut p: Elem = 2;
        for k in 1..=group {
            if p == 1 {
                return k == group;
            }
            p = self.mul(p, 2);
        }
        false
    }

    /// Checks an element value against the field size.
    pub fn check_elem(&self, a: u32) -> Result<Elem> {
        if (a as usize) < self.order() {
            Ok(a as Elem)
        } else {
            Err(Error::ElementOutOfRange {
                value: a,
                degree: self.degree,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_moduli_are_irreducible() {
        for e in MIN_DEGREE..=MAX_DEGREE {
            let f = default_modulus(e).unwrap();
            assert_eq!(degree_of(f), Some(e));
            assert!(is_irreducible(f), "x^{e} modulus {f:#x} reducible");
        }
    }

    #[test]
    fn default_moduli_are_primitive() {
        for e in MIN_DEGREE..=MAX_DEGREE {
            assert!(FieldCtx::new(e).unwrap().is_primitive(), "e = {e}");
        }
    }

    #[test]
    fn gf4_modulus_and_products() {
        let k = FieldCtx::new(2).unwrap();
        assert_eq!(k.modulus(), 0b111);
        assert_eq!(k.mul(2, 2), 3);
        assert_eq!(k.inv(2).unwrap(), 3);
        assert_eq!(k.inv(1).unwrap(), 1);
    }

    #[test]
    fn rejects_bad_degrees_and_moduli() {
        assert_eq!(FieldCtx::new(1).unwrap_err(), Error::InvalidDegree(1));
        assert_eq!(FieldCtx::new(11).unwrap_err(), Error::InvalidDegree(11));
        // x^4 + x^2 + 1 = (x^2 + x + 1)^2
        assert_eq!(FieldCtx::with_modulus(4, 0b10101).unwrap_err(), Error::Reducible(0b10101));
        assert!(matches!(
            FieldCtx::with_modulus(4, 0b111),
            Err(Error::PolynomialDegree { .. })
        ));
    }

    #[test]
    fn custom_modulus() {
        // x^8 + x^4 + x^3 + x + 1, the AES polynomial.
        let k = FieldCtx::with_modulus(8, 0x11b).unwrap();
        assert_eq!(k.mul(0x57, 0x83), 0xc1);
        assert!(!k.is_primitive());
    }

    #[test]
    fn inverse_of_zero_is_an_error() {
        let k = FieldCtx::new(5).unwrap();
        assert_eq!(k.inv(0), Err(Error::DivisionByZero));
    }

    #[test]
    fn check_elem_bounds() {
        let k = FieldCtx::new(3).unwrap();
        assert_eq!(k.check_elem(7).unwrap(), 7);
        assert!(k.check_elem(8).is_err());
    }
}
