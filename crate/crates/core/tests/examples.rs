//! Worked examples with hand-checkable answers.

mod common;

use common::{field, fmul, low_rank, Dense};
use gf2e::mat_packed::PackedMatrix;
use gf2e::newton_john::{cubic_mul, make_table, nj_gauss, nj_mul, nj_trsm_upper_left};
use gf2e::ple_echelon::{echelonize, ple, trsm_lower_left_unit, trsm_upper_left};
use gf2e::poly_mul::{karatsuba_mul_counted, reduce_mod_f, strassen_nj_mul};
use gf2e::{cling, slice, BitMatrix, FieldCtx, Gf2Tuning, MatrixRng, SlicedMatrix};

#[test]
fn small_field_facts() {
    let k4 = FieldCtx::new(2).unwrap();
    assert_eq!(k4.modulus(), 0b111);
    assert_eq!(k4.mul(2, 2), 3);
    assert_eq!(k4.inv(2).unwrap(), 3);
    let k8 = FieldCtx::new(3).unwrap();
    // alpha * alpha^2 = x^3 mod f
    assert_eq!(k8.mul(2, 4) as u32, common::fmul_longdiv(1 << 3, 1, k8.modulus()));
    for a in 0..8 {
        for b in 0..8 {
            assert_eq!(k8.mul(a, b) as u32, fmul(a as u32, b as u32, 3, k8.modulus()));
        }
    }
}

#[test]
fn custom_modulus_is_validated() {
    assert!(FieldCtx::with_modulus(4, 0b11111).is_ok());
    assert!(FieldCtx::with_modulus(4, 0b10101).is_err());
    let k = FieldCtx::with_modulus(8, 0x11b).unwrap();
    assert_eq!(k.mul(0x57, 0x83), 0xc1);
}

#[test]
fn gf4_table_rows() {
    let k = field(2);
    let b = PackedMatrix::from_rows(&k, &[[1, 2]]).unwrap();
    let t = make_table(&b).unwrap().to_matrix();
    assert_eq!(t.to_rows(), vec![vec![0, 0], vec![1, 2], vec![2, 3], vec![3, 1]]);
}

#[test]
fn gf4_karatsuba_uses_three_products() {
    let k = field(2);
    let mut rng = MatrixRng::new(1);
    let a = PackedMatrix::random(&k, 50, 60, &mut rng);
    let b = PackedMatrix::random(&k, 60, 70, &mut rng);
    let (c, counters) = karatsuba_mul_counted(&slice(&a), &slice(&b), &Gf2Tuning::default()).unwrap();
    assert_eq!(counters.gf2_products, 3);
    assert_eq!(cling(&c), nj_mul(&a, &b).unwrap());

    let z = SlicedMatrix::zeros(&k, 5, 5);
    let (c, _) = karatsuba_mul_counted(&z, &z, &Gf2Tuning::default()).unwrap();
    assert!(c.is_zero());
}

#[test]
fn gf4_reduction_formula() {
    let k = field(2);
    let mut rng = MatrixRng::new(2);
    let c: Vec<BitMatrix> = (0..3).map(|_| BitMatrix::random(9, 11, &mut rng)).collect();
    let mut folded = c.clone();
    reduce_mod_f(&mut folded, &k);
    assert_eq!(folded.len(), 2);
    assert_eq!(folded[0], c[0].add(&c[2]).unwrap());
    assert_eq!(folded[1], c[1].add(&c[2]).unwrap());

    let mut zero = vec![BitMatrix::zeros(3, 3); 3];
    reduce_mod_f(&mut zero, &k);
    assert!(zero.iter().all(BitMatrix::is_zero));
}

#[test]
fn gf8_reduction_matches_entrywise_polynomial_remainder() {
    let k = field(3);
    let mut rng = MatrixRng::new(3);
    let c: Vec<BitMatrix> = (0..5).map(|_| BitMatrix::random(6, 70, &mut rng)).collect();
    let mut folded = c.clone();
    reduce_mod_f(&mut folded, &k);
    for i in 0..6 {
        for j in 0..70 {
            let poly = (0..5).fold(0u32, |acc, d| acc | (c[d].get(i, j) as u32) << d);
            let want = common::fmul_longdiv(poly, 1, k.modulus());
            let got = (0..3).fold(0u32, |acc, d| acc | (folded[d].get(i, j) as u32) << d);
            assert_eq!(got, want);
        }
    }
}

#[test]
fn karatsuba_matches_nj_at_100() {
    let mut rng = MatrixRng::new(4);
    for e in 2..=8 {
        let k = field(e);
        let a = PackedMatrix::random(&k, 100, 100, &mut rng);
        let b = PackedMatrix::random(&k, 100, 100, &mut rng);
        let (c, _) = karatsuba_mul_counted(&slice(&a), &slice(&b), &Gf2Tuning::default()).unwrap();
        assert_eq!(cling(&c), nj_mul(&a, &b).unwrap(), "e={e}");
    }
}

#[test]
fn strassen_examples() {
    let k = field(3);
    let mut rng = MatrixRng::new(5);
    let a = PackedMatrix::random(&k, 300, 300, &mut rng);
    assert_eq!(strassen_nj_mul(&a, &PackedMatrix::identity(&k, 300), 64).unwrap(), a);
    assert_eq!(strassen_nj_mul(&a, &a, 10_000).unwrap(), nj_mul(&a, &a).unwrap());

    let a = PackedMatrix::random(&k, 257, 255, &mut rng);
    let b = PackedMatrix::random(&k, 255, 129, &mut rng);
    assert_eq!(strassen_nj_mul(&a, &b, 32).unwrap(), cubic_mul(&a, &b).unwrap());
}

#[test]
fn nj_gauss_gf8_matches_scalar_elimination() {
    let k = field(3);
    let mut rng = MatrixRng::new(6);
    let a = PackedMatrix::random(&k, 50, 60, &mut rng);
    for full in [false, true] {
        let mut oracle = Dense::from_packed(&a);
        let r = oracle.gauss(full);
        let mut g = a.clone();
        assert_eq!(nj_gauss(&mut g, full), r);
        assert_eq!(Dense::from_packed(&g), oracle);
    }
}

#[test]
fn nj_ple_gf4_reconstructs_both_orientations() {
    let k = field(2);
    let mut rng = MatrixRng::new(7);
    for (m, n) in [(30, 50), (50, 30)] {
        let a = PackedMatrix::random(&k, m, n, &mut rng);
        let mut c = a.clone();
        let f = gf2e::nj_ple(&mut c);
        assert_eq!(f.reconstruct(&c).unwrap(), a);
    }
}

#[test]
fn gf16_upper_solve() {
    let k = field(4);
    let mut rng = MatrixRng::new(8);
    let u = common::triangular(&k, 20, true, false, &mut rng);
    let b = PackedMatrix::random(&k, 20, 7, &mut rng);
    let mut x = b.clone();
    nj_trsm_upper_left(&u, &mut x).unwrap();
    assert_eq!(nj_mul(&u, &x).unwrap(), b);
}

#[test]
fn unit_lower_solves() {
    let k = field(3);
    let c = 5;
    let l = PackedMatrix::from_rows(&k, &[[1, 0], [c, 1]]).unwrap();
    let b = PackedMatrix::from_rows(&k, &[[3, 6, 1], [2, 7, 7]]).unwrap();
    let mut x = b.clone();
    trsm_lower_left_unit(&l, &mut x, 1).unwrap();
    for j in 0..3 {
        assert_eq!(x.get(1, j), b.get(1, j) ^ k.mul(c, b.get(0, j)));
    }

    let mut rng = MatrixRng::new(9);
    let l = common::triangular(&k, 64, false, true, &mut rng);
    let b = PackedMatrix::random(&k, 64, 64, &mut rng);
    let mut x = b.clone();
    trsm_lower_left_unit(&l, &mut x, 16).unwrap();
    assert_eq!(nj_mul(&l, &x).unwrap(), b);

    let mut i = b.clone();
    trsm_lower_left_unit(&PackedMatrix::identity(&k, 64), &mut i, 16).unwrap();
    assert_eq!(i, b);
}

#[test]
fn upper_solve_is_crossover_invariant_at_100() {
    let k = field(5);
    let mut rng = MatrixRng::new(10);
    let u = common::triangular(&k, 100, true, false, &mut rng);
    let b = PackedMatrix::random(&k, 100, 100, &mut rng);
    let mut want = b.clone();
    nj_trsm_upper_left(&u, &mut want).unwrap();
    for crossover in [1, 7, 32, 99, 100] {
        let mut x = b.clone();
        trsm_upper_left(&u, &mut x, crossover).unwrap();
        assert_eq!(x, want);
    }
}

#[test]
fn ple_gf4_rank_deficient_200_by_300() {
    let k = field(2);
    let mut rng = MatrixRng::new(11);
    let a = low_rank(&k, 200, 300, 150, &mut rng);
    let mut c = a.clone();
    let f = ple(&mut c, 64);
    assert_eq!(f.rank, 150);
    assert_eq!(f.rank, nj_gauss(&mut a.clone(), false));
    assert_eq!(f.reconstruct(&c).unwrap(), a);
}

#[test]
fn echelonize_trivial_inputs() {
    let k = field(6);
    let mut i = PackedMatrix::identity(&k, 70);
    assert_eq!(echelonize(&mut i, true, 16), 70);
    assert_eq!(i, PackedMatrix::identity(&k, 70));
    let mut z = PackedMatrix::zeros(&k, 40, 90);
    assert_eq!(echelonize(&mut z, false, 16), 0);
    assert!(z.is_zero());
}

#[test]
fn echelonize_500_matches_gauss_for_every_degree() {
    let mut rng = MatrixRng::new(12);
    for e in 2..=10 {
        let k = field(e);
        let a = PackedMatrix::random(&k, 500, 500, &mut rng);
        let mut want = a.clone();
        let r = nj_gauss(&mut want, true);
        let mut got = a;
        assert_eq!(echelonize(&mut got, true, 128), r);
        assert_eq!(got, want, "e={e}");
    }
}

