//! Dense matrices over the binary extension fields GF(2^e), 2 <= e <= 10.
//!
//! Matrices are stored either packed (one entry per bit slot, several slots
//! per 64-bit word) or sliced (one GF(2) matrix per coefficient). Products
//! come in three flavours: Newton-John table multiplication, Strassen-Winograd
//! on top of it, and Karatsuba-style polynomial multiplication over slices.
//! Elimination is offered both as table-based Gaussian elimination and as a
//! recursive PLE decomposition.

pub mod error;
pub mod gf2e;
pub mod mat_gf2;
pub mod mat_packed;
pub mod mat_sliced;
pub mod newton_john;
pub mod ple_echelon;
pub mod poly_mul;
pub mod rng;
mod strassen;

pub use error::{Error, Result};
pub use gf2e::{default_modulus, Elem, FieldCtx};
pub use mat_gf2::{BitMatrix, Gf2Tuning, MulStrategy};
pub use mat_packed::PackedMatrix;
pub use mat_sliced::{cling, slice, SlicedMatrix};
pub use newton_john::{nj_gauss, nj_mul, nj_ple, NjTuning};
pub use ple_echelon::{echelonize, ple, PleFactors};
pub use poly_mul::{karatsuba_mul, strassen_nj_mul, MulCounters};
pub use rng::MatrixRng;
