//! LAPACK-style permutation vectors.
//!
//! Entry `i` names the row (or column) that is swapped with `i` at step `i`;
//! steps run in ascending order, and running them in descending order undoes
//! them. `[0, 2, 2]` therefore swaps rows 1 and 2 and leaves row 0 alone.

use crate::error::{Error, Result};
use crate::mat_packed::PackedMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Apply swaps `0, 1, ..., len - 1`.
    Forward,
    /// Apply swaps `len - 1, ..., 0`, inverting `Forward`.
    Backward,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PermVector(Vec<usize>);

impl PermVector {
    pub fn identity(len: usize) -> Self {
        Self((0..len).collect())
    }

    /// Wraps raw entries, requiring `entries[i] >= i`.
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        for (i, &p) in entries.iter().enumerate() {
            if p < i {
                return Err(Error::InvalidPermutation {
                    index: i,
                    value: p,
                    len: entries.len(),
                    dim: usize::MAX,
                });
            }
        }
        Ok(Self(entries))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Checks the vector against a dimension it will permute.
    pub fn validate(&self, dim: usize) -> Result<()> {
        let len = self.0.len();
        if len > dim {
            return Err(Error::InvalidPermutation {
                index: dim,
                value: self.0[dim],
                len,
                dim,
            });
        }
        for (i, &p) in self.0.iter().enumerate() {
            if p < i || p >= dim {
                return Err(Error::InvalidPermutation {
                    index: i,
                    value: p,
                    len,
                    dim,
                });
            }
        }
        Ok(())
    }

    fn steps(&self, dir: Direction) -> Box<dyn Iterator<Item = (usize, usize)> + '_> {
        let it = self.0.iter().copied().enumerate();
        match dir {
            Direction::Forward => Box::new(it),
            Direction::Backward => Box::new(it.rev()),
        }
    }

    /// The permutation as an explicit map: `image[k]` is the original index
    /// that lands at position `k` after the forward swaps.
    pub fn to_images(&self, dim: usize) -> Vec<usize> {
        let mut image: Vec<usize> = (0..dim).collect();
        for (i, p) in self.steps(Direction::Forward) {
            image.swap(i, p);
        }
        image
    }
}

impl From<PermVector> for Vec<usize> {
    fn from(p: PermVector) -> Self {
        p.0
    }
}

pub fn apply_perm_rows(a: &mut PackedMatrix, p: &PermVector, dir: Direction) -> Result<()> {
    p.validate(a.nrows())?;
    for (i, t) in p.steps(dir) {
        a.row_swap(i, t)?;
    }
    Ok(())
}

pub fn apply_perm_cols(a: &mut PackedMatrix, q: &PermVector, dir: Direction) -> Result<()> {
    q.validate(a.ncols())?;
    for (i, t) in q.steps(dir) {
        a.col_swap(i, t)?;
    }
    Ok(())
}
