//! Block matrices with uniformly sized blocks and their strong Kronecker
//! product, the composition rule for QTT core matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// A `grid_rows x grid_cols` arrangement of equally sized dense blocks.
///
/// Core matrices are the special case of `2 x 2` (matrix cores) or `2 x 1`
/// (vector cores) blocks; accumulated partial products grow the block size.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    grid_rows: usize,
    grid_cols: usize,
    block_rows: usize,
    block_cols: usize,
    data: DMatrix<Complex64>,
}

impl BlockMatrix {
    pub fn new(grid_rows: usize, grid_cols: usize, block_rows: usize, block_cols: usize) -> Self {
        Self {
            grid_rows,
            grid_cols,
            block_rows,
            block_cols,
            data: DMatrix::zeros(grid_rows * block_rows, grid_cols * block_cols),
        }
    }

    pub fn from_blocks(
        grid_rows: usize,
        grid_cols: usize,
        blocks: &[DMatrix<Complex64>],
    ) -> Result<Self> {
        if blocks.len() != grid_rows * grid_cols {
            return Err(Error::InvalidInput(format!(
                "expected {} blocks, got {}",
                grid_rows * grid_cols,
                blocks.len()
            )));
        }
        let block_rows = blocks[0].nrows();
        let block_cols = blocks[0].ncols();
        let mut out = Self::new(grid_rows, grid_cols, block_rows, block_cols);
        for alpha in 0..grid_rows {
            for beta in 0..grid_cols {
                let block = &blocks[alpha * grid_cols + beta];
                if block.nrows() != block_rows || block.ncols() != block_cols {
                    return Err(Error::BlockDimMismatch(
                        block.nrows(),
                        block.ncols(),
                        block_rows,
                        block_cols,
                    ));
                }
                out.set_block(alpha, beta, block);
            }
        }
        Ok(out)
    }

    pub fn grid(&self) -> (usize, usize) {
        (self.grid_rows, self.grid_cols)
    }

    pub fn block_shape(&self) -> (usize, usize) {
        (self.block_rows, self.block_cols)
    }

    pub fn block(&self, alpha: usize, beta: usize) -> DMatrix<Complex64> {
        self.data
            .view(
                (alpha * self.block_rows, beta * self.block_cols),
                (self.block_rows, self.block_cols),
            )
            .into_owned()
    }

    pub fn set_block(&mut self, alpha: usize, beta: usize, block: &DMatrix<Complex64>) {
        self.data
            .view_mut(
                (alpha * self.block_rows, beta * self.block_cols),
                (self.block_rows, self.block_cols),
            )
            .copy_from(block);
    }

    /// The underlying dense matrix (blocks laid out contiguously).
    pub fn dense(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn into_dense(self) -> DMatrix<Complex64> {
        self.data
    }
}

/// Strong Kronecker product: matching block grids contract like a matrix
/// product while the blocks themselves combine by Kronecker product,
/// `(A |x| B)_{ab} = sum_g A_{ag} (x) B_{gb}`.
pub fn strong_kron(a: &BlockMatrix, b: &BlockMatrix) -> Result<BlockMatrix> {
    if a.grid_cols != b.grid_rows {
        return Err(Error::BlockDimMismatch(
            a.grid_rows,
            a.grid_cols,
            b.grid_rows,
            b.grid_cols,
        ));
    }
    let mut out = BlockMatrix::new(
        a.grid_rows,
        b.grid_cols,
        a.block_rows * b.block_rows,
        a.block_cols * b.block_cols,
    );
    for alpha in 0..a.grid_rows {
        for beta in 0..b.grid_cols {
            let mut acc = DMatrix::<Complex64>::zeros(out.block_rows, out.block_cols);
            for gamma in 0..a.grid_cols {
                acc += a.block(alpha, gamma).kronecker(&b.block(gamma, beta));
            }
            out.set_block(alpha, beta, &acc);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn eye2() -> DMatrix<Complex64> {
        DMatrix::identity(2, 2)
    }

    fn swap2() -> DMatrix<Complex64> {
        DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
    }

    #[test]
    fn identity_blocks_compose_to_identity() {
        let a = BlockMatrix::from_blocks(1, 1, &[eye2()]).unwrap();
        let product = strong_kron(&a, &a).unwrap();
        assert_eq!(product.into_dense(), DMatrix::identity(4, 4));
    }

    #[test]
    fn two_term_row_times_column() {
        let row = BlockMatrix::from_blocks(1, 2, &[eye2(), swap2()]).unwrap();
        let col = BlockMatrix::from_blocks(2, 1, &[eye2(), swap2()]).unwrap();
        let product = strong_kron(&row, &col).unwrap();
        let expected = eye2().kronecker(&eye2()) + swap2().kronecker(&swap2());
        assert_eq!(product.into_dense(), expected);
    }

    #[test]
    fn inner_grid_mismatch_is_rejected() {
        let row = BlockMatrix::from_blocks(1, 2, &[eye2(), swap2()]).unwrap();
        let bad = BlockMatrix::from_blocks(1, 1, &[eye2()]).unwrap();
        assert!(strong_kron(&row, &bad).is_err());
    }

    #[test]
    fn associativity_on_random_blocks() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut random_block = |rows: usize, cols: usize, grid_r: usize, grid_c: usize| {
            let blocks: Vec<DMatrix<Complex64>> = (0..grid_r * grid_c)
                .map(|_| {
                    DMatrix::from_fn(rows, cols, |_, _| {
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                    })
                })
                .collect();
            BlockMatrix::from_blocks(grid_r, grid_c, &blocks).unwrap()
        };
        let a = random_block(2, 2, 1, 3);
        let b = random_block(2, 2, 3, 2);
        let c = random_block(2, 2, 2, 1);
        let left = strong_kron(&strong_kron(&a, &b).unwrap(), &c).unwrap();
        let right = strong_kron(&a, &strong_kron(&b, &c).unwrap()).unwrap();
        let diff = (left.dense() - right.dense()).norm();
        assert!(diff < 1e-13, "associativity violated: {diff}");
    }
}
