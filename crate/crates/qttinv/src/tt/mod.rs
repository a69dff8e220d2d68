//! Quantized tensor-train containers for length-`2^L` vectors and
//! `2^L x 2^L` matrices with binary mode indices.
//!
//! Index convention: the represented index is `i = sum_k 2^(L-k) i_k`, so
//! core 1 carries the most significant bit. Matrix cores pair row and column
//! bits per level.

mod block;
mod json;
mod round;

pub use block::{strong_kron, BlockMatrix};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest `L` materialized densely for vectors.
pub const DENSE_VECTOR_CAP: usize = 14;

/// Largest `L` materialized densely for matrices.
pub const DENSE_MATRIX_CAP: usize = 12;

/// Bond dimensions `r_1, ..., r_{L-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankVector(pub Vec<usize>);

impl RankVector {
    pub fn max(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(1)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }
}

impl std::fmt::Display for RankVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|r| r.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// One level of a QTT vector: the two `r_left x r_right` slices `G[:, i, :]`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorCore {
    slices: [DMatrix<Complex64>; 2],
}

impl VectorCore {
    pub fn new(slices: [DMatrix<Complex64>; 2]) -> Result<Self> {
        if slices[0].shape() != slices[1].shape() {
            return Err(Error::BlockDimMismatch(
                slices[0].nrows(),
                slices[0].ncols(),
                slices[1].nrows(),
                slices[1].ncols(),
            ));
        }
        Ok(Self { slices })
    }

    pub fn left_rank(&self) -> usize {
        self.slices[0].nrows()
    }

    pub fn right_rank(&self) -> usize {
        self.slices[0].ncols()
    }

    pub fn slice(&self, i: usize) -> &DMatrix<Complex64> {
        &self.slices[i]
    }

    /// Core-matrix view: an `r_left x r_right` grid of `2 x 1` blocks.
    pub fn core_matrix(&self) -> BlockMatrix {
        let mut out = BlockMatrix::new(self.left_rank(), self.right_rank(), 2, 1);
        for alpha in 0..self.left_rank() {
            for beta in 0..self.right_rank() {
                let block = DMatrix::from_column_slice(
                    2,
                    1,
                    &[self.slices[0][(alpha, beta)], self.slices[1][(alpha, beta)]],
                );
                out.set_block(alpha, beta, &block);
            }
        }
        out
    }
}

/// One level of a QTT matrix: four `r_left x r_right` slices `G[:, i, j, :]`,
/// stored at index `2 i + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixCore {
    slices: [DMatrix<Complex64>; 4],
}

impl MatrixCore {
    pub fn new(slices: [DMatrix<Complex64>; 4]) -> Result<Self> {
        let shape = slices[0].shape();
        for s in &slices[1..] {
            if s.shape() != shape {
                return Err(Error::BlockDimMismatch(
                    s.nrows(),
                    s.ncols(),
                    shape.0,
                    shape.1,
                ));
            }
        }
        Ok(Self { slices })
    }

    /// Builds a rank-1 (1 x 1) core from a dense 2 x 2 level matrix.
    pub fn scalar(level: &DMatrix<Complex64>) -> Self {
        let one = |v: Complex64| DMatrix::from_element(1, 1, v);
        Self {
            slices: [
                one(level[(0, 0)]),
                one(level[(0, 1)]),
                one(level[(1, 0)]),
                one(level[(1, 1)]),
            ],
        }
    }

    pub fn left_rank(&self) -> usize {
        self.slices[0].nrows()
    }

    pub fn right_rank(&self) -> usize {
        self.slices[0].ncols()
    }

    pub fn slice(&self, i: usize, j: usize) -> &DMatrix<Complex64> {
        &self.slices[2 * i + j]
    }

    pub fn paired_slice(&self, d: usize) -> &DMatrix<Complex64> {
        &self.slices[d]
    }

    /// Core-matrix view: an `r_left x r_right` grid of `2 x 2` blocks.
    pub fn core_matrix(&self) -> BlockMatrix {
        let mut out = BlockMatrix::new(self.left_rank(), self.right_rank(), 2, 2);
        for alpha in 0..self.left_rank() {
            for beta in 0..self.right_rank() {
                let block = DMatrix::from_row_slice(
                    2,
                    2,
                    &[
                        self.slices[0][(alpha, beta)],
                        self.slices[1][(alpha, beta)],
                        self.slices[2][(alpha, beta)],
                        self.slices[3][(alpha, beta)],
                    ],
                );
                out.set_block(alpha, beta, &block);
            }
        }
        out
    }

    /// Inverse of [`MatrixCore::core_matrix`] for one block grid.
    pub fn from_core_matrix(blocks: &BlockMatrix) -> Result<Self> {
        let (grid_rows, grid_cols) = blocks.grid();
        if blocks.block_shape() != (2, 2) {
            return Err(Error::InvalidInput("core matrix blocks must be 2x2".into()));
        }
        let mut slices: [DMatrix<Complex64>; 4] =
            std::array::from_fn(|_| DMatrix::zeros(grid_rows, grid_cols));
        for alpha in 0..grid_rows {
            for beta in 0..grid_cols {
                let block = blocks.block(alpha, beta);
                for i in 0..2 {
                    for j in 0..2 {
                        slices[2 * i + j][(alpha, beta)] = block[(i, j)];
                    }
                }
            }
        }
        Ok(Self { slices })
    }
}

fn validate_chain<T>(
    cores: &[T],
    left: impl Fn(&T) -> usize,
    right: impl Fn(&T) -> usize,
) -> Result<()> {
    if cores.is_empty() {
        return Err(Error::InvalidInput("QTT needs at least one core".into()));
    }
    if left(&cores[0]) != 1 || right(cores.last().unwrap()) != 1 {
        return Err(Error::InvalidInput("boundary ranks must be 1".into()));
    }
    for k in 0..cores.len() - 1 {
        if right(&cores[k]) != left(&cores[k + 1]) {
            return Err(Error::LengthMismatch(right(&cores[k]), left(&cores[k + 1])));
        }
    }
    Ok(())
}

/// QTT representation of a vector of length `2^L`.
#[derive(Debug, Clone, PartialEq)]
pub struct QttVector {
    cores: Vec<VectorCore>,
}

impl QttVector {
    pub fn new(cores: Vec<VectorCore>) -> Result<Self> {
        validate_chain(&cores, VectorCore::left_rank, VectorCore::right_rank)?;
        Ok(Self { cores })
    }

    pub fn levels(&self) -> usize {
        self.cores.len()
    }

    pub fn len(&self) -> u64 {
        1u64 << self.cores.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cores(&self) -> &[VectorCore] {
        &self.cores
    }

    pub fn ranks(&self) -> RankVector {
        RankVector(
            self.cores[..self.cores.len() - 1]
                .iter()
                .map(VectorCore::right_rank)
                .collect(),
        )
    }

    /// Unit basis vector `e_index`.
    pub fn basis(levels: usize, index: u64) -> Result<Self> {
        if levels == 0 || index >= (1u64 << levels) {
            return Err(Error::IndexOutOfRange {
                index,
                size: 1u64 << levels,
            });
        }
        let cores = (1..=levels)
            .map(|k| {
                let bit = ((index >> (levels - k)) & 1) as usize;
                let mut slices = [DMatrix::zeros(1, 1), DMatrix::zeros(1, 1)];
                slices[bit][(0, 0)] = Complex64::new(1.0, 0.0);
                VectorCore::new(slices).unwrap()
            })
            .collect();
        Self::new(cores)
    }

    /// Entry `i` by direct core contraction.
    pub fn get(&self, index: u64) -> Result<Complex64> {
        let levels = self.levels();
        if index >= self.len() {
            return Err(Error::IndexOutOfRange {
                index,
                size: self.len(),
            });
        }
        let mut row = DMatrix::<Complex64>::identity(1, 1);
        for (k, core) in self.cores.iter().enumerate() {
            let bit = ((index >> (levels - 1 - k)) & 1) as usize;
            row *= core.slice(bit);
        }
        Ok(row[(0, 0)])
    }

    pub fn to_dense(&self) -> Result<Vec<Complex64>> {
        let levels = self.levels();
        if levels > DENSE_VECTOR_CAP {
            return Err(Error::MaterializationCap {
                l: levels,
                cap: DENSE_VECTOR_CAP,
            });
        }
        let mut acc = self.cores[0].core_matrix();
        for core in &self.cores[1..] {
            acc = strong_kron(&acc, &core.core_matrix())?;
        }
        let dense = acc.into_dense();
        Ok(dense.column(0).iter().copied().collect())
    }

    /// TT-SVD of a dense vector; length must be a power of two. Singular
    /// values below `tol` times the level maximum are discarded (machine
    /// precision when `tol` is zero).
    pub fn from_dense(values: &[Complex64], tol: f64) -> Result<Self> {
        if !values.len().is_power_of_two() || values.len() < 2 {
            return Err(Error::NotPowerOfTwo(values.len()));
        }
        let levels = values.len().ilog2() as usize;
        let slices = round::tt_svd(values, levels, 2, tol);
        let cores = slices
            .into_iter()
            .map(|pair| VectorCore::new([pair[0].clone(), pair[1].clone()]).unwrap())
            .collect();
        Self::new(cores)
    }

    /// `c1 * self + c2 * other` by core-matrix concatenation; ranks add.
    pub fn sum_scaled(&self, other: &QttVector, c1: Complex64, c2: Complex64) -> Result<QttVector> {
        if self.levels() != other.levels() {
            return Err(Error::LengthMismatch(self.levels(), other.levels()));
        }
        let merged = round::direct_sum(&self.mode_slices(), &other.mode_slices(), c1, c2);
        let cores = merged
            .into_iter()
            .map(|pair| VectorCore::new([pair[0].clone(), pair[1].clone()]).unwrap())
            .collect();
        QttVector::new(cores)
    }

    pub fn scaled(&self, factor: Complex64) -> QttVector {
        let mut cores = self.cores.clone();
        for slice in cores[0].slices.iter_mut() {
            *slice *= factor;
        }
        QttVector { cores }
    }

    /// Sesquilinear inner product `sum_i conj(self_i) other_i`.
    pub fn dot(&self, other: &QttVector) -> Result<Complex64> {
        if self.levels() != other.levels() {
            return Err(Error::LengthMismatch(self.levels(), other.levels()));
        }
        let mut phi = DMatrix::<Complex64>::identity(1, 1);
        for (a, b) in self.cores.iter().zip(&other.cores) {
            let mut next = DMatrix::<Complex64>::zeros(a.right_rank(), b.right_rank());
            for i in 0..2 {
                next += a.slice(i).adjoint() * &phi * b.slice(i);
            }
            phi = next;
        }
        Ok(phi[(0, 0)])
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).map(|v| v.re.max(0.0).sqrt()).unwrap_or(0.0)
    }

    /// TT rounding: right-to-left orthogonalization, then left-to-right SVD
    /// truncation with the relative Frobenius budget `tol` split evenly over
    /// the bonds. `tol = 0` reveals exact ranks up to machine precision.
    pub fn rounded(&self, tol: f64) -> QttVector {
        let slices = round::round_slices(self.mode_slices(), tol);
        let cores = slices
            .into_iter()
            .map(|pair| VectorCore::new([pair[0].clone(), pair[1].clone()]).unwrap())
            .collect();
        QttVector { cores }
    }

    fn mode_slices(&self) -> Vec<Vec<DMatrix<Complex64>>> {
        self.cores.iter().map(|c| c.slices.to_vec()).collect()
    }
}

/// QTT representation of a `2^L x 2^L` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct QttMatrix {
    cores: Vec<MatrixCore>,
}

impl QttMatrix {
    pub fn new(cores: Vec<MatrixCore>) -> Result<Self> {
        validate_chain(&cores, MatrixCore::left_rank, MatrixCore::right_rank)?;
        Ok(Self { cores })
    }

    pub fn levels(&self) -> usize {
        self.cores.len()
    }

    pub fn side(&self) -> u64 {
        1u64 << self.cores.len()
    }

    pub fn cores(&self) -> &[MatrixCore] {
        &self.cores
    }

    pub fn ranks(&self) -> RankVector {
        RankVector(
            self.cores[..self.cores.len() - 1]
                .iter()
                .map(MatrixCore::right_rank)
                .collect(),
        )
    }

    /// Identity matrix: every level holds the 2 x 2 Kronecker delta, all
    /// ranks are one.
    pub fn identity(levels: usize) -> Result<Self> {
        if levels == 0 {
            return Err(Error::InvalidInput("need at least one level".into()));
        }
        let eye = DMatrix::<Complex64>::identity(2, 2);
        Self::new((0..levels).map(|_| MatrixCore::scalar(&eye)).collect())
    }

    pub fn get(&self, row: u64, col: u64) -> Result<Complex64> {
        let levels = self.levels();
        if row >= self.side() || col >= self.side() {
            return Err(Error::IndexOutOfRange {
                index: row.max(col),
                size: self.side(),
            });
        }
        let mut acc = DMatrix::<Complex64>::identity(1, 1);
        for (k, core) in self.cores.iter().enumerate() {
            let i = ((row >> (levels - 1 - k)) & 1) as usize;
            let j = ((col >> (levels - 1 - k)) & 1) as usize;
            acc *= core.slice(i, j);
        }
        Ok(acc[(0, 0)])
    }

    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        let levels = self.levels();
        if levels > DENSE_MATRIX_CAP {
            return Err(Error::MaterializationCap {
                l: levels,
                cap: DENSE_MATRIX_CAP,
            });
        }
        let mut acc = self.cores[0].core_matrix();
        for core in &self.cores[1..] {
            acc = strong_kron(&acc, &core.core_matrix())?;
        }
        Ok(acc.into_dense())
    }

    /// TT-SVD of a dense square matrix with power-of-two side, pairing row
    /// and column bits level by level.
    pub fn from_dense(matrix: &DMatrix<Complex64>, tol: f64) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n {
            return Err(Error::InvalidInput("matrix must be square".into()));
        }
        if !n.is_power_of_two() || n < 2 {
            return Err(Error::NotPowerOfTwo(n));
        }
        let levels = n.ilog2() as usize;
        let values = paired_digit_flatten(matrix, levels);
        let slices = round::tt_svd(&values, levels, 4, tol);
        let cores = slices
            .into_iter()
            .map(|quad| {
                MatrixCore::new([
                    quad[0].clone(),
                    quad[1].clone(),
                    quad[2].clone(),
                    quad[3].clone(),
                ])
                .unwrap()
            })
            .collect();
        Self::new(cores)
    }

    /// `c1 * self + c2 * other`; ranks add elementwise.
    pub fn sum_scaled(&self, other: &QttMatrix, c1: Complex64, c2: Complex64) -> Result<QttMatrix> {
        if self.levels() != other.levels() {
            return Err(Error::LengthMismatch(self.levels(), other.levels()));
        }
        let merged = round::direct_sum(&self.mode_slices(), &other.mode_slices(), c1, c2);
        let cores = merged
            .into_iter()
            .map(|quad| {
                MatrixCore::new([
                    quad[0].clone(),
                    quad[1].clone(),
                    quad[2].clone(),
                    quad[3].clone(),
                ])
                .unwrap()
            })
            .collect();
        QttMatrix::new(cores)
    }

    /// Matrix-vector product; output ranks are elementwise products.
    pub fn matvec(&self, x: &QttVector) -> Result<QttVector> {
        if self.levels() != x.levels() {
            return Err(Error::LengthMismatch(self.levels(), x.levels()));
        }
        let cores = self
            .cores
            .iter()
            .zip(x.cores())
            .map(|(a, v)| {
                let slices = [0usize, 1].map(|i| {
                    a.slice(i, 0).kronecker(v.slice(0)) + a.slice(i, 1).kronecker(v.slice(1))
                });
                VectorCore::new(slices).unwrap()
            })
            .collect();
        QttVector::new(cores)
    }

    /// TT rounding with relative Frobenius tolerance `tol`.
    pub fn rounded(&self, tol: f64) -> QttMatrix {
        let slices = round::round_slices(self.mode_slices(), tol);
        let cores = slices
            .into_iter()
            .map(|quad| {
                MatrixCore::new([
                    quad[0].clone(),
                    quad[1].clone(),
                    quad[2].clone(),
                    quad[3].clone(),
                ])
                .unwrap()
            })
            .collect();
        QttMatrix { cores }
    }

    /// Numerical ranks of the level unfoldings (paired row/column bits per
    /// level as row groups) at relative singular-value threshold `tol`.
    ///
    /// Materializes internally, so the dense cap applies.
    pub fn unfolding_ranks(&self, tol: f64) -> Result<RankVector> {
        let dense = self.to_dense()?;
        Ok(dense_unfolding_ranks(&dense, tol))
    }

    fn mode_slices(&self) -> Vec<Vec<DMatrix<Complex64>>> {
        self.cores.iter().map(|c| c.slices.to_vec()).collect()
    }
}

/// Flattens a `2^L` square matrix into base-4 digit order: digit `k` is the
/// pair `(i_k, j_k)` with the row bit major.
fn paired_digit_flatten(matrix: &DMatrix<Complex64>, levels: usize) -> Vec<Complex64> {
    let total = 1usize << (2 * levels);
    let mut values = vec![Complex64::new(0.0, 0.0); total];
    for row in 0..matrix.nrows() {
        for col in 0..matrix.ncols() {
            let mut idx = 0usize;
            for k in 0..levels {
                let i = (row >> (levels - 1 - k)) & 1;
                let j = (col >> (levels - 1 - k)) & 1;
                idx = idx * 4 + (2 * i + j);
            }
            values[idx] = matrix[(row, col)];
        }
    }
    values
}

/// Numerical ranks of the paired-bit unfoldings of a dense `2^L` matrix at
/// relative singular-value threshold `tol` (machine precision when zero).
pub fn dense_unfolding_ranks(matrix: &DMatrix<Complex64>, tol: f64) -> RankVector {
    let levels = matrix.nrows().ilog2() as usize;
    let values = paired_digit_flatten(matrix, levels);
    let mut ranks = Vec::with_capacity(levels - 1);
    for k in 1..levels {
        let rows = 1usize << (2 * k);
        let cols = values.len() / rows;
        let unfolding = DMatrix::from_fn(rows, cols, |r, c| values[r * cols + c]);
        let svd = unfolding.svd(false, false);
        let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
        let threshold = if tol > 0.0 {
            tol * sigma_max
        } else {
            64.0 * f64::EPSILON * sigma_max
        };
        let rank = svd
            .singular_values
            .iter()
            .filter(|&&s| s > threshold)
            .count()
            .max(1);
        ranks.push(rank);
    }
    RankVector(ranks)
}
