//! Explicit QTT core constructions: cyclic-shift powers, geometric vectors,
//! and circulants generated by exponential sums, including the two-sided
//! variant whose stored scalars never exceed the term weights (every base is
//! raised only to non-negative powers).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::circulant::BandSymbol;
use crate::error::{Error, Result};
use crate::inverse::{ColumnModel, InverseColumn};
use crate::powers::{pow_complex, stable_pow};
use crate::tt::{BlockMatrix, MatrixCore, QttMatrix, QttVector, VectorCore};

/// Exact offset form of a near-one base, `base = 1 - gamma1 h + gamma2 h^2`.
///
/// Carrying the offset instead of the rounded base keeps powers like
/// `base^(2^L)` at full relative precision (the quadratic term falls below
/// the float spacing at one once `h^2 < 2^-53` yet moves `base^(1/h)` at
/// order `h`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaForm {
    pub gamma1: f64,
    pub gamma2: f64,
    pub h: f64,
}

/// A power base: its floating-point value plus the optional exact offset
/// provenance used for all exponentiations when present.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Base {
    value: Complex64,
    delta: Option<DeltaForm>,
}

impl Base {
    pub fn new(value: Complex64) -> Self {
        Self { value, delta: None }
    }

    /// Base given in offset form; fails when the offset leaves `(-1, 1)`.
    pub fn with_delta(gamma1: f64, gamma2: f64, h: f64) -> Result<Self> {
        let offset = h * (gamma2 * h - gamma1);
        if offset.abs() >= 1.0 {
            return Err(Error::ExpansionInvalid(offset));
        }
        Ok(Self {
            value: Complex64::new(1.0 + offset, 0.0),
            delta: Some(DeltaForm { gamma1, gamma2, h }),
        })
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    pub fn pow(&self, exponent: u64) -> Complex64 {
        match self.delta {
            Some(d) => stable_pow(d.gamma1, d.gamma2, d.h, exponent)
                .expect("offset validated at construction"),
            None => pow_complex(self.value, exponent),
        }
    }
}

/// One term `weight * base^j` (or `weight * base^(2^L - j)` on the backward
/// side) of an exponential-sum circulant column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpTerm {
    pub weight: Complex64,
    pub base: Base,
}

impl ExpTerm {
    pub fn new(weight: Complex64, base: Complex64) -> Self {
        Self {
            weight,
            base: Base::new(base),
        }
    }

    pub fn with_delta(weight: Complex64, gamma1: f64, gamma2: f64, h: f64) -> Result<Self> {
        Ok(Self {
            weight,
            base: Base::with_delta(gamma1, gamma2, h)?,
        })
    }
}

/// Column specification `b_j = sum_t alpha_t w_t^j + sum_t beta_t
/// z_t^(2^L - j)` with all base magnitudes below one.
#[derive(Debug, Clone)]
pub struct ExponentialSumSpec {
    pub levels: usize,
    pub forward: Vec<ExpTerm>,
    pub backward: Vec<ExpTerm>,
}

impl ExponentialSumSpec {
    pub fn new(levels: usize, forward: Vec<ExpTerm>, backward: Vec<ExpTerm>) -> Self {
        Self {
            levels,
            forward,
            backward,
        }
    }

    /// Direct evaluation of the specified column entry.
    pub fn eval(&self, j: u64) -> Complex64 {
        let size = 1u64 << self.levels;
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.forward {
            acc += t.weight * t.base.pow(j);
        }
        for t in &self.backward {
            acc += t.weight * t.base.pow(size - j);
        }
        acc
    }

    fn max_base_magnitude(&self) -> f64 {
        self.forward
            .iter()
            .chain(&self.backward)
            .map(|t| t.base.value().norm())
            .fold(0.0, f64::max)
    }
}

fn eye() -> DMatrix<Complex64> {
    DMatrix::identity(2, 2)
}

fn row_swap() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ],
    )
}

/// Upper shift: ones on the superdiagonal.
fn upper_nil() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ],
    )
}

/// Lower shift: ones on the subdiagonal.
fn lower_nil() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ],
    )
}

fn zero2() -> DMatrix<Complex64> {
    DMatrix::zeros(2, 2)
}

fn core_from_blocks(
    grid_rows: usize,
    grid_cols: usize,
    blocks: &[DMatrix<Complex64>],
) -> MatrixCore {
    MatrixCore::from_core_matrix(&BlockMatrix::from_blocks(grid_rows, grid_cols, blocks).unwrap())
        .unwrap()
}

/// QTT cores of `P^i`, the `i`-th power of the size-`2^L` cyclic shift
/// (ones on the subdiagonal plus the upper-right corner). All bond ranks
/// are two.
pub fn perm_power_qtt(levels: usize, exponent: u64) -> Result<QttMatrix> {
    if levels < 2 {
        return Err(Error::InvalidInput(
            "shift-power cores need at least two levels".into(),
        ));
    }
    if exponent >= 1u64 << levels {
        return Err(Error::IndexOutOfRange {
            index: exponent,
            size: 1u64 << levels,
        });
    }
    let bit = |k: usize| (exponent >> (levels - k)) & 1; // bit feeding core k
    let mut cores = Vec::with_capacity(levels);
    cores.push(if bit(1) == 0 {
        core_from_blocks(1, 2, &[eye(), row_swap()])
    } else {
        core_from_blocks(1, 2, &[row_swap(), eye()])
    });
    for k in 2..levels {
        cores.push(if bit(k) == 0 {
            core_from_blocks(2, 2, &[eye(), lower_nil(), zero2(), upper_nil()])
        } else {
            core_from_blocks(2, 2, &[lower_nil(), zero2(), upper_nil(), eye()])
        });
    }
    cores.push(if bit(levels) == 0 {
        core_from_blocks(2, 1, &[eye(), zero2()])
    } else {
        core_from_blocks(2, 1, &[lower_nil(), upper_nil()])
    });
    QttMatrix::new(cores)
}

/// Rank-one QTT of the geometric vector `(z^j)`, `0^0 = 1`.
pub fn exponential_vector_qtt(levels: usize, z: Complex64) -> QttVector {
    // squaring chain: level k holds z^(2^(L-k))
    let mut powers = vec![Complex64::new(0.0, 0.0); levels + 1];
    powers[levels] = z;
    for k in (1..levels).rev() {
        powers[k] = powers[k + 1] * powers[k + 1];
    }
    let cores = (1..=levels)
        .map(|k| {
            VectorCore::new([
                DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0)),
                DMatrix::from_element(1, 1, powers[k]),
            ])
            .unwrap()
        })
        .collect();
    QttVector::new(cores).unwrap()
}

/// Rank-one QTT of the unit-modulus sequence `exp(2 pi i f j)`.
///
/// The per-level phases are reduced modulo one before the trigonometric
/// evaluation, so frequencies whose products `f 2^(L-k)` are exactly
/// representable (dyadic grids) lose no accuracy even at `L = 50`, where a
/// squaring chain would have drifted.
pub fn unit_exponential_qtt(levels: usize, frequency: f64) -> QttVector {
    let cores = (1..=levels)
        .map(|k| {
            let cycles = frequency * (1u64 << (levels - k)) as f64;
            let phase = 2.0 * std::f64::consts::PI * (cycles - cycles.floor());
            VectorCore::new([
                DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0)),
                DMatrix::from_element(1, 1, Complex64::from_polar(1.0, phase)),
            ])
            .unwrap()
        })
        .collect();
    QttVector::new(cores).unwrap()
}

/// Forward-blocks `K` and `M` of the exponential-sum constructions.
fn forward_blocks(
    base: &Base,
    levels: usize,
    k: usize,
) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let q = base.pow(1u64 << (levels - k));
    let q_sq = base.pow(1u64 << (levels - k + 1));
    let tail = base.pow((1u64 << levels) - (1u64 << (levels - k + 1)));
    // K = J' + q^(2^k - 2) J,  M = q I + q^2 J' + J
    let k_block = lower_nil() + upper_nil() * tail;
    let m_block = eye() * q + lower_nil() * q_sq + upper_nil();
    (k_block, m_block)
}

/// Backward-blocks of the two-sided construction (no negative powers).
fn backward_blocks(
    base: &Base,
    levels: usize,
    k: usize,
) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let q = base.pow(1u64 << (levels - k));
    let q_sq = base.pow(1u64 << (levels - k + 1));
    let tail = base.pow((1u64 << levels) - (1u64 << (levels - k + 1)));
    // K~ = q~^(2^k - 2) J' + J,  M~ = q~ I + J' + q~^2 J
    let k_block = lower_nil() * tail + upper_nil();
    let m_block = eye() * q + lower_nil() + upper_nil() * q_sq;
    (k_block, m_block)
}

fn dense_fallback(spec: &ExponentialSumSpec) -> Result<QttMatrix> {
    let size = 1usize << spec.levels;
    let column: Vec<Complex64> = (0..size).map(|j| spec.eval(j as u64)).collect();
    let dense = DMatrix::from_fn(size, size, |i, j| column[(i + size - j) % size]);
    QttMatrix::from_dense(&dense, 0.0)
}

/// Explicit QTT cores of the circulant whose first column is the forward
/// exponential sum `b_j = sum_t alpha_t w_t^j`. Bond ranks are
/// `(2, r+1, ..., r+1)`.
///
/// This layout raises bases to exponents up to `2^L - 2` only; with
/// unit-disc bases it is the special case of [`circulant_qtt_stable`] with
/// no backward terms.
pub fn circulant_qtt_sum_z(levels: usize, terms: &[ExpTerm]) -> Result<QttMatrix> {
    if levels <= 2 {
        return Err(Error::InvalidInput(
            "explicit sum cores need more than two levels".into(),
        ));
    }
    build_exponential_circulant(&ExponentialSumSpec::new(levels, terms.to_vec(), Vec::new()))
}

/// Explicit QTT cores of the two-sided exponential-sum circulant
/// `b_j = sum alpha_t w_t^j + sum beta_t z_t^(2^L - j)` with bond ranks
/// `(2, r1 + r2 + 1, ..., r1 + r2 + 1)`.
///
/// Requires every base inside the open unit disc; all stored scalars then
/// stay bounded by the term weights independently of `L`. Levels one and
/// two fall back to a dense construction.
pub fn circulant_qtt_stable(spec: &ExponentialSumSpec) -> Result<QttMatrix> {
    if spec.max_base_magnitude() >= 1.0 {
        return Err(Error::InvalidInput(
            "stable cores need every base strictly inside the unit circle".into(),
        ));
    }
    if spec.levels <= 2 {
        return dense_fallback(spec);
    }
    build_exponential_circulant(spec)
}

fn build_exponential_circulant(spec: &ExponentialSumSpec) -> Result<QttMatrix> {
    let levels = spec.levels;
    let size = 1u64 << levels;
    let r = spec.forward.len() + spec.backward.len();
    let mut cores = Vec::with_capacity(levels);

    cores.push(core_from_blocks(1, 2, &[eye(), row_swap()]));

    // level 2: [I K.. K~..; 0 M.. M~..]
    {
        let mut top = vec![eye()];
        let mut bottom = vec![zero2()];
        for term in &spec.forward {
            let (kb, mb) = forward_blocks(&term.base, levels, 2);
            top.push(kb);
            bottom.push(mb);
        }
        for term in &spec.backward {
            let (kb, mb) = backward_blocks(&term.base, levels, 2);
            top.push(kb);
            bottom.push(mb);
        }
        let mut blocks = top;
        blocks.extend(bottom);
        cores.push(core_from_blocks(2, r + 1, &blocks));
    }

    // levels 3 .. L-1: [I K-row; diag(M)]
    for k in 3..levels {
        let mut blocks = vec![zero2(); (r + 1) * (r + 1)];
        blocks[0] = eye();
        let mut column = 1;
        for term in &spec.forward {
            let (kb, mb) = forward_blocks(&term.base, levels, k);
            blocks[column] = kb;
            blocks[column * (r + 1) + column] = mb;
            column += 1;
        }
        for term in &spec.backward {
            let (kb, mb) = backward_blocks(&term.base, levels, k);
            blocks[column] = kb;
            blocks[column * (r + 1) + column] = mb;
            column += 1;
        }
        cores.push(core_from_blocks(r + 1, r + 1, &blocks));
    }

    // last level: aggregates on top, weighted M blocks below
    {
        let mut gamma1 = Complex64::new(0.0, 0.0);
        let mut gamma2 = Complex64::new(0.0, 0.0);
        let mut gamma3 = Complex64::new(0.0, 0.0);
        for term in &spec.forward {
            gamma1 += term.weight;
            gamma2 += term.weight * term.base.pow(1);
            gamma3 += term.weight * term.base.pow(size - 1);
        }
        for term in &spec.backward {
            gamma1 += term.weight * term.base.pow(size);
            gamma2 += term.weight * term.base.pow(size - 1);
            gamma3 += term.weight * term.base.pow(1);
        }
        let mut blocks = vec![eye() * gamma1 + lower_nil() * gamma2 + upper_nil() * gamma3];
        for term in &spec.forward {
            let (_, mb) = forward_blocks(&term.base, levels, levels);
            blocks.push(mb * (term.weight * term.base.pow(1)));
        }
        for term in &spec.backward {
            let (_, mb) = backward_blocks(&term.base, levels, levels);
            blocks.push(mb * (term.weight * term.base.pow(1)));
        }
        cores.push(core_from_blocks(r + 1, 1, &blocks));
    }
    QttMatrix::new(cores)
}

/// Converts a simple-root column model into the exponential-sum form:
/// `h`-side terms become forward terms, `g`-side terms backward ones.
/// The model size must be a power of two; any multiplicity >= 2 term is
/// rejected (no explicit stable cores exist for those).
pub fn column_model_to_spec(model: &ColumnModel) -> Result<ExponentialSumSpec> {
    spec_with_rotation(model, 0)
}

/// As [`column_model_to_spec`], absorbing a downward column rotation
/// (the `m = 1` shift) into the weights; the index wrap adds one degenerate
/// forward term with base zero.
pub fn spec_with_rotation(model: &ColumnModel, rotation: u64) -> Result<ExponentialSumSpec> {
    if !model.size.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(model.size as usize));
    }
    let levels = model.size.ilog2() as usize;
    if model
        .terms_g
        .iter()
        .chain(&model.terms_h)
        .any(|t| t.derivative_index > 0)
    {
        return Err(Error::UnsupportedMultiplicity);
    }
    let mut forward = Vec::new();
    let mut backward = Vec::new();
    let mut wrap_weight = Complex64::new(0.0, 0.0);
    for term in &model.terms_h {
        // c w^(j + m - 2) rotated by rotation: weight c w^(m - 2 - rotation)
        let shift = model.upper as i64 - 2 - rotation as i64;
        let weight = term.coefficient * signed_power(term.root, shift);
        forward.push(ExpTerm::new(weight, term.root));
        if rotation > 0 {
            // wrap correction at j < rotation: w^(N) vs w^0 mismatch
            wrap_weight += weight * (pow_complex(term.root, model.size) - 1.0);
        }
    }
    for term in &model.terms_g {
        // c z^(N - j + n - 1) rotated: weight c z^(n - 1 + rotation)
        let shift = model.lower as i64 - 1 + rotation as i64;
        let weight = term.coefficient * signed_power(term.root, shift);
        backward.push(ExpTerm::new(weight, term.root));
        if rotation > 0 {
            wrap_weight += weight * (1.0 - pow_complex(term.root, model.size));
        }
    }
    if rotation > 1 {
        return Err(Error::InvalidInput(
            "only single-step rotation supported".into(),
        ));
    }
    if rotation == 1 {
        forward.push(ExpTerm::new(wrap_weight, Complex64::new(0.0, 0.0)));
    }
    Ok(ExponentialSumSpec::new(levels, forward, backward))
}

fn signed_power(z: Complex64, exponent: i64) -> Complex64 {
    if exponent >= 0 {
        pow_complex(z, exponent as u64)
    } else {
        1.0 / pow_complex(z, (-exponent) as u64)
    }
}

/// Inverse of a band circulant as explicit QTT cores (simple roots only).
pub fn inverse_qtt(symbol: &BandSymbol, levels: usize) -> Result<QttMatrix> {
    let column = crate::inverse::inverse_column(symbol, 1u64 << levels)?;
    let spec = match &column {
        InverseColumn::Model { model, rotation } => spec_with_rotation(model, *rotation)?,
        InverseColumn::Diagonal { value, .. } => ExponentialSumSpec::new(
            levels,
            vec![ExpTerm::new(*value, Complex64::new(0.0, 0.0))],
            Vec::new(),
        ),
    };
    circulant_qtt_stable(&spec)
}
