//! Error type shared across the crate.

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("core chain length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("block dimension mismatch: {0}x{1} against {2}x{3}")]
    BlockDimMismatch(usize, usize, usize, usize),
    #[error("size {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("materialization of 2^{l} exceeds the cap 2^{cap}")]
    MaterializationCap { l: usize, cap: usize },
    #[error("matrix size {n} is too small for the band ({m} upper, {lower} lower)")]
    BandWrap { n: usize, m: usize, lower: usize },
    #[error("index {index} out of range for size {size}")]
    IndexOutOfRange { index: u64, size: u64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("symbol polynomial has a root {root} too close to the unit circle")]
    RootOnUnitCircle { root: Complex64 },
    #[error("root finding did not converge: {0}")]
    NonConvergence(String),
    #[error("circulant spectrum contains a (near-)zero eigenvalue; matrix is singular")]
    SingularSpectrum,
    #[error("root {root} is repeated; simple-root path does not apply")]
    RepeatedRoot { root: Complex64 },
    #[error("column model carries multiplicity >= 2 terms; no explicit stable cores")]
    UnsupportedMultiplicity,
    #[error("power expansion invalid: |{0}| >= 1")]
    ExpansionInvalid(f64),
}

impl Error {
    /// Distinguishes numerical failures (CLI exit 3) from validation errors (exit 2).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::RootOnUnitCircle { .. }
                | Error::NonConvergence(_)
                | Error::SingularSpectrum
                | Error::RepeatedRoot { .. }
                | Error::UnsupportedMultiplicity
                | Error::ExpansionInvalid(_)
        )
    }
}
