//! Closed-form inversion of band circulant matrices and explicit
//! quantized tensor-train (QTT) representations of the inverses.
//!
//! The inverse of a nonsingular band circulant is again a circulant whose
//! first column is a short sum of (polynomial x exponential) sequences in
//! the inside-unit-circle roots of the symbol polynomials. This crate finds
//! those roots, evaluates the column in closed form (multiple roots
//! included), certifies the QTT ranks of the inverse, and writes the inverse
//! down core by core so that periodic systems on grids of up to `2^50`
//! points are solved by a QTT matrix-vector product.

pub mod circulant;
pub mod cli;
pub mod error;
pub mod inverse;
pub mod jet;
pub mod powers;
pub mod qtt_build;
pub mod roots;
pub mod solver;
pub mod tt;

pub use circulant::BandSymbol;
pub use error::{Error, Result};
pub use inverse::{ColumnModel, InverseColumn};
pub use qtt_build::ExponentialSumSpec;
pub use tt::{QttMatrix, QttVector, RankVector};
