//! Truncated Taylor arithmetic for exact higher-order derivatives.
//!
//! A [`Jet`] stores coefficients `d_0, ..., d_P` of a Taylor expansion at a
//! fixed point, `d_r = f^(r)(z0) / r!`. Sums, products, integer powers and
//! reciprocals are exact truncated-series algebra, so derivative factors come
//! out without finite-difference noise.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    coeffs: Vec<Complex64>,
}

impl Jet {
    /// Constant function: value `v`, all derivatives zero.
    pub fn constant(value: Complex64, order: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        coeffs[0] = value;
        Self { coeffs }
    }

    /// The identity function `z` expanded at `z0`.
    pub fn variable(z0: Complex64, order: usize) -> Self {
        let mut jet = Self::constant(z0, order);
        if order >= 1 {
            jet.coeffs[1] = Complex64::new(1.0, 0.0);
        }
        jet
    }

    /// Builds a jet directly from Taylor coefficients `d_0, ..., d_P`.
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn coeff(&self, r: usize) -> Complex64 {
        self.coeffs[r]
    }

    /// The `r`-th derivative at the expansion point, `r! * d_r`.
    pub fn derivative(&self, r: usize) -> Complex64 {
        let mut factorial = 1.0;
        for k in 2..=r {
            factorial *= k as f64;
        }
        self.coeffs[r] * factorial
    }

    pub fn add(&self, other: &Jet) -> Jet {
        assert_eq!(self.order(), other.order());
        Jet {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Jet {
        Jet {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        assert_eq!(self.order(), other.order());
        let order = self.order();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                if i + j > order {
                    break;
                }
                coeffs[i + j] += a * b;
            }
        }
        Jet { coeffs }
    }

    pub fn powi(&self, exponent: usize) -> Jet {
        let mut out = Jet::constant(Complex64::new(1.0, 0.0), self.order());
        for _ in 0..exponent {
            out = out.mul(self);
        }
        out
    }

    /// Reciprocal series; the value at the expansion point must be nonzero.
    pub fn reciprocal(&self) -> Result<Jet> {
        let a0 = self.coeffs[0];
        if a0.norm() == 0.0 {
            return Err(Error::InvalidInput(
                "reciprocal of a jet with zero value".into(),
            ));
        }
        let order = self.order();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        coeffs[0] = 1.0 / a0;
        for r in 1..=order {
            let mut acc = Complex64::new(0.0, 0.0);
            for s in 1..=r {
                acc += self.coeffs[s] * coeffs[r - s];
            }
            coeffs[r] = -acc / a0;
        }
        Ok(Jet { coeffs })
    }
}
