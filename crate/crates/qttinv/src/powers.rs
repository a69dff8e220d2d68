//! Power evaluation helpers for huge integer exponents.
//!
//! Closed-form inverse columns raise roots to exponents as large as `2^50`.
//! Magnitudes are taken through log space (graceful underflow to exact zero),
//! phases through renormalized binary exponentiation, and near-one real bases
//! through `ln_1p` on the exactly known offset so that the quadratic term of
//! a grid-dependent base is not lost.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `z^e` for a complex base and a (possibly huge) unsigned exponent.
///
/// `0^0 = 1` by convention. Magnitudes below about `1e-300` underflow to an
/// exact zero, at which point `1/(1 - z^N)` is exactly one.
pub fn pow_complex(z: Complex64, exponent: u64) -> Complex64 {
    if exponent == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let r = z.norm();
    if r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let log_mag = exponent as f64 * r.ln();
    if log_mag < -745.0 {
        return Complex64::new(0.0, 0.0);
    }
    let magnitude = log_mag.exp();
    if z.im == 0.0 {
        // real base: sign by parity, no phase drift at all
        let sign = if z.re < 0.0 && exponent % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        return Complex64::new(sign * magnitude, 0.0);
    }
    let mut unit = z / r;
    let mut acc = Complex64::new(1.0, 0.0);
    let mut e = exponent;
    while e > 0 {
        if e & 1 == 1 {
            acc *= unit;
            acc /= acc.norm();
        }
        unit *= unit;
        unit /= unit.norm();
        e >>= 1;
    }
    acc * magnitude
}

/// `x^e` for a real base through the same log-magnitude route.
pub fn pow_real(x: f64, exponent: u64) -> f64 {
    pow_complex(Complex64::new(x, 0.0), exponent).re
}

/// `z^M` for `z = 1 - gamma1 h + gamma2 h^2`, evaluated as
/// `exp(M ln_1p(-gamma1 h + gamma2 h^2))`.
///
/// Forming `z` first and exponentiating loses the `gamma2 h^2` term once
/// `h^2` drops below the spacing of floats near one, even though that term
/// moves `z^(1/h)` at order `h`. Working on the offset keeps full relative
/// precision.
pub fn stable_pow(gamma1: f64, gamma2: f64, h: f64, exponent: u64) -> Result<Complex64> {
    let offset = h * (gamma2 * h - gamma1);
    if offset.abs() >= 1.0 {
        return Err(Error::ExpansionInvalid(offset));
    }
    let value = (exponent as f64 * offset.ln_1p()).exp();
    Ok(Complex64::new(value, 0.0))
}

/// The straightforward evaluation `(1 - gamma1 h + gamma2 h^2)^M`, kept as a
/// comparison point for the precision loss that [`stable_pow`] avoids.
pub fn naive_pow(gamma1: f64, gamma2: f64, h: f64, exponent: u64) -> f64 {
    let z = 1.0 - gamma1 * h + gamma2 * h * h;
    let mut acc = 1.0f64;
    let mut base = z;
    let mut e = exponent;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow_complex_agrees_with_powu_for_small_exponents() {
        let z = Complex64::new(0.4, -0.7);
        for e in 0..40u32 {
            let got = pow_complex(z, e as u64);
            let want = z.powu(e);
            assert!((got - want).norm() <= 1e-13 * want.norm().max(1e-30));
        }
    }

    #[test]
    fn pow_complex_handles_degenerate_bases() {
        assert_eq!(
            pow_complex(Complex64::new(0.0, 0.0), 0),
            Complex64::new(1.0, 0.0)
        );
        assert_eq!(
            pow_complex(Complex64::new(0.0, 0.0), 7),
            Complex64::new(0.0, 0.0)
        );
        // deep underflow becomes exact zero
        assert_eq!(
            pow_complex(Complex64::new(0.5, 0.0), 1 << 40),
            Complex64::new(0.0, 0.0)
        );
        // negative real base keeps exact sign parity at huge exponents
        let v = pow_complex(Complex64::new(-0.999999999, 0.0), (1 << 33) + 1);
        assert!(v.re < 0.0);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn stable_pow_trivial_cases() {
        assert_eq!(
            stable_pow(0.0, 0.0, 2f64.powi(-30), 1 << 30).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        assert!(stable_pow(3.0, 0.0, 0.5, 2).is_err());
    }

    #[test]
    fn stable_pow_tracks_first_order_correction() {
        // gamma1 = 1, gamma2 = 0: z^M = e^-1 (1 - h/2 + O(h^2))
        let h = 2f64.powi(-20);
        let got = stable_pow(1.0, 0.0, h, 1 << 20).unwrap().re;
        let leading = (-1.0f64).exp() * (1.0 - h / 2.0);
        assert!((got - leading).abs() <= 1e-12 * leading.abs());
    }
}
