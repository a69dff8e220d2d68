//! Band circulant symbols: Laurent polynomial evaluation, the `g`/`h`
//! polynomial pair, spectra, symbol products, dense materialization and a
//! DFT-based inverse-column oracle.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Largest `N` for which a dense circulant is materialized.
pub const DENSE_CIRCULANT_CAP: usize = 1 << 12;

/// Relative eigenvalue threshold below which a spectrum counts as singular.
const SINGULAR_REL_TOL: f64 = 1e-14;

/// Generator of a band circulant: coefficients `a_{-n}, ..., a_{m-1}` of the
/// first column, stored in ascending index order.
///
/// The matrix it generates has `a_k` on the (cyclic) diagonal `i - j = k mod N`,
/// so the first column reads `(a_0, ..., a_{m-1}, 0, ..., 0, a_{-n}, ..., a_{-1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandSymbol {
    lower: usize,
    coeffs: Vec<Complex64>,
}

impl BandSymbol {
    /// Builds a symbol from the lower bandwidth `n` and coefficients
    /// `a_{-n}, ..., a_{m-1}`. Both extreme coefficients must be nonzero.
    pub fn new(lower: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() <= lower {
            return Err(Error::InvalidInput(format!(
                "need at least {} coefficients for lower bandwidth {}",
                lower + 1,
                lower
            )));
        }
        if coeffs[0].norm() == 0.0 {
            return Err(Error::InvalidInput("a_{-n} must be nonzero".into()));
        }
        if coeffs.last().unwrap().norm() == 0.0 {
            return Err(Error::InvalidInput("a_{m-1} must be nonzero".into()));
        }
        Ok(Self { lower, coeffs })
    }

    /// Same as [`BandSymbol::new`] with real coefficients.
    pub fn from_real(lower: usize, coeffs: &[f64]) -> Result<Self> {
        Self::new(
            lower,
            coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    /// Mass matrix generator `circ(4, 1, 0, ..., 0, 1)`.
    pub fn mass() -> Self {
        Self::from_real(1, &[1.0, 4.0, 1.0]).unwrap()
    }

    /// Periodic stiffness generator `circ(2, -1, 0, ..., 0, -1)` (singular).
    pub fn stiffness() -> Self {
        Self::from_real(1, &[-1.0, 2.0, -1.0]).unwrap()
    }

    /// Shifted stiffness generator `circ(2 + s, -1, 0, ..., 0, -1)`.
    pub fn stiffness_shifted(shift: f64) -> Self {
        Self::from_real(1, &[-1.0, 2.0 + shift, -1.0]).unwrap()
    }

    /// Lower bandwidth `n` (offsets `-n..0`).
    pub fn lower(&self) -> usize {
        self.lower
    }

    /// Upper bandwidth `m` (offsets `0..m`, inclusive of the diagonal).
    pub fn upper(&self) -> usize {
        self.coeffs.len() - self.lower
    }

    /// Total bandwidth `m + n`.
    pub fn band_width(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient `a_k` for `k` in `[-n, m-1]`, zero outside.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let idx = k + self.lower as i64;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[idx as usize]
        }
    }

    /// Coefficients `a_{-n}, ..., a_{m-1}` in ascending order.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Evaluates the Laurent polynomial `f(z) = sum a_k z^k`.
    pub fn laurent_eval(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() == 0.0 && self.lower > 0 {
            return Err(Error::InvalidInput(
                "Laurent polynomial with negative powers is undefined at z = 0".into(),
            ));
        }
        // Horner on g(z) = z^n f(z), then divide by z^n.
        let g = self.g_coeffs();
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in g.iter().rev() {
            acc = acc * z + c;
        }
        Ok(acc / z.powi(self.lower as i32))
    }

    fn g_coeffs(&self) -> Vec<Complex64> {
        self.coeffs.clone()
    }

    fn h_coeffs(&self) -> Vec<Complex64> {
        let mut rev = self.coeffs.clone();
        rev.reverse();
        rev
    }

    /// The polynomial pair `(g, h)` with `g(z) = z^n f(z)` and
    /// `h(z) = z^{m+n-1} g(1/z)`, both as ascending coefficient lists of
    /// degree `m + n - 1`.
    pub fn gh_polynomials(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        (self.g_coeffs(), self.h_coeffs())
    }

    /// Eigenvalues `lambda_s = f(e^{-2 pi i s / N})` of the size-`N` circulant.
    pub fn spectrum(&self, n_size: usize) -> Result<CirculantSpectrum> {
        self.check_band(n_size)?;
        let eigenvalues = (0..n_size)
            .map(|s| {
                let angle = -2.0 * std::f64::consts::PI * s as f64 / n_size as f64;
                let z = Complex64::from_polar(1.0, angle);
                self.laurent_eval(z).expect("unit-circle point is nonzero")
            })
            .collect();
        Ok(CirculantSpectrum {
            eigenvalues,
            size: n_size,
        })
    }

    /// First column of the inverse circulant, computed from the eigenvalues:
    /// `b_j = (1/N) sum_s lambda_s^{-1} e^{2 pi i s j / N}`.
    ///
    /// Serves as an exact oracle for the closed-form column. Uses an FFT when
    /// `N` is a power of two and the naive quadratic sum otherwise.
    pub fn dft_inverse_column(&self, n_size: usize) -> Result<Vec<Complex64>> {
        let spectrum = self.spectrum(n_size)?;
        if spectrum.is_singular() {
            return Err(Error::SingularSpectrum);
        }
        let inv: Vec<Complex64> = spectrum.eigenvalues.iter().map(|l| 1.0 / l).collect();
        let scale = 1.0 / n_size as f64;
        if n_size.is_power_of_two() {
            let mut buf = inv;
            FftPlanner::new().plan_fft_inverse(n_size).process(&mut buf);
            Ok(buf.into_iter().map(|v| v * scale).collect())
        } else {
            let mut out = vec![Complex64::new(0.0, 0.0); n_size];
            for (j, slot) in out.iter_mut().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (s, &l) in inv.iter().enumerate() {
                    let angle =
                        2.0 * std::f64::consts::PI * (s * j % n_size) as f64 / n_size as f64;
                    acc += l * Complex64::from_polar(1.0, angle);
                }
                *slot = acc * scale;
            }
            Ok(out)
        }
    }

    /// Symbol of the product `A B` of two band circulants of size `N`:
    /// the coefficient (Cauchy) product of the Laurent polynomials. Requires
    /// `N >= m_A + n_A + m_B + n_B` so the product band does not wrap.
    pub fn laurent_product(&self, other: &BandSymbol, n_size: usize) -> Result<BandSymbol> {
        let need = self.band_width() + other.band_width();
        if n_size < need {
            return Err(Error::BandWrap {
                n: n_size,
                m: self.upper() + other.upper(),
                lower: self.lower + other.lower,
            });
        }
        let lower = self.lower + other.lower;
        let len = self.coeffs.len() + other.coeffs.len() - 1;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); len];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        BandSymbol::new(lower, coeffs)
    }

    /// Dense `N x N` circulant with `a_k` on cyclic diagonal `k`.
    pub fn materialize(&self, n_size: usize) -> Result<DMatrix<Complex64>> {
        self.check_band(n_size)?;
        if n_size > DENSE_CIRCULANT_CAP {
            return Err(Error::MaterializationCap {
                l: n_size.ilog2() as usize,
                cap: DENSE_CIRCULANT_CAP.ilog2() as usize,
            });
        }
        let mut col = vec![Complex64::new(0.0, 0.0); n_size];
        for (idx, &c) in self.coeffs.iter().enumerate() {
            let k = idx as i64 - self.lower as i64;
            let row = k.rem_euclid(n_size as i64) as usize;
            col[row] = c;
        }
        Ok(DMatrix::from_fn(n_size, n_size, |i, j| {
            col[(i + n_size - j % n_size) % n_size]
        }))
    }

    fn check_band(&self, n_size: usize) -> Result<()> {
        if n_size < self.band_width() {
            return Err(Error::BandWrap {
                n: n_size,
                m: self.upper(),
                lower: self.lower,
            });
        }
        Ok(())
    }
}

impl std::fmt::Display for BandSymbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let fmt_c = |c: &Complex64| {
            if c.im == 0.0 {
                format!("{}", c.re)
            } else if c.im < 0.0 {
                format!("{}{}j", c.re, c.im)
            } else {
                format!("{}+{}j", c.re, c.im)
            }
        };
        let neg: Vec<String> = self.coeffs[..self.lower].iter().map(fmt_c).collect();
        let pos: Vec<String> = self.coeffs[self.lower..].iter().map(fmt_c).collect();
        write!(f, "circ: {} | {}", neg.join(" "), pos.join(" "))
    }
}

/// Eigenvalues of a size-`N` band circulant.
#[derive(Debug, Clone)]
pub struct CirculantSpectrum {
    pub eigenvalues: Vec<Complex64>,
    pub size: usize,
}

impl CirculantSpectrum {
    pub fn max_magnitude(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|l| l.norm())
            .fold(0.0, f64::max)
    }

    pub fn min_magnitude(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|l| l.norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// `max |lambda| / min |lambda|`; infinite for singular spectra.
    pub fn condition_number(&self) -> f64 {
        self.max_magnitude() / self.min_magnitude()
    }

    pub fn is_singular(&self) -> bool {
        self.min_magnitude() <= SINGULAR_REL_TOL * self.max_magnitude()
    }
}

/// Parses the CLI symbol format `[circ:] a_{-n} ... a_{-1} | a_0 ... a_{m-1}`
/// with decimal or `re+imj` complex literals.
pub fn parse_symbol(text: &str) -> Result<BandSymbol> {
    let body = text.trim().strip_prefix("circ:").unwrap_or(text.trim());
    let mut halves = body.split('|');
    let neg = halves.next().unwrap_or("");
    let pos = halves
        .next()
        .ok_or_else(|| Error::InvalidInput("symbol must contain '|'".into()))?;
    if halves.next().is_some() {
        return Err(Error::InvalidInput(
            "symbol must contain a single '|'".into(),
        ));
    }
    let parse_half = |half: &str| -> Result<Vec<Complex64>> {
        half.split_whitespace().map(parse_complex).collect()
    };
    let neg_coeffs = parse_half(neg)?;
    let pos_coeffs = parse_half(pos)?;
    if pos_coeffs.is_empty() {
        return Err(Error::InvalidInput("need at least a_0".into()));
    }
    let lower = neg_coeffs.len();
    let mut coeffs = neg_coeffs;
    coeffs.extend(pos_coeffs);
    BandSymbol::new(lower, coeffs)
}

/// Parses `re`, `imj`, or `re+imj` / `re-imj` literals.
pub fn parse_complex(token: &str) -> Result<Complex64> {
    let bad = |t: &str| Error::InvalidInput(format!("cannot parse complex literal '{t}'"));
    let t = token.trim();
    if let Some(imag) = t.strip_suffix('j') {
        // Split at the last +/- that is not part of an exponent or leading sign.
        let bytes = imag.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            let c = bytes[i] as char;
            if (c == '+' || c == '-') && !matches!(bytes[i - 1] as char, 'e' | 'E') {
                split = Some(i);
                break;
            }
        }
        match split {
            Some(i) => {
                let re: f64 = imag[..i].parse().map_err(|_| bad(t))?;
                let im_str = &imag[i..];
                let im: f64 = if im_str == "+" {
                    1.0
                } else if im_str == "-" {
                    -1.0
                } else {
                    im_str.parse().map_err(|_| bad(t))?
                };
                Ok(Complex64::new(re, im))
            }
            None => {
                let im: f64 = if imag.is_empty() {
                    1.0
                } else if imag == "-" {
                    -1.0
                } else {
                    imag.parse().map_err(|_| bad(t))?
                };
                Ok(Complex64::new(0.0, im))
            }
        }
    } else {
        let re: f64 = t.parse().map_err(|_| bad(t))?;
        Ok(Complex64::new(re, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Counterexample symbol `circ(1, 1, 0, ..., 0)`: invertible at N = 3
    /// even though f(z) = 1 + z vanishes on the unit circle.
    fn counterexample() -> BandSymbol {
        BandSymbol::from_real(0, &[1.0, 1.0]).unwrap()
    }

    #[test]
    fn laurent_eval_examples() {
        let mass = BandSymbol::mass();
        assert_eq!(mass.laurent_eval(c(1.0, 0.0)).unwrap(), c(6.0, 0.0));

        let ce = counterexample();
        assert!(ce.laurent_eval(c(-1.0, 0.0)).unwrap().norm() < 1e-15);

        let stiff = BandSymbol::stiffness();
        let z = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_2);
        let v = stiff.laurent_eval(z).unwrap();
        assert!((v - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn laurent_eval_rejects_zero() {
        assert!(BandSymbol::mass().laurent_eval(c(0.0, 0.0)).is_err());
    }

    #[test]
    fn gh_polynomials_examples() {
        let (g, h) = BandSymbol::mass().gh_polynomials();
        assert_eq!(g, vec![c(1.0, 0.0), c(4.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(g, h); // symmetric symbol

        let sym = BandSymbol::from_real(1, &[-0.75, 3.25, -4.0, 1.0]).unwrap();
        let (g, h) = sym.gh_polynomials();
        assert_eq!(
            g,
            vec![c(-0.75, 0.0), c(3.25, 0.0), c(-4.0, 0.0), c(1.0, 0.0)]
        );
        assert_eq!(
            h,
            vec![c(1.0, 0.0), c(-4.0, 0.0), c(3.25, 0.0), c(-0.75, 0.0)]
        );
    }

    #[test]
    fn spectrum_examples() {
        let ce = counterexample();
        let s3 = ce.spectrum(3).unwrap();
        assert!(!s3.is_singular());
        let s4 = ce.spectrum(4).unwrap();
        assert!(s4.is_singular());
        // dense determinant agrees: singular at N = 4
        let dense = ce.materialize(4).unwrap();
        let det = dense.full_piv_lu().determinant();
        assert!(det.norm() < 1e-12);

        let stiff = BandSymbol::stiffness();
        for n in [3usize, 8, 17] {
            let sp = stiff.spectrum(n).unwrap();
            assert!(sp.eigenvalues[0].norm() < 1e-14);
        }
    }

    #[test]
    fn spectrum_rejects_band_wrap() {
        assert!(BandSymbol::mass().spectrum(2).is_err());
    }

    #[test]
    fn dft_inverse_column_examples() {
        let identity = BandSymbol::from_real(0, &[1.0]).unwrap();
        let col = identity.dft_inverse_column(8).unwrap();
        assert!((col[0] - c(1.0, 0.0)).norm() < 1e-14);
        for v in &col[1..] {
            assert!(v.norm() < 1e-14);
        }

        let ce = counterexample();
        let col = ce.dft_inverse_column(3).unwrap();
        let expected = [0.5, -0.5, 0.5];
        for (v, e) in col.iter().zip(expected) {
            assert!((v - c(e, 0.0)).norm() < 1e-13);
        }
        assert!(matches!(
            ce.dft_inverse_column(4),
            Err(Error::SingularSpectrum)
        ));

        // mass symbol vs dense LU at N = 8
        let mass = BandSymbol::mass();
        let col = mass.dft_inverse_column(8).unwrap();
        let dense = mass.materialize(8).unwrap();
        let lu = dense.full_piv_lu();
        let mut e0 = nalgebra::DVector::<Complex64>::zeros(8);
        e0[0] = c(1.0, 0.0);
        let exact = lu.solve(&e0).unwrap();
        for j in 0..8 {
            assert!((col[j] - exact[j]).norm() < 1e-13);
        }
    }

    #[test]
    fn laurent_product_examples() {
        let identity = BandSymbol::from_real(0, &[1.0]).unwrap();
        let mass = BandSymbol::mass();
        let p = mass.laurent_product(&identity, 8).unwrap();
        assert_eq!(p, mass);

        let stiff = BandSymbol::stiffness();
        let sq = stiff.laurent_product(&stiff, 8).unwrap();
        assert_eq!(sq.lower(), 2);
        assert_eq!(sq.upper(), 3);
        let expected = [1.0, -4.0, 6.0, -4.0, 1.0];
        for (got, want) in sq.coeffs().iter().zip(expected) {
            assert!((got - c(want, 0.0)).norm() < 1e-14);
        }
        // dense product agrees at N = 8
        let dense = stiff.materialize(8).unwrap() * stiff.materialize(8).unwrap();
        let direct = sq.materialize(8).unwrap();
        assert!((dense - direct).norm() < 1e-13);

        let mixed = BandSymbol::mass().laurent_product(&stiff, 16).unwrap();
        let dense = BandSymbol::mass().materialize(16).unwrap() * stiff.materialize(16).unwrap();
        assert!((dense - mixed.materialize(16).unwrap()).norm() < 1e-13);

        assert!(stiff.laurent_product(&stiff, 3).is_err());
    }

    #[test]
    fn materialize_examples() {
        let identity = BandSymbol::from_real(0, &[1.0]).unwrap();
        let eye = identity.materialize(4).unwrap();
        assert_eq!(eye, DMatrix::identity(4, 4));

        let ce = counterexample().materialize(3).unwrap();
        let want = DMatrix::from_row_slice(
            3,
            3,
            &[
                c(1.0, 0.0),
                c(0.0, 0.0),
                c(1.0, 0.0),
                c(1.0, 0.0),
                c(1.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(1.0, 0.0),
                c(1.0, 0.0),
            ],
        );
        assert_eq!(ce, want);

        let mass4 = BandSymbol::mass().materialize(4).unwrap();
        let first_col: Vec<f64> = (0..4).map(|i| mass4[(i, 0)].re).collect();
        assert_eq!(first_col, vec![4.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn det_matches_eigenvalue_product() {
        for n in [4usize, 7, 16, 33, 64] {
            let sym = BandSymbol::new(1, vec![c(0.3, -0.1), c(2.0, 0.4), c(-0.5, 0.9)]).unwrap();
            let sp = sym.spectrum(n).unwrap();
            let prod: Complex64 = sp.eigenvalues.iter().product();
            let det = sym.materialize(n).unwrap().full_piv_lu().determinant();
            assert!(
                (det - prod).norm() <= 1e-8 * prod.norm().max(1.0),
                "n = {n}: det {det} vs product {prod}"
            );
        }
    }

    #[test]
    fn dft_column_matches_dense_inverse_on_random_symbols() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let m = rng.gen_range(1..=4usize);
            let n = rng.gen_range(0..=(5 - m).min(3));
            let coeffs: Vec<Complex64> = (0..m + n)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let Ok(sym) = BandSymbol::new(n, coeffs) else {
                continue;
            };
            for size in [8usize, 16, 64] {
                if sym.band_width() > size {
                    continue;
                }
                if sym.spectrum(size).unwrap().condition_number() > 1e3 {
                    continue; // comparison needs a well-conditioned draw
                }
                let Ok(col) = sym.dft_inverse_column(size) else {
                    continue;
                };
                let dense = sym.materialize(size).unwrap();
                let mut e0 = nalgebra::DVector::<Complex64>::zeros(size);
                e0[0] = c(1.0, 0.0);
                let exact = dense.clone().full_piv_lu().solve(&e0).unwrap();
                let scale = exact.iter().map(|v| v.norm()).fold(0.0, f64::max);
                for j in 0..size {
                    assert!((col[j] - exact[j]).norm() <= 1e-10 * scale);
                }
            }
        }
    }

    #[test]
    fn laurent_product_commutes_and_associates() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let mut draw = |m: usize, n: usize| {
                BandSymbol::new(
                    n,
                    (0..m + n)
                        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                        .collect(),
                )
            };
            let (Ok(a), Ok(b), Ok(d)) = (draw(2, 1), draw(1, 1), draw(2, 0)) else {
                continue;
            };
            let size = 32;
            let ab = a.laurent_product(&b, size).unwrap();
            let ba = b.laurent_product(&a, size).unwrap();
            for (x, y) in ab.coeffs().iter().zip(ba.coeffs()) {
                assert!((x - y).norm() <= 1e-13);
            }
            let left = ab.laurent_product(&d, size).unwrap();
            let right = a
                .laurent_product(&b.laurent_product(&d, size).unwrap(), size)
                .unwrap();
            assert_eq!(left.lower(), right.lower());
            for (x, y) in left.coeffs().iter().zip(right.coeffs()) {
                assert!((x - y).norm() <= 1e-13);
            }
        }
    }

    #[test]
    fn materialize_respects_cap() {
        assert!(BandSymbol::mass().materialize(1 << 13).is_err());
    }

    #[test]
    fn parse_symbol_roundtrip() {
        let sym = parse_symbol("circ: 1 | 4 1").unwrap();
        assert_eq!(sym, BandSymbol::mass());
        let sym = parse_symbol(" 1 | 4 1 ").unwrap();
        assert_eq!(sym, BandSymbol::mass());
        let sym = parse_symbol("0.5-2j 1 | 4 1e-3+1j").unwrap();
        assert_eq!(sym.coeff(-2), c(0.5, -2.0));
        assert_eq!(sym.coeff(1), c(1e-3, 1.0));
        assert!(parse_symbol("1 2 3").is_err());
        assert!(parse_symbol("x | 1").is_err());
        assert!(parse_symbol("1 | 0").is_err());
    }
}
