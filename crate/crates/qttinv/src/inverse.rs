//! Closed-form first column of the inverse of a band circulant.
//!
//! The column is a linear combination of (polynomial times exponential)
//! sequences in the inside-circle roots of the symbol polynomials `g` and
//! `h`. Coefficients mix derivative factors of `1/g_k` and `1/(1 - z^N)`
//! evaluated through [`Jet`] arithmetic, so multiple roots are handled
//! exactly. Every retained exponent is non-negative, which keeps the
//! evaluation stable for arbitrarily large `N`.

use num_complex::Complex64;

use crate::circulant::BandSymbol;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::powers::{pow_complex, pow_real};
use crate::roots::{root_system, RootCluster, RootSystem};

/// `M (M-1) ... (M-r+1)`, and one when `r = 0`.
pub fn falling_factorial(m: f64, r: usize) -> f64 {
    let mut acc = 1.0;
    for t in 0..r {
        acc *= m - t as f64;
    }
    acc
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut acc = 1.0;
    for t in 0..k {
        acc *= (n - t) as f64 / (t + 1) as f64;
    }
    acc
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|t| t as f64).product()
}

/// One summand of the closed-form column: coefficient, root, and the index
/// of the falling-factorial factor attached to it.
#[derive(Debug, Clone, Copy)]
pub struct ColumnTerm {
    pub root: Complex64,
    pub derivative_index: usize,
    pub coefficient: Complex64,
}

/// Evaluator for the first column of the inverse of a size-`N` band
/// circulant, split into the contributions of the `g`- and `h`-side roots.
#[derive(Debug, Clone)]
pub struct ColumnModel {
    pub size: u64,
    pub upper: usize,
    pub lower: usize,
    pub terms_g: Vec<ColumnTerm>,
    pub terms_h: Vec<ColumnTerm>,
}

impl ColumnModel {
    /// Only inside-circle roots may appear; exponents then stay non-negative.
    pub fn max_root_magnitude(&self) -> f64 {
        self.terms_g
            .iter()
            .chain(&self.terms_h)
            .map(|t| t.root.norm())
            .fold(0.0, f64::max)
    }

    pub fn all_simple(&self) -> bool {
        self.terms_g
            .iter()
            .chain(&self.terms_h)
            .all(|t| t.derivative_index == 0)
    }
}

/// Derivative factors `(1/g_k)^(d)` at the cluster center, where `g_k` is the
/// polynomial with this cluster's root divided out entirely.
fn deflated_reciprocal_jet(
    at: Complex64,
    order: usize,
    leading: Complex64,
    others: &[RootCluster],
) -> Result<Jet> {
    let mut jet = Jet::constant(leading, order);
    for cluster in others {
        let factor = Jet::variable(at, order).add(&Jet::constant(-cluster.center, order));
        jet = jet.mul(&factor.powi(cluster.multiplicity));
    }
    jet.reciprocal()
}

/// Derivative factors `(1/(1 - z^N))^(d)` at `z0` with `|z0| < 1`.
fn geometric_tail_reciprocal_jet(z0: Complex64, order: usize, size: u64) -> Result<Jet> {
    let mut coeffs = Vec::with_capacity(order + 1);
    coeffs.push(Complex64::new(1.0, 0.0) - pow_complex(z0, size));
    for r in 1..=order {
        let ff = falling_factorial(size as f64, r);
        coeffs.push(-pow_complex(z0, size - r as u64) * (ff / factorial(r)));
    }
    Jet::from_coeffs(coeffs).reciprocal()
}

fn side_terms(
    inside: &[RootCluster],
    all: &[RootCluster],
    leading: Complex64,
    size: u64,
) -> Result<Vec<ColumnTerm>> {
    let mut terms = Vec::new();
    for (k, cluster) in inside.iter().enumerate() {
        let mult = cluster.multiplicity;
        let order = mult - 1;
        // `all` lists the inside clusters first, so position k is this one.
        let others: Vec<RootCluster> = all
            .iter()
            .enumerate()
            .filter(|&(r, _)| r != k)
            .map(|(_, c)| *c)
            .collect();
        let inv_gk = deflated_reciprocal_jet(cluster.center, order, leading, &others)?;
        let inv_tail = geometric_tail_reciprocal_jet(cluster.center, order, size)?;
        let norm = 1.0 / factorial(order);
        for p_prime in 0..mult {
            let mut coefficient = Complex64::new(0.0, 0.0);
            for p in p_prime..mult {
                coefficient += inv_gk.derivative(order - p)
                    * inv_tail.derivative(p - p_prime)
                    * (norm * binomial(order, p) * binomial(p, p_prime));
            }
            terms.push(ColumnTerm {
                root: cluster.center,
                derivative_index: p_prime,
                coefficient,
            });
        }
    }
    Ok(terms)
}

/// Orders the clusters of a root system with the inside ones first, matching
/// the layout [`side_terms`] expects.
fn ordered_clusters(system: &RootSystem) -> Vec<RootCluster> {
    let mut all = system.inside.clone();
    all.extend_from_slice(&system.outside);
    all
}

/// Builds the closed-form column evaluator from the symbol and the root
/// systems of `g` and `h`. Requires `m >= 2` (see [`inverse_column`] for the
/// general entry point that also covers `m = 1`).
pub fn build_column_model(
    symbol: &BandSymbol,
    roots_g: &RootSystem,
    roots_h: &RootSystem,
    size: u64,
) -> Result<ColumnModel> {
    let m = symbol.upper();
    let n = symbol.lower();
    if m < 2 {
        return Err(Error::InvalidInput(
            "column model needs m >= 2; use inverse_column for m = 1".into(),
        ));
    }
    if size < (m + n) as u64 {
        return Err(Error::BandWrap {
            n: size as usize,
            m,
            lower: n,
        });
    }
    let (g, h) = symbol.gh_polynomials();
    let lead_g = *g.last().unwrap();
    let lead_h = *h.last().unwrap();
    let terms_g = side_terms(&roots_g.inside, &ordered_clusters(roots_g), lead_g, size)?;
    let terms_h = side_terms(&roots_h.inside, &ordered_clusters(roots_h), lead_h, size)?;
    Ok(ColumnModel {
        size,
        upper: m,
        lower: n,
        terms_g,
        terms_h,
    })
}

/// Evaluates the model at index `j` of the first column.
pub fn eval_column(model: &ColumnModel, j: u64) -> Result<Complex64> {
    if j >= model.size {
        return Err(Error::IndexOutOfRange {
            index: j,
            size: model.size,
        });
    }
    let mut value = Complex64::new(0.0, 0.0);
    // g side: exponent N - j + n - 1, always >= 0 for j < N, n >= 0.
    let e_g = model.size - 1 - j + model.lower as u64;
    for term in &model.terms_g {
        let ff = falling_factorial(e_g as f64, term.derivative_index);
        if ff == 0.0 {
            continue;
        }
        value += term.coefficient * ff * pow_complex(term.root, e_g - term.derivative_index as u64);
    }
    // h side: exponent j + m - 2, always >= 0 for m >= 2.
    let e_h = j + model.upper as u64 - 2;
    for term in &model.terms_h {
        let ff = falling_factorial(e_h as f64, term.derivative_index);
        if ff == 0.0 {
            continue;
        }
        value += term.coefficient * ff * pow_complex(term.root, e_h - term.derivative_index as u64);
    }
    Ok(value)
}

/// Simple-root evaluation: `b_j = sum_k z_k^(N-j+n-1) / (g_k(z_k)(1-z_k^N))
/// + sum_k w_k^(j+m-2) / (h_k(w_k)(1-w_k^N))` with `g_k(z) = g(z)/(z-z_k)`.
///
/// The `h`-side roots are the reciprocals of the outside roots of `g`.
/// Returns [`Error::RepeatedRoot`] whenever any root is repeated; callers
/// fall back to the general model.
pub fn eval_column_simple(
    symbol: &BandSymbol,
    roots_g: &RootSystem,
    size: u64,
    j: u64,
) -> Result<Complex64> {
    if j >= size {
        return Err(Error::IndexOutOfRange { index: j, size });
    }
    let m = symbol.upper();
    let n = symbol.lower();
    if m < 2 {
        return Err(Error::InvalidInput("simple-root path needs m >= 2".into()));
    }
    if let Some(repeated) = roots_g.clusters().find(|c| c.multiplicity > 1) {
        return Err(Error::RepeatedRoot {
            root: repeated.center,
        });
    }
    let (g, h) = symbol.gh_polynomials();
    let lead_g = *g.last().unwrap();
    let lead_h = *h.last().unwrap();
    let g_all = ordered_clusters(roots_g);
    let mut value = Complex64::new(0.0, 0.0);
    for cluster in &roots_g.inside {
        let z = cluster.center;
        let mut g_k = lead_g;
        for other in &g_all {
            if other.center != z {
                g_k *= z - other.center;
            }
        }
        let tail = Complex64::new(1.0, 0.0) - pow_complex(z, size);
        value += pow_complex(z, size - 1 - j + n as u64) / (g_k * tail);
    }
    // h roots: reciprocals of all g roots; inside ones come from g's outside.
    let h_all: Vec<Complex64> = g_all.iter().map(|c| 1.0 / c.center).collect();
    for cluster in &roots_g.outside {
        let w = 1.0 / cluster.center;
        let mut h_k = lead_h;
        for &other in &h_all {
            if other != w {
                h_k *= w - other;
            }
        }
        let tail = Complex64::new(1.0, 0.0) - pow_complex(w, size);
        value += pow_complex(w, j + m as u64 - 2) / (h_k * tail);
    }
    Ok(value)
}

/// Entry `(j, 0)` of the inverse of the biinfinite banded Toeplitz operator
/// with the same symbol: trapezoidal quadrature of `(1/2 pi i) oint
/// z^(-j-1) / f(z) dz` over the unit circle. Converges geometrically in the
/// point count; periodizing over `j - N l` reproduces the circulant column.
///
/// The trapezoid rule on the circle aliases indices modulo the point count,
/// so results are meaningful for `|j|` well below half of it.
pub fn contour_oracle(symbol: &BandSymbol, j: i64, quadrature_points: usize) -> Result<Complex64> {
    let min_points = 4 * symbol.band_width();
    if quadrature_points < min_points {
        return Err(Error::InvalidInput(format!(
            "need at least {min_points} quadrature points"
        )));
    }
    let coeff_scale: f64 = symbol.coeffs().iter().map(|c| c.norm()).sum();
    let q = quadrature_points as i128;
    let mut acc = Complex64::new(0.0, 0.0);
    for s in 0..quadrature_points {
        let angle = 2.0 * std::f64::consts::PI * s as f64 / quadrature_points as f64;
        let zeta = Complex64::from_polar(1.0, angle);
        let f = symbol.laurent_eval(zeta)?;
        if f.norm() <= 1e-13 * coeff_scale {
            return Err(Error::RootOnUnitCircle { root: zeta });
        }
        let phase = ((s as i128 * -(j as i128)).rem_euclid(q)) as f64;
        let power = Complex64::from_polar(
            1.0,
            2.0 * std::f64::consts::PI * phase / quadrature_points as f64,
        );
        acc += power / f;
    }
    Ok(acc / quadrature_points as f64)
}

/// Closed form for the inverse column of the mass matrix
/// `circ(4, 1, 0, ..., 0, 1)`.
pub fn mass_inverse_column(size: u64, j: u64) -> f64 {
    let z1 = 3.0f64.sqrt() - 2.0;
    let scale = 1.0 / (2.0 * 3.0f64.sqrt() * (1.0 - pow_real(z1, size)));
    scale * (pow_real(z1, size - j) + pow_real(z1, j))
}

/// Closed form for the inverse column of `circ(2 + s, -1, 0, ..., 0, -1)`,
/// `s > 0`.
pub fn shifted_stiffness_inverse_column(shift: f64, size: u64, j: u64) -> Result<f64> {
    if shift <= 0.0 {
        return Err(Error::InvalidInput("shift must be positive".into()));
    }
    let z1 = 1.0 + shift / 2.0 - (shift * shift / 4.0 + shift).sqrt();
    let scale = 1.0 / ((shift * shift + 4.0 * shift).sqrt() * (1.0 - pow_real(z1, size)));
    Ok(scale * (pow_real(z1, size - j) + pow_real(z1, j)))
}

/// Column of the Moore-Penrose pseudoinverse of the singular stiffness
/// matrix `circ(2, -1, 0, ..., 0, -1)`: `(6 i^2 - 6 N i + N^2 - 1) / (12 N)`.
pub fn stiffness_pseudoinverse_column(size: u64, i: u64) -> f64 {
    let n = size as f64;
    let x = i as f64;
    (6.0 * x * x - 6.0 * n * x + n * n - 1.0) / (12.0 * n)
}

/// Closed-form inverse column of an arbitrary nonsingular band circulant.
///
/// Covers the `m = 1` case by shifting the symbol one diagonal up (a cyclic
/// rotation of the resulting column) and `m = 1, n = 0` directly as a scaled
/// identity.
#[derive(Debug, Clone)]
pub enum InverseColumn {
    Model { model: ColumnModel, rotation: u64 },
    Diagonal { size: u64, value: Complex64 },
}

impl InverseColumn {
    pub fn eval(&self, j: u64) -> Result<Complex64> {
        match self {
            InverseColumn::Model { model, rotation } => {
                if j >= model.size {
                    return Err(Error::IndexOutOfRange {
                        index: j,
                        size: model.size,
                    });
                }
                eval_column(model, (j + model.size - rotation) % model.size)
            }
            InverseColumn::Diagonal { size, value } => {
                if j >= *size {
                    return Err(Error::IndexOutOfRange {
                        index: j,
                        size: *size,
                    });
                }
                Ok(if j == 0 {
                    *value
                } else {
                    Complex64::new(0.0, 0.0)
                })
            }
        }
    }

    pub fn size(&self) -> u64 {
        match self {
            InverseColumn::Model { model, .. } => model.size,
            InverseColumn::Diagonal { size, .. } => *size,
        }
    }

    pub fn model(&self) -> Option<&ColumnModel> {
        match self {
            InverseColumn::Model { model, .. } => Some(model),
            InverseColumn::Diagonal { .. } => None,
        }
    }
}

/// Root systems of `g` and `h` with default clustering parameters.
pub fn root_systems(symbol: &BandSymbol) -> Result<(RootSystem, RootSystem)> {
    let (g, h) = symbol.gh_polynomials();
    Ok((root_system(&g)?, root_system(&h)?))
}

/// Full pipeline: roots, classification, column model; `m = 1` goes through
/// the shifted symbol.
pub fn inverse_column(symbol: &BandSymbol, size: u64) -> Result<InverseColumn> {
    let m = symbol.upper();
    let n = symbol.lower();
    if size < (m + n) as u64 {
        return Err(Error::BandWrap {
            n: size as usize,
            m,
            lower: n,
        });
    }
    if m >= 2 {
        let (roots_g, roots_h) = root_systems(symbol)?;
        let model = build_column_model(symbol, &roots_g, &roots_h, size)?;
        return Ok(InverseColumn::Model { model, rotation: 0 });
    }
    if n == 0 {
        // diagonal circulant a_0 I
        return Ok(InverseColumn::Diagonal {
            size,
            value: 1.0 / symbol.coeffs()[0],
        });
    }
    // m = 1: multiply the symbol by z (m grows to 2, n shrinks by one) and
    // rotate the resulting column down by one.
    let shifted = BandSymbol::new(n - 1, symbol.coeffs().to_vec())?;
    let (roots_g, roots_h) = root_systems(&shifted)?;
    let model = build_column_model(&shifted, &roots_g, &roots_h, size)?;
    Ok(InverseColumn::Model { model, rotation: 1 })
}
