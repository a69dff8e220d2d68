//! Polynomial root finding and classification against the unit circle.
//!
//! Roots of the symbol polynomials drive every closed-form inverse, so the
//! pipeline here is deliberately conservative: companion-matrix eigenvalues,
//! improve-only Newton polishing, clustering of numerically coincident roots
//! into multiplicities, and a hard rejection margin around `|z| = 1`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default radius inside which roots are merged into one multiple root.
pub const DEFAULT_CLUSTER_RADIUS: f64 = 1e-7;

/// Default half-width of the rejection annulus around the unit circle.
pub const DEFAULT_CIRCLE_MARGIN: f64 = 1e-9;

/// Residual acceptance factor relative to the local polynomial scale.
const RESIDUAL_REL_TOL: f64 = 1e-10;

const MAX_POLISH_STEPS: usize = 16;

/// A merged root with its numerical multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootCluster {
    pub center: Complex64,
    pub multiplicity: usize,
}

/// Roots of a polynomial split by position relative to the unit circle.
#[derive(Debug, Clone)]
pub struct RootSystem {
    pub inside: Vec<RootCluster>,
    pub outside: Vec<RootCluster>,
    /// Total degree, i.e. the sum of all multiplicities.
    pub degree: usize,
    /// Set when two clusters sit close enough to the merge radius that the
    /// multiplicity assignment is ambiguous.
    pub borderline: bool,
}

impl RootSystem {
    pub fn all_simple(&self) -> bool {
        self.inside
            .iter()
            .chain(self.outside.iter())
            .all(|c| c.multiplicity == 1)
    }

    pub fn max_multiplicity(&self) -> usize {
        self.inside
            .iter()
            .chain(self.outside.iter())
            .map(|c| c.multiplicity)
            .max()
            .unwrap_or(0)
    }

    pub fn clusters(&self) -> impl Iterator<Item = &RootCluster> {
        self.inside.iter().chain(self.outside.iter())
    }
}

fn poly_eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

fn poly_derivative_eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &c) in coeffs.iter().enumerate().skip(1).rev() {
        acc = acc * z + c * i as f64;
    }
    acc
}

/// Scale of the polynomial near `z`, used to normalize residuals.
fn poly_scale(coeffs: &[Complex64], z: Complex64) -> f64 {
    let r = z.norm();
    let mut scale = 0.0;
    let mut power = 1.0;
    for &c in coeffs {
        scale += c.norm() * power;
        power *= r;
    }
    scale.max(f64::MIN_POSITIVE)
}

/// All roots of the polynomial with the given ascending coefficients.
///
/// Both the constant and the leading coefficient must be nonzero (the caller's
/// polynomials never vanish at the origin). Degrees one and two are solved in
/// closed form; higher degrees go through companion-matrix eigenvalues
/// followed by improve-only Newton polishing.
pub fn find_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    if coeffs.len() < 2 {
        return Err(Error::InvalidInput(
            "polynomial must have degree >= 1".into(),
        ));
    }
    let lead = *coeffs.last().unwrap();
    if lead.norm() == 0.0 || coeffs[0].norm() == 0.0 {
        return Err(Error::InvalidInput(
            "leading and constant coefficients must be nonzero".into(),
        ));
    }
    let degree = coeffs.len() - 1;
    let mut roots = match degree {
        1 => vec![-coeffs[0] / coeffs[1]],
        2 => quadratic_roots(coeffs[0], coeffs[1], coeffs[2]),
        _ => companion_eigenvalues(coeffs)?,
    };
    for root in &mut roots {
        *root = polish(coeffs, *root);
        let residual = poly_eval(coeffs, *root).norm();
        let scale = poly_scale(coeffs, *root);
        if residual > RESIDUAL_REL_TOL * scale {
            return Err(Error::NonConvergence(format!(
                "residual {residual:.3e} at root {root} exceeds {:.3e}",
                RESIDUAL_REL_TOL * scale
            )));
        }
    }
    sort_roots(&mut roots);
    Ok(roots)
}

/// Cancellation-free quadratic formula for `c0 + c1 z + c2 z^2`.
fn quadratic_roots(c0: Complex64, c1: Complex64, c2: Complex64) -> Vec<Complex64> {
    let disc = (c1 * c1 - 4.0 * c0 * c2).sqrt();
    // Pick the sign that avoids cancellation with c1.
    let q = if (c1.conj() * disc).re >= 0.0 {
        -0.5 * (c1 + disc)
    } else {
        -0.5 * (c1 - disc)
    };
    if q.norm() == 0.0 {
        // c1 = 0 and c0 = 0 cannot happen here (constant term nonzero).
        let r = (-c0 / c2).sqrt();
        return vec![r, -r];
    }
    vec![q / c2, c0 / q]
}

fn companion_eigenvalues(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let degree = coeffs.len() - 1;
    let lead = *coeffs.last().unwrap();
    let mut companion = DMatrix::<Complex64>::zeros(degree, degree);
    for i in 0..degree {
        companion[(i, degree - 1)] = -coeffs[i] / lead;
        if i + 1 < degree {
            companion[(i + 1, i)] = Complex64::new(1.0, 0.0);
        }
    }
    let schur = companion.schur();
    match schur.eigenvalues() {
        Some(eig) => Ok(eig.iter().copied().collect()),
        None => Err(Error::NonConvergence(
            "companion-matrix eigenvalue iteration failed".into(),
        )),
    }
}

/// Newton refinement that only accepts steps reducing the residual, so
/// near-multiple roots keep their (mean-cancelling) companion estimates.
fn polish(coeffs: &[Complex64], start: Complex64) -> Complex64 {
    let mut z = start;
    let mut best_residual = poly_eval(coeffs, z).norm();
    for _ in 0..MAX_POLISH_STEPS {
        let value = poly_eval(coeffs, z);
        let slope = poly_derivative_eval(coeffs, z);
        if slope.norm() == 0.0 {
            break;
        }
        let candidate = z - value / slope;
        let candidate_residual = poly_eval(coeffs, candidate).norm();
        if candidate_residual < best_residual {
            z = candidate;
            best_residual = candidate_residual;
        } else {
            break;
        }
    }
    z
}

fn sort_roots(roots: &mut [Complex64]) {
    roots.sort_by(|a, b| {
        a.norm()
            .partial_cmp(&b.norm())
            .unwrap()
            .then(a.arg().partial_cmp(&b.arg()).unwrap())
    });
}

/// Merges roots within `cluster_radius` (transitively) into multiple roots
/// centered at the arithmetic mean. Multiplicities sum to the input count.
#[allow(clippy::needless_range_loop)]
pub fn cluster_multiplicities(roots: &[Complex64], cluster_radius: f64) -> Vec<RootCluster> {
    let k = roots.len();
    let mut assignment: Vec<usize> = (0..k).collect();
    // Union-find over pairwise proximity.
    fn find(assignment: &mut Vec<usize>, i: usize) -> usize {
        if assignment[i] != i {
            let root = find(assignment, assignment[i]);
            assignment[i] = root;
        }
        assignment[i]
    }
    for i in 0..k {
        for j in i + 1..k {
            if (roots[i] - roots[j]).norm() <= cluster_radius {
                let a = find(&mut assignment, i);
                let b = find(&mut assignment, j);
                if a != b {
                    assignment[a] = b;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<Complex64>> = Default::default();
    for i in 0..k {
        let rep = find(&mut assignment, i);
        groups.entry(rep).or_default().push(roots[i]);
    }
    let mut clusters: Vec<RootCluster> = groups
        .into_values()
        .map(|members| {
            let sum: Complex64 = members.iter().sum();
            RootCluster {
                center: sum / members.len() as f64,
                multiplicity: members.len(),
            }
        })
        .collect();
    clusters.sort_by(|a, b| {
        a.center
            .norm()
            .partial_cmp(&b.center.norm())
            .unwrap()
            .then(a.center.arg().partial_cmp(&b.center.arg()).unwrap())
    });
    clusters
}

fn derivative_coeffs(coeffs: &[Complex64], order: usize) -> Vec<Complex64> {
    let mut out = coeffs.to_vec();
    for _ in 0..order {
        out = out
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * i as f64)
            .collect();
    }
    out
}

/// Re-centers multiple-root clusters on the nearby simple root of the
/// `(p-1)`-th derivative. The mean of a split eigenvalue pair carries the
/// pair's asymmetry (~1e-11 for a double root); the derivative root does not.
pub fn refine_cluster_centers(
    coeffs: &[Complex64],
    clusters: &mut [RootCluster],
    cluster_radius: f64,
) {
    for cluster in clusters.iter_mut() {
        if cluster.multiplicity < 2 || cluster.multiplicity >= coeffs.len() {
            continue;
        }
        let dcoeffs = derivative_coeffs(coeffs, cluster.multiplicity - 1);
        let refined = polish(&dcoeffs, cluster.center);
        if (refined - cluster.center).norm() <= 2.0 * cluster_radius {
            cluster.center = refined;
        }
    }
}

/// True when two distinct clusters sit within a decade of the merge radius,
/// i.e. the multiplicity assignment could flip under small perturbations.
pub fn has_borderline_separation(clusters: &[RootCluster], cluster_radius: f64) -> bool {
    for (i, a) in clusters.iter().enumerate() {
        for b in &clusters[i + 1..] {
            if (a.center - b.center).norm() < 10.0 * cluster_radius {
                return true;
            }
        }
    }
    false
}

/// Splits clusters into inside/outside of the unit circle, rejecting any
/// root within `margin` of it.
pub fn classify_unit_circle(clusters: &[RootCluster], margin: f64) -> Result<RootSystem> {
    let mut inside = Vec::new();
    let mut outside = Vec::new();
    let mut degree = 0;
    for cluster in clusters {
        let r = cluster.center.norm();
        degree += cluster.multiplicity;
        if r < 1.0 - margin {
            inside.push(*cluster);
        } else if r > 1.0 + margin {
            outside.push(*cluster);
        } else {
            return Err(Error::RootOnUnitCircle {
                root: cluster.center,
            });
        }
    }
    Ok(RootSystem {
        inside,
        outside,
        degree,
        borderline: false,
    })
}

/// Full pipeline with default parameters: find, cluster, classify.
pub fn root_system(coeffs: &[Complex64]) -> Result<RootSystem> {
    root_system_with(coeffs, DEFAULT_CLUSTER_RADIUS, DEFAULT_CIRCLE_MARGIN)
}

pub fn root_system_with(
    coeffs: &[Complex64],
    cluster_radius: f64,
    margin: f64,
) -> Result<RootSystem> {
    let roots = find_roots(coeffs)?;
    let mut clusters = cluster_multiplicities(&roots, cluster_radius);
    refine_cluster_centers(coeffs, &mut clusters, cluster_radius);
    let mut system = classify_unit_circle(&clusters, margin)?;
    system.borderline = has_borderline_separation(&clusters, cluster_radius);
    Ok(system)
}
