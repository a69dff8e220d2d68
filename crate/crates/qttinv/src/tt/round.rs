//! Shared TT machinery over per-level mode slices: TT-SVD from dense data,
//! rounding (orthogonalize right-to-left, truncate left-to-right) and the
//! rank-adding direct sum.
//!
//! A level is a `Vec<DMatrix>` of `mode` slices, each `r_left x r_right`.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Relative level below which an orthogonalized train counts as zero.
const ZERO_REL_TOL: f64 = 1e-13;

/// Per-value drop threshold for exact rank revelation at `tol == 0`.
const MACHINE_REL_DROP: f64 = 64.0 * f64::EPSILON;

type Level = Vec<DMatrix<Complex64>>;

fn hstack(level: &Level) -> DMatrix<Complex64> {
    let (rl, rr) = level[0].shape();
    let mut m = DMatrix::zeros(rl, level.len() * rr);
    for (d, slice) in level.iter().enumerate() {
        m.view_mut((0, d * rr), (rl, rr)).copy_from(slice);
    }
    m
}

fn unstack_cols(m: &DMatrix<Complex64>, mode: usize) -> Level {
    let rr = m.ncols() / mode;
    (0..mode)
        .map(|d| m.view((0, d * rr), (m.nrows(), rr)).into_owned())
        .collect()
}

fn vstack(level: &Level) -> DMatrix<Complex64> {
    let (rl, rr) = level[0].shape();
    let mut m = DMatrix::zeros(level.len() * rl, rr);
    for (d, slice) in level.iter().enumerate() {
        m.view_mut((d * rl, 0), (rl, rr)).copy_from(slice);
    }
    m
}

fn unstack_rows(m: &DMatrix<Complex64>, mode: usize) -> Level {
    let rl = m.nrows() / mode;
    (0..mode)
        .map(|d| m.view((d * rl, 0), (rl, m.ncols())).into_owned())
        .collect()
}

fn canonical_zero(levels: usize, mode: usize) -> Vec<Level> {
    (0..levels)
        .map(|_| (0..mode).map(|_| DMatrix::zeros(1, 1)).collect())
        .collect()
}

/// SVD with the long dimension reduced by Householder QR first and the
/// remaining small square factor decomposed by one-sided Jacobi.
///
/// The implicit-shift SVD can return inaccurate factors (correct singular
/// values, reconstruction off by orders of magnitude) on heavily graded
/// matrices whose entries reach the subnormal range. Householder QR is
/// backward stable regardless, and one-sided Jacobi keeps high relative
/// accuracy on the graded square factor.
fn factored_svd(m: &DMatrix<Complex64>) -> (DMatrix<Complex64>, Vec<f64>, DMatrix<Complex64>) {
    let (rows, cols) = m.shape();
    if cols > rows {
        // M^H = Q R, so M = R^H Q^H
        let qr = m.adjoint().qr();
        let q = qr.q();
        let (u, sigma, vt) = jacobi_svd(&qr.r().adjoint());
        (u, sigma, vt * q.adjoint())
    } else if rows > cols {
        let qr = m.clone().qr();
        let q = qr.q();
        let (u, sigma, vt) = jacobi_svd(&qr.r());
        (q * u, sigma, vt)
    } else {
        jacobi_svd(m)
    }
}

/// One-sided Jacobi SVD of a small square complex matrix: unitary rotations
/// orthogonalize the columns pairwise until the implicit Gram matrix is
/// diagonal; singular values are then the column norms.
fn jacobi_svd(a: &DMatrix<Complex64>) -> (DMatrix<Complex64>, Vec<f64>, DMatrix<Complex64>) {
    let n = a.ncols();
    let mut u = a.clone();
    let mut v = DMatrix::<Complex64>::identity(n, n);
    for _sweep in 0..60 {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let mut g_ii = 0.0f64;
                let mut g_jj = 0.0f64;
                let mut g_ij = Complex64::new(0.0, 0.0);
                for r in 0..u.nrows() {
                    g_ii += u[(r, i)].norm_sqr();
                    g_jj += u[(r, j)].norm_sqr();
                    g_ij += u[(r, i)].conj() * u[(r, j)];
                }
                let scale = (g_ii * g_jj).sqrt();
                if scale == 0.0 || g_ij.norm() <= f64::EPSILON * scale * 0.25 {
                    continue;
                }
                rotated = true;
                let phase = Complex64::from_polar(1.0, g_ij.arg());
                let tau = (g_jj - g_ii) / (2.0 * g_ij.norm());
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let cos = 1.0 / (1.0 + t * t).sqrt();
                let sin = t * cos;
                for r in 0..u.nrows() {
                    let ci = u[(r, i)];
                    let cj = u[(r, j)];
                    u[(r, i)] = ci * cos - cj * sin * phase.conj();
                    u[(r, j)] = ci * sin * phase + cj * cos;
                }
                for r in 0..n {
                    let ci = v[(r, i)];
                    let cj = v[(r, j)];
                    v[(r, i)] = ci * cos - cj * sin * phase.conj();
                    v[(r, j)] = ci * sin * phase + cj * cos;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|i| u.column(i).norm()).collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap());
    let mut sigma = Vec::with_capacity(n);
    let mut u_sorted = DMatrix::<Complex64>::zeros(u.nrows(), n);
    let mut v_sorted = DMatrix::<Complex64>::zeros(n, n);
    for (pos, &idx) in order.iter().enumerate() {
        let s = norms[idx];
        sigma.push(s);
        if s > 0.0 {
            u_sorted.set_column(pos, &(u.column(idx) / Complex64::new(s, 0.0)));
        } else if pos < u.nrows() {
            // zero singular value: deterministic placeholder direction
            u_sorted[(pos, pos)] = Complex64::new(1.0, 0.0);
        }
        v_sorted.set_column(pos, &v.column(idx));
    }
    (u_sorted, sigma, v_sorted.adjoint())
}

/// Sequential TT-SVD of `values` interpreted as `levels` digits of size
/// `mode`, most significant digit first. Per level, singular values below
/// `tol` times the level maximum are discarded.
pub fn tt_svd(values: &[Complex64], levels: usize, mode: usize, tol: f64) -> Vec<Level> {
    let mut work: Vec<Complex64> = values.to_vec();
    let mut r_left = 1usize;
    let mut n_rem = values.len();
    let mut out: Vec<Level> = Vec::with_capacity(levels);
    for _ in 0..levels - 1 {
        let n_next = n_rem / mode;
        // work is r_left x n_rem row-major; regroup as (mode * r_left) x n_next
        // with row index d * r_left + alpha.
        let m = DMatrix::from_fn(mode * r_left, n_next, |row, col| {
            let d = row / r_left;
            let alpha = row % r_left;
            work[alpha * n_rem + d * n_next + col]
        });
        let (u, sigma, vt) = factored_svd(&m);
        let sigma_max = sigma.iter().copied().fold(0.0, f64::max);
        let threshold = if tol > 0.0 {
            tol * sigma_max
        } else {
            MACHINE_REL_DROP * sigma_max
        };
        let rank = sigma.iter().filter(|&&s| s > threshold).count().max(1);
        out.push(
            (0..mode)
                .map(|d| u.view((d * r_left, 0), (r_left, rank)).into_owned())
                .collect(),
        );
        let mut next = vec![Complex64::new(0.0, 0.0); rank * n_next];
        for r in 0..rank {
            for c in 0..n_next {
                next[r * n_next + c] = vt[(r, c)] * Complex64::new(sigma[r], 0.0);
            }
        }
        work = next;
        r_left = rank;
        n_rem = n_next;
    }
    // Last level: work is r_left x mode row-major; slices are its columns.
    out.push(
        (0..mode)
            .map(|d| DMatrix::from_fn(r_left, 1, |alpha, _| work[alpha * mode + d]))
            .collect(),
    );
    out
}

/// TT rounding with relative Frobenius budget `tol` split as
/// `tol / sqrt(levels - 1)` per bond. A train whose norm collapses under
/// orthogonalization (a structural zero) becomes the canonical rank-one zero.
pub fn round_slices(mut slices: Vec<Level>, tol: f64) -> Vec<Level> {
    let levels = slices.len();
    let mode = slices[0].len();
    if levels == 1 {
        return slices;
    }
    // Right-to-left orthogonalization via LQ (QR of the adjoint).
    let mut peak_scale: f64 = 0.0;
    for k in (1..levels).rev() {
        let m = hstack(&slices[k]);
        peak_scale = peak_scale.max(m.norm());
        let qr = m.adjoint().qr();
        let q = qr.q();
        let r = qr.r();
        let row_q = q.adjoint();
        slices[k] = unstack_cols(&row_q, mode);
        let l_factor = r.adjoint();
        for slice in slices[k - 1].iter_mut() {
            *slice = &*slice * &l_factor;
        }
    }
    let norm = hstack(&slices[0]).norm();
    peak_scale = peak_scale.max(norm);
    if peak_scale == 0.0 || norm <= ZERO_REL_TOL * peak_scale {
        return canonical_zero(levels, mode);
    }
    let budget = tol * norm / ((levels - 1) as f64).sqrt();
    // Left-to-right truncation.
    for k in 0..levels - 1 {
        let m = vstack(&slices[k]);
        let (u, sigma, vt) = factored_svd(&m);
        let p = sigma.len();
        let sigma_max = sigma.iter().copied().fold(0.0, f64::max);
        let mut rank = p;
        let mut tail_sq = 0.0;
        while rank > 1 {
            let s = sigma[rank - 1];
            let within_budget = (tail_sq + s * s).sqrt() <= budget;
            let machine_junk = tol == 0.0 && s <= MACHINE_REL_DROP * sigma_max;
            if within_budget || machine_junk {
                tail_sq += s * s;
                rank -= 1;
            } else {
                break;
            }
        }
        let u_trunc = u.view((0, 0), (u.nrows(), rank)).into_owned();
        slices[k] = unstack_rows(&u_trunc, mode);
        let mut carry = DMatrix::<Complex64>::zeros(rank, vt.ncols());
        for r in 0..rank {
            for c in 0..vt.ncols() {
                carry[(r, c)] = vt[(r, c)] * Complex64::new(sigma[r], 0.0);
            }
        }
        for slice in slices[k + 1].iter_mut() {
            *slice = &carry * &*slice;
        }
    }
    slices
}

/// Direct sum `c1 * a + c2 * b`: first level concatenates along the bond,
/// middle levels are block diagonal, the scalars land on the last level.
pub fn direct_sum(a: &[Level], b: &[Level], c1: Complex64, c2: Complex64) -> Vec<Level> {
    let levels = a.len();
    let mode = a[0].len();
    if levels == 1 {
        return vec![(0..mode).map(|d| &a[0][d] * c1 + &b[0][d] * c2).collect()];
    }
    let mut out = Vec::with_capacity(levels);
    for k in 0..levels {
        let level: Level = (0..mode)
            .map(|d| {
                let (arl, arr) = a[k][d].shape();
                let (brl, brr) = b[k][d].shape();
                if k == 0 {
                    let mut m = DMatrix::zeros(1, arr + brr);
                    m.view_mut((0, 0), (1, arr)).copy_from(&a[k][d]);
                    m.view_mut((0, arr), (1, brr)).copy_from(&b[k][d]);
                    m
                } else if k == levels - 1 {
                    let mut m = DMatrix::zeros(arl + brl, 1);
                    m.view_mut((0, 0), (arl, 1)).copy_from(&(&a[k][d] * c1));
                    m.view_mut((arl, 0), (brl, 1)).copy_from(&(&b[k][d] * c2));
                    m
                } else {
                    let mut m = DMatrix::zeros(arl + brl, arr + brr);
                    m.view_mut((0, 0), (arl, arr)).copy_from(&a[k][d]);
                    m.view_mut((arl, arr), (brl, brr)).copy_from(&b[k][d]);
                    m
                }
            })
            .collect();
        out.push(level);
    }
    out
}
