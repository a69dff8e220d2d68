//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its runtime and failing loudly otherwise.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qttinv::circulant::BandSymbol;
use qttinv::inverse::{
    contour_oracle, eval_column_simple, inverse_column, mass_inverse_column, root_systems,
    shifted_stiffness_inverse_column, stiffness_pseudoinverse_column,
};
use qttinv::powers::{naive_pow, stable_pow};
use qttinv::qtt_build::{circulant_qtt_stable, perm_power_qtt, ExpTerm, ExponentialSumSpec};
use qttinv::solver::{solve_1d, Experiment1DConfig, DEFAULT_ROUND_TOL};
use qttinv::tt::dense_unfolding_ranks;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn report(criterion: usize, name: &str, started: Instant, budget_s: f64) {
    let elapsed = started.elapsed().as_secs_f64();
    println!("ACCEPTANCE {criterion} ({name}): PASS [{elapsed:.2}s]");
    assert!(
        elapsed < budget_s,
        "criterion {criterion} exceeded its {budget_s}s budget: {elapsed:.2}s"
    );
}

fn dense_circulant(column: &[Complex64]) -> DMatrix<Complex64> {
    let size = column.len();
    DMatrix::from_fn(size, size, |i, j| column[(i + size - j) % size])
}

/// Random symbol with m + n <= 6, coefficients uniform in the complex unit
/// box, resampled until no root lies within 1e-3 of the unit circle.
fn random_well_separated_symbol(rng: &mut ChaCha8Rng) -> BandSymbol {
    loop {
        let m = rng.gen_range(1..=5usize);
        let n = rng.gen_range(0..=(6 - m).min(3));
        let coeffs: Vec<Complex64> = (0..m + n)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let Ok(symbol) = BandSymbol::new(n, coeffs) else {
            continue;
        };
        if symbol.band_width() >= 2 {
            let (g, _) = symbol.gh_polynomials();
            let Ok(roots) = qttinv::roots::find_roots(&g) else {
                continue;
            };
            if roots.iter().any(|z| (z.norm() - 1.0).abs() < 1e-3) {
                continue;
            }
        }
        return symbol;
    }
}

#[test]
fn acceptance_1_closed_form_matches_dft_oracle() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    for _ in 0..200 {
        let symbol = random_well_separated_symbol(&mut rng);
        for size in [8u64, 64, 1024] {
            if (size as usize) < symbol.band_width() {
                continue;
            }
            let column = inverse_column(&symbol, size)
                .unwrap_or_else(|e| panic!("{symbol} at N = {size}: {e}"));
            let oracle = symbol.dft_inverse_column(size as usize).unwrap();
            let scale = oracle.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let mut deviation: f64 = 0.0;
            for (j, want) in oracle.iter().enumerate() {
                deviation = deviation.max((column.eval(j as u64).unwrap() - want).norm());
            }
            assert!(
                deviation <= 1e-9 * scale,
                "{symbol} at N = {size}: deviation {:.3e}",
                deviation / scale
            );
        }
    }
    report(1, "closed-form inverse vs DFT oracle", started, 30.0);
}

#[test]
fn acceptance_2_multiple_root_branch() {
    let started = Instant::now();
    let symbol = BandSymbol::from_real(1, &[-0.75, 3.25, -4.0, 1.0]).unwrap();
    for size in [16usize, 64] {
        let column = inverse_column(&symbol, size as u64).unwrap();
        let dense = symbol.materialize(size).unwrap();
        let mut e0 = DVector::<Complex64>::zeros(size);
        e0[0] = c(1.0, 0.0);
        let exact = dense.full_piv_lu().solve(&e0).unwrap();
        let scale = exact.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for j in 0..size {
            let got = column.eval(j as u64).unwrap();
            assert!(
                (got - exact[j]).norm() <= 1e-10 * scale,
                "N = {size}, j = {j}: {got} vs {}",
                exact[j]
            );
        }
        let (roots_g, _) = root_systems(&symbol).unwrap();
        assert!(matches!(
            eval_column_simple(&symbol, &roots_g, size as u64, 0),
            Err(qttinv::Error::RepeatedRoot { .. })
        ));
    }
    report(2, "multiple-root branch vs dense LU", started, 1.0);
}

#[test]
fn acceptance_3_rank_bounds() {
    let started = Instant::now();
    let level = 8usize;
    let size = 1u64 << level;
    let tol = 1e-8;

    let mass: Vec<Complex64> = (0..size)
        .map(|j| c(mass_inverse_column(size, j), 0.0))
        .collect();
    let ranks = dense_unfolding_ranks(&dense_circulant(&mass), tol);
    assert!(ranks.max() <= 3, "mass inverse ranks {ranks}");

    for shift in [0.1, 1.0, 10.0] {
        let column: Vec<Complex64> = (0..size)
            .map(|j| {
                c(
                    shifted_stiffness_inverse_column(shift, size, j).unwrap(),
                    0.0,
                )
            })
            .collect();
        let ranks = dense_unfolding_ranks(&dense_circulant(&column), tol);
        assert!(
            ranks.max() <= 3,
            "shifted stiffness s = {shift}: ranks {ranks}"
        );
    }

    let pseudo: Vec<Complex64> = (0..size)
        .map(|i| c(stiffness_pseudoinverse_column(size, i), 0.0))
        .collect();
    let ranks = dense_unfolding_ranks(&dense_circulant(&pseudo), tol);
    assert!(ranks.max() <= 4, "pseudoinverse ranks {ranks}");

    let symbol = BandSymbol::from_real(1, &[-0.75, 3.25, -4.0, 1.0]).unwrap();
    let column = inverse_column(&symbol, size).unwrap();
    let values: Vec<Complex64> = (0..size).map(|j| column.eval(j).unwrap()).collect();
    let ranks = dense_unfolding_ranks(&dense_circulant(&values), tol);
    assert!(ranks.max() <= 4, "double-root inverse ranks {ranks}");

    report(3, "QTT rank bounds of the inverses", started, 20.0);
}

#[test]
fn acceptance_4_explicit_cores() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1004);

    // named inverse specs plus twenty random simple-root specs
    type SpecBuilder = fn(usize) -> ExponentialSumSpec;
    let mut specs: Vec<(String, SpecBuilder)> = Vec::new();
    fn mass_spec(levels: usize) -> ExponentialSumSpec {
        let size = 1u64 << levels;
        let z1 = 3.0f64.sqrt() - 2.0;
        let scale = 1.0 / (2.0 * 3.0f64.sqrt() * (1.0 - qttinv::powers::pow_real(z1, size)));
        ExponentialSumSpec::new(
            levels,
            vec![ExpTerm::new(c(scale, 0.0), c(z1, 0.0))],
            vec![ExpTerm::new(c(scale, 0.0), c(z1, 0.0))],
        )
    }
    fn shifted_spec(levels: usize) -> ExponentialSumSpec {
        let shift = 1.0f64;
        let size = 1u64 << levels;
        let z1 = 1.0 + shift / 2.0 - (shift * shift / 4.0 + shift).sqrt();
        let scale = 1.0
            / ((shift * shift + 4.0 * shift).sqrt() * (1.0 - qttinv::powers::pow_real(z1, size)));
        ExponentialSumSpec::new(
            levels,
            vec![ExpTerm::new(c(scale, 0.0), c(z1, 0.0))],
            vec![ExpTerm::new(c(scale, 0.0), c(z1, 0.0))],
        )
    }
    specs.push(("mass".into(), mass_spec));
    specs.push(("shifted stiffness".into(), shifted_spec));

    for levels in 3usize..=10 {
        let size = 1u64 << levels;
        let check = |label: &str, spec: &ExponentialSumSpec| {
            let qtt = circulant_qtt_stable(spec).unwrap();
            let column: Vec<Complex64> = (0..size).map(|j| spec.eval(j)).collect();
            let dense = dense_circulant(&column);
            let scale = dense.norm().max(1e-300);
            let error = (qtt.to_dense().unwrap() - &dense).norm() / scale;
            assert!(
                error <= 1e-11,
                "{label} at L = {levels}: relative error {error:.3e}"
            );
        };
        for (label, build) in &specs {
            check(label, &build(levels));
        }
        for t in 0..20 {
            let r1 = rng.gen_range(1..=2usize);
            let r2 = rng.gen_range(1..=2usize);
            let mut term = || {
                ExpTerm::new(
                    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    Complex64::from_polar(
                        rng.gen_range(0.0..0.9),
                        rng.gen_range(0.0..std::f64::consts::TAU),
                    ),
                )
            };
            let spec = ExponentialSumSpec::new(
                levels,
                (0..r1).map(|_| term()).collect(),
                (0..r2).map(|_| term()).collect(),
            );
            check(&format!("random {t}"), &spec);
        }
    }

    for levels in [2usize, 3, 4] {
        let size = 1usize << levels;
        for exponent in 0..size {
            let qtt = perm_power_qtt(levels, exponent as u64).unwrap();
            let dense = qtt.to_dense().unwrap();
            let expected = DMatrix::from_fn(size, size, |i, j| {
                if (j + exponent) % size == i {
                    c(1.0, 0.0)
                } else {
                    c(0.0, 0.0)
                }
            });
            assert!(
                (dense - expected).norm() <= 1e-14,
                "shift power L = {levels}, i = {exponent}"
            );
        }
    }

    report(4, "explicit QTT cores vs direct evaluation", started, 60.0);
}

#[test]
fn acceptance_5_pseudoinverse_penrose() {
    let started = Instant::now();
    for size in [4usize, 8, 16, 64] {
        let a = DMatrix::<f64>::from_fn(size, size, |i, j| {
            let k = (i + size - j) % size;
            match k {
                0 => 2.0,
                1 => -1.0,
                x if x == size - 1 => -1.0,
                _ => 0.0,
            }
        });
        let p = DMatrix::<f64>::from_fn(size, size, |i, j| {
            stiffness_pseudoinverse_column(size as u64, ((i + size - j) % size) as u64)
        });
        let apa = &a * &p * &a;
        let pap = &p * &a * &p;
        assert!((apa - &a).norm() <= 1e-10, "N = {size}: A P A != A");
        assert!((pap - &p).norm() <= 1e-10, "N = {size}: P A P != P");
        let ap = &a * &p;
        let pa = &p * &a;
        assert!(
            (ap.transpose() - &ap).norm() <= 1e-10,
            "N = {size}: A P not hermitian"
        );
        assert!(
            (pa.transpose() - &pa).norm() <= 1e-10,
            "N = {size}: P A not hermitian"
        );
        let svd_pinv = a.clone().pseudo_inverse(1e-8).unwrap();
        assert!(
            (&p - svd_pinv).norm() <= 1e-10,
            "N = {size}: closed form differs from SVD pseudoinverse"
        );
    }
    report(5, "pseudoinverse Penrose identities", started, 5.0);
}

#[test]
fn acceptance_6_laurent_products() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1006);
    let mut done = 0;
    while done < 100 {
        let ma = rng.gen_range(1..=3usize);
        let na = rng.gen_range(0..=2usize);
        let mb = rng.gen_range(1..=3usize);
        let nb = rng.gen_range(0..=2usize);
        let draw = |rng: &mut ChaCha8Rng, count: usize| -> Vec<Complex64> {
            (0..count)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        };
        let (Ok(sa), Ok(sb)) = (
            BandSymbol::new(na, draw(&mut rng, ma + na)),
            BandSymbol::new(nb, draw(&mut rng, mb + nb)),
        ) else {
            continue;
        };
        done += 1;
        let size = ma + na + mb + nb + 4;
        let product = sa.laurent_product(&sb, size).unwrap();
        assert_eq!(product.upper(), ma + mb - 1);
        assert_eq!(product.lower(), na + nb);
        let dense = sa.materialize(size).unwrap() * sb.materialize(size).unwrap();
        let direct = product.materialize(size).unwrap();
        let scale = dense.norm().max(1e-300);
        assert!(
            (dense - direct).norm() <= 1e-11 * scale,
            "pair {done}: product mismatch"
        );
    }
    report(6, "Laurent products match dense products", started, 10.0);
}

#[test]
fn acceptance_7_periodic_solve_sweep() {
    let started = Instant::now();
    let config = Experiment1DConfig::new(5, 40, DEFAULT_ROUND_TOL).unwrap();
    let records = solve_1d(&config).unwrap();

    // (d) rank certificate everywhere
    for record in &records {
        assert_eq!(
            record.max_rank, 3,
            "L = {}: rank {}",
            record.level, record.max_rank
        );
    }

    // (a) dense-oracle agreement for L <= 10
    for record in records.iter().filter(|r| r.level <= 10) {
        let level = record.level;
        let size = 1usize << level;
        let h = 0.5f64.powi(level as i32);
        let symbol = qttinv::solver::assemble_symbol_1d(level).unwrap();
        let a = DMatrix::<f64>::from_fn(size, size, |i, j| {
            let k = (i + size - j) % size;
            let k = if k > size / 2 {
                k as i64 - size as i64
            } else {
                k as i64
            };
            symbol.coeff(k).re
        });
        let pi = std::f64::consts::PI;
        let rhs = DVector::<f64>::from_fn(size, |j, _| {
            let x = j as f64 * h;
            h * h * ((4.0 * pi * pi + 1.0) * (2.0 * pi * x).cos() - 2.0 * pi * (2.0 * pi * x).sin())
        });
        let dense_solution = a.lu().solve(&rhs).unwrap();
        let qtt_solution = qttinv::solver::inverse_qtt_1d(level)
            .unwrap()
            .matvec(&qttinv::solver::rhs_qtt_1d(level).unwrap())
            .unwrap();
        let materialized = qtt_solution.to_dense().unwrap();
        let diff: f64 = materialized
            .iter()
            .zip(dense_solution.iter())
            .map(|(got, want)| (got - c(*want, 0.0)).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(
            diff <= 1e-9 * dense_solution.norm(),
            "L = {level}: dense-oracle deviation {:.3e}",
            diff / dense_solution.norm()
        );
    }

    // (b) monotone decay on [5, 15] with first-order rate on [6, 14]
    for pair in records.windows(2) {
        let (prev, next) = (&pair[0], &pair[1]);
        if next.level <= 15 {
            assert!(
                next.rel_l2_error < prev.rel_l2_error,
                "error grew from L = {} to L = {}",
                prev.level,
                next.level
            );
        }
        if prev.level >= 6 && prev.level <= 14 {
            let order = (prev.rel_l2_error / next.rel_l2_error).log2();
            assert!(
                (0.7..=1.3).contains(&order),
                "L = {} -> {}: observed order {order:.3}",
                prev.level,
                next.level
            );
        }
    }

    // (c) no instability: error at L = 40 no larger than at L = 10
    let at = |level: usize| {
        records
            .iter()
            .find(|r| r.level == level)
            .map(|r| r.rel_l2_error)
            .unwrap()
    };
    assert!(at(40) <= at(10), "error at L = 40 exceeds error at L = 10");

    report(
        7,
        "1-D periodic solve: oracle, order, stability, ranks",
        started,
        300.0,
    );
}

/// Double-double helpers for the extended-precision power reference.
mod dd {
    #[derive(Clone, Copy, Debug)]
    pub struct Dd {
        pub hi: f64,
        pub lo: f64,
    }

    pub fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let v = s - a;
        let e = (a - (s - v)) + (b - v);
        Dd { hi: s, lo: e }
    }

    fn quick_two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let e = b - (s - a);
        Dd { hi: s, lo: e }
    }

    fn two_prod(a: f64, b: f64) -> Dd {
        let p = a * b;
        let e = a.mul_add(b, -p);
        Dd { hi: p, lo: e }
    }

    pub fn add(a: Dd, b: Dd) -> Dd {
        let s = two_sum(a.hi, b.hi);
        let lo = s.lo + a.lo + b.lo;
        quick_two_sum(s.hi, lo)
    }

    pub fn mul(a: Dd, b: Dd) -> Dd {
        let p = two_prod(a.hi, b.hi);
        let lo = p.lo + a.hi * b.lo + a.lo * b.hi;
        quick_two_sum(p.hi, lo)
    }

    pub fn scale(a: Dd, s: f64) -> Dd {
        mul(a, from(s))
    }

    /// ln(1 + u) by series; |u| must be far below one (grid offsets are).
    pub fn ln_1p_series(u: Dd) -> Dd {
        let mut acc = from(0.0);
        // sum_{k=1..12} (-1)^(k+1) u^k / k, smallest term first
        let mut powers = vec![u];
        for _ in 1..12 {
            powers.push(mul(*powers.last().unwrap(), u));
        }
        for k in (1..=12usize).rev() {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            acc = add(acc, scale(powers[k - 1], sign / k as f64));
        }
        acc
    }

    /// exp of a double-double, accurate to roughly f64 precision of the hi
    /// part (enough for 1e-12 comparisons).
    pub fn exp(a: Dd) -> f64 {
        a.hi.exp() * (1.0 + a.lo)
    }
}

#[test]
fn acceptance_8_stable_powers() {
    let started = Instant::now();
    let mut worst_naive_at_h30: f64 = 0.0;
    for level in [20i32, 30, 40] {
        let h = 0.5f64.powi(level);
        let exponent = 1u64 << level;
        for gamma1 in [0.0, 1.0, 2.0] {
            for gamma2 in [0.0, 1.0, 2.0] {
                // reference: exp(M * ln1p(-g1 h + g2 h^2)) in double-double
                let offset = dd::add(dd::from(-gamma1 * h), dd::scale(dd::from(gamma2 * h), h));
                let reference = dd::exp(dd::scale(dd::ln_1p_series(offset), exponent as f64));
                let stable = stable_pow(gamma1, gamma2, h, exponent).unwrap().re;
                assert!(
                    (stable - reference).abs() <= 1e-12 * reference.abs(),
                    "h = 2^-{level}, g1 = {gamma1}, g2 = {gamma2}: stable {stable:.17e} vs {reference:.17e}"
                );
                let naive = naive_pow(gamma1, gamma2, h, exponent);
                let naive_rel = ((naive - reference) / reference).abs();
                if level == 30 && gamma2 != 0.0 {
                    worst_naive_at_h30 = worst_naive_at_h30.max(naive_rel);
                }
            }
        }
    }
    assert!(
        worst_naive_at_h30 >= 1e-9,
        "naive power did not exhibit the expected precision loss: {worst_naive_at_h30:.3e}"
    );
    report(
        8,
        "stable powers vs extended-precision reference",
        started,
        1.0,
    );
}

#[test]
fn acceptance_9_contour_periodization() {
    let started = Instant::now();
    let mass = BandSymbol::mass();
    let size = 16u64;
    let column = inverse_column(&mass, size).unwrap();
    for j in 0..size {
        let mut acc = c(0.0, 0.0);
        for l in -30i64..=30 {
            acc += contour_oracle(&mass, j as i64 - size as i64 * l, 512).unwrap();
        }
        let direct = column.eval(j).unwrap();
        assert!(
            (acc - direct).norm() <= 1e-9,
            "j = {j}: periodized {acc} vs closed form {direct}"
        );
    }
    report(9, "contour-integral periodization", started, 1.0);
}
