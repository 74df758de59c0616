use majorana_core::cascade::{exact_cascade_distribution, run_cascade};
use majorana_core::embedding::coherent_embedding;
use majorana_core::majorana::{build_polynomial, roots, PolynomialVariant, ProjectiveRoot};
use majorana_core::spin::{wigner_matrix, BlochPoint, EulerAngles, Spin, SpinState};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `Jy`, `Jz` in the ascending-`M` basis.
fn generators(twice: u32) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let s = twice as f64 / 2.0;
    let n = twice as usize + 1;
    let m = |i: usize| i as f64 - s;
    let jz = DMatrix::from_fn(n, n, |r, k| if r == k { c(m(r), 0.0) } else { c(0.0, 0.0) });
    // J+ |m> = sqrt(s(s+1) - m(m+1)) |m+1>
    let jp = DMatrix::from_fn(n, n, |r, k| {
        if r == k + 1 {
            c((s * (s + 1.0) - m(k) * (m(k) + 1.0)).sqrt(), 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    let jy = (&jp - jp.adjoint()) * c(0.0, -0.5);
    (jy, jz)
}

#[test]
fn wigner_matches_matrix_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for twice in 1..=10 {
        let (jy, jz) = generators(twice);
        for _ in 0..5 {
            let (a, b, g) = (rng.random_range(0.0..TAU), rng.random_range(0.0..PI), rng.random_range(0.0..TAU));
            let want = (&jz * c(0.0, -a)).exp() * (&jy * c(0.0, -b)).exp() * (&jz * c(0.0, -g)).exp();
            let got =
                wigner_matrix(Spin::from_twice(twice).unwrap(), &EulerAngles::new(a, b, g).unwrap()).into_matrix();
            let err = (got - want).camax();
            assert!(err < 1e-10, "2S = {twice}: {err}");
        }
    }
}

/// Weierstrass iteration on a monic rescaling of `by_power` (highest power first).
fn durand_kerner(by_power: &[Complex64]) -> Vec<Complex64> {
    let lead = by_power[0];
    let monic: Vec<Complex64> = by_power.iter().map(|x| x / lead).collect();
    let n = monic.len() - 1;
    let eval = |z: Complex64| monic.iter().fold(c(0.0, 0.0), |acc, k| acc * z + k);
    let radius = 1.0 + monic[1..].iter().map(|x| x.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> =
        (0..n).map(|k| Complex64::from_polar(radius, 0.4 + k as f64 * TAU / n as f64)).collect();
    for _ in 0..2000 {
        let mut moved: f64 = 0.0;
        for i in 0..n {
            let den = (0..n).filter(|&j| j != i).fold(c(1.0, 0.0), |acc, j| acc * (z[i] - z[j]));
            let step = eval(z[i]) / den;
            z[i] -= step;
            moved = moved.max(step.norm() / z[i].norm().max(1.0));
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

#[test]
fn roots_match_durand_kerner() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for twice in 1..=10 {
        for _ in 0..10 {
            let s = SpinState::random(Spin::from_twice(twice).unwrap(), &mut rng);
            let p = build_polynomial(&s, PolynomialVariant::Majorana);
            let want = durand_kerner(p.coefficients());
            let got: Vec<Complex64> = roots(&p)
                .unwrap()
                .into_iter()
                .map(|r| match r {
                    ProjectiveRoot::Finite(z) => z,
                    ProjectiveRoot::Infinity => panic!("generic state has a root at infinity"),
                })
                .collect();
            assert_eq!(got.len(), want.len());
            let mut unused = want.clone();
            for z in &got {
                let (k, d) = unused
                    .iter()
                    .enumerate()
                    .map(|(k, w)| (k, (w - z).norm() / z.norm().max(1.0)))
                    .min_by(|x, y| x.1.total_cmp(&y.1))
                    .unwrap();
                assert!(d < 1e-8, "2S = {twice}: {z} vs {want:?}");
                unused.swap_remove(k);
            }
        }
    }
}

fn binomial_pmf(n: u32, k: u32, p: f64) -> f64 {
    let choose = (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
    choose * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
}

#[test]
fn maximal_state_counts_are_binomial() {
    // every slot of the maximal state is an independent spin-1/2 up state
    let beta: f64 = 1.1;
    let dir = BlochPoint::new(0.3, beta).unwrap();
    let p = (beta / 2.0).cos().powi(2);
    for twice in [1, 3, 6] {
        let spin = Spin::from_twice(twice).unwrap();
        let st = coherent_embedding(spin.max_m()).unwrap();
        let exact = exact_cascade_distribution(&st, &dir).unwrap();
        for k in 0..=twice {
            assert!((exact.probabilities()[k as usize] - binomial_pmf(twice, k, p)).abs() < 1e-12);
        }
        let n = 40_000;
        let mut counts = vec![0u32; twice as usize + 1];
        let mut rng = ChaCha8Rng::seed_from_u64(twice as u64);
        for _ in 0..n {
            counts[run_cascade(&st, &dir, &mut rng).unwrap().n_plus] += 1;
        }
        for (k, &count) in counts.iter().enumerate() {
            let q = binomial_pmf(twice, k as u32, p);
            let band = 4.0 * (q * (1.0 - q) / n as f64).sqrt() + 1e-12;
            assert!((count as f64 / n as f64 - q).abs() <= band, "2S = {twice}, k = {k}");
        }
    }
}
