//! Cross-checks of the numerical kernels against independent reference implementations.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use skylane::channel::fading::complex_gaussian;
use skylane::eigenscore::squared_singular_values;
use skylane::mimo::{stack_channels, zf_precoder};
use skylane::rng::{stream, Purpose};
use skylane::{Metric, ScenarioConfig, Simulator};

fn random_matrix(rows: usize, cols: usize, seed: u64) -> DMatrix<Complex64> {
    let mut rng = stream(seed, 0, Purpose::Fading, &[rows as u64, cols as u64]);
    let v: Vec<DVector<Complex64>> = (0..rows).map(|_| complex_gaussian(cols, &mut rng)).collect();
    stack_channels(&v)
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
#[allow(clippy::needless_range_loop)]
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let total: f64 = a.iter().flatten().map(|x| x * x).sum();
        if off <= 1e-30 * total {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

/// Eigenvalues of the Hermitian Gram `H^H H` via its real embedding
/// `[[A, -B], [B, A]]`, whose spectrum repeats every eigenvalue twice.
fn gram_eigenvalues(h: &DMatrix<Complex64>) -> Vec<f64> {
    let g = h.adjoint() * h;
    let n = g.nrows();
    let mut real = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = g[(i, j)];
            real[i][j] = z.re;
            real[i + n][j + n] = z.re;
            real[i][j + n] = -z.im;
            real[i + n][j] = z.im;
        }
    }
    let mut ev = jacobi_eigenvalues(real);
    ev.sort_by(|a, b| b.total_cmp(a));
    ev.into_iter().step_by(2).collect()
}

#[test]
fn singular_values_match_gram_eigensolve() {
    for (k, &(rows, cols)) in [(4, 4), (10, 3), (20, 8), (50, 16), (16, 50), (1, 7)].iter().enumerate() {
        let h = random_matrix(rows, cols, 100 + k as u64);
        let svd = squared_singular_values(&h);
        let oracle = gram_eigenvalues(&h);
        let scale = oracle[0];
        for i in 0..rows.min(cols) {
            assert!(
                (svd[i] - oracle[i]).abs() <= 1e-8 * scale,
                "{rows}x{cols} eigenvalue {i}: {} vs {}",
                svd[i],
                oracle[i]
            );
        }
        for extra in &oracle[rows.min(cols)..] {
            assert!(extra.abs() <= 1e-8 * scale);
        }
    }
}

#[test]
fn zf_matches_normalized_pseudo_inverse() {
    for seed in 0..10 {
        let h = random_matrix(4, 8, seed);
        let w = zf_precoder(&h).unwrap();
        let pinv = h.clone().pseudo_inverse(1e-12).unwrap();
        for u in 0..4 {
            let col = pinv.column(u);
            let expected = col / Complex64::from(col.norm() * 2.0);
            assert!((w.column(u) - expected).norm() < 1e-8, "seed {seed} column {u}");
        }
    }
}

#[test]
fn zf_nulls_and_power_on_random_instances() {
    let mut rng = stream(9, 0, Purpose::Planning, &[]);
    for seed in 0..100 {
        let m = 64;
        let n = rng.random_range(1..=20);
        let h = random_matrix(n, m, 1000 + seed);
        let w = zf_precoder(&h).unwrap();
        let e = &h * &w;
        let diag_min = (0..n).map(|i| e[(i, i)].norm_sqr()).fold(f64::INFINITY, f64::min);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    assert!(e[(i, j)].norm_sqr() <= 1e-9 * diag_min);
                }
            }
        }
        let power: f64 = w.iter().map(|z| z.norm_sqr()).sum();
        assert!((power - 1.0).abs() < 1e-9);
    }
}

#[test]
fn lone_ccuav_sinr_is_interference_free_closed_form() {
    let config =
        ScenarioConfig { n_sectors: 1, n_gue_per_sector: 0, n_ccuav: 1, n_routes: 4, n_drops: 3, ..Default::default() };
    let sim = Simulator::new(config).unwrap();
    let route = sim.route_index(30.0).unwrap();
    for drop in 0..3 {
        let result = sim.run_drop(route, Metric::M1, drop).unwrap();
        let links = sim.drop_links(route, drop).unwrap();
        assert_eq!(links.len(), 1);
        let ch = &links[0].channel;
        let expected = ch.large_scale.beta * ch.coeffs.norm_squared() / sim.noise_mw;
        let got = 10f64.powf(result.ccuavs[0].sinr_db / 10.0);
        assert!((got / expected - 1.0).abs() < 1e-9, "{got} vs {expected}");
    }
}
