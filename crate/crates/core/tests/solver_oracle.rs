//! The scheme on a Dirichlet space of a diagonal pattern against an
//! independently coded truncated-Fourier Basic Scheme on a tensor grid.

mod common;

use std::f64::consts::PI;

use homlat::{
    basic_scheme, default_reference, periodised_green_table, KernelSpec, Pattern, PatternMatrix,
    SolverOptions, StiffnessField, SymTensor2, SymTensor4,
};
use num_complex::Complex64;

/// Closed-form isotropic Green operator, Mandel form, `xi = k / |k|`.
fn isotropic_gamma(lambda: f64, mu: f64, k: [f64; 2]) -> [[f64; 3]; 3] {
    let n = (k[0] * k[0] + k[1] * k[1]).sqrt();
    let xi = [k[0] / n, k[1] / n];
    let pairs = [(0, 0), (1, 1), (0, 1)];
    let w = [1.0, 1.0, 2f64.sqrt()];
    let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let mut out = [[0.0; 3]; 3];
    for (a, &(i, j)) in pairs.iter().enumerate() {
        for (b, &(p, q)) in pairs.iter().enumerate() {
            let g = (delta(i, p) * xi[j] * xi[q]
                + delta(j, p) * xi[i] * xi[q]
                + delta(i, q) * xi[j] * xi[p]
                + delta(j, q) * xi[i] * xi[p])
                / (4.0 * mu)
                - (lambda + mu) / (mu * (lambda + 2.0 * mu)) * xi[i] * xi[j] * xi[p] * xi[q];
            out[a][b] = w[a] * w[b] * g;
        }
    }
    out
}

/// Signed frequency of DFT bin `b` on `n` points, in `[-n/2, n/2)`.
fn signed(b: usize, n: usize) -> f64 {
    let b = b as i64;
    let n = n as i64;
    (if 2 * b >= n { b - n } else { b }) as f64
}

fn dft2(data: &[Complex64], n: [usize; 2], sign: f64) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); data.len()];
    for k0 in 0..n[0] {
        for k1 in 0..n[1] {
            let mut s = Complex64::default();
            for j0 in 0..n[0] {
                for j1 in 0..n[1] {
                    let phase = sign
                        * 2.0
                        * PI
                        * ((k0 * j0) as f64 / n[0] as f64 + (k1 * j1) as f64 / n[1] as f64);
                    s += data[j0 * n[1] + j1] * Complex64::from_polar(1.0, phase);
                }
            }
            out[k0 * n[1] + k1] = s;
        }
    }
    out
}

/// Plain Basic Scheme on the grid `j / n`, fields indexed `j0 * n1 + j1`.
fn grid_basic_scheme(
    c: &[[[f64; 3]; 3]],
    lambda0: f64,
    mu0: f64,
    eps0: [f64; 3],
    n: [usize; 2],
    tol: f64,
) -> (Vec<[Complex64; 3]>, usize) {
    let len = n[0] * n[1];
    let c0 = {
        let mut m = [[0.0; 3]; 3];
        m[0] = [lambda0 + 2.0 * mu0, lambda0, 0.0];
        m[1] = [lambda0, lambda0 + 2.0 * mu0, 0.0];
        m[2] = [0.0, 0.0, 2.0 * mu0];
        m
    };
    let mut e = vec![[Complex64::default(); 3]; len];
    for iteration in 1..10_000 {
        let mut tau: Vec<Vec<Complex64>> = vec![vec![Complex64::default(); len]; 3];
        for y in 0..len {
            for a in 0..3 {
                for b in 0..3 {
                    tau[a][y] += (c[y][a][b] - c0[a][b]) * (e[y][b] + eps0[b]);
                }
            }
        }
        let hat: Vec<Vec<Complex64>> = tau.iter().map(|t| dft2(t, n, -1.0)).collect();
        let mut out_hat = vec![vec![Complex64::default(); len]; 3];
        for k0 in 0..n[0] {
            for k1 in 0..n[1] {
                let idx = k0 * n[1] + k1;
                let k = [signed(k0, n[0]), signed(k1, n[1])];
                if k == [0.0, 0.0] {
                    continue;
                }
                let g = isotropic_gamma(lambda0, mu0, k);
                for a in 0..3 {
                    for b in 0..3 {
                        out_hat[a][idx] -= g[a][b] * hat[b][idx];
                    }
                }
            }
        }
        let out: Vec<Vec<Complex64>> = out_hat
            .iter()
            .map(|h| dft2(h, n, 1.0).into_iter().map(|v| v / len as f64).collect())
            .collect();
        let (mut diff, mut total) = (0.0, 0.0);
        for y in 0..len {
            for a in 0..3 {
                diff += (out[a][y] - e[y][a]).norm_sqr();
                total += (out[a][y] + eps0[a]).norm_sqr();
                e[y][a] = out[a][y];
            }
        }
        if diff.sqrt() <= tol * total.sqrt() {
            return (e, iteration);
        }
    }
    panic!("grid scheme did not converge");
}

#[test]
fn matches_truncated_fourier_scheme_on_tensor_grids() {
    for n in [[8usize, 6], [7, 5], [4, 9]] {
        let m = PatternMatrix::diagonal(&[n[0] as i64, n[1] as i64]).unwrap();
        let pattern = Pattern::new(&m);
        let len = pattern.len();
        let mut rng = common::rng(n[0] as u64 * 31 + n[1] as u64);
        let field: StiffnessField = common::random_two_phase(&mut rng, 2, len);
        let c0: SymTensor4 = default_reference(&field).unwrap();
        let (lambda0, mu0) = c0.lame_estimate();
        let eps0 = [0.4, -1.0, 0.3];
        let table =
            periodised_green_table(&c0, &KernelSpec::dirichlet(&m).orthonormal_table().unwrap())
                .unwrap();
        let options = SolverOptions::with_tolerance(1e-12, 10_000);
        let report = basic_scheme(
            &field,
            &c0,
            &SymTensor2::from_mandel(2, &eps0).unwrap(),
            &table,
            &options,
        )
        .unwrap();

        // pattern point y = j / n (mod 1) sits at grid index j
        let grid_index = |y: usize| {
            let num = pattern.numerators(y);
            let den = pattern.denominator();
            let j0 = (num[0] * n[0] as i64 / den).rem_euclid(n[0] as i64) as usize;
            let j1 = (num[1] * n[1] as i64 / den).rem_euclid(n[1] as i64) as usize;
            j0 * n[1] + j1
        };
        let mut grid_c = vec![[[0.0; 3]; 3]; len];
        for y in 0..len {
            let c = field.get(y);
            for (a, row) in grid_c[grid_index(y)].iter_mut().enumerate() {
                for (b, v) in row.iter_mut().enumerate() {
                    *v = c.get(a, b);
                }
            }
        }
        let (grid_e, iterations) = grid_basic_scheme(&grid_c, lambda0, mu0, eps0, n, 1e-12);
        assert_eq!(iterations, report.iterations, "grid {n:?}");
        let mut worst = 0.0f64;
        for y in 0..len {
            let ours = report.strain.at(y);
            for a in 0..3 {
                worst = worst.max((ours[a] - grid_e[grid_index(y)][a]).norm());
            }
        }
        assert!(worst <= 1e-10, "grid {n:?}: {worst:e}");
    }
}
