//! Quick randomized oracle checks: pattern FFT against the direct transform,
//! Green multipliers against the isotropic closed form, kernel
//! orthonormality and the Dirichlet projection property.

use homlat::fft::{pattern_dft, pattern_fft};
use homlat::{
    green_multiplier, periodised_green_table, GeneratingSet, KernelKind, KernelSpec, Pattern,
    PatternMatrix, SymField, SymTensor4,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, Result};

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, value: f64, bound: f64) -> Check {
    Check {
        name: name.to_string(),
        passed: value <= bound,
        detail: format!("max error {value:.3e} (bound {bound:.0e})"),
    }
}

fn random_matrix(rng: &mut ChaCha8Rng) -> PatternMatrix {
    loop {
        let rows: Vec<Vec<i64>> = (0..2)
            .map(|_| (0..2).map(|_| rng.random_range(-12..=12)).collect())
            .collect();
        if let Ok(m) = PatternMatrix::from_rows(&rows) {
            if (1..=256).contains(&m.det_abs()) {
                return m;
            }
        }
    }
}

fn random_complex(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

fn fft_check(rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let m = random_matrix(rng);
        let values = random_complex(rng, m.det_abs());
        let fast = pattern_fft(&m, &values)?;
        let slow = pattern_dft(&Pattern::new(&m), &GeneratingSet::new(&m), &values)?;
        let num: f64 = fast.iter().zip(&slow).map(|(a, b)| (a - b).norm_sqr()).sum();
        let den: f64 = slow.iter().map(|v| v.norm_sqr()).sum();
        worst = worst.max((num / den).sqrt());
    }
    Ok(check("pattern FFT vs direct transform (20 random matrices)", worst, 1e-12))
}

fn kron(i: usize, j: usize) -> f64 {
    f64::from(u8::from(i == j))
}

fn isotropic_green(lambda: f64, mu: f64, k: [f64; 2]) -> Result<SymTensor4> {
    let n = k[0].hypot(k[1]);
    let xi = [k[0] / n, k[1] / n];
    let mut c = vec![0.0; 16];
    for i in 0..2 {
        for j in 0..2 {
            for p in 0..2 {
                for q in 0..2 {
                    let first = (kron(i, p) * xi[j] * xi[q]
                        + kron(j, p) * xi[i] * xi[q]
                        + kron(i, q) * xi[j] * xi[p]
                        + kron(j, q) * xi[i] * xi[p])
                        / (4.0 * mu);
                    let second =
                        (lambda + mu) / (mu * (lambda + 2.0 * mu)) * xi[i] * xi[j] * xi[p] * xi[q];
                    c[((i * 2 + j) * 2 + p) * 2 + q] = first - second;
                }
            }
        }
    }
    Ok(SymTensor4::from_index_form(2, &c)?)
}

fn green_check(rng: &mut ChaCha8Rng) -> Result<Check> {
    let lambda = rng.random_range(0.5..5.0);
    let mu = rng.random_range(0.5..5.0);
    let c0 = SymTensor4::from_lame(2, lambda, mu)?;
    let mut worst: f64 = 0.0;
    for k0 in -10i64..=10 {
        for k1 in -10i64..=10 {
            if k0 == 0 && k1 == 0 {
                continue;
            }
            let got = green_multiplier(&c0, &[k0, k1])?;
            let want = isotropic_green(lambda, mu, [k0 as f64, k1 as f64])?;
            worst = worst.max((got - want).norm() / want.norm());
        }
    }
    Ok(check("Green multiplier vs isotropic closed form (21x21 grid)", worst, 1e-12))
}

fn orthonormality_check() -> Result<Check> {
    let mut worst: f64 = 0.0;
    for rows in [[[16, 0], [0, 16]], [[4, -2], [4, 14]]] {
        let m = PatternMatrix::from_rows(&rows)?;
        for a in [0.0, 0.1, 0.25, 0.45] {
            for b in [0.0, 0.1, 0.25, 0.45] {
                let kind = KernelKind::DeLaValleePoussin { slopes: vec![a, b] };
                let table = KernelSpec::new(kind, &m)?.orthonormal_table()?;
                worst = worst.max(table.orthonormality_defect());
            }
        }
    }
    Ok(check("orthonormalised de la Vallee Poussin tables", worst, 1e-10))
}

fn projection_check(rng: &mut ChaCha8Rng) -> Result<Check> {
    let m = PatternMatrix::from_rows(&[[4, -2], [4, 14]])?;
    let c0 = SymTensor4::from_lame(2, 1.3, 0.7)?;
    let table = periodised_green_table(&c0, &KernelSpec::dirichlet(&m).orthonormal_table()?)?;
    let len = m.det_abs();
    let field = SymField::from_components(2, (0..3).map(|_| random_complex(rng, len)).collect())?;
    let stiff = homlat::StiffnessField::homogeneous(len, c0);
    let once = table.apply(&stiff.apply(&field)?)?;
    let twice = table.apply(&stiff.apply(&once)?)?;
    let err = twice.add_scaled(-1.0, &once)?.norm() / once.norm();
    Ok(check("Dirichlet Green operator is a projection", err, 1e-10))
}

/// Runs all checks with the given seed.
pub fn run_selftest(seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(vec![
        fft_check(&mut rng)?,
        green_check(&mut rng)?,
        orthonormality_check()?,
        projection_check(&mut rng)?,
    ])
}

/// Formats the checks and fails if any did not pass.
pub fn report(checks: &[Check]) -> Result<String> {
    let mut out = String::new();
    for c in checks {
        let status = if c.passed { "ok" } else { "FAILED" };
        out.push_str(&format!("{status:>6}  {}: {}\n", c.name, c.detail));
    }
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name.as_str())
        .collect();
    if failed.is_empty() {
        Ok(out)
    } else {
        Err(CliError::SelfTest(format!("{out}failed: {}", failed.join("; "))))
    }
}
