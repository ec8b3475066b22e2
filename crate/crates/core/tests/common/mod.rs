#![allow(dead_code)]

use homlat::{PatternMatrix, StiffnessField, SymField, SymTensor4};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Regular 2x2 integer matrices with `1 <= |det| <= max_det`.
pub fn matrix_2d(max_det: i64) -> impl Strategy<Value = PatternMatrix> {
    prop::array::uniform4(-12i64..=12)
        .prop_filter("regular, bounded determinant", move |e| {
            let det = (e[0] * e[3] - e[1] * e[2]).abs();
            det >= 1 && det <= max_det
        })
        .prop_map(|e| PatternMatrix::new(2, e.to_vec()).unwrap())
}

/// Regular 3x3 integer matrices with `1 <= |det| <= max_det`.
pub fn matrix_3d(max_det: usize) -> impl Strategy<Value = PatternMatrix> {
    prop::array::uniform9(-4i64..=4)
        .prop_filter_map("regular, bounded determinant", move |e| {
            PatternMatrix::new(3, e.to_vec())
                .ok()
                .filter(|m| m.det_abs() <= max_det)
        })
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

pub fn random_field(rng: &mut ChaCha8Rng, dim: usize, len: usize) -> SymField {
    let ns = dim * (dim + 1) / 2;
    SymField::from_components(dim, (0..ns).map(|_| random_complex(rng, len)).collect()).unwrap()
}

/// Two isotropic phases in a random arrangement.
pub fn random_two_phase(rng: &mut ChaCha8Rng, dim: usize, len: usize) -> StiffnessField {
    let soft = SymTensor4::isotropic(dim, 1.0, 0.3).unwrap();
    let hard = SymTensor4::isotropic(dim, 10.0, 0.3).unwrap();
    let phases: Vec<usize> = (0..len).map(|_| rng.random_range(0..2)).collect();
    StiffnessField::from_phases(&phases, &[soft, hard]).unwrap()
}

pub fn rel_err(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum::<f64>().sqrt();
    if den > 0.0 {
        num / den
    } else {
        num
    }
}
