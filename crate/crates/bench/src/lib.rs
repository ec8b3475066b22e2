//! Shared fixtures for the benchmarks.

use homlat::{
    default_reference, periodised_green_table, rasterize_hashin, GreenTable, HashinGeometry,
    KernelKind, KernelSpec, Pattern, PatternMatrix, StiffnessField, SymTensor4,
};
use num_complex::Complex64;

/// Deterministic, non-trivial values on `m` points.
pub fn signal(m: usize) -> Vec<Complex64> {
    (0..m)
        .map(|i| {
            let t = i as f64;
            Complex64::new((0.37 * t).sin(), (0.11 * t).cos())
        })
        .collect()
}

/// Hashin-type inclusion on `M` with its default reference stiffness.
pub struct Problem {
    pub stiffness: StiffnessField,
    pub reference: SymTensor4,
}

pub fn hashin_problem(matrix: &PatternMatrix) -> Problem {
    let geom = HashinGeometry::standard(SymTensor4::isotropic(2, 3.0, 0.3).unwrap()).unwrap();
    let stiffness = rasterize_hashin(&Pattern::new(matrix), &geom).unwrap().stiffness;
    let reference = default_reference(&stiffness).unwrap();
    Problem {
        stiffness,
        reference,
    }
}

pub fn green_table(matrix: &PatternMatrix, kind: KernelKind, reference: &SymTensor4) -> GreenTable {
    let coeffs = KernelSpec::new(kind, matrix)
        .unwrap()
        .orthonormal_table()
        .unwrap();
    periodised_green_table(reference, &coeffs).unwrap()
}
