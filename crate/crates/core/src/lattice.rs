//! Integer lattices: pattern matrices, patterns `P(M)`, generating sets
//! `G(M^T)` and exact congruence reduction.
//!
//! Pattern points `y = M^{-1} z mod 1` are stored exactly as integer
//! numerators over the common denominator `m = |det M|`. Both point and
//! frequency lists are ordered lexicographically in the Smith coordinates
//! (last axis fastest), which is the memory layout the pattern FFT expects.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::intmat;
use crate::smith::{smith_normal_form, SmithDecomposition};

/// A regular `d x d` integer matrix defining a sampling lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternMatrix {
    dim: usize,
    entries: Vec<i64>,
    transpose: Vec<i64>,
    det: i64,
    adjugate: Vec<i64>,
    smith: SmithDecomposition,
}

impl PatternMatrix {
    /// Builds a pattern matrix from row-major entries.
    pub fn new(dim: usize, entries: Vec<i64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::MalformedMatrix {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        let det = intmat::det(dim, &entries);
        if det == 0 {
            return Err(Error::ZeroDeterminant);
        }
        let smith = smith_normal_form(dim, &entries)?;
        Ok(Self {
            dim,
            transpose: intmat::transpose(dim, &entries),
            adjugate: intmat::adjugate(dim, &entries),
            entries,
            det,
            smith,
        })
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for r in rows {
            let r = r.as_ref();
            if r.len() != dim {
                return Err(Error::MalformedMatrix {
                    expected: dim * dim,
                    found: rows.iter().map(|r| r.as_ref().len()).sum(),
                });
            }
            entries.extend_from_slice(r);
        }
        Self::new(dim, entries)
    }

    pub fn diagonal(diag: &[i64]) -> Result<Self> {
        let n = diag.len();
        let mut entries = vec![0; n * n];
        for (i, &v) in diag.iter().enumerate() {
            entries[i * n + i] = v;
        }
        Self::new(n, entries)
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(dim, intmat::identity(dim)).expect("identity is regular")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> i64 {
        self.entries[row * self.dim + col]
    }

    pub fn transpose_entries(&self) -> &[i64] {
        &self.transpose
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.dim).map(<[i64]>::to_vec).collect()
    }

    pub fn det(&self) -> i64 {
        self.det
    }

    /// `m = |det M|`, the number of pattern points.
    pub fn det_abs(&self) -> usize {
        self.det.unsigned_abs() as usize
    }

    pub fn smith(&self) -> &SmithDecomposition {
        &self.smith
    }

    /// `M z`.
    pub fn apply(&self, z: &[i64]) -> Vec<i64> {
        intmat::mul_vec(self.dim, &self.entries, z)
    }

    /// `M^T z`.
    pub fn apply_transpose(&self, z: &[i64]) -> Vec<i64> {
        intmat::mul_vec(self.dim, &self.transpose, z)
    }

    /// Numerators of `M^{-1} z` over the positive denominator `m`.
    pub fn inverse_numerators(&self, z: &[i64]) -> Vec<i64> {
        let sign = self.det.signum();
        intmat::mul_vec(self.dim, &self.adjugate, z)
            .into_iter()
            .map(|v| v * sign)
            .collect()
    }

    /// Numerators of `M^{-T} k` over the positive denominator `m`.
    pub fn inverse_transpose_numerators(&self, k: &[i64]) -> Vec<i64> {
        let sign = self.det.signum();
        let n = self.dim;
        (0..n)
            .map(|i| sign * (0..n).map(|j| self.adjugate[j * n + i] * k[j]).sum::<i64>())
            .collect()
    }

    /// `M^{-T} k` in floating point.
    pub fn inverse_transpose_apply(&self, k: &[i64]) -> Vec<f64> {
        let m = self.det_abs() as f64;
        self.inverse_transpose_numerators(k)
            .into_iter()
            .map(|v| v as f64 / m)
            .collect()
    }

    /// Reduces `k` to its representative in `G(M^T)`, i.e. the unique `h`
    /// with `h = k mod M^T Z^d` and `M^{-T} h` in `[-1/2, 1/2)^d`.
    pub fn reduce(&self, k: &[i64]) -> Vec<i64> {
        let (h, _) = self.reduce_with_shift(k);
        h
    }

    /// As [`reduce`](Self::reduce), also returning `z` with `k = h + M^T z`.
    pub fn reduce_with_shift(&self, k: &[i64]) -> (Vec<i64>, Vec<i64>) {
        let m = self.det_abs() as i64;
        let num = self.inverse_transpose_numerators(k);
        let shift: Vec<i64> = num
            .iter()
            .map(|&w| {
                let r = reduce_numerator(w, m);
                (w - r) / m
            })
            .collect();
        let mz = self.apply_transpose(&shift);
        let h = k.iter().zip(&mz).map(|(a, b)| a - b).collect();
        (h, shift)
    }

    pub fn is_reduced(&self, k: &[i64]) -> bool {
        let m = self.det_abs() as i64;
        self.inverse_transpose_numerators(k)
            .iter()
            .all(|&w| reduce_numerator(w, m) == w)
    }
}

/// Reduces `w / m` modulo 1 into `[-1/2, 1/2)` and returns the numerator.
pub(crate) fn reduce_numerator(w: i64, m: i64) -> i64 {
    let r = w.rem_euclid(m);
    if 2 * r >= m {
        r - m
    } else {
        r
    }
}

/// `|det M|`.
pub fn det_abs(matrix: &PatternMatrix) -> usize {
    matrix.det_abs()
}

/// Reduces `k` modulo `M^T` into the generating set.
pub fn reduce_mod(matrix: &PatternMatrix, k: &[i64]) -> Vec<i64> {
    matrix.reduce(k)
}

/// Mixed-radix cursor over the Smith grid `Z_{d_1} x ... x Z_{d_n}`.
fn flat_index(shape: &[usize], tuple: &[i64]) -> usize {
    tuple
        .iter()
        .zip(shape)
        .fold(0usize, |acc, (&t, &n)| acc * n + t.rem_euclid(n as i64) as usize)
}

fn tuple_of(shape: &[usize], mut index: usize) -> Vec<i64> {
    let mut out = vec![0i64; shape.len()];
    for axis in (0..shape.len()).rev() {
        out[axis] = (index % shape[axis]) as i64;
        index /= shape[axis];
    }
    out
}

/// The pattern `P(M)`: `m` representatives of `M^{-1} Z^d / Z^d` in
/// `[-1/2, 1/2)^d`.
#[derive(Debug, Clone)]
pub struct Pattern {
    matrix: Arc<PatternMatrix>,
    shape: Vec<usize>,
    numerators: Vec<i64>,
}

impl Pattern {
    pub fn new(matrix: &PatternMatrix) -> Self {
        Self::from_shared(Arc::new(matrix.clone()))
    }

    pub fn from_shared(matrix: Arc<PatternMatrix>) -> Self {
        let dim = matrix.dim();
        let m = matrix.det_abs();
        let mi = m as i64;
        let shape = matrix.smith().shape();
        let mut numerators = Vec::with_capacity(m * dim);
        for idx in 0..m {
            let j = tuple_of(&shape, idx);
            let z = intmat::mul_vec(dim, matrix.smith().left(), &j);
            numerators.extend(
                matrix
                    .inverse_numerators(&z)
                    .into_iter()
                    .map(|w| reduce_numerator(w, mi)),
            );
        }
        Self {
            matrix,
            shape,
            numerators,
        }
    }

    pub fn matrix(&self) -> &PatternMatrix {
        &self.matrix
    }

    pub fn shared_matrix(&self) -> Arc<PatternMatrix> {
        Arc::clone(&self.matrix)
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn len(&self) -> usize {
        self.matrix.det_abs()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Common denominator of all point coordinates (`m`).
    pub fn denominator(&self) -> i64 {
        self.matrix.det_abs() as i64
    }

    /// Shape of the Smith grid the points are laid out on.
    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    /// Numerators of point `index` over [`denominator`](Self::denominator).
    pub fn numerators(&self, index: usize) -> &[i64] {
        let d = self.dim();
        &self.numerators[index * d..(index + 1) * d]
    }

    pub fn point(&self, index: usize) -> Vec<f64> {
        let m = self.denominator() as f64;
        self.numerators(index).iter().map(|&v| v as f64 / m).collect()
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    /// Index of the point `M^{-1} z mod 1`.
    pub fn index_of_lattice(&self, z: &[i64]) -> usize {
        let j = intmat::mul_vec(self.dim(), self.matrix.smith().left_inverse(), z);
        flat_index(&self.shape, &j)
    }

    /// Index of the rational point `numerators / denominator` (any
    /// representative mod 1), or `None` if it does not lie on the lattice.
    pub fn index_of_rational(&self, numerators: &[i64], denominator: i64) -> Option<usize> {
        if numerators.len() != self.dim() || denominator == 0 {
            return None;
        }
        let mz = self.matrix.apply(numerators);
        if mz.iter().any(|v| v % denominator != 0) {
            return None;
        }
        let z: Vec<i64> = mz.iter().map(|v| v / denominator).collect();
        Some(self.index_of_lattice(&z))
    }

    /// Index of a point given by numerators over this pattern's denominator.
    pub fn index_of(&self, numerators: &[i64]) -> Option<usize> {
        self.index_of_rational(numerators, self.denominator())
    }

    /// Smith-grid coordinates of point `index`.
    pub fn smith_coords(&self, index: usize) -> Vec<i64> {
        tuple_of(&self.shape, index)
    }

    /// Index of `y_a + y_b mod 1`.
    pub fn add_indices(&self, a: usize, b: usize) -> usize {
        let ta = tuple_of(&self.shape, a);
        let tb = tuple_of(&self.shape, b);
        let sum: Vec<i64> = ta.iter().zip(&tb).map(|(x, y)| x + y).collect();
        flat_index(&self.shape, &sum)
    }

    /// Index of `y_a - y_b mod 1`.
    pub fn sub_indices(&self, a: usize, b: usize) -> usize {
        let ta = tuple_of(&self.shape, a);
        let tb = tuple_of(&self.shape, b);
        let diff: Vec<i64> = ta.iter().zip(&tb).map(|(x, y)| x - y).collect();
        flat_index(&self.shape, &diff)
    }

    /// Index of the origin.
    pub fn origin(&self) -> usize {
        0
    }
}

/// The generating set `G(M^T)`: one integer frequency per class of
/// `Z^d / M^T Z^d`, each with `M^{-T} h` in `[-1/2, 1/2)^d`.
#[derive(Debug, Clone)]
pub struct GeneratingSet {
    matrix: Arc<PatternMatrix>,
    shape: Vec<usize>,
    freqs: Vec<i64>,
}

impl GeneratingSet {
    pub fn new(matrix: &PatternMatrix) -> Self {
        Self::from_shared(Arc::new(matrix.clone()))
    }

    pub fn from_shared(matrix: Arc<PatternMatrix>) -> Self {
        let dim = matrix.dim();
        let m = matrix.det_abs();
        let shape = matrix.smith().shape();
        let right_t = intmat::transpose(dim, matrix.smith().right());
        let mut freqs = Vec::with_capacity(m * dim);
        for idx in 0..m {
            let l = tuple_of(&shape, idx);
            let h = intmat::mul_vec(dim, &right_t, &l);
            freqs.extend(matrix.reduce(&h));
        }
        Self {
            matrix,
            shape,
            freqs,
        }
    }

    pub fn matrix(&self) -> &PatternMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn len(&self) -> usize {
        self.matrix.det_abs()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn freq(&self, index: usize) -> &[i64] {
        let d = self.dim();
        &self.freqs[index * d..(index + 1) * d]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[i64]> + '_ {
        self.freqs.chunks(self.dim())
    }

    /// Index of the class containing `k` (no prior reduction needed).
    pub fn index_of(&self, k: &[i64]) -> usize {
        let dim = self.dim();
        let right_inv_t = intmat::transpose(dim, self.matrix.smith().right_inverse());
        let l = intmat::mul_vec(dim, &right_inv_t, k);
        flat_index(&self.shape, &l)
    }

    /// Index of the class of `-h` for the class at `index`.
    pub fn negated_index(&self, index: usize) -> usize {
        let neg: Vec<i64> = self.freq(index).iter().map(|v| -v).collect();
        self.index_of(&neg)
    }
}

/// `P(M)`.
pub fn pattern_points(matrix: &PatternMatrix) -> Pattern {
    Pattern::new(matrix)
}

/// `G(M^T)`.
pub fn generating_set(matrix: &PatternMatrix) -> GeneratingSet {
    GeneratingSet::new(matrix)
}
