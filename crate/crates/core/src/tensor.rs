//! Symmetric second- and fourth-order tensors in Mandel notation.
//!
//! A symmetric `d x d` tensor is stored as `n_s = d(d+1)/2` components:
//! diagonal entries first, then off-diagonal entries scaled by `sqrt(2)` in
//! descending lexicographic order of `(i, j)`, i.e. `(11, 22, sqrt2 12)` in
//! two and `(11, 22, 33, sqrt2 23, sqrt2 13, sqrt2 12)` in three dimensions.
//! The basis is orthonormal, so the Frobenius product is the dot product of
//! component vectors and fourth-order tensors act as symmetric matrices.

use std::f64::consts::SQRT_2;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Largest supported number of Mandel components (`d = 3`).
pub const MAX_SYM: usize = 6;

const PAIRS_1: [(usize, usize); 1] = [(0, 0)];
const PAIRS_2: [(usize, usize); 3] = [(0, 0), (1, 1), (0, 1)];
const PAIRS_3: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)];

/// Number of independent components of a symmetric `dim x dim` tensor.
pub const fn sym_size(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

/// Index pairs `(i, j)`, `i <= j`, of the Mandel components.
pub fn mandel_pairs(dim: usize) -> &'static [(usize, usize)] {
    match dim {
        1 => &PAIRS_1,
        2 => &PAIRS_2,
        3 => &PAIRS_3,
        _ => panic!("tensors are supported for d <= 3, got {dim}"),
    }
}

/// Scaling of Mandel component `a`: 1 on the diagonal, `sqrt(2)` otherwise.
pub fn mandel_weight(dim: usize, a: usize) -> f64 {
    let (i, j) = mandel_pairs(dim)[a];
    if i == j {
        1.0
    } else {
        SQRT_2
    }
}

/// Mandel component index of the (unordered) index pair `(i, j)`.
pub fn mandel_index(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    mandel_pairs(dim)
        .iter()
        .position(|&p| p == (i, j))
        .expect("index pair within dimension")
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if (1..=3).contains(&dim) {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: 3,
            found: dim,
        })
    }
}

/// Symmetric second-order tensor (strain, stress).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymTensor2 {
    dim: usize,
    comps: [f64; MAX_SYM],
}

impl SymTensor2 {
    pub fn zeros(dim: usize) -> Self {
        check_dim(dim).expect("supported dimension");
        Self {
            dim,
            comps: [0.0; MAX_SYM],
        }
    }

    /// From Mandel components.
    pub fn from_mandel(dim: usize, comps: &[f64]) -> Result<Self> {
        check_dim(dim)?;
        let ns = sym_size(dim);
        if comps.len() != ns {
            return Err(Error::DimensionMismatch {
                expected: ns,
                found: comps.len(),
            });
        }
        let mut out = Self::zeros(dim);
        out.comps[..ns].copy_from_slice(comps);
        Ok(out)
    }

    /// From a row-major `dim x dim` matrix; the symmetric part is taken.
    pub fn from_matrix(dim: usize, matrix: &[f64]) -> Result<Self> {
        check_dim(dim)?;
        if matrix.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: matrix.len(),
            });
        }
        let mut out = Self::zeros(dim);
        for (a, &(i, j)) in mandel_pairs(dim).iter().enumerate() {
            let v = 0.5 * (matrix[i * dim + j] + matrix[j * dim + i]);
            out.comps[a] = v * mandel_weight(dim, a);
        }
        Ok(out)
    }

    /// Unit Mandel basis tensor `e_a`.
    pub fn basis(dim: usize, a: usize) -> Self {
        let mut out = Self::zeros(dim);
        out.comps[a] = 1.0;
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        sym_size(self.dim)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn mandel(&self) -> &[f64] {
        &self.comps[..sym_size(self.dim)]
    }

    pub fn mandel_mut(&mut self) -> &mut [f64] {
        let ns = sym_size(self.dim);
        &mut self.comps[..ns]
    }

    /// Tensor entry `t_ij`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let a = mandel_index(self.dim, i, j);
        self.comps[a] / mandel_weight(self.dim, a)
    }

    pub fn to_matrix(&self) -> Vec<f64> {
        let d = self.dim;
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] = self.get(i, j);
            }
        }
        out
    }

    pub fn frobenius(&self, other: &Self) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(self.mandel().iter().zip(other.mandel()).map(|(a, b)| a * b).sum())
    }

    pub fn norm(&self) -> f64 {
        self.mandel().iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl Add for SymTensor2 {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (a, b) in self.comps.iter_mut().zip(rhs.comps) {
            *a += b;
        }
        self
    }
}

impl Sub for SymTensor2 {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (a, b) in self.comps.iter_mut().zip(rhs.comps) {
            *a -= b;
        }
        self
    }
}

impl Neg for SymTensor2 {
    type Output = Self;
    fn neg(mut self) -> Self {
        for a in self.comps.iter_mut() {
            *a = -*a;
        }
        self
    }
}

impl Mul<f64> for SymTensor2 {
    type Output = Self;
    fn mul(mut self, s: f64) -> Self {
        for a in self.comps.iter_mut() {
            *a *= s;
        }
        self
    }
}

/// Frobenius product `a : b`.
pub fn frobenius(a: &SymTensor2, b: &SymTensor2) -> Result<f64> {
    a.frobenius(b)
}

/// Fourth-order tensor with major and minor symmetries, as an `n_s x n_s`
/// symmetric Mandel matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymTensor4 {
    dim: usize,
    m: [[f64; MAX_SYM]; MAX_SYM],
}

impl SymTensor4 {
    pub fn zeros(dim: usize) -> Self {
        check_dim(dim).expect("supported dimension");
        Self {
            dim,
            m: [[0.0; MAX_SYM]; MAX_SYM],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut out = Self::zeros(dim);
        for a in 0..sym_size(dim) {
            out.m[a][a] = 1.0;
        }
        out
    }

    /// From a row-major `n_s x n_s` Mandel matrix.
    pub fn from_mandel(dim: usize, matrix: &[f64]) -> Result<Self> {
        check_dim(dim)?;
        let ns = sym_size(dim);
        if matrix.len() != ns * ns {
            return Err(Error::DimensionMismatch {
                expected: ns * ns,
                found: matrix.len(),
            });
        }
        let mut out = Self::zeros(dim);
        for a in 0..ns {
            for b in 0..ns {
                out.m[a][b] = matrix[a * ns + b];
            }
        }
        Ok(out)
    }

    /// From the full index form `C_ijkl`, row-major over `(i, j, k, l)`.
    /// Minor symmetries are assumed; entries are read at `i <= j`, `k <= l`.
    pub fn from_index_form(dim: usize, c: &[f64]) -> Result<Self> {
        check_dim(dim)?;
        if c.len() != dim.pow(4) {
            return Err(Error::DimensionMismatch {
                expected: dim.pow(4),
                found: c.len(),
            });
        }
        let pairs = mandel_pairs(dim);
        let mut out = Self::zeros(dim);
        for (a, &(i, j)) in pairs.iter().enumerate() {
            for (b, &(k, l)) in pairs.iter().enumerate() {
                let idx = ((i * dim + j) * dim + k) * dim + l;
                out.m[a][b] = mandel_weight(dim, a) * mandel_weight(dim, b) * c[idx];
            }
        }
        Ok(out)
    }

    /// Full index form `C_ijkl`, row-major over `(i, j, k, l)`.
    pub fn index_form(&self) -> Vec<f64> {
        let d = self.dim;
        let mut out = vec![0.0; d.pow(4)];
        for i in 0..d {
            for j in 0..d {
                let a = mandel_index(d, i, j);
                for k in 0..d {
                    for l in 0..d {
                        let b = mandel_index(d, k, l);
                        out[((i * d + j) * d + k) * d + l] = self.m[a][b]
                            / (mandel_weight(d, a) * mandel_weight(d, b));
                    }
                }
            }
        }
        out
    }

    /// Isotropic tensor `lambda I (x) I + 2 mu I_sym`.
    pub fn from_lame(dim: usize, lambda: f64, mu: f64) -> Result<Self> {
        check_dim(dim)?;
        let mut out = Self::zeros(dim);
        for a in 0..sym_size(dim) {
            out.m[a][a] = 2.0 * mu;
        }
        for a in 0..dim {
            for b in 0..dim {
                out.m[a][b] += lambda;
            }
        }
        Ok(out)
    }

    /// Isotropic stiffness from Young's modulus and Poisson's ratio.
    pub fn isotropic(dim: usize, young: f64, poisson: f64) -> Result<Self> {
        let (lambda, mu) = lame_from_engineering(young, poisson)?;
        Self::from_lame(dim, lambda, mu)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        sym_size(self.dim)
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.m[a][b]
    }

    pub fn set(&mut self, a: usize, b: usize, v: f64) {
        self.m[a][b] = v;
    }

    /// Row-major Mandel matrix.
    pub fn mandel(&self) -> Vec<f64> {
        let ns = self.size();
        let mut out = Vec::with_capacity(ns * ns);
        for a in 0..ns {
            out.extend_from_slice(&self.m[a][..ns]);
        }
        out
    }

    pub(crate) fn rows(&self) -> &[[f64; MAX_SYM]; MAX_SYM] {
        &self.m
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        let ns = self.size();
        DMatrix::from_fn(ns, ns, |a, b| self.m[a][b])
    }

    pub fn transpose(&self) -> Self {
        let mut out = *self;
        for a in 0..MAX_SYM {
            for b in 0..MAX_SYM {
                out.m[a][b] = self.m[b][a];
            }
        }
        out
    }

    pub fn apply(&self, e: &SymTensor2) -> Result<SymTensor2> {
        if e.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: e.dim(),
            });
        }
        let ns = self.size();
        let mut out = SymTensor2::zeros(self.dim);
        let x = e.mandel();
        for (a, o) in out.mandel_mut().iter_mut().enumerate() {
            *o = (0..ns).map(|b| self.m[a][b] * x[b]).sum();
        }
        Ok(out)
    }

    /// Smallest and largest eigenvalue of the (symmetrised) Mandel matrix.
    pub fn ellipticity_bounds(&self) -> (f64, f64) {
        let sym = {
            let m = self.to_dmatrix();
            (&m + m.transpose()) * 0.5
        };
        let eig = sym.symmetric_eigenvalues();
        let lo = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    pub fn is_elliptic(&self) -> bool {
        self.ellipticity_bounds().0 > 0.0
    }

    /// Max-entry norm of `C - C^T`.
    pub fn asymmetry(&self) -> f64 {
        let ns = self.size();
        let mut worst = 0.0f64;
        for a in 0..ns {
            for b in 0..ns {
                worst = worst.max((self.m[a][b] - self.m[b][a]).abs());
            }
        }
        worst
    }

    /// Frobenius norm of the Mandel matrix.
    pub fn norm(&self) -> f64 {
        let ns = self.size();
        (0..ns)
            .flat_map(|a| (0..ns).map(move |b| (a, b)))
            .map(|(a, b)| self.m[a][b] * self.m[a][b])
            .sum::<f64>()
            .sqrt()
    }

    /// `(C + C^T) / 2`.
    pub fn symmetrized(&self) -> Self {
        let mut out = *self;
        for a in 0..MAX_SYM {
            for b in 0..MAX_SYM {
                out.m[a][b] = 0.5 * (self.m[a][b] + self.m[b][a]);
            }
        }
        out
    }

    /// Lamé parameters read off the isotropic entries: `lambda = C_1122`,
    /// `mu = C_1212`. Exact for isotropic tensors.
    pub fn lame_estimate(&self) -> (f64, f64) {
        let ns = self.size();
        if self.dim == 1 {
            return (0.0, 0.5 * self.m[0][0]);
        }
        (self.m[0][1], 0.5 * self.m[ns - 1][ns - 1])
    }
}

impl Add for SymTensor4 {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for a in 0..MAX_SYM {
            for b in 0..MAX_SYM {
                self.m[a][b] += rhs.m[a][b];
            }
        }
        self
    }
}

impl Sub for SymTensor4 {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for a in 0..MAX_SYM {
            for b in 0..MAX_SYM {
                self.m[a][b] -= rhs.m[a][b];
            }
        }
        self
    }
}

impl Mul<f64> for SymTensor4 {
    type Output = Self;
    fn mul(mut self, s: f64) -> Self {
        for row in self.m.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        self
    }
}

/// `(lambda, mu)` from `(E, nu)`.
pub fn lame_from_engineering(young: f64, poisson: f64) -> Result<(f64, f64)> {
    if !(young > 0.0) || !young.is_finite() {
        return Err(Error::InvalidMaterial(format!(
            "Young's modulus must be positive, got {young}"
        )));
    }
    if !(poisson > -1.0 && poisson < 0.5) {
        return Err(Error::InvalidMaterial(format!(
            "Poisson's ratio must lie in (-1, 1/2), got {poisson}"
        )));
    }
    let lambda = young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
    let mu = young / (2.0 * (1.0 + poisson));
    Ok((lambda, mu))
}

/// `C = lambda I (x) I + 2 mu I_sym` from `(E, nu)`.
pub fn isotropic_stiffness(dim: usize, young: f64, poisson: f64) -> Result<SymTensor4> {
    SymTensor4::isotropic(dim, young, poisson)
}

/// `(l, u)`: extreme eigenvalues of the Mandel matrix.
pub fn ellipticity_bounds(c: &SymTensor4) -> (f64, f64) {
    c.ellipticity_bounds()
}
