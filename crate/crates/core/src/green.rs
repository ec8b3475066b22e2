//! Green operators: the continuous Fourier multiplier `Gamma0_k` of a
//! reference medium and its periodisation `Gammap_h` on a translate space.
//!
//! `Gammap_h = m sum_z |c_{h + M^T z}(f)|^2 Gamma0_{h + M^T z}` for an
//! orthonormal kernel `f`. Blocks are stored as `n_s x n_s` Mandel matrices;
//! both `Gamma0_k` and the periodised blocks are real symmetric.

use std::io::Write;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::PatternFft;
use crate::field::SymField;
use crate::kernels::{CoefficientTable, KernelKind};
use crate::lattice::PatternMatrix;
use crate::tensor::{mandel_pairs, mandel_weight, sym_size, SymTensor4};

/// Largest tolerated `|m [|c|^2]_h - 1|` for a table to count as orthonormal.
pub const ORTHONORMAL_TOLERANCE: f64 = 1e-10;

/// Symmetrised gradient in Fourier space: `(i/2)(k u^T + u k^T)`.
pub fn grad_sym_multiplier(k: &[i64], u: &[Complex64]) -> DMatrix<Complex64> {
    let d = k.len();
    assert_eq!(u.len(), d, "wave vector and displacement must share a dimension");
    let half_i = Complex64::new(0.0, 0.5);
    DMatrix::from_fn(d, d, |i, j| half_i * (u[j] * k[i] as f64 + u[i] * k[j] as f64))
}

/// Evaluates `Gamma0_k` for a fixed reference stiffness.
#[derive(Debug, Clone)]
pub struct GreenOperator {
    reference: SymTensor4,
    dim: usize,
    /// `C0_ijkl`, row-major.
    index_form: Vec<f64>,
}

impl GreenOperator {
    pub fn new(reference: &SymTensor4) -> Self {
        Self {
            reference: *reference,
            dim: reference.dim(),
            index_form: reference.index_form(),
        }
    }

    pub fn reference(&self) -> &SymTensor4 {
        &self.reference
    }

    /// `Gamma0_k` as a Mandel matrix; zero at `k = 0`.
    pub fn multiplier(&self, k: &[i64]) -> Result<SymTensor4> {
        let kf: Vec<f64> = k.iter().map(|&v| v as f64).collect();
        self.multiplier_f64(&kf)
            .ok_or_else(|| Error::SingularAcousticTensor(k.to_vec()))
    }

    /// `Gamma0` for a real wave vector; `None` if the acoustic tensor is
    /// singular.
    pub fn multiplier_f64(&self, k: &[f64]) -> Option<SymTensor4> {
        let d = self.dim;
        let mut out = SymTensor4::zeros(d);
        if k.iter().all(|&v| v == 0.0) {
            return Some(out);
        }
        let c = &self.index_form;
        let idx = |i: usize, j: usize, p: usize, q: usize| ((i * d + j) * d + p) * d + q;

        // acoustic tensor A_pq = C_pjql k_j k_l
        let mut acoustic = [[0.0f64; 3]; 3];
        for p in 0..d {
            for q in 0..d {
                let mut s = 0.0;
                for j in 0..d {
                    for l in 0..d {
                        s += c[idx(p, j, q, l)] * k[j] * k[l];
                    }
                }
                acoustic[p][q] = s;
            }
        }
        let inv = invert_small(d, &acoustic)?;

        let pairs = mandel_pairs(d);
        for (a, &(i, j)) in pairs.iter().enumerate() {
            for (b, &(p, q)) in pairs.iter().enumerate() {
                let g = 0.25
                    * (inv[i][p] * k[j] * k[q]
                        + inv[j][p] * k[i] * k[q]
                        + inv[i][q] * k[j] * k[p]
                        + inv[j][q] * k[i] * k[p]);
                out.set(a, b, mandel_weight(d, a) * mandel_weight(d, b) * g);
            }
        }
        Some(out)
    }
}

/// Inverse of a `d x d` (d <= 3) matrix, `None` when numerically singular.
fn invert_small(d: usize, a: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let mut out = [[0.0; 3]; 3];
    let scale = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| a[i][j].abs())
        .fold(0.0, f64::max);
    if !(scale > 0.0) || !scale.is_finite() {
        return None;
    }
    match d {
        1 => {
            out[0][0] = 1.0 / a[0][0];
        }
        2 => {
            let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
            if det.abs() <= 1e-14 * scale * scale {
                return None;
            }
            out[0][0] = a[1][1] / det;
            out[0][1] = -a[0][1] / det;
            out[1][0] = -a[1][0] / det;
            out[1][1] = a[0][0] / det;
        }
        3 => {
            let cof = |r0: usize, r1: usize, c0: usize, c1: usize| {
                a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0]
            };
            let c00 = cof(1, 2, 1, 2);
            let c01 = -cof(1, 2, 0, 2);
            let c02 = cof(1, 2, 0, 1);
            let det = a[0][0] * c00 + a[0][1] * c01 + a[0][2] * c02;
            if det.abs() <= 1e-14 * scale * scale * scale {
                return None;
            }
            let cofactors = [
                [c00, c01, c02],
                [-cof(0, 2, 1, 2), cof(0, 2, 0, 2), -cof(0, 2, 0, 1)],
                [cof(0, 1, 1, 2), -cof(0, 1, 0, 2), cof(0, 1, 0, 1)],
            ];
            for i in 0..3 {
                for j in 0..3 {
                    out[i][j] = cofactors[j][i] / det;
                }
            }
        }
        _ => return None,
    }
    Some(out)
}

/// `Gamma0_k` for reference stiffness `c0`.
pub fn green_multiplier(c0: &SymTensor4, k: &[i64]) -> Result<SymTensor4> {
    if k.len() != c0.dim() {
        return Err(Error::DimensionMismatch {
            expected: c0.dim(),
            found: k.len(),
        });
    }
    GreenOperator::new(c0).multiplier(k)
}

/// Periodised Green operator on a translate space: one Mandel block per
/// frequency class, plus the FFT plan used to apply it.
#[derive(Debug, Clone)]
pub struct GreenTable {
    matrix: Arc<PatternMatrix>,
    fft: PatternFft,
    blocks: Vec<SymTensor4>,
    kernel: KernelKind,
    reference: SymTensor4,
}

/// Builds `Gammap_h` for every class of an orthonormal coefficient table.
pub fn periodised_green_table(c0: &SymTensor4, kernel: &CoefficientTable) -> Result<GreenTable> {
    let defect = kernel.orthonormality_defect();
    if !kernel.is_orthonormal() || defect > ORTHONORMAL_TOLERANCE {
        return Err(Error::KernelNotOrthonormal(defect));
    }
    let matrix = kernel.spec().shared_matrix();
    if c0.dim() != matrix.dim() {
        return Err(Error::DimensionMismatch {
            expected: matrix.dim(),
            found: c0.dim(),
        });
    }
    let (lower, _) = c0.ellipticity_bounds();
    if !(lower > 0.0) {
        return Err(Error::NonElliptic(lower));
    }
    let op = GreenOperator::new(c0);
    let m = kernel.len() as f64;
    let dim = matrix.dim();
    let blocks = (0..kernel.len())
        .into_par_iter()
        .map(|class| {
            let mut block = SymTensor4::zeros(dim);
            if kernel.freqs().freq(class).iter().all(|&v| v == 0) {
                return Ok(block);
            }
            let mut failure = None;
            kernel.for_each_term(class, |k, c| {
                if failure.is_some() {
                    return;
                }
                match op.multiplier(k) {
                    Ok(g) => block = block + g * (m * c * c),
                    Err(e) => failure = Some(e),
                }
            });
            match failure {
                Some(e) => Err(e),
                None => Ok(block),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GreenTable {
        fft: PatternFft::new(&matrix),
        matrix,
        blocks,
        kernel: kernel.spec().kind().clone(),
        reference: *c0,
    })
}

impl GreenTable {
    pub fn matrix(&self) -> &PatternMatrix {
        &self.matrix
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn block(&self, class: usize) -> &SymTensor4 {
        &self.blocks[class]
    }

    pub fn blocks(&self) -> &[SymTensor4] {
        &self.blocks
    }

    pub fn kernel(&self) -> &KernelKind {
        &self.kernel
    }

    pub fn reference(&self) -> &SymTensor4 {
        &self.reference
    }

    pub fn fft(&self) -> &PatternFft {
        &self.fft
    }

    /// Largest `|G_h - G_{-h}|` over classes: zero when real fields are
    /// mapped to real fields.
    pub fn conjugate_asymmetry(&self) -> f64 {
        let freqs = crate::lattice::GeneratingSet::from_shared(Arc::clone(&self.matrix));
        (0..self.len())
            .map(|c| {
                let n = freqs.negated_index(c);
                (self.blocks[c] - self.blocks[n]).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Applies the operator in place to component arrays (Mandel order).
    pub fn apply_components(&self, comps: &mut [Vec<Complex64>]) -> Result<()> {
        let ns = sym_size(self.dim());
        if comps.len() != ns {
            return Err(Error::ShapeMismatch(format!(
                "expected {ns} tensor components, got {}",
                comps.len()
            )));
        }
        if let Some(bad) = comps.iter().find(|c| c.len() != self.len()) {
            return Err(Error::ShapeMismatch(format!(
                "expected {} points, got {}",
                self.len(),
                bad.len()
            )));
        }
        self.fft.forward_batch(comps)?;
        {
            // transpose to point-major for the per-class products
            let m = self.len();
            let mut spectrum = vec![Complex64::default(); m * ns];
            for (a, c) in comps.iter().enumerate() {
                for (h, v) in c.iter().enumerate() {
                    spectrum[h * ns + a] = *v;
                }
            }
            spectrum
                .par_chunks_mut(ns)
                .zip(self.blocks.par_iter())
                .for_each(|(x, g)| {
                    let mut out = [Complex64::default(); crate::tensor::MAX_SYM];
                    let rows = g.rows();
                    for a in 0..ns {
                        let mut s = Complex64::default();
                        for b in 0..ns {
                            s += x[b] * rows[a][b];
                        }
                        out[a] = s;
                    }
                    x.copy_from_slice(&out[..ns]);
                });
            for (a, c) in comps.iter_mut().enumerate() {
                for (h, v) in c.iter_mut().enumerate() {
                    *v = spectrum[h * ns + a];
                }
            }
        }
        self.fft.inverse_batch(comps)?;
        Ok(())
    }

    /// `Gammap : field`.
    pub fn apply(&self, field: &SymField) -> Result<SymField> {
        if field.dim() != self.dim() {
            return Err(Error::ShapeMismatch(format!(
                "field dimension {} vs table dimension {}",
                field.dim(),
                self.dim()
            )));
        }
        let mut comps = field.clone().into_components();
        self.apply_components(&mut comps)?;
        SymField::from_components(self.dim(), comps)
    }

    /// Writes every block as little-endian `f64`, class-major, each block
    /// row-major `n_s x n_s`.
    pub fn write_binary<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for block in &self.blocks {
            for v in block.mandel() {
                out.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }
}

/// `Gammap : field`.
pub fn apply_green(table: &GreenTable, field: &SymField) -> Result<SymField> {
    table.apply(field)
}
