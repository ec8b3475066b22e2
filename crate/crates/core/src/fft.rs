//! Discrete Fourier transform on patterns, `P(M) <-> G(M^T)`.
//!
//! `a_hat_h = m^{-1/2} sum_y a_y exp(-2 pi i h^T y)`.
//!
//! The fast path relabels points and frequencies through the Smith
//! decomposition `M = S D T`: with `y = M^{-1} S j` and `h = T^T l` one has
//! `h^T y = sum_i l_i j_i / d_i mod 1`, so the transform is an ordinary
//! multidimensional FFT on the grid `d_1 x ... x d_n` in the index order used
//! by [`Pattern`] and [`GeneratingSet`].

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::lattice::{GeneratingSet, Pattern, PatternMatrix};

/// Normalisation applied on the forward transform.
///
/// The inverse always undoes the matching forward scaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scaling {
    /// `m^{-1/2} F`, unitary.
    #[default]
    Unitary,
    /// `sqrt(m) F(M)`: the unnormalised sum, as needed when translating point
    /// values into coefficients of translates.
    Sum,
    /// `m^{-1/2} F(M)`: the mean `(1/m) sum_y`, i.e. discrete Fourier
    /// coefficients `c^M_h`.
    Mean,
}

impl Scaling {
    fn forward_factor(self, m: usize) -> f64 {
        let m = m as f64;
        match self {
            Scaling::Unitary => 1.0 / m.sqrt(),
            Scaling::Sum => 1.0,
            Scaling::Mean => 1.0 / m,
        }
    }

    fn inverse_factor(self, m: usize) -> f64 {
        let m = m as f64;
        match self {
            Scaling::Unitary => 1.0 / m.sqrt(),
            Scaling::Sum => 1.0 / m,
            Scaling::Mean => 1.0,
        }
    }
}

/// A reusable FFT plan for one pattern matrix.
#[derive(Clone)]
pub struct PatternFft {
    shape: Vec<usize>,
    len: usize,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

impl std::fmt::Debug for PatternFft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PatternFft")
            .field("shape", &self.shape)
            .finish()
    }
}

impl PatternFft {
    pub fn new(matrix: &PatternMatrix) -> Self {
        let shape = matrix.smith().shape();
        let mut planner = FftPlanner::new();
        let forward = shape.iter().map(|&n| planner.plan_fft_forward(n)).collect();
        let inverse = shape.iter().map(|&n| planner.plan_fft_inverse(n)).collect();
        Self {
            len: shape.iter().product(),
            shape,
            forward,
            inverse,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    /// In-place unitary forward transform.
    pub fn forward(&self, data: &mut [Complex64]) -> Result<()> {
        self.forward_scaled(data, Scaling::Unitary)
    }

    /// In-place unitary inverse transform.
    pub fn inverse(&self, data: &mut [Complex64]) -> Result<()> {
        self.inverse_scaled(data, Scaling::Unitary)
    }

    pub fn forward_scaled(&self, data: &mut [Complex64], scaling: Scaling) -> Result<()> {
        self.check_len(data.len())?;
        self.run(data, &self.forward);
        scale(data, scaling.forward_factor(self.len));
        Ok(())
    }

    pub fn inverse_scaled(&self, data: &mut [Complex64], scaling: Scaling) -> Result<()> {
        self.check_len(data.len())?;
        self.run(data, &self.inverse);
        scale(data, scaling.inverse_factor(self.len));
        Ok(())
    }

    /// Forward transform of several equally sized arrays in parallel.
    pub fn forward_batch(&self, batch: &mut [Vec<Complex64>]) -> Result<()> {
        batch.par_iter_mut().try_for_each(|data| self.forward(data))
    }

    pub fn inverse_batch(&self, batch: &mut [Vec<Complex64>]) -> Result<()> {
        batch.par_iter_mut().try_for_each(|data| self.inverse(data))
    }

    fn check_len(&self, found: usize) -> Result<()> {
        if found != self.len {
            return Err(Error::LengthMismatch {
                expected: self.len,
                found,
            });
        }
        Ok(())
    }

    fn run(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>]) {
        let mut line = Vec::new();
        for (axis, (&n, plan)) in self.shape.iter().zip(plans).enumerate() {
            if n <= 1 {
                continue;
            }
            let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
            let stride: usize = self.shape[axis + 1..].iter().product();
            if stride == 1 {
                for chunk in data.chunks_exact_mut(n) {
                    plan.process_with_scratch(chunk, &mut scratch);
                }
                continue;
            }
            line.resize(n, Complex64::default());
            let block = n * stride;
            for outer in (0..self.len).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for (t, v) in line.iter_mut().enumerate() {
                        *v = data[base + t * stride];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (t, v) in line.iter().enumerate() {
                        data[base + t * stride] = *v;
                    }
                }
            }
        }
    }
}

fn scale(data: &mut [Complex64], factor: f64) {
    if factor != 1.0 {
        for v in data.iter_mut() {
            *v *= factor;
        }
    }
}

/// Direct `O(m^2)` evaluation of the unitary pattern transform, using the
/// exact rational coordinates of points and frequencies.
pub fn pattern_dft(
    pattern: &Pattern,
    freqs: &GeneratingSet,
    values: &[Complex64],
) -> Result<Vec<Complex64>> {
    direct_transform(pattern, freqs, values, -1.0)
}

/// Direct inverse of [`pattern_dft`].
pub fn pattern_idft(
    pattern: &Pattern,
    freqs: &GeneratingSet,
    spectrum: &[Complex64],
) -> Result<Vec<Complex64>> {
    let m = pattern.len();
    if spectrum.len() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            found: spectrum.len(),
        });
    }
    let den = pattern.denominator();
    let twiddles = twiddle_table(m, 1.0);
    let norm = 1.0 / (m as f64).sqrt();
    Ok((0..m)
        .map(|yi| {
            let y = pattern.numerators(yi);
            let sum: Complex64 = (0..m)
                .map(|hi| spectrum[hi] * twiddles[phase(freqs.freq(hi), y, den)])
                .sum();
            sum * norm
        })
        .collect())
}

fn direct_transform(
    pattern: &Pattern,
    freqs: &GeneratingSet,
    values: &[Complex64],
    sign: f64,
) -> Result<Vec<Complex64>> {
    let m = pattern.len();
    if values.len() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            found: values.len(),
        });
    }
    let den = pattern.denominator();
    let twiddles = twiddle_table(m, sign);
    let norm = 1.0 / (m as f64).sqrt();
    Ok((0..m)
        .map(|hi| {
            let h = freqs.freq(hi);
            let sum: Complex64 = (0..m)
                .map(|yi| values[yi] * twiddles[phase(h, pattern.numerators(yi), den)])
                .sum();
            sum * norm
        })
        .collect())
}

/// `m h^T y mod m` for `y = numerators / m`.
fn phase(h: &[i64], y: &[i64], den: i64) -> usize {
    let dot: i64 = h.iter().zip(y).map(|(a, b)| a * b).sum();
    dot.rem_euclid(den) as usize
}

fn twiddle_table(m: usize, sign: f64) -> Vec<Complex64> {
    (0..m)
        .map(|r| Complex64::from_polar(1.0, sign * 2.0 * PI * r as f64 / m as f64))
        .collect()
}

/// Unitary fast transform of `values` on `P(M)`.
pub fn pattern_fft(matrix: &PatternMatrix, values: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut out = values.to_vec();
    PatternFft::new(matrix).forward(&mut out)?;
    Ok(out)
}

/// Unitary inverse fast transform of a spectrum on `G(M^T)`.
pub fn pattern_ifft(matrix: &PatternMatrix, spectrum: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut out = spectrum.to_vec();
    PatternFft::new(matrix).inverse(&mut out)?;
    Ok(out)
}
