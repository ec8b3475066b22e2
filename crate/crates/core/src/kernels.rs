//! Translate-space kernels and their Fourier coefficients.
//!
//! A kernel `f` spans the space of translates `V_M^f` along `2 pi P(M)`.
//! Everything downstream only needs the coefficients `c_k(f)` grouped by
//! frequency class `k = h + M^T z`, `h` in `G(M^T)`. Tables are stored
//! lazily: the kernel is evaluated on demand and each class carries a scale
//! factor, so orthonormalisation only touches `m` numbers even for Box
//! splines with thousands of retained shifts per class.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{PatternFft, Scaling};
use crate::lattice::{GeneratingSet, PatternMatrix};

/// Per-axis bracket-sum truncation radius for Box splines; `2R + 1 = 33`
/// terms per axis.
pub const DEFAULT_BOX_RADIUS: usize = 16;

/// Minimum admissible `m [|c|^2]_h` before a class counts as degenerate.
pub const DEGENERATE_BRACKET: f64 = 1e-14;

/// Which generator spans the translate space.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelKind {
    /// Flat spectrum on `G(M^T)`.
    Dirichlet,
    /// De la Vallée Poussin mean with a tensor-product trapezoid window, one
    /// slope per axis. All-zero slopes give the modified Dirichlet kernel.
    DeLaValleePoussin { slopes: Vec<f64> },
    /// Periodised pattern Box spline with direction vectors `directions`
    /// (the columns of `Xi`) and per-axis bracket-sum truncation `radius`.
    BoxSpline {
        directions: Vec<Vec<f64>>,
        radius: usize,
    },
}

impl KernelKind {
    pub fn name(&self) -> &'static str {
        match self {
            KernelKind::Dirichlet => "dirichlet",
            KernelKind::DeLaValleePoussin { .. } => "dlvp",
            KernelKind::BoxSpline { .. } => "box",
        }
    }
}

/// A kernel bound to a pattern matrix.
#[derive(Debug, Clone)]
pub struct KernelSpec {
    kind: KernelKind,
    matrix: Arc<PatternMatrix>,
}

/// 1-D trapezoid window: 1 on `|t| <= (1 - alpha) / 2`, 0 beyond
/// `(1 + alpha) / 2`, linear in between. For `alpha = 0` it is the indicator
/// of `(-1/2, 1/2)` with value `1/2` at `|t| = 1/2`.
pub fn trapezoid(alpha: f64, t: f64) -> f64 {
    let at = t.abs();
    if alpha == 0.0 {
        return if at < 0.5 {
            1.0
        } else if at == 0.5 {
            0.5
        } else {
            0.0
        };
    }
    ((0.5 - at) / alpha + 0.5).clamp(0.0, 1.0)
}

/// Tensor-product trapezoid `g_alpha(x)`.
pub fn admissible_window(slopes: &[f64], x: &[f64]) -> f64 {
    slopes.iter().zip(x).map(|(&a, &t)| trapezoid(a, t)).product()
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

impl KernelSpec {
    pub fn new(kind: KernelKind, matrix: &PatternMatrix) -> Result<Self> {
        Self::with_shared(kind, Arc::new(matrix.clone()))
    }

    pub fn with_shared(kind: KernelKind, matrix: Arc<PatternMatrix>) -> Result<Self> {
        let d = matrix.dim();
        match &kind {
            KernelKind::Dirichlet => {}
            KernelKind::DeLaValleePoussin { slopes } => {
                if slopes.len() != d {
                    return Err(Error::InvalidSpec(format!(
                        "expected {d} slopes, got {}",
                        slopes.len()
                    )));
                }
                if let Some(a) = slopes.iter().find(|a| !(0.0..=0.5).contains(*a)) {
                    return Err(Error::InvalidSpec(format!(
                        "slope {a} outside [0, 1/2]"
                    )));
                }
            }
            KernelKind::BoxSpline { directions, .. } => {
                validate_directions(d, directions)?;
            }
        }
        Ok(Self { kind, matrix })
    }

    pub fn dirichlet(matrix: &PatternMatrix) -> Self {
        Self::new(KernelKind::Dirichlet, matrix).expect("Dirichlet kernel is always valid")
    }

    pub fn de_la_vallee_poussin(matrix: &PatternMatrix, slopes: &[f64]) -> Result<Self> {
        Self::new(
            KernelKind::DeLaValleePoussin {
                slopes: slopes.to_vec(),
            },
            matrix,
        )
    }

    pub fn box_spline(
        matrix: &PatternMatrix,
        directions: Vec<Vec<f64>>,
        radius: usize,
    ) -> Result<Self> {
        Self::new(KernelKind::BoxSpline { directions, radius }, matrix)
    }

    pub fn kind(&self) -> &KernelKind {
        &self.kind
    }

    pub fn matrix(&self) -> &PatternMatrix {
        &self.matrix
    }

    pub fn shared_matrix(&self) -> Arc<PatternMatrix> {
        Arc::clone(&self.matrix)
    }

    /// Fourier coefficient `c_k(f)` (not orthonormalised).
    pub fn coeff(&self, k: &[i64]) -> f64 {
        self.coeff_from_numerators(&self.matrix.inverse_transpose_numerators(k))
    }

    /// `c_k(f)` given the numerators of `M^{-T} k` over `m`.
    fn coeff_from_numerators(&self, num: &[i64]) -> f64 {
        let m = self.matrix.det_abs() as i64;
        let inv_sqrt_m = 1.0 / (m as f64).sqrt();
        match &self.kind {
            KernelKind::Dirichlet => {
                // M^{-T} k in [-1/2, 1/2)^d, decided on exact numerators
                if num.iter().all(|&w| -m <= 2 * w && 2 * w < m) {
                    inv_sqrt_m
                } else {
                    0.0
                }
            }
            KernelKind::DeLaValleePoussin { slopes } => {
                let mut g = 1.0;
                for (&a, &w) in slopes.iter().zip(num) {
                    let factor = if a == 0.0 {
                        match (2 * w.abs()).cmp(&m) {
                            std::cmp::Ordering::Less => 1.0,
                            std::cmp::Ordering::Equal => 0.5,
                            std::cmp::Ordering::Greater => 0.0,
                        }
                    } else {
                        trapezoid(a, w as f64 / m as f64)
                    };
                    if factor == 0.0 {
                        return 0.0;
                    }
                    g *= factor;
                }
                g * inv_sqrt_m
            }
            KernelKind::BoxSpline { directions, .. } => {
                let inv_m = 1.0 / m as f64;
                directions
                    .iter()
                    .map(|xi| {
                        let dot: f64 = xi.iter().zip(num).map(|(a, &b)| a * b as f64).sum();
                        sinc(PI * dot * inv_m)
                    })
                    .product()
            }
        }
    }

    /// Lattice shifts `z` retained in each class sum `k = h + M^T z`.
    ///
    /// Exact for the frequency-compact kernels; `(2R + 1)^d` terms for Box
    /// splines.
    pub fn retained_shifts(&self) -> Vec<Vec<i64>> {
        let d = self.matrix.dim();
        let radius = match &self.kind {
            KernelKind::Dirichlet => 0,
            // window support |t| < 3/4 and M^{-T} h in [-1/2, 1/2)
            KernelKind::DeLaValleePoussin { .. } => 1,
            KernelKind::BoxSpline { radius, .. } => *radius as i64,
        };
        cube(d, radius)
    }

    /// Builds the (not yet orthonormal) coefficient table.
    pub fn table(&self) -> CoefficientTable {
        CoefficientTable::new(self.clone())
    }

    /// Builds the orthonormalised coefficient table.
    pub fn orthonormal_table(&self) -> Result<CoefficientTable> {
        orthonormalize(&self.table())
    }
}

fn validate_directions(d: usize, directions: &[Vec<f64>]) -> Result<()> {
    if directions.len() < d {
        return Err(Error::InvalidSpec(format!(
            "{} direction vectors cannot span R^{d}",
            directions.len()
        )));
    }
    if let Some(bad) = directions.iter().find(|xi| xi.len() != d) {
        return Err(Error::InvalidSpec(format!(
            "direction {bad:?} does not have {d} entries"
        )));
    }
    if directions.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidSpec("non-finite direction entry".into()));
    }
    let xi = DMatrix::from_fn(d, directions.len(), |i, j| directions[j][i]);
    if xi.rank(1e-12) < d {
        return Err(Error::InvalidSpec(format!(
            "direction vectors do not span R^{d}"
        )));
    }
    Ok(())
}

/// All integer vectors in `[-r, r]^d`, lexicographic.
fn cube(d: usize, r: i64) -> Vec<Vec<i64>> {
    let side = (2 * r + 1) as usize;
    let total = side.pow(d as u32);
    (0..total)
        .map(|mut idx| {
            let mut z = vec![0i64; d];
            for axis in (0..d).rev() {
                z[axis] = (idx % side) as i64 - r;
                idx /= side;
            }
            z
        })
        .collect()
}

/// Three-direction Box-spline check: for `Xi` built from `(1,0)`, `(0,1)`
/// and `(1,1)` with multiplicities `(p, q, r)`, translates are linearly
/// independent when at least two multiplicities are positive. Returns `None`
/// when `Xi` is not of that form.
pub fn three_direction_condition(directions: &[Vec<f64>]) -> Option<bool> {
    let mut counts = [0usize; 3];
    for xi in directions {
        match xi.as_slice() {
            [a, b] if *a == 1.0 && *b == 0.0 => counts[0] += 1,
            [a, b] if *a == 0.0 && *b == 1.0 => counts[1] += 1,
            [a, b] if *a == 1.0 && *b == 1.0 => counts[2] += 1,
            _ => return None,
        }
    }
    Some(counts.iter().filter(|&&c| c > 0).count() >= 2)
}

/// Fourier coefficients of a kernel grouped by frequency class.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    spec: KernelSpec,
    freqs: GeneratingSet,
    shifts: Vec<Vec<i64>>,
    class_scale: Vec<f64>,
    brackets: Vec<f64>,
    orthonormal: bool,
}

impl CoefficientTable {
    fn new(spec: KernelSpec) -> Self {
        let freqs = GeneratingSet::from_shared(spec.shared_matrix());
        let shifts = spec.retained_shifts();
        let m = freqs.len();
        let mut table = Self {
            spec,
            freqs,
            shifts,
            class_scale: vec![1.0; m],
            brackets: vec![0.0; m],
            orthonormal: false,
        };
        table.brackets = (0..m).map(|i| table.raw_bracket(i)).collect();
        table
    }

    fn raw_bracket(&self, class: usize) -> f64 {
        let mut sum = 0.0;
        self.for_each_term(class, |_, c| sum += c * c);
        sum
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn freqs(&self) -> &GeneratingSet {
        &self.freqs
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_orthonormal(&self) -> bool {
        self.orthonormal
    }

    pub fn shifts(&self) -> &[Vec<i64>] {
        &self.shifts
    }

    /// `[|c|^2]_h` for class `class` (truncated sum for Box splines).
    pub fn bracket(&self, class: usize) -> f64 {
        self.brackets[class]
    }

    /// Largest deviation of `m [|c|^2]_h` from 1 over all classes.
    pub fn orthonormality_defect(&self) -> f64 {
        let m = self.len() as f64;
        self.brackets
            .iter()
            .map(|b| (m * b - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Calls `visit(k, c_k)` for every retained `k = h + M^T z` of a class.
    pub fn for_each_term(&self, class: usize, visit: impl FnMut(&[i64], f64)) {
        self.visit_shifts(class, &self.shifts, self.class_scale[class], visit);
    }

    fn visit_shifts(
        &self,
        class: usize,
        shifts: &[Vec<i64>],
        scale: f64,
        mut visit: impl FnMut(&[i64], f64),
    ) {
        if scale == 0.0 {
            return;
        }
        let matrix = self.spec.matrix();
        let m = matrix.det_abs() as i64;
        let h = self.freqs.freq(class);
        let h_num = matrix.inverse_transpose_numerators(h);
        let d = h.len();
        let mut k = vec![0i64; d];
        let mut num = vec![0i64; d];
        for z in shifts {
            // M^{-T}(h + M^T z) = M^{-T} h + z
            for i in 0..d {
                num[i] = h_num[i] + m * z[i];
            }
            let c = self.spec.coeff_from_numerators(&num);
            if c != 0.0 {
                let mz = matrix.apply_transpose(z);
                for i in 0..d {
                    k[i] = h[i] + mz[i];
                }
                visit(&k, c * scale);
            }
        }
    }

    /// Retained `(k, c_k)` pairs of a class.
    pub fn terms(&self, class: usize) -> Vec<(Vec<i64>, f64)> {
        let mut out = Vec::new();
        self.for_each_term(class, |k, c| out.push((k.to_vec(), c)));
        out
    }

    /// Plain bracket sum `[c]_h = sum_z c_{h + M^T z}`.
    pub fn coefficient_sum(&self, class: usize) -> f64 {
        let mut sum = 0.0;
        self.for_each_term(class, |_, c| sum += c);
        sum
    }

    /// Multiplies every coefficient of one class by `factor`; clears the
    /// orthonormal flag.
    pub fn scale_class(&mut self, class: usize, factor: f64) {
        self.class_scale[class] *= factor;
        self.brackets[class] *= factor * factor;
        self.orthonormal = false;
    }

    /// Bracket sum of `weight(k) |c_k|^2` over the class of `h`.
    pub fn bracket_sum(&self, h: &[i64], weight: impl Fn(&[i64]) -> f64) -> Result<f64> {
        let matrix = self.spec.matrix();
        if h.len() != matrix.dim() || !matrix.is_reduced(h) {
            return Err(Error::NotReduced(h.to_vec()));
        }
        let class = self.freqs.index_of(h);
        let mut sum = 0.0;
        self.for_each_term(class, |k, c| sum += weight(k) * c * c);
        Ok(sum)
    }

    /// Largest relative contribution of the first shell beyond the truncation
    /// radius, `max_h [|c|^2]_{shell} / [|c|^2]_h`. Zero for kernels whose
    /// class sums are exact.
    pub fn truncation_tail(&self) -> f64 {
        let KernelKind::BoxSpline { radius, .. } = self.spec.kind() else {
            return 0.0;
        };
        let r = *radius as i64 + 1;
        let d = self.spec.matrix().dim();
        let shell: Vec<Vec<i64>> = cube(d, r)
            .into_iter()
            .filter(|z| z.iter().any(|v| v.abs() == r))
            .collect();
        let mut worst = 0.0f64;
        for class in 0..self.len() {
            let mut tail = 0.0;
            self.visit_shifts(class, &shell, self.class_scale[class], |_, c| tail += c * c);
            if self.brackets[class] > 0.0 {
                worst = worst.max(tail / self.brackets[class]);
            }
        }
        worst
    }
}

/// `[|c|^2]_h` weighted by `weight`, see [`CoefficientTable::bracket_sum`].
pub fn bracket_sum(
    table: &CoefficientTable,
    h: &[i64],
    weight: impl Fn(&[i64]) -> f64,
) -> Result<f64> {
    table.bracket_sum(h, weight)
}

/// Rescales every class so that `m [|c|^2]_h = 1`, making the translates an
/// orthonormal basis.
pub fn orthonormalize(table: &CoefficientTable) -> Result<CoefficientTable> {
    let m = table.len() as f64;
    let mut out = table.clone();
    for class in 0..out.len() {
        let b = out.brackets[class];
        if !(m * b > DEGENERATE_BRACKET) {
            return Err(Error::DegenerateClass(out.freqs.freq(class).to_vec()));
        }
        let factor = 1.0 / (m * b).sqrt();
        out.class_scale[class] *= factor;
        out.brackets[class] = out.raw_bracket(class);
    }
    out.orthonormal = true;
    Ok(out)
}

/// Discrete Fourier coefficients `c^M_h = (1/m) sum_y f(2 pi y) e^{-2 pi i h^T y}`
/// of samples on `P(M)`, in generating-set order.
pub fn discrete_coeffs(matrix: &PatternMatrix, samples: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut out = samples.to_vec();
    PatternFft::new(matrix).forward_scaled(&mut out, Scaling::Mean)?;
    Ok(out)
}

/// Coefficients `a_hat_h` of `g = sum_y a_y T(y) f` interpolating a target.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolantCoefficients {
    pub values: Vec<Complex64>,
}

/// `a_hat_h = [c(g)]_h / [c(f)]_h` for target class sums `[c(g)]_h`.
pub fn interpolant_coeffs(
    target_class_sums: &[Complex64],
    table: &CoefficientTable,
) -> Result<InterpolantCoefficients> {
    if target_class_sums.len() != table.len() {
        return Err(Error::LengthMismatch {
            expected: table.len(),
            found: target_class_sums.len(),
        });
    }
    let sqrt_m = (table.len() as f64).sqrt();
    let values = target_class_sums
        .iter()
        .enumerate()
        .map(|(class, &target)| {
            let den = table.coefficient_sum(class);
            if (den * sqrt_m).abs() < DEGENERATE_BRACKET {
                Err(Error::NoInterpolant(table.freqs().freq(class).to_vec()))
            } else {
                Ok(target / den)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(InterpolantCoefficients { values })
}

/// Interpolant coefficients of the fundamental interpolant (Lagrange
/// function on `P(M)`): target class sums `1/m`.
pub fn fundamental_interpolant(table: &CoefficientTable) -> Result<InterpolantCoefficients> {
    let m = table.len();
    interpolant_coeffs(&vec![Complex64::new(1.0 / m as f64, 0.0); m], table)
}

/// A finitely supported Fourier series `sum_k c_k e^{i k^T x}`.
#[derive(Debug, Clone)]
pub struct Expansion {
    dim: usize,
    terms: Vec<(Vec<i64>, Complex64)>,
}

impl Expansion {
    pub fn new(dim: usize, terms: Vec<(Vec<i64>, Complex64)>) -> Self {
        Self { dim, terms }
    }

    /// The kernel itself: all retained coefficients of the table.
    pub fn from_table(table: &CoefficientTable) -> Self {
        let mut terms = Vec::new();
        for class in 0..table.len() {
            table.for_each_term(class, |k, c| terms.push((k.to_vec(), Complex64::new(c, 0.0))));
        }
        Self::new(table.spec().matrix().dim(), terms)
    }

    /// `sum_h a_hat_h sum_z c_{h + M^T z}(f) e^{i k^T x}`.
    pub fn from_interpolant(table: &CoefficientTable, coeffs: &InterpolantCoefficients) -> Self {
        let mut terms = Vec::new();
        for class in 0..table.len() {
            let a = coeffs.values[class];
            table.for_each_term(class, |k, c| terms.push((k.to_vec(), a * c)));
        }
        Self::new(table.spec().matrix().dim(), terms)
    }

    pub fn terms(&self) -> &[(Vec<i64>, Complex64)] {
        &self.terms
    }

    pub fn evaluate_complex(&self, points: &[Vec<f64>]) -> Vec<Complex64> {
        points
            .iter()
            .map(|x| {
                debug_assert_eq!(x.len(), self.dim);
                self.terms
                    .iter()
                    .map(|(k, c)| {
                        let phase: f64 = k.iter().zip(x).map(|(&ki, &xi)| ki as f64 * xi).sum();
                        c * Complex64::from_polar(1.0, phase)
                    })
                    .sum()
            })
            .collect()
    }

    /// Real part of the series at each point.
    pub fn evaluate(&self, points: &[Vec<f64>]) -> Vec<f64> {
        self.evaluate_complex(points).into_iter().map(|v| v.re).collect()
    }
}

/// Evaluates the kernel of `table` at `points` (`x` in `[-pi, pi)^d`).
pub fn synthesize(table: &CoefficientTable, points: &[Vec<f64>]) -> Vec<f64> {
    Expansion::from_table(table).evaluate(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Pattern;

    fn diag(n: i64) -> PatternMatrix {
        PatternMatrix::diagonal(&[n, n]).unwrap()
    }

    #[test]
    fn dirichlet_coefficient_at_origin() {
        let m = diag(4);
        let spec = KernelSpec::dirichlet(&m);
        assert!((spec.coeff(&[0, 0]) - 0.25).abs() < 1e-15);
        // [-1/2, 1/2): -2 is inside, +2 is not
        assert!(spec.coeff(&[-2, 0]) > 0.0);
        assert_eq!(spec.coeff(&[2, 0]), 0.0);
    }

    #[test]
    fn modified_dirichlet_half_value_on_boundary() {
        let m = diag(4);
        let spec = KernelSpec::de_la_vallee_poussin(&m, &[0.0, 0.0]).unwrap();
        assert!((spec.coeff(&[2, 0]) - 0.5 / 4.0).abs() < 1e-15);
        assert!((spec.coeff(&[-2, 0]) - 0.5 / 4.0).abs() < 1e-15);
        assert!((spec.coeff(&[2, 2]) - 0.25 / 4.0).abs() < 1e-15);
        // limit alpha -> 0 of the trapezoid at the boundary is 1/2
        for alpha in [1e-3, 1e-6, 1e-9] {
            assert!((trapezoid(alpha, 0.5) - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn box_spline_coefficient() {
        let m = diag(2);
        let spec = KernelSpec::box_spline(&m, vec![vec![1.0, 0.0], vec![0.0, 1.0]], 4).unwrap();
        let c = spec.coeff(&[1, 0]);
        assert!((c - std::f64::consts::FRAC_2_PI).abs() < 1e-15);
    }

    #[test]
    fn invalid_specs() {
        let m = diag(4);
        assert!(matches!(
            KernelSpec::de_la_vallee_poussin(&m, &[0.6, 0.0]),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            KernelSpec::de_la_vallee_poussin(&m, &[0.1]),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            KernelSpec::box_spline(&m, vec![vec![1.0, 0.0], vec![2.0, 0.0]], 2),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            KernelSpec::box_spline(&m, vec![vec![1.0, 0.0]], 2),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn three_direction_rule() {
        let e1 = vec![1.0, 0.0];
        let e2 = vec![0.0, 1.0];
        let e12 = vec![1.0, 1.0];
        assert_eq!(three_direction_condition(&[e1.clone(), e1.clone(), e2.clone()]), Some(true));
        assert_eq!(three_direction_condition(&[e12.clone(), e12.clone()]), Some(false));
        assert_eq!(three_direction_condition(&[e1, e12]), Some(true));
        assert_eq!(three_direction_condition(&[vec![2.0, 1.0], e2]), None);
    }

    #[test]
    fn dirichlet_bracket_is_one_over_m() {
        let m = PatternMatrix::from_rows(&[[4, -2], [4, 14]]).unwrap();
        let table = KernelSpec::dirichlet(&m).table();
        for class in 0..table.len() {
            assert!((table.bracket(class) - 1.0 / 64.0).abs() < 1e-16);
            assert_eq!(table.terms(class).len(), 1);
        }
        let ortho = orthonormalize(&table).unwrap();
        for class in 0..table.len() {
            assert_eq!(ortho.terms(class), table.terms(class));
        }
    }

    #[test]
    fn dlvp_has_at_most_four_terms_in_2d() {
        let m = PatternMatrix::from_rows(&[[4, -2], [4, 14]]).unwrap();
        let spec = KernelSpec::de_la_vallee_poussin(&m, &[0.45, 0.3]).unwrap();
        let table = spec.table();
        let mut max_terms = 0;
        for class in 0..table.len() {
            max_terms = max_terms.max(table.terms(class).len());
        }
        assert!(max_terms <= 4);
        assert_eq!(max_terms, 4);
    }

    #[test]
    fn orthonormalize_dlvp() {
        let m = diag(8);
        let spec = KernelSpec::de_la_vallee_poussin(&m, &[0.1, 0.1]).unwrap();
        let table = orthonormalize(&spec.table()).unwrap();
        assert!(table.is_orthonormal());
        assert!(table.orthonormality_defect() < 1e-12);
    }

    #[test]
    fn zeroed_class_is_degenerate() {
        let m = diag(4);
        let mut table = KernelSpec::dirichlet(&m).table();
        table.scale_class(5, 0.0);
        assert!(matches!(
            orthonormalize(&table),
            Err(Error::DegenerateClass(h)) if h == table.freqs().freq(5)
        ));
    }

    #[test]
    fn bracket_sum_requires_reduced_frequency() {
        let m = diag(4);
        let table = KernelSpec::dirichlet(&m).table();
        assert!(matches!(
            table.bracket_sum(&[3, 0], |_| 1.0),
            Err(Error::NotReduced(_))
        ));
        assert!((table.bracket_sum(&[1, 0], |_| 1.0).unwrap() - 1.0 / 16.0).abs() < 1e-16);
    }

    #[test]
    fn box_spline_bracket_uses_33_squared_terms() {
        let m = diag(4);
        let dirs = vec![
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
        ];
        let spec = KernelSpec::box_spline(&m, dirs, DEFAULT_BOX_RADIUS).unwrap();
        assert_eq!(spec.retained_shifts().len(), 33 * 33);
        let table = orthonormalize(&spec.table()).unwrap();
        assert!(table.orthonormality_defect() < 1e-12);
        let tail = table.truncation_tail();
        assert!(tail < 1e-5, "tail {tail:e}");
    }

    #[test]
    fn interpolant_examples() {
        let m = diag(4);
        let table = orthonormalize(
            &KernelSpec::de_la_vallee_poussin(&m, &[0.25, 0.0]).unwrap().table(),
        )
        .unwrap();
        // g = f gives a_hat = 1
        let own: Vec<Complex64> = (0..16)
            .map(|c| Complex64::new(table.coefficient_sum(c), 0.0))
            .collect();
        for a in interpolant_coeffs(&own, &table).unwrap().values {
            assert!((a - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        }

        // Dirichlet: c_h(I_M) = a_hat_h c_h(f) = 1/m
        let dir = KernelSpec::dirichlet(&m).table();
        let fi = fundamental_interpolant(&dir).unwrap();
        for class in 0..16 {
            let c = fi.values[class] * dir.coefficient_sum(class);
            assert!((c - Complex64::new(1.0 / 16.0, 0.0)).norm() < 1e-15);
        }

        let mut broken = dir.clone();
        broken.scale_class(3, 0.0);
        assert!(matches!(
            fundamental_interpolant(&broken),
            Err(Error::NoInterpolant(_))
        ));
    }

    #[test]
    fn fundamental_interpolant_is_lagrange() {
        let m = PatternMatrix::from_rows(&[[4, -2], [4, 14]]).unwrap();
        let table = orthonormalize(
            &KernelSpec::de_la_vallee_poussin(&m, &[0.1, 0.1]).unwrap().table(),
        )
        .unwrap();
        let fi = fundamental_interpolant(&table).unwrap();
        let expansion = Expansion::from_interpolant(&table, &fi);
        let p = Pattern::new(&m);
        let pts: Vec<Vec<f64>> = p
            .points()
            .map(|y| y.iter().map(|v| 2.0 * PI * v).collect())
            .collect();
        let vals = expansion.evaluate_complex(&pts);
        for (i, v) in vals.iter().enumerate() {
            let expected = if i == p.origin() { 1.0 } else { 0.0 };
            assert!((v - Complex64::new(expected, 0.0)).norm() < 1e-12, "point {i}: {v}");
        }
    }

    #[test]
    fn constant_samples_have_single_coefficient() {
        let m = diag(4);
        let out = discrete_coeffs(&m, &[Complex64::new(1.0, 0.0); 16]).unwrap();
        let g = GeneratingSet::new(&m);
        for (i, v) in out.iter().enumerate() {
            let expected = if g.freq(i) == [0, 0] { 1.0 } else { 0.0 };
            assert!((v - Complex64::new(expected, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn dirichlet_samples_are_scaled_delta() {
        let m = PatternMatrix::from_rows(&[[2, 1], [0, 2]]).unwrap();
        let table = KernelSpec::dirichlet(&m).table();
        let p = Pattern::new(&m);
        let pts: Vec<Vec<f64>> = p
            .points()
            .map(|y| y.iter().map(|v| 2.0 * PI * v).collect())
            .collect();
        let vals = Expansion::from_table(&table).evaluate_complex(&pts);
        for (i, v) in vals.iter().enumerate() {
            let expected = if i == p.origin() { 2.0 } else { 0.0 };
            assert!((v - Complex64::new(expected, 0.0)).norm() < 1e-14);
        }
        let c = discrete_coeffs(&m, &vals).unwrap();
        for v in c {
            assert!((v - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn constant_expansion() {
        let e = Expansion::new(2, vec![(vec![0, 0], Complex64::new(1.0, 0.0))]);
        for v in e.evaluate(&[vec![0.3, -1.0], vec![2.0, 3.0]]) {
            assert_eq!(v, 1.0);
        }
    }

    #[test]
    fn dlvp_kernel_is_even_and_real() {
        let m = diag(8);
        let table = KernelSpec::de_la_vallee_poussin(&m, &[0.1, 0.1])
            .unwrap()
            .orthonormal_table()
            .unwrap();
        let e = Expansion::from_table(&table);
        let grid: Vec<Vec<f64>> = (0..9)
            .flat_map(|i| (0..9).map(move |j| vec![-PI + 0.7 * i as f64, -PI + 0.7 * j as f64]))
            .collect();
        let neg: Vec<Vec<f64>> = grid.iter().map(|x| x.iter().map(|v| -v).collect()).collect();
        let a = e.evaluate_complex(&grid);
        let b = e.evaluate_complex(&neg);
        for (u, v) in a.iter().zip(&b) {
            assert!(u.im.abs() < 1e-12);
            assert!((u.re - v.re).abs() < 1e-12);
        }
    }
}
