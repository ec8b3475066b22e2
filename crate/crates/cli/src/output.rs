//! File outputs: atomic writes, CSV tables, heatmaps.

use std::io::Write;
use std::path::{Path, PathBuf};

use homlat::{Pattern, SymField};
use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, ImageEncoder};
use tempfile::NamedTempFile;

use crate::error::{CliError, Result};

/// Fixed float format for every table: 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Writes `bytes` to a temporary file next to `path`, then renames it into
/// place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    create_dir(&parent)?;
    let mut tmp = NamedTempFile::new_in(&parent).map_err(|e| CliError::io(&parent, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

/// Writes a CSV table (header plus rows) atomically.
pub fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::io(path, e.into_error()))?;
    write_atomic(path, &bytes)
}

/// Per-point table: coordinates `y1..yd`, then the real parts of the
/// Mandel components of `field`.
pub fn strain_table(pattern: &Pattern, field: &SymField) -> (Vec<String>, Vec<Vec<String>>) {
    let dim = pattern.dim();
    let mut header: Vec<String> = (1..=dim).map(|i| format!("y{i}")).collect();
    header.extend(mandel_labels(dim).iter().map(|l| format!("eps{l}")));
    let rows = (0..pattern.len())
        .map(|y| {
            pattern
                .point(y)
                .into_iter()
                .chain(field.real_at(y).mandel().iter().copied())
                .map(fmt_f64)
                .collect()
        })
        .collect();
    (header, rows)
}

/// Labels of the Mandel components (`11`, `22`, `12` in 2-D).
pub fn mandel_labels(dim: usize) -> Vec<String> {
    homlat::tensor::mandel_pairs(dim)
        .iter()
        .map(|&(i, j)| format!("{}{}", i + 1, j + 1))
        .collect()
}

/// Raster size `W x H = m` with `W` the largest divisor of `m` not above
/// `sqrt(m)`.
pub fn raster_size(m: usize) -> (usize, usize) {
    let mut w = 1;
    let mut d = 1;
    while d * d <= m {
        if m % d == 0 {
            w = d;
        }
        d += 1;
    }
    // Wider than tall reads better.
    (m / w, w)
}

/// For every cell of a `width x height` raster of `[-1/2, 1/2)^2` (row 0 at
/// the top, i.e. largest `y2`), the index of the nearest pattern point under
/// periodic distance.
pub fn nearest_point_raster(pattern: &Pattern, width: usize, height: usize) -> Result<Vec<usize>> {
    if pattern.dim() != 2 {
        return Err(CliError::Validation(format!(
            "rasters need a two-dimensional pattern, got d = {}",
            pattern.dim()
        )));
    }
    let locator = NearestPoint::new(pattern);
    let mut out = Vec::with_capacity(width * height);
    for row in 0..height {
        let y2 = 0.5 - (row as f64 + 0.5) / height as f64;
        for col in 0..width {
            let y1 = -0.5 + (col as f64 + 0.5) / width as f64;
            out.push(locator.nearest(pattern, [y1, y2]));
        }
    }
    Ok(out)
}

/// Nearest-point search in the lattice `M^{-1} Z^2` with a Lagrange-reduced
/// basis; the lattice contains `Z^2`, so this is also the periodic nearest
/// pattern point.
struct NearestPoint {
    /// Reduced basis vectors (columns) in real coordinates.
    basis: [[f64; 2]; 2],
    /// Integer coordinates of the reduced basis in terms of `M^{-1}`.
    coeffs: [[i64; 2]; 2],
}

impl NearestPoint {
    fn new(pattern: &Pattern) -> Self {
        let m = pattern.matrix();
        let det = m.det() as f64;
        // Columns of M^{-1}.
        let inv = [
            [m.get(1, 1) as f64 / det, -m.get(1, 0) as f64 / det],
            [-m.get(0, 1) as f64 / det, m.get(0, 0) as f64 / det],
        ];
        let mut b = [inv[0], inv[1]];
        let mut u = [[1i64, 0], [0, 1]];
        let dot = |a: [f64; 2], c: [f64; 2]| a[0] * c[0] + a[1] * c[1];
        loop {
            if dot(b[0], b[0]) > dot(b[1], b[1]) {
                b.swap(0, 1);
                u.swap(0, 1);
            }
            let mu = (dot(b[0], b[1]) / dot(b[0], b[0])).round();
            if mu == 0.0 {
                break;
            }
            let k = mu as i64;
            b[1] = [b[1][0] - mu * b[0][0], b[1][1] - mu * b[0][1]];
            u[1] = [u[1][0] - k * u[0][0], u[1][1] - k * u[0][1]];
            if dot(b[1], b[1]) >= dot(b[0], b[0]) {
                break;
            }
        }
        Self { basis: b, coeffs: u }
    }

    fn nearest(&self, pattern: &Pattern, x: [f64; 2]) -> usize {
        let [b0, b1] = self.basis;
        let det = b0[0] * b1[1] - b1[0] * b0[1];
        let c0 = (x[0] * b1[1] - x[1] * b1[0]) / det;
        let c1 = (b0[0] * x[1] - b0[1] * x[0]) / det;
        let (r0, r1) = (c0.round() as i64, c1.round() as i64);
        let mut best = (f64::INFINITY, 0i64, 0i64);
        for d0 in -2..=2 {
            for d1 in -2..=2 {
                let (k0, k1) = (r0 + d0, r1 + d1);
                let p = [
                    k0 as f64 * b0[0] + k1 as f64 * b1[0],
                    k0 as f64 * b0[1] + k1 as f64 * b1[1],
                ];
                let dist = (p[0] - x[0]).powi(2) + (p[1] - x[1]).powi(2);
                if dist < best.0 - 1e-12 {
                    best = (dist, k0, k1);
                }
            }
        }
        let z = [
            best.1 * self.coeffs[0][0] + best.2 * self.coeffs[1][0],
            best.1 * self.coeffs[0][1] + best.2 * self.coeffs[1][1],
        ];
        pattern.index_of_lattice(&z)
    }
}

/// Five-stop perceptual colormap (dark blue -> yellow).
const COLORMAP: [[f64; 3]; 5] = [
    [68.0, 1.0, 84.0],
    [59.0, 82.0, 139.0],
    [33.0, 145.0, 140.0],
    [94.0, 201.0, 98.0],
    [253.0, 231.0, 37.0],
];

fn colour(t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0) * (COLORMAP.len() - 1) as f64;
    let i = (t.floor() as usize).min(COLORMAP.len() - 2);
    let f = t - i as f64;
    let mut out = [0u8; 3];
    for c in 0..3 {
        out[c] = (COLORMAP[i][c] * (1.0 - f) + COLORMAP[i + 1][c] * f).round() as u8;
    }
    out
}

/// Colour-scale range of a heatmap; a constant field maps to the middle of
/// the scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatmapRange {
    pub min: f64,
    pub max: f64,
}

/// Writes a binary PPM (P6) heatmap of one value per pattern point, plus a
/// sidecar `<path>.range.txt` with the colour-scale minimum and maximum.
pub fn emit_heatmap(pattern: &Pattern, values: &[f64], path: &Path) -> Result<HeatmapRange> {
    if values.len() != pattern.len() {
        return Err(CliError::Validation(format!(
            "heatmap needs {} values, got {}",
            pattern.len(),
            values.len()
        )));
    }
    let (width, height) = raster_size(pattern.len());
    let cells = nearest_point_raster(pattern, width, height)?;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    let mut pixels = Vec::with_capacity(3 * cells.len());
    for &y in &cells {
        let t = if span > 0.0 { (values[y] - min) / span } else { 0.5 };
        pixels.extend_from_slice(&colour(t));
    }
    let mut bytes = Vec::new();
    PnmEncoder::new(&mut bytes)
        .with_subtype(PnmSubtype::Pixmap(SampleEncoding::Binary))
        .write_image(&pixels, width as u32, height as u32, ExtendedColorType::Rgb8)?;
    write_atomic(path, &bytes)?;
    let range = HeatmapRange { min, max };
    write_atomic(
        &sidecar_path(path),
        format!("min {}\nmax {}\n", fmt_f64(min), fmt_f64(max)).as_bytes(),
    )?;
    Ok(range)
}

/// `heatmap.ppm` -> `heatmap.ppm.range.txt`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".range.txt");
    PathBuf::from(name)
}

/// Binary PGM (P5) of phase labels, grey levels spread over `0..=255`.
pub fn emit_phase_image(pattern: &Pattern, phases: &[usize], path: &Path) -> Result<()> {
    let (width, height) = raster_size(pattern.len());
    let cells = nearest_point_raster(pattern, width, height)?;
    let top = phases.iter().copied().max().unwrap_or(0).max(1);
    let pixels: Vec<u8> = cells
        .iter()
        .map(|&y| (phases[y] * 255 / top) as u8)
        .collect();
    let mut bytes = Vec::new();
    PnmEncoder::new(&mut bytes)
        .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
        .write_image(&pixels, width as u32, height as u32, ExtendedColorType::L8)?;
    write_atomic(path, &bytes)
}
