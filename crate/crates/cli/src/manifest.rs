//! Run manifests: a TOML file with `[pattern]`, `[kernel]`, `[geometry]`,
//! `[load]`, `[solver]`, `[reference]`, `[output]` and an optional `[sweep]`
//! section. See the README for the full grammar.

use std::path::{Path, PathBuf};

use homlat::kernels::DEFAULT_BOX_RADIUS;
use homlat::solver::{DEFAULT_MAX_ITER, DEFAULT_TOLERANCE};
use homlat::tensor::sym_size;
use homlat::{
    HashinGeometry, KernelKind, LaminateGeometry, MetricMode, PatternMatrix, SymTensor2,
    SymTensor4,
};
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    pattern: Option<RawPattern>,
    kernel: Option<RawKernel>,
    geometry: Option<RawGeometry>,
    load: Option<RawLoad>,
    solver: Option<RawSolver>,
    reference: Option<RawReference>,
    output: Option<RawOutput>,
    sweep: Option<RawSweep>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPattern {
    matrix: Option<Vec<Vec<i64>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawKernel {
    kind: Option<String>,
    slopes: Option<Vec<f64>>,
    directions: Option<Vec<Vec<f64>>>,
    radius: Option<usize>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMaterial {
    young: f64,
    poisson: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    kind: Option<String>,
    // laminate
    normal: Option<usize>,
    fraction: Option<f64>,
    phase1: Option<RawMaterial>,
    phase2: Option<RawMaterial>,
    // hashin
    c1: Option<f64>,
    c2: Option<f64>,
    rho_outer: Option<f64>,
    rotation: Option<f64>,
    core: Option<RawMaterial>,
    coating: Option<RawMaterial>,
    matrix: Option<RawMaterial>,
    // homogeneous
    material: Option<RawMaterial>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLoad {
    strain: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    tolerance: Option<f64>,
    max_iter: Option<usize>,
    reference_lambda: Option<f64>,
    reference_mu: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReference {
    refine: Option<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
    strain_csv: Option<bool>,
    heatmap: Option<String>,
    metric: Option<String>,
    phase_map: Option<bool>,
    green_table: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    slopes1: Option<Vec<f64>>,
    slopes2: Option<Vec<f64>>,
}

/// Microstructure of a run.
// Built once per manifest; boxing buys nothing.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Laminate(LaminateGeometry),
    Hashin(HashinGeometry),
    Homogeneous(SymTensor4),
}

impl Geometry {
    pub fn name(&self) -> &'static str {
        match self {
            Geometry::Laminate(_) => "laminate",
            Geometry::Hashin(_) => "hashin",
            Geometry::Homogeneous(_) => "homogeneous",
        }
    }
}

/// Scalar field drawn into the heatmap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeatmapField {
    None,
    /// `log(1 + |eps_ref_11 - eps_11|)`; needs a reference solve.
    LogError,
    /// Real part of the total strain component 11.
    Strain11,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub slopes1: Vec<f64>,
    pub slopes2: Vec<f64>,
}

impl SweepGrid {
    /// All slope pairs, `slopes1` outermost.
    pub fn runs(&self) -> Vec<[f64; 2]> {
        self.slopes1
            .iter()
            .flat_map(|&a| self.slopes2.iter().map(move |&b| [a, b]))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub matrix: PatternMatrix,
    pub kernel: KernelKind,
    pub geometry: Geometry,
    pub strain: SymTensor2,
    /// Explicit reference stiffness; the default rule is used when absent.
    pub reference_stiffness: Option<SymTensor4>,
    pub tolerance: f64,
    pub max_iter: usize,
    /// Error metrics use a Dirichlet solve on `refine * M`; 0 disables them.
    pub refine: usize,
    pub output_dir: PathBuf,
    pub strain_csv: bool,
    pub heatmap: HeatmapField,
    pub metric: MetricMode,
    /// Write the rasterised phase labels as CSV and PGM.
    pub phase_map: bool,
    /// Dump the periodised Green table in the binary layout.
    pub green_table: bool,
    pub sweep: Option<SweepGrid>,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn line_of(source: &str, offset: usize) -> usize {
    source[..offset.min(source.len())].matches('\n').count() + 1
}

/// Reads and validates a manifest file.
pub fn parse_manifest(path: &Path) -> Result<RunManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_manifest_str(&text, &path.display().to_string())
}

/// Parses manifest text; `origin` names the source in error messages.
pub fn parse_manifest_str(text: &str, origin: &str) -> Result<RunManifest> {
    let raw: RawManifest = toml::from_str(text).map_err(|e| CliError::Parse {
        path: origin.to_string(),
        line: e.span().map(|s| line_of(text, s.start)).unwrap_or(0),
        message: e.message().to_string(),
    })?;
    validate(raw)
}

fn material(dim: usize, m: RawMaterial) -> Result<SymTensor4> {
    Ok(SymTensor4::isotropic(dim, m.young, m.poisson)?)
}

fn validate(raw: RawManifest) -> Result<RunManifest> {
    let rows = raw
        .pattern
        .and_then(|p| p.matrix)
        .ok_or_else(|| invalid("missing required field `pattern.matrix`"))?;
    let matrix = PatternMatrix::from_rows(&rows)
        .map_err(|e| invalid(format!("`pattern.matrix`: {e}")))?;
    let dim = matrix.dim();
    if !(1..=3).contains(&dim) {
        return Err(invalid(format!("`pattern.matrix` must be 1x1 to 3x3, got {dim}x{dim}")));
    }

    let kernel = parse_kernel(raw.kernel, dim)?;
    let geometry = parse_geometry(raw.geometry, dim)?;

    let strain = match raw.load.and_then(|l| l.strain) {
        Some(s) => SymTensor2::from_mandel(dim, &s).map_err(|_| {
            invalid(format!(
                "`load.strain` needs {} Mandel components, got {}",
                sym_size(dim),
                s.len()
            ))
        })?,
        None => SymTensor2::basis(dim, 0),
    };

    let (tolerance, max_iter, reference_stiffness) = match raw.solver {
        Some(s) => {
            let reference = match (s.reference_lambda, s.reference_mu) {
                (Some(l), Some(m)) => Some(
                    SymTensor4::from_lame(dim, l, m)
                        .map_err(|e| invalid(format!("`solver.reference_*`: {e}")))?,
                ),
                (None, None) => None,
                _ => {
                    return Err(invalid(
                        "`solver.reference_lambda` and `solver.reference_mu` must be given together",
                    ))
                }
            };
            (
                s.tolerance.unwrap_or(DEFAULT_TOLERANCE),
                s.max_iter.unwrap_or(DEFAULT_MAX_ITER),
                reference,
            )
        }
        None => (DEFAULT_TOLERANCE, DEFAULT_MAX_ITER, None),
    };
    if !(tolerance > 0.0) {
        return Err(invalid(format!("`solver.tolerance` must be positive, got {tolerance}")));
    }
    if max_iter == 0 {
        return Err(invalid("`solver.max_iter` must be at least 1"));
    }
    if let Some(c0) = &reference_stiffness {
        if !c0.is_elliptic() {
            return Err(invalid("reference stiffness is not elliptic"));
        }
    }

    let refine = match raw.reference.and_then(|r| r.refine) {
        Some(r) if r < 0 => return Err(invalid("`reference.refine` must be >= 0")),
        Some(r) => r as usize,
        None => 2,
    };

    let output = raw.output;
    let (output_dir, strain_csv, heatmap, metric, phase_map, green_table) = match output {
        Some(o) => {
            let heatmap = match o.heatmap.as_deref() {
                None | Some("none") => HeatmapField::None,
                Some("e_log") => HeatmapField::LogError,
                Some("eps11") => HeatmapField::Strain11,
                Some(other) => {
                    return Err(invalid(format!(
                        "`output.heatmap` must be none, e_log or eps11, got `{other}`"
                    )))
                }
            };
            let metric = match o.metric.as_deref() {
                None => MetricMode::default(),
                Some(s) => s.parse().map_err(|e: homlat::Error| invalid(format!("`output.metric`: {e}")))?,
            };
            (
                o.dir.unwrap_or_else(|| PathBuf::from("out")),
                o.strain_csv.unwrap_or(true),
                heatmap,
                metric,
                o.phase_map.unwrap_or(false),
                o.green_table.unwrap_or(false),
            )
        }
        None => (
            PathBuf::from("out"),
            true,
            HeatmapField::None,
            MetricMode::default(),
            false,
            false,
        ),
    };
    if heatmap != HeatmapField::None && dim != 2 {
        return Err(invalid("heatmaps need a two-dimensional pattern"));
    }
    if heatmap == HeatmapField::LogError && refine == 0 {
        return Err(invalid("`output.heatmap = \"e_log\"` needs a reference solve (refine > 0)"));
    }

    let sweep = match raw.sweep {
        Some(s) => {
            let grid = SweepGrid {
                slopes1: s.slopes1.ok_or_else(|| invalid("missing required field `sweep.slopes1`"))?,
                slopes2: s.slopes2.unwrap_or_else(|| vec![0.0]),
            };
            if dim != 2 {
                return Err(invalid("slope sweeps are defined for two-dimensional patterns"));
            }
            if grid.slopes1.is_empty() || grid.slopes2.is_empty() {
                return Err(invalid("sweep grids must not be empty"));
            }
            if let Some(bad) = grid
                .slopes1
                .iter()
                .chain(&grid.slopes2)
                .find(|a| !(0.0..=0.5).contains(*a))
            {
                return Err(invalid(format!("sweep slope {bad} outside [0, 1/2]")));
            }
            Some(grid)
        }
        None => None,
    };

    Ok(RunManifest {
        matrix,
        kernel,
        geometry,
        strain,
        reference_stiffness,
        tolerance,
        max_iter,
        refine,
        output_dir,
        strain_csv,
        heatmap,
        metric,
        phase_map,
        green_table,
        sweep,
    })
}

fn parse_kernel(raw: Option<RawKernel>, dim: usize) -> Result<KernelKind> {
    let Some(k) = raw else {
        return Ok(KernelKind::Dirichlet);
    };
    match k.kind.as_deref().unwrap_or("dirichlet") {
        "dirichlet" => Ok(KernelKind::Dirichlet),
        "dlvp" => {
            let slopes = k.slopes.unwrap_or_else(|| vec![0.0; dim]);
            if slopes.len() != dim {
                return Err(invalid(format!(
                    "`kernel.slopes` needs {dim} entries, got {}",
                    slopes.len()
                )));
            }
            Ok(KernelKind::DeLaValleePoussin { slopes })
        }
        "box" => {
            let directions = k
                .directions
                .ok_or_else(|| invalid("missing required field `kernel.directions`"))?;
            Ok(KernelKind::BoxSpline {
                directions,
                radius: k.radius.unwrap_or(DEFAULT_BOX_RADIUS),
            })
        }
        other => Err(invalid(format!(
            "`kernel.kind` must be dirichlet, dlvp or box, got `{other}`"
        ))),
    }
}

fn parse_geometry(raw: Option<RawGeometry>, dim: usize) -> Result<Geometry> {
    let g = raw.ok_or_else(|| invalid("missing required section `[geometry]`"))?;
    let kind = g
        .kind
        .as_deref()
        .ok_or_else(|| invalid("missing required field `geometry.kind`"))?;
    let mat = |m: Option<RawMaterial>, name: &str, default: Option<(f64, f64)>| -> Result<SymTensor4> {
        let m = match (m, default) {
            (Some(m), _) => m,
            (None, Some((young, poisson))) => RawMaterial { young, poisson },
            (None, None) => return Err(invalid(format!("missing required field `geometry.{name}`"))),
        };
        material(dim, m).map_err(|e| invalid(format!("`geometry.{name}`: {e}")))
    };
    match kind {
        "laminate" => {
            let geom = LaminateGeometry::new(
                g.normal.unwrap_or(0),
                g.fraction.unwrap_or(0.5),
                mat(g.phase1, "phase1", None)?,
                mat(g.phase2, "phase2", None)?,
            )
            .map_err(|e| invalid(format!("`[geometry]`: {e}")))?;
            Ok(Geometry::Laminate(geom))
        }
        "hashin" => {
            if dim != 2 {
                return Err(invalid("the hashin geometry needs a two-dimensional pattern"));
            }
            let geom = HashinGeometry {
                c1: g.c1.unwrap_or(0.05),
                c2: g.c2.unwrap_or(0.35),
                rho_outer: g.rho_outer.unwrap_or(0.09),
                rotation: g.rotation.unwrap_or(60.0),
                core: mat(g.core, "core", Some((1.0, 0.3)))?,
                coating: mat(g.coating, "coating", Some((10.0, 0.3)))?,
                matrix: mat(g.matrix, "matrix", Some((3.0, 0.3)))?,
            };
            geom.validate()
                .map_err(|e| invalid(format!("`[geometry]`: {e}")))?;
            Ok(Geometry::Hashin(geom))
        }
        "homogeneous" => Ok(Geometry::Homogeneous(mat(g.material, "material", None)?)),
        other => Err(invalid(format!(
            "`geometry.kind` must be laminate, hashin or homogeneous, got `{other}`"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[pattern]
matrix = [[16, 0], [0, 16]]

[kernel]
kind = "dirichlet"

[geometry]
kind = "laminate"
phase1 = { young = 1.0, poisson = 0.3 }
phase2 = { young = 10.0, poisson = 0.3 }

[load]
strain = [1.0, 0.0, 0.0]
"#;

    #[test]
    fn minimal_manifest_gets_defaults() {
        let m = parse_manifest_str(MINIMAL, "minimal").unwrap();
        assert_eq!(m.matrix.det_abs(), 256);
        assert_eq!(m.kernel, KernelKind::Dirichlet);
        assert_eq!(m.tolerance, 1e-10);
        assert_eq!(m.refine, 2);
        assert_eq!(m.metric, MetricMode::MeanStress);
        assert!(m.sweep.is_none());
        match m.geometry {
            Geometry::Laminate(l) => assert_eq!(l.volume_fraction, 0.5),
            other => panic!("unexpected geometry {other:?}"),
        }
    }

    #[test]
    fn missing_matrix_is_named() {
        let text = MINIMAL.replace("matrix = [[16, 0], [0, 16]]", "");
        match parse_manifest_str(&text, "x") {
            Err(CliError::Validation(msg)) => assert!(msg.contains("pattern.matrix"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_key_reports_line() {
        let text = MINIMAL.replace("kind = \"dirichlet\"", "kind = \"dirichlet\"\nwidth = 3");
        match parse_manifest_str(&text, "x") {
            Err(e @ CliError::Parse { line, .. }) => {
                assert_eq!(line, 7);
                assert!(e.to_string().contains("width"), "{e}");
                assert_eq!(e.exit_code(), 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sweep_grid_product() {
        let grid: Vec<String> = (0..=10).map(|i| format!("{}", i as f64 * 0.05)).collect();
        let text = format!(
            "{MINIMAL}\n[sweep]\nslopes1 = [{0}]\nslopes2 = [{0}]\n",
            grid.join(", ")
        );
        let m = parse_manifest_str(&text, "x").unwrap();
        assert_eq!(m.sweep.unwrap().runs().len(), 121);
    }

    #[test]
    fn rejects_bad_values() {
        for (from, to) in [
            ("strain = [1.0, 0.0, 0.0]", "strain = [1.0, 0.0]"),
            ("kind = \"dirichlet\"", "kind = \"fejer\""),
            ("kind = \"laminate\"", "kind = \"sphere\""),
            ("[[16, 0], [0, 16]]", "[[16, 0], [32, 0]]"),
        ] {
            let text = MINIMAL.replace(from, to);
            assert!(
                matches!(parse_manifest_str(&text, "x"), Err(CliError::Validation(_))),
                "{to}"
            );
        }
        let text = format!("{MINIMAL}\n[solver]\ntolerance = -1.0\n");
        assert!(matches!(parse_manifest_str(&text, "x"), Err(CliError::Validation(_))));
    }
}
