//! Executing manifests: single solves, slope sweeps, effective tensors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use homlat::{
    basic_scheme, default_reference, effective_tensor, error_metrics, laminate_effective_oracle,
    periodised_green_table, rasterize_hashin, rasterize_laminate, restrict_field, ErrorMetrics,
    GreenTable, KernelKind, KernelSpec, Pattern, PatternMatrix, SolveReport, SolverOptions,
    StiffnessField, SymField, SymTensor2, SymTensor4,
};
use rayon::prelude::*;

use crate::error::{CliError, Result};
use crate::manifest::{Geometry, HeatmapField, RunManifest};
use crate::output::{
    create_dir, emit_heatmap, emit_phase_image, fmt_f64, mandel_labels, strain_table, write_atomic,
    write_csv,
};

/// A microstructure sampled on a pattern.
pub struct Discretised {
    pub pattern: Pattern,
    pub stiffness: StiffnessField,
    pub phases: Vec<usize>,
}

pub fn discretise(matrix: &PatternMatrix, geometry: &Geometry) -> Result<Discretised> {
    let pattern = Pattern::new(matrix);
    let (stiffness, phases) = match geometry {
        Geometry::Laminate(g) => {
            let r = rasterize_laminate(&pattern, g)?;
            (r.stiffness, r.phases)
        }
        Geometry::Hashin(g) => {
            let r = rasterize_hashin(&pattern, g)?;
            (r.stiffness, r.phases)
        }
        Geometry::Homogeneous(c) => {
            if c.dim() != pattern.dim() {
                return Err(CliError::Validation(format!(
                    "material is {}-D but the pattern is {}-D",
                    c.dim(),
                    pattern.dim()
                )));
            }
            (
                StiffnessField::homogeneous(pattern.len(), *c),
                vec![0; pattern.len()],
            )
        }
    };
    Ok(Discretised {
        pattern,
        stiffness,
        phases,
    })
}

fn reference_stiffness(manifest: &RunManifest, stiffness: &StiffnessField) -> Result<SymTensor4> {
    match manifest.reference_stiffness {
        Some(c0) => Ok(c0),
        None => Ok(default_reference(stiffness)?),
    }
}

fn green_table(matrix: &PatternMatrix, kernel: &KernelKind, c0: &SymTensor4) -> Result<GreenTable> {
    let coeffs = KernelSpec::new(kernel.clone(), matrix)?.orthonormal_table()?;
    Ok(periodised_green_table(c0, &coeffs)?)
}

fn options(manifest: &RunManifest) -> SolverOptions {
    SolverOptions::with_tolerance(manifest.tolerance, manifest.max_iter)
}

/// Dirichlet solve on the refined pattern, restricted to the run pattern.
pub struct ReferenceSolution {
    pub refine: usize,
    /// Total strain restricted to the coarse pattern.
    pub total_strain: SymField,
    /// Effective action under the manifest's metric mode.
    pub effective: SymTensor2,
    pub iterations: usize,
}

pub fn reference_solution(
    manifest: &RunManifest,
    coarse: &Discretised,
) -> Result<Option<ReferenceSolution>> {
    if manifest.refine == 0 {
        return Ok(None);
    }
    let r = manifest.refine as i64;
    let fine_matrix =
        PatternMatrix::new(manifest.matrix.dim(), manifest.matrix.entries().iter().map(|v| v * r).collect())?;
    let fine = discretise(&fine_matrix, &manifest.geometry)?;
    let c0 = reference_stiffness(manifest, &fine.stiffness)?;
    let table = green_table(&fine_matrix, &KernelKind::Dirichlet, &c0)?;
    let report = basic_scheme(&fine.stiffness, &c0, &manifest.strain, &table, &options(manifest))?;
    let fine_total = report.total_strain();
    let total_strain = restrict_field(&fine.pattern, &fine_total, &coarse.pattern)?;
    let effective = match manifest.metric {
        homlat::MetricMode::MeanStress => report.effective_action,
        // The plain sum scales with the number of points; evaluate it on
        // the run pattern so both sides are comparable.
        mode @ homlat::MetricMode::FluctuationSum => {
            mode.action(&coarse.stiffness, &total_strain, &manifest.strain)?
        }
    };
    log::info!(
        "reference solve on {}x refined pattern: {} iterations",
        manifest.refine,
        report.iterations
    );
    Ok(Some(ReferenceSolution {
        refine: manifest.refine,
        total_strain,
        effective,
        iterations: report.iterations,
    }))
}

/// Result of one kernel run.
pub struct RunOutcome {
    pub kernel: KernelKind,
    pub report: SolveReport,
    pub metrics: Option<ErrorMetrics>,
    /// Relative error of the effective action against the laminate oracle.
    pub oracle_error: Option<f64>,
}

pub fn laminate_oracle_action(manifest: &RunManifest) -> Result<Option<SymTensor2>> {
    match &manifest.geometry {
        Geometry::Laminate(g) => Ok(Some(laminate_effective_oracle(g)?.apply(&manifest.strain)?)),
        _ => Ok(None),
    }
}

fn relative(a: &SymTensor2, b: &SymTensor2) -> f64 {
    let diff = (*a - *b).norm();
    let scale = b.norm();
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

/// Solves the manifest's problem in the space of `kernel`.
pub fn solve_with_kernel(
    manifest: &RunManifest,
    disc: &Discretised,
    kernel: &KernelKind,
    reference: Option<&ReferenceSolution>,
) -> Result<(RunOutcome, GreenTable)> {
    let c0 = reference_stiffness(manifest, &disc.stiffness)?;
    let table = green_table(&manifest.matrix, kernel, &c0)?;
    let report = basic_scheme(&disc.stiffness, &c0, &manifest.strain, &table, &options(manifest))?;
    let metrics = match reference {
        Some(r) => Some(error_metrics(
            &report.total_strain(),
            &r.total_strain,
            &disc.stiffness,
            &manifest.strain,
            &r.effective,
            manifest.metric,
        )?),
        None => None,
    };
    let oracle_error =
        laminate_oracle_action(manifest)?.map(|o| relative(&report.effective_action, &o));
    Ok((
        RunOutcome {
            kernel: kernel.clone(),
            report,
            metrics,
            oracle_error,
        },
        table,
    ))
}

fn slopes_of(kernel: &KernelKind) -> (String, String) {
    match kernel {
        KernelKind::DeLaValleePoussin { slopes } => (
            slopes.first().map(|v| fmt_f64(*v)).unwrap_or_default(),
            slopes.get(1).map(|v| fmt_f64(*v)).unwrap_or_default(),
        ),
        _ => (String::new(), String::new()),
    }
}

/// Header of the per-run metrics table.
pub fn metrics_header(dim: usize) -> Vec<String> {
    let mut h: Vec<String> = [
        "run",
        "kernel",
        "alpha1",
        "alpha2",
        "iterations",
        "final_error",
        "e_eff",
        "e_l2",
        "max_imag",
        "oracle_error",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    h.extend(mandel_labels(dim).iter().map(|l| format!("action{l}")));
    h
}

/// One metrics table row. Contains no timings, so identical inputs give
/// identical rows.
pub fn metrics_row(run: usize, outcome: &RunOutcome) -> Vec<String> {
    let (a1, a2) = slopes_of(&outcome.kernel);
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    let mut row = vec![
        run.to_string(),
        outcome.kernel.name().to_string(),
        a1,
        a2,
        outcome.report.iterations.to_string(),
        fmt_f64(outcome.report.final_error()),
        opt(outcome.metrics.as_ref().map(|m| m.e_eff)),
        opt(outcome.metrics.as_ref().map(|m| m.e_l2)),
        fmt_f64(outcome.report.imaginary_part),
        opt(outcome.oracle_error),
    ];
    row.extend(outcome.report.effective_action.mandel().iter().map(|v| fmt_f64(*v)));
    row
}

/// Text report of one run.
pub fn summary_text(
    manifest: &RunManifest,
    outcome: &RunOutcome,
    reference: Option<&ReferenceSolution>,
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "pattern_matrix: {:?}", manifest.matrix.rows());
    let _ = writeln!(s, "points: {}", manifest.matrix.det_abs());
    let _ = writeln!(s, "kernel: {:?}", outcome.kernel);
    let _ = writeln!(s, "geometry: {}", manifest.geometry.name());
    let _ = writeln!(
        s,
        "macro_strain: [{}]",
        manifest
            .strain
            .mandel()
            .iter()
            .map(|v| fmt_f64(*v))
            .collect::<Vec<_>>()
            .join(", ")
    );
    let _ = writeln!(s, "tolerance: {:e}", manifest.tolerance);
    s.push_str(&outcome.report.summary());
    if let (Some(m), Some(r)) = (&outcome.metrics, reference) {
        let _ = writeln!(s, "reference: dirichlet on {}x refined pattern ({} iterations)", r.refine, r.iterations);
        let _ = writeln!(s, "metric_mode: {}", manifest.metric.name());
        let _ = writeln!(s, "e_eff: {}", fmt_f64(m.e_eff));
        let _ = writeln!(s, "e_l2: {}", fmt_f64(m.e_l2));
        let max_log = m.e_log.iter().copied().fold(0.0, f64::max);
        let _ = writeln!(s, "e_log_max: {}", fmt_f64(max_log));
    }
    if let Some(e) = outcome.oracle_error {
        let _ = writeln!(s, "laminate_oracle_error: {}", fmt_f64(e));
    }
    s
}

/// Writes summary, metrics row, strain CSV and optional images of one run
/// into `dir`.
fn write_run_artifacts(
    manifest: &RunManifest,
    disc: &Discretised,
    outcome: &RunOutcome,
    table: &GreenTable,
    reference: Option<&ReferenceSolution>,
    dir: &Path,
) -> Result<()> {
    create_dir(dir)?;
    write_atomic(
        &dir.join("summary.txt"),
        summary_text(manifest, outcome, reference).as_bytes(),
    )?;
    write_csv(
        &dir.join("metrics.csv"),
        &metrics_header(disc.pattern.dim()),
        &[metrics_row(0, outcome)],
    )?;
    if manifest.strain_csv {
        let (h, rows) = strain_table(&disc.pattern, &outcome.report.total_strain());
        write_csv(&dir.join("strain.csv"), &h, &rows)?;
    }
    match manifest.heatmap {
        HeatmapField::None => {}
        HeatmapField::LogError => {
            let m = outcome
                .metrics
                .as_ref()
                .ok_or_else(|| CliError::Validation("e_log heatmap needs a reference solve".into()))?;
            emit_heatmap(&disc.pattern, &m.e_log, &dir.join("heatmap_e_log.ppm"))?;
        }
        HeatmapField::Strain11 => {
            let total = outcome.report.total_strain();
            let values: Vec<f64> = total.component(0).iter().map(|v| v.re).collect();
            emit_heatmap(&disc.pattern, &values, &dir.join("heatmap_eps11.ppm"))?;
        }
    }
    if manifest.green_table {
        let mut bytes = Vec::new();
        table
            .write_binary(&mut bytes)
            .map_err(|e| CliError::io(dir.join("green_table.bin"), e))?;
        write_atomic(&dir.join("green_table.bin"), &bytes)?;
    }
    Ok(())
}

fn write_phase_map(disc: &Discretised, dir: &Path) -> Result<()> {
    let dim = disc.pattern.dim();
    let mut header: Vec<String> = (1..=dim).map(|i| format!("y{i}")).collect();
    header.push("phase".into());
    let rows: Vec<Vec<String>> = (0..disc.pattern.len())
        .map(|y| {
            let mut r: Vec<String> = disc.pattern.point(y).into_iter().map(fmt_f64).collect();
            r.push(disc.phases[y].to_string());
            r
        })
        .collect();
    write_csv(&dir.join("phases.csv"), &header, &rows)?;
    if dim == 2 {
        emit_phase_image(&disc.pattern, &disc.phases, &dir.join("phases.pgm"))?;
    }
    Ok(())
}

pub fn output_dir(manifest: &RunManifest, override_dir: Option<&Path>) -> PathBuf {
    override_dir
        .map(Path::to_path_buf)
        .unwrap_or_else(|| manifest.output_dir.clone())
}

/// `solve`: one run with the manifest's kernel.
pub fn run_solve(manifest: &RunManifest, out: &Path) -> Result<RunOutcome> {
    let disc = discretise(&manifest.matrix, &manifest.geometry)?;
    let reference = reference_solution(manifest, &disc)?;
    let (outcome, table) = solve_with_kernel(manifest, &disc, &manifest.kernel, reference.as_ref())?;
    write_run_artifacts(manifest, &disc, &outcome, &table, reference.as_ref(), out)?;
    if manifest.phase_map {
        write_phase_map(&disc, out)?;
    }
    log::info!("solve finished in {} iterations", outcome.report.iterations);
    Ok(outcome)
}

/// Results of a slope sweep, in grid order.
pub struct SweepOutcome {
    pub baseline: RunOutcome,
    pub runs: Vec<RunOutcome>,
}

/// `sweep`: a Dirichlet baseline plus one de la Vallée Poussin run per
/// slope pair, executed on the current rayon pool.
pub fn run_sweep(manifest: &RunManifest, out: &Path) -> Result<SweepOutcome> {
    let grid = manifest
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Validation("missing required section `[sweep]`".into()))?;
    let disc = discretise(&manifest.matrix, &manifest.geometry)?;
    let reference = reference_solution(manifest, &disc)?;
    let (baseline, _) = solve_with_kernel(manifest, &disc, &KernelKind::Dirichlet, reference.as_ref())?;

    let pairs = grid.runs();
    let runs = pairs
        .par_iter()
        .enumerate()
        .map(|(i, pair)| {
            let kernel = KernelKind::DeLaValleePoussin {
                slopes: pair.to_vec(),
            };
            let (outcome, table) = solve_with_kernel(manifest, &disc, &kernel, reference.as_ref())?;
            if manifest.strain_csv || manifest.heatmap != HeatmapField::None {
                write_run_artifacts(
                    manifest,
                    &disc,
                    &outcome,
                    &table,
                    reference.as_ref(),
                    &out.join(format!("run-{:04}", i + 1)),
                )?;
            }
            Ok(outcome)
        })
        .collect::<Result<Vec<_>>>()?;

    create_dir(out)?;
    let header = metrics_header(disc.pattern.dim());
    write_csv(&out.join("baseline.csv"), &header, &[metrics_row(0, &baseline)])?;
    let rows: Vec<Vec<String>> = runs
        .iter()
        .enumerate()
        .map(|(i, r)| metrics_row(i + 1, r))
        .collect();
    write_csv(&out.join("sweep.csv"), &header, &rows)?;

    let mut summary = summary_text(manifest, &baseline, reference.as_ref());
    let _ = writeln!(summary, "sweep_runs: {}", runs.len());
    if let Some((i, best)) = runs
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.metrics.as_ref().map(|m| (i, m.e_eff)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
    {
        let _ = writeln!(
            summary,
            "best_e_eff: {} (run {}, {:?})",
            fmt_f64(best),
            i + 1,
            runs[i].kernel
        );
    }
    write_atomic(&out.join("sweep_summary.txt"), summary.as_bytes())?;
    if manifest.phase_map {
        write_phase_map(&disc, out)?;
    }
    Ok(SweepOutcome { baseline, runs })
}

/// `effective`: one solve per Mandel basis strain.
pub fn run_effective(manifest: &RunManifest, out: &Path) -> Result<homlat::EffectiveTensor> {
    let disc = discretise(&manifest.matrix, &manifest.geometry)?;
    let c0 = reference_stiffness(manifest, &disc.stiffness)?;
    let table = green_table(&manifest.matrix, &manifest.kernel, &c0)?;
    let eff = effective_tensor(&disc.stiffness, &c0, &table, &options(manifest))?;
    let dim = disc.pattern.dim();
    let labels = mandel_labels(dim);
    let mut header = vec!["row".to_string()];
    header.extend(labels.iter().map(|l| format!("C{l}")));
    let n = labels.len();
    let rows: Vec<Vec<String>> = (0..n)
        .map(|a| {
            let mut r = vec![labels[a].clone()];
            r.extend((0..n).map(|b| fmt_f64(eff.tensor.get(a, b))));
            r
        })
        .collect();
    create_dir(out)?;
    write_csv(&out.join("effective.csv"), &header, &rows)?;

    let mut s = String::new();
    let _ = writeln!(s, "pattern_matrix: {:?}", manifest.matrix.rows());
    let _ = writeln!(s, "kernel: {:?}", manifest.kernel);
    let _ = writeln!(s, "geometry: {}", manifest.geometry.name());
    let _ = writeln!(s, "asymmetry: {:e}", eff.asymmetry);
    for (b, r) in eff.reports.iter().enumerate() {
        let _ = writeln!(
            s,
            "load {}: iterations {}, final_cauchy_error {}",
            labels[b],
            r.iterations,
            fmt_f64(r.final_error())
        );
    }
    if let Geometry::Laminate(g) = &manifest.geometry {
        let oracle = laminate_effective_oracle(g)?;
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let o = oracle.get(a, b);
                if o.abs() > 1e-12 * oracle.norm() {
                    worst = worst.max((eff.tensor.get(a, b) - o).abs() / o.abs());
                }
            }
        }
        let _ = writeln!(s, "laminate_oracle_max_component_error: {}", fmt_f64(worst));
    }
    write_atomic(&out.join("effective_summary.txt"), s.as_bytes())?;
    Ok(eff)
}
