//! One function per subcommand; each returns the rendered output plus any
//! auxiliary files and an overall convergence verdict for `--strict`.

use std::fmt::Write as _;
use std::path::PathBuf;

use modelspace_core::blaschke::separation_report;
use modelspace_core::experiments::{
    conjecture_ratio_scan, necessity_embedding_scan, operator_bounds_scan, run_counterexample,
};
use modelspace_core::model::{
    h2_norm_via_gram, hardy_norm_with_tol, interpolate_in_kb, residue_identity_check,
    tilde_trace_via_cauchy, vinogradov_interpolant, Converged, QuadratureGrid, HARDY_RTOL,
};
use modelspace_core::report::ExperimentReport;
use modelspace_core::tilde::{tilde_apply, tilde_invert, tilde_matrices};
use num_complex::Complex64;
use serde::Serialize;

use crate::config::{CliError, FileConfig};

/// Default threshold for the interpolation verdict in `diagnose`.
const DEFAULT_THRESHOLD: f64 = 0.05;

/// Default boundary-trace resolution for `boundary_dump`.
const DEFAULT_BOUNDARY_NODES: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

pub struct RunOutput {
    pub text: String,
    pub aux_files: Vec<(PathBuf, String)>,
    pub converged: bool,
}

impl RunOutput {
    fn text_only(text: String) -> Self {
        RunOutput {
            text,
            aux_files: Vec::new(),
            converged: true,
        }
    }
}

fn grid(config: &FileConfig) -> Result<QuadratureGrid, CliError> {
    Ok(QuadratureGrid::new(
        config.grid_cap.unwrap_or(QuadratureGrid::default().node_count()),
    )?)
}

fn bool_cell(flag: bool) -> &'static str {
    if flag {
        "1"
    } else {
        "0"
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    text
}

/// Serializable mirror of [`Converged`] for JSON output.
#[derive(Serialize)]
struct QuadResult {
    value: f64,
    node_count: usize,
    converged: bool,
}

impl From<Converged<f64>> for QuadResult {
    fn from(c: Converged<f64>) -> Self {
        QuadResult {
            value: c.value,
            node_count: c.node_count,
            converged: c.converged,
        }
    }
}

fn push_quad(csv: &mut String, name: &str, q: &QuadResult) {
    let _ = writeln!(csv, "{name},{}", q.value);
    let _ = writeln!(csv, "{name}_nodes,{}", q.node_count);
    let _ = writeln!(csv, "{name}_converged,{}", bool_cell(q.converged));
}

// ---------------------------------------------------------------------------
// diagnose
// ---------------------------------------------------------------------------

pub fn diagnose(config: &FileConfig, format: Format) -> Result<RunOutput, CliError> {
    let zeros = config.require_zeros()?;
    let report = separation_report(zeros, config.threshold.unwrap_or(DEFAULT_THRESHOLD))?;
    let text = match format {
        Format::Json => pretty(&report),
        Format::Csv => {
            let mut csv = String::from("quantity,value\n");
            let _ = writeln!(csv, "n,{}", zeros.len());
            let _ = writeln!(csv, "delta_derivative,{}", report.delta_derivative);
            let _ = writeln!(csv, "delta_product,{}", report.delta_product);
            let _ = writeln!(csv, "carleson_constant,{}", report.carleson_constant);
            let _ = writeln!(csv, "gap_sum,{}", report.gap_sum);
            let _ = writeln!(csv, "is_interpolating,{}", bool_cell(report.is_interpolating));
            let _ = writeln!(csv, "threshold,{}", report.threshold);
            let _ = writeln!(
                csv,
                "conditioning_warning,{}",
                bool_cell(report.conditioning_warning)
            );
            csv
        }
    };
    Ok(RunOutput::text_only(text))
}

// ---------------------------------------------------------------------------
// tilde
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct TildeSummary {
    wtilde: Vec<[f64; 2]>,
    roundtrip_defect: f64,
    composition_defect: f64,
    conditioning_warning: bool,
}

pub fn tilde(config: &FileConfig, format: Format) -> Result<RunOutput, CliError> {
    let zeros = config.require_zeros()?;
    let w = config.require_values()?;
    let wt = tilde_apply(w, zeros)?;
    let roundtrip_defect = tilde_invert(&wt, zeros)?.max_deviation(w)?;
    let composition_defect = tilde_matrices(zeros)?.composition_defect();
    let conditioning_warning = separation_report(
        zeros,
        config.threshold.unwrap_or(DEFAULT_THRESHOLD),
    )?
    .conditioning_warning;
    let summary = TildeSummary {
        wtilde: wt.iter().map(|v| [v.re, v.im]).collect(),
        roundtrip_defect,
        composition_defect,
        conditioning_warning,
    };
    let text = match format {
        Format::Json => pretty(&summary),
        Format::Csv => {
            let mut csv = String::from("k,quantity,value\n");
            for (k, v) in summary.wtilde.iter().enumerate() {
                let _ = writeln!(csv, "{k},wtilde_re,{}", v[0]);
                let _ = writeln!(csv, "{k},wtilde_im,{}", v[1]);
            }
            let _ = writeln!(csv, ",roundtrip_defect,{}", summary.roundtrip_defect);
            let _ = writeln!(csv, ",composition_defect,{}", summary.composition_defect);
            let _ = writeln!(
                csv,
                ",conditioning_warning,{}",
                bool_cell(summary.conditioning_warning)
            );
            csv
        }
    };
    Ok(RunOutput::text_only(text))
}

// ---------------------------------------------------------------------------
// interpolate
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct InterpolateSummary {
    n: usize,
    trace_defect: f64,
    h1_norm: QuadResult,
    h2_norm: QuadResult,
    h2_gram: f64,
    h2_cross_defect: f64,
    tilde_trace_defect: QuadResult,
    residue_defect_max: QuadResult,
    vinogradov_trace_defect: f64,
    vinogradov_h1_norm: QuadResult,
}

pub fn interpolate(config: &FileConfig, format: Format) -> Result<RunOutput, CliError> {
    let zeros = config.require_zeros()?;
    let w = config.require_values()?;
    let cap = grid(config)?;
    let rtol = config.tol.unwrap_or(HARDY_RTOL);

    let element = interpolate_in_kb(zeros, w)?;
    let trace_defect = element.trace_defect()?;

    let h1_probe = element.clone();
    let h1_norm = hardy_norm_with_tol(move |z| h1_probe.evaluate(z), 1.0, &cap, rtol)?;
    let h2_probe = element.clone();
    let h2_norm = hardy_norm_with_tol(move |z| h2_probe.evaluate(z), 2.0, &cap, rtol)?;
    let h2_gram = h2_norm_via_gram(zeros, w)?;
    let h2_cross_defect = (h2_norm.value - h2_gram).abs();

    let cauchy = tilde_trace_via_cauchy(&element, &cap)?;
    let expected: Vec<Complex64> = tilde_apply(w, zeros)?.iter().map(|v| v.conj()).collect();
    let tilde_trace_defect = QuadResult {
        value: cauchy
            .value
            .max_deviation(&modelspace_core::seq::ValueSequence::new(expected))?,
        node_count: cauchy.node_count,
        converged: cauchy.converged,
    };

    // Residue identity at the configured index, or the worst index.
    let indices: Vec<usize> = match config.residue_index {
        Some(k) => vec![k],
        None => (0..zeros.len()).collect(),
    };
    let mut residue_defect_max = QuadResult {
        value: 0.0,
        node_count: 0,
        converged: true,
    };
    for k in indices {
        let check = residue_identity_check(zeros, w, k, &cap)?;
        let defect = (check.quadrature.value - check.residues).norm();
        residue_defect_max.value = residue_defect_max.value.max(defect);
        residue_defect_max.node_count = residue_defect_max.node_count.max(check.quadrature.node_count);
        residue_defect_max.converged &= check.quadrature.converged;
    }

    let (vinogradov, vinogradov_h1) = vinogradov_interpolant(zeros, w, &cap)?;
    let vinogradov_trace_defect = vinogradov.trace_defect()?;

    let summary = InterpolateSummary {
        n: zeros.len(),
        trace_defect,
        h1_norm: h1_norm.into(),
        h2_norm: h2_norm.into(),
        h2_gram,
        h2_cross_defect,
        tilde_trace_defect,
        residue_defect_max,
        vinogradov_trace_defect,
        vinogradov_h1_norm: vinogradov_h1.into(),
    };
    let converged = summary.h1_norm.converged
        && summary.h2_norm.converged
        && summary.tilde_trace_defect.converged
        && summary.residue_defect_max.converged
        && summary.vinogradov_h1_norm.converged;

    let mut aux_files = Vec::new();
    if let Some(path) = &config.boundary_dump {
        let nodes = config.boundary_nodes.unwrap_or(DEFAULT_BOUNDARY_NODES);
        let dump_grid = QuadratureGrid::new(nodes)?;
        aux_files.push((path.clone(), element.boundary_csv(&dump_grid)?));
    }

    let text = match format {
        Format::Json => pretty(&summary),
        Format::Csv => {
            let mut csv = String::from("quantity,value\n");
            let _ = writeln!(csv, "n,{}", summary.n);
            let _ = writeln!(csv, "trace_defect,{}", summary.trace_defect);
            push_quad(&mut csv, "h1_norm", &summary.h1_norm);
            push_quad(&mut csv, "h2_norm", &summary.h2_norm);
            let _ = writeln!(csv, "h2_gram,{}", summary.h2_gram);
            let _ = writeln!(csv, "h2_cross_defect,{}", summary.h2_cross_defect);
            push_quad(&mut csv, "tilde_trace_defect", &summary.tilde_trace_defect);
            push_quad(&mut csv, "residue_defect_max", &summary.residue_defect_max);
            let _ = writeln!(
                csv,
                "vinogradov_trace_defect,{}",
                summary.vinogradov_trace_defect
            );
            push_quad(&mut csv, "vinogradov_h1_norm", &summary.vinogradov_h1_norm);
            csv
        }
    };
    Ok(RunOutput {
        text,
        aux_files,
        converged,
    })
}

// ---------------------------------------------------------------------------
// experiment scans
// ---------------------------------------------------------------------------

fn render_report(report: &ExperimentReport, format: Format) -> String {
    match format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    }
}

/// A scan converged when no trial recorded a capped quadrature.
fn scan_converged(report: &ExperimentReport) -> bool {
    report
        .values("quadrature_failures")
        .iter()
        .all(|&v| v == 0.0)
}

pub fn counterexample(config: &FileConfig, format: Format) -> Result<RunOutput, CliError> {
    let report = run_counterexample(&config.experiment()?)?;
    Ok(RunOutput::text_only(render_report(&report, format)))
}

pub fn scan_conjecture(config: &FileConfig, format: Format) -> Result<RunOutput, CliError> {
    let report = conjecture_ratio_scan(&config.experiment()?)?;
    let converged = scan_converged(&report);
    Ok(RunOutput {
        text: render_report(&report, format),
        aux_files: Vec::new(),
        converged,
    })
}

pub fn scan_necessity(config: &FileConfig, format: Format) -> Result<RunOutput, CliError> {
    let report = necessity_embedding_scan(&config.experiment()?)?;
    let converged = scan_converged(&report);
    Ok(RunOutput {
        text: render_report(&report, format),
        aux_files: Vec::new(),
        converged,
    })
}

pub fn scan_operator(config: &FileConfig, format: Format) -> Result<RunOutput, CliError> {
    let report = operator_bounds_scan(&config.experiment()?)?;
    Ok(RunOutput::text_only(render_report(&report, format)))
}
