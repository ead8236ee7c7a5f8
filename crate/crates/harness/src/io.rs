//! File formats: strict CSV vectors, instance bundles, and report export.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! write/read cycle reproduces every value bitwise. Parsing is strict:
//! ragged rows, non-numeric tokens, and non-finite values are rejected with
//! 1-based row/column positions.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ramsia_core::{Matrix, ProblemInstance};
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::sweep::SweepReport;

/// Sidecar describing an instance bundle on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceManifest {
    pub n: usize,
    pub m: usize,
    pub num_side_infos: usize,
    /// Master seed of the generator that produced the bundle.
    pub seed: u64,
    pub trial: u64,
    pub lambda: f64,
    pub epsilon: f64,
    pub has_x_true: bool,
}

pub fn parse_vectors(text: &str, path: &Path) -> Result<Vec<Vec<f64>>, HarnessError> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let row_no = i + 1;
        let mut row = Vec::new();
        for (c, token) in line.split(',').enumerate() {
            let col = c + 1;
            let trimmed = token.trim();
            let value: f64 = trimmed.parse().map_err(|_| {
                HarnessError::parse(path, row_no, col, format!("expected a number, found {trimmed:?}"))
            })?;
            if !value.is_finite() {
                return Err(HarnessError::parse(
                    path,
                    row_no,
                    col,
                    format!("non-finite value {trimmed:?}"),
                ));
            }
            row.push(value);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(HarnessError::parse(
                    path,
                    row_no,
                    row.len(),
                    format!("ragged row: expected {} values, found {}", first.len(), row.len()),
                ));
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Reads one vector per line, comma separated, no header. An empty file
/// yields an empty list.
pub fn read_vectors(path: &Path) -> Result<Vec<Vec<f64>>, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_vectors(&text, path)
}

fn format_row(out: &mut String, row: &[f64]) {
    for (i, v) in row.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write!(out, "{v}").expect("writing to String cannot fail");
    }
    out.push('\n');
}

/// Writes one vector per line in the format accepted by [`read_vectors`].
pub fn write_vectors(path: &Path, rows: &[Vec<f64>]) -> Result<(), HarnessError> {
    let mut out = String::new();
    for row in rows {
        format_row(&mut out, row);
    }
    fs::write(path, out).map_err(|e| HarnessError::io(path, e))
}

fn bundle_paths(dir: &Path) -> (PathBuf, PathBuf, PathBuf, PathBuf, PathBuf) {
    (
        dir.join("manifest.json"),
        dir.join("phi.csv"),
        dir.join("y.csv"),
        dir.join("si.csv"),
        dir.join("x.csv"),
    )
}

/// Writes an instance bundle: `manifest.json`, `phi.csv` (one row per
/// measurement), `y.csv` (single row), `si.csv` (one row per side
/// information, empty file for none), and `x.csv` when the ground truth is
/// known.
pub fn write_instance(
    dir: &Path,
    inst: &ProblemInstance,
    manifest: &InstanceManifest,
) -> Result<(), HarnessError> {
    if manifest.n != inst.n()
        || manifest.m != inst.m()
        || manifest.num_side_infos != inst.num_side_infos()
        || manifest.has_x_true != inst.x_true().is_some()
    {
        return Err(HarnessError::InvalidSpec(
            "manifest does not describe the given instance".into(),
        ));
    }
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let (manifest_path, phi_path, y_path, si_path, x_path) = bundle_paths(dir);

    let phi_rows: Vec<Vec<f64>> = (0..inst.m()).map(|i| inst.phi().row(i).to_vec()).collect();
    write_vectors(&phi_path, &phi_rows)?;
    write_vectors(&y_path, &[inst.y().to_vec()])?;
    write_vectors(&si_path, inst.side_infos())?;
    if let Some(x) = inst.x_true() {
        write_vectors(&x_path, &[x.to_vec()])?;
    }

    let mut body = serde_json::to_string_pretty(manifest)?;
    body.push('\n');
    fs::write(&manifest_path, body).map_err(|e| HarnessError::io(&manifest_path, e))
}

/// Reads a bundle written by [`write_instance`] and revalidates it.
pub fn read_instance(dir: &Path) -> Result<(ProblemInstance, InstanceManifest), HarnessError> {
    let (manifest_path, phi_path, y_path, si_path, x_path) = bundle_paths(dir);
    let text = fs::read_to_string(&manifest_path).map_err(|e| HarnessError::io(&manifest_path, e))?;
    let manifest: InstanceManifest = serde_json::from_str(&text).map_err(|e| {
        HarnessError::parse(&manifest_path, e.line(), e.column(), e.to_string())
    })?;

    let phi_rows = read_vectors(&phi_path)?;
    let phi = Matrix::from_rows(&phi_rows)?;
    let y_rows = read_vectors(&y_path)?;
    if y_rows.len() != 1 {
        return Err(HarnessError::parse(
            &y_path,
            y_rows.len().max(1),
            1,
            format!("expected exactly one row, found {}", y_rows.len()),
        ));
    }
    let y = y_rows.into_iter().next().expect("length checked");
    let side_infos = read_vectors(&si_path)?;
    if side_infos.len() != manifest.num_side_infos {
        return Err(HarnessError::InvalidSpec(format!(
            "manifest promises {} side informations, si.csv holds {}",
            manifest.num_side_infos,
            side_infos.len()
        )));
    }
    let x_true = if manifest.has_x_true {
        let rows = read_vectors(&x_path)?;
        if rows.len() != 1 {
            return Err(HarnessError::parse(
                &x_path,
                rows.len().max(1),
                1,
                format!("expected exactly one row, found {}", rows.len()),
            ));
        }
        Some(rows.into_iter().next().expect("length checked"))
    } else {
        None
    };

    let inst = ProblemInstance::new(x_true, phi, y, side_infos)?;
    if inst.n() != manifest.n || inst.m() != manifest.m {
        return Err(HarnessError::InvalidSpec(format!(
            "manifest dimensions {}x{} do not match files {}x{}",
            manifest.m,
            manifest.n,
            inst.m(),
            inst.n()
        )));
    }
    Ok((inst, manifest))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

/// Renders the per-cell summary table. One header line, then one row per
/// cell in report order.
pub fn report_csv(report: &SweepReport) -> String {
    let mut out =
        String::from("variant,num_sis,m,trials,successes,success_probability,mean_rel_err,mean_iters\n");
    for c in &report.cells {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            c.variant,
            c.num_sis,
            c.m,
            c.trials,
            c.successes,
            c.success_probability,
            c.mean_rel_err,
            c.mean_iters
        )
        .expect("writing to String cannot fail");
    }
    out
}

/// Writes a sweep report as the cell-summary CSV or as JSON carrying the
/// full structure (metadata, cells, and per-trial rows).
pub fn export_report(
    report: &SweepReport,
    path: &Path,
    format: ReportFormat,
) -> Result<(), HarnessError> {
    let body = match format {
        ReportFormat::Csv => report_csv(report),
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report)?;
            s.push('\n');
            s
        }
    };
    fs::write(path, body).map_err(|e| HarnessError::io(path, e))
}
