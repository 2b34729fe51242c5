//! File formats: count files, density matrices, Stokes tensors, reports, and
//! scan surfaces. JSON throughout except scan surfaces (CSV). Writes go
//! through a temp-then-rename so partial files never land on disk.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::{ComparisonReport, PhaseScan};
use crate::error::{Result, TomoError};
use crate::linalg::{ComplexMatrix, C64};
use crate::measurement::{BasisSetting, CountRecord, Dataset};
use crate::state::StokesTensor;

pub const COUNT_FILE_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct CountFileRecord {
    setting: String,
    counts: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    duration_s: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CountFile {
    format_version: u32,
    n_qubits: usize,
    records: Vec<CountFileRecord>,
}

pub fn dataset_to_json(dataset: &Dataset) -> String {
    let file = CountFile {
        format_version: COUNT_FILE_VERSION,
        n_qubits: dataset.n_qubits(),
        records: dataset
            .records()
            .map(|r| CountFileRecord {
                setting: r.setting.to_string(),
                counts: r.counts.clone(),
                duration_s: r.duration_s,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("serializable")
}

pub fn dataset_from_json(text: &str) -> Result<Dataset> {
    let file: CountFile = serde_json::from_str(text)?;
    if file.format_version != COUNT_FILE_VERSION {
        return Err(TomoError::Format(format!(
            "unsupported format_version {}",
            file.format_version
        )));
    }
    if file.n_qubits == 0 {
        return Err(TomoError::Format("n_qubits must be positive".into()));
    }
    let expected = 1usize << file.n_qubits;
    let mut dataset = Dataset::new(file.n_qubits);
    for (idx, rec) in file.records.iter().enumerate() {
        let setting: BasisSetting = rec
            .setting
            .parse()
            .map_err(|e: TomoError| TomoError::Format(format!("record {idx}: {e}")))?;
        if setting.n_qubits() != file.n_qubits {
            return Err(TomoError::Format(format!(
                "setting length {}, expected {}, record {idx}",
                setting.n_qubits(),
                file.n_qubits
            )));
        }
        if rec.counts.len() != expected {
            return Err(TomoError::Format(format!(
                "counts length {}, expected {expected}, record {idx}",
                rec.counts.len()
            )));
        }
        if let Some(d) = rec.duration_s {
            if !d.is_finite() || d < 0.0 {
                return Err(TomoError::Format(format!(
                    "bad duration {d}, record {idx}"
                )));
            }
        }
        let record = CountRecord::new(setting, rec.counts.clone(), rec.duration_s)?;
        dataset
            .insert(record)
            .map_err(|e| TomoError::Format(format!("record {idx}: {e}")))?;
    }
    Ok(dataset)
}

pub fn write_count_file(dataset: &Dataset, path: &Path) -> Result<()> {
    write_atomic(path, dataset_to_json(dataset).as_bytes())
}

pub fn read_count_file(path: &Path) -> Result<Dataset> {
    dataset_from_json(&std::fs::read_to_string(path)?)
}

/// dim + row-major re/im arrays; separate arrays avoid complex-number
/// encoding ambiguity.
#[derive(Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    let dim = m.dim();
    let mut re = Vec::with_capacity(dim * dim);
    let mut im = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            let z = m.get(i, j);
            re.push(z.re);
            im.push(z.im);
        }
    }
    MatrixJson { dim, re, im }
}

pub fn matrix_from_json(j: &MatrixJson) -> Result<ComplexMatrix> {
    let want = j.dim * j.dim;
    if j.re.len() != want || j.im.len() != want {
        return Err(TomoError::Format(format!(
            "matrix arrays must have dim^2 = {want} entries, got {}/{}",
            j.re.len(),
            j.im.len()
        )));
    }
    let entries: Vec<C64> = j
        .re
        .iter()
        .zip(&j.im)
        .map(|(&re, &im)| C64::new(re, im))
        .collect();
    ComplexMatrix::from_row_slice(j.dim, &entries)
}

pub fn write_matrix(m: &ComplexMatrix, path: &Path) -> Result<()> {
    write_atomic(
        path,
        serde_json::to_string_pretty(&matrix_to_json(m))?.as_bytes(),
    )
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    let j: MatrixJson = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    matrix_from_json(&j)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StokesJson {
    pub n_qubits: usize,
    /// Flat base-4 order, qubit 0 most significant; values[0] = 1.
    pub values: Vec<f64>,
}

pub fn stokes_to_json(s: &StokesTensor) -> StokesJson {
    StokesJson {
        n_qubits: s.n_qubits(),
        values: s.values().to_vec(),
    }
}

pub fn stokes_from_json(j: &StokesJson) -> Result<StokesTensor> {
    StokesTensor::new(j.n_qubits, j.values.clone())
}

pub fn write_stokes(s: &StokesTensor, path: &Path) -> Result<()> {
    write_atomic(
        path,
        serde_json::to_string_pretty(&stokes_to_json(s))?.as_bytes(),
    )
}

pub fn read_stokes(path: &Path) -> Result<StokesTensor> {
    let j: StokesJson = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    stokes_from_json(&j)
}

pub fn write_report_json(report: &ComparisonReport, path: &Path) -> Result<()> {
    write_atomic(path, serde_json::to_string_pretty(report)?.as_bytes())
}

pub fn read_report_json(path: &Path) -> Result<ComparisonReport> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

/// Aligned-column text table of a comparison report.
pub fn format_report_table(report: &ComparisonReport) -> String {
    let fmt = |e: &Option<crate::analysis::ScalarEstimate>| -> String {
        match e {
            Some(s) => format!("{:.4} [{:.4},{:.4}]", s.point, s.lo, s.hi),
            None => "-".into(),
        }
    };
    let mut rows: Vec<[String; 6]> = vec![[
        "pair".into(),
        "F_fst".into(),
        "F_qot".into(),
        "F_qot_vs_fst".into(),
        "VNE_fst".into(),
        "VNE_qot".into(),
    ]];
    for p in &report.pairs {
        rows.push([
            format!("({},{})", p.pair.0, p.pair.1),
            fmt(&p.fst_fidelity),
            fmt(&p.qot_fidelity),
            fmt(&p.cross_fidelity),
            fmt(&p.fst_vne),
            fmt(&p.qot_vne),
        ]);
    }
    let mut widths = [0usize; 6];
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    out.push_str(&format!(
        "n_qubits: {}   level: {}\n",
        report.n_qubits, report.level
    ));
    if let Some(full) = &report.full_fidelity {
        out.push_str(&format!(
            "full-state fidelity: {:.4} [{:.4},{:.4}]\n",
            full.point, full.lo, full.hi
        ));
    }
    for row in &rows {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell:<w$}"))
            .collect();
        out.push_str(&line.join("  "));
        out.push('\n');
    }
    out
}

/// theta1,theta2,fidelity,normalized rows, theta1 outer.
pub fn scan_to_csv(scan: &PhaseScan) -> String {
    let mut out = String::from("theta1,theta2,fidelity,normalized\n");
    let norm = if scan.peak_fidelity > 0.0 {
        scan.peak_fidelity
    } else {
        1.0
    };
    for (i1, &t1) in scan.theta1_grid.iter().enumerate() {
        for (i2, &t2) in scan.theta2_grid.iter().enumerate() {
            let f = scan.fidelity_at(i1, i2);
            out.push_str(&format!("{t1},{t2},{f},{}\n", f / norm));
        }
    }
    out
}

pub fn write_scan_csv(scan: &PhaseScan, path: &Path) -> Result<()> {
    write_atomic(path, scan_to_csv(scan).as_bytes())
}

/// Write to a sibling temp file and rename into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let tmp = match path.file_name() {
        Some(name) => {
            let mut n = name.to_os_string();
            n.push(".tmp~");
            path.with_file_name(n)
        }
        None => {
            return Err(TomoError::InvalidConfig(format!(
                "not a writable path: {}",
                path.display()
            )))
        }
    };
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
