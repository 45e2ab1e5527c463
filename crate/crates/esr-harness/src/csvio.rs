//! CSV output for experiment results.
//!
//! One row per episode. Columns: episode index, per-episode mean over
//! runs, its standard error, each run's raw utility, and a trailing-window
//! mean of the mean curve as the final column. Floats are written in
//! Rust's shortest round-trip decimal form, so re-reading the file
//! reproduces the matrix bit for bit.

use std::path::Path;

use crate::error::HarnessError;
use crate::experiment::ExperimentResult;

pub fn write_csv(result: &ExperimentResult, path: &Path) -> Result<(), HarnessError> {
    let io_err = |source: std::io::Error| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut writer = csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(source) => io_err(source),
        other => HarnessError::Runtime(format!("{other:?}")),
    })?;
    let runs = result.runs();
    let mut header = Vec::with_capacity(4 + runs);
    header.push("episode".to_string());
    header.push("mean_utility".to_string());
    header.push("stderr".to_string());
    for r in 0..runs {
        header.push(format!("run_{r}"));
    }
    header.push("trailing_mean".to_string());
    writer.write_record(&header).map_err(csv_err)?;
    for e in 0..result.episodes() {
        let mut row = Vec::with_capacity(4 + runs);
        row.push(e.to_string());
        row.push(result.mean[e].to_string());
        row.push(result.stderr[e].to_string());
        for run in &result.utilities {
            row.push(run[e].to_string());
        }
        row.push(result.trailing_mean[e].to_string());
        writer.write_record(&row).map_err(csv_err)?;
    }
    writer.flush().map_err(io_err)?;
    Ok(())
}

fn csv_err(e: csv::Error) -> HarnessError {
    HarnessError::Runtime(e.to_string())
}

/// Read back a CSV produced by [`write_csv`]; returns the utility matrix
/// indexed [run][episode].
pub fn read_csv_matrix(path: &Path) -> Result<Vec<Vec<f64>>, HarnessError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(source) => HarnessError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => HarnessError::Runtime(format!("{other:?}")),
    })?;
    let headers = reader.headers().map_err(csv_err)?.clone();
    let run_columns: Vec<usize> = headers
        .iter()
        .enumerate()
        .filter(|(_, name)| name.starts_with("run_"))
        .map(|(i, _)| i)
        .collect();
    if run_columns.is_empty() {
        return Err(HarnessError::Runtime(format!(
            "{}: no run columns found",
            path.display()
        )));
    }
    let mut matrix: Vec<Vec<f64>> = vec![Vec::new(); run_columns.len()];
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        for (run, &column) in run_columns.iter().enumerate() {
            let value: f64 = record[column]
                .parse()
                .map_err(|e| HarnessError::Runtime(format!("bad float in csv: {e}")))?;
            matrix[run].push(value);
        }
    }
    Ok(matrix)
}
