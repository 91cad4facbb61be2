use std::fs;
use std::path::Path;

use serde::Serialize;

use super::engine::RunOutput;
use crate::Result;

pub fn write_csv_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// `report.json`, `summary.txt` and any requested telemetry CSVs.
pub fn write_run_outputs(out: &RunOutput, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.json"), out.report.to_json())?;
    fs::write(dir.join("summary.txt"), out.report.summary())?;
    if !out.lane_rows.is_empty() {
        write_csv_rows(&dir.join("lanes.csv"), &out.lane_rows)?;
    }
    if !out.global_rows.is_empty() {
        write_csv_rows(&dir.join("global.csv"), &out.global_rows)?;
    }
    Ok(())
}
