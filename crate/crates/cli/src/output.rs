//! Per-scenario artifact files, each written to a temporary file and renamed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use kk_spectra::scenario::ScenarioOutput;

use crate::svg;

pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// spectrum.csv, checks.csv, one CSV per table, result.json and optional SVGs.
pub fn write_artifacts(dir: &Path, out: &ScenarioOutput, plots: bool) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut files = vec![
        (dir.join("spectrum.csv"), out.spectrum_csv().into_bytes()),
        (dir.join("checks.csv"), out.checks_csv().into_bytes()),
    ];
    for t in &out.tables {
        files.push((dir.join(format!("{}.csv", t.name)), ScenarioOutput::table_csv(t).into_bytes()));
    }
    let json = serde_json::to_string_pretty(&out.to_json()).expect("json value serializes") + "\n";
    files.push((dir.join("result.json"), json.into_bytes()));
    if plots {
        for p in &out.plots {
            files.push((dir.join(format!("{}.svg", p.name)), svg::render(p).into_bytes()));
        }
    }
    for (path, bytes) in &files {
        write_atomic(path, bytes)?;
    }
    Ok(files.into_iter().map(|(p, _)| p).collect())
}
