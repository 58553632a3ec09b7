use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::CliResult;

pub fn csv<R: Serialize>(rows: &[R]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| std::io::Error::other(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn json_lines<R: Serialize>(rows: &[R]) -> String {
    rows.iter()
        .map(|r| serde_json::to_string(r).expect("report serialises") + "\n")
        .collect()
}

/// Prints `text` and, with an output directory, also writes it to `dir/file`.
pub fn emit(out: Option<&Path>, file: &str, text: &str) -> CliResult<()> {
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(text.as_bytes())?;
    stdout.flush()?;
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(file), text)?;
    }
    Ok(())
}
