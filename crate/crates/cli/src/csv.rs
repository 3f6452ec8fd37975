//! CSV emission: every table of every analysis block becomes one file
//! `NN_kind_table.csv` with a mandatory header row, comma separation and
//! `\n` line endings. Numbers inside reports and CSVs carry 17 significant
//! digits, so re-parsing recovers the exact doubles.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use crate::report::Report;

pub fn emit_csv(report: &Report, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)
        .with_context(|| format!("creating CSV directory {}", dir.display()))?;
    let mut written = Vec::new();
    for block in &report.analyses {
        for table in &block.tables {
            let file = dir.join(format!("{:02}_{}_{}.csv", block.index, block.kind, table.name));
            let mut body = String::new();
            body.push_str(&table.header.join(","));
            body.push('\n');
            for row in &table.rows {
                body.push_str(&row.join(","));
                body.push('\n');
            }
            fs::write(&file, body)
                .with_context(|| format!("writing CSV {}", file.display()))?;
            written.push(file);
        }
    }
    Ok(written)
}
