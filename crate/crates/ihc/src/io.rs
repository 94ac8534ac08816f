//! File formats: edge lists in, CSV or JSON lines out, skill worlds as JSON.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::ValueEnum;
use ihc_core::graph::{parse_edge_list, EdgeList};
use ihc_core::{CascadeResult, SkillWorld};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

/// Writes `records` with a header row (CSV) or one object per line (JSONL).
pub fn write_records<T: Serialize, W: Write>(
    out: W,
    format: Format,
    records: &[T],
) -> io::Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in records {
                w.serialize(r).map_err(io::Error::other)?;
            }
            w.flush()
        }
        Format::Jsonl => {
            let mut w = BufWriter::new(out);
            for r in records {
                serde_json::to_writer(&mut w, r)?;
                w.write_all(b"\n")?;
            }
            w.flush()
        }
    }
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit<T: Serialize>(path: Option<&Path>, format: Format, records: &[T]) -> Result<()> {
    match path {
        Some(p) => {
            let file = fs::File::create(p).map_err(|e| CliError::io(p, e))?;
            write_records(file, format, records).map_err(|e| CliError::io(p, e))
        }
        None => write_records(io::stdout().lock(), format, records)
            .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

pub fn load_edge_list(path: &Path, directed: bool) -> Result<EdgeList> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_edge_list(&text, directed).map_err(|source| CliError::Load {
        path: path.to_path_buf(),
        source,
    })
}

/// One replication as a CSV row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CascadeRow {
    pub replication_id: u64,
    pub success: bool,
    pub chain_length: usize,
    pub applicants: usize,
    pub steps: usize,
    pub seed_node: usize,
}

impl CascadeRow {
    pub fn new(replication_id: u64, r: &CascadeResult) -> Self {
        CascadeRow {
            replication_id,
            success: r.success,
            chain_length: r.chain_length,
            applicants: r.applicants,
            steps: r.steps,
            seed_node: r.seed_node,
        }
    }
}

pub fn cascade_rows(results: &[CascadeResult]) -> Vec<CascadeRow> {
    results
        .iter()
        .zip(0..)
        .map(|(r, i)| CascadeRow::new(i, r))
        .collect()
}

pub fn read_cascade_rows<R: io::Read>(input: R) -> csv::Result<Vec<CascadeRow>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

pub fn save_skill_world(path: &Path, world: &SkillWorld) -> Result<()> {
    let text = serde_json::to_string(world).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn load_skill_world(path: &Path) -> Result<SkillWorld> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })
}
