//! Sequence files: JSON `{"schema_version":1,"entries":[[n,re,im],...]}`
//! (a bare `[[n,re,im],...]` array is also read) or CSV with header
//! `n,re,im`. Entries may appear in any order; they are written back sorted.

use std::fs;
use std::path::Path;

use hardy_core::{Complex, FinSeq64};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// On-disk form of a sequence, optionally carrying tabulated `v` and `φ`
/// for the `custom` family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceFile {
    pub schema_version: u32,
    pub entries: Vec<(usize, f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AnyJson {
    File(SequenceFile),
    Bare(Vec<(usize, f64, f64)>),
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn parse_error(path: &Path, message: impl Into<String>) -> CliError {
    CliError::Parse {
        path: path.display().to_string(),
        message: message.into(),
    }
}

fn read_csv(path: &Path, text: &str) -> Result<Vec<(usize, f64, f64)>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| parse_error(path, e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["n", "re", "im"] {
        return Err(parse_error(path, format!("expected header n,re,im, got {}", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let mut rows = Vec::new();
    for record in reader.deserialize::<(usize, f64, f64)>() {
        rows.push(record.map_err(|e| parse_error(path, e.to_string()))?);
    }
    Ok(rows)
}

/// Reads a sequence file, returning the sequence and the raw document.
pub fn load_sequence_file(path: &Path) -> Result<(FinSeq64, SequenceFile)> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let file = if is_csv(path) {
        SequenceFile {
            schema_version: SCHEMA_VERSION,
            entries: read_csv(path, &text)?,
            v: None,
            phi: None,
        }
    } else {
        match serde_json::from_str::<AnyJson>(&text) {
            Ok(AnyJson::File(f)) => f,
            Ok(AnyJson::Bare(entries)) => SequenceFile {
                schema_version: SCHEMA_VERSION,
                entries,
                v: None,
                phi: None,
            },
            Err(e) => {
                // re-parse as the full schema to get a precise message
                let detail = serde_json::from_str::<SequenceFile>(&text).err().unwrap_or(e);
                return Err(parse_error(path, detail.to_string()));
            }
        }
    };
    if file.schema_version != SCHEMA_VERSION {
        return Err(parse_error(path, format!("unsupported schema_version {}", file.schema_version)));
    }
    let mut seen = std::collections::BTreeSet::new();
    for (i, &(n, re, im)) in file.entries.iter().enumerate() {
        if n == 0 {
            return Err(parse_error(path, format!("entry {i}: index 0 is fixed to u(0) = 0")));
        }
        if !seen.insert(n) {
            return Err(parse_error(path, format!("entry {i}: duplicate index {n}")));
        }
        if !(re.is_finite() && im.is_finite()) {
            return Err(parse_error(path, format!("entry {i}: non-finite value at n = {n}")));
        }
    }
    let seq = FinSeq64::from_entries(file.entries.iter().map(|&(n, re, im)| (n, Complex::new(re, im))))
        .map_err(|e| parse_error(path, e.to_string()))?;
    Ok((seq, file))
}

pub fn load_sequence(path: &Path) -> Result<FinSeq64> {
    load_sequence_file(path).map(|(s, _)| s)
}

/// Writes entries in increasing index order, as CSV when the extension is
/// `.csv` and as JSON otherwise.
pub fn save_sequence(seq: &FinSeq64, path: &Path) -> Result<()> {
    let entries: Vec<(usize, f64, f64)> = seq.iter().map(|(n, z)| (n, z.re, z.im)).collect();
    let text = if is_csv(path) {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(["n", "re", "im"]).map_err(|e| CliError::Encode(e.to_string()))?;
        for row in &entries {
            writer.serialize(row).map_err(|e| CliError::Encode(e.to_string()))?;
        }
        String::from_utf8(writer.into_inner().map_err(|e| CliError::Encode(e.to_string()))?)
            .map_err(|e| CliError::Encode(e.to_string()))?
    } else {
        let file = SequenceFile {
            schema_version: SCHEMA_VERSION,
            entries,
            v: None,
            phi: None,
        };
        let mut s = serde_json::to_string(&file).map_err(|e| CliError::Encode(e.to_string()))?;
        s.push('\n');
        s
    };
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}
