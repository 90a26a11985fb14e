//! File formats: detection, round trips and atomic writes.
//!
//! All data files are JSON; the schema is recognized from the top-level keys.
//! Word lists are plain text, one word per line.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::channels::TransferChannel;
use crate::error::{Error, Result};
use crate::freegroup::UnitaryTuple;
use crate::linalg::Matrix;
use crate::matprod::MnMnRep;
use crate::obstructions::CharacterTable;

/// Any of the JSON data types.
#[derive(Debug, Clone, PartialEq)]
pub enum DataFile {
    Matrix(Matrix),
    Unitaries(UnitaryTuple),
    MnMn(MnMnRep),
    Channel(TransferChannel),
    Table(CharacterTable),
}

impl DataFile {
    pub fn kind(&self) -> &'static str {
        match self {
            DataFile::Matrix(_) => "matrix",
            DataFile::Unitaries(_) => "unitaries",
            DataFile::MnMn(_) => "mnmn-rep",
            DataFile::Channel(_) => "channel",
            DataFile::Table(_) => "character-table",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        let obj = value.as_object().ok_or_else(|| Error::Parse("expected a JSON object".into()))?;
        let has = |k: &str| obj.contains_key(k);
        let parsed = if has("class_sizes") {
            DataFile::Table(serde_json::from_value(value)?)
        } else if has("unitaries") {
            DataFile::Unitaries(serde_json::from_value(value)?)
        } else if has("e") && has("f") {
            DataFile::MnMn(serde_json::from_value(value)?)
        } else if has("values") && has("n") {
            DataFile::Channel(serde_json::from_value(value)?)
        } else if has("dim") && has("data") {
            DataFile::Matrix(serde_json::from_value(value)?)
        } else {
            return Err(Error::Parse("unrecognized schema".into()));
        };
        Ok(parsed)
    }

    pub fn to_json(&self) -> Result<String> {
        match self {
            DataFile::Matrix(x) => to_json(x),
            DataFile::Unitaries(x) => to_json(x),
            DataFile::MnMn(x) => to_json(x),
            DataFile::Channel(x) => to_json(x),
            DataFile::Table(x) => to_json(x),
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<S: Serialize + ?Sized>(value: &S) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn read_data_file(path: &Path) -> Result<DataFile> {
    DataFile::parse(&fs::read_to_string(path)?)
}

/// Parse, serialize, parse again and serialize again; true when the two
/// serializations are byte-identical.
pub fn roundtrip_text(text: &str) -> Result<bool> {
    let first = DataFile::parse(text)?.to_json()?;
    let second = DataFile::parse(&first)?.to_json()?;
    Ok(first == second)
}

pub fn roundtrip(path: &Path) -> Result<bool> {
    roundtrip_text(&fs::read_to_string(path)?)
}

/// Write through a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let file_name = path.file_name().ok_or_else(|| Error::Parse(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", file_name.to_string_lossy(), std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

#[cfg(test)]
mod tests;
