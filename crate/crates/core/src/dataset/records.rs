use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::DatasetError;

/// One instruction-format training example.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstructionRecord {
    pub instruction: String,
    pub input: Option<String>,
    pub output: String,
}

/// Writes one JSON object per line and returns the number written.
pub fn emit_records<T: Serialize>(records: &[T], destination: &Path) -> Result<usize, DatasetError> {
    let file = File::create(destination).map_err(|e| DatasetError::io(destination, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        let line = serde_json::to_string(r).map_err(|e| DatasetError::InvalidInput(e.to_string()))?;
        writeln!(w, "{line}").map_err(|e| DatasetError::io(destination, e))?;
    }
    w.flush().map_err(|e| DatasetError::io(destination, e))?;
    Ok(records.len())
}

/// Reads a JSON-lines file, skipping blank lines.
pub fn read_records<T: DeserializeOwned>(source: &Path) -> Result<Vec<T>, DatasetError> {
    let file = File::open(source).map_err(|e| DatasetError::io(source, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| DatasetError::io(source, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| {
            DatasetError::InvalidInput(format!("{}:{}: {e}", source.display(), i + 1))
        })?;
        out.push(record);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_counts() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.jsonl");
        let records = vec![
            InstructionRecord {
                instruction: "a".into(),
                input: None,
                output: "x\ny".into(),
            },
            InstructionRecord {
                instruction: "b".into(),
                input: Some("i".into()),
                output: "z".into(),
            },
            InstructionRecord {
                instruction: "c".into(),
                input: None,
                output: "ä".into(),
            },
        ];
        assert_eq!(emit_records(&records, &path).unwrap(), 3);
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with(r#"{"instruction":"a","input":null,"output":"x\ny"}"#));
        assert_eq!(read_records::<InstructionRecord>(&path).unwrap(), records);

        assert_eq!(emit_records::<InstructionRecord>(&[], &path).unwrap(), 0);
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "");
        assert!(emit_records(&records, &dir.path().join("missing/r.jsonl")).is_err());
    }
}
