//! CSV and JSON-lines dataset loaders.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use divsamp_core::{LabeledDataset, TextDataset};

use crate::error::{Error, Result};

/// A loaded dataset, labeled when a label column was requested.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Loaded {
    Text(TextDataset),
    Labeled(LabeledDataset),
}

impl Loaded {
    pub fn text(&self) -> &TextDataset {
        match self {
            Loaded::Text(t) => t,
            Loaded::Labeled(l) => &l.base,
        }
    }

    pub fn labeled(&self) -> Option<&LabeledDataset> {
        match self {
            Loaded::Labeled(l) => Some(l),
            Loaded::Text(_) => None,
        }
    }

    pub fn len(&self) -> usize {
        self.text().len()
    }

    pub fn is_empty(&self) -> bool {
        self.text().is_empty()
    }
}

fn source_id(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string())
}

fn finish(path: &Path, rows: Vec<String>, labels: Option<Vec<String>>) -> Result<Loaded> {
    let base = TextDataset::new(source_id(path), rows)?;
    Ok(match labels {
        Some(labels) => Loaded::Labeled(LabeledDataset::new(base, labels)?),
        None => Loaded::Text(base),
    })
}

/// Reads an RFC 4180 CSV file with a header row.
pub fn load_csv(path: &Path, text_column: &str, label_column: Option<&str>) -> Result<Loaded> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(file);
    let csv_error = |e: csv::Error| {
        let line = e.position().map_or(0, |p| p.line());
        Error::Csv { path: path.into(), line, message: e.to_string() }
    };
    let headers = reader.headers().map_err(csv_error)?.clone();
    let column = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::MissingColumn {
            path: path.into(),
            column: name.into(),
            available: headers.iter().collect::<Vec<_>>().join(", "),
        })
    };
    let text_idx = column(text_column)?;
    let label_idx = label_column.map(column).transpose()?;
    let mut rows = Vec::new();
    let mut labels = label_idx.map(|_| Vec::new());
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        rows.push(record[text_idx].to_string());
        if let (Some(i), Some(l)) = (label_idx, labels.as_mut()) {
            l.push(record[i].to_string());
        }
    }
    finish(path, rows, labels)
}

fn json_field(value: &serde_json::Value, field: &str) -> Option<String> {
    match value.get(field)? {
        serde_json::Value::String(s) => Some(s.clone()),
        serde_json::Value::Null => None,
        other => Some(other.to_string()),
    }
}

/// Reads one JSON object per line. Blank lines are skipped; non-string
/// label values are kept in their JSON spelling.
pub fn load_jsonl(path: &Path, text_field: &str, label_field: Option<&str>) -> Result<Loaded> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rows = Vec::new();
    let mut labels = label_field.map(|_| Vec::new());
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(&line)
            .map_err(|e| Error::Json { path: path.into(), line: line_no, message: e.to_string() })?;
        if !value.is_object() {
            return Err(Error::Json { path: path.into(), line: line_no, message: "expected a JSON object".into() });
        }
        let missing = |field: &str| Error::MissingField { path: path.into(), line: line_no, field: field.into() };
        let text = match value.get(text_field) {
            Some(serde_json::Value::String(s)) => s.clone(),
            Some(serde_json::Value::Null) | None => return Err(missing(text_field)),
            Some(other) => other.to_string(),
        };
        rows.push(text);
        if let (Some(field), Some(l)) = (label_field, labels.as_mut()) {
            l.push(json_field(&value, field).ok_or_else(|| missing(field))?);
        }
    }
    finish(path, rows, labels)
}

/// Picks the loader from the file extension.
pub fn load(path: &Path, text_column: &str, label_column: Option<&str>) -> Result<Loaded> {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("csv") => load_csv(path, text_column, label_column),
        Some("jsonl") | Some("json") | Some("ndjson") => load_jsonl(path, text_column, label_column),
        _ => Err(Error::UnknownFormat { path: path.into() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(ext: &str, content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(ext).tempfile().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    const EXAMPLE: [&str; 6] = ["1A", "1B", "2B", "2C", "1A", "2B"];

    #[test]
    fn csv_example_order() {
        let mut content = String::from("text,label\n");
        for t in EXAMPLE {
            content.push_str(&format!("{t},{}\n", &t[..1]));
        }
        let f = file(".csv", &content);
        let loaded = load_csv(f.path(), "text", Some("label")).unwrap();
        let l = loaded.labeled().unwrap();
        assert_eq!(l.base.rows, EXAMPLE);
        assert_eq!(l.labels, ["1", "1", "2", "2", "1", "2"]);

        let mut jsonl = String::new();
        for t in EXAMPLE {
            jsonl.push_str(&format!("{{\"text\":\"{t}\",\"label\":\"{}\"}}\n", &t[..1]));
        }
        let j = file(".jsonl", &jsonl);
        let from_json = load_jsonl(j.path(), "text", Some("label")).unwrap();
        assert_eq!(from_json.labeled().unwrap().base.rows, l.base.rows);
        assert_eq!(from_json.labeled().unwrap().labels, l.labels);
    }

    #[test]
    fn csv_quoting() {
        let f = file(".csv", "id,text\n1,\"hello, world\"\n2,\"two\nlines\"\n3,\"say \"\"hi\"\"\"\n");
        let loaded = load(f.path(), "text", None).unwrap();
        assert!(matches!(loaded, Loaded::Text(_)));
        assert_eq!(loaded.text().rows, ["hello, world", "two\nlines", "say \"hi\""]);
    }

    #[test]
    fn csv_single_row() {
        let f = file(".csv", "text\nonly\n");
        assert_eq!(load_csv(f.path(), "text", None).unwrap().len(), 1);
    }

    #[test]
    fn csv_errors() {
        let f = file(".csv", "text\n");
        assert!(matches!(load_csv(f.path(), "text", None), Err(Error::Core(divsamp_core::Error::EmptyDataset))));
        let f = file(".csv", "body,label\nx,1\n");
        let err = load_csv(f.path(), "text", None).unwrap_err();
        assert!(matches!(err, Error::MissingColumn { .. }));
        assert!(err.to_string().contains("body, label"));
        let f = file(".csv", "text,label\na,1\nb\n");
        match load_csv(f.path(), "text", Some("label")).unwrap_err() {
            Error::Csv { line, .. } => assert_eq!(line, 3),
            e => panic!("{e}"),
        }
        assert!(matches!(load_csv(Path::new("/no/such/file.csv"), "text", None), Err(Error::Io { .. })));
    }

    #[test]
    fn jsonl_errors() {
        let f = file(".jsonl", "");
        assert!(matches!(load_jsonl(f.path(), "text", None), Err(Error::Core(divsamp_core::Error::EmptyDataset))));
        let f = file(".jsonl", "{\"text\":\"a\",\"label\":\"x\"}\n{\"text\":\"b\"}\n");
        match load_jsonl(f.path(), "text", Some("label")).unwrap_err() {
            Error::MissingField { line, field, .. } => {
                assert_eq!(line, 2);
                assert_eq!(field, "label");
            }
            e => panic!("{e}"),
        }
        let f = file(".jsonl", "{\"text\":\"a\"}\nnot json\n");
        match load_jsonl(f.path(), "text", None).unwrap_err() {
            Error::Json { line, .. } => assert_eq!(line, 2),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn jsonl_numeric_labels() {
        let f = file(".jsonl", "{\"text\":\"a\",\"label\":3}\n{\"text\":\"\",\"label\":4}\n");
        let l = load(f.path(), "text", Some("label")).unwrap();
        assert_eq!(l.labeled().unwrap().labels, ["3", "4"]);
        assert_eq!(l.text().rows[1], "");
    }

    #[test]
    fn unknown_extension() {
        let f = file(".txt", "text\na\n");
        assert!(matches!(load(f.path(), "text", None), Err(Error::UnknownFormat { .. })));
    }
}
