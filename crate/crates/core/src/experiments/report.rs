//! JSON and CSV experiment reports named by experiment and parameter hash.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub summary: String,
}

/// `{"experiment", "params", "rows", "verdict"}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub experiment: String,
    pub params: Value,
    pub rows: Vec<Value>,
    pub verdict: Verdict,
}

impl Report {
    pub fn new<P: Serialize, R: Serialize>(
        experiment: &str,
        params: &P,
        rows: &[R],
        pass: bool,
        summary: impl Into<String>,
    ) -> Result<Self> {
        Ok(Report {
            experiment: experiment.to_string(),
            params: serde_json::to_value(params)?,
            rows: rows.iter().map(serde_json::to_value).collect::<std::result::Result<_, _>>()?,
            verdict: Verdict { pass, summary: summary.into() },
        })
    }

    /// `<experiment>-<first 12 hex digits of SHA-256 of the parameter JSON>`.
    pub fn file_stem(&self) -> String {
        let digest = Sha256::digest(self.params.to_string().as_bytes());
        let hex: String = digest.iter().take(6).map(|b| format!("{b:02x}")).collect();
        format!("{}-{hex}", self.experiment)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// One line per row; nested values are written as quoted JSON.
    pub fn to_csv(&self) -> String {
        let mut columns: Vec<String> = Vec::new();
        for row in &self.rows {
            if let Value::Object(m) = row {
                for k in m.keys() {
                    if !columns.contains(k) {
                        columns.push(k.clone());
                    }
                }
            }
        }
        if columns.is_empty() {
            columns.push("value".into());
        }
        let mut out = columns.join(",") + "\n";
        for row in &self.rows {
            let cells: Vec<String> = columns
                .iter()
                .map(|c| match row {
                    Value::Object(m) => m.get(c).map(cell).unwrap_or_default(),
                    other if c == "value" => cell(other),
                    _ => String::new(),
                })
                .collect();
            out += &cells.join(",");
            out.push('\n');
        }
        out
    }

    /// Writes `<stem>.json` and `<stem>.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        let json = self.to_json()?;
        let csv = self.to_csv();
        fs::create_dir_all(dir)?;
        let stem = self.file_stem();
        let (jp, cp) = (dir.join(format!("{stem}.json")), dir.join(format!("{stem}.csv")));
        fs::write(&jp, json)?;
        fs::write(&cp, csv)?;
        Ok((jp, cp))
    }
}

fn cell(v: &Value) -> String {
    let raw = match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(_) | Value::Bool(_) => v.to_string(),
        _ => v.to_string(),
    };
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn stem_depends_on_params_only() {
        let a = Report::new("x", &json!({"k": 2}), &[json!({"a": 1})], true, "").unwrap();
        let b = Report::new("x", &json!({"k": 2}), &[json!({"a": 5})], false, "other").unwrap();
        let c = Report::new("x", &json!({"k": 3}), &[json!({"a": 1})], true, "").unwrap();
        assert_eq!(a.file_stem(), b.file_stem());
        assert_ne!(a.file_stem(), c.file_stem());
        assert!(a.file_stem().starts_with("x-"));
    }

    #[test]
    fn csv_quotes_nested_values() {
        let r = Report::new("x", &json!({}), &[json!({"a": 1, "v": [1, 2]})], true, "").unwrap();
        assert_eq!(r.to_csv(), "a,v\n1,\"[1,2]\"\n");
    }
}
