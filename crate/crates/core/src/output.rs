//! Result files: CSV tables and JSON reports stamped with the schema version
//! and a hash of the configuration that produced them.
//!
//! Nothing time- or host-dependent is written, so a fixed configuration and
//! seed always give the same bytes.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

const CSV_MARK: &str = "# dfpp schema_version=";

/// First 16 hex digits of the SHA-256 of the configuration's JSON form.
pub fn config_hash<T: Serialize>(config: &T) -> Result<String> {
    let bytes = serde_json::to_vec(config)?;
    let digest = Sha256::digest(&bytes);
    let mut out = String::with_capacity(16);
    for b in digest.iter().take(8) {
        write!(out, "{b:02x}").unwrap();
    }
    Ok(out)
}

/// Shortest text that parses back to the same value.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v}")
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width does not match header");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self, config_hash: &str) -> String {
        let mut out = format!("{CSV_MARK}{SCHEMA_VERSION} config_hash={config_hash}\n");
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// JSON wrapper around a command's result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report<C, R> {
    pub schema_version: u32,
    pub config_hash: String,
    pub command: String,
    pub config: C,
    pub result: R,
}

impl<C: Serialize, R: Serialize> Report<C, R> {
    pub fn new(command: &str, config: C, result: R) -> Result<Self> {
        Ok(Report {
            schema_version: SCHEMA_VERSION,
            config_hash: config_hash(&config)?,
            command: command.to_string(),
            config,
            result,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), contents)?;
    Ok(())
}

/// Schema version stamped in a CSV or JSON output.
pub fn schema_version_of(text: &str) -> Result<u32> {
    if let Some(rest) = text.strip_prefix(CSV_MARK) {
        let v = rest.split_whitespace().next().unwrap_or("");
        return v
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad schema version {v:?}")));
    }
    let value: serde_json::Value = serde_json::from_str(text)?;
    value
        .get("schema_version")
        .and_then(|v| v.as_u64())
        .map(|v| v as u32)
        .ok_or_else(|| Error::InvalidArgument("no schema_version field".into()))
}

/// Byte equality of two outputs, refusing outputs written under different
/// schema versions.
pub fn compare_outputs(a: &str, b: &str) -> Result<bool> {
    let (va, vb) = (schema_version_of(a)?, schema_version_of(b)?);
    if va != vb {
        return Err(Error::SchemaMismatch {
            found: vb,
            expected: va,
        });
    }
    Ok(a == b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_header_and_rows() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["1".into(), fmt_f64(0.1)]);
        let text = t.render("abc");
        assert_eq!(text, "# dfpp schema_version=1 config_hash=abc\na,b\n1,0.1\n");
        assert_eq!(schema_version_of(&text).unwrap(), 1);
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = config_hash(&("x", 1)).unwrap();
        assert_eq!(a, config_hash(&("x", 1)).unwrap());
        assert_ne!(a, config_hash(&("x", 2)).unwrap());
        assert_eq!(a.len(), 16);
    }

    #[test]
    fn float_text_round_trips() {
        for v in [0.1, 1.0 / 3.0, 1e-300, 12345.678] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_opt(None), "");
    }

    #[test]
    fn mismatched_schemas_are_refused() {
        let r = Report::new("x", 1, 2).unwrap().to_json().unwrap();
        assert_eq!(schema_version_of(&r).unwrap(), SCHEMA_VERSION);
        assert!(compare_outputs(&r, &r).unwrap());
        let old = r.replace("\"schema_version\": 1", "\"schema_version\": 0");
        assert_eq!(
            compare_outputs(&r, &old),
            Err(Error::SchemaMismatch { found: 0, expected: 1 })
        );
        let csv = Table::new(&["a"]).render("h");
        assert!(!compare_outputs(&csv, &csv.replace("=h", "=g")).unwrap());
    }
}
