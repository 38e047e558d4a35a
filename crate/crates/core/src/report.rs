//! Tabular result files: a header of resolved configuration, named columns,
//! string rows, and optional footer lines, rendered as CSV or JSON lines.
//!
//! All values are preformatted strings (rationals as "p/q"), so rendering is
//! byte-deterministic. Files are written atomically: a sibling temp file is
//! renamed over the target.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Format, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "jsonl" => Ok(Format::Jsonl),
            other => Err(format!("unknown format `{other}` (expected csv or jsonl)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    columns: Vec<String>,
    meta: Vec<(String, String)>,
    rows: Vec<Vec<String>>,
    footer: Vec<String>,
}

impl Report {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Report {
        Report { columns: columns.into_iter().map(Into::into).collect(), ..Report::default() }
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl fmt::Display) -> &mut Report {
        self.meta.push((key.into(), value.to_string()));
        self
    }

    pub fn row<S: Into<String>>(&mut self, cells: impl IntoIterator<Item = S>) -> &mut Report {
        let cells: Vec<String> = cells.into_iter().map(Into::into).collect();
        assert_eq!(cells.len(), self.columns.len(), "row width != column count");
        self.rows.push(cells);
        self
    }

    pub fn footer(&mut self, line: impl Into<String>) -> &mut Report {
        self.footer.push(line.into());
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.render_csv(),
            Format::Jsonl => self.render_jsonl(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(|c| csv_cell(c)).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        for line in &self.footer {
            out.push_str(&format!("# {line}\n"));
        }
        out
    }

    fn render_jsonl(&self) -> String {
        // assembled by hand to keep column order; values are JSON strings
        let mut out = String::new();
        if !self.meta.is_empty() {
            let fields: Vec<String> = self
                .meta
                .iter()
                .map(|(k, v)| format!("{}:{}", json_str(k), json_str(v)))
                .collect();
            out.push_str(&format!("{{\"meta\":{{{}}}}}\n", fields.join(",")));
        }
        for row in &self.rows {
            let fields: Vec<String> = self
                .columns
                .iter()
                .zip(row)
                .map(|(c, v)| format!("{}:{}", json_str(c), json_str(v)))
                .collect();
            out.push_str(&format!("{{{}}}\n", fields.join(",")));
        }
        for line in &self.footer {
            out.push_str(&format!("{{\"note\":{}}}\n", json_str(line)));
        }
        out
    }

    /// Writes via a sibling temp file and rename, so readers never observe a
    /// partial file.
    pub fn write_atomic(&self, path: &Path, format: Format) -> Result<()> {
        write_atomic(path, self.render(format).as_bytes())
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn csv_cell(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}
