//! Output plumbing: file-or-stdout writing, CSV assembly with comment
//! headers, and JSON serialization. All float formatting goes through
//! Rust's shortest-roundtrip Display, so identical inputs produce
//! byte-identical files.

use std::io::Write;
use std::path::Path;

pub fn write_out(path: Option<&Path>, content: &str) -> Result<(), String> {
    match path {
        Some(p) => {
            std::fs::write(p, content).map_err(|e| format!("cannot write {}: {e}", p.display()))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| format!("cannot write stdout: {e}"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

/// CSV cell: numbers via shortest-roundtrip, absent values empty.
pub fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub struct Csv {
    buf: String,
}

impl Csv {
    /// Comment lines (seed, fit summaries) go above the header for audit.
    pub fn new(comments: &[String], header: &[&str]) -> Self {
        let mut buf = String::new();
        for c in comments {
            buf.push_str("# ");
            buf.push_str(c);
            buf.push('\n');
        }
        buf.push_str(&header.join(","));
        buf.push('\n');
        Csv { buf }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.buf.push_str(&cells.join(","));
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

pub fn to_json<T: serde::Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| format!("serialization failed: {e}"))
}
