//! Stable CSV/JSON report emission.
//!
//! Every curve family shares one schema so downstream plotting stays
//! uniform: `method,spec_kind,spec_param,n,x,value`, preceded by `#`
//! metadata lines (tool version, seed, grids) sufficient to reproduce the
//! run. Float fields use the shortest round-trip decimal form, so files are
//! byte-stable across runs and thread counts.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Shortest round-trip decimal representation.
pub fn format_float(v: f64) -> String {
    format!("{v}")
}

/// `#`-prefixed key=value header emitted before the column row.
#[derive(Debug, Clone, Default)]
pub struct MetaHeader {
    entries: Vec<(String, String)>,
}

impl MetaHeader {
    pub fn new(family: &str) -> Self {
        let mut m = Self::default();
        m.push("tool", format!("propeval {TOOL_VERSION}"));
        m.push("family", family);
        m
    }

    pub fn push(&mut self, key: &str, value: impl Into<String>) -> &mut Self {
        self.entries.push((key.to_owned(), value.into()));
        self
    }

    pub fn with(mut self, key: &str, value: impl Into<String>) -> Self {
        self.push(key, value);
        self
    }

    fn render(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("# {k}={v}\n"))
            .collect()
    }
}

/// One row of the shared curve schema. `spec_kind`/`spec_param` are empty
/// for families without a perturbation axis; `n` is empty where no count
/// applies.
#[derive(Debug, Clone)]
pub struct CurveRow {
    pub method: String,
    pub spec_kind: String,
    pub spec_param: String,
    pub n: Option<usize>,
    pub x: f64,
    pub value: f64,
}

impl CurveRow {
    fn render(&self) -> String {
        format!(
            "{},{},{},{},{},{}\n",
            self.method,
            self.spec_kind,
            self.spec_param,
            self.n.map(|n| n.to_string()).unwrap_or_default(),
            format_float(self.x),
            format_float(self.value),
        )
    }
}

/// Render a full curve-family CSV as a string.
pub fn render_curve_csv(meta: &MetaHeader, rows: &[CurveRow]) -> String {
    let mut out = meta.render();
    out.push_str("method,spec_kind,spec_param,n,x,value\n");
    for row in rows {
        out.push_str(&row.render());
    }
    out
}

/// Write a curve-family CSV to disk.
pub fn write_curve_csv(path: &Path, meta: &MetaHeader, rows: &[CurveRow]) -> Result<()> {
    write_text(path, &render_curve_csv(meta, rows))
}

/// Render the per-class AP report with its trailing mAP line.
pub fn render_ap_csv(meta: &MetaHeader, per_class: &[(String, f64)], map: f64) -> String {
    let mut out = meta.render();
    out.push_str("class,ap\n");
    for (class, ap) in per_class {
        out.push_str(&format!("{class},{}\n", format_float(*ap)));
    }
    out.push_str(&format!("mAP,{}\n", format_float(map)));
    out
}

/// Render per-class precision/recall curves.
pub fn render_pr_csv(meta: &MetaHeader, curves: &[(String, Vec<f64>, Vec<f64>)]) -> String {
    let mut out = meta.render();
    out.push_str("class,recall,precision\n");
    for (class, recall, precision) in curves {
        for (r, p) in recall.iter().zip(precision) {
            out.push_str(&format!(
                "{class},{},{}\n",
                format_float(*r),
                format_float(*p)
            ));
        }
    }
    out
}

pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|source| Error::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    let mut f = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    f.write_all(contents.as_bytes())
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_and_header_layout() {
        let meta = MetaHeader::new("recall_curves").with("seed", "7");
        let rows = vec![
            CurveRow {
                method: "gaussian".into(),
                spec_kind: String::new(),
                spec_param: String::new(),
                n: Some(1000),
                x: 0.5,
                value: 0.8125,
            },
            CurveRow {
                method: "sliding_window".into(),
                spec_kind: "blur".into(),
                spec_param: "0.5".into(),
                n: None,
                x: 1.0,
                value: 1.0,
            },
        ];
        let text = render_curve_csv(&meta, &rows);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], format!("# tool=propeval {TOOL_VERSION}"));
        assert_eq!(lines[1], "# family=recall_curves");
        assert_eq!(lines[2], "# seed=7");
        assert_eq!(lines[3], "method,spec_kind,spec_param,n,x,value");
        assert_eq!(lines[4], "gaussian,,,1000,0.5,0.8125");
        assert_eq!(lines[5], "sliding_window,blur,0.5,,1,1");
    }

    #[test]
    fn ap_csv_layout() {
        let meta = MetaHeader::new("detection_ap");
        let text = render_ap_csv(&meta, &[("cat".into(), 0.5)], 0.5);
        assert!(text.ends_with("class,ap\ncat,0.5\nmAP,0.5\n"));
    }

    #[test]
    fn float_formatting_is_shortest_round_trip() {
        assert_eq!(format_float(0.1), "0.1");
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(1.0 / 3.0), "0.3333333333333333");
    }
}
