//! CSV, JSON and gnuplot writers.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

/// Version of the summary.json layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Rows kept in a CSV before decimation kicks in.
pub const MAX_ROWS: usize = 8192;

/// Numeric table whose first column is the abscissa.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Self {
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    /// Keeps every k-th row so at most `max` remain, always including the last.
    pub fn decimated(mut self, max: usize) -> Self {
        let n = self.rows.len();
        if n <= max || max < 2 {
            return self;
        }
        let stride = n.div_ceil(max - 1);
        let last = self.rows[n - 1].clone();
        self.rows = self.rows.into_iter().step_by(stride).collect();
        if self.rows.last() != Some(&last) {
            self.rows.push(last);
        }
        self
    }

    fn check(&self, name: &str) -> Result<(), CliError> {
        for (i, row) in self.rows.iter().enumerate() {
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(CliError::Output(format!("{name}: row {i} has non-finite value {v}")));
            }
        }
        if self.rows.windows(2).any(|w| w[1][0] <= w[0][0]) {
            return Err(CliError::Output(format!("{name}: abscissa is not strictly increasing")));
        }
        Ok(())
    }
}

/// Output directory plus the list of files written so far.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn files(&self) -> &[String] {
        &self.written
    }

    fn record(&mut self, name: &str) {
        if !self.written.iter().any(|f| f == name) {
            self.written.push(name.to_string());
        }
    }

    pub fn csv(&mut self, name: &str, table: &Table) -> Result<(), CliError> {
        table.check(name)?;
        let path = self.root.join(name);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(&table.headers)?;
        for row in &table.rows {
            w.write_record(row.iter().map(|v| format!("{v:e}")))?;
        }
        w.flush().map_err(|e| CliError::io(&path, e))?;
        self.record(name);
        Ok(())
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let path = self.root.join(name);
        fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
        self.record(name);
        Ok(())
    }

    /// Writes `summary` with the `files` array appended; summary.json lists itself.
    pub fn summary<T: Serialize>(&mut self, summary: &T) -> Result<(), CliError> {
        let name = "summary.json";
        self.record(name);
        let mut value = serde_json::to_value(summary).map_err(|e| CliError::Output(e.to_string()))?;
        let obj = value
            .as_object_mut()
            .ok_or_else(|| CliError::Output("summary must be a JSON object".into()))?;
        obj.insert("files".into(), self.written.clone().into());
        let text = serde_json::to_string_pretty(&value).map_err(|e| CliError::Output(e.to_string()))?;
        self.text(name, &(text + "\n"))
    }
}

/// gnuplot script drawing `series` (file, x column, y column, title) on one
/// panel per entry of `panels`.
pub struct Plot {
    pub output: String,
    pub panels: Vec<Panel>,
}

pub struct Panel {
    pub xlabel: String,
    pub ylabel: String,
    pub logscale_y: bool,
    pub series: Vec<(String, usize, usize, String)>,
}

impl Plot {
    pub fn script(&self) -> String {
        let mut s = String::new();
        s.push_str("# gnuplot script; run with: gnuplot plot.gp\n");
        s.push_str("set datafile separator ','\n");
        s.push_str(&format!(
            "set terminal pngcairo size 900,{}\n",
            400 * self.panels.len().max(1)
        ));
        s.push_str(&format!("set output '{}'\n", self.output));
        s.push_str(&format!("set multiplot layout {},1\n", self.panels.len().max(1)));
        s.push_str("set grid\n");
        for p in &self.panels {
            s.push_str(&format!("set xlabel '{}'\nset ylabel '{}'\n", p.xlabel, p.ylabel));
            s.push_str(if p.logscale_y { "set logscale y\n" } else { "unset logscale y\n" });
            let parts: Vec<String> = p
                .series
                .iter()
                .map(|(file, x, y, title)| format!("'{file}' using {x}:{y} with lines title '{title}'"))
                .collect();
            s.push_str(&format!("plot {}\n", parts.join(", \\\n     ")));
        }
        s.push_str("unset multiplot\n");
        s
    }
}
