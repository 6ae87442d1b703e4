//! Result tables, CSV files with `#` metadata lines, and gnuplot scripts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Git revision baked in at build time, or `unknown`.
pub const GIT_REVISION: &str = match option_env!("THZMEC_GIT_REVISION") {
    Some(r) => r,
    None => "unknown",
};

/// One plotted curve: a y column and an optional error-bar column.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub title: String,
    pub y: usize,
    pub err: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlotSpec {
    pub xlabel: String,
    pub ylabel: String,
    pub series: Vec<Series>,
    pub log_y: bool,
}

/// A numeric table; column 0 is the x axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File stem.
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Written as `# key: value` lines above the header.
    pub meta: Vec<(String, String)>,
    pub plot: PlotSpec,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: Vec<String>) -> Self {
        Table {
            name: name.into(),
            columns,
            rows: Vec::new(),
            meta: Vec::new(),
            plot: PlotSpec::default(),
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Plots every value column with its `std_<name>` sibling as error
    /// bars; `std_*` and `infeasible_rate*` columns are not plotted.
    pub fn auto_plot(&mut self, xlabel: &str, ylabel: &str) {
        let mut series = Vec::new();
        for (i, c) in self.columns.iter().enumerate().skip(1) {
            if c.starts_with("std_") || c.starts_with("infeasible_rate") {
                continue;
            }
            series.push(Series {
                title: c.clone(),
                y: i,
                err: self.column(&format!("std_{c}")),
            });
        }
        self.plot = PlotSpec {
            xlabel: xlabel.into(),
            ylabel: ylabel.into(),
            series,
            log_y: false,
        };
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}: {v}");
        }
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format_value(*v))).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        out.push_str(&String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))?);
        Ok(out)
    }

    pub fn to_gnuplot(&self) -> String {
        let csv = format!("{}.csv", self.name);
        let mut s = String::new();
        let _ = writeln!(s, "set datafile separator ','");
        let _ = writeln!(s, "set datafile commentschars '#'");
        let _ = writeln!(s, "set terminal pngcairo size 900,600");
        let _ = writeln!(s, "set output '{}.png'", self.name);
        let _ = writeln!(s, "set xlabel '{}'", self.plot.xlabel);
        let _ = writeln!(s, "set ylabel '{}'", self.plot.ylabel);
        // the header row is consumed as column titles
        let _ = writeln!(s, "set key outside right autotitle columnhead");
        let _ = writeln!(s, "set grid");
        if self.plot.log_y {
            let _ = writeln!(s, "set logscale y");
        }
        let fallback: Vec<Series> = (1..self.columns.len())
            .map(|y| Series {
                title: self.columns[y].clone(),
                y,
                err: None,
            })
            .collect();
        let series = if self.plot.series.is_empty() { &fallback } else { &self.plot.series };
        let parts: Vec<String> = series
            .iter()
            .map(|sr| match sr.err {
                Some(e) => format!(
                    "'{csv}' using 1:{}:{} with yerrorlines title '{}'",
                    sr.y + 1,
                    e + 1,
                    sr.title
                ),
                None => format!("'{csv}' using 1:{} with linespoints title '{}'", sr.y + 1, sr.title),
            })
            .collect();
        if parts.is_empty() {
            let _ = writeln!(s, "# no series");
        } else {
            let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
        }
        s
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Shortest round-trip decimal form; `nan` for missing values.
fn format_value(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v}")
    }
}

/// Writes `<name>.csv` and `<name>.gp` into `dir`, returning both paths.
pub fn emit_outputs(table: &Table, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{}.csv", table.name));
    let gp_path = dir.join(format!("{}.gp", table.name));
    fs::write(&csv_path, table.to_csv()?)?;
    fs::write(&gp_path, table.to_gnuplot())?;
    Ok((csv_path, gp_path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_is_header_only() {
        let t = Table::new("t", vec!["users".into(), "energy_noma_J".into()]);
        assert_eq!(t.to_csv().unwrap(), "users,energy_noma_J\n");
    }

    #[test]
    fn metadata_precedes_header() {
        let mut t = Table::new("t", vec!["x".into(), "y_J".into(), "std_y_J".into()]);
        t.meta.push(("seed".into(), "1".into()));
        t.push_row(vec![1.0, 0.5, f64::NAN]);
        assert_eq!(t.to_csv().unwrap(), "# seed: 1\nx,y_J,std_y_J\n1,0.5,nan\n");
        t.auto_plot("x", "y");
        assert_eq!(t.plot.series.len(), 1);
        assert_eq!(t.plot.series[0].err, Some(2));
        assert!(t.to_gnuplot().contains("using 1:2:3 with yerrorlines"));
    }

    #[test]
    fn files_are_written() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Table::new("demo", vec!["x".into(), "y".into()]);
        t.push_row(vec![1.0, 2.0]);
        let (c, g) = emit_outputs(&t, dir.path()).unwrap();
        assert!(fs::read_to_string(c).unwrap().ends_with("1,2\n"));
        assert!(fs::read_to_string(g).unwrap().contains("'demo.csv'"));
    }
}
