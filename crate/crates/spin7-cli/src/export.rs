//! Deterministic CSV/JSON writers. Floats go through Rust's shortest
//! round-trip formatting, so identical data means byte-identical files.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// One cell: a number or a tag string (events); None renders empty/null.
#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Cell {
        Cell::Num(v)
    }
}

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Table {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "schema mismatch");
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path, format: Format) -> io::Result<()> {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir)?;
            }
        }
        let mut out = io::BufWriter::new(fs::File::create(path)?);
        match format {
            Format::Csv => self.write_csv(&mut out),
            Format::Json => self.write_json(&mut out),
        }
    }

    fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let mut first = true;
            for cell in row {
                if !first {
                    write!(out, ",")?;
                }
                first = false;
                match cell {
                    Cell::Num(v) => write!(out, "{}", fmt_f64(*v))?,
                    Cell::Text(s) => write!(out, "{s}")?,
                    Cell::Empty => {}
                }
            }
            writeln!(out)?;
        }
        Ok(())
    }

    fn write_json<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "{{")?;
        write!(out, "  \"columns\": [")?;
        for (i, c) in self.columns.iter().enumerate() {
            if i > 0 {
                write!(out, ", ")?;
            }
            write!(out, "\"{c}\"")?;
        }
        writeln!(out, "],")?;
        writeln!(out, "  \"rows\": [")?;
        for (ri, row) in self.rows.iter().enumerate() {
            write!(out, "    [")?;
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    write!(out, ", ")?;
                }
                match cell {
                    Cell::Num(v) => write!(out, "{}", json_f64(*v))?,
                    Cell::Text(s) => write!(out, "\"{s}\"")?,
                    Cell::Empty => write!(out, "null")?,
                }
            }
            if ri + 1 < self.rows.len() {
                writeln!(out, "],")?;
            } else {
                writeln!(out, "]")?;
            }
        }
        writeln!(out, "  ]")?;
        writeln!(out, "}}")?;
        Ok(())
    }
}

/// Shortest round-trip decimal; deterministic for identical inputs.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        // normalize -0 so reruns cannot differ through sign-of-zero noise
        return "0".to_string();
    }
    format!("{v}")
}

fn json_f64(v: f64) -> String {
    if !v.is_finite() {
        return "null".to_string();
    }
    fmt_f64(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rows_match_schema_width() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec![Cell::Num(1.5), Cell::Text("x".into())]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n1.5,x\n");
    }

    #[test]
    fn negative_zero_is_normalized() {
        assert_eq!(fmt_f64(-0.0), "0");
    }
}
