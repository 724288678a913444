use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Pretty,
}

/// Formats a number with 12 significant digits, `.` as decimal separator.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-5..12).contains(&mag) {
        return format!("{x:.11e}");
    }
    let decimals = (11 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, num)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: Vec<&'static str>) -> Self {
        Self {
            headers,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()
    }

    fn write_pretty<W: Write>(&self, mut out: W) -> io::Result<()> {
        let widths: Vec<usize> = (0..self.headers.len())
            .map(|c| {
                self.rows
                    .iter()
                    .map(|r| r[c].len())
                    .chain(std::iter::once(self.headers[c].len()))
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cells: Vec<&str>| -> String {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        writeln!(out, "{}", line(self.headers.clone()))?;
        for row in &self.rows {
            writeln!(out, "{}", line(row.iter().map(String::as_str).collect()))?;
        }
        Ok(())
    }

    pub fn write_to<W: Write>(&self, format: Format, out: W) -> io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Pretty => self.write_pretty(out),
        }
    }

    /// Writes to `path`, or stdout when it is `None`.
    pub fn emit(&self, format: Format, path: Option<&Path>) -> io::Result<()> {
        match path {
            Some(p) => self.write_to(format, io::BufWriter::new(File::create(p)?)),
            None => self.write_to(format, io::stdout().lock()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(num(0.278071905112638), "0.278071905113");
        assert_eq!(num(1.0), "1");
        assert_eq!(num(0.0), "0");
        assert_eq!(num(-0.5), "-0.5");
        assert_eq!(num(123.456), "123.456");
        assert_eq!(num(3.2e-7), "3.20000000000e-7");
        assert_eq!(num(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn csv_uses_newlines() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec!["1".into(), "x,y".into()]);
        let mut buf = Vec::new();
        t.write_to(Format::Csv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n1,\"x,y\"\n");
    }
}
