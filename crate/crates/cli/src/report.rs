use std::fmt::Write as _;

use clap::ValueEnum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Records,
}

/// Tabular command output.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new(columns: &[&str]) -> Self {
        Report { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Csv => {
                writeln!(out, "{}", self.columns.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(",")).unwrap();
                for r in &self.rows {
                    writeln!(out, "{}", r.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(",")).unwrap();
                }
            }
            Format::Records => {
                for r in &self.rows {
                    let fields: Vec<String> =
                        self.columns.iter().zip(r).map(|(c, v)| format!("{c}={}", record_field(v))).collect();
                    writeln!(out, "{}", fields.join(" ")).unwrap();
                }
            }
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn record_field(s: &str) -> String {
    if s.contains(char::is_whitespace) {
        format!("\"{s}\"")
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_formats() {
        let mut r = Report::new(&["a", "b"]);
        r.push(vec!["1/2".into(), "x, y".into()]);
        assert_eq!(r.render(Format::Csv), "a,b\n1/2,\"x, y\"\n");
        assert_eq!(r.render(Format::Records), "a=1/2 b=\"x, y\"\n");
    }
}
