use clap::ValueEnum;
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// Rows with fixed column headers.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Table {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    /// The rows as JSON objects keyed by header.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    Value::Object(
                        self.headers
                            .iter()
                            .zip(row)
                            .map(|(h, v)| (h.clone(), Value::String(v.clone())))
                            .collect(),
                    )
                })
                .collect(),
        )
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| CliError::Input(format!("csv output: {e}"));
        w.write_record(&self.headers).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row).map_err(csv_err)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::Input(format!("csv output: {e}")))?;
        String::from_utf8(bytes).map_err(|e| CliError::Input(e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| -> String {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, &w)| format!("{c:>w$}"))
                .collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        let mut s = line(&self.headers);
        for row in &self.rows {
            s.push_str(&line(row));
        }
        s
    }
}

/// The output of one command.
#[derive(Debug, Clone)]
pub struct Report {
    pub json: Value,
    pub table: Option<Table>,
    pub default_format: Format,
    /// A verification check recorded failures.
    pub failed: bool,
}

impl Report {
    pub fn json(json: Value) -> Self {
        Report {
            json,
            table: None,
            default_format: Format::Json,
            failed: false,
        }
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match (format, &self.table) {
            (Format::Json, _) => {
                let mut s = serde_json::to_string_pretty(&self.json)
                    .map_err(|e| CliError::Input(format!("json output: {e}")))?;
                s.push('\n');
                Ok(s)
            }
            (Format::Csv, Some(t)) => t.to_csv(),
            (Format::Table, Some(t)) => Ok(t.to_text()),
            (_, None) => Err(CliError::Input(
                "csv and table output are available for gamma, boxcount and sweep only".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["n", "D"]);
        t.push(vec!["1".into(), "0,1".into()]);
        t.push(vec!["10".into(), "2".into()]);
        t
    }

    #[test]
    fn csv_quotes_commas() {
        assert_eq!(sample().to_csv().unwrap(), "n,D\n1,\"0,1\"\n10,2\n");
    }

    #[test]
    fn text_is_right_aligned() {
        assert_eq!(sample().to_text(), " n    D\n 1  0,1\n10    2\n");
    }

    #[test]
    fn json_rows_are_keyed() {
        let v = sample().to_json();
        assert_eq!(v[1]["n"], "10");
    }
}
