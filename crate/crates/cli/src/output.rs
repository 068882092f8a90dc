//! Result documents: pretty JSON, or CSV with 17 significant digits.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::{CliError, Format};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Index(usize),
    Number(f64),
}

impl Cell {
    fn csv(&self) -> String {
        match *self {
            Cell::Index(i) => i.to_string(),
            Cell::Number(v) if v.is_finite() => format!("{v:.16e}"),
            Cell::Number(v) => v.to_string(),
        }
    }

    fn json(&self) -> Value {
        match *self {
            Cell::Index(i) => Value::from(i),
            Cell::Number(v) => Value::from(v),
        }
    }
}

pub struct Sink {
    out: Option<PathBuf>,
    format: Option<Format>,
}

impl Sink {
    pub fn new(out: Option<PathBuf>, format: Option<Format>) -> Self {
        Self { out, format }
    }

    pub fn json(&self, value: &Value) -> Result<(), CliError> {
        if self.format == Some(Format::Csv) {
            return Err(CliError::Usage("this command only produces JSON".into()));
        }
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Input(e.to_string()))?;
        text.push('\n');
        self.write(&text)
    }

    pub fn table(&self, header: &[&str], rows: &[Vec<Cell>]) -> Result<(), CliError> {
        if self.format == Some(Format::Json) {
            let docs: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> =
                        header.iter().zip(row).map(|(k, c)| (k.to_string(), c.json())).collect();
                    Value::Object(obj)
                })
                .collect();
            return self.json(&Value::Array(docs));
        }
        let mut text = header.join(",");
        text.push('\n');
        for row in rows {
            text.push_str(&row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
            text.push('\n');
        }
        self.write(&text)
    }

    fn write(&self, text: &str) -> Result<(), CliError> {
        let result = match &self.out {
            Some(path) => std::fs::write(path, text),
            None => std::io::stdout().lock().write_all(text.as_bytes()),
        };
        result.map_err(|e| CliError::Input(format!("cannot write output: {e}")))
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_cells() {
        assert_eq!(Cell::Number(0.1).csv(), "1.0000000000000001e-1");
        assert_eq!(Cell::Number(0.5).csv(), "5.0000000000000000e-1");
        assert_eq!(Cell::Index(7).csv(), "7");
        assert_eq!(Cell::Number(f64::INFINITY).csv(), "inf");
    }
}
