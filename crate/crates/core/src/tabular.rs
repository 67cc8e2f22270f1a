//! Header-addressed CSV reading shared by the tabular inputs.

use std::io::Read;

use crate::error::SchemaError;

/// CSV rows addressed by column name; header lookup ignores case and
/// surrounding whitespace.
pub struct CsvInput {
    file: String,
    headers: Vec<String>,
    rows: Vec<csv::StringRecord>,
}

impl CsvInput {
    pub fn read<R: Read>(file: &str, r: R) -> Result<Self, SchemaError> {
        let csv_err = |source| SchemaError::Csv { file: file.to_string(), source };
        let mut rdr = csv::ReaderBuilder::new().flexible(false).from_reader(r);
        let headers = rdr.headers().map_err(csv_err)?.iter().map(|h| h.trim().to_string()).collect();
        let rows = rdr.records().collect::<Result<Vec<_>, _>>().map_err(csv_err)?;
        Ok(CsvInput { file: file.to_string(), headers, rows })
    }

    pub fn open(path: &std::path::Path) -> Result<Self, SchemaError> {
        let file = path.display().to_string();
        let f = std::fs::File::open(path).map_err(|source| SchemaError::Io { file: file.clone(), source })?;
        Self::read(&file, std::io::BufReader::new(f))
    }

    pub fn file(&self) -> &str {
        &self.file
    }

    pub fn column(&self, name: &str) -> Result<usize, SchemaError> {
        self.headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| SchemaError::MissingColumn { file: self.file.clone(), column: name.to_string() })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows with their 1-based line numbers (the header is line 1).
    pub fn rows(&self) -> impl Iterator<Item = (u64, &csv::StringRecord)> {
        self.rows.iter().enumerate().map(|(i, r)| (i as u64 + 2, r))
    }

    pub fn bad_row(&self, line: u64, message: impl Into<String>) -> SchemaError {
        SchemaError::BadRow { file: self.file.clone(), line, message: message.into() }
    }
}
