//! CSV ingestion and emission.
//!
//! Files are UTF-8, comma separated, with a mandatory header row. Values are
//! written in Rust's shortest round-trip form, so reading back an emitted
//! file reproduces every value bit for bit.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::Result;
use crate::types::{validate_dataset, Column, ColumnKind, Dataset, RawTable, ValidateOptions};

/// Parses CSV text into an unvalidated table. Rows may be ragged; validation
/// reports that.
pub fn read_raw(reader: impl Read) -> Result<RawTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for record in rdr.records() {
        rows.push(record?.iter().map(str::to_string).collect());
    }
    Ok(RawTable { headers, rows })
}

pub fn read_dataset(reader: impl Read, opts: &ValidateOptions) -> Result<Dataset> {
    validate_dataset(&read_raw(reader)?, opts)
}

pub fn read_dataset_path(path: &Path, opts: &ValidateOptions) -> Result<Dataset> {
    read_dataset(std::fs::File::open(path)?, opts)
}

fn cell(col: &Column, row: usize) -> String {
    let v = col.values()[row];
    match col.kind() {
        ColumnKind::Discrete { .. } => format!("{}", v as u64),
        ColumnKind::Continuous => format!("{v}"),
    }
}

/// Writes features in order followed by the target.
pub fn write_dataset(data: &Dataset, writer: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let cols: Vec<&Column> = data
        .features()
        .iter()
        .chain(std::iter::once(data.target()))
        .collect();
    w.write_record(cols.iter().map(|c| c.name()))?;
    for r in 0..data.n_samples() {
        w.write_record(cols.iter().map(|c| cell(c, r)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_dataset_path(data: &Dataset, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_dataset(data, std::io::BufWriter::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn missing_cell_is_ragged() {
        let text = "a,b,target\n1,0,1\n0,,1\n";
        let err = read_dataset(text.as_bytes(), &ValidateOptions::default()).unwrap_err();
        assert!(err.to_string().starts_with("ragged column"), "{err}");
    }

    #[test]
    fn short_row_is_ragged() {
        let text = "a,b,target\n1,0,1\n0,1\n";
        let err = read_dataset(text.as_bytes(), &ValidateOptions::default()).unwrap_err();
        assert!(matches!(err, Error::RaggedColumn { .. }), "{err}");
    }

    #[test]
    fn round_trip_preserves_values() {
        let data = Dataset::new(
            vec![
                Column::continuous("x", vec![0.1, -2.5e-7, 1.0 / 3.0]),
                Column::from_codes("k", vec![0, 3, 1]),
            ],
            Column::from_codes("target", vec![1, 0, 1]),
        )
        .unwrap();
        let mut buf = Vec::new();
        write_dataset(&data, &mut buf).unwrap();
        let back = read_dataset(buf.as_slice(), &ValidateOptions::default()).unwrap();
        assert_eq!(back.feature(0).values(), data.feature(0).values());
        assert_eq!(back.feature(1).values(), data.feature(1).values());
        let mut again = Vec::new();
        write_dataset(&back, &mut again).unwrap();
        assert_eq!(buf, again);
    }
}
