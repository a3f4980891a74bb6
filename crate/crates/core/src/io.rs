//! Point clouds as CSV: one point per row, one coordinate per column.

use std::io::{Read, Write};

use crate::error::{Error, Result};

pub fn read_points<R: Read>(reader: R, has_header: bool) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .trim(csv::Trim::All)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut out = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let p = rec
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("row {}: {s:?} is not a number", row + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        out.push(p);
    }
    Ok(out)
}

pub fn read_points_file(path: &std::path::Path, has_header: bool) -> Result<Vec<Vec<f64>>> {
    read_points(std::fs::File::open(path)?, has_header)
}

/// Writes coordinates with shortest round-trip formatting.
pub fn write_points<W: Write>(writer: W, points: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    for p in points {
        w.write_record(p.iter().map(|x| x.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
