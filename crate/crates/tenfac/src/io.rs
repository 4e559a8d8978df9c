//! File formats: the binary TSR1 tensor-series container plus CSV forms for
//! series and matrices.
//!
//! TSR1 layout: one ASCII header line `TSR1 K p_1 ... p_K T` terminated by a
//! newline, followed by `T * prod(p_k)` little-endian `f64` values,
//! column-major within each slice, slices in time order. The binary body
//! round-trips bit-exactly.
//!
//! The CSV series form has one row per time slice with the slice's values in
//! column-major order and no header; the shape must be supplied when reading.
//! Floats are written in shortest round-trip form, so CSV files re-parse to
//! the same bits.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor::{DenseTensor, Matrix, TensorSeries};

const MAGIC: &str = "TSR1";

/// Writes a tensor series in TSR1 format.
pub fn write_series_tsr1(path: impl AsRef<Path>, series: &TensorSeries) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let dims = series
        .shape()
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ");
    writeln!(w, "{MAGIC} {} {} {}", series.order(), dims, series.len())?;
    for t in 0..series.len() {
        for v in series.slice(t).data() {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a tensor series in TSR1 format.
pub fn read_series_tsr1(path: impl AsRef<Path>) -> Result<TensorSeries> {
    let mut r = BufReader::new(File::open(path)?);
    let mut header = String::new();
    r.read_line(&mut header)?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.first() != Some(&MAGIC) {
        return Err(Error::Parse("missing TSR1 magic".into()));
    }
    if fields.len() < 3 {
        return Err(Error::Parse("truncated TSR1 header".into()));
    }
    let k: usize = fields[1]
        .parse()
        .map_err(|_| Error::Parse("bad mode count in header".into()))?;
    if fields.len() != k + 3 {
        return Err(Error::Parse(format!(
            "header should have {} fields, found {}",
            k + 3,
            fields.len()
        )));
    }
    let shape: Vec<usize> = fields[2..2 + k]
        .iter()
        .map(|f| {
            f.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad dimension '{f}' in header")))
        })
        .collect::<Result<_>>()?;
    let t_len: usize = fields[2 + k]
        .parse()
        .map_err(|_| Error::Parse("bad length in header".into()))?;
    if shape.contains(&0) || t_len == 0 {
        return Err(Error::Parse("header dimensions must be positive".into()));
    }

    let slice_len: usize = shape.iter().product();
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    let expected = t_len * slice_len * 8;
    if body.len() != expected {
        return Err(Error::Parse(format!(
            "body has {} bytes, expected {expected}",
            body.len()
        )));
    }
    let mut slices = Vec::with_capacity(t_len);
    for t in 0..t_len {
        let mut data = Vec::with_capacity(slice_len);
        for i in 0..slice_len {
            let off = (t * slice_len + i) * 8;
            let bytes: [u8; 8] = body[off..off + 8].try_into().unwrap();
            data.push(f64::from_le_bytes(bytes));
        }
        slices.push(DenseTensor::new(shape.clone(), data)?);
    }
    TensorSeries::new(slices)
}

/// Writes a tensor series as CSV: one row per slice, values column-major,
/// no header.
pub fn write_series_csv(path: impl AsRef<Path>, series: &TensorSeries) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for t in 0..series.len() {
        let row = series
            .slice(t)
            .data()
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",");
        writeln!(w, "{row}")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a CSV tensor series; the slice shape must be supplied.
pub fn read_series_csv(path: impl AsRef<Path>, shape: &[usize]) -> Result<TensorSeries> {
    let slice_len: usize = shape.iter().product();
    let r = BufReader::new(File::open(path)?);
    let mut slices = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let data: Vec<f64> = line
            .split(',')
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad float '{f}' on line {}", lineno + 1)))
            })
            .collect::<Result<_>>()?;
        if data.len() != slice_len {
            return Err(Error::Parse(format!(
                "line {} has {} values, expected {}",
                lineno + 1,
                data.len(),
                slice_len
            )));
        }
        slices.push(DenseTensor::new(shape.to_vec(), data)?);
    }
    TensorSeries::new(slices)
}

/// Writes a matrix as a CSV grid (one line per matrix row).
pub fn write_matrix_csv(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for i in 0..m.nrows() {
        let row = (0..m.ncols())
            .map(|j| m[(i, j)].to_string())
            .collect::<Vec<_>>()
            .join(",");
        writeln!(w, "{row}")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a CSV matrix grid.
pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<Matrix> {
    let r = BufReader::new(File::open(path)?);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad float '{f}' on line {}", lineno + 1)))
            })
            .collect::<Result<_>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Parse(format!(
                    "line {} has {} values, expected {}",
                    lineno + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("matrix file is empty".into()));
    }
    let nrows = rows.len();
    let ncols = rows[0].len();
    Ok(Matrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}
