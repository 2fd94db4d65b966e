// SPDX-License-Identifier: Apache-2.0

//! Delimited-text matrices and group-label files.
//!
//! Matrices are comma- or tab-separated (detected from the first line) with
//! an optional header row and an optional row-id first column. Both are
//! detected from whether the fields parse as numbers unless set explicitly.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use csv::{ReaderBuilder, StringRecord, Trim, WriterBuilder};

use crate::datamodel::{DataMatrix, GroupLabels};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReadOptions {
    /// `None` detects a header from non-numeric fields in the first line.
    pub header: Option<bool>,
    /// `None` detects row ids from a non-numeric first field.
    pub row_ids: Option<bool>,
    /// `None` picks tab if the first line has one, else comma.
    pub delimiter: Option<u8>,
}

pub fn detect_delimiter(text: &str) -> u8 {
    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    if first.contains('\t') {
        b'\t'
    } else {
        b','
    }
}

fn is_number(field: &str) -> bool {
    field.parse::<f64>().is_ok()
}

fn line_of(record: &StringRecord) -> usize {
    record.position().map_or(0, |p| p.line() as usize)
}

pub fn parse_matrix(text: &str, opts: &ReadOptions) -> Result<DataMatrix> {
    let delimiter = opts.delimiter.unwrap_or_else(|| detect_delimiter(text));
    let mut reader = ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(Trim::All)
        .delimiter(delimiter)
        .from_reader(text.as_bytes());
    let records = reader
        .records()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            column: 0,
            message: e.to_string(),
        })?;
    let Some(first) = records.first() else {
        return Err(Error::DimensionMismatch("empty matrix file".into()));
    };

    let probe = records.get(1).unwrap_or(first);
    let row_ids = opts
        .row_ids
        .unwrap_or_else(|| !probe.get(0).is_some_and(is_number));
    let skip = usize::from(row_ids);
    let header = opts
        .header
        .unwrap_or_else(|| first.iter().skip(skip).any(|f| !is_number(f)));

    let data = if header { &records[1..] } else { &records[..] };
    let Some(first_data) = data.first() else {
        return Err(Error::DimensionMismatch(
            "matrix file has no data rows".into(),
        ));
    };
    let width = first_data.len();
    let cols = width.saturating_sub(skip);

    let col_ids: Vec<String> = if header {
        let names: Vec<&str> = first.iter().collect();
        // A header may or may not carry a label above the row-id column.
        let names = if names.len() == width {
            &names[skip..]
        } else {
            &names[..]
        };
        if names.len() != cols {
            return Err(Error::Parse {
                line: line_of(first),
                column: names.len() + 1,
                message: format!("header has {} names for {cols} data columns", names.len()),
            });
        }
        names.iter().map(|s| s.to_string()).collect()
    } else {
        (1..=cols).map(|j| format!("col{j}")).collect()
    };

    let mut values = Vec::with_capacity(data.len() * cols);
    let mut ids = Vec::with_capacity(data.len());
    for (i, record) in data.iter().enumerate() {
        let line = line_of(record);
        if record.len() != width {
            return Err(Error::Parse {
                line,
                column: record.len().min(width) + 1,
                message: format!("row has {} fields, expected {width}", record.len()),
            });
        }
        ids.push(if row_ids {
            record[0].to_string()
        } else {
            format!("row{}", i + 1)
        });
        for (j, field) in record.iter().enumerate().skip(skip) {
            let v = field.parse::<f64>().map_err(|_| Error::Parse {
                line,
                column: j + 1,
                message: format!("'{field}' is not a number"),
            })?;
            values.push(v);
        }
    }
    DataMatrix::with_ids(values, ids, col_ids)
}

fn read_text(path: &Path) -> Result<String> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    Ok(text)
}

pub fn read_matrix(path: &Path, opts: &ReadOptions) -> Result<DataMatrix> {
    parse_matrix(&read_text(path)?, opts)
}

/// Labels are the tokens 1 and 2 separated by commas, tabs or whitespace,
/// in column order.
pub fn parse_labels(text: &str) -> Result<GroupLabels> {
    let mut labels = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let tokens = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty());
        for (ti, token) in tokens.enumerate() {
            let label = match token {
                "1" => 1,
                "2" => 2,
                _ => {
                    return Err(Error::Parse {
                        line: li + 1,
                        column: ti + 1,
                        message: format!("group label '{token}' is not 1 or 2"),
                    })
                }
            };
            labels.push(label);
        }
    }
    GroupLabels::new(labels)
}

pub fn read_labels(path: &Path) -> Result<GroupLabels> {
    parse_labels(&read_text(path)?)
}

pub fn ingest(data: &Path, labels: &Path, opts: &ReadOptions) -> Result<(DataMatrix, GroupLabels)> {
    let matrix = read_matrix(data, opts)?;
    let groups = read_labels(labels)?;
    if groups.len() != matrix.cols() {
        return Err(Error::DimensionMismatch(format!(
            "{} group labels for {} columns",
            groups.len(),
            matrix.cols()
        )));
    }
    Ok((matrix, groups))
}

/// Writes a header row and a row-id column. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_matrix<W: Write>(matrix: &DataMatrix, out: W, delimiter: u8) -> Result<()> {
    let mut writer = WriterBuilder::new().delimiter(delimiter).from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    let mut header = vec!["id".to_string()];
    header.extend(matrix.col_ids().iter().cloned());
    writer.write_record(&header).map_err(csv_err)?;
    for m in 0..matrix.rows() {
        let mut fields = vec![matrix.row_ids()[m].clone()];
        fields.extend(matrix.row(m).iter().map(|v| v.to_string()));
        writer.write_record(&fields).map_err(csv_err)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_matrix_file(matrix: &DataMatrix, path: &Path, delimiter: u8) -> Result<()> {
    write_matrix(matrix, BufWriter::new(File::create(path)?), delimiter)
}

pub fn write_labels<W: Write>(groups: &GroupLabels, mut out: W) -> Result<()> {
    let tokens: Vec<String> = groups.as_slice().iter().map(u8::to_string).collect();
    writeln!(out, "{}", tokens.join(","))?;
    Ok(())
}
