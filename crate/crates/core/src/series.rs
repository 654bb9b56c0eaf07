//! Sampled radial functionals and their CSV form.

use std::io::{Read, Write};

use crate::error::{Error, Result};

/// Values of a nonnegative functional on a strictly increasing radius grid.
/// `+∞` is a legal value.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSeries {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl RadialSeries {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::InvalidSeries(format!(
                "{} radii but {} values",
                grid.len(),
                values.len()
            )));
        }
        if grid.iter().any(|r| !(*r > 0.0 && *r <= 1.0)) {
            return Err(Error::InvalidSeries("radii must lie in (0, 1]".into()));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSeries(
                "grid must be strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| v.is_nan() || *v < 0.0) {
            return Err(Error::InvalidSeries("values must be nonnegative".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Index of the node equal to `r` (relative tolerance `1e-12`).
    pub fn node_index(&self, r: f64) -> Result<usize> {
        let i = self.grid.partition_point(|v| *v < r * (1.0 - 1e-12));
        match self.grid.get(i) {
            Some(v) if (v - r).abs() <= 1e-12 * r => Ok(i),
            _ => Err(Error::OffGrid(r)),
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_columns(out, &["r", "value"], &[&self.grid, &self.values])
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["r", "value"] {
            return Err(Error::Csv(format!("unexpected header {headers:?}")));
        }
        let mut grid = Vec::new();
        let mut values = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            grid.push(parse_number(&rec[0])?);
            values.push(parse_number(&rec[1])?);
        }
        Self::new(grid, values)
    }
}

/// Shortest round-trip decimal, with lowercase `inf`, `-inf` and `nan`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:?}")
    }
}

/// Serde helper writing non-finite floats as the strings of
/// [`format_number`], since JSON has no literal for them.
pub fn serialize_extended<S: serde::Serializer>(
    x: &f64,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_str(&format_number(*x))
    }
}

pub fn parse_number(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| Error::Csv(format!("bad number `{s}`: {e}")))
}

/// Writes equal-length numeric columns under `header`.
pub fn write_columns<W: Write>(out: W, header: &[&str], columns: &[&[f64]]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    let rows = columns.first().map_or(0, |c| c.len());
    for i in 0..rows {
        w.write_record(columns.iter().map(|c| format_number(c[i])))?;
    }
    w.flush()?;
    Ok(())
}
