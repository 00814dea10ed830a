//! File formats: signals as CSV (one value per line) or raw little-endian
//! `f64`, coefficient vectors as CSV with index columns, matrices as CSV rows.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::signal::{CoefficientVector, FrameIndex, IndexLayout, Signal};

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn is_binary(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("bin" | "f64" | "raw")
    )
}

/// Reads a signal; `.bin`, `.f64` and `.raw` files are little-endian `f64`,
/// anything else is CSV with one value per line.
pub fn read_signal(path: &Path) -> Result<Signal> {
    let bytes = fs::read(path).map_err(|e| io_error(path, e))?;
    let samples = if is_binary(path) {
        if bytes.len() % 8 != 0 {
            return Err(Error::Parse(format!(
                "{}: {} bytes is not a whole number of f64 values",
                path.display(),
                bytes.len()
            )));
        }
        bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect()
    } else {
        let text = String::from_utf8(bytes)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        parse_values(&text, path)?
    };
    Signal::new(samples).map_err(|_| Error::Parse(format!("{}: empty signal", path.display())))
}

fn parse_values(text: &str, path: &Path) -> Result<Vec<f64>> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            l.parse::<f64>()
                .map_err(|e| Error::Parse(format!("{}:{}: `{l}`: {e}", path.display(), i + 1)))
        })
        .collect()
}

pub fn write_signal(path: &Path, signal: &Signal) -> Result<()> {
    let bytes = if is_binary(path) {
        signal
            .samples()
            .iter()
            .flat_map(|v| v.to_le_bytes())
            .collect()
    } else {
        let mut s = String::with_capacity(signal.len() * 20);
        for v in signal.samples() {
            s.push_str(&format!("{v:?}\n"));
        }
        s.into_bytes()
    };
    fs::write(path, bytes).map_err(|e| io_error(path, e))
}

/// Index columns for a layout, chosen from its first detail index.
fn index_header(layout: &IndexLayout) -> &'static str {
    let detail = layout.indices().iter().find(|i| !i.is_scaling());
    match detail.or_else(|| layout.indices().first()) {
        Some(FrameIndex::Flat { .. }) | None => "i",
        Some(FrameIndex::Wavelet { .. } | FrameIndex::Scaling { .. }) => "j,k",
        Some(FrameIndex::Shifted { .. } | FrameIndex::ShiftedScaling { .. }) => "j,k,m",
        Some(FrameIndex::Translated { .. } | FrameIndex::TranslatedScaling { .. }) => "j,shift",
        Some(FrameIndex::Oriented { .. }) => "j,l,k",
    }
}

/// Index columns of one entry; scaling indices report `j = -1`.
fn index_columns(idx: &FrameIndex) -> String {
    match *idx {
        FrameIndex::Flat { i } => format!("{i}"),
        FrameIndex::Scaling { k } => format!("-1,{k}"),
        FrameIndex::Wavelet { j, k } => format!("{j},{k}"),
        FrameIndex::ShiftedScaling { k, m } => format!("-1,{k},{m}"),
        FrameIndex::Shifted { j, k, m } => format!("{j},{k},{m}"),
        FrameIndex::TranslatedScaling { shift } => format!("-1,{shift}"),
        FrameIndex::Translated { j, shift } => format!("{j},{shift}"),
        FrameIndex::Oriented { j, l, k } => format!("{j},{l},{k}"),
    }
}

pub fn coefficients_to_csv(coeffs: &CoefficientVector) -> String {
    let mut s = format!("{},value\n", index_header(coeffs.layout()));
    for (idx, v) in coeffs.layout().indices().iter().zip(coeffs.values()) {
        s.push_str(&format!("{},{v:?}\n", index_columns(idx)));
    }
    s
}

pub fn write_coefficients(path: &Path, coeffs: &CoefficientVector) -> Result<()> {
    fs::write(path, coefficients_to_csv(coeffs)).map_err(|e| io_error(path, e))
}

/// Reads a coefficient CSV written for `layout`; rows may appear in any order.
pub fn read_coefficients(path: &Path, layout: Arc<IndexLayout>) -> Result<CoefficientVector> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let header = index_header(&layout);
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let found = lines.next().unwrap_or_default();
    if found.trim() != format!("{header},value") {
        return Err(Error::Parse(format!(
            "{}: header `{found}` does not match `{header},value`",
            path.display()
        )));
    }
    let by_columns: std::collections::HashMap<String, usize> = layout
        .indices()
        .iter()
        .enumerate()
        .map(|(pos, idx)| (index_columns(idx), pos))
        .collect();
    let mut values = vec![f64::NAN; layout.len()];
    let mut seen = 0;
    for line in lines {
        let (cols, value) = line
            .rsplit_once(',')
            .ok_or_else(|| Error::Parse(format!("{}: malformed row `{line}`", path.display())))?;
        let pos = *by_columns.get(cols.trim()).ok_or(Error::IndexMismatch)?;
        values[pos] = value
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("{}: `{value}`: {e}", path.display())))?;
        seen += 1;
    }
    if seen != layout.len() {
        return Err(Error::DimensionMismatch {
            expected: layout.len(),
            actual: seen,
        });
    }
    CoefficientVector::new(values, layout)
}

/// Rows of comma- or whitespace-separated numbers.
pub fn read_matrix_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<f64>().map_err(|e| {
                        Error::Parse(format!("{}:{}: `{t}`: {e}", path.display(), i + 1))
                    })
                })
                .collect()
        })
        .collect()
}
