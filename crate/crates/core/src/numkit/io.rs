//! Plain-text matrix format.
//!
//! ```text
//! rows cols
//! re im        <- rows*cols lines, row-major
//! ```
//!
//! Values are written with 17 significant digits, which round-trips every
//! finite double exactly.

use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::matrix::{ComplexMatrix, C64};

pub fn format_matrix(m: &ComplexMatrix) -> String {
    let mut out = String::with_capacity(48 * (m.rows() * m.cols() + 1));
    let _ = writeln!(out, "{} {}", m.rows(), m.cols());
    for z in m.data() {
        let _ = writeln!(out, "{:.16e} {:.16e}", z.re, z.im);
    }
    out
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    // Blank lines are tolerated; line numbers refer to the original text.
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| parse_error(1, "empty matrix file"))?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(parse_error(hline, format!("expected `rows cols`, got `{header}`")));
    }
    let parse_dim = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| parse_error(hline, format!("invalid dimension `{s}`")))
    };
    let rows = parse_dim(dims[0])?;
    let cols = parse_dim(dims[1])?;

    let mut data = Vec::with_capacity(rows * cols);
    for (lineno, line) in lines {
        if data.len() == rows * cols {
            return Err(parse_error(lineno, "trailing data after the last entry"));
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(parse_error(lineno, format!("expected `re im`, got `{line}`")));
        }
        let parse_val = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| parse_error(lineno, format!("invalid number `{s}`")))
        };
        data.push(C64::new(parse_val(parts[0])?, parse_val(parts[1])?));
    }
    if data.len() != rows * cols {
        return Err(parse_error(
            text.lines().count().max(1),
            format!("expected {} entries, found {}", rows * cols, data.len()),
        ));
    }
    ComplexMatrix::new(rows, cols, data)
}
