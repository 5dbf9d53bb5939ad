//! MatrixMarket reading and writing for dense real matrices.
//!
//! Reads `array real general`, `array real symmetric`, and
//! `coordinate real general|symmetric` (`integer` fields are accepted as
//! real). Writes `array real general` with 17 significant digits so that
//! every double survives a round trip.

use std::fs;
use std::io::Write;
use std::path::Path;

use randpivot::{Matrix, SymmetricMatrix};

use crate::error::{CliError, CliResult};

/// A parsed file, keeping track of whether the header declared symmetry.
#[derive(Clone, Debug, PartialEq)]
pub enum MmMatrix {
    General(Matrix),
    Symmetric(SymmetricMatrix),
}

impl MmMatrix {
    pub fn into_general(self) -> Matrix {
        match self {
            MmMatrix::General(m) => m,
            MmMatrix::Symmetric(s) => s.into_matrix(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

#[derive(Clone, Copy, PartialEq)]
enum Layout {
    Array,
    Coordinate,
}

fn parse_header(line: &str) -> Result<(Layout, bool), ParseError> {
    let lower = line.to_ascii_lowercase();
    let words: Vec<&str> = lower.split_whitespace().collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return err(1, "expected '%%MatrixMarket matrix <format> <field> <symmetry>'");
    }
    let layout = match words[2] {
        "array" => Layout::Array,
        "coordinate" => Layout::Coordinate,
        other => return err(1, format!("unsupported format {other:?}")),
    };
    if !matches!(words[3], "real" | "double" | "integer") {
        return err(1, format!("unsupported field {:?}", words[3]));
    }
    let symmetric = match words[4] {
        "general" => false,
        "symmetric" => true,
        other => return err(1, format!("unsupported symmetry {other:?}")),
    };
    Ok((layout, symmetric))
}

fn parse_value(tok: &str, line: usize) -> Result<f64, ParseError> {
    match tok.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => err(line, format!("non-finite value {tok:?}")),
        Err(_) => err(line, format!("invalid number {tok:?}")),
    }
}

fn parse_index(tok: &str, bound: usize, line: usize) -> Result<usize, ParseError> {
    match tok.parse::<usize>() {
        Ok(i) if (1..=bound).contains(&i) => Ok(i - 1),
        Ok(i) => err(line, format!("index {i} out of bounds 1..={bound}")),
        Err(_) => err(line, format!("invalid index {tok:?}")),
    }
}

/// Parses MatrixMarket text. Line numbers in errors are 1-based.
pub fn parse_matrix_market(text: &str) -> Result<MmMatrix, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let Some((_, header)) = lines.next() else {
        return err(1, "empty file");
    };
    let (layout, symmetric) = parse_header(header)?;
    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let Some((size_line, size)) = body.next() else {
        return err(1, "missing size line");
    };
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<Result<_, _>>()
        .or_else(|_| err(size_line, "invalid size line"))?;
    let expected_dims = if layout == Layout::Array { 2 } else { 3 };
    if dims.len() != expected_dims {
        return err(size_line, format!("size line needs {expected_dims} integers"));
    }
    let (rows, cols) = (dims[0], dims[1]);
    if rows == 0 || cols == 0 {
        return err(size_line, "empty matrix");
    }
    if symmetric && rows != cols {
        return err(size_line, "symmetric matrix must be square");
    }

    let mut data = vec![0.0; rows * cols];
    let mut last_line = size_line;
    match layout {
        Layout::Array => {
            // Column-major; symmetric files list the lower triangle only.
            let positions: Vec<(usize, usize)> = (0..cols)
                .flat_map(|j| (if symmetric { j } else { 0 }..rows).map(move |i| (i, j)))
                .collect();
            let mut values = Vec::with_capacity(positions.len());
            for (no, l) in body {
                last_line = no;
                for tok in l.split_whitespace() {
                    if values.len() == positions.len() {
                        return err(no, "more values than the size line declares");
                    }
                    values.push(parse_value(tok, no)?);
                }
            }
            if values.len() != positions.len() {
                return err(
                    last_line,
                    format!("expected {} values, found {}", positions.len(), values.len()),
                );
            }
            for (&(i, j), v) in positions.iter().zip(values) {
                data[i + j * rows] = v;
                if symmetric {
                    data[j + i * rows] = v;
                }
            }
        }
        Layout::Coordinate => {
            let nnz = dims[2];
            let mut seen = vec![false; rows * cols];
            let mut count = 0;
            for (no, l) in body {
                last_line = no;
                let toks: Vec<&str> = l.split_whitespace().collect();
                if toks.len() != 3 {
                    return err(no, "coordinate entries need 'row col value'");
                }
                if count == nnz {
                    return err(no, "more entries than the size line declares");
                }
                let i = parse_index(toks[0], rows, no)?;
                let j = parse_index(toks[1], cols, no)?;
                let v = parse_value(toks[2], no)?;
                if seen[i + j * rows] {
                    if symmetric && i != j && data[i + j * rows] != v {
                        return err(no, format!("asymmetric data at ({}, {})", i + 1, j + 1));
                    }
                    return err(no, format!("duplicate entry ({}, {})", i + 1, j + 1));
                }
                seen[i + j * rows] = true;
                data[i + j * rows] = v;
                if symmetric {
                    seen[j + i * rows] = true;
                    data[j + i * rows] = v;
                }
                count += 1;
            }
            if count != nnz {
                return err(last_line, format!("expected {nnz} entries, found {count}"));
            }
        }
    }
    let m = Matrix::from_col_major(rows, cols, data).or_else(|e| err(size_line, e.to_string()))?;
    if symmetric {
        let s = SymmetricMatrix::from_matrix(m).or_else(|e| err(size_line, e.to_string()))?;
        Ok(MmMatrix::Symmetric(s))
    } else {
        Ok(MmMatrix::General(m))
    }
}

pub fn read_matrix_market(path: &Path) -> CliResult<MmMatrix> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_matrix_market(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: e.line,
        message: e.message,
    })
}

/// `array real general`, column-major, one value per line.
pub fn format_matrix_market(m: &Matrix) -> String {
    let mut out = String::with_capacity(32 * m.rows() * m.cols() + 64);
    out.push_str("%%MatrixMarket matrix array real general\n");
    out.push_str(&format!("{} {}\n", m.rows(), m.cols()));
    for v in m.as_slice() {
        out.push_str(&format!("{v:.16e}\n"));
    }
    out
}

pub fn write_matrix_market(path: &Path, m: &Matrix) -> CliResult<()> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut f = fs::File::create(path).map_err(io)?;
    f.write_all(format_matrix_market(m).as_bytes()).map_err(io)
}
