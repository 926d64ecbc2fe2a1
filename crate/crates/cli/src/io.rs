//! Dense matrix files: MatrixMarket (array or coordinate; real, integer or
//! complex; general, symmetric, skew-symmetric or hermitian) and headerless
//! real CSV. Output is always MatrixMarket array format.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use srlab::{Matrix, ScalarField};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Layout {
    Array,
    Coordinate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

struct Header {
    layout: Layout,
    complex: bool,
    symmetry: Symmetry,
}

fn parse_header(line: &str) -> Result<Header, String> {
    let words: Vec<String> = line.split_whitespace().map(|w| w.to_ascii_lowercase()).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(format!("malformed MatrixMarket header `{line}`"));
    }
    let layout = match words[2].as_str() {
        "array" => Layout::Array,
        "coordinate" => Layout::Coordinate,
        f => return Err(format!("unsupported format `{f}`")),
    };
    let complex = match words[3].as_str() {
        "real" | "double" | "integer" => false,
        "complex" => true,
        f => return Err(format!("unsupported field `{f}`")),
    };
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        "hermitian" => Symmetry::Hermitian,
        s => return Err(format!("unsupported symmetry `{s}`")),
    };
    if symmetry == Symmetry::Hermitian && !complex {
        return Err("hermitian symmetry requires a complex field".into());
    }
    Ok(Header {
        layout,
        complex,
        symmetry,
    })
}

fn number(tok: Option<&str>, what: &str) -> Result<f64, String> {
    let t = tok.ok_or_else(|| format!("missing {what}"))?;
    t.parse::<f64>().map_err(|_| format!("bad {what} `{t}`"))
}

fn index(tok: Option<&str>, what: &str) -> Result<usize, String> {
    let t = tok.ok_or_else(|| format!("missing {what}"))?;
    t.parse::<usize>().map_err(|_| format!("bad {what} `{t}`"))
}

fn entry<'a>(it: &mut impl Iterator<Item = &'a str>, complex: bool) -> Result<Complex64, String> {
    let re = number(it.next(), "value")?;
    let im = if complex { number(it.next(), "imaginary part")? } else { 0.0 };
    Ok(Complex64::new(re, im))
}

/// Parse MatrixMarket text into a dense matrix.
pub fn parse_matrix_market(text: &str) -> Result<Matrix, String> {
    let mut lines = text.lines();
    let header = parse_header(lines.next().ok_or("empty input")?)?;
    let mut body = lines
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('%'));
    let size_line = body.next().ok_or("missing size line")?;
    let mut size = size_line.split_whitespace();
    let rows = index(size.next(), "row count")?;
    let cols = index(size.next(), "column count")?;
    if rows == 0 || cols == 0 {
        return Err(format!("empty {rows}x{cols} matrix"));
    }
    if header.symmetry != Symmetry::General && rows != cols {
        return Err("symmetric storage requires a square matrix".into());
    }
    let mut dense = vec![Complex64::new(0.0, 0.0); rows * cols];
    let mut put = |i: usize, j: usize, v: Complex64| {
        dense[i * cols + j] = v;
        if i != j {
            dense[j * cols + i] = match header.symmetry {
                Symmetry::General => return,
                Symmetry::Symmetric => v,
                Symmetry::SkewSymmetric => -v,
                Symmetry::Hermitian => v.conj(),
            };
        }
    };
    let mut tokens = body.flat_map(str::split_whitespace);
    match header.layout {
        Layout::Array => {
            // column-major; symmetric variants store the lower triangle only
            for j in 0..cols {
                let start = match header.symmetry {
                    Symmetry::General => 0,
                    Symmetry::SkewSymmetric => j + 1,
                    _ => j,
                };
                for i in start..rows {
                    put(i, j, entry(&mut tokens, header.complex)?);
                }
            }
        }
        Layout::Coordinate => {
            let nnz = index(size.next(), "entry count")?;
            for _ in 0..nnz {
                let i = index(tokens.next(), "row index")?;
                let j = index(tokens.next(), "column index")?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(format!("index ({i}, {j}) outside {rows}x{cols}"));
                }
                put(i - 1, j - 1, entry(&mut tokens, header.complex)?);
            }
        }
    }
    if let Some(extra) = tokens.next() {
        return Err(format!("unexpected trailing data `{extra}`"));
    }
    let m = if header.complex {
        Matrix::from_row_major_complex(rows, cols, &dense)
    } else {
        let re: Vec<f64> = dense.iter().map(|z| z.re).collect();
        Matrix::from_row_major(rows, cols, &re)
    };
    m.map_err(|e| e.to_string())
}

/// Headerless real CSV, one matrix row per record.
pub fn parse_csv(text: &str) -> Result<Matrix, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = 0;
    let mut cols = None;
    let mut values = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        match cols {
            None => cols = Some(rec.len()),
            Some(c) if c != rec.len() => {
                return Err(format!("row {} has {} fields, expected {c}", rows + 1, rec.len()))
            }
            _ => {}
        }
        for f in rec.iter() {
            values.push(f.parse::<f64>().map_err(|_| format!("bad value `{f}` in row {}", rows + 1))?);
        }
        rows += 1;
    }
    let cols = cols.ok_or("no data rows")?;
    Matrix::from_row_major(rows, cols, &values).map_err(|e| e.to_string())
}

/// Parse by content: a `%%MatrixMarket` banner selects MatrixMarket,
/// anything else is read as CSV.
pub fn parse_matrix(text: &str) -> Result<Matrix, String> {
    if text.trim_start().starts_with("%%MatrixMarket") {
        parse_matrix_market(text.trim_start())
    } else {
        parse_csv(text)
    }
}

pub fn read_matrix(path: &Path) -> CliResult<Matrix> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_matrix(&text).map_err(|message| CliError::Parse {
        path: path.to_path_buf(),
        message,
    })
}

/// MatrixMarket array text with shortest round-trip float formatting.
pub fn to_matrix_market(m: &Matrix) -> String {
    let complex = m.field() == ScalarField::Complex;
    let mut out = format!(
        "%%MatrixMarket matrix array {} general\n{} {}\n",
        if complex { "complex" } else { "real" },
        m.rows(),
        m.cols()
    );
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            let z = m.get(i, j);
            if complex {
                let _ = writeln!(out, "{:e} {:e}", z.re, z.im);
            } else {
                let _ = writeln!(out, "{:e}", z.re);
            }
        }
    }
    out
}

pub fn write_matrix(path: &Path, m: &Matrix) -> CliResult<()> {
    fs::write(path, to_matrix_market(m)).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
