//! Plain-text tuple files.
//!
//! ```text
//! # comments and blank lines are ignored
//! n K
//! <K blocks of n rows, each with n whitespace-separated entries>
//! ```
//!
//! An entry is a real number (`1.5`, `-2e-3`) or a complex number written
//! `re+imi` / `re-imi` (`1.5-0.25i`). A pure imaginary entry is written `0+2i`.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::tuple::MatrixTuple;

/// Parses one entry token.
pub fn parse_entry(tok: &str) -> std::result::Result<Complex64, String> {
    let bad = || format!("invalid entry '{tok}'");
    let Some(body) = tok.strip_suffix('i') else {
        return tok
            .parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| bad());
    };
    // split at the last sign that is not a leading sign or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
        .ok_or_else(bad)?;
    let re = body[..split].parse::<f64>().map_err(|_| bad())?;
    let im = body[split..].parse::<f64>().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

pub fn format_entry(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

pub fn parse_tuple(text: &str) -> Result<MatrixTuple> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 0,
        msg: "missing 'n K' header".into(),
    })?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Parse {
            line: hline,
            msg: format!("header must be two positive integers, got '{header}'"),
        })?;
    let [n, k] = dims[..] else {
        return Err(Error::Parse {
            line: hline,
            msg: format!("header must be 'n K', got '{header}'"),
        });
    };
    if n == 0 || k == 0 {
        return Err(Error::Parse {
            line: hline,
            msg: "n and K must be positive".into(),
        });
    }

    let mut mats = Vec::with_capacity(k);
    for m in 0..k {
        let mut mat = CMat::zeros(n, n);
        for r in 0..n {
            let (line, row) = lines.next().ok_or(Error::Parse {
                line: 0,
                msg: format!("unexpected end of input in matrix {m}, row {r}"),
            })?;
            let entries: Vec<&str> = row.split_whitespace().collect();
            if entries.len() != n {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected {n} entries, found {}", entries.len()),
                });
            }
            for (c, tok) in entries.iter().enumerate() {
                mat[(r, c)] = parse_entry(tok).map_err(|msg| Error::Parse { line, msg })?;
            }
        }
        mats.push(mat);
    }
    if let Some((line, _)) = lines.next() {
        return Err(Error::Parse {
            line,
            msg: "trailing data after the last matrix".into(),
        });
    }
    MatrixTuple::new(mats)
}

pub fn format_tuple(x: &MatrixTuple) -> String {
    let n = x.n();
    let mut out = format!("{} {}\n", n, x.k());
    for m in x.iter() {
        for r in 0..n {
            let row: Vec<String> = (0..n).map(|c| format_entry(m[(r, c)])).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
    }
    out
}

pub fn read_tuple(path: impl AsRef<Path>) -> Result<MatrixTuple> {
    parse_tuple(&std::fs::read_to_string(path)?)
}

pub fn write_tuple(path: impl AsRef<Path>, x: &MatrixTuple) -> Result<()> {
    std::fs::write(path, format_tuple(x))?;
    Ok(())
}
