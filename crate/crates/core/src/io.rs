//! Plain-text exchange formats for matrices, sign vectors and signals.
//!
//! ```text
//! obcs-matrix v1 <m> <n>      then m lines of n space-separated floats
//! obcs-signs v1 <m>           then m lines of +1 / -1
//! obcs-signal v1 <n> <s>      then s lines "<index> <value>", 1-based
//! ```
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! write followed by a read reproduces the values bit for bit.

use std::io::{BufRead, Write};

use ndarray::{Array1, Array2, ShapeBuilder};

use crate::error::{Error, Result};
use crate::model::{Matrix, SparseSignal};

pub const MATRIX_MAGIC: &str = "obcs-matrix";
pub const SIGNS_MAGIC: &str = "obcs-signs";
pub const SIGNAL_MAGIC: &str = "obcs-signal";
const VERSION: &str = "v1";

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line_no: usize,
}

impl<R: BufRead> Lines<R> {
    fn new(reader: R) -> Self {
        Lines { inner: reader.lines(), line_no: 0 }
    }

    /// Next non-blank line.
    fn next_line(&mut self) -> Result<Option<String>> {
        for line in self.inner.by_ref() {
            self.line_no += 1;
            let line = line?;
            if !line.trim().is_empty() {
                return Ok(Some(line));
            }
        }
        Ok(None)
    }

    fn expect_line(&mut self, what: &str) -> Result<String> {
        self.next_line()?
            .ok_or_else(|| parse_err(self.line_no + 1, format!("unexpected end of input, expected {what}")))
    }

    fn header(&mut self, magic: &str, fields: usize) -> Result<Vec<usize>> {
        let line = self.expect_line("header")?;
        let mut tok = line.split_whitespace();
        if tok.next() != Some(magic) || tok.next() != Some(VERSION) {
            return Err(parse_err(self.line_no, format!("expected header `{magic} {VERSION} ...`")));
        }
        let dims: Vec<usize> = tok
            .map(|t| t.parse::<usize>().map_err(|e| parse_err(self.line_no, format!("bad dimension `{t}`: {e}"))))
            .collect::<Result<_>>()?;
        if dims.len() != fields {
            return Err(parse_err(self.line_no, format!("expected {fields} dimensions in header")));
        }
        Ok(dims)
    }

    fn finish(&mut self) -> Result<()> {
        if self.next_line()?.is_some() {
            return Err(parse_err(self.line_no, "trailing data after last record"));
        }
        Ok(())
    }
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>().map_err(|e| parse_err(line, format!("bad float `{tok}`: {e}")))
}

pub fn write_matrix<W: Write>(mut w: W, a: &Matrix) -> Result<()> {
    writeln!(w, "{MATRIX_MAGIC} {VERSION} {} {}", a.nrows(), a.ncols())?;
    for row in a.rows() {
        let mut first = true;
        for v in row {
            if !first {
                w.write_all(b" ")?;
            }
            write!(w, "{v}")?;
            first = false;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn read_matrix<R: BufRead>(r: R) -> Result<Matrix> {
    let mut lines = Lines::new(r);
    let dims = lines.header(MATRIX_MAGIC, 2)?;
    let (m, n) = (dims[0], dims[1]);
    let mut a = Array2::zeros((m, n).f());
    for i in 0..m {
        let line = lines.expect_line("matrix row")?;
        let mut count = 0;
        for (j, tok) in line.split_whitespace().enumerate() {
            if j >= n {
                return Err(parse_err(lines.line_no, format!("row has more than {n} entries")));
            }
            a[[i, j]] = parse_f64(tok, lines.line_no)?;
            count += 1;
        }
        if count != n {
            return Err(parse_err(lines.line_no, format!("row has {count} entries, expected {n}")));
        }
    }
    lines.finish()?;
    Ok(a)
}

pub fn write_signs<W: Write>(mut w: W, y: &Array1<f64>) -> Result<()> {
    writeln!(w, "{SIGNS_MAGIC} {VERSION} {}", y.len())?;
    for v in y {
        writeln!(w, "{}", if *v < 0.0 { "-1" } else { "+1" })?;
    }
    Ok(())
}

pub fn read_signs<R: BufRead>(r: R) -> Result<Array1<f64>> {
    let mut lines = Lines::new(r);
    let m = lines.header(SIGNS_MAGIC, 1)?[0];
    let mut y = Array1::zeros(m);
    for slot in y.iter_mut() {
        let line = lines.expect_line("sign entry")?;
        *slot = match line.trim() {
            "+1" | "1" => 1.0,
            "-1" => -1.0,
            other => return Err(parse_err(lines.line_no, format!("expected +1 or -1, got `{other}`"))),
        };
    }
    lines.finish()?;
    Ok(y)
}

pub fn write_signal<W: Write>(mut w: W, x: &SparseSignal) -> Result<()> {
    writeln!(w, "{SIGNAL_MAGIC} {VERSION} {} {}", x.n(), x.s())?;
    for &i in x.support() {
        writeln!(w, "{} {}", i + 1, x.values()[i])?;
    }
    Ok(())
}

pub fn read_signal<R: BufRead>(r: R) -> Result<SparseSignal> {
    let mut lines = Lines::new(r);
    let dims = lines.header(SIGNAL_MAGIC, 2)?;
    let (n, s) = (dims[0], dims[1]);
    let mut entries = Vec::with_capacity(s);
    for _ in 0..s {
        let line = lines.expect_line("signal entry")?;
        let mut tok = line.split_whitespace();
        let (Some(idx), Some(val), None) = (tok.next(), tok.next(), tok.next()) else {
            return Err(parse_err(lines.line_no, "expected `index value`"));
        };
        let idx: usize = idx.parse().map_err(|e| parse_err(lines.line_no, format!("bad index `{idx}`: {e}")))?;
        if idx == 0 || idx > n {
            return Err(parse_err(lines.line_no, format!("index {idx} outside 1..={n}")));
        }
        entries.push((idx - 1, parse_f64(val, lines.line_no)?));
    }
    lines.finish()?;
    SparseSignal::from_entries(n, &entries)
}
