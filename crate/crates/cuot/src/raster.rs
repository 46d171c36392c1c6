//! Dense array files.
//!
//! Two encodings are read:
//!
//! - delimited text: one row per line, values separated by commas and/or
//!   whitespace, `#` starts a comment line. A text file holds a 1-D or 2-D array.
//! - flat binary: an ASCII header followed by row-major little-endian values.
//!
//! ```text
//! CUOTARRAY 1
//! dtype f64le
//! shape 16 256
//! data
//! <16·256·8 bytes>
//! ```
//!
//! `dtype` is `f64le` or `f32le`. Writers always produce the binary form with
//! `f64le`, so exported arrays re-ingest bit-exactly.

use std::fs;
use std::io::Write;
use std::path::Path;

use cuot_core::Array;

use crate::error::{Error, Result};

const MAGIC: &str = "CUOTARRAY 1";

/// Reads an array in either encoding, detected from the first bytes.
pub fn read_array(path: &Path) -> Result<Array> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes).map_err(|m| Error::format(path, m))
}

/// Decodes file contents in either encoding.
pub fn decode(bytes: &[u8]) -> Result<Array, String> {
    if bytes.starts_with(MAGIC.as_bytes()) {
        decode_binary(bytes)
    } else {
        let text = std::str::from_utf8(bytes).map_err(|_| "neither UTF-8 text nor a binary array")?;
        parse_text(text)
    }
}

/// Reads a nonnegative raster and checks it against `shape`.
///
/// A single-row or single-column text file matches a 1-D shape of the same length.
pub fn ingest_raster(path: &Path, shape: &[usize]) -> Result<Array> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    ingest_bytes(&bytes, shape).map_err(|m| Error::format(path, m))
}

pub fn ingest_bytes(bytes: &[u8], shape: &[usize]) -> Result<Array, String> {
    let a = conform(decode(bytes)?, shape)?;
    if let Some(i) = a.as_slice().iter().position(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(format!(
            "entry {i} is {} (densities must be finite and nonnegative)",
            a.as_slice()[i]
        ));
    }
    Ok(a)
}

/// Reshapes `a` to `shape` when only unit axes differ.
pub fn conform(a: Array, shape: &[usize]) -> Result<Array, String> {
    if a.shape() == shape {
        return Ok(a);
    }
    let squeeze = |s: &[usize]| s.iter().copied().filter(|&n| n != 1).collect::<Vec<_>>();
    if squeeze(a.shape()) == squeeze(shape) {
        return Array::from_vec(shape, a.into_vec()).map_err(|e| e.to_string());
    }
    Err(format!("array has shape {:?}, expected {:?}", a.shape(), shape))
}

pub fn parse_text(text: &str) -> Result<Array, String> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>().map_err(|_| format!("line {}: `{s}` is not a number", n + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(format!("line {}: {} values, expected {}", n + 1, row.len(), first.len()));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err("no values".into());
    }
    let shape = [rows.len(), rows[0].len()];
    Array::from_vec(&shape, rows.concat()).map_err(|e| e.to_string())
}

fn decode_binary(bytes: &[u8]) -> Result<Array, String> {
    let mut pos = 0;
    let mut next_line = || -> Result<&str, String> {
        let rest = &bytes[pos..];
        let end = rest.iter().position(|&b| b == b'\n').ok_or("truncated header")?;
        pos += end + 1;
        std::str::from_utf8(&rest[..end]).map_err(|_| "header is not ASCII".to_string())
    };
    next_line()?;
    let mut dtype = None;
    let mut shape = None;
    loop {
        let line = next_line()?.trim().to_owned();
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("data") => break,
            Some("dtype") => dtype = parts.next().map(str::to_owned),
            Some("shape") => {
                shape = Some(
                    parts
                        .map(|s| s.parse::<usize>().map_err(|_| format!("bad shape entry `{s}`")))
                        .collect::<Result<Vec<_>, _>>()?,
                )
            }
            Some(other) => return Err(format!("unknown header key `{other}`")),
            None => {}
        }
    }
    let shape = shape.ok_or("header has no shape")?;
    let n: usize = shape.iter().product();
    let body = &bytes[pos..];
    let data: Vec<f64> = match dtype.as_deref() {
        Some("f64le") => {
            check_len(body.len(), n, 8)?;
            body.chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect()
        }
        Some("f32le") => {
            check_len(body.len(), n, 4)?;
            body.chunks_exact(4)
                .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
                .collect()
        }
        Some(other) => return Err(format!("unsupported dtype `{other}`")),
        None => return Err("header has no dtype".into()),
    };
    Array::from_vec(&shape, data).map_err(|e| e.to_string())
}

fn check_len(have: usize, n: usize, width: usize) -> Result<(), String> {
    if have != n * width {
        return Err(format!("payload has {have} bytes, header implies {}", n * width));
    }
    Ok(())
}

pub fn encode_binary(a: &Array) -> Vec<u8> {
    let shape: Vec<String> = a.shape().iter().map(|n| n.to_string()).collect();
    let mut out = format!("{MAGIC}\ndtype f64le\nshape {}\ndata\n", shape.join(" ")).into_bytes();
    out.reserve(a.len() * 8);
    for x in a.as_slice() {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out
}

pub fn write_array(path: &Path, a: &Array) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&encode_binary(a)).map_err(|e| Error::io(path, e))
}

/// Writes a 1-D or 2-D array as comma-delimited text with full precision.
pub fn write_text(path: &Path, a: &Array) -> Result<()> {
    let cols = *a.shape().last().unwrap_or(&1);
    let mut s = String::new();
    for row in a.as_slice().chunks(cols.max(1)) {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:?}")).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    fs::write(path, s).map_err(|e| Error::io(path, e))
}
