//! Binary PGM (P5) reading and writing, 8-bit only.

use std::fs;
use std::io::Write;
use std::path::Path;

use thiserror::Error;
use vloop_core::Frame;

#[derive(Debug, Error)]
pub enum PgmError {
    #[error("not a binary PGM (magic {0:?})")]
    BadMagic(String),
    #[error("malformed header: {0}")]
    Header(&'static str),
    #[error("unsupported maxval {0}, only 255 is accepted")]
    MaxVal(u32),
    #[error("pixel data truncated: {got} of {want} bytes")]
    Truncated { got: usize, want: usize },
    #[error(transparent)]
    Frame(#[from] vloop_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn number(&mut self, what: &'static str) -> Result<u32, PgmError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or(PgmError::Header(what))
    }
}

/// Decodes a P5 image into a frame with index `t`.
pub fn decode_pgm(bytes: &[u8], t: u64) -> Result<Frame, PgmError> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        let magic = String::from_utf8_lossy(&bytes[..bytes.len().min(2)]).into_owned();
        return Err(PgmError::BadMagic(magic));
    }
    let mut header = Header { bytes, pos: 2 };
    let width = header.number("width")? as usize;
    let height = header.number("height")? as usize;
    let maxval = header.number("maxval")?;
    if maxval != 255 {
        return Err(PgmError::MaxVal(maxval));
    }
    // Exactly one whitespace byte separates the header from the raster.
    match bytes.get(header.pos) {
        Some(c) if c.is_ascii_whitespace() => header.pos += 1,
        _ => return Err(PgmError::Header("missing separator after maxval")),
    }
    let want = width * height;
    let raster = &bytes[header.pos..];
    if raster.len() < want {
        return Err(PgmError::Truncated {
            got: raster.len(),
            want,
        });
    }
    Ok(Frame::new(width, height, t, raster[..want].to_vec())?)
}

pub fn read_pgm(path: &Path, t: u64) -> Result<Frame, PgmError> {
    decode_pgm(&fs::read(path)?, t)
}

/// Encodes an 8-bit greyscale raster as P5.
pub fn encode_pgm(width: usize, height: usize, data: &[u8]) -> Vec<u8> {
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(data);
    out
}

pub fn write_pgm(path: &Path, width: usize, height: usize, data: &[u8]) -> std::io::Result<()> {
    let mut file = fs::File::create(path)?;
    file.write_all(&encode_pgm(width, height, data))
}
