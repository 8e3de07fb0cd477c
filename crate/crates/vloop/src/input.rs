//! Frame sources: numbered PGM files, a directory of PGMs, or a raw stream.

use std::fs::File;
use std::io::{BufReader, ErrorKind, Read};
use std::path::{Path, PathBuf};

use thiserror::Error;
use vloop_core::Frame;

use crate::pgm::{read_pgm, PgmError};

#[derive(Debug, Error)]
pub enum InputError {
    #[error("bad input specification '{0}': {1}")]
    Spec(String, &'static str),
    #[error("no frames found for '{0}'")]
    Empty(String),
    #[error("frame {index}: {source}")]
    Frame {
        index: u64,
        #[source]
        source: PgmError,
    },
    #[error("frame {index}: raw stream ended after {got} of {want} bytes")]
    RawTruncated { index: u64, got: usize, want: usize },
    #[error("frame {index}: {source}")]
    Io {
        index: u64,
        #[source]
        source: std::io::Error,
    },
}

impl InputError {
    /// Index of the frame that could not be read, if any.
    pub fn frame_index(&self) -> Option<u64> {
        match self {
            InputError::Frame { index, .. }
            | InputError::RawTruncated { index, .. }
            | InputError::Io { index, .. } => Some(*index),
            _ => None,
        }
    }
}

/// Where frames come from.
#[derive(Debug, Clone, PartialEq)]
pub enum InputSpec {
    /// printf-style pattern with one `%d` / `%0Nd` field.
    Numbered(String),
    /// Every `*.pgm` file of a directory, in name order.
    Directory(PathBuf),
    /// Concatenated `width * height` byte frames.
    Raw {
        path: PathBuf,
        width: usize,
        height: usize,
    },
}

impl InputSpec {
    /// Parses `raw:<path>:<W>x<H>`, a numbered pattern, or a directory.
    pub fn parse(spec: &str) -> Result<Self, InputError> {
        if let Some(rest) = spec.strip_prefix("raw:") {
            let (path, dims) = rest
                .rsplit_once(':')
                .ok_or_else(|| InputError::Spec(spec.into(), "expected raw:<path>:<W>x<H>"))?;
            let (width, height) = parse_size(dims)
                .ok_or_else(|| InputError::Spec(spec.into(), "size must look like 768x512"))?;
            return Ok(InputSpec::Raw {
                path: path.into(),
                width,
                height,
            });
        }
        if spec.contains('%') {
            expand_pattern(spec, 0)
                .ok_or_else(|| InputError::Spec(spec.into(), "pattern needs one %d or %0Nd"))?;
            return Ok(InputSpec::Numbered(spec.into()));
        }
        Ok(InputSpec::Directory(spec.into()))
    }

    /// Human-readable name of the source, for messages.
    pub fn name(&self) -> String {
        match self {
            InputSpec::Numbered(p) => p.clone(),
            InputSpec::Directory(d) => d.display().to_string(),
            InputSpec::Raw { path, .. } => path.display().to_string(),
        }
    }

    /// Opens the source as an iterator of frames.
    pub fn open(&self) -> Result<FrameSource, InputError> {
        match self {
            InputSpec::Numbered(pattern) => {
                let exists = |i| expand_pattern(pattern, i).is_some_and(|p| Path::new(&p).is_file());
                let first = if exists(0) {
                    0
                } else if exists(1) {
                    1
                } else {
                    return Err(InputError::Empty(pattern.clone()));
                };
                Ok(FrameSource::Numbered {
                    pattern: pattern.clone(),
                    next_file: first,
                    index: 0,
                })
            }
            InputSpec::Directory(dir) => {
                let entries = std::fs::read_dir(dir).map_err(|source| InputError::Io { index: 0, source })?;
                let mut files: Vec<PathBuf> = entries
                    .filter_map(|e| e.ok().map(|e| e.path()))
                    .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm")))
                    .collect();
                if files.is_empty() {
                    return Err(InputError::Empty(dir.display().to_string()));
                }
                files.sort();
                Ok(FrameSource::Files {
                    files: files.into_iter(),
                    index: 0,
                })
            }
            InputSpec::Raw {
                path,
                width,
                height,
            } => {
                let file = File::open(path).map_err(|source| InputError::Io { index: 0, source })?;
                Ok(FrameSource::Raw {
                    reader: BufReader::new(file),
                    width: *width,
                    height: *height,
                    index: 0,
                })
            }
        }
    }
}

/// Parses `WxH`.
pub fn parse_size(s: &str) -> Option<(usize, usize)> {
    let (w, h) = s.split_once(['x', 'X'])?;
    Some((w.trim().parse().ok()?, h.trim().parse().ok()?))
}

/// Substitutes `index` into the single `%d` / `%0Nd` of `pattern`.
pub fn expand_pattern(pattern: &str, index: u64) -> Option<String> {
    let start = pattern.find('%')?;
    let rest = &pattern[start + 1..];
    let end = rest.find('d')?;
    let spec = &rest[..end];
    let width: usize = if spec.is_empty() {
        0
    } else if spec.bytes().all(|b| b.is_ascii_digit()) {
        spec.trim_start_matches('0').parse().unwrap_or(0)
    } else {
        return None;
    };
    let tail = &rest[end + 1..];
    if tail.contains('%') {
        return None;
    }
    Some(format!("{}{index:0width$}{tail}", &pattern[..start]))
}

/// Iterator over the frames of an input.
pub enum FrameSource {
    Numbered {
        pattern: String,
        next_file: u64,
        index: u64,
    },
    Files {
        files: std::vec::IntoIter<PathBuf>,
        index: u64,
    },
    Raw {
        reader: BufReader<File>,
        width: usize,
        height: usize,
        index: u64,
    },
}

impl Iterator for FrameSource {
    type Item = Result<Frame, InputError>;

    fn next(&mut self) -> Option<Self::Item> {
        match self {
            FrameSource::Numbered {
                pattern,
                next_file,
                index,
            } => {
                let path = PathBuf::from(expand_pattern(pattern, *next_file)?);
                if !path.is_file() {
                    return None;
                }
                let i = *index;
                *next_file += 1;
                *index += 1;
                Some(read_pgm(&path, i).map_err(|source| InputError::Frame { index: i, source }))
            }
            FrameSource::Files { files, index } => {
                let path = files.next()?;
                let i = *index;
                *index += 1;
                Some(read_pgm(&path, i).map_err(|source| InputError::Frame { index: i, source }))
            }
            FrameSource::Raw {
                reader,
                width,
                height,
                index,
            } => {
                let want = *width * *height;
                let mut buf = vec![0u8; want];
                let mut got = 0;
                while got < want {
                    match reader.read(&mut buf[got..]) {
                        Ok(0) => break,
                        Ok(n) => got += n,
                        Err(e) if e.kind() == ErrorKind::Interrupted => continue,
                        Err(source) => return Some(Err(InputError::Io { index: *index, source })),
                    }
                }
                let i = *index;
                *index += 1;
                match got {
                    0 => None,
                    g if g < want => Some(Err(InputError::RawTruncated {
                        index: i,
                        got: g,
                        want,
                    })),
                    _ => Some(Frame::new(*width, *height, i, buf).map_err(|e| InputError::Frame {
                        index: i,
                        source: e.into(),
                    })),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_expansion() {
        assert_eq!(expand_pattern("d/frame_%06d.pgm", 42).unwrap(), "d/frame_000042.pgm");
        assert_eq!(expand_pattern("f%d.pgm", 7).unwrap(), "f7.pgm");
        assert!(expand_pattern("f%s.pgm", 7).is_none());
        assert!(expand_pattern("f%d_%d.pgm", 7).is_none());
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(
            InputSpec::parse("raw:/tmp/a:b.bin:768x512").unwrap(),
            InputSpec::Raw {
                path: "/tmp/a:b.bin".into(),
                width: 768,
                height: 512
            }
        );
        assert!(InputSpec::parse("raw:/tmp/a.bin").is_err());
        assert!(matches!(
            InputSpec::parse("x/frame_%04d.pgm").unwrap(),
            InputSpec::Numbered(_)
        ));
        assert!(matches!(InputSpec::parse("frames/").unwrap(), InputSpec::Directory(_)));
    }
}
