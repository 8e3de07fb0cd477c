//! Occupancy CSV output.

use std::io::{self, Write};

use vloop_core::OccupancyRecord;

pub const HEADER: &str = "frame,zone,occupied,s,t_high,t_low,movement,warmup";

/// Formats a real with 6 significant digits, like C's `%g`.
pub fn format_g(v: f64) -> String {
    const PRECISION: i32 = 6;
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    // Exponent after rounding to the target precision.
    let sci = format!("{:.*e}", (PRECISION - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').unwrap_or((&sci, "0"));
    let exp: i32 = exp.parse().unwrap_or(0);
    if !(-4..PRECISION).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (PRECISION - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn format_record(r: &OccupancyRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        r.frame,
        r.zone,
        r.occupied as u8,
        format_g(r.s),
        format_g(r.t_high),
        format_g(r.t_low),
        r.movement as u8,
        r.warmup as u8
    )
}

/// Streams records as CSV with LF line endings.
pub struct RecordWriter<W: Write> {
    out: W,
}

impl<W: Write> RecordWriter<W> {
    pub fn new(mut out: W) -> io::Result<Self> {
        out.write_all(HEADER.as_bytes())?;
        out.write_all(b"\n")?;
        Ok(RecordWriter { out })
    }

    pub fn write(&mut self, record: &OccupancyRecord) -> io::Result<()> {
        self.out.write_all(format_record(record).as_bytes())?;
        self.out.write_all(b"\n")
    }

    pub fn finish(mut self) -> io::Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

/// Parsed CSV row, for reading results back.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub frame: u64,
    pub zone: String,
    pub occupied: bool,
    pub s: f64,
    pub t_high: f64,
    pub t_low: f64,
    pub movement: bool,
    pub warmup: bool,
}

/// Reads a CSV written by [`RecordWriter`].
pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>, String> {
    let mut lines = text.lines();
    if lines.next() != Some(HEADER) {
        return Err("missing or unexpected header".into());
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let f: Vec<&str> = line.split(',').collect();
            let bad = || format!("line {}: malformed record", i + 2);
            if f.len() != 8 {
                return Err(bad());
            }
            let flag = |s: &str| match s {
                "0" => Ok(false),
                "1" => Ok(true),
                _ => Err(bad()),
            };
            Ok(CsvRow {
                frame: f[0].parse().map_err(|_| bad())?,
                zone: f[1].to_string(),
                occupied: flag(f[2])?,
                s: f[3].parse().map_err(|_| bad())?,
                t_high: f[4].parse().map_err(|_| bad())?,
                t_low: f[5].parse().map_err(|_| bad())?,
                movement: flag(f[6])?,
                warmup: flag(f[7])?,
            })
        })
        .collect()
}
