//! Text trace format: `<core> <R|W> <hex addr> [<128 hex data>]` per line,
//! `#` starts a comment.

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::Line;

pub const MAX_CORES: u8 = 8;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: address {addr:#x} is not 64-byte aligned")]
    Misaligned { line: usize, addr: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    pub seq: u64,
    pub core: u8,
    pub write: bool,
    /// Byte address, 64-byte aligned.
    pub addr: u64,
    pub data: Option<Line>,
}

impl TraceRecord {
    pub fn line_addr(&self) -> u64 {
        self.addr / 64
    }
}

fn malformed(line: usize, msg: impl Into<String>) -> TraceError {
    TraceError::Malformed {
        line,
        msg: msg.into(),
    }
}

fn parse_record(line_no: usize, seq: u64, text: &str) -> Result<TraceRecord, TraceError> {
    let mut f = text.split_whitespace();
    let core_s = f
        .next()
        .ok_or_else(|| malformed(line_no, "missing core id"))?;
    let core: u8 = core_s
        .parse()
        .ok()
        .filter(|&c| c < MAX_CORES)
        .ok_or_else(|| malformed(line_no, format!("core id `{core_s}` not in 0..{MAX_CORES}")))?;
    let write = match f.next() {
        Some("R") | Some("r") => false,
        Some("W") | Some("w") => true,
        Some(o) => return Err(malformed(line_no, format!("operation `{o}` is not R or W"))),
        None => return Err(malformed(line_no, "missing operation")),
    };
    let addr_s = f
        .next()
        .ok_or_else(|| malformed(line_no, "missing address"))?;
    let hex = addr_s
        .strip_prefix("0x")
        .or_else(|| addr_s.strip_prefix("0X"))
        .unwrap_or(addr_s);
    let addr = u64::from_str_radix(hex, 16)
        .map_err(|_| malformed(line_no, format!("bad address `{addr_s}`")))?;
    if addr % 64 != 0 {
        return Err(TraceError::Misaligned {
            line: line_no,
            addr,
        });
    }
    let data = match f.next() {
        Some(d) => Some(
            Line::from_hex(d).ok_or_else(|| malformed(line_no, "data must be 128 hex digits"))?,
        ),
        None => None,
    };
    if f.next().is_some() {
        return Err(malformed(line_no, "trailing fields"));
    }
    if write && data.is_none() {
        return Err(malformed(line_no, "write without data"));
    }
    Ok(TraceRecord {
        seq,
        core,
        write,
        addr,
        data,
    })
}

pub fn parse_trace(reader: impl BufRead) -> Result<Vec<TraceRecord>, TraceError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let rec = parse_record(i + 1, out.len() as u64, body)?;
        out.push(rec);
    }
    Ok(out)
}

pub fn parse_trace_str(s: &str) -> Result<Vec<TraceRecord>, TraceError> {
    parse_trace(s.as_bytes())
}

pub fn write_trace(records: &[TraceRecord], mut w: impl Write) -> io::Result<()> {
    for r in records {
        write!(
            w,
            "{} {} {:#x}",
            r.core,
            if r.write { 'W' } else { 'R' },
            r.addr
        )?;
        if let Some(d) = &r.data {
            write!(w, " {}", d.to_hex())?;
        }
        writeln!(w)?;
    }
    Ok(())
}
