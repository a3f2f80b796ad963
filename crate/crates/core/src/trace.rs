//! Abbadingo-formatted trace samples.
//!
//! The header line holds the number of traces and the alphabet size; every
//! following line is `type length s1 .. s_length`, all decimal integers.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Trace {
    /// Sequence type from the file. Kept, but ignored by probabilistic learning.
    pub type_label: u32,
    pub symbols: Vec<u32>,
}

impl Trace {
    pub fn new(type_label: u32, symbols: Vec<u32>) -> Self {
        Trace {
            type_label,
            symbols,
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceSet {
    pub alphabet_size: u32,
    pub traces: Vec<Trace>,
}

impl TraceSet {
    pub fn new(alphabet_size: u32) -> Self {
        TraceSet {
            alphabet_size,
            traces: Vec::new(),
        }
    }

    /// Number of traces, which equals the count declared in the header.
    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Trace> {
        self.traces.iter()
    }
}

fn parse_int(tok: &str, line: usize) -> Result<u64, ParseError> {
    tok.parse::<u64>()
        .map_err(|_| ParseError::BadInteger { line })
}

/// Parses an Abbadingo sample.
///
/// Blank lines are skipped. Line numbers in errors are 1-based and count the
/// header.
pub fn parse_abbadingo(text: &str) -> Result<TraceSet, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (_, header) = lines.next().ok_or(ParseError::Empty)?;
    let mut fields = header.split_whitespace();
    let declared = fields
        .next()
        .and_then(|t| t.parse::<usize>().ok())
        .ok_or(ParseError::Header("expected trace count"))?;
    let alphabet_size = fields
        .next()
        .and_then(|t| t.parse::<u32>().ok())
        .ok_or(ParseError::Header("expected alphabet size"))?;
    if fields.next().is_some() {
        return Err(ParseError::Header("expected exactly two integers"));
    }
    if alphabet_size == 0 {
        return Err(ParseError::Header("alphabet size must be positive"));
    }

    let mut traces = Vec::with_capacity(declared.min(1 << 20));
    for (line, content) in lines {
        let mut toks = content.split_whitespace();
        let type_label = toks
            .next()
            .ok_or(ParseError::MissingField { line })
            .and_then(|t| parse_int(t, line))?;
        let length = toks
            .next()
            .ok_or(ParseError::MissingField { line })
            .and_then(|t| parse_int(t, line))? as usize;
        let mut symbols = Vec::with_capacity(length.min(1 << 16));
        for tok in toks {
            let value = parse_int(tok, line)?;
            if value >= u64::from(alphabet_size) {
                return Err(ParseError::SymbolOutOfRange {
                    line,
                    symbol: u32::try_from(value).unwrap_or(u32::MAX),
                    alphabet_size,
                });
            }
            symbols.push(value as u32);
        }
        if symbols.len() != length {
            return Err(ParseError::LengthMismatch {
                line,
                declared: length,
                found: symbols.len(),
            });
        }
        let type_label = u32::try_from(type_label).map_err(|_| ParseError::BadInteger { line })?;
        traces.push(Trace::new(type_label, symbols));
    }

    if traces.len() != declared {
        return Err(ParseError::CountMismatch {
            declared,
            found: traces.len(),
        });
    }
    Ok(TraceSet {
        alphabet_size,
        traces,
    })
}

pub fn write_abbadingo(ts: &TraceSet) -> String {
    let mut out = String::new();
    // Writing into a String cannot fail.
    let _ = writeln!(out, "{} {}", ts.traces.len(), ts.alphabet_size);
    for t in &ts.traces {
        let _ = write!(out, "{} {}", t.type_label, t.symbols.len());
        for s in &t.symbols {
            let _ = write!(out, " {}", s);
        }
        out.push('\n');
    }
    out
}
