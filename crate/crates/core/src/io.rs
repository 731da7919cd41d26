//! Plain-text and binary interchange formats.
//!
//! *Trace*: one event per line — timestamp in seconds, optionally followed
//! by a weight column. Lines starting with `#` are comments; exports carry
//! a `# horizon <seconds>` header so the record length survives the round
//! trip. Imports without the header use the last timestamp as the horizon,
//! which accepts externally captured timestamp lists.
//!
//! *Spectrum*: `# segments <n> record_length <seconds>` header, then
//! `frequency_hz psd` pairs.
//!
//! Values are printed with 13 significant digits, which re-parses to the
//! same printed form: export → import → export is byte-identical.
//!
//! *Binary trace*: `horizon`, `uniform weight`, `count` then the raw
//! timestamps, all little-endian 64-bit (count as u64).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::spectral::SpectrumEstimate;
use crate::traffic_sim::PacketTrace;

fn fmt(v: f64) -> String {
    format!("{v:.12e}")
}

/// Write a trace in the text format.
pub fn write_trace(path: &Path, trace: &PacketTrace) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "# horizon {}", fmt(trace.horizon()))?;
    match trace.per_event_weights() {
        Some(weights) => {
            for (t, w) in trace.timestamps().iter().zip(weights) {
                writeln!(out, "{} {}", fmt(*t), fmt(*w))?;
            }
        }
        None if trace.uniform_weight() != 1.0 => {
            let w = fmt(trace.uniform_weight());
            for t in trace.timestamps() {
                writeln!(out, "{} {w}", fmt(*t))?;
            }
        }
        None => {
            for t in trace.timestamps() {
                writeln!(out, "{}", fmt(*t))?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Read a text trace; parse failures carry the 1-based line number.
pub fn read_trace(path: &Path) -> Result<PacketTrace> {
    let reader = BufReader::new(File::open(path)?);
    let mut timestamps = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let mut header_horizon: Option<f64> = None;

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if let Some(rest) = text.strip_prefix('#') {
            let mut parts = rest.split_whitespace();
            if parts.next() == Some("horizon") {
                let v = parts.next().ok_or(Error::Parse {
                    line: line_no,
                    message: "horizon header missing value".into(),
                })?;
                header_horizon = Some(parse_field(v, line_no, "horizon")?);
            }
            continue;
        }
        let mut parts = text.split_whitespace();
        let t = parse_field(
            parts.next().expect("nonempty line has a first token"),
            line_no,
            "timestamp",
        )?;
        let w = match parts.next() {
            Some(tok) => Some(parse_field(tok, line_no, "weight")?),
            None => None,
        };
        if parts.next().is_some() {
            return Err(Error::Parse {
                line: line_no,
                message: "more than two columns".into(),
            });
        }
        if !timestamps.is_empty() && w.is_some() != !weights.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                message: "mixed one- and two-column event lines".into(),
            });
        }
        timestamps.push(t);
        if let Some(w) = w {
            weights.push(w);
        }
    }

    let horizon = match header_horizon {
        Some(h) => h,
        None => *timestamps.last().ok_or(Error::Parse {
            line: 0,
            message: "no events and no horizon header".into(),
        })?,
    };
    if weights.is_empty() {
        PacketTrace::new(timestamps, 1.0, horizon)
    } else if weights.windows(2).all(|w| w[0] == w[1]) && weights[0] != 1.0 {
        // A constant weight column is the uniform-weight trace it came from.
        let w = weights[0];
        PacketTrace::new(timestamps, w, horizon)
    } else {
        PacketTrace::with_weights(timestamps, weights, horizon)
    }
}

fn parse_field(token: &str, line: usize, what: &str) -> Result<f64> {
    token.parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("invalid {what} {token:?}"),
    })
}

/// Write a trace as little-endian binary.
pub fn write_trace_binary(path: &Path, trace: &PacketTrace) -> Result<()> {
    if trace.per_event_weights().is_some() {
        return Err(Error::InvalidParameter(
            "binary format stores uniform-weight traces only".into(),
        ));
    }
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(&trace.horizon().to_le_bytes())?;
    out.write_all(&trace.uniform_weight().to_le_bytes())?;
    out.write_all(&(trace.len() as u64).to_le_bytes())?;
    for t in trace.timestamps() {
        out.write_all(&t.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

/// Read a binary trace written by [`write_trace_binary`].
pub fn read_trace_binary(path: &Path) -> Result<PacketTrace> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut buf8 = [0u8; 8];
    let mut next = |what: &str| -> Result<[u8; 8]> {
        reader.read_exact(&mut buf8).map_err(|_| Error::Parse {
            line: 0,
            message: format!("truncated {what}"),
        })?;
        Ok(buf8)
    };
    let horizon = f64::from_le_bytes(next("horizon")?);
    let weight = f64::from_le_bytes(next("weight")?);
    let count = u64::from_le_bytes(next("count")?) as usize;
    let mut timestamps = Vec::with_capacity(count);
    for _ in 0..count {
        timestamps.push(f64::from_le_bytes(next("timestamp")?));
    }
    PacketTrace::new(timestamps, weight, horizon)
}

/// Write a spectrum in the two-column text format.
pub fn write_spectrum(path: &Path, est: &SpectrumEstimate) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(
        out,
        "# segments {} record_length {}",
        est.segments(),
        fmt(est.record_length())
    )?;
    for (f, p) in est.freqs().iter().zip(est.psd()) {
        writeln!(out, "{} {}", fmt(*f), fmt(*p))?;
    }
    out.flush()?;
    Ok(())
}

/// Read a spectrum file; the header is optional (defaults: one segment,
/// record length 1/f_min).
pub fn read_spectrum(path: &Path) -> Result<SpectrumEstimate> {
    let reader = BufReader::new(File::open(path)?);
    let mut freqs = Vec::new();
    let mut psd = Vec::new();
    let mut segments: u32 = 1;
    let mut record_length: Option<f64> = None;

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if let Some(rest) = text.strip_prefix('#') {
            let tokens: Vec<&str> = rest.split_whitespace().collect();
            let mut i = 0;
            while i + 1 < tokens.len() {
                match tokens[i] {
                    "segments" => {
                        segments = tokens[i + 1].parse().map_err(|_| Error::Parse {
                            line: line_no,
                            message: format!("invalid segments {:?}", tokens[i + 1]),
                        })?;
                        i += 2;
                    }
                    "record_length" => {
                        record_length = Some(parse_field(tokens[i + 1], line_no, "record_length")?);
                        i += 2;
                    }
                    _ => i += 1,
                }
            }
            continue;
        }
        let mut parts = text.split_whitespace();
        let f = parse_field(parts.next().unwrap(), line_no, "frequency")?;
        let p = parse_field(
            parts.next().ok_or(Error::Parse {
                line: line_no,
                message: "missing psd column".into(),
            })?,
            line_no,
            "psd",
        )?;
        if parts.next().is_some() {
            return Err(Error::Parse {
                line: line_no,
                message: "more than two columns".into(),
            });
        }
        freqs.push(f);
        psd.push(p);
    }
    if freqs.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no spectrum points".into(),
        });
    }
    let record_length = record_length.unwrap_or(1.0 / freqs[0]);
    SpectrumEstimate::new(freqs, psd, segments, record_length)
}

/// Write a histogram as `bin_center count` lines with a bin-edge header.
pub fn write_histogram(path: &Path, edges: &[f64], counts: &[u64]) -> Result<()> {
    if edges.len() != counts.len() + 1 {
        return Err(Error::InvalidParameter(
            "edges must be one longer than counts".into(),
        ));
    }
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(
        out,
        "# bins {} range {} {}",
        counts.len(),
        fmt(edges[0]),
        fmt(edges[edges.len() - 1])
    )?;
    for (i, count) in counts.iter().enumerate() {
        let center = (edges[i] * edges[i + 1]).sqrt();
        writeln!(out, "{} {count}", fmt(center))?;
    }
    out.flush()?;
    Ok(())
}
