//! CSV serialization of radial profiles.
//!
//! ```text
//! # origin=<value>
//! # tail=<amplitude>:<exponent>;...
//! r,value
//! <r>,<value>
//! ```
//!
//! Numbers are written with 17 significant digits so that a written profile
//! reads back bit-exactly. Other comment lines are ignored.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::profile::{PowerTail, PowerTerm, RadialProfile};
use crate::error::{Error, Result};

fn fmt(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Write a profile as CSV.
pub fn write_profile_csv<W: Write>(profile: &RadialProfile, mut w: W) -> Result<()> {
    writeln!(w, "# origin={}", fmt(profile.origin_value()))?;
    if let Some(t) = profile.tail() {
        let terms: Vec<String> = t
            .terms()
            .iter()
            .map(|p| format!("{}:{}", fmt(p.amplitude), fmt(p.exponent)))
            .collect();
        writeln!(w, "# tail={}", terms.join(";"))?;
    }
    writeln!(w, "r,value")?;
    for (r, v) in profile.radii().iter().zip(profile.values()) {
        writeln!(w, "{},{}", fmt(*r), fmt(*v))?;
    }
    Ok(())
}

/// Write a profile to a file.
pub fn write_profile_file(profile: &RadialProfile, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut w = std::io::BufWriter::new(file);
    write_profile_csv(profile, &mut w)?;
    w.flush()?;
    Ok(())
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("line {line}: not a number: {:?}", s.trim())))
}

/// Read a profile from CSV.
///
/// Without an origin comment the first sample value is used as the origin value.
pub fn read_profile_csv<R: Read>(reader: R) -> Result<RadialProfile> {
    let mut origin = None;
    let mut tail = None;
    let mut radii = Vec::new();
    let mut values = Vec::new();
    let mut saw_header = false;
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(c) = line.strip_prefix('#') {
            let c = c.trim();
            if let Some(x) = c.strip_prefix("origin=") {
                origin = Some(parse_f64(x, lineno)?);
            } else if let Some(x) = c.strip_prefix("tail=") {
                let mut terms = Vec::new();
                for part in x.split(';').filter(|p| !p.trim().is_empty()) {
                    let (a, p) = part
                        .split_once(':')
                        .ok_or_else(|| Error::Parse(format!("line {lineno}: bad tail term {part:?}")))?;
                    terms.push(PowerTerm {
                        amplitude: parse_f64(a, lineno)?,
                        exponent: parse_f64(p, lineno)?,
                    });
                }
                tail = Some(PowerTail::new(terms)?);
            }
            continue;
        }
        if !saw_header {
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols != ["r", "value"] {
                return Err(Error::Parse(format!(
                    "line {lineno}: expected header \"r,value\", got {line:?}"
                )));
            }
            saw_header = true;
            continue;
        }
        let (r, v) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("line {lineno}: expected two columns")))?;
        let r = parse_f64(r, lineno)?;
        if let Some(&last) = radii.last() {
            if r <= last {
                return Err(Error::Parse(format!(
                    "line {lineno}: radii must be strictly increasing ({last} then {r})"
                )));
            }
        }
        radii.push(r);
        values.push(parse_f64(v, lineno)?);
    }
    if values.is_empty() {
        return Err(Error::Parse("no samples".into()));
    }
    let origin = origin.unwrap_or(values[0]);
    let profile = RadialProfile::new(radii, values, origin)?;
    Ok(match tail {
        Some(t) => profile.with_tail(t),
        None => profile,
    })
}

/// Read a profile from a file.
pub fn read_profile_file(path: &Path) -> Result<RadialProfile> {
    let file =
        std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_profile_csv(file)
}
