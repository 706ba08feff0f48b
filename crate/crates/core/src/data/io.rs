use std::io::{BufRead, Write};

use super::{CauchyData, GRule};
use crate::error::{Error, Result};

/// Writes `N delta seed`, then one `theta fx fy` line per sample.
pub fn write_cauchy_data<W: Write>(data: &CauchyData, mut out: W) -> Result<()> {
    let mut s = format!("{} {} {}\n", data.len(), data.delta, data.seed);
    for (t, v) in data.theta.iter().zip(&data.values) {
        s.push_str(&format!("{t:e} {:e} {:e}\n", v[0], v[1]));
    }
    out.write_all(s.as_bytes())?;
    Ok(())
}

/// Reads a file written by [`write_cauchy_data`]. The traction rule is not
/// part of the file and must be supplied.
pub fn read_cauchy_data<R: BufRead>(input: R, g: GRule) -> Result<CauchyData> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty data file".into()))??;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 3 {
        return Err(Error::Parse("header must be 'N delta seed'".into()));
    }
    let n: usize = h[0]
        .parse()
        .map_err(|_| Error::Parse("bad sample count".into()))?;
    let delta: f64 = h[1]
        .parse()
        .map_err(|_| Error::Parse("bad noise level".into()))?;
    let seed: u64 = h[2].parse().map_err(|_| Error::Parse("bad seed".into()))?;
    let mut theta = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for (k, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let v: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse(format!("line {}: bad number", k + 2)))?;
        if v.len() != 3 {
            return Err(Error::Parse(format!(
                "line {}: expected 'theta fx fy'",
                k + 2
            )));
        }
        theta.push(v[0]);
        values.push([v[1], v[2]]);
    }
    if theta.len() != n {
        return Err(Error::Parse(format!(
            "header announces {n} samples, found {}",
            theta.len()
        )));
    }
    let mut data = CauchyData::new(g, theta, values).map_err(|e| Error::Parse(e.to_string()))?;
    data.delta = delta;
    data.seed = seed;
    Ok(data)
}
