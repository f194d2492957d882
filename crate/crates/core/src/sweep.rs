//! Sweep grids and the `x,sigma,value` CSV format.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "x,sigma,value";

/// One row of a sweep: χ or capacity (bits) at correlation `x` and spread `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub x: f64,
    pub sigma: f64,
    pub value: f64,
}

/// Inclusive grid `start:stop:step`. The stop value is kept whenever it lies
/// within half a step of the last generated point.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    // Decimal places of start and step, used to generate exact decimal values.
    decimals: Option<u32>,
}

fn decimals_of(s: &str) -> Option<u32> {
    let s = s.trim();
    if s.contains(['e', 'E']) {
        return None;
    }
    let d = s.split_once('.').map_or(0, |(_, frac)| frac.len() as u32);
    (d <= 12).then_some(d)
}

impl Grid {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        let g = Self { start, stop, step, decimals: None };
        g.check()?;
        Ok(g)
    }

    fn check(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.step.is_finite()) {
            return Err(Error::InvalidGrid("non-finite bound".into()));
        }
        if self.step <= 0.0 {
            return Err(Error::InvalidGrid(format!("step must be positive, got {}", self.step)));
        }
        if self.start > self.stop {
            return Err(Error::InvalidGrid(format!("start {} exceeds stop {}", self.start, self.stop)));
        }
        if (self.stop - self.start) / self.step > 1e6 {
            return Err(Error::InvalidGrid("more than a million grid points".into()));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 0.5).floor() as i64 + 1;
        match self.decimals {
            Some(d) => {
                let scale = 10f64.powi(d as i32);
                let s0 = (self.start * scale).round();
                let ds = (self.step * scale).round();
                (0..count).map(|k| (s0 + k as f64 * ds) / scale).collect()
            }
            None => (0..count).map(|k| self.start + k as f64 * self.step).collect(),
        }
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let parse = |t: &str| t.trim().parse::<f64>().map_err(|_| Error::InvalidGrid(format!("bad number `{t}`")));
        let mut g = match parts.as_slice() {
            [v] => {
                let v = parse(v)?;
                Grid { start: v, stop: v, step: 1.0, decimals: None }
            }
            [a, b, c] => Grid { start: parse(a)?, stop: parse(b)?, step: parse(c)?, decimals: None },
            _ => return Err(Error::InvalidGrid(format!("expected start:stop:step, got `{s}`"))),
        };
        g.check()?;
        if let [a, _, c] = parts.as_slice() {
            g.decimals = decimals_of(a).zip(decimals_of(c)).map(|(p, q)| p.max(q));
        } else {
            g.decimals = decimals_of(parts[0]);
        }
        Ok(g)
    }
}

/// Comma-separated list of floats, e.g. `0.1,0.2,0.3`.
pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::InvalidGrid(format!("bad number `{t}`"))))
        .collect::<Result<_>>()?;
    if v.is_empty() {
        return Err(Error::InvalidGrid("empty list".into()));
    }
    Ok(v)
}

/// CSV text with LF endings; floats use Rust's shortest round-trip formatting.
pub fn render_csv(points: &[CurvePoint]) -> Result<String> {
    if points.is_empty() {
        return Err(Error::InvalidGrid("no points to write".into()));
    }
    let mut out = String::with_capacity(32 * (points.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in points {
        writeln!(out, "{},{},{}", p.x, p.sigma, p.value).expect("writing to a String");
    }
    Ok(out)
}

pub fn write_csv(points: &[CurvePoint], path: &Path) -> Result<()> {
    std::fs::write(path, render_csv(points)?)?;
    Ok(())
}

pub fn read_csv(text: &str) -> Result<Vec<CurvePoint>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::InvalidGrid("missing x,sigma,value header".into()));
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            let f = parse_list(l)?;
            match f.as_slice() {
                [x, sigma, value] => Ok(CurvePoint { x: *x, sigma: *sigma, value: *value }),
                _ => Err(Error::InvalidGrid(format!("malformed row `{l}`"))),
            }
        })
        .collect()
}
