//! Per-time schedules given as `(time, value)` records.
//!
//! A schedule file is CSV with a header row and two columns. The first column
//! is a strictly increasing time stamp in any unit (years, say); it is mapped
//! affinely so that the first record sits at `t = 0` and the last at `t = 1`.

use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    /// Times rescaled to `[0, 1]`.
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl Schedule {
    /// Builds a schedule from raw stamps, rescaling them to `[0, 1]`.
    pub fn new(stamps: &[f64], values: &[f64]) -> Result<Self, String> {
        if stamps.len() != values.len() {
            return Err("time and value columns differ in length".into());
        }
        if stamps.len() < 2 {
            return Err("a schedule needs at least two records".into());
        }
        if let Some(i) = stamps.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(format!(
                "time stamps must increase strictly (record {} has {} after {})",
                i + 2,
                stamps[i + 1],
                stamps[i]
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err("schedule values must be finite".into());
        }
        let (a, b) = (stamps[0], stamps[stamps.len() - 1]);
        let mut times: Vec<f64> = stamps.iter().map(|s| (s - a) / (b - a)).collect();
        *times.last_mut().unwrap() = 1.0;
        Ok(Self {
            times,
            values: values.to_vec(),
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&bytes).map_err(|m| Error::format(path, m))
    }

    pub fn parse(bytes: &[u8]) -> Result<Self, String> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(bytes);
        let mut stamps = Vec::new();
        let mut values = Vec::new();
        for (n, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| e.to_string())?;
            if rec.len() != 2 {
                return Err(format!("record {}: expected 2 columns, found {}", n + 1, rec.len()));
            }
            let num = |i: usize| {
                rec[i]
                    .parse::<f64>()
                    .map_err(|_| format!("record {}: `{}` is not a number", n + 1, &rec[i]))
            };
            stamps.push(num(0)?);
            values.push(num(1)?);
        }
        Self::new(&stamps, &values)
    }

    /// Piecewise-linear value at `t ∈ [0, 1]`.
    pub fn at(&self, t: f64) -> f64 {
        let k = self.times.partition_point(|&s| s <= t);
        if k == 0 {
            return self.values[0];
        }
        if k == self.times.len() {
            return self.values[k - 1];
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let w = (t - t0) / (t1 - t0);
        (1.0 - w) * self.values[k - 1] + w * self.values[k]
    }

    /// Values at the centered times `(j + 1/2)/n`.
    pub fn resample(&self, n: usize) -> Vec<f64> {
        (0..n).map(|j| self.at((j as f64 + 0.5) / n as f64)).collect()
    }
}
