use std::fmt::Write as _;

use crate::error::{Error, Result};

pub const TIMESERIES_HEADER: &str = "t,x_mean,z_mean,sx,sy,sz,norm,overlap";

/// Sampled observables of one run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub x_mean: Vec<f64>,
    pub z_mean: Vec<f64>,
    pub sx: Vec<f64>,
    pub sy: Vec<f64>,
    pub sz: Vec<f64>,
    pub norm: Vec<f64>,
    pub overlap: Vec<f64>,
}

impl TimeSeries {
    pub fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            x_mean: Vec::with_capacity(n),
            z_mean: Vec::with_capacity(n),
            sx: Vec::with_capacity(n),
            sy: Vec::with_capacity(n),
            sz: Vec::with_capacity(n),
            norm: Vec::with_capacity(n),
            overlap: Vec::with_capacity(n),
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn push(&mut self, t: f64, r: [f64; 2], s: [f64; 3], norm: f64, overlap: f64) {
        self.times.push(t);
        self.x_mean.push(r[0]);
        self.z_mean.push(r[1]);
        self.sx.push(s[0]);
        self.sy.push(s[1]);
        self.sz.push(s[2]);
        self.norm.push(norm);
        self.overlap.push(overlap);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Position component along axis index 0 (x) or 1 (z).
    pub fn position(&self, axis: usize) -> &[f64] {
        if axis == 0 {
            &self.x_mean
        } else {
            &self.z_mean
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.times.len();
        let lens = [self.x_mean.len(), self.z_mean.len(), self.sx.len(), self.sy.len(), self.sz.len(), self.norm.len(), self.overlap.len()];
        if lens.iter().any(|&l| l != n) {
            return Err(Error::InvalidInput(format!("time series columns have unequal lengths {lens:?} vs {n}")));
        }
        if let Some(bad) = self.norm.iter().find(|v| (*v - 1.0).abs() > 1e-8) {
            return Err(Error::InvalidInput(format!("norm entry {bad} deviates from 1 by more than 1e-8")));
        }
        Ok(())
    }

    /// Largest |norm − 1| over the series.
    pub fn norm_drift(&self) -> f64 {
        self.norm.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.len() * 180);
        s.push_str(TIMESERIES_HEADER);
        s.push('\n');
        for k in 0..self.len() {
            let _ = writeln!(
                s,
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                self.times[k], self.x_mean[k], self.z_mean[k], self.sx[k], self.sy[k], self.sz[k], self.norm[k], self.overlap[k]
            );
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == TIMESERIES_HEADER => {}
            other => return Err(Error::InvalidInput(format!("unexpected time series header {other:?}"))),
        }
        let mut ts = TimeSeries::default();
        for (n, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let v: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidInput(format!("line {}: {e}", n + 2)))?;
            if v.len() != 8 {
                return Err(Error::InvalidInput(format!("line {}: expected 8 fields, got {}", n + 2, v.len())));
            }
            ts.push(v[0], [v[1], v[2]], [v[3], v[4], v[5]], v[6], v[7]);
        }
        Ok(ts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn csv_round_trip(rows in proptest::collection::vec(proptest::array::uniform8(-1e3f64..1e3), 0..20)) {
            let mut ts = TimeSeries::default();
            for r in &rows {
                ts.push(r[0], [r[1], r[2]], [r[3], r[4], r[5]], r[6], r[7]);
            }
            let back = TimeSeries::from_csv(&ts.to_csv()).unwrap();
            prop_assert_eq!(back, ts);
        }
    }

    #[test]
    fn header_is_fixed() {
        let ts = TimeSeries::default();
        assert_eq!(ts.to_csv(), "t,x_mean,z_mean,sx,sy,sz,norm,overlap\n");
        assert!(TimeSeries::from_csv("t,x\n").is_err());
    }

    #[test]
    fn validation_catches_norm_and_lengths() {
        let mut ts = TimeSeries::default();
        ts.push(0.0, [0.0; 2], [0.0; 3], 1.0, 1.0);
        assert!(ts.validate().is_ok());
        ts.norm[0] = 1.0 + 1e-6;
        assert!(ts.validate().is_err());
        ts.norm[0] = 1.0;
        ts.overlap.push(1.0);
        assert!(ts.validate().is_err());
    }
}
