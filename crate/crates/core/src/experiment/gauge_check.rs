//! Field-strength spectrum check of a laser configuration.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::gauge::{field_strength_spectrum, LaserConfig};

/// Allowed deviation of each eigenvalue from ±2ħκ².
pub const GAUGE_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugePointReport {
    pub point: [f64; 2],
    pub spectrum: [f64; 2],
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaugeCheck {
    pub points: Vec<GaugePointReport>,
    pub worst: GaugePointReport,
}

impl GaugeCheck {
    pub fn passed(&self) -> bool {
        self.worst.deviation <= GAUGE_TOLERANCE
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,z,lambda_minus,lambda_plus,deviation\n");
        for p in &self.points {
            let _ = writeln!(s, "{:e},{:e},{:e},{:e},{:e}", p.point[0], p.point[1], p.spectrum[0], p.spectrum[1], p.deviation);
        }
        s
    }
}

/// Points on a golden-ratio lattice covering one laser period in x and z.
pub fn sample_points(cfg: &LaserConfig, n: usize) -> Vec<[f64; 2]> {
    let period = 2.0 * std::f64::consts::PI / cfg.k_l;
    let g = 0.5 * (5f64.sqrt() - 1.0);
    (0..n)
        .map(|k| {
            let u = (k as f64 + 0.5) / n as f64;
            let w = ((k as f64 + 0.5) * g).fract();
            [period * (u - 0.5), period * (w - 0.5)]
        })
        .collect()
}

/// Evaluates the spectrum at `n_points` points and writes
/// `gauge_spectrum.csv` into `outdir`.
pub fn verify_gauge(cfg: &LaserConfig, n_points: usize, outdir: &Path) -> Result<GaugeCheck> {
    if n_points == 0 {
        return Err(Error::Config("n_points must be at least 1".into()));
    }
    cfg.validate()?;
    let points = sample_points(cfg, n_points)
        .into_iter()
        .map(|p| {
            let s = field_strength_spectrum(cfg, p)?;
            let deviation = (s[0] + 2.0).abs().max((s[1] - 2.0).abs());
            Ok(GaugePointReport { point: p, spectrum: s, deviation })
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = *points.iter().max_by(|a, b| a.deviation.total_cmp(&b.deviation)).expect("n_points >= 1");
    let check = GaugeCheck { points, worst };
    fs::create_dir_all(outdir).map_err(|e| Error::io(outdir, e))?;
    let path = outdir.join("gauge_spectrum.csv");
    fs::write(&path, check.to_csv()).map_err(|e| Error::io(&path, e))?;
    Ok(check)
}
