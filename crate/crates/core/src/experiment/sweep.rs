//! (v_d, ω_d) parameter sweeps over a base scenario.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};

use super::report::{analyze, fit_scenario, predicted_ratios, signed_amp_ratio};
use super::{simulate, ScenarioConfig, ScenarioKind};

/// |J₀| below which a point counts as a CDT point.
const CDT_J0: f64 = 1e-6;
/// |J₀| below which a row is flagged as near a CDT point.
const NEAR_CDT_J0: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub enum SweepStatus {
    Ok,
    /// Case-b point with J₀ = 0: ZB frequency vanishes, no fit attempted.
    Cdt,
    /// Case-a point whose ZB is below the fit's noise floor; amplitude
    /// ratio reported as 0.
    NoOscillation,
    Failed(String),
}

impl SweepStatus {
    pub fn label(&self) -> &'static str {
        match self {
            SweepStatus::Ok => "ok",
            SweepStatus::Cdt => "cdt",
            SweepStatus::NoOscillation => "no-oscillation",
            SweepStatus::Failed(_) => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub v_d: f64,
    pub omega_d: f64,
    pub j0: f64,
    pub near_cdt: bool,
    pub status: SweepStatus,
    pub amp_ratio: f64,
    pub freq_ratio: f64,
    pub tau: f64,
    pub predicted_amp_ratio: f64,
    pub predicted_freq_ratio: f64,
    /// max of the relative amplitude- and frequency-ratio errors.
    pub prediction_error: f64,
}

/// Row-major (v_d outer, ω_d inner) grid of sweep points.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub v_d: Vec<f64>,
    pub omega_d: Vec<f64>,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn point(&self, i_v: usize, i_w: usize) -> &SweepPoint {
        &self.points[i_v * self.omega_d.len() + i_w]
    }

    fn matrix(&self, f: impl Fn(&SweepPoint) -> f64) -> Vec<Vec<f64>> {
        (0..self.v_d.len()).map(|i| (0..self.omega_d.len()).map(|j| f(self.point(i, j))).collect()).collect()
    }

    pub fn amp_ratio(&self) -> Vec<Vec<f64>> {
        self.matrix(|p| p.amp_ratio)
    }

    pub fn freq_ratio(&self) -> Vec<Vec<f64>> {
        self.matrix(|p| p.freq_ratio)
    }

    pub fn tau(&self) -> Vec<Vec<f64>> {
        self.matrix(|p| p.tau)
    }

    pub fn prediction_error(&self) -> Vec<Vec<f64>> {
        self.matrix(|p| p.prediction_error)
    }

    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| matches!(p.status, SweepStatus::Failed(_))).count()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "v_d,omega_d,j0,status,near_cdt,amp_ratio,freq_ratio,tau,predicted_amp_ratio,predicted_freq_ratio,prediction_error\n",
        );
        for p in &self.points {
            let _ = writeln!(
                s,
                "{:e},{:e},{:e},{},{},{:e},{:e},{:e},{:e},{:e},{:e}",
                p.v_d,
                p.omega_d,
                p.j0,
                p.status.label(),
                p.near_cdt,
                p.amp_ratio,
                p.freq_ratio,
                p.tau,
                p.predicted_amp_ratio,
                p.predicted_freq_ratio,
                p.prediction_error
            );
        }
        s
    }
}

fn point_name(base: &str, v: f64, w: f64) -> String {
    format!("{base}-v{v}-w{w}")
}

/// Runs every (v_d, ω_d) combination of `base` and compares the ZB against
/// the undriven base. `workers` pins the pool size; `None` uses the global
/// pool. Writes `sweep.csv` and one summary per point into `outdir`.
pub fn run_sweep(
    base: &ScenarioConfig,
    v_d: &[f64],
    omega_d: &[f64],
    outdir: &Path,
    workers: Option<usize>,
) -> Result<SweepResult> {
    if v_d.is_empty() || omega_d.is_empty() {
        return Err(Error::Config("sweep lists must be nonempty".into()));
    }
    let mut configs = Vec::with_capacity(v_d.len() * omega_d.len());
    for &v in v_d {
        for &w in omega_d {
            let cfg = ScenarioConfig {
                name: point_name(&base.name, v, w),
                v_d: v,
                omega_d: w,
                reference: None,
                density_snapshots: 0,
                ..base.clone()
            };
            let s = cfg.build()?;
            if s.kind() == ScenarioKind::Resonance {
                return Err(Error::Config(format!("sweep point v_d = {v}, omega_d = {w} is on resonance")));
            }
            configs.push(s);
        }
    }
    fs::create_dir_all(outdir).map_err(|e| Error::io(outdir, e))?;

    let reference = ScenarioConfig { density_snapshots: 0, ..base.undriven() }.build()?;
    let ref_out = simulate(&reference)?;
    let ref_fit = fit_scenario(&reference, &ref_out.series)?;

    let run_point = |s: &super::Scenario| -> SweepPoint {
        let j0 = s.j0();
        let (pa, pf) = predicted_ratios(s);
        let mut p = SweepPoint {
            v_d: s.drive.v_d,
            omega_d: s.drive.omega_d,
            j0,
            near_cdt: j0.abs() < NEAR_CDT_J0,
            status: SweepStatus::Ok,
            amp_ratio: f64::NAN,
            freq_ratio: f64::NAN,
            tau: f64::NAN,
            predicted_amp_ratio: pa.unwrap_or(f64::NAN),
            predicted_freq_ratio: pf.unwrap_or(f64::NAN),
            prediction_error: f64::NAN,
        };
        if s.kind() == ScenarioKind::CaseB && j0.abs() < CDT_J0 {
            p.status = SweepStatus::Cdt;
            return p;
        }
        let result = simulate(s).and_then(|out| {
            let rep = analyze(s, &out, Some((&reference.name, &ref_fit)))?;
            let path = outdir.join(format!("{}.summary.txt", s.name));
            fs::write(&path, rep.to_summary(s)).map_err(|e| Error::io(&path, e))?;
            Ok(rep)
        });
        match result {
            Ok(rep) => {
                p.amp_ratio = signed_amp_ratio(&rep.measured, &ref_fit);
                p.freq_ratio = rep.measured.omega / ref_fit.omega;
                p.tau = rep.measured.tau;
                let ea = (p.amp_ratio - p.predicted_amp_ratio).abs() / p.predicted_amp_ratio.abs();
                let ef = (p.freq_ratio - p.predicted_freq_ratio).abs() / p.predicted_freq_ratio.abs();
                p.prediction_error = ea.max(ef);
            }
            Err(Error::NoOscillation { .. }) if s.kind() == ScenarioKind::CaseA => {
                p.status = SweepStatus::NoOscillation;
                p.amp_ratio = 0.0;
            }
            Err(e) => p.status = SweepStatus::Failed(e.to_string()),
        }
        p
    };

    let points: Vec<SweepPoint> = match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?
            .install(|| configs.par_iter().map(run_point).collect()),
        None => configs.par_iter().map(run_point).collect(),
    };
    let result = SweepResult { v_d: v_d.to_vec(), omega_d: omega_d.to_vec(), points };
    let path = outdir.join("sweep.csv");
    fs::write(&path, result.to_csv()).map_err(|e| Error::io(&path, e))?;
    Ok(result)
}
