//! ZB analysis of a simulated scenario and the on-disk record.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::efftheory::{
    case_a_prediction, case_b_prediction, lifetime_estimate, zb_closed_form, Axis, LifetimeRegime, ResonanceTheory,
};
use crate::error::{Error, Result};
use crate::observables::{fit_zb, FitOptions, TimeSeries, ZbSummary};
use crate::units::{to_si, Quantity, QuantityKind};

use super::{simulate, Scenario, ScenarioKind, SimulationOutput};

/// Measured ZB of a scenario next to the effective-theory values.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub name: String,
    pub kind: ScenarioKind,
    pub axis: Axis,
    pub j0: f64,
    pub measured: ZbSummary,
    pub predicted_amplitude: Option<f64>,
    pub predicted_omega: Option<f64>,
    pub predicted_tau: Option<f64>,
    pub reference: Option<ReferenceComparison>,
    pub norm_drift: f64,
    pub max_method_gap: f64,
    pub min_overlap: f64,
    pub unimodal_all: bool,
    pub si: Option<SiValues>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceComparison {
    pub name: String,
    pub summary: ZbSummary,
    /// Signed: negative when the oscillation is in antiphase with the reference.
    pub amp_ratio: f64,
    pub freq_ratio: f64,
    pub tau_ratio: f64,
    pub predicted_amp_ratio: Option<f64>,
    pub predicted_freq_ratio: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiValues {
    /// Measured ZB angular frequency, 1/s.
    pub zb_omega: f64,
    /// Drive angular frequency, 1/s.
    pub omega_d: f64,
    /// Peak mirror velocity v_d/2, m/s.
    pub peak_mirror_velocity: f64,
    /// ZB amplitude, m.
    pub zb_amplitude: f64,
}

pub(crate) fn fit_options(s: &Scenario) -> FitOptions {
    let omega_max = s.config.fit_omega_max.or((s.drive.v_d != 0.0).then_some(0.5 * s.drive.omega_d));
    FitOptions { omega_max, ..FitOptions::default() }
}

/// Fits the ZB of a simulated scenario along its ZB axis.
pub fn fit_scenario(s: &Scenario, series: &TimeSeries) -> Result<ZbSummary> {
    fit_zb(series, s.kind().zb_axis(), &fit_options(s))
}

fn closed_form_fit(s: &Scenario) -> Option<ZbSummary> {
    let times = s.sample_times();
    let traj = zb_closed_form(&s.spec, &s.grid, s.j0(), &times).ok()?;
    let mut ts = TimeSeries::with_capacity(times.len());
    for (t, r) in times.iter().zip(traj) {
        ts.push(*t, r, [0.0; 3], 1.0, 1.0);
    }
    let opts = FitOptions { omega_max: None, ..FitOptions::default() };
    fit_zb(&ts, s.kind().zb_axis(), &opts).ok()
}

/// Ratio of signed amplitudes; the sign compares the oscillation phases.
pub(crate) fn signed_amp_ratio(m: &ZbSummary, r: &ZbSummary) -> f64 {
    let sign = if (m.phase - r.phase).cos() >= 0.0 { 1.0 } else { -1.0 };
    sign * m.amplitude / r.amplitude
}

pub(crate) fn predicted_ratios(s: &Scenario) -> (Option<f64>, Option<f64>) {
    match s.kind() {
        ScenarioKind::CaseA => {
            let p = case_a_prediction(&s.drive);
            (Some(p.amp_ratio), Some(p.freq_ratio))
        }
        ScenarioKind::CaseB => match case_b_prediction(&s.drive) {
            Ok(p) => (Some(p.amp_ratio), Some(p.freq_ratio)),
            Err(_) => (None, None),
        },
        ScenarioKind::Resonance => (None, None),
    }
}

/// Builds the report from a finished simulation and, when available, the
/// fitted reference ZB.
pub fn analyze(s: &Scenario, out: &SimulationOutput, reference: Option<(&str, &ZbSummary)>) -> Result<ScenarioReport> {
    let kind = s.kind();
    let measured = fit_scenario(s, &out.series)?;
    let (predicted_amplitude, predicted_omega, predicted_tau) = match kind {
        ScenarioKind::Resonance => {
            let th = ResonanceTheory::new(&s.drive, &s.spec)?;
            let tau = lifetime_estimate(&s.spec, s.j0(), LifetimeRegime::Resonance { v_d: s.drive.v_d })?;
            (None, Some(th.zb_freq), Some(tau))
        }
        _ => {
            let cf = closed_form_fit(s);
            let tau = lifetime_estimate(&s.spec, s.j0(), LifetimeRegime::StaticLike).ok();
            (cf.map(|c| c.amplitude), cf.map(|c| c.omega), tau)
        }
    };
    let reference = reference.map(|(name, r)| {
        let (pa, pf) = predicted_ratios(s);
        ReferenceComparison {
            name: name.to_string(),
            summary: *r,
            amp_ratio: signed_amp_ratio(&measured, r),
            freq_ratio: measured.omega / r.omega,
            tau_ratio: measured.tau / r.tau,
            predicted_amp_ratio: pa,
            predicted_freq_ratio: pf,
        }
    });
    let min_overlap = out.series.overlap.iter().copied().fold(f64::INFINITY, f64::min);
    let si = s.scales.map(|sc| SiValues {
        zb_omega: to_si(&sc, Quantity::new(QuantityKind::Frequency, measured.omega)),
        omega_d: to_si(&sc, Quantity::new(QuantityKind::Frequency, s.drive.omega_d)),
        peak_mirror_velocity: to_si(&sc, Quantity::new(QuantityKind::Velocity, 0.5 * s.drive.v_d)),
        zb_amplitude: to_si(&sc, Quantity::new(QuantityKind::Length, measured.amplitude)),
    });
    Ok(ScenarioReport {
        name: s.name.clone(),
        kind,
        axis: kind.zb_axis(),
        j0: s.j0(),
        measured,
        predicted_amplitude,
        predicted_omega,
        predicted_tau,
        reference,
        norm_drift: out.series.norm_drift(),
        max_method_gap: out.max_method_gap,
        min_overlap,
        unimodal_all: out.unimodal_all,
        si,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or("nan".into(), |x| format!("{x:e}"))
}

fn rel_err(measured: f64, predicted: Option<f64>) -> Option<f64> {
    predicted.map(|p| (measured - p).abs() / p.abs())
}

impl ScenarioReport {
    /// `key = value` lines; values are numbers in scientific notation,
    /// `nan` when undefined.
    pub fn to_summary(&self, s: &Scenario) -> String {
        let m = &self.measured;
        let mut o = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(o, "{k} = {v}");
        };
        kv("scenario", self.name.clone());
        kv("case", self.kind.name().into());
        kv("axis", self.axis.name().into());
        kv("v_d", format!("{:e}", s.drive.v_d));
        kv("omega_d", format!("{:e}", s.drive.omega_d));
        kv("bessel_arg", format!("{:e}", s.drive.bessel_arg()));
        kv("j0", format!("{:e}", self.j0));
        kv("t_end", format!("{:e}", s.t_end));
        kv("dt", format!("{:e}", s.stepper.effective_dt(&s.drive)));
        kv("grid_n", format!("{}", s.grid.n_x()));
        kv("measured_amplitude", format!("{:e}", m.amplitude));
        kv("measured_omega", format!("{:e}", m.omega));
        kv("measured_tau", format!("{:e}", m.tau));
        kv("measured_phase", format!("{:e}", m.phase));
        kv("measured_drift_velocity_x", format!("{:e}", m.drift_velocity[0]));
        kv("measured_drift_velocity_z", format!("{:e}", m.drift_velocity[1]));
        kv("fit_residual", format!("{:e}", m.fit_residual));
        kv("predicted_amplitude", opt(self.predicted_amplitude));
        kv("predicted_omega", opt(self.predicted_omega));
        kv("predicted_tau", opt(self.predicted_tau));
        kv("amplitude_ratio_to_predicted", opt(self.predicted_amplitude.map(|p| m.amplitude / p)));
        kv("omega_ratio_to_predicted", opt(self.predicted_omega.map(|p| m.omega / p)));
        match &self.reference {
            Some(r) => {
                kv("reference", r.name.clone());
                kv("reference_amplitude", format!("{:e}", r.summary.amplitude));
                kv("reference_omega", format!("{:e}", r.summary.omega));
                kv("reference_tau", format!("{:e}", r.summary.tau));
                kv("measured_amp_ratio", format!("{:e}", r.amp_ratio));
                kv("predicted_amp_ratio", opt(r.predicted_amp_ratio));
                kv("amp_ratio_error", opt(rel_err(r.amp_ratio, r.predicted_amp_ratio)));
                kv("measured_freq_ratio", format!("{:e}", r.freq_ratio));
                kv("predicted_freq_ratio", opt(r.predicted_freq_ratio));
                kv("freq_ratio_error", opt(rel_err(r.freq_ratio, r.predicted_freq_ratio)));
                kv("tau_ratio", format!("{:e}", r.tau_ratio));
            }
            None => kv("reference", "none".into()),
        }
        kv("norm_drift", format!("{:e}", self.norm_drift));
        kv("max_method_gap", format!("{:e}", self.max_method_gap));
        kv("min_overlap", format!("{:e}", self.min_overlap));
        kv("unimodal", format!("{}", self.unimodal_all));
        if let Some(si) = &self.si {
            kv("si_zb_omega_per_s", format!("{:e}", si.zb_omega));
            kv("si_omega_d_per_s", format!("{:e}", si.omega_d));
            kv("si_peak_mirror_velocity_m_per_s", format!("{:e}", si.peak_mirror_velocity));
            kv("si_zb_amplitude_m", format!("{:e}", si.zb_amplitude));
        }
        o
    }
}

/// Reads a numeric value out of a summary text.
pub fn summary_value(text: &str, key: &str) -> Option<f64> {
    text.lines().find_map(|l| {
        let (k, v) = l.split_once('=')?;
        (k.trim() == key).then(|| v.trim().parse().ok()).flatten()
    })
}

struct OutputSet {
    written: Vec<PathBuf>,
    keep: bool,
}

impl OutputSet {
    fn write(&mut self, path: PathBuf, contents: &str) -> Result<()> {
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }
}

impl Drop for OutputSet {
    fn drop(&mut self) {
        if !self.keep {
            for p in &self.written {
                let _ = fs::remove_file(p);
            }
        }
    }
}

/// Simulates the scenario (and its reference), fits both, and writes
/// `<name>.timeseries.csv`, `<name>.summary.txt`, `<name>.config.txt` and
/// the density snapshots `<name>.density.t<k>.csv` into `outdir`. Nothing
/// is left behind on failure.
pub fn run_scenario(s: &Scenario, outdir: &Path) -> Result<ScenarioReport> {
    fs::create_dir_all(outdir).map_err(|e| Error::io(outdir, e))?;
    let reference = match s.reference_config()? {
        Some(cfg) => {
            let r = cfg.build()?;
            log::info!("{}: simulating reference {}", s.name, r.name);
            let out = simulate(&r)?;
            Some((r.name.clone(), fit_scenario(&r, &out.series)?))
        }
        None => None,
    };
    let out = simulate(s)?;
    let report = analyze(s, &out, reference.as_ref().map(|(n, z)| (n.as_str(), z)))?;

    let mut files = OutputSet { written: Vec::new(), keep: false };
    let path = |suffix: &str| outdir.join(format!("{}.{suffix}", s.name));
    files.write(path("timeseries.csv"), &out.series.to_csv())?;
    for (k, (_, d)) in out.snapshots.iter().enumerate() {
        files.write(path(&format!("density.t{k}.csv")), &d.to_csv())?;
    }
    files.write(path("config.txt"), &s.config.to_text())?;
    files.write(path("summary.txt"), &report.to_summary(s))?;
    files.keep = true;
    Ok(report)
}
