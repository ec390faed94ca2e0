//! Scenario runner: presets, simulation with sampled observables, ZB
//! analysis against the effective theory, sweeps, and the gauge check.

mod config;
mod gauge_check;
mod report;
mod sweep;

use crate::dynamics::{evolve_sampled, rotate_frame, FrameDirection, StepperConfig};
use crate::efftheory::{j0_factor, Axis, ResonanceTheory};
use crate::error::Result;
use crate::observables::{
    branch_overlap, branch_overlap_with, position_expectation_both, spin_expectation, to_position_density,
    PositionDensity, TimeSeries,
};
use crate::spin::field_eigenvectors;
use crate::state::{make_gaussian, DriveParams, MomentumGrid, PacketSpec, SpinorField};
use crate::units::Scales;

pub use config::{ScenarioConfig, SpinorChoice, PRESETS};
pub use gauge_check::{verify_gauge, GaugeCheck, GaugePointReport};
pub use report::{analyze, run_scenario, summary_value, ScenarioReport};
pub use sweep::{run_sweep, SweepPoint, SweepResult, SweepStatus};

/// Fully validated simulation setup.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub spec: PacketSpec,
    pub drive: DriveParams,
    pub grid: MomentumGrid,
    pub stepper: StepperConfig,
    pub t_end: f64,
    pub sample_dt: f64,
    pub scales: Option<Scales>,
    /// Record the scenario was built from.
    pub config: ScenarioConfig,
}

/// Which effective description applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    /// Packet moving along z; ZB along x.
    CaseA,
    /// Packet moving along x; ZB along z.
    CaseB,
    /// Driven with p_x0 within one momentum width of ω_d/2.
    Resonance,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::CaseA => "case-a",
            ScenarioKind::CaseB => "case-b",
            ScenarioKind::Resonance => "resonance",
        }
    }

    pub fn zb_axis(self) -> Axis {
        match self {
            ScenarioKind::CaseA | ScenarioKind::Resonance => Axis::X,
            ScenarioKind::CaseB => Axis::Z,
        }
    }
}

impl Scenario {
    pub fn preset(name: &str) -> Result<Self> {
        ScenarioConfig::preset(name)?.build()
    }

    pub fn kind(&self) -> ScenarioKind {
        let detuning = self.spec.p0[0] - 0.5 * self.drive.omega_d;
        if self.drive.v_d != 0.0 && detuning.abs() <= self.spec.sigma_p[0] {
            ScenarioKind::Resonance
        } else if self.spec.p0[1].abs() >= self.spec.p0[0].abs() {
            ScenarioKind::CaseA
        } else {
            ScenarioKind::CaseB
        }
    }

    pub fn j0(&self) -> f64 {
        j0_factor(&self.drive)
    }

    /// Sample times k·t_end/n with n = ⌈t_end/sample_dt⌉.
    pub fn sample_times(&self) -> Vec<f64> {
        let n = (self.t_end / self.sample_dt - 1e-9).ceil().max(1.0) as usize;
        (0..=n).map(|k| self.t_end * k as f64 / n as f64).collect()
    }

    /// Sample indices of the density snapshots, evenly spread over the run.
    pub fn snapshot_indices(&self) -> Vec<usize> {
        let n = self.sample_times().len() - 1;
        match self.config.density_snapshots {
            0 => Vec::new(),
            1 => vec![0],
            m => {
                let mut v: Vec<usize> = (0..m).map(|k| ((k * n) as f64 / (m - 1) as f64).round() as usize).collect();
                v.dedup();
                v
            }
        }
    }

    /// Scenario the ZB ratios are measured against, if any.
    pub fn reference_config(&self) -> Result<Option<ScenarioConfig>> {
        let base = &self.config;
        Ok(match &base.reference {
            Some(name) if name == &base.name => None,
            Some(name) if ScenarioConfig::is_preset(name) => {
                let mut r = ScenarioConfig::preset(name)?;
                // Sampling and resolution follow the scenario under test.
                r.sample_dt = base.sample_dt;
                r.grid_n = base.grid_n;
                r.grid_halfwidth_sigmas = base.grid_halfwidth_sigmas;
                r.density_snapshots = 0;
                Some(r)
            }
            Some(name) => return Err(crate::Error::Config(format!("reference '{name}' is not a preset"))),
            None if base.v_d != 0.0 => Some(ScenarioConfig { density_snapshots: 0, ..base.undriven() }),
            None => None,
        })
    }
}

/// Everything recorded while evolving one scenario.
#[derive(Debug, Clone)]
pub struct SimulationOutput {
    pub series: TimeSeries,
    pub snapshots: Vec<(f64, PositionDensity)>,
    /// Largest |momentum-gradient − position-sum| / max(|r|, 1) over samples.
    pub max_method_gap: f64,
    pub unimodal_all: bool,
    pub final_field: SpinorField,
}

/// Evolves the scenario and samples observables at every sample time.
pub fn simulate(s: &Scenario) -> Result<SimulationOutput> {
    let field = make_gaussian(&s.spec, &s.grid)?;
    let times = s.sample_times();
    let snaps = s.snapshot_indices();
    let kind = s.kind();
    let theory = match kind {
        ScenarioKind::Resonance => Some(ResonanceTheory::new(&s.drive, &s.spec)?),
        _ => None,
    };
    let j0 = s.j0();
    let mut series = TimeSeries::with_capacity(times.len());
    let mut snapshots = Vec::with_capacity(snaps.len());
    let mut max_gap = 0.0f64;
    let mut unimodal_all = true;
    let report_every = (times.len() / 10).max(1);
    let final_field = evolve_sampled(&field, &s.drive, &s.stepper, 0.0, &times, |k, t, f| {
        let (grad, sum) = position_expectation_both(f)?;
        for a in 0..2 {
            max_gap = max_gap.max((grad[a] - sum[a]).abs() / grad[a].abs().max(1.0));
        }
        let overlap = match &theory {
            Some(th) => {
                let rotated = rotate_frame(f, s.drive.omega_d, t, FrameDirection::In);
                branch_overlap_with(&rotated, |p| field_eigenvectors(th.field(p))).overlap
            }
            None => branch_overlap(f, j0).overlap,
        };
        series.push(t, grad, spin_expectation(f), f.norm_sqr(), overlap);
        if snaps.contains(&k) {
            let d = to_position_density(f);
            unimodal_all &= d.is_unimodal();
            snapshots.push((t, d));
        }
        if k % report_every == 0 {
            log::info!("{}: t = {t:.3} / {:.3}", s.name, s.t_end);
        }
        Ok(())
    })?;
    series.validate()?;
    Ok(SimulationOutput { series, snapshots, max_method_gap: max_gap, unimodal_all, final_field })
}
