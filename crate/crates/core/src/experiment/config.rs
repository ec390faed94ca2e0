//! Flat `key = value` scenario records and the built-in presets.

use std::fmt::Write as _;

use crate::dynamics::{Scheme, StepperConfig};
use crate::error::{Error, Result};
use crate::state::{
    default_spinor, DriveParams, MomentumGrid, PacketSpec, Spinor, C64, DEFAULT_GRID_POINTS,
    DEFAULT_HALFWIDTH_SIGMAS, DEFAULT_SIGMA_P,
};
use crate::units::Scales;

use super::Scenario;

/// Built-in presets with one-line descriptions.
pub const PRESETS: [(&str, &str); 7] = [
    ("fig2a-ref", "p0 = (0, 5), undriven; ZB along x"),
    ("fig2a-j0half", "p0 = (0, 5), 2v_d/w_d = 1.52 (J0 = 0.5), w_d = 50"),
    ("fig2a-j0tenth", "p0 = (0, 5), 2v_d/w_d = 2.22 (J0 = 0.1), w_d = 50"),
    ("fig2b-ref", "p0 = (5, 0), undriven; ZB along z"),
    ("fig2b-141", "p0 = (5, 0), 2v_d/w_d = 1.14 (1/J0 = 1.41), w_d = 50"),
    ("fig2b-200", "p0 = (5, 0), 2v_d/w_d = 1.52 (1/J0 = 2.0), w_d = 50"),
    ("fig3-reso", "p0 = (25, 0), v_d = 10, w_d = 50: resonance p_x0 = w_d/2"),
];

/// Internal spinor presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinorChoice {
    /// (1, i)/√2, the σ_y eigenstate.
    Default,
    Up,
    Down,
    PlusX,
}

impl SpinorChoice {
    pub fn name(self) -> &'static str {
        match self {
            SpinorChoice::Default => "default",
            SpinorChoice::Up => "up",
            SpinorChoice::Down => "down",
            SpinorChoice::PlusX => "plus_x",
        }
    }

    pub fn spinor(self) -> Spinor {
        let z = C64::new(0.0, 0.0);
        let h = C64::new(0.5f64.sqrt(), 0.0);
        match self {
            SpinorChoice::Default => default_spinor(),
            SpinorChoice::Up => [C64::new(1.0, 0.0), z],
            SpinorChoice::Down => [z, C64::new(1.0, 0.0)],
            SpinorChoice::PlusX => [h, h],
        }
    }

    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "default" => SpinorChoice::Default,
            "up" => SpinorChoice::Up,
            "down" => SpinorChoice::Down,
            "plus_x" => SpinorChoice::PlusX,
            _ => return Err(Error::Config(format!("unknown spinor '{s}' (default|up|down|plus_x)"))),
        })
    }
}

/// Every scenario parameter as a flat record. `dt = None` selects the
/// automatic step; `fit_omega_max = None` selects ω_d/2 for driven runs.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    /// Scenario whose ZB the ratios are taken against; `None` uses the same
    /// scenario with v_d = 0 when driven.
    pub reference: Option<String>,
    pub p0: [f64; 2],
    pub r0: [f64; 2],
    pub sigma_p: [f64; 2],
    pub spinor: SpinorChoice,
    pub v_d: f64,
    pub omega_d: f64,
    pub phase: f64,
    pub grid_n: usize,
    pub grid_halfwidth_sigmas: f64,
    pub dt: Option<f64>,
    pub scheme: Scheme,
    pub t_end: f64,
    pub sample_dt: f64,
    pub density_snapshots: usize,
    pub fit_omega_max: Option<f64>,
    pub mass_kg: f64,
    pub kappa_per_m: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            name: "custom".into(),
            reference: None,
            p0: [0.0, 5.0],
            r0: [0.0, 0.0],
            sigma_p: [DEFAULT_SIGMA_P; 2],
            spinor: SpinorChoice::Default,
            v_d: 0.0,
            omega_d: 50.0,
            phase: 0.0,
            grid_n: DEFAULT_GRID_POINTS,
            grid_halfwidth_sigmas: DEFAULT_HALFWIDTH_SIGMAS,
            dt: None,
            scheme: Scheme::MidpointExponential,
            t_end: 12.0,
            sample_dt: 0.02,
            density_snapshots: 5,
            fit_omega_max: None,
            mass_kg: 1e-25,
            kappa_per_m: 1e6,
        }
    }
}

/// Drive velocity giving Bessel argument `arg` at ω_d = 50.
fn v_for(arg: f64) -> f64 {
    0.5 * arg * 50.0
}

impl ScenarioConfig {
    /// Built-in preset by name.
    pub fn preset(name: &str) -> Result<Self> {
        let base = Self { name: name.to_string(), ..Self::default() };
        let case_a = |v_d: f64| Self { p0: [0.0, 5.0], v_d, reference: Some("fig2a-ref".into()), ..base.clone() };
        let case_b = |v_d: f64| Self { p0: [5.0, 0.0], v_d, reference: Some("fig2b-ref".into()), ..base.clone() };
        Ok(match name {
            "fig2a-ref" => Self { p0: [0.0, 5.0], ..base.clone() },
            "fig2a-j0half" => case_a(v_for(1.52)),
            "fig2a-j0tenth" => case_a(v_for(2.22)),
            "fig2b-ref" => Self { p0: [5.0, 0.0], ..base.clone() },
            "fig2b-141" => case_b(v_for(1.14)),
            "fig2b-200" => case_b(v_for(1.52)),
            // Resonance p_x0 = ω_d/2; ZB frequency ≈ v_d matches the static
            // |p0| = 5 case. Twice the static time span.
            "fig3-reso" => Self {
                p0: [25.0, 0.0],
                v_d: 10.0,
                t_end: 24.0,
                reference: Some("fig2a-ref".into()),
                ..base.clone()
            },
            _ => {
                let names: Vec<&str> = PRESETS.iter().map(|p| p.0).collect();
                return Err(Error::Config(format!("unknown preset '{name}' (known: {})", names.join(", "))));
            }
        })
    }

    pub fn is_preset(name: &str) -> bool {
        PRESETS.iter().any(|p| p.0 == name)
    }

    /// Parses a record. A leading `preset = NAME` line seeds the values.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value', got '{line}'", lineno + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if k == "preset" {
                let name = cfg.name.clone();
                cfg = Self::preset(v)?;
                if name != "custom" {
                    cfg.name = name;
                }
            } else {
                cfg.set(k, v).map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
            }
        }
        Ok(cfg)
    }

    /// Applies one `key=value` override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let num = || -> Result<f64> {
            value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Config(format!("{key}: '{value}' is not a finite number")))
        };
        let opt_num = || -> Result<Option<f64>> {
            if value == "auto" {
                Ok(None)
            } else {
                num().map(Some)
            }
        };
        match key {
            "name" => {
                if value.is_empty() || value.contains(['/', '\\']) {
                    return Err(Error::Config(format!("name '{value}' must be non-empty without path separators")));
                }
                self.name = value.to_string()
            }
            "reference" => self.reference = if value == "none" || value.is_empty() { None } else { Some(value.to_string()) },
            "p0_x" => self.p0[0] = num()?,
            "p0_z" => self.p0[1] = num()?,
            "r0_x" => self.r0[0] = num()?,
            "r0_z" => self.r0[1] = num()?,
            "sigma_p_x" => self.sigma_p[0] = num()?,
            "sigma_p_z" => self.sigma_p[1] = num()?,
            "sigma_p" => self.sigma_p = [num()?; 2],
            "spinor" => self.spinor = SpinorChoice::parse(value)?,
            "v_d" => self.v_d = num()?,
            "omega_d" => self.omega_d = num()?,
            "phase" => self.phase = num()?,
            "bessel_arg" => self.v_d = 0.5 * num()? * self.omega_d,
            "grid_n" => {
                self.grid_n = value.parse().map_err(|_| Error::Config(format!("grid_n: '{value}' is not an integer")))?
            }
            "grid_halfwidth_sigmas" => self.grid_halfwidth_sigmas = num()?,
            "dt" => self.dt = opt_num()?,
            "scheme" => {
                self.scheme = match value {
                    "midpoint" => Scheme::MidpointExponential,
                    "quarter-period" => Scheme::QuarterPeriodSubdivided,
                    _ => return Err(Error::Config(format!("scheme '{value}' (midpoint|quarter-period)"))),
                }
            }
            "t_end" => self.t_end = num()?,
            "sample_dt" => self.sample_dt = num()?,
            "density_snapshots" => {
                self.density_snapshots =
                    value.parse().map_err(|_| Error::Config(format!("density_snapshots: '{value}' is not an integer")))?
            }
            "fit_omega_max" => self.fit_omega_max = opt_num()?,
            "mass_kg" => self.mass_kg = num()?,
            "kappa_per_m" => self.kappa_per_m = num()?,
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Applies `key=value` strings in order.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<()> {
        for o in overrides {
            let o = o.as_ref();
            let (k, v) = o.split_once('=').ok_or_else(|| Error::Config(format!("override '{o}' is not key=value")))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    /// Serializes to the record format accepted by [`ScenarioConfig::parse`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let auto = |v: Option<f64>| v.map_or("auto".to_string(), |x| format!("{x:e}"));
        let _ = writeln!(s, "name = {}", self.name);
        let _ = writeln!(s, "reference = {}", self.reference.as_deref().unwrap_or("none"));
        let _ = writeln!(s, "p0_x = {:e}\np0_z = {:e}", self.p0[0], self.p0[1]);
        let _ = writeln!(s, "r0_x = {:e}\nr0_z = {:e}", self.r0[0], self.r0[1]);
        let _ = writeln!(s, "sigma_p_x = {:e}\nsigma_p_z = {:e}", self.sigma_p[0], self.sigma_p[1]);
        let _ = writeln!(s, "spinor = {}", self.spinor.name());
        let _ = writeln!(s, "v_d = {:e}\nomega_d = {:e}\nphase = {:e}", self.v_d, self.omega_d, self.phase);
        let _ = writeln!(s, "grid_n = {}\ngrid_halfwidth_sigmas = {:e}", self.grid_n, self.grid_halfwidth_sigmas);
        let _ = writeln!(s, "dt = {}", auto(self.dt));
        let scheme = match self.scheme {
            Scheme::MidpointExponential => "midpoint",
            Scheme::QuarterPeriodSubdivided => "quarter-period",
        };
        let _ = writeln!(s, "scheme = {scheme}");
        let _ = writeln!(s, "t_end = {:e}\nsample_dt = {:e}", self.t_end, self.sample_dt);
        let _ = writeln!(s, "density_snapshots = {}", self.density_snapshots);
        let _ = writeln!(s, "fit_omega_max = {}", auto(self.fit_omega_max));
        let _ = writeln!(s, "mass_kg = {:e}\nkappa_per_m = {:e}", self.mass_kg, self.kappa_per_m);
        s
    }

    /// Validates and assembles the scenario.
    pub fn build(&self) -> Result<Scenario> {
        let spec = PacketSpec { p0: self.p0, sigma_p: self.sigma_p, r0: self.r0, spinor0: self.spinor.spinor() };
        spec.validate()?;
        let drive = if self.v_d == 0.0 { DriveParams::undriven(self.omega_d) } else { DriveParams::new(self.v_d, self.omega_d)? };
        let drive = DriveParams { phase: self.phase, ..drive };
        drive.validate()?;
        if !(self.grid_halfwidth_sigmas > 0.0) {
            return Err(Error::Config("grid_halfwidth_sigmas must be positive".into()));
        }
        let grid = MomentumGrid::around(&spec, self.grid_n, self.grid_halfwidth_sigmas)?;
        let stepper = match self.dt {
            Some(dt) => StepperConfig::new(dt, self.scheme),
            None => StepperConfig { scheme: self.scheme, ..StepperConfig::default_for(&drive, &grid) },
        };
        stepper.validate(&drive, &grid)?;
        if !(self.t_end > 0.0) {
            return Err(Error::Config(format!("t_end must be positive, got {}", self.t_end)));
        }
        if !(self.sample_dt > 0.0 && self.sample_dt <= self.t_end) {
            return Err(Error::Config(format!("sample_dt must lie in (0, t_end], got {}", self.sample_dt)));
        }
        if let Some(w) = self.fit_omega_max {
            if !(w > 0.0) {
                return Err(Error::Config(format!("fit_omega_max must be positive, got {w}")));
            }
        }
        let scales = Scales::new(self.mass_kg, self.kappa_per_m, crate::units::HBAR_SI)?;
        Ok(Scenario {
            name: self.name.clone(),
            spec,
            drive,
            grid,
            stepper,
            t_end: self.t_end,
            sample_dt: self.sample_dt,
            scales: Some(scales),
            config: self.clone(),
        })
    }

    /// Undriven counterpart used as the default reference.
    pub fn undriven(&self) -> Self {
        Self { name: format!("{}-undriven", self.name), v_d: 0.0, reference: None, ..self.clone() }
    }
}
