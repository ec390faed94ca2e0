//! Time evolution under the driven Hamiltonian
//! H(p, t) = p²/2 + p_xσ_x + (p_z − v_d cos(ω_d t + φ))σ_z.
//!
//! H is diagonal in momentum, so each grid mode evolves on its own under a
//! 2×2 time-dependent Hamiltonian. Steps use the exponential midpoint rule
//! with exact SU(2) exponentials; step boundaries sit on the global lattice
//! t = k·dt so that splitting an interval at a lattice point does not change
//! the result.
//!
//! Fields are propagated in the frame co-moving with the grid-center
//! momentum: the stored amplitudes evolve with p²/2 − p·p_c and the field's
//! `origin` advances by p_c·t, which reproduces the lab-frame state exactly.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::efftheory::{eff_eigensystem, ResonanceTheory};
use crate::error::{Error, Result};
use crate::spin::{self, su2_exp};
use crate::state::{DriveParams, MomentumGrid, Spinor, SpinorField, C64};

/// Instantaneous Hamiltonian of one momentum mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeHamiltonian {
    /// Scalar phase rate (p²/2 in the lab frame).
    pub kinetic: f64,
    /// σ_x coefficient, p_x.
    pub h_x: f64,
    /// Static σ_z coefficient, p_z.
    pub h_z_static: f64,
    pub drive: DriveParams,
}

impl ModeHamiltonian {
    pub fn lab(p: [f64; 2], drive: DriveParams) -> Self {
        Self { kinetic: 0.5 * (p[0] * p[0] + p[1] * p[1]), h_x: p[0], h_z_static: p[1], drive }
    }

    pub fn h_z(&self, t: f64) -> f64 {
        self.h_z_static - self.drive.shift(t)
    }

    pub fn matrix(&self, t: f64) -> spin::Mat2 {
        spin::hamiltonian(self.kinetic, [self.h_x, 0.0, self.h_z(t)])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Exponential midpoint rule with the requested dt.
    MidpointExponential,
    /// Midpoint rule with dt shrunk so a quarter drive period is a whole
    /// number of steps.
    QuarterPeriodSubdivided,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig {
    pub dt: f64,
    pub scheme: Scheme,
}

impl StepperConfig {
    pub fn new(dt: f64, scheme: Scheme) -> Self {
        Self { dt, scheme }
    }

    /// dt = 2π/(128 ω_d), tightened until dt·max|E| ≤ 0.5 on `grid`.
    pub fn default_for(drive: &DriveParams, grid: &MomentumGrid) -> Self {
        let mut dt = 2.0 * PI / (128.0 * drive.omega_d);
        let e = max_energy(grid, drive);
        while dt * e > 0.5 {
            dt *= 0.5;
        }
        Self { dt, scheme: Scheme::MidpointExponential }
    }

    /// Step actually used for `drive`.
    pub fn effective_dt(&self, drive: &DriveParams) -> f64 {
        match self.scheme {
            Scheme::MidpointExponential => self.dt,
            Scheme::QuarterPeriodSubdivided => {
                let quarter = 0.25 * drive.period();
                quarter / (quarter / self.dt).ceil()
            }
        }
    }

    /// Checks dt·ω_d ≤ 2π/64 and dt·max|E| ≤ 0.5.
    pub fn validate(&self, drive: &DriveParams, grid: &MomentumGrid) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::StepperConstraint(format!("dt must be positive, got {}", self.dt)));
        }
        let dt = self.effective_dt(drive);
        let drive_limit = 2.0 * PI / 64.0;
        if dt * drive.omega_d > drive_limit * (1.0 + 1e-12) {
            return Err(Error::StepperConstraint(format!(
                "dt*omega_d = {:.4} exceeds 2pi/64 = {drive_limit:.4}; use dt <= {:.3e}",
                dt * drive.omega_d,
                drive_limit / drive.omega_d
            )));
        }
        let e = max_energy(grid, drive);
        if dt * e > 0.5 * (1.0 + 1e-12) {
            return Err(Error::StepperConstraint(format!(
                "dt*max|E| = {:.4} exceeds 0.5 (max|E| = {e:.2}); use dt <= {:.3e}",
                dt * e,
                0.5 / e
            )));
        }
        Ok(())
    }
}

/// Upper bound of |E| over the grid: p²/2 + √(p_x² + (|p_z| + v_d)²) at the
/// corners.
pub fn max_energy(grid: &MomentumGrid, drive: &DriveParams) -> f64 {
    let c = grid.p_center();
    let h = grid.p_halfwidth();
    let mut e: f64 = 0.0;
    for sx in [-1.0, 1.0] {
        for sz in [-1.0, 1.0] {
            let px: f64 = c[0] + sx * h[0];
            let pz: f64 = c[1] + sz * h[1];
            let so = px.hypot(pz.abs() + drive.v_d);
            e = e.max(0.5 * (px * px + pz * pz) + so);
        }
    }
    e
}

/// One exponential-midpoint step: exp(−iH(t + dt/2)dt)·s.
pub fn step_mode(s: Spinor, mh: &ModeHamiltonian, t: f64, dt: f64) -> Spinor {
    let u = su2_exp([mh.h_x, 0.0, mh.h_z(t + 0.5 * dt)], dt);
    let [a, b] = spin::apply(&u, s);
    let ph = C64::from_polar(1.0, -mh.kinetic * dt);
    [a * ph, b * ph]
}

/// Step boundaries from `t0` to `t1` on the lattice k·dt. Lattice points
/// within 1e−9·dt of an endpoint are merged into it.
pub fn step_boundaries(t0: f64, t1: f64, dt: f64) -> Vec<f64> {
    let mut out = vec![t0];
    if t1 == t0 {
        return out;
    }
    let tol = 1e-9;
    if t1 > t0 {
        let mut k = (t0 / dt + tol).floor() as i64 + 1;
        loop {
            let t = k as f64 * dt;
            if t >= t1 - tol * dt {
                break;
            }
            if t > t0 + tol * dt {
                out.push(t);
            }
            k += 1;
        }
    } else {
        let mut k = (t0 / dt - tol).ceil() as i64 - 1;
        loop {
            let t = k as f64 * dt;
            if t <= t1 + tol * dt {
                break;
            }
            if t < t0 - tol * dt {
                out.push(t);
            }
            k -= 1;
        }
    }
    out.push(t1);
    out
}

/// Per-mode work shared by every mode of one [`evolve`] call.
struct Propagation {
    pc: [f64; 2],
    span: f64,
    /// (step length, drive shift at the step midpoint); empty when undriven.
    steps: Vec<(f64, f64)>,
}

impl Propagation {
    fn new(grid: &MomentumGrid, drive: &DriveParams, t0: f64, t1: f64, cfg: &StepperConfig) -> Self {
        let steps = if drive.v_d == 0.0 || t1 == t0 {
            Vec::new()
        } else {
            step_boundaries(t0, t1, cfg.effective_dt(drive))
                .windows(2)
                .map(|w| (w[1] - w[0], drive.shift(0.5 * (w[0] + w[1]))))
                .collect()
        };
        Self { pc: grid.p_center(), span: t1 - t0, steps }
    }

    #[inline]
    fn mode(&self, p: [f64; 2], s: Spinor) -> Spinor {
        let s = if self.steps.is_empty() {
            // Time-independent: one exact exponential.
            spin::apply(&su2_exp([p[0], 0.0, p[1]], self.span), s)
        } else {
            let mut s = s;
            for &(h, shift) in &self.steps {
                s = spin::apply(&su2_exp([p[0], 0.0, p[1] - shift], h), s);
            }
            s
        };
        let ph = C64::from_polar(1.0, -comoving_kinetic(p, self.pc) * self.span);
        [s[0] * ph, s[1] * ph]
    }

    fn shifted_origin(&self, origin: [f64; 2]) -> [f64; 2] {
        [origin[0] + self.pc[0] * self.span, origin[1] + self.pc[1] * self.span]
    }
}

fn check_evolve_args(field: &SpinorField, drive: &DriveParams, t0: f64, t1: f64, cfg: &StepperConfig) -> Result<()> {
    drive.validate()?;
    cfg.validate(drive, field.grid())?;
    if !(t0.is_finite() && t1.is_finite()) {
        return Err(Error::InvalidInput("evolution times must be finite".into()));
    }
    Ok(())
}

/// Advances every mode from `t0` to `t1` under the driven Hamiltonian.
/// `t1 < t0` integrates backwards on the same lattice.
pub fn evolve(field: &SpinorField, drive: &DriveParams, t0: f64, t1: f64, cfg: &StepperConfig) -> Result<SpinorField> {
    check_evolve_args(field, drive, t0, t1, cfg)?;
    let prop = Propagation::new(field.grid(), drive, t0, t1, cfg);
    let mut out = field.map_modes(|p, s| prop.mode(p, s));
    out.origin = prop.shifted_origin(field.origin);
    Ok(out)
}

/// [`evolve`] with the modes split into `chunks` explicit slices, one per
/// worker task.
pub fn evolve_partitioned(
    field: &SpinorField,
    drive: &DriveParams,
    t0: f64,
    t1: f64,
    cfg: &StepperConfig,
    chunks: usize,
) -> Result<SpinorField> {
    check_evolve_args(field, drive, t0, t1, cfg)?;
    let grid = *field.grid();
    let prop = Propagation::new(&grid, drive, t0, t1, cfg);
    let n = grid.len();
    let chunk = n.div_ceil(chunks.max(1));
    let mut out = field.clone();
    out.amp_up
        .par_chunks_mut(chunk)
        .zip(out.amp_down.par_chunks_mut(chunk))
        .enumerate()
        .for_each(|(c, (up, down))| {
            for (k, (u, d)) in up.iter_mut().zip(down.iter_mut()).enumerate() {
                let [a, b] = prop.mode(grid.momentum(c * chunk + k), [*u, *d]);
                *u = a;
                *d = b;
            }
        });
    out.origin = prop.shifted_origin(field.origin);
    Ok(out)
}

#[inline]
fn comoving_kinetic(p: [f64; 2], pc: [f64; 2]) -> f64 {
    0.5 * (p[0] * p[0] + p[1] * p[1]) - (p[0] * pc[0] + p[1] * pc[1])
}

/// Exact evolution under the static Hamiltonian by eigen-decomposition.
pub fn evolve_static_closed_form(field: &SpinorField, t: f64) -> SpinorField {
    evolve_effective(field, 1.0, t)
}

/// Exact evolution under the averaged Hamiltonian p²/2 + p_zσ_z + j0·p_xσ_x:
/// each mode is expanded on ψ±(p̃) with phases e^{−iE±t}.
pub fn evolve_effective(field: &SpinorField, j0: f64, t: f64) -> SpinorField {
    let pc = field.grid().p_center();
    let mut out = field.map_modes(|p, s| {
        let es = eff_eigensystem(p, j0);
        let shift = p[0] * pc[0] + p[1] * pc[1];
        if es.degenerate {
            let ph = C64::from_polar(1.0, -(es.e_plus - shift) * t);
            return [s[0] * ph, s[1] * ph];
        }
        let cp = es.psi_plus[0].conj() * s[0] + es.psi_plus[1].conj() * s[1];
        let cm = es.psi_minus[0].conj() * s[0] + es.psi_minus[1].conj() * s[1];
        let fp = cp * C64::from_polar(1.0, -(es.e_plus - shift) * t);
        let fm = cm * C64::from_polar(1.0, -(es.e_minus - shift) * t);
        [es.psi_plus[0] * fp + es.psi_minus[0] * fm, es.psi_plus[1] * fp + es.psi_minus[1] * fm]
    });
    out.origin = [field.origin[0] + pc[0] * t, field.origin[1] + pc[1] * t];
    out
}

/// Exact evolution under the rotating-frame resonance Hamiltonian of
/// [`ResonanceTheory`].
pub fn evolve_resonance_effective(field: &SpinorField, theory: &ResonanceTheory, t: f64) -> SpinorField {
    let pc = field.grid().p_center();
    let mut out = field.map_modes(|p, s| {
        let u = su2_exp(theory.field(p), t);
        let [a, b] = spin::apply(&u, s);
        let ph = C64::from_polar(1.0, -comoving_kinetic(p, pc) * t);
        [a * ph, b * ph]
    });
    out.origin = [field.origin[0] + pc[0] * t, field.origin[1] + pc[1] * t];
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameDirection {
    /// Lab → rotating.
    In,
    /// Rotating → lab.
    Out,
}

/// Rotating-frame map: the (1,1)/√2 component gains e^{+iω_d t/2} and the
/// (1,−1)/√2 component e^{−iω_d t/2} (inverse for `Out`).
pub fn rotate_frame(field: &SpinorField, omega_d: f64, t: f64, direction: FrameDirection) -> SpinorField {
    let angle = match direction {
        FrameDirection::In => 0.5 * omega_d * t,
        FrameDirection::Out => -0.5 * omega_d * t,
    };
    // exp(+iασ_x) = exp(−i(−σ_x)α)
    let u = su2_exp([-1.0, 0.0, 0.0], angle);
    field.map_modes(|_, s| spin::apply(&u, s))
}

/// Runs [`evolve`] from t0 through every sample time, handing each state to
/// `visit` in order.
pub fn evolve_sampled<F>(
    field: &SpinorField,
    drive: &DriveParams,
    cfg: &StepperConfig,
    t0: f64,
    times: &[f64],
    mut visit: F,
) -> Result<SpinorField>
where
    F: FnMut(usize, f64, &SpinorField) -> Result<()>,
{
    let mut state = field.clone();
    let mut t = t0;
    for (k, &tk) in times.iter().enumerate() {
        if tk != t {
            state = evolve(&state, drive, t, tk, cfg)?;
            t = tk;
        }
        visit(k, tk, &state)?;
    }
    Ok(state)
}
