//! Grids, packet and drive parameters, and the spinor field they build.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Two-component amplitude in the dark-state basis {|D₁⟩, |D₂⟩}.
pub type Spinor = [C64; 2];

/// Momentum-space standard deviation that makes a minimum-uncertainty packet
/// have position variance 10: σ_p = 1/(2√10).
pub const DEFAULT_SIGMA_P: f64 = 0.158_113_883_008_418_97;

/// Grid resolution used by the presets.
pub const DEFAULT_GRID_POINTS: usize = 256;

/// Grid half-width in units of σ_p used by the presets.
pub const DEFAULT_HALFWIDTH_SIGMAS: f64 = 8.0;

/// Uniform rectangular grid in (p_x, p_z), units ħκ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumGrid {
    n_x: usize,
    n_z: usize,
    p_center: [f64; 2],
    p_halfwidth: [f64; 2],
}

impl MomentumGrid {
    pub fn new(n_x: usize, n_z: usize, p_center: [f64; 2], p_halfwidth: [f64; 2]) -> Result<Self> {
        for (axis, n) in [("n_x", n_x), ("n_z", n_z)] {
            if n < 16 || !n.is_power_of_two() {
                return Err(Error::InvalidInput(format!("{axis} = {n} must be a power of two >= 16")));
            }
        }
        if !(p_halfwidth[0] > 0.0 && p_halfwidth[1] > 0.0) {
            return Err(Error::InvalidInput(format!("grid half-widths must be positive, got {p_halfwidth:?}")));
        }
        if !p_center.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidInput("grid center must be finite".into()));
        }
        Ok(Self { n_x, n_z, p_center, p_halfwidth })
    }

    /// Square grid centered on the packet with half-width `sigmas`·σ_p per axis.
    pub fn around(spec: &PacketSpec, n: usize, sigmas: f64) -> Result<Self> {
        Self::new(n, n, spec.p0, [sigmas * spec.sigma_p[0], sigmas * spec.sigma_p[1]])
    }

    /// 256×256 grid spanning ±8σ_p around p0.
    pub fn default_for(spec: &PacketSpec) -> Self {
        Self::around(spec, DEFAULT_GRID_POINTS, DEFAULT_HALFWIDTH_SIGMAS)
            .expect("default grid parameters are valid for any valid packet")
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_z(&self) -> usize {
        self.n_z
    }

    pub fn len(&self) -> usize {
        self.n_x * self.n_z
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn p_center(&self) -> [f64; 2] {
        self.p_center
    }

    pub fn p_halfwidth(&self) -> [f64; 2] {
        self.p_halfwidth
    }

    pub fn dp_x(&self) -> f64 {
        2.0 * self.p_halfwidth[0] / self.n_x as f64
    }

    pub fn dp_z(&self) -> f64 {
        2.0 * self.p_halfwidth[1] / self.n_z as f64
    }

    /// Momentum-space cell area dp_x·dp_z.
    pub fn cell(&self) -> f64 {
        self.dp_x() * self.dp_z()
    }

    pub fn p_x(&self, k: usize) -> f64 {
        self.p_center[0] - self.p_halfwidth[0] + k as f64 * self.dp_x()
    }

    pub fn p_z(&self, k: usize) -> f64 {
        self.p_center[1] - self.p_halfwidth[1] + k as f64 * self.dp_z()
    }

    /// Flat index of node (k_x, k_z); rows run along z.
    #[inline]
    pub fn index(&self, k_x: usize, k_z: usize) -> usize {
        k_x * self.n_z + k_z
    }

    /// Momentum of the node at flat index `i`.
    #[inline]
    pub fn momentum(&self, i: usize) -> [f64; 2] {
        [self.p_x(i / self.n_z), self.p_z(i % self.n_z)]
    }

    /// Conjugate position-grid spacing 2π/(n·dp) per axis.
    pub fn dx(&self) -> [f64; 2] {
        [
            2.0 * PI / (self.n_x as f64 * self.dp_x()),
            2.0 * PI / (self.n_z as f64 * self.dp_z()),
        ]
    }

    /// Width of the periodic position window per axis.
    pub fn position_window(&self) -> [f64; 2] {
        [2.0 * PI / self.dp_x(), 2.0 * PI / self.dp_z()]
    }
}

/// Gaussian wavepacket parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketSpec {
    /// Center momentum, ħκ.
    pub p0: [f64; 2],
    /// Momentum standard deviation of |G(p)|², ħκ.
    pub sigma_p: [f64; 2],
    /// Initial center, 1/κ.
    pub r0: [f64; 2],
    pub spinor0: Spinor,
}

impl Default for PacketSpec {
    fn default() -> Self {
        Self {
            p0: [0.0, 5.0],
            sigma_p: [DEFAULT_SIGMA_P; 2],
            r0: [0.0, 0.0],
            spinor0: default_spinor(),
        }
    }
}

/// (1/√2, i/√2), the σ_y = +1 eigenstate.
pub fn default_spinor() -> Spinor {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [C64::new(s, 0.0), C64::new(0.0, s)]
}

impl PacketSpec {
    pub fn with_p0(p0: [f64; 2]) -> Self {
        Self { p0, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_p[0] > 0.0 && self.sigma_p[1] > 0.0) {
            return Err(Error::InvalidInput(format!("sigma_p must be positive, got {:?}", self.sigma_p)));
        }
        let n2 = self.spinor0[0].norm_sqr() + self.spinor0[1].norm_sqr();
        if (n2 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("spinor0 must be unit norm, |spinor0|^2 = {n2}")));
        }
        if !self.p0.iter().chain(self.r0.iter()).all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("packet center must be finite".into()));
        }
        Ok(())
    }

    /// Minimum-uncertainty position variance 1/(4σ_p²) per axis.
    pub fn position_variance(&self) -> [f64; 2] {
        [
            1.0 / (4.0 * self.sigma_p[0] * self.sigma_p[0]),
            1.0 / (4.0 * self.sigma_p[1] * self.sigma_p[1]),
        ]
    }
}

/// Mirror drive: the spin-orbit p_z is shifted by −v_d cos(ω_d t + phase).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveParams {
    /// Peak effective laser-source velocity, ħκ/m.
    pub v_d: f64,
    /// Angular frequency, ħκ²/m.
    pub omega_d: f64,
    pub phase: f64,
}

impl DriveParams {
    pub fn new(v_d: f64, omega_d: f64) -> Result<Self> {
        let d = Self { v_d, omega_d, phase: 0.0 };
        d.validate()?;
        Ok(d)
    }

    /// Drive with 2v_d/ω_d equal to `ratio`.
    pub fn from_ratio(ratio: f64, omega_d: f64) -> Result<Self> {
        Self::new(0.5 * ratio * omega_d, omega_d)
    }

    /// No drive (v_d = 0); ω_d only sets the time step.
    pub fn undriven(omega_d: f64) -> Self {
        Self { v_d: 0.0, omega_d, phase: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_d.is_finite() && self.omega_d > 0.0) {
            return Err(Error::InvalidInput(format!("omega_d must be positive, got {}", self.omega_d)));
        }
        if !(self.v_d.is_finite() && self.v_d >= 0.0) {
            return Err(Error::InvalidInput(format!("v_d must be non-negative, got {}", self.v_d)));
        }
        if !self.phase.is_finite() {
            return Err(Error::InvalidInput("drive phase must be finite".into()));
        }
        Ok(())
    }

    /// Bessel argument 2v_d/ω_d.
    pub fn bessel_arg(&self) -> f64 {
        2.0 * self.v_d / self.omega_d
    }

    /// v_d cos(ω_d t + phase), the instantaneous shift of p_z in the σ_z term.
    #[inline]
    pub fn shift(&self, t: f64) -> f64 {
        if self.v_d == 0.0 {
            0.0
        } else {
            self.v_d * (self.omega_d * t + self.phase).cos()
        }
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega_d
    }
}

/// Spinor amplitudes over a momentum grid.
///
/// The physical state is `amp(p)·exp(−i p·origin)`: `origin` is a co-moving
/// reference position that [`crate::dynamics`] advances with the grid-center
/// velocity so that the stored amplitudes stay slowly varying in p.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    grid: MomentumGrid,
    pub(crate) amp_up: Vec<C64>,
    pub(crate) amp_down: Vec<C64>,
    pub(crate) origin: [f64; 2],
}

impl SpinorField {
    pub fn from_parts(grid: MomentumGrid, amp_up: Vec<C64>, amp_down: Vec<C64>, origin: [f64; 2]) -> Result<Self> {
        if amp_up.len() != grid.len() || amp_down.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "amplitude arrays ({}, {}) do not match grid size {}",
                amp_up.len(),
                amp_down.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, amp_up, amp_down, origin })
    }

    pub fn grid(&self) -> &MomentumGrid {
        &self.grid
    }

    pub fn amp_up(&self) -> &[C64] {
        &self.amp_up
    }

    pub fn amp_down(&self) -> &[C64] {
        &self.amp_down
    }

    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    #[inline]
    pub fn spinor(&self, i: usize) -> Spinor {
        [self.amp_up[i], self.amp_down[i]]
    }

    /// Σ(|a↑|² + |a↓|²)·dp_x·dp_z.
    pub fn norm_sqr(&self) -> f64 {
        sum_rows(&self.grid, |i| self.amp_up[i].norm_sqr() + self.amp_down[i].norm_sqr()) * self.grid.cell()
    }

    /// Physical amplitudes with the co-moving phase folded back in.
    pub fn physical_spinor(&self, i: usize) -> Spinor {
        let [px, pz] = self.grid.momentum(i);
        let ph = C64::from_polar(1.0, -(px * self.origin[0] + pz * self.origin[1]));
        [self.amp_up[i] * ph, self.amp_down[i] * ph]
    }

    /// Multiplies every amplitude by a global phase factor.
    pub fn with_global_phase(mut self, phase: f64) -> Self {
        let f = C64::from_polar(1.0, phase);
        self.amp_up.iter_mut().chain(self.amp_down.iter_mut()).for_each(|a| *a *= f);
        self
    }

    /// Applies `f(momentum, spinor) -> spinor` to every mode in parallel.
    pub fn map_modes<F>(&self, f: F) -> SpinorField
    where
        F: Fn([f64; 2], Spinor) -> Spinor + Sync,
    {
        let mut out = self.clone();
        out.map_modes_in_place(f);
        out
    }

    pub fn map_modes_in_place<F>(&mut self, f: F)
    where
        F: Fn([f64; 2], Spinor) -> Spinor + Sync,
    {
        let grid = self.grid;
        self.amp_up
            .par_iter_mut()
            .zip(self.amp_down.par_iter_mut())
            .enumerate()
            .for_each(|(i, (u, d))| {
                let [nu, nd] = f(grid.momentum(i), [*u, *d]);
                *u = nu;
                *d = nd;
            });
    }

    /// Largest amplitude difference between two fields on the same grid.
    pub fn max_abs_diff(&self, other: &SpinorField) -> f64 {
        self.amp_up
            .iter()
            .zip(&other.amp_up)
            .chain(self.amp_down.iter().zip(&other.amp_down))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Deterministic grid reduction: rows are summed in parallel, row totals
/// are then added in fixed order, so the result does not depend on the
/// number of workers.
pub(crate) fn sum_rows<F>(grid: &MomentumGrid, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let n_z = grid.n_z();
    let rows: Vec<f64> = (0..grid.n_x())
        .into_par_iter()
        .map(|kx| {
            let base = kx * n_z;
            let mut acc = 0.0;
            for kz in 0..n_z {
                acc += f(base + kz);
            }
            acc
        })
        .collect();
    rows.iter().sum()
}

/// Probability mass of |G|² outside the grid rectangle.
pub fn truncated_mass(spec: &PacketSpec, grid: &MomentumGrid) -> f64 {
    let inside = |axis: usize| {
        let lo = grid.p_center()[axis] - grid.p_halfwidth()[axis];
        let hi = grid.p_center()[axis] + grid.p_halfwidth()[axis];
        let s = spec.sigma_p[axis] * std::f64::consts::SQRT_2;
        0.5 * (libm::erfc((lo - spec.p0[axis]) / s) - libm::erfc((hi - spec.p0[axis]) / s))
    };
    (1.0 - inside(0) * inside(1)).max(0.0)
}

/// Gaussian packet `spinor0·N·exp(−(p−p0)²/(4σ_p²))·exp(−i p·r0)` normalized
/// on the grid.
pub fn make_gaussian(spec: &PacketSpec, grid: &MomentumGrid) -> Result<SpinorField> {
    spec.validate()?;
    let truncated = truncated_mass(spec, grid);
    if truncated > 1e-6 {
        return Err(Error::GridTooSmall { truncated });
    }
    for axis in 0..2 {
        let lo = grid.p_center()[axis] - grid.p_halfwidth()[axis];
        let hi = grid.p_center()[axis] + grid.p_halfwidth()[axis];
        let margin = (spec.p0[axis] - lo).min(hi - spec.p0[axis]);
        if margin < 5.0 * spec.sigma_p[axis] {
            log::warn!(
                "grid margin along axis {axis} is {:.2} sigma_p (< 5)",
                margin / spec.sigma_p[axis]
            );
        }
    }

    let profile: Vec<C64> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let p = grid.momentum(i);
            let mut e = 0.0;
            for a in 0..2 {
                let d = p[a] - spec.p0[a];
                e -= d * d / (4.0 * spec.sigma_p[a] * spec.sigma_p[a]);
            }
            C64::from_polar(e.exp(), -(p[0] * spec.r0[0] + p[1] * spec.r0[1]))
        })
        .collect();
    let mass = sum_rows(grid, |i| profile[i].norm_sqr()) * grid.cell();
    let scale = 1.0 / mass.sqrt();

    let [s_up, s_down] = spec.spinor0;
    let amp_up = profile.iter().map(|g| s_up * g * scale).collect();
    let amp_down = profile.iter().map(|g| s_down * g * scale).collect();
    Ok(SpinorField { grid: *grid, amp_up, amp_down, origin: [0.0, 0.0] })
}
