//! High-frequency effective theory of the driven spin-orbit Hamiltonian.
//!
//! With drive term A(t) = −v_d cos(ω_d t)σ_z the period-averaged Hamiltonian
//! is p²/2 + p_zσ_z + J₀(2v_d/ω_d)p_xσ_x. Everything here is closed form and
//! serves as the prediction side of every simulation cross-check.

mod bessel;

use std::f64::consts::{FRAC_PI_4, PI};

pub use bessel::{bessel_j0, j0_zeros};

use crate::error::{Error, Result};
use crate::spin::{self, Mat2};
use crate::state::{default_spinor, DriveParams, MomentumGrid, PacketSpec, C64};

/// Spatial axis along which the ZB oscillation shows up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Z,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Z => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Z => "z",
        }
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" => Ok(Axis::X),
            "z" => Ok(Axis::Z),
            _ => Err(Error::InvalidInput(format!("unknown axis '{s}'"))),
        }
    }
}

/// J₀(2v_d/ω_d).
pub fn j0_factor(drive: &DriveParams) -> f64 {
    bessel_j0(drive.bessel_arg())
}

/// The static Hamiltonian p²/2 + p_xσ_x + p_zσ_z.
pub fn static_hamiltonian(p: [f64; 2]) -> Mat2 {
    spin::hamiltonian(0.5 * (p[0] * p[0] + p[1] * p[1]), [p[0], 0.0, p[1]])
}

/// Closed-form averaged Hamiltonian p²/2 + p_zσ_z + j0·p_xσ_x.
pub fn effective_hamiltonian(p: [f64; 2], j0: f64) -> Mat2 {
    spin::hamiltonian(0.5 * (p[0] * p[0] + p[1] * p[1]), [j0 * p[0], 0.0, p[1]])
}

/// Numeric period average (ω_d/2π)∫dt e^{iF(t)} H_S e^{−iF(t)} with
/// F(t) = −(v_d/ω_d)[sin(ω_d t + φ) − sin φ]σ_z, by the trapezoid rule on
/// `n_quad` equispaced nodes.
pub fn average_hamiltonian(drive: &DriveParams, p: [f64; 2], n_quad: usize) -> Result<Mat2> {
    drive.validate()?;
    if n_quad < 64 {
        return Err(Error::InvalidInput(format!("n_quad = {n_quad} must be at least 64")));
    }
    let h_s = static_hamiltonian(p);
    if drive.v_d == 0.0 {
        return Ok(h_s);
    }
    let lambda = drive.v_d / drive.omega_d;
    let mut acc = [[C64::new(0.0, 0.0); 2]; 2];
    for k in 0..n_quad {
        let u = 2.0 * PI * k as f64 / n_quad as f64;
        let f = -lambda * ((u + drive.phase).sin() - drive.phase.sin());
        let kick = [[C64::from_polar(1.0, f), C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), C64::from_polar(1.0, -f)]];
        let rotated = spin::mul(&spin::mul(&kick, &h_s), &spin::dagger(&kick));
        acc = spin::add(&acc, &rotated);
    }
    Ok(spin::scale(&acc, C64::new(1.0 / n_quad as f64, 0.0)))
}

/// Eigensystem of the averaged Hamiltonian at one momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffEigensystem {
    /// p̃ = (j0·p_x, p_z).
    pub p_tilde: [f64; 2],
    /// Angle of p̃ with the x axis.
    pub theta: f64,
    /// π/4 − θ/2.
    pub beta: f64,
    pub e_plus: f64,
    pub e_minus: f64,
    /// (cos β, sin β).
    pub psi_plus: [C64; 2],
    /// (sin β, −cos β).
    pub psi_minus: [C64; 2],
    /// |p̃| = 0: the two branches coincide and β is set to π/4.
    pub degenerate: bool,
}

impl EffEigensystem {
    /// ZB angular frequency E₊ − E₋ = 2|p̃|.
    pub fn zb_omega(&self) -> f64 {
        self.e_plus - self.e_minus
    }

    pub fn p_tilde_norm(&self) -> f64 {
        self.p_tilde[0].hypot(self.p_tilde[1])
    }
}

pub fn eff_eigensystem(p: [f64; 2], j0: f64) -> EffEigensystem {
    let p_tilde = [j0 * p[0], p[1]];
    let mag = p_tilde[0].hypot(p_tilde[1]);
    let degenerate = mag == 0.0;
    let theta = if degenerate { 0.0 } else { p_tilde[1].atan2(p_tilde[0]) };
    let beta = FRAC_PI_4 - 0.5 * theta;
    let (sb, cb) = beta.sin_cos();
    let kinetic = 0.5 * (p[0] * p[0] + p[1] * p[1]);
    EffEigensystem {
        p_tilde,
        theta,
        beta,
        e_plus: kinetic + mag,
        e_minus: kinetic - mag,
        psi_plus: [C64::new(cb, 0.0), C64::new(sb, 0.0)],
        psi_minus: [C64::new(sb, 0.0), C64::new(-cb, 0.0)],
        degenerate,
    }
}

/// ∇_p θ(p̃) = (−j0 p_z, j0 p_x)/|p̃|².
pub fn theta_gradient(p: [f64; 2], j0: f64) -> [f64; 2] {
    let pt = [j0 * p[0], p[1]];
    let m2 = pt[0] * pt[0] + pt[1] * pt[1];
    [-j0 * p[1] / m2, j0 * p[0] / m2]
}

/// ⟨r(t)⟩ = r⁰ + p⁰t + ½Σ|G|²∇θ(p̃)(1 − cos ω(p̃)t)dp for the default
/// (1/√2, i/√2) spinor, evaluated as a grid sum.
pub fn zb_closed_form(spec: &PacketSpec, grid: &MomentumGrid, j0: f64, times: &[f64]) -> Result<Vec<[f64; 2]>> {
    spec.validate()?;
    let s0 = default_spinor();
    if (spec.spinor0[0] - s0[0]).norm() > 1e-12 || (spec.spinor0[1] - s0[1]).norm() > 1e-12 {
        return Err(Error::InvalidInput("the closed-form trajectory assumes spinor0 = (1/sqrt2, i/sqrt2)".into()));
    }
    if times.windows(2).any(|w| w[1] < w[0]) || times.iter().any(|t| *t < 0.0) {
        return Err(Error::InvalidInput("times must be sorted and non-negative".into()));
    }

    let weights: Vec<f64> = (0..grid.len())
        .map(|i| {
            let p = grid.momentum(i);
            let mut e = 0.0;
            for a in 0..2 {
                let d = p[a] - spec.p0[a];
                e -= d * d / (2.0 * spec.sigma_p[a] * spec.sigma_p[a]);
            }
            e.exp()
        })
        .collect();
    let total: f64 = weights.iter().sum();

    let mut modes = Vec::with_capacity(grid.len());
    let mut excluded = 0.0;
    for (i, w) in weights.iter().enumerate() {
        let w = w / total;
        let p = grid.momentum(i);
        let mag = (j0 * p[0]).hypot(p[1]);
        if mag < 1e-8 {
            excluded += w;
            continue;
        }
        let g = theta_gradient(p, j0);
        modes.push((0.5 * w * g[0], 0.5 * w * g[1], 2.0 * mag));
    }
    if excluded > 0.0 {
        log::warn!("zb_closed_form: excluded {excluded:.3e} of the mass at |p~| < 1e-8");
    }

    Ok(times
        .iter()
        .map(|&t| {
            let (mut zx, mut zz) = (0.0, 0.0);
            for &(gx, gz, w) in &modes {
                let f = 1.0 - (w * t).cos();
                zx += gx * f;
                zz += gz * f;
            }
            [spec.r0[0] + spec.p0[0] * t + zx, spec.r0[1] + spec.p0[1] * t + zz]
        })
        .collect())
}

/// Predicted change of the ZB relative to the undriven packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZbPrediction {
    pub amp_ratio: f64,
    pub freq_ratio: f64,
    pub axis: Axis,
}

/// Packet moving along z: ZB along x, amplitude × J₀, frequency unchanged.
pub fn case_a_prediction(drive: &DriveParams) -> ZbPrediction {
    ZbPrediction { amp_ratio: j0_factor(drive), freq_ratio: 1.0, axis: Axis::X }
}

/// Packet moving along x: ZB along z, amplitude × 1/J₀, frequency × J₀.
pub fn case_b_prediction(drive: &DriveParams) -> Result<ZbPrediction> {
    let j0 = j0_factor(drive);
    if j0.abs() < 1e-6 {
        return Err(Error::CdtPoint { j0 });
    }
    Ok(ZbPrediction { amp_ratio: 1.0 / j0, freq_ratio: j0, axis: Axis::Z })
}

/// First `n` drive velocities with J₀(2v_d/ω_d) = 0.
pub fn cdt_points(omega_d: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    if !(omega_d > 0.0) {
        return Err(Error::InvalidInput(format!("omega_d must be positive, got {omega_d}")));
    }
    Ok(j0_zeros(n).into_iter().map(|j| 0.5 * omega_d * j).collect())
}

/// Effective theory in the frame rotating at ω_d about σ_x, for a packet
/// whose p_x sits at the resonance momentum ω_d/2.
///
/// The averaged rotating-frame Hamiltonian is
/// p²/2 + (p_x − ω_d/2)σ_x − (v_d/2)(cos φ σ_z − sin φ σ_y). For φ = 0 the
/// σ_z coefficient is −v_d/2; the opposite sign would reverse the ZB
/// displacement while leaving spectra and group velocities unchanged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceTheory {
    pub omega_d: f64,
    pub v_d: f64,
    pub phase: f64,
    /// Resonance momentum ω_d/2.
    pub p_x_res: f64,
    /// ZB angular frequency at the packet center (≈ v_d).
    pub zb_freq: f64,
    /// Detuning p_x0 − ω_d/2 of the packet center.
    pub detuning: f64,
    /// min(ω_d/|p_z0|, ω_d/v_d) fell below 10.
    pub marginal: bool,
}

impl ResonanceTheory {
    pub fn new(drive: &DriveParams, spec: &PacketSpec) -> Result<Self> {
        drive.validate()?;
        spec.validate()?;
        let p_x_res = 0.5 * drive.omega_d;
        let detuning = spec.p0[0] - p_x_res;
        if detuning.abs() > spec.sigma_p[0] {
            return Err(Error::OffResonance { detuning, sigma: spec.sigma_p[0] });
        }
        let ratio = |scale: f64| if scale == 0.0 { f64::INFINITY } else { drive.omega_d / scale.abs() };
        let worst = ratio(spec.p0[1]).min(ratio(drive.v_d));
        if worst < 4.0 {
            return Err(Error::InvalidInput(format!(
                "resonance theory needs omega_d >> |p_z0|, v_d (ratio {worst:.2} < 4)"
            )));
        }
        let marginal = worst < 10.0;
        if marginal {
            log::warn!("resonance theory ratio omega_d/max(|p_z0|, v_d) = {worst:.2} is below 10");
        }
        let mut th = Self { omega_d: drive.omega_d, v_d: drive.v_d, phase: drive.phase, p_x_res, zb_freq: 0.0, detuning, marginal };
        th.zb_freq = th.zb_omega(spec.p0);
        Ok(th)
    }

    /// (h_x, h_y, h_z) of the rotating-frame spin-orbit term.
    pub fn field(&self, p: [f64; 2]) -> [f64; 3] {
        let half = 0.5 * self.v_d;
        [p[0] - self.p_x_res, half * self.phase.sin(), -half * self.phase.cos()]
    }

    fn field_norm(&self, p: [f64; 2]) -> f64 {
        let [a, b, c] = self.field(p);
        (a * a + b * b + c * c).sqrt()
    }

    pub fn e_plus(&self, p: [f64; 2]) -> f64 {
        0.5 * (p[0] * p[0] + p[1] * p[1]) + self.field_norm(p)
    }

    pub fn e_minus(&self, p: [f64; 2]) -> f64 {
        0.5 * (p[0] * p[0] + p[1] * p[1]) - self.field_norm(p)
    }

    /// Beat frequency E₊ − E₋ = 2√((v_d/2)² + (p_x − ω_d/2)²).
    pub fn zb_omega(&self, p: [f64; 2]) -> f64 {
        2.0 * self.field_norm(p)
    }

    /// Approximate branch energies p²/2 ± v_d/2 at exact resonance.
    pub fn e_approx(&self, p: [f64; 2]) -> (f64, f64) {
        let k = 0.5 * (p[0] * p[0] + p[1] * p[1]);
        (k + 0.5 * self.v_d, k - 0.5 * self.v_d)
    }

    /// |∇E₊ − ∇E₋| at `p`.
    pub fn group_velocity_difference(&self, p: [f64; 2]) -> f64 {
        let n = self.field_norm(p);
        if n == 0.0 {
            return 0.0;
        }
        2.0 * (p[0] - self.p_x_res).abs() / n
    }

    pub fn zb_axis(&self) -> Axis {
        Axis::X
    }
}

/// Regime selector for [`lifetime_estimate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LifetimeRegime {
    StaticLike,
    Resonance { v_d: f64 },
}

/// One-standard-deviation spread of ω(p̃) = 2|p̃| over |G(p)|².
pub fn zb_frequency_spread(spec: &PacketSpec, j0: f64) -> f64 {
    const N: usize = 161;
    const SPAN: f64 = 7.0;
    let node = |k: usize| -SPAN + 2.0 * SPAN * k as f64 / (N - 1) as f64;
    let (mut w_sum, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for i in 0..N {
        let u = node(i);
        for k in 0..N {
            let v = node(k);
            let w = (-0.5 * (u * u + v * v)).exp();
            let p = [spec.p0[0] + u * spec.sigma_p[0], spec.p0[1] + v * spec.sigma_p[1]];
            let om = 2.0 * (j0 * p[0]).hypot(p[1]);
            w_sum += w;
            m1 += w * om;
            m2 += w * om * om;
        }
    }
    let mean = m1 / w_sum;
    (m2 / w_sum - mean * mean).max(0.0).sqrt()
}

/// ZB lifetime estimate: τ = π/(2δω) for static-like dynamics; in the
/// resonance regime τ is scaled by the ratio of the static to the residual
/// branch group-velocity difference, never less than 10×.
pub fn lifetime_estimate(spec: &PacketSpec, j0: f64, regime: LifetimeRegime) -> Result<f64> {
    spec.validate()?;
    let spread = zb_frequency_spread(spec, j0);
    let tau_static = if spread > 0.0 { PI / (2.0 * spread) } else { f64::INFINITY };
    match regime {
        LifetimeRegime::StaticLike => Ok(tau_static),
        LifetimeRegime::Resonance { v_d } => {
            let half = 0.5 * v_d;
            let dp = spec.sigma_p[0];
            let residual = 2.0 * dp / (half * half + dp * dp).sqrt();
            let p = spec.p0;
            let pt = [j0 * p[0], p[1]];
            let m = pt[0].hypot(pt[1]);
            let static_diff = if m == 0.0 { 2.0 } else { 2.0 * (j0 * pt[0]).hypot(pt[1]) / m };
            Ok(tau_static * (static_diff / residual).max(10.0))
        }
    }
}

#[cfg(test)]
mod tests;
