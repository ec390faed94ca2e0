//! Non-Abelian gauge potential of the tripod dark subspace.
//!
//! Lengths are in units of 1/k_l unless a config with k_l ≠ 1 is used, in
//! which case points carry the same length unit as 1/k_l. Potentials are
//! reported in units of ħκ and field strengths in ħκ².

use nalgebra::{Matrix2, Matrix3, Matrix3x2, Vector3};

use crate::error::{Error, Result};
use crate::spin::su2_exp;
use crate::state::C64;

pub type DarkBasis = Matrix3x2<C64>;
pub type GaugeMatrix = Matrix2<C64>;

/// Parallel-transport steps per path leg.
const TRANSPORT_STEPS: usize = 64;
/// Finite-difference steps used by the field strength, in units of 1/k_l.
const FS_INNER_STEP: f64 = 1e-3;
const FS_OUTER_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaserConfig {
    pub omega0: f64,
    pub xi: f64,
    pub k_l: f64,
}

impl Default for LaserConfig {
    fn default() -> Self {
        Self { omega0: 1.0, xi: (2f64.sqrt() - 1.0).acos(), k_l: 1.0 }
    }
}

impl LaserConfig {
    pub fn new(omega0: f64, xi: f64, k_l: f64) -> Result<Self> {
        let cfg = Self { omega0, xi, k_l };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0 > 0.0 && self.omega0.is_finite()) {
            return Err(Error::InvalidInput(format!("omega0 must be positive, got {}", self.omega0)));
        }
        if !(self.xi > 0.0 && self.xi < std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidInput(format!("xi must lie in (0, pi/2), got {}", self.xi)));
        }
        if !(self.k_l > 0.0 && self.k_l.is_finite()) {
            return Err(Error::InvalidInput(format!("k_l must be positive, got {}", self.k_l)));
        }
        Ok(())
    }

    /// κ = (√2 − 1)k_l.
    pub fn kappa(&self) -> f64 {
        (2f64.sqrt() - 1.0) * self.k_l
    }

    /// (Ω₁, Ω₂, Ω₃) at `point`.
    pub fn rabi(&self, point: [f64; 2]) -> [C64; 3] {
        let [x, z] = point;
        let s = self.omega0 * self.xi.sin() / 2f64.sqrt();
        [
            C64::from_polar(s, -self.k_l * x),
            C64::from_polar(s, self.k_l * x),
            C64::from_polar(self.omega0 * self.xi.cos(), self.k_l * z),
        ]
    }
}

/// Order of the legs of the gauge-fixing path from the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TransportPath {
    #[default]
    XThenZ,
    ZThenX,
}

/// How the phase freedom of the dark basis is fixed.
///
/// Transport along a path ending in a z leg is an axial gauge (a_z = 0), in
/// which [a_x, a_z] vanishes. The translation gauge carries the origin basis
/// with the laser phases, D(r) = diag(e^{ik_l x}, e^{−ik_l x}, e^{−ik_l z})·D(0),
/// and gives a position-independent potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaugeFixing {
    Transport(TransportPath),
    Translation,
}

impl Default for GaugeFixing {
    fn default() -> Self {
        Self::Transport(TransportPath::default())
    }
}

fn bright_unit(cfg: &LaserConfig, point: [f64; 2]) -> Vector3<C64> {
    let r = cfg.rabi(point);
    let v = Vector3::new(r[0].conj(), r[1].conj(), r[2].conj());
    let n = v.norm();
    v / C64::new(n, 0.0)
}

/// Orthogonal projector on the dark subspace.
pub fn dark_projector(cfg: &LaserConfig, point: [f64; 2]) -> Matrix3<C64> {
    let u = bright_unit(cfg, point);
    Matrix3::identity() - u * u.adjoint()
}

/// Some orthonormal dark basis, with no phase convention.
fn raw_basis(cfg: &LaserConfig, point: [f64; 2]) -> DarkBasis {
    let p = dark_projector(cfg, point);
    let mut cols: Vec<Vector3<C64>> = (0..3).map(|k| p.column(k).into_owned()).collect();
    cols.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    let e1 = cols[0].normalize();
    let mut best = cols[1] - e1 * e1.dotc(&cols[1]);
    let alt = cols[2] - e1 * e1.dotc(&cols[2]);
    if alt.norm() > best.norm() {
        best = alt;
    }
    DarkBasis::from_columns(&[e1, best.normalize()])
}

/// Unitary factor of the polar decomposition.
fn polar_unitary(m: &GaugeMatrix) -> GaugeMatrix {
    let svd = m.svd(true, true);
    svd.u.expect("u requested") * svd.v_t.expect("v_t requested")
}

/// Aligns `raw` with `prev` so that raw'†prev is Hermitian positive.
fn align(raw: DarkBasis, prev: &DarkBasis) -> DarkBasis {
    let overlap = raw.adjoint() * prev;
    raw * polar_unitary(&overlap)
}

fn transport_leg(cfg: &LaserConfig, mut basis: DarkBasis, from: [f64; 2], to: [f64; 2]) -> DarkBasis {
    for k in 1..=TRANSPORT_STEPS {
        let s = k as f64 / TRANSPORT_STEPS as f64;
        let p = [from[0] + s * (to[0] - from[0]), from[1] + s * (to[1] - from[1])];
        basis = align(raw_basis(cfg, p), &basis);
    }
    basis
}

/// Dark basis gauge-fixed by parallel transport from the origin along `path`.
pub fn dark_states_along(cfg: &LaserConfig, point: [f64; 2], path: TransportPath) -> DarkBasis {
    let origin = [0.0, 0.0];
    let corner = match path {
        TransportPath::XThenZ => [point[0], 0.0],
        TransportPath::ZThenX => [0.0, point[1]],
    };
    let start = raw_basis(cfg, origin);
    let mid = transport_leg(cfg, start, origin, corner);
    transport_leg(cfg, mid, corner, point)
}

fn dark_states_translated(cfg: &LaserConfig, point: [f64; 2]) -> DarkBasis {
    let mut d = raw_basis(cfg, [0.0, 0.0]);
    let k = cfg.k_l;
    let phases = [k * point[0], -k * point[0], -k * point[1]];
    for (i, ph) in phases.iter().enumerate() {
        let f = C64::from_polar(1.0, *ph);
        for c in 0..2 {
            d[(i, c)] *= f;
        }
    }
    d
}

pub fn dark_states_in(cfg: &LaserConfig, point: [f64; 2], gauge: GaugeFixing) -> DarkBasis {
    match gauge {
        GaugeFixing::Transport(path) => dark_states_along(cfg, point, path),
        GaugeFixing::Translation => dark_states_translated(cfg, point),
    }
}

/// Columns |D₁⟩, |D₂⟩ in the {|1⟩, |2⟩, |3⟩} basis.
pub fn dark_states(cfg: &LaserConfig, point: [f64; 2]) -> DarkBasis {
    dark_states_along(cfg, point, TransportPath::default())
}

fn hermitize(m: GaugeMatrix) -> GaugeMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Central-difference stencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stencil {
    Second,
    Fourth,
}

fn derivative<T, F>(f: F, point: [f64; 2], axis: usize, h: f64, stencil: Stencil) -> T
where
    F: Fn([f64; 2]) -> T,
    T: std::ops::Sub<Output = T> + std::ops::Mul<C64, Output = T> + std::ops::Add<Output = T>,
{
    let at = |s: f64| {
        let mut p = point;
        p[axis] += s * h;
        f(p)
    };
    match stencil {
        Stencil::Second => (at(1.0) - at(-1.0)) * C64::new(0.5 / h, 0.0),
        Stencil::Fourth => {
            (at(1.0) - at(-1.0)) * C64::new(8.0 / (12.0 * h), 0.0) - (at(2.0) - at(-2.0)) * C64::new(1.0 / (12.0 * h), 0.0)
        }
    }
}

fn potential_with<B>(basis: &B, point: [f64; 2], h: f64, kappa: f64, stencil: Stencil) -> (GaugeMatrix, GaugeMatrix)
where
    B: Fn([f64; 2]) -> DarkBasis,
{
    let d0 = basis(point);
    let component = |axis: usize| {
        let deriv = derivative(basis, point, axis, h, stencil);
        hermitize(d0.adjoint() * deriv * C64::new(0.0, 1.0 / kappa))
    };
    (component(0), component(1))
}

/// (a_x, a_z) = i⟨D_i|∂D_j⟩/κ by central differences with step `h`, for an
/// arbitrary smooth basis field.
pub fn gauge_potential_with<B>(basis: B, cfg: &LaserConfig, point: [f64; 2], h: f64) -> Result<(GaugeMatrix, GaugeMatrix)>
where
    B: Fn([f64; 2]) -> DarkBasis,
{
    cfg.validate()?;
    if !(h > 0.0 && h <= 1e-3 / cfg.k_l) {
        return Err(Error::InvalidInput(format!("step h = {h} must lie in (0, 1e-3/k_l]")));
    }
    Ok(potential_with(&basis, point, h, cfg.kappa(), Stencil::Second))
}

pub fn gauge_potential(cfg: &LaserConfig, point: [f64; 2], h: f64) -> Result<(GaugeMatrix, GaugeMatrix)> {
    gauge_potential_in(cfg, point, h, GaugeFixing::default())
}

pub fn gauge_potential_in(cfg: &LaserConfig, point: [f64; 2], h: f64, gauge: GaugeFixing) -> Result<(GaugeMatrix, GaugeMatrix)> {
    gauge_potential_with(|p| dark_states_in(cfg, p, gauge), cfg, point, h)
}

/// Dark basis and potential at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeSample {
    pub point: [f64; 2],
    pub dark_basis: DarkBasis,
    pub a_x: GaugeMatrix,
    pub a_z: GaugeMatrix,
}

pub fn gauge_sample(cfg: &LaserConfig, point: [f64; 2], h: f64) -> Result<GaugeSample> {
    let (a_x, a_z) = gauge_potential(cfg, point, h)?;
    Ok(GaugeSample { point, dark_basis: dark_states(cfg, point), a_x, a_z })
}

/// F_xz = ∂_x a_z − ∂_z a_x − i[a_x, a_z] in units of ħκ², for an arbitrary
/// smooth basis field.
pub fn field_strength_with<B>(basis: B, cfg: &LaserConfig, point: [f64; 2]) -> Result<GaugeMatrix>
where
    B: Fn([f64; 2]) -> DarkBasis,
{
    cfg.validate()?;
    let h = FS_INNER_STEP / cfg.k_l;
    let big = FS_OUTER_STEP / cfg.k_l;
    let kappa = cfg.kappa();
    let a_x = |p: [f64; 2]| potential_with(&basis, p, h, kappa, Stencil::Fourth).0;
    let a_z = |p: [f64; 2]| potential_with(&basis, p, h, kappa, Stencil::Fourth).1;
    let (ax, az) = (a_x(point), a_z(point));
    // Derivatives in units of κ: d/d(κx) = (1/κ) d/dx.
    let inv_kappa = C64::new(1.0 / kappa, 0.0);
    let curl = (derivative(a_z, point, 0, big, Stencil::Fourth) - derivative(a_x, point, 1, big, Stencil::Fourth)) * inv_kappa;
    let comm = ax * az - az * ax;
    Ok(hermitize(curl - comm * C64::new(0.0, 1.0)))
}

pub fn field_strength(cfg: &LaserConfig, point: [f64; 2]) -> Result<GaugeMatrix> {
    field_strength_with(|p| dark_states(cfg, p), cfg, point)
}

pub fn field_strength_in(cfg: &LaserConfig, point: [f64; 2], gauge: GaugeFixing) -> Result<GaugeMatrix> {
    field_strength_with(|p| dark_states_in(cfg, p, gauge), cfg, point)
}

/// Eigenvalues of a Hermitian 2×2 matrix, ascending.
pub fn hermitian_eigenvalues(m: &GaugeMatrix) -> [f64; 2] {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)];
    let mean = 0.5 * (a + d);
    let r = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    [mean - r, mean + r]
}

/// Ascending eigenvalues of F_xz (units ħκ²).
pub fn field_strength_spectrum(cfg: &LaserConfig, point: [f64; 2]) -> Result<[f64; 2]> {
    Ok(hermitian_eigenvalues(&field_strength(cfg, point)?))
}

pub fn field_strength_spectrum_with<B>(basis: B, cfg: &LaserConfig, point: [f64; 2]) -> Result<[f64; 2]>
where
    B: Fn([f64; 2]) -> DarkBasis,
{
    Ok(hermitian_eigenvalues(&field_strength_with(basis, cfg, point)?))
}

/// Smooth position-dependent SU(2) rotation used to probe gauge covariance.
pub fn smooth_twist(point: [f64; 2], strength: [f64; 3], k: f64) -> GaugeMatrix {
    let [x, z] = point;
    let axis = [
        strength[0] * (k * x).sin(),
        strength[1] * (k * z).cos(),
        strength[2] * (k * (x + z)).sin(),
    ];
    let m = su2_exp(axis, 1.0);
    GaugeMatrix::new(m[0][0], m[0][1], m[1][0], m[1][1])
}

#[cfg(test)]
mod tests;
