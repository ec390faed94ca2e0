//! Observables of a [`SpinorField`]: position by two independent routes,
//! spin, position-space densities, and the branch-overlap damping diagnostic.

mod fit;
mod series;

use std::f64::consts::PI;

use rustfft::FftDirection;

pub use fit::{fit_zb, Envelope, FitOptions, ZbSummary};
pub use series::{TimeSeries, TIMESERIES_HEADER};

use crate::efftheory::eff_eigensystem;
use crate::error::{Error, Result};
use crate::spectral::{signed_bin, GridFft};
use crate::spin;
use crate::state::{sum_rows, MomentumGrid, Spinor, SpinorField, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositionMethod {
    /// i⟨ψ|∇_p|ψ⟩ with spectral differentiation on the periodic grid.
    MomentumGradient,
    /// Σ r·|ψ(r)|² on the conjugate position grid.
    PositionSum,
}

/// Fraction of the norm within 3 cells of the momentum-grid edge.
pub fn edge_mass(field: &SpinorField) -> f64 {
    let g = field.grid();
    let (nx, nz) = (g.n_x(), g.n_z());
    let near = |k: usize, n: usize| k < 3 || k + 3 >= n;
    sum_rows(g, |i| {
        let (kx, kz) = (i / nz, i % nz);
        if near(kx, nx) || near(kz, nz) {
            field.amp_up[i].norm_sqr() + field.amp_down[i].norm_sqr()
        } else {
            0.0
        }
    }) * g.cell()
}

fn check_boundary(field: &SpinorField) -> Result<()> {
    let mass = edge_mass(field);
    if mass > 1e-6 {
        return Err(Error::BoundaryContamination { mass });
    }
    Ok(())
}

pub fn position_expectation(field: &SpinorField, method: PositionMethod) -> Result<[f64; 2]> {
    check_boundary(field)?;
    let fft = GridFft::new(field.grid());
    Ok(match method {
        PositionMethod::MomentumGradient => momentum_gradient(field, &fft),
        PositionMethod::PositionSum => {
            let d = density_with(field, &fft);
            let norm = d.total();
            let [mx, mz] = d.first_moments();
            [mx / norm, mz / norm]
        }
    })
}

/// Both routes with one shared FFT plan.
pub fn position_expectation_both(field: &SpinorField) -> Result<([f64; 2], [f64; 2])> {
    check_boundary(field)?;
    let fft = GridFft::new(field.grid());
    let grad = momentum_gradient(field, &fft);
    let d = density_with(field, &fft);
    let norm = d.total();
    let [mx, mz] = d.first_moments();
    Ok((grad, [mx / norm, mz / norm]))
}

fn momentum_gradient(field: &SpinorField, fft: &GridFft) -> [f64; 2] {
    let g = *field.grid();
    let norm = field.norm_sqr();
    let mut out = field.origin();
    for (axis, out_axis) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for comp in [&field.amp_up, &field.amp_down] {
            let deriv = spectral_derivative(comp, &g, fft, axis);
            // Re Σ a*·(i ∂a)
            acc += sum_rows(&g, |i| (comp[i].conj() * deriv[i] * C64::new(0.0, 1.0)).re);
        }
        *out_axis += acc * g.cell() / norm;
    }
    out
}

/// ∂a/∂p along `axis` by FFT differentiation.
fn spectral_derivative(a: &[C64], g: &MomentumGrid, fft: &GridFft, axis: usize) -> Vec<C64> {
    let mut d = a.to_vec();
    let (n, dp) = if axis == 0 { (g.n_x(), g.dp_x()) } else { (g.n_z(), g.dp_z()) };
    let nz = g.n_z();
    let k_unit = 2.0 * PI / (n as f64 * dp);
    let scale = 1.0 / n as f64;
    let mult = |i: usize| {
        let m = if axis == 0 { i / nz } else { i % nz };
        C64::new(0.0, signed_bin(m, n) * k_unit * scale)
    };
    if axis == 0 {
        fft.along_x(&mut d, FftDirection::Forward);
        d.iter_mut().enumerate().for_each(|(i, v)| *v *= mult(i));
        fft.along_x(&mut d, FftDirection::Inverse);
    } else {
        fft.along_z(&mut d, FftDirection::Forward);
        d.iter_mut().enumerate().for_each(|(i, v)| *v *= mult(i));
        fft.along_z(&mut d, FftDirection::Inverse);
    }
    d
}

/// (⟨σ_x⟩, ⟨σ_y⟩, ⟨σ_z⟩).
pub fn spin_expectation(field: &SpinorField) -> [f64; 3] {
    let g = field.grid();
    let norm = field.norm_sqr() / g.cell();
    let mut out = [0.0; 3];
    for (c, o) in out.iter_mut().enumerate() {
        *o = sum_rows(g, |i| spin::bloch(field.spinor(i))[c]) / norm;
    }
    out
}

/// Probability density on the position grid conjugate to the momentum grid,
/// centered on the field's co-moving origin.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionDensity {
    pub n_x: usize,
    pub n_z: usize,
    /// Coordinate of node 0 along each axis.
    pub start: [f64; 2],
    pub spacing: [f64; 2],
    /// Row-major (x-major) values.
    pub values: Vec<f64>,
}

impl PositionDensity {
    pub fn x(&self, j: usize) -> f64 {
        self.start[0] + j as f64 * self.spacing[0]
    }

    pub fn z(&self, j: usize) -> f64 {
        self.start[1] + j as f64 * self.spacing[1]
    }

    /// ∫ρ dx dz.
    pub fn total(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spacing[0] * self.spacing[1]
    }

    fn first_moments(&self) -> [f64; 2] {
        let (mut mx, mut mz) = (0.0, 0.0);
        for jx in 0..self.n_x {
            let row = &self.values[jx * self.n_z..(jx + 1) * self.n_z];
            let mut row_sum = 0.0;
            let mut row_z = 0.0;
            for (jz, v) in row.iter().enumerate() {
                row_sum += v;
                row_z += v * self.z(jz);
            }
            mx += row_sum * self.x(jx);
            mz += row_z;
        }
        let cell = self.spacing[0] * self.spacing[1];
        [mx * cell, mz * cell]
    }

    /// Marginal density along `axis` (0 = x, 1 = z).
    pub fn marginal(&self, axis: usize) -> Vec<f64> {
        if axis == 0 {
            (0..self.n_x)
                .map(|jx| self.values[jx * self.n_z..(jx + 1) * self.n_z].iter().sum::<f64>() * self.spacing[1])
                .collect()
        } else {
            let mut m = vec![0.0; self.n_z];
            for jx in 0..self.n_x {
                for (jz, v) in self.values[jx * self.n_z..(jx + 1) * self.n_z].iter().enumerate() {
                    m[jz] += v;
                }
            }
            m.iter_mut().for_each(|v| *v *= self.spacing[0]);
            m
        }
    }

    /// Variance of the marginal along `axis`.
    pub fn variance(&self, axis: usize) -> f64 {
        let m = self.marginal(axis);
        let coord = |j: usize| if axis == 0 { self.x(j) } else { self.z(j) };
        let w: f64 = m.iter().sum();
        let mean: f64 = m.iter().enumerate().map(|(j, v)| v * coord(j)).sum::<f64>() / w;
        m.iter().enumerate().map(|(j, v)| v * (coord(j) - mean).powi(2)).sum::<f64>() / w
    }

    /// Number of peaks of the marginal along `axis` whose topographic
    /// prominence is at least `min_prominence` × the global maximum.
    pub fn count_modes(&self, axis: usize, min_prominence: f64) -> usize {
        count_peaks(&self.marginal(axis), min_prominence)
    }

    pub fn is_unimodal(&self) -> bool {
        self.count_modes(0, 0.1) == 1 && self.count_modes(1, 0.1) == 1
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,z,density\n");
        for jx in 0..self.n_x {
            for jz in 0..self.n_z {
                s.push_str(&format!("{:.9e},{:.9e},{:.9e}\n", self.x(jx), self.z(jz), self.values[jx * self.n_z + jz]));
            }
        }
        s
    }
}

fn count_peaks(profile: &[f64], min_prominence: f64) -> usize {
    let n = profile.len();
    let top = profile.iter().cloned().fold(0.0, f64::max);
    if top <= 0.0 {
        return 0;
    }
    let threshold = min_prominence * top;
    let mut count = 0;
    for i in 0..n {
        let v = profile[i];
        let left_ok = i == 0 || profile[i - 1] < v;
        let right_ok = i + 1 == n || profile[i + 1] <= v;
        if !(left_ok && right_ok) {
            continue;
        }
        // Lowest point on each side before reaching higher ground.
        let mut left_min = v;
        let mut j = i;
        let mut left_bounded = false;
        while j > 0 {
            j -= 1;
            if profile[j] > v {
                left_bounded = true;
                break;
            }
            left_min = left_min.min(profile[j]);
        }
        let mut right_min = v;
        let mut right_bounded = false;
        for &w in &profile[i + 1..] {
            if w > v {
                right_bounded = true;
                break;
            }
            right_min = right_min.min(w);
        }
        let base = match (left_bounded, right_bounded) {
            (true, true) => left_min.max(right_min),
            (true, false) => left_min,
            (false, true) => right_min,
            (false, false) => left_min.min(right_min),
        };
        if v - base >= threshold {
            count += 1;
        }
    }
    count
}

/// |ψ↑(r)|² + |ψ↓(r)|² on the conjugate position grid.
pub fn to_position_density(field: &SpinorField) -> PositionDensity {
    density_with(field, &GridFft::new(field.grid()))
}

fn density_with(field: &SpinorField, fft: &GridFft) -> PositionDensity {
    let up = to_position(&field.amp_up, field.grid(), fft);
    let down = to_position(&field.amp_down, field.grid(), fft);
    let values = up.iter().zip(&down).map(|(a, b)| a.norm_sqr() + b.norm_sqr()).collect();
    density_frame(field, values)
}

fn density_frame(field: &SpinorField, values: Vec<f64>) -> PositionDensity {
    let g = field.grid();
    let dx = g.dx();
    let o = field.origin();
    PositionDensity {
        n_x: g.n_x(),
        n_z: g.n_z(),
        start: [o[0] - 0.5 * g.n_x() as f64 * dx[0], o[1] - 0.5 * g.n_z() as f64 * dx[1]],
        spacing: dx,
        values,
    }
}

/// Position-space wavefunction ψ(r_j) = (dp_x dp_z/2π) Σ_k a_k (−1)^{k_x+k_z}
/// e^{2πi k·j/n}, up to a j-dependent phase.
fn to_position(a: &[C64], g: &MomentumGrid, fft: &GridFft) -> Vec<C64> {
    let nz = g.n_z();
    let pref = g.cell() / (2.0 * PI);
    let mut d: Vec<C64> = a
        .iter()
        .enumerate()
        .map(|(i, v)| if ((i / nz) + (i % nz)) % 2 == 0 { v * pref } else { -v * pref })
        .collect();
    fft.both(&mut d, FftDirection::Inverse);
    d
}

/// Bhattacharyya overlap of the two effective-energy branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchOverlap {
    /// ∫√(ρ₊ρ₋) dr / √(∫ρ₊ ∫ρ₋), in [0, 1].
    pub overlap: f64,
    pub mass_plus: f64,
    pub mass_minus: f64,
    /// One branch carries less than 1e−6 of the norm; `overlap` is set to 1.
    pub degenerate: bool,
}

/// Projects every mode on ψ±(p̃) and compares the spatial densities of the
/// two branches.
pub fn branch_overlap(field: &SpinorField, j0: f64) -> BranchOverlap {
    branch_overlap_with(field, |p| {
        let es = eff_eigensystem(p, j0);
        (es.psi_plus, es.psi_minus)
    })
}

/// Branch overlap for an arbitrary per-mode eigenbasis `p -> (ψ₊, ψ₋)`.
pub fn branch_overlap_with<F>(field: &SpinorField, branches: F) -> BranchOverlap
where
    F: Fn([f64; 2]) -> (Spinor, Spinor),
{
    let g = *field.grid();
    let n = g.len();
    let mut plus = [vec![C64::new(0.0, 0.0); n], vec![C64::new(0.0, 0.0); n]];
    let mut minus = [vec![C64::new(0.0, 0.0); n], vec![C64::new(0.0, 0.0); n]];
    for i in 0..n {
        let (psi_plus, psi_minus) = branches(g.momentum(i));
        let s = field.spinor(i);
        let cp = psi_plus[0].conj() * s[0] + psi_plus[1].conj() * s[1];
        let cm = psi_minus[0].conj() * s[0] + psi_minus[1].conj() * s[1];
        for c in 0..2 {
            plus[c][i] = psi_plus[c] * cp;
            minus[c][i] = psi_minus[c] * cm;
        }
    }
    let total = field.norm_sqr();
    let branch_mass = |b: &[Vec<C64>; 2]| sum_rows(&g, |i| b[0][i].norm_sqr() + b[1][i].norm_sqr()) * g.cell() / total;
    let (mass_plus, mass_minus) = (branch_mass(&plus), branch_mass(&minus));
    if mass_plus < 1e-6 || mass_minus < 1e-6 {
        return BranchOverlap { overlap: 1.0, mass_plus, mass_minus, degenerate: true };
    }
    let fft = GridFft::new(&g);
    let density = |b: &[Vec<C64>; 2]| -> Vec<f64> {
        let u = to_position(&b[0], &g, &fft);
        let d = to_position(&b[1], &g, &fft);
        u.iter().zip(&d).map(|(a, b)| a.norm_sqr() + b.norm_sqr()).collect()
    };
    let (rp, rm) = (density(&plus), density(&minus));
    let mut cross = 0.0;
    let (mut sp, mut sm) = (0.0, 0.0);
    for jx in 0..g.n_x() {
        let (mut c, mut a, mut b) = (0.0, 0.0, 0.0);
        for k in jx * g.n_z()..(jx + 1) * g.n_z() {
            c += (rp[k] * rm[k]).sqrt();
            a += rp[k];
            b += rm[k];
        }
        cross += c;
        sp += a;
        sm += b;
    }
    let overlap = (cross / (sp * sm).sqrt()).clamp(0.0, 1.0);
    BranchOverlap { overlap, mass_plus, mass_minus, degenerate: false }
}
