//! FFT plumbing for the row-major (x-major, z-minor) momentum grid.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::state::{MomentumGrid, C64};

/// Forward and inverse plans for both grid axes.
pub struct GridFft {
    n_x: usize,
    n_z: usize,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_z: Arc<dyn Fft<f64>>,
    inv_z: Arc<dyn Fft<f64>>,
}

impl GridFft {
    pub fn new(grid: &MomentumGrid) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n_x: grid.n_x(),
            n_z: grid.n_z(),
            fwd_x: planner.plan_fft(grid.n_x(), FftDirection::Forward),
            inv_x: planner.plan_fft(grid.n_x(), FftDirection::Inverse),
            fwd_z: planner.plan_fft(grid.n_z(), FftDirection::Forward),
            inv_z: planner.plan_fft(grid.n_z(), FftDirection::Inverse),
        }
    }

    /// Unnormalized transform along z (contiguous rows).
    pub fn along_z(&self, data: &mut [C64], direction: FftDirection) {
        let plan = match direction {
            FftDirection::Forward => &self.fwd_z,
            FftDirection::Inverse => &self.inv_z,
        };
        data.par_chunks_mut(self.n_z).for_each(|row| plan.process(row));
    }

    /// Unnormalized transform along x (strided), via a transpose.
    pub fn along_x(&self, data: &mut [C64], direction: FftDirection) {
        let plan = match direction {
            FftDirection::Forward => &self.fwd_x,
            FftDirection::Inverse => &self.inv_x,
        };
        let mut t = transpose(data, self.n_x, self.n_z);
        t.par_chunks_mut(self.n_x).for_each(|col| plan.process(col));
        let back = transpose(&t, self.n_z, self.n_x);
        data.copy_from_slice(&back);
    }

    pub fn both(&self, data: &mut [C64], direction: FftDirection) {
        self.along_z(data, direction);
        self.along_x(data, direction);
    }
}

/// Transpose of a rows×cols row-major array.
fn transpose(data: &[C64], rows: usize, cols: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); data.len()];
    out.par_chunks_mut(rows).enumerate().for_each(|(c, col)| {
        for (r, v) in col.iter_mut().enumerate() {
            *v = data[r * cols + c];
        }
    });
    out
}

/// Signed DFT index of bin `m` of an `n`-point transform; the Nyquist bin
/// maps to 0 so spectral derivatives stay real-symmetric.
pub fn signed_bin(m: usize, n: usize) -> f64 {
    if m < n / 2 {
        m as f64
    } else if m == n / 2 {
        0.0
    } else {
        m as f64 - n as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_both_axes() {
        let grid = MomentumGrid::new(16, 32, [0.0; 2], [1.0; 2]).unwrap();
        let fft = GridFft::new(&grid);
        let orig: Vec<C64> = (0..grid.len()).map(|i| C64::new((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
        let mut d = orig.clone();
        fft.both(&mut d, FftDirection::Forward);
        fft.both(&mut d, FftDirection::Inverse);
        let n = grid.len() as f64;
        for (a, b) in d.iter().zip(&orig) {
            assert!((a / n - b).norm() < 1e-13);
        }
    }

    #[test]
    fn along_x_matches_direct_dft() {
        let grid = MomentumGrid::new(16, 16, [0.0; 2], [1.0; 2]).unwrap();
        let fft = GridFft::new(&grid);
        let orig: Vec<C64> = (0..grid.len()).map(|i| C64::new(((i * 7) % 5) as f64, (i % 3) as f64)).collect();
        let mut d = orig.clone();
        fft.along_x(&mut d, FftDirection::Forward);
        let (kz, m) = (5, 3);
        let direct: C64 = (0..16)
            .map(|k| orig[k * 16 + kz] * C64::from_polar(1.0, -2.0 * std::f64::consts::PI * (k * m) as f64 / 16.0))
            .sum();
        assert!((d[m * 16 + kz] - direct).norm() < 1e-12);
    }
}
