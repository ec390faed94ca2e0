//! 2×2 spin algebra on [`Spinor`]s.

use crate::state::{Spinor, C64};

/// Row-major 2×2 complex matrix.
pub type Mat2 = [[C64; 2]; 2];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

pub const IDENTITY: Mat2 = [[ONE, ZERO], [ZERO, ONE]];
pub const SIGMA_X: Mat2 = [[ZERO, ONE], [ONE, ZERO]];
pub const SIGMA_Y: Mat2 = [[ZERO, C64::new(0.0, -1.0)], [I, ZERO]];
pub const SIGMA_Z: Mat2 = [[ONE, ZERO], [ZERO, C64::new(-1.0, 0.0)]];

/// scalar·I + h_x σ_x + h_y σ_y + h_z σ_z.
pub fn hamiltonian(scalar: f64, h: [f64; 3]) -> Mat2 {
    let [hx, hy, hz] = h;
    [
        [C64::new(scalar + hz, 0.0), C64::new(hx, -hy)],
        [C64::new(hx, hy), C64::new(scalar - hz, 0.0)],
    ]
}

pub fn apply(m: &Mat2, s: Spinor) -> Spinor {
    [m[0][0] * s[0] + m[0][1] * s[1], m[1][0] * s[0] + m[1][1] * s[1]]
}

pub fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn dagger(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub fn add(a: &Mat2, b: &Mat2) -> Mat2 {
    [[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]]
}

pub fn scale(a: &Mat2, s: C64) -> Mat2 {
    [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
}

/// Largest entry-wise modulus of a − b.
pub fn max_diff(a: &Mat2, b: &Mat2) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            m = m.max((a[i][j] - b[i][j]).norm());
        }
    }
    m
}

/// exp(−i (h·σ) τ) = cos(Ωτ) I − i sin(Ωτ) (h·σ)/Ω with Ω = |h|.
///
/// `sin(Ωτ)/Ω` is evaluated through its series near Ω = 0, so the zero-field
/// limit needs no special casing by callers.
#[inline]
pub fn su2_exp(h: [f64; 3], tau: f64) -> Mat2 {
    let [hx, hy, hz] = h;
    let omega = (hx * hx + hy * hy + hz * hz).sqrt();
    let arg = omega * tau;
    let (c, sinc) = if arg.abs() < 1e-4 {
        let a2 = arg * arg;
        (1.0 - 0.5 * a2 + a2 * a2 / 24.0, tau * (1.0 - a2 / 6.0 + a2 * a2 / 120.0))
    } else {
        let (s, c) = arg.sin_cos();
        (c, s / omega)
    };
    // −i·sinc·(h·σ)
    [
        [C64::new(c, -sinc * hz), C64::new(-sinc * hy, -sinc * hx)],
        [C64::new(sinc * hy, -sinc * hx), C64::new(c, sinc * hz)],
    ]
}

/// (⟨σ_x⟩, ⟨σ_y⟩, ⟨σ_z⟩) for an unnormalized spinor, weighted by |s|².
#[inline]
/// Eigenvectors of h·σ for the eigenvalues +|h| and −|h|; (↑, ↓) when h = 0.
pub fn field_eigenvectors(h: [f64; 3]) -> (Spinor, Spinor) {
    let m = (h[0] * h[0] + h[1] * h[1] + h[2] * h[2]).sqrt();
    if m == 0.0 {
        return ([ONE, ZERO], [ZERO, ONE]);
    }
    let theta = (h[2] / m).clamp(-1.0, 1.0).acos();
    let phi = h[1].atan2(h[0]);
    let (s, c) = (0.5 * theta).sin_cos();
    let e = C64::from_polar(1.0, phi);
    ([C64::new(c, 0.0), e * s], [C64::new(s, 0.0), -e * c])
}

pub fn bloch(s: Spinor) -> [f64; 3] {
    let cross = s[0].conj() * s[1];
    [2.0 * cross.re, 2.0 * cross.im, s[0].norm_sqr() - s[1].norm_sqr()]
}

pub fn norm_sqr(s: Spinor) -> f64 {
    s[0].norm_sqr() + s[1].norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_eigenvectors_diagonalize() {
        for h in [[0.3f64, -1.2, 0.5], [0.0, 0.0, -2.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [-0.2, 0.1, 3.0]] {
            let m = (h[0] * h[0] + h[1] * h[1] + h[2] * h[2]).sqrt();
            let (up, down) = field_eigenvectors(h);
            let hm = hamiltonian(0.0, h);
            for (v, e) in [(up, m), (down, -m)] {
                let w = apply(&hm, v);
                assert!((w[0] - v[0] * e).norm() < 1e-12 && (w[1] - v[1] * e).norm() < 1e-12, "{h:?}");
                assert!((norm_sqr(v) - 1.0).abs() < 1e-12);
            }
            assert!((up[0].conj() * down[0] + up[1].conj() * down[1]).norm() < 1e-12);
        }
    }

    fn taylor_exp(h: [f64; 3], tau: f64) -> Mat2 {
        let gen = scale(&hamiltonian(0.0, h), C64::new(0.0, -tau));
        let mut out = IDENTITY;
        let mut term = IDENTITY;
        for k in 1..60 {
            term = scale(&mul(&term, &gen), C64::new(1.0 / k as f64, 0.0));
            out = add(&out, &term);
        }
        out
    }

    #[test]
    fn closed_form_matches_taylor_series() {
        for (h, tau) in [([0.3, -1.2, 0.7], 0.9), ([5.0, 0.0, 0.0], 0.1), ([0.0, 0.0, -2.0], 1.7), ([1e-7, 0.0, 2e-7], 3.0)] {
            assert!(max_diff(&su2_exp(h, tau), &taylor_exp(h, tau)) < 1e-13);
        }
    }

    #[test]
    fn zero_field_is_identity() {
        assert_eq!(su2_exp([0.0; 3], 2.5), IDENTITY);
    }

    #[test]
    fn exponential_is_unitary() {
        let u = su2_exp([1.3, 0.2, -4.1], 0.37);
        assert!(max_diff(&mul(&u, &dagger(&u)), &IDENTITY) < 1e-15);
    }

    #[test]
    fn pauli_algebra() {
        // [σ_x, σ_z] = −2iσ_y
        let comm = add(&mul(&SIGMA_X, &SIGMA_Z), &scale(&mul(&SIGMA_Z, &SIGMA_X), C64::new(-1.0, 0.0)));
        assert!(max_diff(&comm, &scale(&SIGMA_Y, C64::new(0.0, -2.0))) < 1e-15);
        let h = hamiltonian(0.5, [1.0, 2.0, 3.0]);
        let explicit = add(
            &add(&scale(&IDENTITY, C64::new(0.5, 0.0)), &SIGMA_X),
            &add(&scale(&SIGMA_Y, C64::new(2.0, 0.0)), &scale(&SIGMA_Z, C64::new(3.0, 0.0))),
        );
        assert!(max_diff(&h, &explicit) < 1e-15);
    }

    #[test]
    fn bloch_vector_of_basis_states() {
        let s = crate::state::default_spinor();
        let b = bloch(s);
        assert!((b[0]).abs() < 1e-15 && (b[1] - 1.0).abs() < 1e-15 && b[2].abs() < 1e-15);
    }
}
