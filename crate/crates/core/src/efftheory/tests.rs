use proptest::prelude::*;

use super::*;
use crate::spin::{apply, max_diff};

#[test]
fn averaging_matches_bessel_closed_form() {
    let drive = DriveParams::new(38.0, 50.0).unwrap();
    let p = [1.0, 1.0];
    let numeric = average_hamiltonian(&drive, p, 256).unwrap();
    let closed = effective_hamiltonian(p, bessel_j0(2.0 * 38.0 / 50.0));
    assert!(max_diff(&numeric, &closed) < 1e-10);
}

#[test]
fn averaging_without_drive_is_static_hamiltonian() {
    let p = [0.7, -2.3];
    let avg = average_hamiltonian(&DriveParams::undriven(50.0), p, 64).unwrap();
    assert_eq!(avg, static_hamiltonian(p));
}

#[test]
fn averaging_leaves_sigma_z_part_alone() {
    let p = [3.0, -1.5];
    let h = static_hamiltonian(p);
    for v in [5.0, 38.0, 60.0, 123.0] {
        let avg = average_hamiltonian(&DriveParams::new(v, 50.0).unwrap(), p, 128).unwrap();
        assert!((avg[0][0] - h[0][0]).norm() < 1e-12);
        assert!((avg[1][1] - h[1][1]).norm() < 1e-12);
    }
}

#[test]
fn averaging_rejects_coarse_quadrature() {
    assert!(average_hamiltonian(&DriveParams::undriven(1.0), [0.0, 0.0], 63).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn averaging_identity_random(v in 0.0f64..80.0, w in 10.0f64..200.0, px in -30.0f64..30.0, pz in -30.0f64..30.0) {
        let drive = DriveParams::new(v, w).unwrap();
        let numeric = average_hamiltonian(&drive, [px, pz], 256).unwrap();
        let closed = effective_hamiltonian([px, pz], j0_factor(&drive));
        prop_assert!(max_diff(&numeric, &closed) < 1e-9);
    }

    #[test]
    fn eigensystem_residuals(px in -40.0f64..40.0, pz in -40.0f64..40.0, j0 in -0.5f64..1.0) {
        let es = eff_eigensystem([px, pz], j0);
        let h = effective_hamiltonian([px, pz], j0);
        for (psi, e) in [(es.psi_plus, es.e_plus), (es.psi_minus, es.e_minus)] {
            let hp = apply(&h, psi);
            let r = ((hp[0] - psi[0] * e).norm_sqr() + (hp[1] - psi[1] * e).norm_sqr()).sqrt();
            prop_assert!(r < 1e-12 * (1.0 + e.abs()));
        }
        let overlap = es.psi_plus[0].conj() * es.psi_minus[0] + es.psi_plus[1].conj() * es.psi_minus[1];
        prop_assert!(overlap.norm() < 1e-14);
    }
}

#[test]
fn eigensystem_along_axes() {
    let es = eff_eigensystem([1.0, 0.0], 1.0);
    assert!(es.theta.abs() < 1e-15);
    assert!((es.beta - FRAC_PI_4).abs() < 1e-15);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    assert!((es.psi_plus[0].re - r).abs() < 1e-15 && (es.psi_plus[1].re - r).abs() < 1e-15);
    assert!((es.e_plus - 1.5).abs() < 1e-15 && (es.e_minus + 0.5).abs() < 1e-15);

    for j0 in [1.0, 0.3, 0.0, -0.4] {
        let es = eff_eigensystem([0.0, 1.0], j0);
        assert!((es.theta - PI / 2.0).abs() < 1e-15);
        assert!(es.beta.abs() < 1e-15);
        assert!((es.psi_plus[0].re - 1.0).abs() < 1e-15);
        assert!((es.e_plus - 1.5).abs() < 1e-15);
    }
}

#[test]
fn eigensystem_generic_point() {
    let es = eff_eigensystem([3.0, 4.0], 0.5);
    let want = 2.0 * (1.5f64 * 1.5 + 16.0).sqrt();
    assert!((es.zb_omega() - want).abs() < 1e-12);
    assert!((es.zb_omega() - 8.544).abs() < 1e-3);
}

#[test]
fn eigensystem_degenerate_point() {
    let es = eff_eigensystem([2.0, 0.0], 0.0);
    assert!(es.degenerate);
    assert!((es.beta - FRAC_PI_4).abs() < 1e-15);
    assert_eq!(es.e_plus, es.e_minus);
}

fn default_setup(p0: [f64; 2]) -> (PacketSpec, MomentumGrid) {
    let spec = PacketSpec::with_p0(p0);
    let grid = MomentumGrid::around(&spec, 128, 6.0).unwrap();
    (spec, grid)
}

/// Brute-force trajectory with θ differentiated numerically.
fn brute_force_zb(spec: &PacketSpec, grid: &MomentumGrid, j0: f64, t: f64) -> [f64; 2] {
    let theta = |p: [f64; 2]| p[1].atan2(j0 * p[0]);
    let h = 1e-6;
    let mut acc = [0.0; 2];
    let mut total = 0.0;
    for i in 0..grid.len() {
        let p = grid.momentum(i);
        let w = (-(p[0] - spec.p0[0]).powi(2) / (2.0 * spec.sigma_p[0].powi(2))
            - (p[1] - spec.p0[1]).powi(2) / (2.0 * spec.sigma_p[1].powi(2)))
        .exp();
        total += w;
        let gx = (theta([p[0] + h, p[1]]) - theta([p[0] - h, p[1]])) / (2.0 * h);
        let gz = (theta([p[0], p[1] + h]) - theta([p[0], p[1] - h])) / (2.0 * h);
        let f = 1.0 - (2.0 * (j0 * p[0]).hypot(p[1]) * t).cos();
        acc[0] += w * 0.5 * gx * f;
        acc[1] += w * 0.5 * gz * f;
    }
    [acc[0] / total + spec.r0[0] + spec.p0[0] * t, acc[1] / total + spec.r0[1] + spec.p0[1] * t]
}

#[test]
fn closed_form_starts_at_r0() {
    let (mut spec, grid) = default_setup([0.0, 5.0]);
    spec.r0 = [3.0, -2.0];
    let r = zb_closed_form(&spec, &grid, 1.0, &[0.0]).unwrap();
    assert!((r[0][0] - 3.0).abs() < 1e-14 && (r[0][1] + 2.0).abs() < 1e-14);
}

#[test]
fn closed_form_matches_brute_force() {
    let (spec, grid) = default_setup([0.0, 5.0]);
    let times = [0.1, 0.7, 2.3, 6.0];
    for j0 in [1.0, 0.5, 0.1] {
        let got = zb_closed_form(&spec, &grid, j0, &times).unwrap();
        for (t, g) in times.iter().zip(&got) {
            let want = brute_force_zb(&spec, &grid, j0, *t);
            assert!((g[0] - want[0]).abs() < 1e-8 && (g[1] - want[1]).abs() < 1e-7, "t={t} {g:?} {want:?}");
        }
    }
}

#[test]
fn case_a_closed_form_oscillation() {
    let (spec, grid) = default_setup([0.0, 5.0]);
    // Half a ZB period: x ≈ x0 − 2·(1/10).
    let r = zb_closed_form(&spec, &grid, 1.0, &[PI / 10.0]).unwrap();
    assert!((r[0][0] + 0.2).abs() < 2e-3, "{:?}", r[0]);
    // Long times: oscillation dephases around x0 − 1/(2·5).
    let r = zb_closed_form(&spec, &grid, 1.0, &[40.0]).unwrap();
    assert!((r[0][0] + 0.1).abs() < 2e-3, "{:?}", r[0]);
    // Halving J0 halves the excursion at the same half-period time.
    let half = zb_closed_form(&spec, &grid, 0.5, &[PI / 10.0]).unwrap();
    assert!((half[0][0] / -0.1 - 1.0).abs() < 0.02, "{:?}", half[0]);
}

#[test]
fn case_a_cdt_kills_the_oscillating_term() {
    let (spec, grid) = default_setup([0.0, 5.0]);
    let times: Vec<f64> = (0..50).map(|k| 0.2 * k as f64).collect();
    for r in zb_closed_form(&spec, &grid, 0.0, &times).unwrap() {
        assert_eq!(r[0], 0.0);
    }
}

#[test]
fn closed_form_rejects_unsorted_times() {
    let (spec, grid) = default_setup([0.0, 5.0]);
    assert!(zb_closed_form(&spec, &grid, 1.0, &[1.0, 0.5]).is_err());
    let mut other = spec;
    other.spinor0 = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    assert!(zb_closed_form(&other, &grid, 1.0, &[0.0]).is_err());
}

#[test]
fn case_a_working_points() {
    let half = case_a_prediction(&DriveParams::from_ratio(1.52, 50.0).unwrap());
    assert!((half.amp_ratio - 0.50).abs() < 0.01 && half.freq_ratio == 1.0 && half.axis == Axis::X);
    let tenth = case_a_prediction(&DriveParams::from_ratio(2.22, 50.0).unwrap());
    assert!((tenth.amp_ratio - 0.10).abs() < 0.01);
    let none = case_a_prediction(&DriveParams::undriven(50.0));
    assert_eq!((none.amp_ratio, none.freq_ratio), (1.0, 1.0));
}

#[test]
fn case_b_working_points() {
    let a = case_b_prediction(&DriveParams::from_ratio(1.14, 50.0).unwrap()).unwrap();
    assert!((a.amp_ratio - 1.41).abs() < 0.02 && (a.freq_ratio - 0.70).abs() < 0.01, "{a:?}");
    assert_eq!(a.axis, Axis::Z);
    let b = case_b_prediction(&DriveParams::from_ratio(1.52, 50.0).unwrap()).unwrap();
    assert!((b.amp_ratio - 2.0).abs() < 0.01 && (b.freq_ratio - 0.5).abs() < 0.01);
    let none = case_b_prediction(&DriveParams::undriven(50.0)).unwrap();
    assert_eq!((none.amp_ratio, none.freq_ratio), (1.0, 1.0));
}

#[test]
fn case_b_undefined_at_cdt() {
    let v = cdt_points(50.0, 1).unwrap()[0];
    let err = case_b_prediction(&DriveParams::new(v, 50.0).unwrap()).unwrap_err();
    assert!(matches!(err, Error::CdtPoint { .. }));
}

#[test]
fn case_b_frequency_vanishes_towards_cdt() {
    let v_cdt = cdt_points(50.0, 1).unwrap()[0];
    let freqs: Vec<f64> = [0.9, 0.99, 0.999, 0.9999]
        .iter()
        .map(|f| case_b_prediction(&DriveParams::new(f * v_cdt, 50.0).unwrap()).unwrap().freq_ratio)
        .collect();
    assert!(freqs.windows(2).all(|w| w[1] < w[0]));
    assert!(freqs[3] < 1e-3);
}

#[test]
fn cdt_points_oracle() {
    let first = cdt_points(50.0, 1).unwrap();
    assert!((first[0] - 60.12).abs() < 0.01);
    assert!((cdt_points(2.0, 1).unwrap()[0] - 2.404_826).abs() < 1e-6);
    let pts = cdt_points(50.0, 6).unwrap();
    assert!(pts.windows(2).all(|w| w[1] > w[0]));
    for v in &pts {
        assert!(bessel_j0(2.0 * v / 50.0).abs() < 1e-9);
    }
    let scaled = cdt_points(150.0, 6).unwrap();
    for (a, b) in pts.iter().zip(&scaled) {
        assert!((3.0 * a - b).abs() < 1e-9);
    }
    assert!(cdt_points(50.0, 0).is_err());
}

#[test]
fn resonance_frequency_set_by_drive_velocity() {
    let spec = PacketSpec::with_p0([25.0, 0.0]);
    let th = ResonanceTheory::new(&DriveParams::new(10.0, 50.0).unwrap(), &spec).unwrap();
    assert!((th.zb_freq - 10.0).abs() < 1e-12);
    assert_eq!(th.zb_axis(), Axis::X);
    assert!(th.group_velocity_difference([25.0, 0.0]).abs() < 1e-12);
    // Near resonance the difference is bounded by 2·detuning/(v_d/2).
    let d = th.group_velocity_difference([25.1, 0.0]);
    assert!(d > 0.0 && d <= 2.0 * 0.1 / 5.0);
    let (ep, em) = th.e_approx([25.0, 0.0]);
    assert!((th.e_plus([25.0, 0.0]) - ep).abs() < 1e-12 && (th.e_minus([25.0, 0.0]) - em).abs() < 1e-12);
}

#[test]
fn resonance_without_drive_has_no_zb() {
    let spec = PacketSpec::with_p0([25.0, 0.0]);
    let th = ResonanceTheory::new(&DriveParams::undriven(50.0), &spec).unwrap();
    assert_eq!(th.zb_freq, 0.0);
}

#[test]
fn resonance_rejects_detuned_packet() {
    let spec = PacketSpec::with_p0([20.0, 0.0]);
    let err = ResonanceTheory::new(&DriveParams::new(10.0, 50.0).unwrap(), &spec).unwrap_err();
    assert!(matches!(err, Error::OffResonance { .. }));
    let spec = PacketSpec::with_p0([25.0, 0.0]);
    assert!(ResonanceTheory::new(&DriveParams::new(20.0, 50.0).unwrap(), &spec).is_err());
}

/// 1/e decay time of |Σ|G|²e^{iω(p)t}| by direct quadrature.
fn dephasing_oracle(spec: &PacketSpec, j0: f64) -> f64 {
    let n = 201;
    let node = |k: usize| -6.0 + 12.0 * k as f64 / (n - 1) as f64;
    let envelope = |t: f64| {
        let (mut re, mut im, mut tot) = (0.0, 0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                let (u, v) = (node(i), node(k));
                let w = (-0.5 * (u * u + v * v)).exp();
                let p = [spec.p0[0] + u * spec.sigma_p[0], spec.p0[1] + v * spec.sigma_p[1]];
                let ph = 2.0 * (j0 * p[0]).hypot(p[1]) * t;
                re += w * ph.cos();
                im += w * ph.sin();
                tot += w;
            }
        }
        re.hypot(im) / tot
    };
    let (mut lo, mut hi) = (0.0, 50.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if envelope(mid) > (-1f64).exp() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn static_lifetime_from_momentum_spread() {
    let spec = PacketSpec::with_p0([0.0, 5.0]);
    let tau = lifetime_estimate(&spec, 1.0, LifetimeRegime::StaticLike).unwrap();
    assert!((tau - PI / (4.0 * crate::state::DEFAULT_SIGMA_P)).abs() < 0.02, "{tau}");
    assert!((tau - 4.97).abs() < 0.02);
    // The Gaussian dephasing envelope reaches 1/e at √2/δω, within 15% of π/(2δω).
    let oracle = dephasing_oracle(&spec, 1.0);
    assert!(((tau - oracle) / oracle).abs() < 0.15, "tau {tau} oracle {oracle}");
}

#[test]
fn lifetime_inverse_in_spread() {
    let spec = PacketSpec::with_p0([0.0, 5.0]);
    let mut wide = spec;
    wide.sigma_p = [2.0 * spec.sigma_p[0], 2.0 * spec.sigma_p[1]];
    let a = lifetime_estimate(&spec, 1.0, LifetimeRegime::StaticLike).unwrap();
    let b = lifetime_estimate(&wide, 1.0, LifetimeRegime::StaticLike).unwrap();
    assert!((a / b - 2.0).abs() < 0.01, "{a} {b}");
}

#[test]
fn resonance_lifetime_exceeds_static_tenfold() {
    let spec = PacketSpec::with_p0([25.0, 0.0]);
    let j0 = bessel_j0(0.4);
    let stat = lifetime_estimate(&spec, j0, LifetimeRegime::StaticLike).unwrap();
    let reso = lifetime_estimate(&spec, j0, LifetimeRegime::Resonance { v_d: 10.0 }).unwrap();
    assert!(reso >= 10.0 * stat);
    let fig2a = lifetime_estimate(&PacketSpec::default(), 1.0, LifetimeRegime::StaticLike).unwrap();
    assert!(reso >= 10.0 * fig2a);
}
