use super::*;
use proptest::prelude::*;

fn sample_points(n: usize) -> Vec<[f64; 2]> {
    // splitmix64 for reproducible scatter over one laser period
    let mut s: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut next = || {
        s = s.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = s;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        (z ^ (z >> 31)) as f64 / u64::MAX as f64
    };
    (0..n).map(|_| [-3.0 + 6.0 * next(), -3.0 + 6.0 * next()]).collect()
}

fn max_entry(m: &GaugeMatrix) -> f64 {
    m.iter().fold(0.0, |a, v| a.max(v.norm()))
}

#[test]
fn dark_columns_are_orthonormal_and_dark() {
    let cfg = LaserConfig::default();
    for p in sample_points(8) {
        let d = dark_states(&cfg, p);
        let r = cfg.rabi(p);
        for c in 0..2 {
            let v: C64 = (0..3).map(|i| r[i] * d[(i, c)]).sum();
            assert!(v.norm() < 1e-12, "{v}");
        }
        let g = d.adjoint() * d;
        assert!(max_entry(&(g - GaugeMatrix::identity())) < 1e-12);
    }
}

#[test]
fn projector_properties() {
    let cfg = LaserConfig::default();
    for p in sample_points(8) {
        let pr = dark_projector(&cfg, p);
        assert!((pr * pr - pr).iter().all(|v| v.norm() < 1e-12));
        assert!((pr.adjoint() - pr).iter().all(|v| v.norm() < 1e-12));
        assert!((pr.trace() - C64::new(2.0, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn dark_space_is_periodic_in_x() {
    let cfg = LaserConfig::default();
    let period = 2.0 * std::f64::consts::PI / cfg.k_l;
    for p in sample_points(4) {
        let a = dark_projector(&cfg, p);
        let b = dark_projector(&cfg, [p[0] + period, p[1]]);
        assert!((a - b).iter().all(|v| v.norm() < 1e-10));
    }
}

#[test]
fn gauge_fixed_basis_is_smooth() {
    let cfg = LaserConfig::default();
    let d = 1e-4 / cfg.k_l;
    for p in sample_points(6) {
        let a = dark_states(&cfg, p);
        let b = dark_states(&cfg, [p[0] + 0.6 * d, p[1] + 0.8 * d]);
        assert!(max_entry(&(a.adjoint() * b - GaugeMatrix::identity())) < 1e-3);
    }
}

#[test]
fn potential_is_hermitian() {
    let cfg = LaserConfig::default();
    for gauge in [GaugeFixing::default(), GaugeFixing::Translation] {
        let (ax, az) = gauge_potential_in(&cfg, [0.4, -1.1], 1e-3, gauge).unwrap();
        assert!(max_entry(&(ax - ax.adjoint())) < 1e-10);
        assert!(max_entry(&(az - az.adjoint())) < 1e-10);
    }
}

#[test]
fn transported_gauge_is_axial() {
    let (_, az) = gauge_potential(&LaserConfig::default(), [0.4, -1.1], 1e-3).unwrap();
    assert!(max_entry(&az) < 1e-4, "{az}");
}

#[test]
fn translation_gauge_is_constant_and_non_abelian() {
    let cfg = LaserConfig::default();
    let (ax, az) = gauge_potential_in(&cfg, [0.4, -1.1], 1e-3, GaugeFixing::Translation).unwrap();
    let c = ax * az - az * ax;
    assert!(c.norm() > 0.1, "{}", c.norm());
    // Constant potential: F reduces to the commutator term, and -i[a_x, a_z]
    // has the ±2 spectrum on its own.
    let s = hermitian_eigenvalues(&(c * C64::new(0.0, -1.0)));
    assert!((s[0] + 2.0).abs() < 1e-5 && (s[1] - 2.0).abs() < 1e-5, "{s:?}");
    let (bx, bz) = gauge_potential_in(&cfg, [-2.3, 1.7], 1e-3, GaugeFixing::Translation).unwrap();
    assert!(max_entry(&(ax - bx)) < 1e-6 && max_entry(&(az - bz)) < 1e-6);
}

#[test]
fn spectrum_agrees_between_gauges() {
    let cfg = LaserConfig::default();
    for p in sample_points(3) {
        let a = field_strength_spectrum(&cfg, p).unwrap();
        let b = hermitian_eigenvalues(&field_strength_in(&cfg, p, GaugeFixing::Translation).unwrap());
        assert!((a[0] - b[0]).abs() < 1e-6 && (a[1] - b[1]).abs() < 1e-6, "{a:?} {b:?}");
    }
}

#[test]
fn potential_converges_at_second_order() {
    let cfg = LaserConfig::default();
    let p = [0.3, 0.7];
    let a = |h: f64| gauge_potential(&cfg, p, h).unwrap();
    let (r4, r8) = (a(2.5e-4), a(1.25e-4));
    let reference = (r8.0 * C64::new(4.0, 0.0) - r4.0) / C64::new(3.0, 0.0);
    let reference_z = (r8.1 * C64::new(4.0, 0.0) - r4.1) / C64::new(3.0, 0.0);
    let (a1, a2) = (a(1e-3), a(5e-4));
    for (coarse, fine, r) in [(a1.0, a2.0, reference), (a1.1, a2.1, reference_z)] {
        let ratio = (coarse - r).norm() / (fine - r).norm();
        assert!((3.5..=4.5).contains(&ratio), "{ratio}");
    }
}

#[test]
fn step_too_large_rejected() {
    assert!(gauge_potential(&LaserConfig::default(), [0.0, 0.0], 2e-3).is_err());
}

#[test]
fn default_spectrum_is_plus_minus_two() {
    let cfg = LaserConfig::default();
    let spectra: Vec<[f64; 2]> = sample_points(10).into_iter().map(|p| field_strength_spectrum(&cfg, p).unwrap()).collect();
    for s in &spectra {
        assert!((s[0] + 2.0).abs() < 1e-4 && (s[1] - 2.0).abs() < 1e-4, "{s:?}");
    }
    for k in 0..2 {
        let (lo, hi) = spectra.iter().fold((f64::MAX, f64::MIN), |(l, h), s| (l.min(s[k]), h.max(s[k])));
        assert!(hi - lo < 1e-8, "spread {}", hi - lo);
    }
}

#[test]
fn spectrum_scales_with_laser_wavevector() {
    // Units of ħκ² absorb k_l.
    let cfg = LaserConfig { k_l: 2.5, ..LaserConfig::default() };
    let s = field_strength_spectrum(&cfg, [0.2, 0.1]).unwrap();
    assert!((s[0] + 2.0).abs() < 1e-4 && (s[1] - 2.0).abs() < 1e-4, "{s:?}");
}

#[test]
fn spectrum_independent_of_transport_path() {
    let cfg = LaserConfig::default();
    for p in sample_points(3) {
        let a = field_strength_spectrum_with(|q| dark_states_along(&cfg, q, TransportPath::XThenZ), &cfg, p).unwrap();
        let b = field_strength_spectrum_with(|q| dark_states_along(&cfg, q, TransportPath::ZThenX), &cfg, p).unwrap();
        assert!((a[0] - b[0]).abs() < 1e-6 && (a[1] - b[1]).abs() < 1e-6, "{a:?} {b:?}");
    }
}

#[test]
fn spectrum_changes_with_mixing_angle() {
    let base = LaserConfig::default();
    let p = [0.5, 0.5];
    let s0 = field_strength_spectrum(&base, p).unwrap();
    let mut last = s0[1];
    for dxi in [0.05, 0.1, 0.2] {
        let s = field_strength_spectrum(&LaserConfig { xi: base.xi + dxi, ..base }, p).unwrap();
        assert!((s[1] - 2.0).abs() > 1e-3, "{dxi}: {s:?}");
        // continuity: small steps in xi give small steps in the spectrum
        assert!((s[1] - last).abs() < 1.0);
        last = s[1];
    }
}

#[test]
fn invalid_configs_rejected() {
    assert!(LaserConfig::new(0.0, 0.5, 1.0).is_err());
    assert!(LaserConfig::new(1.0, 0.0, 1.0).is_err());
    assert!(LaserConfig::new(1.0, 1.6, 1.0).is_err());
    assert!(LaserConfig::new(1.0, 0.5, -1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn spectrum_is_gauge_covariant(
        sx in -1.0f64..1.0, sy in -1.0f64..1.0, sz in -1.0f64..1.0,
        k in 0.2f64..1.5, x in -2.0f64..2.0, z in -2.0f64..2.0,
    ) {
        let cfg = LaserConfig::default();
        let p = [x, z];
        let plain = field_strength_spectrum(&cfg, p).unwrap();
        let twisted = field_strength_spectrum_with(
            |q| dark_states(&cfg, q) * smooth_twist(q, [sx, sy, sz], k), &cfg, p).unwrap();
        prop_assert!((plain[0] - twisted[0]).abs() < 1e-6 && (plain[1] - twisted[1]).abs() < 1e-6,
            "{:?} {:?}", plain, twisted);
    }
}
