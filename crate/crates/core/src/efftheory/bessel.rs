//! Bessel function of the first kind, order zero.

use std::f64::consts::{FRAC_PI_4, PI};

/// Crossover between the power series and the Hankel asymptotic expansion.
/// Both branches are accurate to better than 1e−12 at this point.
const SPLIT: f64 = 12.0;

/// J₀(x) for |x| < 1e3, absolute error below 1e−12.
pub fn bessel_j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= SPLIT {
        series(ax)
    } else {
        asymptotic(ax)
    }
}

fn series(x: f64) -> f64 {
    let y = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= -y / (kf * kf);
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

/// J₀(x) = √(2/πx)·(P cos χ − Q sin χ), χ = x − π/4, with P and Q summed
/// until the terms stop decreasing.
fn asymptotic(x: f64) -> f64 {
    // a_k = Π_{j=1..k} (−(2j−1)²) / (k!·8^k)
    let mut a = [0.0f64; 64];
    a[0] = 1.0;
    for k in 1..a.len() {
        let odd = (2 * k - 1) as f64;
        a[k] = a[k - 1] * (-odd * odd) / (8.0 * k as f64);
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let (mut p, mut q) = (0.0, 0.0);
    let mut pow = 1.0; // x^{-2k}
    let mut sign = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..a.len() / 2 {
        let tp = sign * a[2 * k] * pow;
        let tq = sign * a[2 * k + 1] * pow * inv;
        if tp.abs() > last {
            break;
        }
        last = tp.abs();
        p += tp;
        q += tq;
        if last < 1e-18 {
            break;
        }
        pow *= inv2;
        sign = -sign;
    }
    let chi = x - FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// First `n` positive zeros of J₀ by bracketing and bisection.
pub fn j0_zeros(n: usize) -> Vec<f64> {
    let mut zeros = Vec::with_capacity(n);
    let step = 0.25;
    let mut lo = step;
    let mut f_lo = bessel_j0(lo);
    while zeros.len() < n {
        let hi = lo + step;
        let f_hi = bessel_j0(hi);
        if f_lo == 0.0 {
            zeros.push(lo);
        } else if f_lo.signum() != f_hi.signum() {
            zeros.push(bisect(lo, hi, f_lo));
        }
        lo = hi;
        f_lo = f_hi;
    }
    zeros
}

fn bisect(mut lo: f64, mut hi: f64, mut f_lo: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-14 {
            return mid;
        }
        let f_mid = bessel_j0(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from a 50-digit evaluation.
    const REFERENCE: [(f64, f64); 10] = [
        (1.52, 0.500_641_505_699_899_6),
        (2.22, 0.099_271_976_413_235_54),
        (8.0, 0.171_650_807_137_553_9),
        (10.0, -0.245_935_764_451_348_35),
        (12.0, 0.047_689_310_796_833_535),
        (12.01, 0.049_920_430_319_825_355),
        (13.0, 0.206_926_102_377_067_82),
        (50.0, 0.055_812_327_669_251_816),
        (200.0, -0.015_437_439_930_565_091),
        (999.0, 0.017_369_296_355_194_13),
    ];

    /// Independent 40-term power series.
    fn series_oracle(x: f64) -> f64 {
        (0..40)
            .map(|k| {
                let fact: f64 = (1..=k).map(|j| j as f64).product();
                (-1f64).powi(k) * (x / 2.0).powi(2 * k) / (fact * fact)
            })
            .sum()
    }

    #[test]
    fn matches_reference_table() {
        for (x, want) in REFERENCE {
            let got = bessel_j0(x);
            assert!((got - want).abs() < 1e-12, "J0({x}) = {got}, want {want}");
            assert!((bessel_j0(-x) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_term_at_origin() {
        assert_eq!(bessel_j0(0.0), 1.0);
    }

    #[test]
    fn working_points() {
        assert!((bessel_j0(1.52) - 0.5006).abs() < 1e-3);
        assert!((bessel_j0(2.22) - 0.0994).abs() < 1e-3);
        for x in [1.52, 2.22, 0.4, 1.14] {
            assert!((bessel_j0(x) - series_oracle(x)).abs() < 1e-13);
        }
    }

    #[test]
    fn continuous_across_split() {
        assert!((series(SPLIT) - asymptotic(SPLIT)).abs() < 1e-12);
    }

    #[test]
    fn zeros_by_bisection() {
        let z = j0_zeros(5);
        let known = [2.404_825_557_695_773, 5.520_078_110_286_311, 8.653_727_912_911_013, 11.791_534_439_014_28, 14.930_917_708_487_79];
        for (a, b) in z.iter().zip(known) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
            assert!(bessel_j0(*a).abs() < 1e-12);
        }
    }
}
