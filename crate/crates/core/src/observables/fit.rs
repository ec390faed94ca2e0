//! Damped-sinusoid fit r(t) = c₀ + c₁t + a·e^{−(t/τ)^β}cos(ωt + φ).
//!
//! The model is linear in (c₀, c₁, a cos φ, −a sin φ) once (ω, τ, β) are
//! fixed, so the nonlinear search runs over those only (variable
//! projection) with a Levenberg–Marquardt loop on finite-difference
//! Jacobians. β = 1 is the plain exponential envelope; β = 2 is the
//! Gaussian envelope of dephasing by a Gaussian frequency spread.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

use super::series::TimeSeries;
use crate::efftheory::Axis;
use crate::error::{Error, Result};

/// Shape of the damping envelope.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Envelope {
    /// e^{−t/τ}.
    Exponential,
    /// e^{−(t/τ)^β} with β fitted in [1, 2].
    Stretched,
}

/// Caps on the fitted parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Upper bound of the frequency search band; `None` uses the sampling
    /// Nyquist frequency.
    pub omega_max: Option<f64>,
    pub max_iterations: usize,
    pub envelope: Envelope,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { omega_max: None, max_iterations: 200, envelope: Envelope::Stretched }
    }
}

/// Fitted ZB parameters of one position component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZbSummary {
    /// Envelope amplitude extrapolated to t = 0.
    pub amplitude: f64,
    pub omega: f64,
    /// 1/e envelope time; capped at 1e9 for undamped series.
    pub tau: f64,
    /// Envelope exponent β.
    pub envelope_exponent: f64,
    pub phase: f64,
    pub offset: f64,
    pub drift_velocity: [f64; 2],
    pub axis: Axis,
    /// RMS residual relative to the RMS of the detrended signal.
    pub fit_residual: f64,
    pub iterations: usize,
}

const TAU_CAP: f64 = 1e9;
const BETA_RANGE: (f64, f64) = (1.0, 2.0);

impl ZbSummary {
    /// Flat `key = value` block.
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "axis = {}", self.axis.name());
        let _ = writeln!(s, "amplitude = {:e}", self.amplitude);
        let _ = writeln!(s, "omega = {:e}", self.omega);
        let _ = writeln!(s, "tau = {:e}", self.tau);
        let _ = writeln!(s, "envelope_exponent = {:e}", self.envelope_exponent);
        let _ = writeln!(s, "phase = {:e}", self.phase);
        let _ = writeln!(s, "offset = {:e}", self.offset);
        let _ = writeln!(s, "drift_velocity_x = {:e}", self.drift_velocity[0]);
        let _ = writeln!(s, "drift_velocity_z = {:e}", self.drift_velocity[1]);
        let _ = writeln!(s, "fit_residual = {:e}", self.fit_residual);
        s
    }

    /// Model value at time t.
    pub fn eval(&self, t: f64) -> f64 {
        let v = self.drift_velocity[self.axis.index()];
        let env = (-(t / self.tau).powf(self.envelope_exponent)).exp();
        self.offset + v * t + self.amplitude * env * (self.omega * t + self.phase).cos()
    }
}

/// Nonlinear parameters (ω, γ = 1/τ, β).
type Params = [f64; 3];

struct Projection {
    coeffs: [f64; 4],
    residual: Vec<f64>,
}

fn envelope(t: f64, gamma: f64, beta: f64) -> f64 {
    let u = gamma * t;
    if u <= 0.0 {
        1.0
    } else {
        (-u.powf(beta)).exp()
    }
}

/// Linear least squares for fixed nonlinear parameters.
fn project(t: &[f64], y: &[f64], p: Params) -> Option<Projection> {
    let [omega, gamma, beta] = p;
    let n = t.len();
    let mut a = DMatrix::<f64>::zeros(n, 4);
    for (k, &tk) in t.iter().enumerate() {
        let env = envelope(tk, gamma, beta);
        let (s, c) = (omega * tk).sin_cos();
        a[(k, 0)] = 1.0;
        a[(k, 1)] = tk;
        a[(k, 2)] = env * c;
        a[(k, 3)] = env * s;
    }
    let b = DVector::from_column_slice(y);
    let svd = a.clone().svd(true, true);
    let x = svd.solve(&b, 1e-12).ok()?;
    let r = &b - &a * &x;
    Some(Projection { coeffs: [x[0], x[1], x[2], x[3]], residual: r.iter().copied().collect() })
}

fn ssr(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

/// Ordinary least-squares line through (t, y).
fn line_fit(t: &[f64], y: &[f64]) -> (f64, f64) {
    let n = t.len() as f64;
    let mt = t.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in t.iter().zip(y) {
        sxy += (a - mt) * (b - my);
        sxx += (a - mt) * (a - mt);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (my - slope * mt, slope)
}

/// Amplitude spectrum |(2/N)Σ r_k e^{−iωt_k}| on an 8× oversampled grid.
fn periodogram(t: &[f64], r: &[f64], omega_lo: f64, omega_hi: f64) -> Vec<(f64, f64)> {
    let span = t[t.len() - 1] - t[0];
    let d_omega = 2.0 * PI / (8.0 * span);
    let n = ((omega_hi - omega_lo) / d_omega).floor() as usize + 1;
    let scale = 2.0 / t.len() as f64;
    (0..n)
        .map(|k| {
            let w = omega_lo + k as f64 * d_omega;
            let (mut re, mut im) = (0.0, 0.0);
            for (tk, rk) in t.iter().zip(r) {
                let (s, c) = (w * tk).sin_cos();
                re += rk * c;
                im -= rk * s;
            }
            (w, scale * re.hypot(im))
        })
        .collect()
}

/// Decay-rate guess from the slope of log(per-period maxima).
fn envelope_rate(t: &[f64], r: &[f64], omega: f64) -> f64 {
    let period = 2.0 * PI / omega;
    let (mut pts_t, mut pts_y) = (Vec::new(), Vec::new());
    let mut start = 0;
    while start < t.len() {
        let t_end = t[start] + period;
        let mut end = start;
        let mut best = 0.0f64;
        let mut best_t = t[start];
        while end < t.len() && t[end] < t_end {
            if r[end].abs() > best {
                best = r[end].abs();
                best_t = t[end];
            }
            end += 1;
        }
        if end == t.len() && t[t.len() - 1] - t[start] < 0.9 * period {
            break;
        }
        if best > 0.0 {
            pts_t.push(best_t);
            pts_y.push(best.ln());
        }
        start = end.max(start + 1);
    }
    if pts_t.len() < 2 {
        return 0.0;
    }
    (-line_fit(&pts_t, &pts_y).1).max(0.0)
}

struct Minimum {
    params: Params,
    proj: Projection,
    cost: f64,
    iterations: usize,
}

/// Levenberg–Marquardt over the free nonlinear parameters.
fn minimize(
    t: &[f64],
    y: &[f64],
    start: Params,
    free: &[usize],
    bounds: [(f64, f64); 3],
    max_iterations: usize,
) -> Result<Minimum> {
    let clamp = |mut p: Params| {
        for k in 0..3 {
            p[k] = p[k].clamp(bounds[k].0, bounds[k].1);
        }
        p
    };
    let singular = |iterations| Error::FitFailure { iterations, reason: "singular design matrix".into() };
    let mut p = clamp(start);
    let mut cur = project(t, y, p).ok_or_else(|| singular(0))?;
    let mut cost = ssr(&cur.residual);
    let mut lambda = 1e-3;
    let m = free.len();
    for iterations in 1..=max_iterations {
        let mut jac = DMatrix::<f64>::zeros(t.len(), m);
        for (col, &k) in free.iter().enumerate() {
            let h = 1e-7 * (p[k].abs() + 1e-3);
            let mut q = p;
            q[k] += h;
            let r = project(t, y, q).ok_or_else(|| singular(iterations))?;
            for (row, (a, b)) in r.residual.iter().zip(&cur.residual).enumerate() {
                jac[(row, col)] = (a - b) / h;
            }
        }
        let mut jtj = jac.transpose() * &jac;
        let mut grad = -(jac.transpose() * DVector::from_column_slice(&cur.residual));
        // Parameters pinned at a bound with the descent direction pointing
        // outward are held fixed for this iteration.
        for (col, &k) in free.iter().enumerate() {
            let at_lo = p[k] <= bounds[k].0 && grad[col] < 0.0;
            let at_hi = p[k] >= bounds[k].1 && grad[col] > 0.0;
            if at_lo || at_hi {
                grad[col] = 0.0;
                for j in 0..m {
                    jtj[(col, j)] = 0.0;
                    jtj[(j, col)] = 0.0;
                }
                jtj[(col, col)] = 1.0;
            }
        }
        let scale_floor = 1e-12 * jtj.diagonal().max();
        let mut accepted = false;
        let mut done = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for k in 0..m {
                a[(k, k)] += lambda * (jtj[(k, k)] + scale_floor);
            }
            let Some(delta) = a.lu().solve(&grad) else {
                lambda *= 10.0;
                continue;
            };
            let mut q = p;
            for (col, &k) in free.iter().enumerate() {
                q[k] += delta[col];
            }
            let q = clamp(q);
            if let Some(trial) = project(t, y, q) {
                let c = ssr(&trial.residual);
                if c <= cost {
                    let rel = (cost - c) / cost.max(1e-300);
                    let step = free.iter().map(|&k| (q[k] - p[k]).abs() / (p[k].abs() + 1e-3)).fold(0.0, f64::max);
                    p = q;
                    cur = trial;
                    cost = c;
                    lambda = (lambda * 0.3).max(1e-12);
                    accepted = true;
                    done = rel < 1e-11 || step < 1e-9;
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !accepted || done {
            // No downhill step at any damping means a stationary point.
            return Ok(Minimum { params: p, proj: cur, cost, iterations });
        }
    }
    Err(Error::FitFailure {
        iterations: max_iterations,
        reason: format!("no convergence (omega {:.4}, gamma {:.4}, beta {:.3}, cost {cost:.3e})", p[0], p[1], p[2]),
    })
}

/// Fits the ZB of `series` along `axis`.
pub fn fit_zb(series: &TimeSeries, axis: Axis, opts: &FitOptions) -> Result<ZbSummary> {
    let t = &series.times;
    let y = series.position(axis.index());
    if t.len() < 16 || y.len() != t.len() {
        return Err(Error::InvalidInput(format!("need at least 16 aligned samples, got {}", t.len())));
    }
    if t.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("sample times must be strictly increasing".into()));
    }
    let span = t[t.len() - 1] - t[0];
    let t_rel: Vec<f64> = t.iter().map(|v| v - t[0]).collect();

    let (c0, c1) = line_fit(&t_rel, y);
    let detrended: Vec<f64> = t_rel.iter().zip(y).map(|(tk, yk)| yk - c0 - c1 * tk).collect();
    let signal_rms = (ssr(&detrended) / t.len() as f64).sqrt();
    let y_scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);

    let median_dt = {
        let mut d: Vec<f64> = t.windows(2).map(|w| w[1] - w[0]).collect();
        d.sort_by(|a, b| a.total_cmp(b));
        d[d.len() / 2]
    };
    let nyquist = PI / median_dt;
    let omega_hi = opts.omega_max.map_or(nyquist, |w| w.min(nyquist));
    let omega_lo = 2.0 * PI / span;
    if omega_hi <= omega_lo {
        return Err(Error::InvalidInput(format!("empty frequency band [{omega_lo}, {omega_hi}]")));
    }

    let spec = periodogram(&t_rel, &detrended, omega_lo, omega_hi);
    let (k_peak, &(w_peak, a_peak)) = spec
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .expect("non-empty band");
    let mut mags: Vec<f64> = spec.iter().map(|p| p.1).collect();
    mags.sort_by(|a, b| a.total_cmp(b));
    let floor = mags[mags.len() / 2];
    if a_peak < 3.0 * floor || a_peak < 1e-9 * y_scale {
        return Err(Error::NoOscillation { peak: a_peak, floor });
    }
    // Parabolic refinement of the peak.
    let mut omega0 = w_peak;
    if k_peak > 0 && k_peak + 1 < spec.len() {
        let (l, c, r) = (spec[k_peak - 1].1, spec[k_peak].1, spec[k_peak + 1].1);
        let denom = l - 2.0 * c + r;
        if denom < 0.0 {
            omega0 += 0.5 * (l - r) / denom * (spec[1].0 - spec[0].0);
        }
    }
    let periods = omega0 * span / (2.0 * PI);
    if periods < 3.0 {
        return Err(Error::SeriesTooShort { periods });
    }
    let gamma0 = envelope_rate(&t_rel, &detrended, omega0);

    let bounds = [(omega_lo, omega_hi), (0.0, f64::INFINITY), BETA_RANGE];
    let best = match opts.envelope {
        Envelope::Exponential => minimize(&t_rel, y, [omega0, gamma0, 1.0], &[0, 1], bounds, opts.max_iterations)?,
        Envelope::Stretched => {
            let mut candidates = Vec::new();
            let mut last_err = None;
            for beta in [BETA_RANGE.0, BETA_RANGE.1] {
                match minimize(&t_rel, y, [omega0, gamma0, beta], &[0, 1, 2], bounds, opts.max_iterations) {
                    Ok(m) => candidates.push(m),
                    Err(e) => last_err = Some(e),
                }
            }
            match candidates.into_iter().min_by(|a, b| a.cost.total_cmp(&b.cost)) {
                Some(m) => m,
                None => return Err(last_err.expect("one error per failed start")),
            }
        }
    };

    let [w, g, beta] = best.params;
    let [k0, k1, ca, cb] = best.proj.coeffs;
    let amplitude = ca.hypot(cb);
    // a cos(ωt + φ) = a cos φ cos ωt − a sin φ sin ωt
    let phase = (-cb).atan2(ca) - w * t[0];
    let offset = k0 - k1 * t[0];
    let tau = if g > 1.0 / TAU_CAP { 1.0 / g } else { TAU_CAP };
    let fit_residual = if signal_rms > 0.0 {
        ((best.cost / t.len() as f64).sqrt() / signal_rms).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let other = 1 - axis.index();
    let (_, other_slope) = line_fit(&t_rel, series.position(other));
    let mut drift_velocity = [0.0; 2];
    drift_velocity[axis.index()] = k1;
    drift_velocity[other] = other_slope;
    Ok(ZbSummary {
        amplitude,
        omega: w,
        tau,
        envelope_exponent: beta,
        phase: wrap_phase(phase),
        offset,
        drift_velocity,
        axis,
        fit_residual,
        iterations: best.iterations,
    })
}

/// Maps an angle into (−π, π].
pub fn wrap_phase(p: f64) -> f64 {
    let mut q = p.rem_euclid(2.0 * PI);
    if q > PI {
        q -= 2.0 * PI;
    }
    q
}
