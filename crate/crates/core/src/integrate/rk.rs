//! Dormand-Prince 5(4) for `x'' = g(t, x, x')` with PI step control and
//! quintic Hermite dense output.

use super::IntegrateError;

/// `x'' = accel(t, x, x')` with `x(t0) = x0`, `x'(t0) = v0`.
pub struct SecondOrderIvp<F> {
    pub accel: F,
    pub t0: f64,
    pub x0: f64,
    pub v0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RkOptions {
    /// Local error target, applied as both absolute and relative tolerance.
    pub tol: f64,
    pub max_step: Option<f64>,
    /// Integration stops once `|x|` exceeds this value.
    pub blowup_cap: f64,
    pub max_steps: usize,
}

impl Default for RkOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_step: None, blowup_cap: 1e6, max_steps: 5_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub v: f64,
    pub a: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolverStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evals: usize,
    /// Largest normalized local error estimate among accepted steps.
    pub max_err_ratio: f64,
}

/// Where integration stopped because `|x|` crossed the cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowUp {
    pub t: f64,
    pub x: f64,
    pub v: f64,
}

impl BlowUp {
    /// Extrapolates the singular time assuming `x ~ C (t* - t)^(-p)`.
    pub fn pole_estimate(&self, p: f64) -> f64 {
        self.t + p * self.x / self.v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub samples: Vec<Sample>,
    pub stats: SolverStats,
    pub blowup: Option<BlowUp>,
}

impl Waveform {
    pub fn t_start(&self) -> f64 {
        self.samples[0].t
    }

    pub fn t_end(&self) -> f64 {
        self.samples[self.samples.len() - 1].t
    }

    /// Dense output `(x, x')` at `t`, or `None` outside the integrated span.
    pub fn interpolate(&self, t: f64) -> Option<(f64, f64)> {
        if !(t >= self.t_start() && t <= self.t_end()) {
            return None;
        }
        let i = self.samples.partition_point(|s| s.t < t);
        if i == 0 {
            let s = self.samples[0];
            return Some((s.x, s.v));
        }
        let (p, q) = (self.samples[i - 1], self.samples[i]);
        let h = q.t - p.t;
        let s = (t - p.t) / h;
        let (s2, s3) = (s * s, s * s * s);
        let (s4, s5) = (s3 * s, s3 * s2);
        let x = (1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5) * p.x
            + (s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5) * h * p.v
            + (0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5) * h * h * p.a
            + (0.5 * s3 - s4 + 0.5 * s5) * h * h * q.a
            + (-4.0 * s3 + 7.0 * s4 - 3.0 * s5) * h * q.v
            + (10.0 * s3 - 15.0 * s4 + 6.0 * s5) * q.x;
        let v = (-30.0 * s2 + 60.0 * s3 - 30.0 * s4) * (p.x - q.x) / h
            + (1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4) * p.v
            + (s - 4.5 * s2 + 6.0 * s3 - 2.5 * s4) * h * p.a
            + (1.5 * s2 - 4.0 * s3 + 2.5 * s4) * h * q.a
            + (-12.0 * s2 + 28.0 * s3 - 15.0 * s4) * q.v;
        Some((x, v))
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO: f64 = 0.2 - 0.75 * BETA;

/// Integrates from `ivp.t0` to `t_end`, storing every accepted step.
///
/// Stops early (successfully) when `|x|` exceeds `opts.blowup_cap`; the
/// returned waveform then carries a [`BlowUp`] record. A step size shrinking
/// to rounding level is reported as [`IntegrateError::StepUnderflow`].
pub fn rk_integrate<F>(ivp: &SecondOrderIvp<F>, t_end: f64, opts: &RkOptions) -> Result<Waveform, IntegrateError>
where
    F: Fn(f64, f64, f64) -> f64,
{
    if !(opts.tol > 0.0) || !(opts.blowup_cap > 0.0) {
        return Err(IntegrateError::InvalidInput("tolerance and blow-up cap must be positive"));
    }
    if !(ivp.t0.is_finite() && t_end.is_finite() && t_end >= ivp.t0) {
        return Err(IntegrateError::InvalidInput("integration span must be finite and forward"));
    }
    if !(ivp.x0.is_finite() && ivp.v0.is_finite()) {
        return Err(IntegrateError::InvalidInput("initial state must be finite"));
    }
    let deriv = |t: f64, y: [f64; 2]| [y[1], (ivp.accel)(t, y[0], y[1])];
    let tol = opts.tol;
    let scale = |y: f64, z: f64| tol + tol * y.abs().max(z.abs());

    let mut t = ivp.t0;
    let mut y = [ivp.x0, ivp.v0];
    let mut k1 = deriv(t, y);
    let mut stats = SolverStats { evals: 1, ..Default::default() };
    let mut samples = vec![Sample { t, x: y[0], v: y[1], a: k1[1] }];
    if t_end == t {
        return Ok(Waveform { samples, stats, blowup: None });
    }

    let h_max = opts.max_step.unwrap_or(t_end - t).min(t_end - t);
    let mut h = initial_step(&deriv, t, y, k1, &scale).min(h_max);
    stats.evals += 1;
    let mut fac_old: f64 = 1e-4;
    let mut last_rejected = false;

    while t < t_end {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(IntegrateError::StepBudget { t, max_steps: opts.max_steps });
        }
        if h <= 16.0 * f64::EPSILON * t.abs().max(1e-3) {
            return Err(IntegrateError::StepUnderflow { t, h });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }

        let mut k = [[0.0; 2]; 7];
        k[0] = k1;
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                ys[0] += h * A[s][j] * kj[0];
                ys[1] += h * A[s][j] * kj[1];
            }
            k[s] = deriv(t + C[s] * h, ys);
        }
        stats.evals += 6;
        // The 7th stage is evaluated at the 5th-order solution (FSAL).
        let mut y_new = y;
        for (j, kj) in k.iter().enumerate().take(6) {
            y_new[0] += h * A[6][j] * kj[0];
            y_new[1] += h * A[6][j] * kj[1];
        }
        let mut err = 0.0f64;
        for i in 0..2 {
            let e: f64 = (0..7).map(|s| E[s] * k[s][i]).sum::<f64>() * h;
            err = err.max(e.abs() / scale(y[i], y_new[i]));
        }
        let finite = y_new.iter().chain(k[6].iter()).all(|v| v.is_finite()) && err.is_finite();
        if !finite {
            stats.rejected += 1;
            h *= 0.25;
            last_rejected = true;
            continue;
        }

        let fac11 = err.powf(EXPO);
        if err <= 1.0 {
            let mut fac = fac11 / fac_old.powf(BETA);
            fac = (fac / SAFETY).clamp(0.2, 10.0);
            let mut h_new = h / fac;
            if last_rejected {
                h_new = h_new.min(h);
            }
            fac_old = err.max(1e-4);
            t = if last { t_end } else { t + h };
            y = y_new;
            k1 = k[6];
            stats.accepted += 1;
            stats.max_err_ratio = stats.max_err_ratio.max(err);
            samples.push(Sample { t, x: y[0], v: y[1], a: k1[1] });
            if y[0].abs() > opts.blowup_cap {
                let blowup = Some(BlowUp { t, x: y[0], v: y[1] });
                return Ok(Waveform { samples, stats, blowup });
            }
            h = h_new.min(h_max);
            last_rejected = false;
        } else {
            stats.rejected += 1;
            h /= (fac11 / SAFETY).min(5.0);
            last_rejected = true;
        }
    }
    Ok(Waveform { samples, stats, blowup: None })
}

fn initial_step<D, S>(deriv: &D, t: f64, y: [f64; 2], f0: [f64; 2], scale: &S) -> f64
where
    D: Fn(f64, [f64; 2]) -> [f64; 2],
    S: Fn(f64, f64) -> f64,
{
    let norm = |v: [f64; 2]| (0..2).map(|i| (v[i] / scale(y[i], y[i])).abs()).fold(0.0, f64::max);
    let (d0, d1) = (norm(y), norm(f0));
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let f1 = deriv(t + h0, [y[0] + h0 * f0[0], y[1] + h0 * f0[1]]);
    let d2 = norm([f1[0] - f0[0], f1[1] - f0[1]]) / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    (100.0 * h0).min(h1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let ivp = SecondOrderIvp { accel: |_t: f64, x: f64, _v: f64| -x, t0: 0.0, x0: 0.0, v0: 1.0 };
        let w = rk_integrate(&ivp, 20.0, &RkOptions::default()).unwrap();
        assert!(w.blowup.is_none());
        assert_eq!(w.t_end(), 20.0);
        for i in 0..=400 {
            let t = 0.05 * i as f64;
            let (x, v) = w.interpolate(t).unwrap();
            assert!((x - t.sin()).abs() < 1e-8, "t = {t}: {x}");
            assert!((v - t.cos()).abs() < 1e-7, "t = {t}: {v}");
        }
        assert!(w.interpolate(20.5).is_none());
    }

    #[test]
    fn damped_linear_uses_velocity() {
        // x'' + x' + x = 0 with x(0) = 1, x'(0) = 0
        let ivp = SecondOrderIvp { accel: |_t: f64, x: f64, v: f64| -v - x, t0: 0.0, x0: 1.0, v0: 0.0 };
        let w = rk_integrate(&ivp, 5.0, &RkOptions::default()).unwrap();
        let wd = 0.75f64.sqrt();
        let exact = |t: f64| (-0.5 * t).exp() * ((wd * t).cos() + 0.5 / wd * (wd * t).sin());
        let (x, _) = w.interpolate(3.3).unwrap();
        assert!((x - exact(3.3)).abs() < 1e-9);
    }

    #[test]
    fn blowup_is_flagged_and_located() {
        // x'' = 2 x^3, x(0) = 1, x'(0) = 1 has solution 1 / (1 - t).
        let ivp = SecondOrderIvp { accel: |_t: f64, x: f64, _v: f64| 2.0 * x * x * x, t0: 0.0, x0: 1.0, v0: 1.0 };
        let w = rk_integrate(&ivp, 2.0, &RkOptions::default()).unwrap();
        let b = w.blowup.expect("blow-up expected");
        assert!(b.x.abs() > 1e6 && b.t < 1.0);
        assert!((b.pole_estimate(1.0) - 1.0).abs() < 1e-8);
        assert!(w.samples.iter().all(|s| s.x.is_finite() && s.v.is_finite()));
    }

    #[test]
    fn max_step_is_respected() {
        let ivp = SecondOrderIvp { accel: |_t: f64, _x: f64, _v: f64| 0.0, t0: 0.0, x0: 0.0, v0: 1.0 };
        let opts = RkOptions { max_step: Some(0.1), ..Default::default() };
        let w = rk_integrate(&ivp, 1.0, &opts).unwrap();
        assert!(w.samples.windows(2).all(|p| p[1].t - p[0].t <= 0.1 + 1e-15));
    }

    #[test]
    fn rejects_backward_span() {
        let ivp = SecondOrderIvp { accel: |_t: f64, x: f64, _v: f64| -x, t0: 1.0, x0: 0.0, v0: 1.0 };
        assert!(rk_integrate(&ivp, 0.0, &RkOptions::default()).is_err());
    }
}
