//! Incomplete integrals behind the leaf functions and their inversions.
//!
//! Everything reduces to a handful of integrals over `[0, 1]`-type ranges:
//!
//! * `I_k(X) = int_0^X u^k / sqrt(1 - u^2n) du`, singular at `u = 1`;
//! * `J_k(D) = I_k(1) - I_k(1 - D)`, the same integral measured from the top;
//! * `L(X) = int_0^X du / sqrt(1 + u^2n)` and its tail image
//!   `M(V) = int_0^V s^(n-2) / sqrt(1 + s^2n) ds` under `u = 1/s`.
//!
//! `k = 0` gives sleaf/cleaf. `k = n - 2` gives cleafh after `u = 1/s`
//! maps `[1, inf)` onto `(0, 1]`, which keeps pole neighbourhoods accurate.

use crate::integrate::{newton_bracketed, quad_geometric, quad_semi_infinite, quad_singular, IntegrateError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Anchor {
    /// Argument measured from `|x| = 0`.
    Zero,
    /// Argument measured from `|x| = 1`.
    One,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Integrals {
    pub n: u32,
    pub tol: f64,
}

impl Integrals {
    fn two_n(&self) -> f64 {
        2.0 * self.n as f64
    }

    /// `1 - u^2n` for `u = 1 - d`.
    pub fn one_minus_pow(&self, d: f64) -> f64 {
        -(self.two_n() * (-d).ln_1p()).exp_m1()
    }

    /// `u^2n - 1` for `u = 1 + d`.
    pub fn pow_minus_one(&self, d: f64) -> f64 {
        (self.two_n() * d.ln_1p()).exp_m1()
    }

    /// Absolute quadrature tolerance for an integral of roughly `magnitude`,
    /// so that small integrals keep their relative accuracy.
    fn tol_for(&self, magnitude: f64) -> f64 {
        self.tol * magnitude.clamp(f64::MIN_POSITIVE, 1.0)
    }

    pub fn i_k(&self, k: i32, x: f64) -> Result<f64, IntegrateError> {
        let gap = 1.0 - x;
        let tol = self.tol_for(x.powi(k + 1) / (k + 1) as f64);
        let q = quad_singular(|nd| nd.x.powi(k) / self.one_minus_pow(gap + nd.to_hi).sqrt(), 0.0, x, tol)?;
        Ok(q.value)
    }

    pub fn j_k(&self, k: i32, d: f64) -> Result<f64, IntegrateError> {
        let q = quad_singular(
            |nd| (1.0 - nd.x).powi(k) / self.one_minus_pow(nd.from_lo).sqrt(),
            0.0,
            d,
            self.tol_for(2.0 * d.sqrt() / self.two_n().sqrt()),
        )?;
        Ok(q.value)
    }

    pub fn l(&self, x: f64) -> Result<f64, IntegrateError> {
        let n2 = 2 * self.n as i32;
        let tol = self.tol_for(x);
        Ok(quad_geometric(|nd| 1.0 / (1.0 + nd.x.powi(n2)).sqrt(), 0.0, x, tol)?.value)
    }

    pub fn m(&self, v: f64) -> Result<f64, IntegrateError> {
        let (k, n2) = (self.n as i32 - 2, 2 * self.n as i32);
        let tol = self.tol_for(v.powi(k + 1) / (k + 1) as f64);
        let q = quad_singular(|nd| nd.x.powi(k) / (1.0 + nd.x.powi(n2)).sqrt(), 0.0, v, tol)?;
        Ok(q.value)
    }

    /// `int_1^x du / sqrt(u^2n - 1)` straight from the definition.
    pub fn h_direct(&self, x: f64) -> Result<f64, IntegrateError> {
        let tol = self.tol_for(2.0 * (x - 1.0).sqrt() / self.two_n().sqrt());
        let q = quad_geometric(|nd| 1.0 / self.pow_minus_one(nd.from_lo).sqrt(), 1.0, x, tol)?;
        Ok(q.value)
    }

    /// `int_a^b du / sqrt(1 - u^2n)` for `-1 <= a <= b <= 1`.
    pub fn leaf_span(&self, a: f64, b: f64) -> Result<f64, IntegrateError> {
        let q = quad_singular(
            |nd| {
                let d = if nd.x >= 0.0 { (1.0 - b) + nd.to_hi } else { (1.0 + a) + nd.from_lo };
                1.0 / self.one_minus_pow(d).sqrt()
            },
            a,
            b,
            self.tol_for(b - a),
        )?;
        Ok(q.value)
    }

    pub fn pi_half(&self) -> Result<f64, IntegrateError> {
        self.i_k(0, 1.0)
    }

    pub fn eta(&self) -> Result<f64, IntegrateError> {
        let q = quad_semi_infinite(|nd| 1.0 / self.pow_minus_one(nd.from_lo).sqrt(), 1.0, self.tol)?;
        Ok(q.value)
    }

    pub fn zeta(&self) -> Result<f64, IntegrateError> {
        let n2 = 2 * self.n as i32;
        let q = quad_semi_infinite(|nd| 1.0 / (1.0 + nd.x.powi(n2)).sqrt(), 0.0, self.tol)?;
        Ok(q.value)
    }

    /// Inverts `I_k` (anchor zero) or `J_k` (anchor one) against `s`, where
    /// `total = I_k(1)`. Returns `(|x|, 1 - |x|)`.
    pub fn bounded(&self, k: i32, total: f64, anchor: Anchor, s: f64) -> Result<(f64, f64), IntegrateError> {
        let (anchor, s) = match anchor {
            Anchor::Zero if s > 0.5 * total => (Anchor::One, total - s),
            Anchor::One if s > 0.5 * total => (Anchor::Zero, total - s),
            a => (a, s),
        };
        let s = s.max(0.0);
        match anchor {
            Anchor::Zero => {
                if s == 0.0 {
                    return Ok((0.0, 1.0));
                }
                // Solve in z = X^(k+1); I_k is then close to linear near zero.
                let kp1 = (k + 1) as f64;
                let root = |z: f64| if k == 0 { z } else { z.powf(1.0 / kp1) };
                let z = newton_bracketed(
                    |z| {
                        let x = root(z);
                        let f = self.i_k(k, x)?;
                        Ok::<_, IntegrateError>((f, 1.0 / (kp1 * self.one_minus_pow(1.0 - x).sqrt())))
                    },
                    s,
                    0.0,
                    1.0,
                    (kp1 * s).min(1.0),
                    self.tol_for(s),
                )?;
                let x = root(z);
                Ok((x, 1.0 - x))
            }
            Anchor::One => {
                if s == 0.0 {
                    return Ok((1.0, 0.0));
                }
                // Solve in w = sqrt(1 - X), where J_k has a finite slope.
                let slope0 = 2.0 / self.two_n().sqrt();
                let w = newton_bracketed(
                    |w| {
                        let d = w * w;
                        let f = self.j_k(k, d)?;
                        let df = if w == 0.0 {
                            slope0
                        } else {
                            2.0 * w * (1.0 - d).powi(k) / self.one_minus_pow(d).sqrt()
                        };
                        Ok::<_, IntegrateError>((f, df))
                    },
                    s,
                    0.0,
                    1.0,
                    (s / slope0).min(1.0),
                    self.tol_for(s),
                )?;
                let d = w * w;
                Ok((1.0 - d, d))
            }
        }
    }

    /// Inverts `L` on `[0, 1]`.
    pub fn sleafh_lower(&self, tau: f64) -> Result<f64, IntegrateError> {
        if tau <= 0.0 {
            return Ok(0.0);
        }
        let n2 = 2 * self.n as i32;
        newton_bracketed(
            |x| Ok::<_, IntegrateError>((self.l(x)?, 1.0 / (1.0 + x.powi(n2)).sqrt())),
            tau,
            0.0,
            1.0,
            tau.min(1.0),
            self.tol_for(tau),
        )
    }

    /// Inverts `M` against the distance `r` to the escape time; returns `V = 1/x`.
    pub fn sleafh_tail(&self, r: f64) -> Result<f64, IntegrateError> {
        let nm1 = (self.n - 1) as f64;
        let n2 = 2 * self.n as i32;
        let root = |z: f64| if self.n == 2 { z } else { z.powf(1.0 / nm1) };
        let z = newton_bracketed(
            |z| {
                let v = root(z);
                Ok::<_, IntegrateError>((self.m(v)?, 1.0 / (nm1 * (1.0 + v.powi(n2)).sqrt())))
            },
            r,
            0.0,
            1.0,
            (nm1 * r).min(1.0),
            self.tol_for(r),
        )?;
        Ok(root(z))
    }

    /// `sinh`-like branch for `n = 1`, solved in `y = ln(1 + x)`.
    pub fn sleafh_unbounded(&self, tau: f64) -> Result<f64, IntegrateError> {
        if tau <= 0.0 {
            return Ok(0.0);
        }
        let y = newton_bracketed(
            |y: f64| {
                let x = y.exp_m1();
                let f = self.l(x)?;
                Ok::<_, IntegrateError>((f, y.exp() / (1.0 + x * x).sqrt()))
            },
            tau,
            0.0,
            tau + 1.0,
            tau.ln_1p(),
            self.tol_for(tau),
        )?;
        Ok(y.exp_m1())
    }

    /// `cosh`-like branch for `n = 1`. Returns `(x, x - 1)`.
    pub fn cleafh_unbounded(&self, tau: f64) -> Result<(f64, f64), IntegrateError> {
        if tau <= 0.0 {
            return Ok((1.0, 0.0));
        }
        if tau <= 1.0 {
            let w = newton_bracketed(
                |w: f64| {
                    let d = w * w;
                    let f = self.h_direct(1.0 + d)?;
                    let df = if w == 0.0 { 2.0 / self.two_n().sqrt() } else { 2.0 * w / self.pow_minus_one(d).sqrt() };
                    Ok::<_, IntegrateError>((f, df))
                },
                tau,
                0.0,
                2.0,
                tau / 2f64.sqrt(),
                self.tol_for(tau),
            )?;
            let d = w * w;
            return Ok((1.0 + d, d));
        }
        let y = newton_bracketed(
            |y: f64| {
                let x = y.exp();
                let f = self.h_direct(x)?;
                Ok::<_, IntegrateError>((f, x / (x * x - 1.0).sqrt()))
            },
            tau,
            tau - std::f64::consts::LN_2,
            tau,
            tau - 0.5 * std::f64::consts::LN_2,
            self.tol,
        )?;
        let x = y.exp();
        Ok((x, y.exp_m1()))
    }
}
