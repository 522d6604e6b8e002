//! Leaf functions of basis `n`.
//!
//! * `sleaf_n`: `x'' = -n x^(2n-1)`, `x(0) = 0`, `x'(0) = 1`
//! * `cleaf_n`: same equation, `x(0) = 1`, `x'(0) = 0`
//! * `sleafh_n`: `x'' = +n x^(2n-1)`, `x(0) = 0`, `x'(0) = 1`
//! * `cleafh_n`: same equation, `x(0) = 1`, `x'(0) = 0`
//!
//! Values come from inverting incomplete integrals: the argument is reduced
//! onto one monotone branch, and the branch integral is inverted there.
//! For `n = 1` the families reduce to sin, cos, sinh and cosh.

mod integrals;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::integrate::IntegrateError;
use integrals::{Anchor, Integrals};

pub const DEFAULT_TOLERANCE: f64 = 1e-12;
/// Arguments closer than this to a cleafh pole (or a sleafh escape time) are
/// rejected rather than evaluated.
pub const POLE_GUARD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LeafKind {
    Sleaf,
    Cleaf,
    Sleafh,
    Cleafh,
}

impl LeafKind {
    pub const ALL: [LeafKind; 4] = [LeafKind::Sleaf, LeafKind::Cleaf, LeafKind::Sleafh, LeafKind::Cleafh];

    pub fn name(self) -> &'static str {
        match self {
            LeafKind::Sleaf => "sleaf",
            LeafKind::Cleaf => "cleaf",
            LeafKind::Sleafh => "sleafh",
            LeafKind::Cleafh => "cleafh",
        }
    }

    pub fn is_hyperbolic(self) -> bool {
        matches!(self, LeafKind::Sleafh | LeafKind::Cleafh)
    }
}

impl fmt::Display for LeafKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LeafKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LeafKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown leaf function `{s}` (expected sleaf, cleaf, sleafh or cleafh)"))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LeafError {
    #[error("basis must be a positive integer, got {0}")]
    InvalidBasis(u32),
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("argument must be finite, got {0}")]
    NonFinite(f64),
    #[error("{kind}_{n}({t}) lies within {guard:e} of the pole at t = {pole}")]
    Pole { kind: LeafKind, n: u32, t: f64, pole: f64, guard: f64 },
    #[error("{kind}_{n}({t}) is undefined: the function escapes to infinity at t = {limit}")]
    OutsideDomain { kind: LeafKind, n: u32, t: f64, limit: f64 },
    #[error("{kind}_{n} never takes the value {x}")]
    OutOfRange { kind: LeafKind, n: u32, x: f64 },
    #[error(transparent)]
    Numerical(#[from] IntegrateError),
}

impl LeafError {
    /// The nearest singular time, for pole and escape errors.
    pub fn singularity(&self) -> Option<f64> {
        match self {
            LeafError::Pole { pole, .. } => Some(*pole),
            LeafError::OutsideDomain { t, limit, .. } => Some(limit.copysign(*t)),
            _ => None,
        }
    }
}

/// Value and derivatives of a leaf function at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeafPoint {
    pub x: f64,
    pub dx: f64,
    pub d2x: f64,
    /// `| |x| - 1 |`, accurate even when `|x|` rounds to one.
    pub gap: f64,
}

/// Location of an argument on the branch table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchInfo {
    /// Cycle index. Leaf kinds count cycles `((2m-2)pi_n, 2m pi_n]` from
    /// `m = 1`; cleafh counts `4m eta_n` centres from `m = 0`.
    pub m: i64,
    /// Row of the branch table within the cycle, 1 to 4.
    pub row: u8,
    /// Sign of the derivative on this branch.
    pub sign: i8,
    /// Reduced argument on the branch, always non-negative.
    pub local_t: f64,
    origin: f64,
    direction: f64,
}

impl BranchInfo {
    /// Maps `local_t` back to the original argument.
    pub fn reconstruct(&self) -> f64 {
        self.origin + self.direction * self.local_t
    }
}

/// The basis `n` together with its constants, computed once by quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Basis {
    n: u32,
    tol: f64,
    pi_n: f64,
    eta_n: Option<f64>,
    zeta_n: Option<f64>,
    /// `int_0^1 du / sqrt(1 + u^2n)`: where sleafh crosses one.
    sleafh_unit: f64,
}

impl Basis {
    pub fn new(n: u32) -> Result<Self, LeafError> {
        Self::with_tolerance(n, DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(n: u32, tol: f64) -> Result<Self, LeafError> {
        if n == 0 {
            return Err(LeafError::InvalidBasis(n));
        }
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(LeafError::InvalidTolerance(tol));
        }
        let ig = Integrals { n, tol };
        let pi_n = 2.0 * ig.pi_half()?;
        let (eta_n, zeta_n) = if n == 1 { (None, None) } else { (Some(ig.eta()?), Some(ig.zeta()?)) };
        let sleafh_unit = ig.l(1.0)?;
        Ok(Self { n, tol, pi_n, eta_n, zeta_n, sleafh_unit })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// Half period of sleaf_n and cleaf_n.
    pub fn pi_n(&self) -> f64 {
        self.pi_n
    }

    /// Pole spacing scale of cleafh_n; `None` for `n = 1`.
    pub fn eta_n(&self) -> Option<f64> {
        self.eta_n
    }

    /// Escape time of sleafh_n; `None` for `n = 1`.
    pub fn zeta_n(&self) -> Option<f64> {
        self.zeta_n
    }

    fn integrals(&self) -> Integrals {
        Integrals { n: self.n, tol: self.tol }
    }

    pub fn eval(&self, kind: LeafKind, t: f64) -> Result<f64, LeafError> {
        Ok(self.point(kind, t)?.x)
    }

    pub fn deriv(&self, kind: LeafKind, t: f64) -> Result<f64, LeafError> {
        Ok(self.point(kind, t)?.dx)
    }

    pub fn branch_of(&self, kind: LeafKind, t: f64) -> Result<BranchInfo, LeafError> {
        if !t.is_finite() {
            return Err(LeafError::NonFinite(t));
        }
        let info = match kind {
            LeafKind::Sleaf | LeafKind::Cleaf => {
                let quarter = 0.5 * self.pi_n;
                let mut q = (t / quarter).floor();
                let mut local = t - q * quarter;
                if local >= quarter {
                    q += 1.0;
                    local -= quarter;
                }
                let row = q.rem_euclid(4.0) as u8;
                let (_, _, sign) = leaf_row(kind, row);
                BranchInfo {
                    m: (q / 4.0).floor() as i64 + 1,
                    row: row + 1,
                    sign,
                    local_t: local.max(0.0),
                    origin: q * quarter,
                    direction: 1.0,
                }
            }
            LeafKind::Sleafh => {
                if let Some(zeta) = self.zeta_n {
                    if t.abs() > zeta - POLE_GUARD {
                        return Err(LeafError::OutsideDomain { kind, n: self.n, t, limit: zeta });
                    }
                }
                BranchInfo { m: 0, row: 1, sign: 1, local_t: t, origin: 0.0, direction: 1.0 }
            }
            LeafKind::Cleafh => match self.eta_n {
                None => {
                    let direction = if t < 0.0 { -1.0 } else { 1.0 };
                    let (row, sign) = if t < 0.0 { (1, -1) } else { (2, 1) };
                    BranchInfo { m: 0, row, sign, local_t: t.abs(), origin: 0.0, direction }
                }
                Some(eta) => {
                    let k = (t / (2.0 * eta)).round();
                    let origin = 2.0 * k * eta;
                    let d = t - origin;
                    let direction = if d < 0.0 { -1.0 } else { 1.0 };
                    let local = d.abs();
                    if local > eta - POLE_GUARD {
                        let pole = origin + direction * eta;
                        return Err(LeafError::Pole { kind, n: self.n, t, pole, guard: POLE_GUARD });
                    }
                    let odd = k.rem_euclid(2.0) == 1.0;
                    let (row, sign) = match (odd, d < 0.0) {
                        (false, true) => (1, -1),
                        (false, false) => (2, 1),
                        (true, true) => (3, 1),
                        (true, false) => (4, -1),
                    };
                    BranchInfo { m: (k / 2.0).floor() as i64, row, sign, local_t: local, origin, direction }
                }
            },
        };
        Ok(info)
    }

    /// Value, first and second derivative at `t`.
    pub fn point(&self, kind: LeafKind, t: f64) -> Result<LeafPoint, LeafError> {
        let b = self.branch_of(kind, t)?;
        let ig = self.integrals();
        let n = self.n as i32;
        let odd_power = |x: f64| self.n as f64 * x.powi(2 * n - 1);
        let p = match kind {
            LeafKind::Sleaf | LeafKind::Cleaf => {
                let (x_sign, anchor, _) = leaf_row(kind, b.row - 1);
                let (ax, gap) = ig.bounded(0, 0.5 * self.pi_n, anchor, b.local_t)?;
                let x = x_sign * ax;
                let dx = b.sign as f64 * ig.one_minus_pow(gap).sqrt();
                LeafPoint { x, dx, d2x: -odd_power(x), gap }
            }
            LeafKind::Sleafh => {
                let tau = t.abs();
                let ax = match self.zeta_n {
                    None => ig.sleafh_unbounded(tau)?,
                    Some(_) if tau <= self.sleafh_unit => ig.sleafh_lower(tau)?,
                    Some(zeta) => 1.0 / ig.sleafh_tail(zeta - tau)?,
                };
                let x = ax.copysign(t);
                let dx = (1.0 + ax.powi(2 * n)).sqrt();
                LeafPoint { x, dx, d2x: odd_power(x), gap: (ax - 1.0).abs() }
            }
            LeafKind::Cleafh => {
                let (ax, gap) = match self.eta_n {
                    None => ig.cleafh_unbounded(b.local_t)?,
                    Some(eta) => {
                        // Measure from whichever end is closer: x = 1 or the pole.
                        let to_pole = eta - b.local_t;
                        let (v, v_gap) = if b.local_t <= to_pole {
                            ig.bounded(n - 2, eta, Anchor::One, b.local_t)?
                        } else {
                            ig.bounded(n - 2, eta, Anchor::Zero, to_pole)?
                        };
                        (1.0 / v, v_gap / v)
                    }
                };
                let x = if b.row >= 3 { -ax } else { ax };
                let dx = b.sign as f64 * ig.pow_minus_one(gap).sqrt();
                LeafPoint { x, dx, d2x: odd_power(x), gap }
            }
        };
        Ok(p)
    }

    /// Principal inverse: sleaf onto `[-pi_n/2, pi_n/2]`, cleaf onto
    /// `[0, pi_n]`, sleafh onto `(-zeta_n, zeta_n)`, and cleafh onto `[0, eta_n)`
    /// for `x >= 1` or `(eta_n, 2 eta_n]` for `x <= -1`.
    pub fn inverse(&self, kind: LeafKind, x: f64) -> Result<f64, LeafError> {
        if !x.is_finite() {
            return Err(LeafError::NonFinite(x));
        }
        let ig = self.integrals();
        let out_of_range = || LeafError::OutOfRange { kind, n: self.n, x };
        let t = match kind {
            LeafKind::Sleaf if x.abs() <= 1.0 => ig.leaf_span(0.0, x.abs())?.copysign(x),
            LeafKind::Cleaf if x.abs() <= 1.0 => ig.leaf_span(x, 1.0)?,
            LeafKind::Sleafh => ig.l(x.abs())?.copysign(x),
            LeafKind::Cleafh if x >= 1.0 => ig.h_direct(x)?,
            LeafKind::Cleafh if x <= -1.0 => match self.eta_n {
                Some(eta) => 2.0 * eta - ig.h_direct(-x)?,
                None => return Err(out_of_range()),
            },
            _ => return Err(out_of_range()),
        };
        Ok(t)
    }
}

/// `(sign of x, anchor of the reduced argument, sign of x')` for each quarter.
fn leaf_row(kind: LeafKind, row: u8) -> (f64, Anchor, i8) {
    match (kind, row) {
        (LeafKind::Sleaf, 0) => (1.0, Anchor::Zero, 1),
        (LeafKind::Sleaf, 1) => (1.0, Anchor::One, -1),
        (LeafKind::Sleaf, 2) => (-1.0, Anchor::Zero, -1),
        (LeafKind::Sleaf, _) => (-1.0, Anchor::One, 1),
        (_, 0) => (1.0, Anchor::One, -1),
        (_, 1) => (-1.0, Anchor::Zero, -1),
        (_, 2) => (-1.0, Anchor::One, 1),
        (_, _) => (1.0, Anchor::Zero, 1),
    }
}
