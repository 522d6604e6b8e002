//! Exact solutions of `x'' + a1 x + a2 x^3 + a3 x^5 = 0` built from the
//! lemniscatic (`n = 2`) leaf functions, plus their damped extensions
//! `y'' + beta(t) y' + a1(t) y + a2(t) y^3 + a3(t) y^5 = 0`.
//!
//! Writing `s = sleaf_2(wt)`, `c = cleaf_2(wt)` and `h = cleafh_2(wt)`:
//!
//! | id | x(t)                       | id | x(t)            |
//! |----|----------------------------|----|-----------------|
//! | 1  | A sqrt(1 + c^2)            | 8  | A sqrt(h^2 - 1) |
//! | 2  | A sqrt(1 - c^2)            | 9  | A sqrt(1 + s)   |
//! | 3  | A sqrt(1 + s^2)            | 10 | A sqrt(1 - s)   |
//! | 4  | A sqrt(1 - s^2)            | 11 | A sqrt(1 + c)   |
//! | 5  | A (sqrt(1+s^2) + sqrt(1+c^2)) | 12 | A sqrt(1 - c) |
//! | 6  | A (sqrt(1+c^2) - sqrt(1+s^2)) | 13 | A sqrt(abs(h) + 1) |
//! | 7  | A sqrt(h^2 + 1)            | 14 | A sqrt(abs(h) - 1) |
//!
//! Ids 1-8 solve the cubic equation and 9-14 the cubic-quintic one. Ids 7,
//! 8, 13 and 14 blow up at the poles of `h`.

mod damping;

pub use damping::{damped_transform, Damping, Polynomial};

use std::f64::consts::SQRT_2;

use thiserror::Error;

use crate::leaf::{Basis, LeafError, LeafKind, LeafPoint};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DuffingError {
    #[error("solution id must be between 1 and 14, got {0}")]
    InvalidId(u8),
    #[error("amplitude must be finite and non-zero, got {0}")]
    InvalidAmplitude(f64),
    #[error("frequency must be finite and non-zero, got {0}")]
    InvalidFrequency(f64),
    #[error("invalid damping: {0}")]
    InvalidDamping(&'static str),
    #[error("solutions are built on the basis n = 2, got n = {0}")]
    WrongBasis(u32),
    #[error("x is not differentiable at the kink t = {t}; one-sided slopes are {left} (left) and {right} (right)")]
    Kink { t: f64, left: f64, right: f64 },
    #[error("t = {t} is within the guard band of the pole at t = {pole}")]
    Pole { t: f64, pole: f64 },
    #[error("damped solutions decay and have no period")]
    NotPeriodic,
    #[error(transparent)]
    Leaf(LeafError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SolutionId(u8);

impl SolutionId {
    pub fn new(id: u8) -> Result<Self, DuffingError> {
        if (1..=14).contains(&id) {
            Ok(Self(id))
        } else {
            Err(DuffingError::InvalidId(id))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = SolutionId> {
        (1..=14).map(SolutionId)
    }

    /// Built on cleafh, hence unbounded with poles.
    pub fn is_divergent(self) -> bool {
        matches!(self.0, 7 | 8 | 13 | 14)
    }

    pub fn is_quintic(self) -> bool {
        self.0 >= 9
    }

    pub fn has_kinks(self) -> bool {
        matches!(self.0, 2 | 4 | 8 | 9 | 10 | 11 | 12 | 14)
    }

    pub fn formula(self) -> &'static str {
        [
            "A sqrt(1 + cleaf^2)",
            "A sqrt(1 - cleaf^2)",
            "A sqrt(1 + sleaf^2)",
            "A sqrt(1 - sleaf^2)",
            "A (sqrt(1 + sleaf^2) + sqrt(1 + cleaf^2))",
            "A (sqrt(1 + cleaf^2) - sqrt(1 + sleaf^2))",
            "A sqrt(cleafh^2 + 1)",
            "A sqrt(cleafh^2 - 1)",
            "A sqrt(1 + sleaf)",
            "A sqrt(1 - sleaf)",
            "A sqrt(1 + cleaf)",
            "A sqrt(1 - cleaf)",
            "A sqrt(|cleafh| + 1)",
            "A sqrt(|cleafh| - 1)",
        ][self.0 as usize - 1]
    }
}

impl std::fmt::Display for SolutionId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One member of the catalogue: id, amplitude `A`, angular frequency `w`,
/// and optional damping.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionSpec {
    pub id: SolutionId,
    pub amplitude: f64,
    pub omega: f64,
    pub damping: Option<Damping>,
}

impl SolutionSpec {
    pub fn new(id: u8, amplitude: f64, omega: f64) -> Result<Self, DuffingError> {
        let id = SolutionId::new(id)?;
        if !amplitude.is_finite() || amplitude == 0.0 {
            return Err(DuffingError::InvalidAmplitude(amplitude));
        }
        if !omega.is_finite() || omega == 0.0 {
            return Err(DuffingError::InvalidFrequency(omega));
        }
        Ok(Self { id, amplitude, omega, damping: None })
    }

    pub fn with_damping(mut self, damping: Damping) -> Self {
        self.damping = Some(damping);
        self
    }

    pub fn undamped(&self) -> Self {
        Self { damping: None, ..self.clone() }
    }

    pub fn is_damped(&self) -> bool {
        self.damping.is_some()
    }
}

/// Constant coefficients of the undamped equation plus optional damping,
/// which makes the effective coefficients time dependent.
#[derive(Debug, Clone, PartialEq)]
pub struct DuffingCoefficients {
    pub alpha: [f64; 3],
    pub damping: Option<Damping>,
}

/// Coefficients frozen at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientsAt {
    pub beta: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
}

/// ODE residual with the magnitude of its largest term, so near poles the
/// residual can be judged relative to the terms that cancel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub value: f64,
    pub scale: f64,
}

impl Residual {
    pub fn scaled(&self) -> f64 {
        self.value.abs() / self.scale
    }
}

impl DuffingCoefficients {
    pub fn at(&self, t: f64) -> CoefficientsAt {
        let [a1, a2, a3] = self.alpha;
        match &self.damping {
            None => CoefficientsAt { beta: 0.0, alpha1: a1, alpha2: a2, alpha3: a3 },
            Some(d) => {
                let beta = d.beta.eval(t);
                let growth = d.integral(t).exp();
                CoefficientsAt {
                    beta,
                    alpha1: a1 + 0.25 * beta * beta + 0.5 * d.beta.derivative_at(t),
                    alpha2: a2 * growth,
                    alpha3: a3 * growth * growth,
                }
            }
        }
    }

    /// `x''` as dictated by the equation.
    pub fn accel(&self, t: f64, x: f64, v: f64) -> f64 {
        let c = self.at(t);
        let x2 = x * x;
        -(c.beta * v + x * (c.alpha1 + x2 * (c.alpha2 + c.alpha3 * x2)))
    }

    pub fn residual(&self, t: f64, x: f64, v: f64, a: f64) -> Residual {
        let c = self.at(t);
        let x3 = x * x * x;
        let terms = [a, c.beta * v, c.alpha1 * x, c.alpha2 * x3, c.alpha3 * x3 * x * x];
        let scale = terms.iter().fold(1.0f64, |m, t| m.max(t.abs()));
        Residual { value: terms.iter().sum(), scale }
    }

    /// Copy with `alpha[index]` multiplied by `factor`.
    pub fn perturbed(&self, index: usize, factor: f64) -> Self {
        let mut out = self.clone();
        out.alpha[index] *= factor;
        out
    }
}

/// Evenly spaced points `offset + k * spacing`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub offset: f64,
    pub spacing: f64,
}

impl Lattice {
    fn in_time(phase_offset: f64, phase_spacing: f64, omega: f64) -> Self {
        let spacing = phase_spacing / omega.abs();
        Self { offset: (phase_offset / omega).rem_euclid(spacing), spacing }
    }

    pub fn nearest(&self, t: f64) -> f64 {
        self.offset + ((t - self.offset) / self.spacing).round() * self.spacing
    }

    pub fn distance(&self, t: f64) -> f64 {
        (t - self.nearest(t)).abs()
    }

    /// Points in `[a, b]`, ascending.
    pub fn points_in(&self, a: f64, b: f64) -> Vec<f64> {
        let first = ((a - self.offset) / self.spacing).ceil() as i64;
        let last = ((b - self.offset) / self.spacing).floor() as i64;
        (first..=last).map(|k| self.offset + k as f64 * self.spacing).collect()
    }
}

/// Points where the solution touches zero with a slope discontinuity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinkSet {
    pub points: Lattice,
    pub left_slope: f64,
    pub right_slope: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Period {
    Periodic(f64),
    /// Unbounded; the pattern between poles repeats with this spacing.
    Divergent { recurrence: f64 },
}

impl Period {
    pub fn length(&self) -> f64 {
        match *self {
            Period::Periodic(t) => t,
            Period::Divergent { recurrence } => recurrence,
        }
    }
}

/// Range of the solution; infinite ends mark unbounded solutions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialConditions {
    pub x0: f64,
    pub v0: f64,
    /// `v0` is the right-hand limit because `t = 0` is a kink.
    pub one_sided: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub x: f64,
    pub v: f64,
    pub a: f64,
}

/// Value and two time derivatives.
#[derive(Debug, Clone, Copy)]
struct Jet {
    v: f64,
    d1: f64,
    d2: f64,
}

impl Jet {
    fn sqrt(self) -> Jet {
        let r = self.v.max(0.0).sqrt();
        Jet { v: r, d1: self.d1 / (2.0 * r), d2: self.d2 / (2.0 * r) - self.d1 * self.d1 / (4.0 * r * self.v) }
    }

    fn scale(self, k: f64) -> Jet {
        Jet { v: k * self.v, d1: k * self.d1, d2: k * self.d2 }
    }

    fn add(self, o: Jet, sign: f64) -> Jet {
        Jet { v: self.v + sign * o.v, d1: self.d1 + sign * o.d1, d2: self.d2 + sign * o.d2 }
    }
}

/// Leaf function value with time derivatives.
#[derive(Debug, Clone, Copy)]
struct LeafT {
    x: f64,
    x1: f64,
    x2: f64,
    gap: f64,
}

impl LeafT {
    fn square_jet(&self, v: f64, sign: f64) -> Jet {
        Jet { v, d1: sign * 2.0 * self.x * self.x1, d2: sign * 2.0 * (self.x1 * self.x1 + self.x * self.x2) }
    }

    fn one_plus_square(&self) -> Jet {
        self.square_jet(1.0 + self.x * self.x, 1.0)
    }

    /// `1 - x^2` for a bounded leaf function.
    fn one_minus_square(&self) -> Jet {
        self.square_jet(self.gap * (2.0 - self.gap), -1.0)
    }

    /// `x^2 - 1` for cleafh.
    fn square_minus_one(&self) -> Jet {
        self.square_jet(self.gap * (self.gap + 2.0), 1.0)
    }

    /// `1 + sigma x` for a bounded leaf function.
    fn one_plus(&self, sigma: f64) -> Jet {
        let v = if sigma * self.x < 0.0 { self.gap } else { 1.0 + sigma * self.x };
        Jet { v, d1: sigma * self.x1, d2: sigma * self.x2 }
    }

    /// `|x| + sigma` for cleafh.
    fn abs_plus(&self, sigma: f64) -> Jet {
        let sg = self.x.signum();
        let v = if sigma < 0.0 { self.gap } else { self.gap + 2.0 };
        Jet { v, d1: sg * self.x1, d2: sg * self.x2 }
    }
}

/// Evaluator for the 14 solutions; holds the `n = 2` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Catalogue {
    basis: Basis,
}

impl Catalogue {
    pub fn new() -> Result<Self, DuffingError> {
        Ok(Self { basis: Basis::new(2).map_err(DuffingError::Leaf)? })
    }

    pub fn with_basis(basis: Basis) -> Result<Self, DuffingError> {
        if basis.n() != 2 {
            return Err(DuffingError::WrongBasis(basis.n()));
        }
        Ok(Self { basis })
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn pi2(&self) -> f64 {
        self.basis.pi_n()
    }

    pub fn eta2(&self) -> f64 {
        self.basis.eta_n().expect("basis n = 2 has eta")
    }

    fn leaf(&self, kind: LeafKind, spec: &SolutionSpec, t: f64) -> Result<LeafT, DuffingError> {
        let w = spec.omega;
        let p: LeafPoint = self.basis.point(kind, w * t).map_err(|e| match e {
            LeafError::Pole { pole, .. } => DuffingError::Pole { t, pole: pole / w },
            other => DuffingError::Leaf(other),
        })?;
        Ok(LeafT { x: p.x, x1: w * p.dx, x2: w * w * p.d2x, gap: p.gap })
    }

    fn undamped_jet(&self, spec: &SolutionSpec, t: f64) -> Result<Jet, DuffingError> {
        use LeafKind::*;
        let id = spec.id.get();
        let inner = match id {
            1 | 2 | 11 | 12 => {
                let c = self.leaf(Cleaf, spec, t)?;
                match id {
                    1 => c.one_plus_square(),
                    2 => c.one_minus_square(),
                    11 => c.one_plus(1.0),
                    _ => c.one_plus(-1.0),
                }
            }
            3 | 4 | 9 | 10 => {
                let s = self.leaf(Sleaf, spec, t)?;
                match id {
                    3 => s.one_plus_square(),
                    4 => s.one_minus_square(),
                    9 => s.one_plus(1.0),
                    _ => s.one_plus(-1.0),
                }
            }
            5 | 6 => {
                let s = self.leaf(Sleaf, spec, t)?.one_plus_square().sqrt();
                let c = self.leaf(Cleaf, spec, t)?.one_plus_square().sqrt();
                let sign = if id == 5 { 1.0 } else { -1.0 };
                return Ok(c.add(s, sign).scale(spec.amplitude));
            }
            _ => {
                let h = self.leaf(Cleafh, spec, t)?;
                match id {
                    7 => h.one_plus_square(),
                    8 => h.square_minus_one(),
                    13 => h.abs_plus(1.0),
                    _ => h.abs_plus(-1.0),
                }
            }
        };
        Ok(inner.sqrt().scale(spec.amplitude))
    }

    fn is_kink(&self, spec: &SolutionSpec, t: f64) -> Option<KinkSet> {
        let kinks = self.kink_points(spec)?;
        (kinks.points.distance(t) <= 1e-12 * t.abs().max(1.0)).then_some(kinks)
    }

    /// Value, velocity and acceleration; fails at kinks and near poles.
    pub fn solution_state(&self, spec: &SolutionSpec, t: f64) -> Result<State, DuffingError> {
        if let Some(k) = self.is_kink(spec, t) {
            let e = spec.damping.as_ref().map_or(1.0, |d| d.envelope(t));
            return Err(DuffingError::Kink { t, left: e * k.left_slope, right: e * k.right_slope });
        }
        let j = self.undamped_jet(spec, t)?;
        Ok(match &spec.damping {
            None => State { x: j.v, v: j.d1, a: j.d2 },
            Some(d) => {
                let e = d.envelope(t);
                let beta = d.beta.eval(t);
                let e1 = -0.5 * beta * e;
                let e2 = (0.25 * beta * beta - 0.5 * d.beta.derivative_at(t)) * e;
                State { x: e * j.v, v: e1 * j.v + e * j.d1, a: e2 * j.v + 2.0 * e1 * j.d1 + e * j.d2 }
            }
        })
    }

    pub fn solution_value(&self, spec: &SolutionSpec, t: f64) -> Result<f64, DuffingError> {
        let x = self.undamped_jet(spec, t)?.v;
        Ok(spec.damping.as_ref().map_or(x, |d| d.envelope(t) * x))
    }

    pub fn solution_derivative(&self, spec: &SolutionSpec, t: f64) -> Result<f64, DuffingError> {
        Ok(self.solution_state(spec, t)?.v)
    }

    pub fn solution_second_derivative(&self, spec: &SolutionSpec, t: f64) -> Result<f64, DuffingError> {
        Ok(self.solution_state(spec, t)?.a)
    }

    /// The equation solved by `spec`.
    pub fn solution_ode(&self, spec: &SolutionSpec) -> DuffingCoefficients {
        let (a, w2) = (spec.amplitude, spec.omega * spec.omega);
        let (a2, a4) = (a * a, a.powi(4));
        let alpha = match spec.id.get() {
            1 | 3 => [-3.0 * w2, 2.0 * w2 / a2, 0.0],
            2 | 4 | 7 => [3.0 * w2, -2.0 * w2 / a2, 0.0],
            5 => [-3.0 * w2 * (2.0 * SQRT_2 + 1.0), 2.0 * w2 / a2, 0.0],
            6 => [3.0 * w2 * (2.0 * SQRT_2 - 1.0), 2.0 * w2 / a2, 0.0],
            8 => [-3.0 * w2, -2.0 * w2 / a2, 0.0],
            9..=12 => [1.5 * w2, -2.0 * w2 / a2, 0.75 * w2 / a4],
            13 => [-1.5 * w2, 2.0 * w2 / a2, -0.75 * w2 / a4],
            _ => [-1.5 * w2, -2.0 * w2 / a2, -0.75 * w2 / a4],
        };
        DuffingCoefficients { alpha, damping: spec.damping.clone() }
    }

    /// State at `t = 0`. Where the origin is a kink, the right-hand slope is used.
    pub fn initial_conditions(&self, spec: &SolutionSpec) -> Result<InitialConditions, DuffingError> {
        match self.solution_state(spec, 0.0) {
            Ok(s) => Ok(InitialConditions { x0: s.x, v0: s.v, one_sided: false }),
            Err(DuffingError::Kink { right, .. }) => {
                Ok(InitialConditions { x0: self.solution_value(spec, 0.0)?, v0: right, one_sided: true })
            }
            Err(e) => Err(e),
        }
    }

    pub fn period(&self, spec: &SolutionSpec) -> Result<Period, DuffingError> {
        if spec.is_damped() {
            return Err(DuffingError::NotPeriodic);
        }
        let w = spec.omega.abs();
        Ok(match spec.id.get() {
            1..=4 | 6 => Period::Periodic(self.pi2() / w),
            5 => Period::Periodic(0.5 * self.pi2() / w),
            9..=12 => Period::Periodic(2.0 * self.pi2() / w),
            _ => Period::Divergent { recurrence: 2.0 * self.eta2() / w },
        })
    }

    /// Range of the undamped solution.
    pub fn amplitude_bounds(&self, spec: &SolutionSpec) -> Bounds {
        let inf = f64::INFINITY;
        let (lo, hi) = match spec.id.get() {
            1 | 3 => (1.0, SQRT_2),
            2 | 4 => (0.0, 1.0),
            5 => (2f64.powf(1.25), 1.0 + SQRT_2),
            6 => (1.0 - SQRT_2, SQRT_2 - 1.0),
            7 | 13 => (SQRT_2, inf),
            8 | 14 => (0.0, inf),
            _ => (0.0, SQRT_2),
        };
        let a = spec.amplitude;
        if a > 0.0 {
            Bounds { lower: a * lo, upper: a * hi }
        } else {
            Bounds { lower: a * hi, upper: a * lo }
        }
    }

    /// Kink lattice and one-sided slopes, for the ids that have kinks.
    pub fn kink_points(&self, spec: &SolutionSpec) -> Option<KinkSet> {
        let (pi, eta) = (self.pi2(), self.eta2());
        let (offset, spacing, slope) = match spec.id.get() {
            2 => (0.0, pi, SQRT_2),
            4 => (0.5 * pi, pi, SQRT_2),
            8 => (0.0, 2.0 * eta, SQRT_2),
            9 => (1.5 * pi, 2.0 * pi, 1.0),
            10 => (0.5 * pi, 2.0 * pi, 1.0),
            11 => (pi, 2.0 * pi, 1.0),
            12 => (0.0, 2.0 * pi, 1.0),
            14 => (0.0, 2.0 * eta, 1.0),
            _ => return None,
        };
        let s = slope * spec.amplitude * spec.omega.abs();
        Some(KinkSet { points: Lattice::in_time(offset, spacing, spec.omega), left_slope: -s, right_slope: s })
    }

    /// Pole lattice of the divergent ids.
    pub fn poles(&self, spec: &SolutionSpec) -> Option<Lattice> {
        let eta = self.eta2();
        spec.id.is_divergent().then(|| Lattice::in_time(eta, 2.0 * eta, spec.omega))
    }
}
