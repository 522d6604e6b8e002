//! Double-exponential quadrature (tanh-sinh on finite ranges, exp-sinh on
//! `[a, inf)`).
//!
//! Integrands receive a [`Node`] carrying the abscissa together with its
//! distances to both limits. Those distances are computed directly from the
//! transform rather than as `b - x`, so an integrand with an inverse square
//! root singularity at an endpoint can be evaluated accurately on nodes that
//! sit within a few ulps of it.

use std::f64::consts::FRAC_PI_2;

use super::IntegrateError;

/// Abscissa with exact distances to the integration limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub x: f64,
    pub from_lo: f64,
    /// Infinite on semi-infinite ranges.
    pub to_hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Difference between the last two refinement levels.
    pub err_est: f64,
    pub levels: u32,
    pub evals: usize,
}

const MAX_LEVEL: u32 = 10;
const MIN_LEVEL: u32 = 2;
const T_MAX: f64 = 6.5;
const NOISE: f64 = 64.0 * f64::EPSILON;

/// Integrates `f` over `[a, b]`. An infinite `b` switches to the exp-sinh rule.
///
/// Refinement halves the step each level and stops once two successive levels
/// agree to `tol` (or to rounding noise relative to the integral). Exhausting
/// the level budget returns [`IntegrateError::NotConverged`] with the best
/// estimate attached.
pub fn quad_singular<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<Quadrature, IntegrateError>
where
    F: FnMut(Node) -> f64,
{
    if !(tol > 0.0) {
        return Err(IntegrateError::InvalidInput("tolerance must be positive"));
    }
    if !a.is_finite() || b.is_nan() || b < a {
        return Err(IntegrateError::InvalidInput("limits must satisfy a <= b with a finite"));
    }
    if b == f64::INFINITY {
        return quad_semi_infinite(f, a, tol);
    }
    if b == a {
        return Ok(Quadrature { value: 0.0, err_est: 0.0, levels: 0, evals: 0 });
    }
    let half = 0.5 * (b - a);
    drive(
        |t| {
            let s = FRAC_PI_2 * t.sinh();
            // e = exp(-2|s|), so that 1 - tanh|s| = 2e / (1 + e) without cancellation.
            let e = (-2.0 * s.abs()).exp();
            let near = 2.0 * half * e / (1.0 + e);
            if near == 0.0 {
                return Ok(None);
            }
            let far = 2.0 * half / (1.0 + e);
            let node = if s >= 0.0 {
                Node { x: b - near, from_lo: far, to_hi: near }
            } else {
                Node { x: a + near, from_lo: near, to_hi: far }
            };
            let weight = half * FRAC_PI_2 * t.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e));
            let fx = f(node);
            if !fx.is_finite() {
                return Err(IntegrateError::NonFiniteIntegrand { x: node.x });
            }
            Ok(Some(weight * fx))
        },
        tol,
    )
}

/// Exp-sinh rule for `[a, inf)`; nodes are `a + exp(pi/2 sinh t)`.
pub fn quad_semi_infinite<F>(mut f: F, a: f64, tol: f64) -> Result<Quadrature, IntegrateError>
where
    F: FnMut(Node) -> f64,
{
    if !(tol > 0.0) {
        return Err(IntegrateError::InvalidInput("tolerance must be positive"));
    }
    if !a.is_finite() {
        return Err(IntegrateError::InvalidInput("lower limit must be finite"));
    }
    drive(
        |t| {
            let d = (FRAC_PI_2 * t.sinh()).exp();
            let weight = FRAC_PI_2 * t.cosh() * d;
            if d == 0.0 || !weight.is_finite() {
                return Ok(None);
            }
            let node = Node { x: a + d, from_lo: d, to_hi: f64::INFINITY };
            let fx = f(node);
            if !fx.is_finite() {
                return Err(IntegrateError::NonFiniteIntegrand { x: node.x });
            }
            Ok(Some(weight * fx))
        },
        tol,
    )
}

/// Splits `[a, b]` into segments of doubling length before applying the
/// tanh-sinh rule, for long ranges over which the integrand decays slowly.
/// Node distances are reported relative to the full range.
pub fn quad_geometric<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<Quadrature, IntegrateError>
where
    F: FnMut(Node) -> f64,
{
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(IntegrateError::InvalidInput("limits must be finite with a <= b"));
    }
    let mut total = Quadrature { value: 0.0, err_est: 0.0, levels: 0, evals: 0 };
    let mut lo = a;
    let mut len = 1.0;
    while lo < b {
        let mut hi = lo + len;
        if b - hi < len {
            hi = b;
        }
        let (off_lo, off_hi) = (lo - a, b - hi);
        let part = quad_singular(
            |n| f(Node { x: n.x, from_lo: off_lo + n.from_lo, to_hi: off_hi + n.to_hi }),
            lo,
            hi,
            tol,
        )?;
        total.value += part.value;
        total.err_est += part.err_est;
        total.levels = total.levels.max(part.levels);
        total.evals += part.evals;
        lo = hi;
        len *= 2.0;
    }
    Ok(total)
}

/// Level driver shared by both rules. `term(t)` returns the weighted integrand
/// at transform parameter `t`, or `None` once the node is no longer
/// representable.
fn drive<G>(mut term: G, tol: f64) -> Result<Quadrature, IntegrateError>
where
    G: FnMut(f64) -> Result<Option<f64>, IntegrateError>,
{
    let mut evals = 1;
    let mut sum = term(0.0)?.unwrap_or(0.0);

    let mut sweep = |first: f64, stride: f64, sum: &mut f64, evals: &mut usize| {
        for sign in [1.0, -1.0] {
            let mut t = first;
            while t <= T_MAX {
                let Some(v) = term(sign * t)? else { break };
                *sum += v;
                *evals += 1;
                if t > 1.0 && v.abs() <= f64::EPSILON * sum.abs() {
                    break;
                }
                t += stride;
            }
        }
        Ok::<(), IntegrateError>(())
    };

    sweep(1.0, 1.0, &mut sum, &mut evals)?;
    let mut h = 1.0;
    let mut prev = sum;
    let mut diff = f64::INFINITY;
    for level in 1..=MAX_LEVEL {
        h *= 0.5;
        sweep(h, 2.0 * h, &mut sum, &mut evals)?;
        let est = h * sum;
        diff = (est - prev).abs();
        if level >= MIN_LEVEL && (diff <= tol || diff <= NOISE * est.abs()) {
            return Ok(Quadrature { value: est, err_est: diff, levels: level, evals });
        }
        prev = est;
    }
    Err(IntegrateError::NotConverged { best: prev, err_est: diff, levels: MAX_LEVEL })
}
