use super::IntegrateError;

const MAX_ITER: u32 = 200;

/// Solves `f(x) = target` for a strictly monotone `f` on `[lo, hi]`.
///
/// `f` returns the value together with its derivative. Newton steps are used
/// while they stay inside the current bracket and bisection otherwise. Once
/// the residual drops below `tol`, the Newton update already in hand is
/// applied one final time, so the result is typically far more accurate than
/// `tol` alone suggests.
pub fn invert_monotone<F>(mut f: F, target: f64, lo: f64, hi: f64, tol: f64) -> Result<f64, IntegrateError>
where
    F: FnMut(f64) -> (f64, f64),
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(IntegrateError::InvalidInput("bracket must be finite with lo < hi"));
    }
    if !(tol > 0.0) || !target.is_finite() {
        return Err(IntegrateError::InvalidInput("tolerance must be positive and target finite"));
    }
    let (f_lo, _) = f(lo);
    let (f_hi, _) = f(hi);
    if f_lo == target {
        return Ok(lo);
    }
    if f_hi == target {
        return Ok(hi);
    }
    let increasing = f_hi > f_lo;
    let inside = if increasing {
        f_lo <= target && target <= f_hi
    } else {
        f_hi <= target && target <= f_lo
    };
    if !inside {
        return Err(IntegrateError::Bracket { lo, hi, f_lo, f_hi, target });
    }
    let guess = lo + (hi - lo) * (target - f_lo) / (f_hi - f_lo);
    let dir = if increasing { 1.0 } else { -1.0 };
    newton_bracketed(
        |x| {
            let (v, d) = f(x);
            Ok::<_, IntegrateError>((dir * v, dir * d))
        },
        dir * target,
        lo,
        hi,
        guess,
        tol,
    )
}

/// Safeguarded Newton iteration for an increasing, possibly fallible `f`.
/// The caller guarantees `f(lo) <= target <= f(hi)`; it is not re-checked,
/// which saves two evaluations when the bracket is known analytically.
pub fn newton_bracketed<F, E>(
    mut f: F,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    start: f64,
    tol: f64,
) -> Result<f64, E>
where
    F: FnMut(f64) -> Result<(f64, f64), E>,
    E: From<IntegrateError>,
{
    let mut x = if start.is_finite() { start.clamp(lo, hi) } else { 0.5 * (lo + hi) };
    for _ in 0..MAX_ITER {
        let (v, d) = f(x)?;
        let r = v - target;
        let step = r / d;
        if r.abs() <= tol {
            let polished = x - step;
            let ok = step.is_finite() && polished >= lo && polished <= hi;
            return Ok(if ok { polished } else { x });
        }
        if r < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let mut next = x - step;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let width = hi - lo;
        if next == x || width <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            return Ok(next);
        }
        x = next;
    }
    Err(IntegrateError::RootNotConverged { x, iterations: MAX_ITER }.into())
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a minimum of a unimodal `f` on `[a, b]`.
/// Returns the abscissa and value.
pub fn golden_section_min<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc < fd { (c, fc) } else { (d, fd) }
}

pub fn golden_section_max<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (x, v) = golden_section_min(|t| -f(t), a, b, tol);
    (x, -v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_root() {
        let x = invert_monotone(|x| (x * x * x, 3.0 * x * x), 2.0, 0.0, 2.0, 1e-12).unwrap();
        assert!((x - 2f64.cbrt()).abs() < 1e-15);
    }

    #[test]
    fn decreasing_function() {
        let x = invert_monotone(|x| ((-x).exp(), -(-x).exp()), 0.25, 0.0, 5.0, 1e-12).unwrap();
        assert!((x - 4f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn bracket_violation() {
        let err = invert_monotone(|x| (x, 1.0), 5.0, 0.0, 1.0, 1e-12).unwrap_err();
        assert!(matches!(err, IntegrateError::Bracket { .. }));
    }

    #[test]
    fn useless_derivative_falls_back_to_bisection() {
        let x = invert_monotone(|x| (x.powi(3), 0.0), 0.125, 0.0, 1.0, 1e-13).unwrap();
        assert!((x - 0.5).abs() < 1e-4);
    }

    #[test]
    fn golden_section_finds_extrema() {
        let (x, v) = golden_section_min(|t| (t - 0.3).powi(2) + 1.0, 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-7 && (v - 1.0).abs() < 1e-15);
        let (x, _) = golden_section_max(|t| t.sin(), 0.0, 3.0, 1e-10);
        assert!((x - std::f64::consts::FRAC_PI_2).abs() < 1e-7);
    }
}
