use super::{solution_prefix, CheckReport, VerifyError, VerifyOptions, Worst};
use crate::duffing::{Catalogue, DuffingCoefficients, DuffingError, SolutionSpec};
use crate::integrate::{golden_section_max, golden_section_min, quad_singular, rk_integrate, BlowUp, RkOptions};
use crate::integrate::{SecondOrderIvp, Waveform};

/// Integrations for ids kinked at the origin start this far inside the
/// first smooth branch.
pub const LAUNCH_OFFSET: f64 = 1e-3;

fn grid(a: f64, b: f64, points: usize) -> impl Iterator<Item = f64> {
    let last = (points.max(2) - 1) as f64;
    (0..points.max(2)).map(move |i| a + (b - a) * i as f64 / last)
}

fn clear_of(cat: &Catalogue, spec: &SolutionSpec, t: f64, kink_guard: f64, pole_guard: f64) -> bool {
    cat.kink_points(spec).is_none_or(|k| k.points.distance(t) >= kink_guard)
        && cat.poles(spec).is_none_or(|p| p.distance(t) >= pole_guard)
}

fn first_pole_after(cat: &Catalogue, spec: &SolutionSpec, t: f64) -> Option<f64> {
    let poles = cat.poles(spec)?;
    poles.points_in(t, t + poles.spacing).into_iter().find(|&p| p > t)
}

/// Window and sample count for the residual and numeric checks.
fn window(cat: &Catalogue, spec: &SolutionSpec, opts: &VerifyOptions) -> (f64, usize) {
    if spec.is_damped() {
        return (opts.damped_window, opts.damped_points);
    }
    let unit = cat.period(spec).map_or(cat.pi2(), |p| p.length());
    (opts.periods * unit, (opts.periods * opts.points_per_period as f64).round() as usize)
}

/// Numerical solution launched from the closed form's initial state.
#[derive(Debug, Clone)]
pub struct NumericTrack {
    pub launch: f64,
    pub waveform: Waveform,
    /// Sign of `A` for kinked ids. The smooth ODE flow continues through
    /// zero where the closed form reflects, so those compare `sign(A) |x|`.
    fold: Option<f64>,
}

impl NumericTrack {
    /// Numerical value in the closed form's convention, inside the
    /// integrated span.
    pub fn value(&self, t: f64) -> Option<f64> {
        let (x, _) = self.waveform.interpolate(t)?;
        Some(self.fold.map_or(x, |s| s * x.abs()))
    }

    pub fn blowup(&self) -> Option<BlowUp> {
        self.waveform.blowup
    }

    pub fn t_end(&self) -> f64 {
        self.waveform.t_end()
    }
}

/// Integrates the solution's own equation from its initial conditions up
/// to `t_end`, stopping early once `|x|` exceeds `cap`.
pub fn numeric_track(
    cat: &Catalogue,
    spec: &SolutionSpec,
    t_end: f64,
    rk_tol: f64,
    cap: f64,
) -> Result<NumericTrack, VerifyError> {
    let ic = cat.initial_conditions(spec)?;
    let (t0, x0, v0) = if ic.one_sided {
        let s = cat.solution_state(spec, LAUNCH_OFFSET)?;
        (LAUNCH_OFFSET, s.x, s.v)
    } else {
        (0.0, ic.x0, ic.v0)
    };
    if !(t_end > t0) {
        return Err(VerifyError::Window(format!("window end {t_end} is not after the launch time {t0}")));
    }
    let ode = cat.solution_ode(spec);
    let ivp = SecondOrderIvp { accel: |t: f64, x: f64, v: f64| ode.accel(t, x, v), t0, x0, v0 };
    let opts = RkOptions { tol: rk_tol, blowup_cap: cap, ..RkOptions::default() };
    let waveform = rk_integrate(&ivp, t_end, &opts)?;
    let fold = spec.id.has_kinks().then(|| spec.amplitude.signum());
    Ok(NumericTrack { launch: t0, waveform, fold })
}

/// Worst scaled residual of `coeffs` along the closed form over the grid.
fn residual_scan(
    cat: &Catalogue,
    spec: &SolutionSpec,
    coeffs: &DuffingCoefficients,
    opts: &VerifyOptions,
) -> Result<(Worst, usize), (f64, DuffingError)> {
    let (end, points) = window(cat, spec, opts);
    let mut worst = Worst::default();
    let mut used = 0;
    for t in grid(0.0, end, points) {
        if !clear_of(cat, spec, t, opts.guard, opts.guard) {
            continue;
        }
        let s = cat.solution_state(spec, t).map_err(|e| (t, e))?;
        worst.push(coeffs.residual(t, s.x, s.v, s.a).scaled(), t);
        used += 1;
    }
    Ok((worst, used))
}

fn fd_residual(cat: &Catalogue, spec: &SolutionSpec, opts: &VerifyOptions) -> Result<(Worst, usize), (f64, DuffingError)> {
    let (end, points) = window(cat, spec, opts);
    let ode = cat.solution_ode(spec);
    let h = opts.fd_step;
    let mut worst = Worst::default();
    let mut used = 0;
    for t in grid(0.0, end, points) {
        if !clear_of(cat, spec, t, opts.guard.max(2.0 * h), opts.fd_guard) {
            continue;
        }
        let x = |s: f64| cat.solution_value(spec, s).map_err(|e| (s, e));
        let (lo, mid, hi) = (x(t - h)?, x(t)?, x(t + h)?);
        let v = (hi - lo) / (2.0 * h);
        let a = (hi - 2.0 * mid + lo) / (h * h);
        worst.push(ode.residual(t, mid, v, a).scaled(), t);
        used += 1;
    }
    Ok((worst, used))
}

/// Numerical track for the exact-vs-numeric comparison: divergent ids run
/// with the tighter tolerance and stop at the first pole after launch (or
/// once `|x|` passes twice the comparison cap).
pub fn comparison_track(
    cat: &Catalogue,
    spec: &SolutionSpec,
    t_end: f64,
    opts: &VerifyOptions,
) -> Result<NumericTrack, VerifyError> {
    if !spec.id.is_divergent() {
        return numeric_track(cat, spec, t_end, opts.rk_tol, RkOptions::default().blowup_cap);
    }
    let pole = first_pole_after(cat, spec, LAUNCH_OFFSET)
        .ok_or_else(|| VerifyError::Window("no pole found for a divergent id".into()))?;
    numeric_track(cat, spec, t_end.min(pole), opts.divergent_rk_tol, 2.0 * opts.divergent_cap)
}

fn numeric_check(cat: &Catalogue, spec: &SolutionSpec, opts: &VerifyOptions) -> CheckReport {
    let id = format!("{}/numeric", solution_prefix(spec));
    let divergent = spec.id.is_divergent();
    let tol = if divergent { opts.tol.numeric_divergent } else { opts.tol.numeric_periodic };
    let rk_tol = if divergent { opts.divergent_rk_tol } else { opts.rk_tol };
    let (end, points) = window(cat, spec, opts);
    let track = match comparison_track(cat, spec, end, opts) {
        Ok(t) => t,
        Err(e) => return CheckReport::failed(id, tol, end, e),
    };
    let times = grid(0.0, end, points)
        .filter(|&t| t >= track.launch)
        .chain(track.waveform.samples.iter().map(|s| s.t))
        .filter(|&t| t <= track.t_end());
    let mut worst = Worst::default();
    let (mut compared, mut largest) = (0usize, 0.0f64);
    for t in times {
        let exact = match cat.solution_value(spec, t) {
            Ok(x) => x,
            Err(DuffingError::Pole { .. }) if divergent => continue,
            Err(e) => return CheckReport::failed(id, tol, t, e),
        };
        if divergent && exact.abs() > opts.divergent_cap {
            continue;
        }
        let Some(numeric) = track.value(t) else { continue };
        worst.push((exact - numeric).abs(), t);
        compared += 1;
        largest = largest.max(exact.abs());
    }
    let mut notes = format!(
        "{compared} points in [{}, {:.6}], {} steps at local tolerance {:e}",
        track.launch,
        track.t_end(),
        track.waveform.stats.accepted,
        rk_tol
    );
    if divergent {
        notes += &format!("; compared up to |x| = {largest:.4e}");
        if track.blowup().is_some() {
            notes += "; blow-up flagged";
        }
    }
    if track.fold.is_some() {
        notes += "; kinked id compared as sign(A) |x|";
    }
    CheckReport::new(id, worst, tol, notes)
}

/// Locates the first pole from where the numerical solution crosses a
/// large cap, extrapolating the power-law growth to the singular time.
fn blowup_check(cat: &Catalogue, spec: &SolutionSpec, opts: &VerifyOptions) -> CheckReport {
    let id = format!("{}/blowup", solution_prefix(spec));
    let tol = opts.tol.blowup;
    let Some(pole) = first_pole_after(cat, spec, LAUNCH_OFFSET) else {
        return CheckReport::failed(id, tol, 0.0, "no pole found for a divergent id");
    };
    // x grows like d^-1 for the cubic ids and d^-1/2 for the quintic ones.
    let (p, cap) = if spec.id.is_quintic() { (0.5, 1e3) } else { (1.0, 1e6) };
    let cap = cap * spec.amplitude.abs();
    let track = match numeric_track(cat, spec, pole + 1.0, opts.rk_tol, cap) {
        Ok(t) => t,
        Err(e) => return CheckReport::failed(id, tol, pole, e),
    };
    match track.blowup() {
        Some(b) => {
            let estimate = b.pole_estimate(p);
            let notes = format!("|x| = {:.3e} at t = {:.9}; estimated pole {estimate:.12}, expected {pole:.12}", b.x.abs(), b.t);
            CheckReport::new(id, Worst { value: (estimate - pole).abs(), at: pole }, tol, notes)
        }
        None => CheckReport::failed(id, tol, pole, "the numerical solution did not blow up"),
    }
}

/// Damped value against `exp(-1/2 int beta)` from quadrature times the
/// undamped closed form.
fn envelope_check(cat: &Catalogue, spec: &SolutionSpec, opts: &VerifyOptions) -> CheckReport {
    let id = format!("{}/envelope", solution_prefix(spec));
    let tol = opts.tol.envelope;
    let Some(damping) = &spec.damping else {
        return CheckReport::failed(id, tol, 0.0, "spec is undamped");
    };
    let plain = spec.undamped();
    let (end, points) = window(cat, spec, opts);
    let mut worst = Worst::default();
    for t in grid(0.0, end, points) {
        if !clear_of(cat, spec, t, 0.0, opts.guard) {
            continue;
        }
        let integral = if t == damping.c {
            Ok(0.0)
        } else {
            let (a, b, sign) = if t > damping.c { (damping.c, t, 1.0) } else { (t, damping.c, -1.0) };
            quad_singular(|nd| damping.beta.eval(nd.x), a, b, 1e-14).map(|q| sign * q.value)
        };
        let integral = match integral {
            Ok(v) => v,
            Err(e) => return CheckReport::failed(id, tol, t, e),
        };
        match (cat.solution_value(spec, t), cat.solution_value(&plain, t)) {
            (Ok(y), Ok(x)) => worst.push((y - (-0.5 * integral).exp() * x).abs() / y.abs().max(1.0), t),
            (Err(e), _) | (_, Err(e)) => return CheckReport::failed(id, tol, t, e),
        }
    }
    CheckReport::new(id, worst, tol, "relative to max(1, |y|); envelope integral by quadrature")
}

/// Closed-form residual, finite-difference residual and numerical agreement,
/// plus blow-up location for divergent ids and envelope exactness for
/// damped ones. Domain errors turn into failed reports.
pub fn verify_solution(cat: &Catalogue, spec: &SolutionSpec, opts: &VerifyOptions) -> Vec<CheckReport> {
    let prefix = solution_prefix(spec);
    let mut out = Vec::new();

    let id = format!("{prefix}/residual");
    out.push(match residual_scan(cat, spec, &cat.solution_ode(spec), opts) {
        Ok((w, used)) => CheckReport::new(
            id,
            w,
            opts.tol.residual,
            format!("{used} points, guard {:e}; residual scaled by max(1, largest term)", opts.guard),
        ),
        Err((t, e)) => CheckReport::failed(id, opts.tol.residual, t, e),
    });

    let id = format!("{prefix}/fd-residual");
    out.push(match fd_residual(cat, spec, opts) {
        Ok((w, used)) => CheckReport::new(
            id,
            w,
            opts.tol.fd_residual,
            format!("{used} points, step {:e}, pole clearance {}", opts.fd_step, opts.fd_guard),
        ),
        Err((t, e)) => CheckReport::failed(id, opts.tol.fd_residual, t, e),
    });

    out.push(numeric_check(cat, spec, opts));
    if spec.id.is_divergent() {
        out.push(blowup_check(cat, spec, opts));
    }
    if spec.is_damped() {
        out.push(envelope_check(cat, spec, opts));
    }
    out
}

/// Period recurrence and amplitude bounds of an undamped solution.
pub fn verify_relations(cat: &Catalogue, spec: &SolutionSpec, opts: &VerifyOptions) -> Vec<CheckReport> {
    let prefix = solution_prefix(spec);
    let period = match cat.period(spec) {
        Ok(p) => p,
        Err(e) => {
            return vec![
                CheckReport::failed(format!("{prefix}/period"), opts.tol.period, 0.0, &e),
                CheckReport::failed(format!("{prefix}/bounds"), opts.tol.bounds, 0.0, e),
            ]
        }
    };
    vec![period_check(cat, spec, period.length(), opts), bounds_check(cat, spec, period.length(), opts)]
}

fn period_check(cat: &Catalogue, spec: &SolutionSpec, len: f64, opts: &VerifyOptions) -> CheckReport {
    let id = format!("{}/period", solution_prefix(spec));
    let tol = opts.tol.period;
    let mut worst = Worst::default();
    let mut used = 0;
    for i in 0..opts.period_points {
        let t = len * i as f64 / opts.period_points as f64;
        if !clear_of(cat, spec, t, 0.0, opts.guard) || !clear_of(cat, spec, t + len, 0.0, opts.guard) {
            continue;
        }
        match (cat.solution_value(spec, t), cat.solution_value(spec, t + len)) {
            (Ok(a), Ok(b)) => worst.push((a - b).abs(), t),
            (Err(e), _) | (_, Err(e)) => return CheckReport::failed(id, tol, t, e),
        }
        used += 1;
    }
    let kind = if spec.id.is_divergent() { "pole-to-pole recurrence" } else { "period" };
    CheckReport::new(id, worst, tol, format!("{kind} {len:.12}, {used} points"))
}

fn bounds_check(cat: &Catalogue, spec: &SolutionSpec, len: f64, opts: &VerifyOptions) -> CheckReport {
    let id = format!("{}/bounds", solution_prefix(spec));
    let tol = opts.tol.bounds;
    let bounds = cat.amplitude_bounds(spec);
    // One full period, or the pole-free stretch around t = 0.
    let (a, b) = match cat.poles(spec) {
        Some(p) => {
            let first = p.nearest(0.0).abs();
            (-first + opts.guard, first - opts.guard)
        }
        None => (0.0, len),
    };
    let x = |t: f64| cat.solution_value(spec, t);
    let points = opts.points_per_period.max(3);
    let mut samples = Vec::with_capacity(points);
    for t in grid(a, b, points) {
        match x(t) {
            Ok(v) => samples.push((t, v)),
            Err(e) => return CheckReport::failed(id, tol, t, e),
        }
    }
    let step = (b - a) / (points - 1) as f64;
    let f = |t: f64| x(t.clamp(a, b)).unwrap_or(f64::NAN);
    let refine_min = |t0: f64| golden_section_min(f, (t0 - step).max(a), (t0 + step).min(b), 1e-10);
    let refine_max = |t0: f64| golden_section_max(f, (t0 - step).max(a), (t0 + step).min(b), 1e-10);
    let by_value = |p: &&(f64, f64), q: &&(f64, f64)| p.1.total_cmp(&q.1);
    let grid_min = *samples.iter().min_by(by_value).expect("grid is non-empty");
    let grid_max = *samples.iter().max_by(by_value).expect("grid is non-empty");
    let mut lo = refine_min(grid_min.0);
    let mut hi = refine_max(grid_max.0);
    // Kinks are exact extrema; take them when they beat the refinement.
    if let Some(k) = cat.kink_points(spec) {
        for t in k.points.points_in(a, b) {
            if let Ok(v) = x(t) {
                if v < lo.1 {
                    lo = (t, v);
                }
                if v > hi.1 {
                    hi = (t, v);
                }
            }
        }
    }

    let mut worst = Worst::default();
    let mut notes = format!("attained min {:.12} at t = {:.9}, max {:.12} at t = {:.9}", lo.1, lo.0, hi.1, hi.0);
    for (bound, attained, name) in [(bounds.lower, lo, "lower"), (bounds.upper, hi, "upper")] {
        if bound.is_finite() {
            worst.push((attained.1 - bound).abs(), attained.0);
        } else {
            // Unbounded side: the solution must escape past 1e3 |A| next to a pole.
            let pole = b + opts.guard;
            let near = x(pole - 1e-7).map(f64::abs).unwrap_or(0.0);
            let escapes = near > 1e3 * spec.amplitude.abs();
            worst.push(if escapes { 0.0 } else { f64::INFINITY }, pole);
            notes += &format!("; {name} side unbounded, |x| = {near:.3e} at 1e-7 from the pole");
        }
    }
    if matches!(spec.id.get(), 7 | 13) {
        notes += &format!(
            "; attained infimum is {:.12} |A|, the alternative reading x >= |A| is not tight",
            lo.1.abs().min(hi.1.abs()) / spec.amplitude.abs()
        );
    }
    CheckReport::new(id, worst, tol, notes)
}

/// One-sided finite-difference slopes at the kinks in `[0, 2 spacing]`
/// against the tabulated limits.
pub fn verify_kinks(cat: &Catalogue, spec: &SolutionSpec, opts: &VerifyOptions) -> Vec<CheckReport> {
    let id = format!("{}/kinks", solution_prefix(spec));
    let tol = opts.tol.kink;
    let Some(kinks) = cat.kink_points(spec) else {
        return vec![CheckReport::failed(id, tol, 0.0, "solution has no kinks")];
    };
    let h = opts.kink_step;
    let mut worst = Worst::default();
    let points = kinks.points.points_in(0.0, 2.0 * kinks.points.spacing);
    for &t in &points {
        let x = |s: f64| cat.solution_value(spec, s);
        let (l, m, r) = match (x(t - h), x(t), x(t + h)) {
            (Ok(l), Ok(m), Ok(r)) => (l, m, r),
            (Err(e), ..) | (_, Err(e), _) | (.., Err(e)) => return vec![CheckReport::failed(id, tol, t, e)],
        };
        let e = spec.damping.as_ref().map_or(1.0, |d| d.envelope(t));
        worst.push(((m - l) / h - e * kinks.left_slope).abs(), t);
        worst.push(((r - m) / h - e * kinks.right_slope).abs(), t);
    }
    let notes = format!(
        "{} kinks, spacing {:.12}, slopes ({:.9}, {:.9}) before damping, step {h:e}",
        points.len(),
        kinks.points.spacing,
        kinks.left_slope,
        kinks.right_slope
    );
    vec![CheckReport::new(id, worst, tol, notes)]
}

/// Multiplies each non-zero coefficient by 1.03 in turn; passes when every
/// perturbed equation breaks the residual tolerance. The reported value is
/// `tolerance / perturbed residual`, so anything above 1 means a
/// perturbation went undetected.
pub fn negative_control(cat: &Catalogue, spec: &SolutionSpec, opts: &VerifyOptions) -> CheckReport {
    let id = format!("{}/negative-control", solution_prefix(spec));
    let ode = cat.solution_ode(spec);
    let mut worst = Worst::default();
    let mut notes = Vec::new();
    for (i, &alpha) in ode.alpha.iter().enumerate() {
        if alpha == 0.0 {
            continue;
        }
        match residual_scan(cat, spec, &ode.perturbed(i, 1.03), opts) {
            Ok((w, _)) => {
                worst.push(opts.tol.residual / w.value, w.at);
                notes.push(format!("alpha{} +3%: residual {:.3e}", i + 1, w.value));
            }
            Err((t, e)) => return CheckReport::failed(id, 1.0, t, e),
        }
    }
    CheckReport::new(id, worst, 1.0, notes.join("; "))
}
