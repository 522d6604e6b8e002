//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero when any
//! criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use leaf_duffing::duffing::{Catalogue, Damping, DuffingCoefficients, Polynomial, SolutionId, SolutionSpec};
use leaf_duffing::leaf::{Basis, LeafKind};
use leaf_duffing::verify::{
    verify_energy, verify_kinks, verify_relations, verify_solution, CheckReport, VerifyOptions, PRINTED_CONSTANTS,
};

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn grid(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| a + (b - a) * i as f64 / (n - 1) as f64)
}

fn worst_of<'a>(reports: impl IntoIterator<Item = &'a CheckReport>) -> (bool, f64, String) {
    let (mut pass, mut worst, mut at) = (true, 0.0f64, String::new());
    for r in reports {
        pass &= r.passed();
        // NaN or inf residuals arrive as inf, so they win here too.
        if r.worst_residual >= worst {
            worst = r.worst_residual;
            at = r.check_id.clone();
        }
    }
    (pass, worst, at)
}

fn undamped(id: u8) -> SolutionSpec {
    SolutionSpec::new(id, 1.0, 1.0).unwrap()
}

fn constants() -> Outcome {
    let mut worst = (0.0f64, String::new());
    for (n, pi, eta, zeta) in PRINTED_CONSTANTS {
        let b = Basis::new(n).unwrap();
        let pairs = [("pi", Some(b.pi_n()), Some(pi)), ("eta", b.eta_n(), eta), ("zeta", b.zeta_n(), zeta)];
        for (name, computed, printed) in pairs {
            if let (Some(c), Some(p)) = (computed, printed) {
                let d = (c - p).abs();
                if d > worst.0 {
                    worst = (d, format!("{name}_{n} = {c:.12} vs printed {p}"));
                }
            }
        }
    }
    let circle = (Basis::new(1).unwrap().pi_n() - PI).abs();
    outcome(
        worst.0 < 5e-4 && circle < 1e-9,
        format!("max |delta| = {:.3e} ({}), |pi_1 - pi| = {circle:.1e}", worst.0, worst.1),
    )
}

fn base_case() -> Outcome {
    let b = Basis::new(1).unwrap();
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for t in grid(0.0, 2.0 * PI, 1000) {
        s = s.max((b.eval(LeafKind::Sleaf, t).unwrap() - t.sin()).abs());
        c = c.max((b.eval(LeafKind::Cleaf, t).unwrap() - t.cos()).abs());
    }
    outcome(s < 1e-9 && c < 1e-9, format!("sup |sleaf_1 - sin| = {s:.2e}, sup |cleaf_1 - cos| = {c:.2e}"))
}

fn lemniscatic_identity() -> Outcome {
    let b = Basis::new(2).unwrap();
    let mut worst = 0.0f64;
    for t in grid(0.0, 2.0 * b.pi_n(), 1000) {
        let s = b.eval(LeafKind::Sleaf, t).unwrap();
        let c = b.eval(LeafKind::Cleaf, t).unwrap();
        worst = worst.max((s * s + c * c + s * s * c * c - 1.0).abs());
    }
    outcome(worst < 1e-9, format!("max residual {worst:.2e} over 1000 points"))
}

/// Worst scaled residual on 500 points over one period (or pole spacing),
/// skipping 1e-3 bands around kinks and poles.
fn residual_500(cat: &Catalogue, spec: &SolutionSpec, coeffs: &DuffingCoefficients) -> f64 {
    let len = cat.period(spec).unwrap().length();
    let near = |l: Option<leaf_duffing::duffing::Lattice>, t: f64| l.is_some_and(|l| l.distance(t) < 1e-3);
    let mut worst = 0.0f64;
    for t in grid(0.0, len, 500) {
        if near(cat.kink_points(spec).map(|k| k.points), t) || near(cat.poles(spec), t) {
            continue;
        }
        let s = cat.solution_state(spec, t).unwrap();
        worst = worst.max(coeffs.residual(t, s.x, s.v, s.a).scaled());
    }
    worst
}

fn ode_residuals(cat: &Catalogue) -> Outcome {
    let mut worst = (0.0f64, 0u8);
    for id in SolutionId::all() {
        let spec = undamped(id.get());
        let r = residual_500(cat, &spec, &cat.solution_ode(&spec));
        if r >= worst.0 {
            worst = (r, id.get());
        }
    }
    outcome(worst.0 < 1e-7, format!("worst residual {:.2e} (id {})", worst.0, worst.1))
}

fn exact_vs_numeric(cat: &Catalogue) -> Outcome {
    let opts = VerifyOptions::default();
    let mut reports = Vec::new();
    for id in SolutionId::all() {
        reports.extend(
            verify_solution(cat, &undamped(id.get()), &opts)
                .into_iter()
                .filter(|r| r.check_id.ends_with("/numeric") || r.check_id.ends_with("/blowup")),
        );
    }
    let periodic = reports.iter().filter(|r| r.check_id.ends_with("/numeric") && r.tolerance == 1e-6);
    let divergent = reports.iter().filter(|r| r.check_id.ends_with("/numeric") && r.tolerance == 1e-5);
    let blowup = reports.iter().filter(|r| r.check_id.ends_with("/blowup"));
    let (p_ok, p, _) = worst_of(periodic);
    let (d_ok, d, _) = worst_of(divergent);
    let (b_ok, b, _) = worst_of(blowup);
    let counts = reports.iter().filter(|r| r.check_id.ends_with("/numeric")).count();
    outcome(
        p_ok && d_ok && b_ok && counts == 14,
        format!("periodic max {p:.2e} (< 1e-6), divergent max {d:.2e} (< 1e-5), pole location max {b:.2e} (< 1e-6)"),
    )
}

fn relation_reports(cat: &Catalogue, suffix: &str) -> Vec<(u8, CheckReport)> {
    let opts = VerifyOptions::default();
    SolutionId::all()
        .flat_map(|id| {
            verify_relations(cat, &undamped(id.get()), &opts)
                .into_iter()
                .filter(|r| r.check_id.ends_with(suffix))
                .map(move |r| (id.get(), r))
        })
        .collect()
}

fn periods(cat: &Catalogue) -> Outcome {
    let reports = relation_reports(cat, "/period");
    let (ok, worst, at) = worst_of(reports.iter().map(|(_, r)| r));
    outcome(ok && reports.len() == 14, format!("max |x(t+T) - x(t)| = {worst:.2e} ({at}), 200 points per id"))
}

fn amplitude_bounds(cat: &Catalogue) -> Outcome {
    let reports = relation_reports(cat, "/bounds");
    let asserted: Vec<&CheckReport> = reports.iter().filter(|(id, _)| !matches!(id, 7 | 13)).map(|(_, r)| r).collect();
    let (ok, worst, at) = worst_of(asserted);
    for (id, r) in reports.iter().filter(|(id, _)| matches!(id, 7 | 13)) {
        println!("           reported, not asserted: id {id}: {}", r.notes);
    }
    let id5 = &reports.iter().find(|(id, _)| *id == 5).unwrap().1;
    println!("           id 5: {}", id5.notes);
    outcome(ok, format!("max |attained - bound| = {worst:.2e} ({at})"))
}

fn kinks(cat: &Catalogue) -> Outcome {
    let opts = VerifyOptions { kink_step: 1e-6, ..VerifyOptions::default() };
    let reports: Vec<CheckReport> = SolutionId::all()
        .filter(|id| id.has_kinks())
        .flat_map(|id| verify_kinks(cat, &undamped(id.get()), &opts))
        .collect();
    let (ok, worst, at) = worst_of(&reports);
    outcome(ok && reports.len() == 8, format!("max slope error {worst:.2e} ({at}), one-sided h = 1e-6"))
}

fn damped_battery(cat: &Catalogue) -> Outcome {
    let damping = Damping::new(Polynomial::constant(0.5), 0.0).unwrap();
    let opts = VerifyOptions::default();
    let mut residual = Vec::new();
    let mut envelope = Vec::new();
    for id in SolutionId::all() {
        for r in verify_solution(cat, &undamped(id.get()).with_damping(damping.clone()), &opts) {
            if r.check_id.ends_with("/residual") {
                residual.push(r);
            } else if r.check_id.ends_with("/envelope") {
                envelope.push(r);
            }
        }
    }
    let (r_ok, r, _) = worst_of(&residual);
    let (e_ok, e, _) = worst_of(&envelope);
    outcome(
        r_ok && e_ok && residual.len() == 14 && envelope.len() == 14,
        format!("residual max {r:.2e} on [0, 10], envelope max {e:.2e}"),
    )
}

fn energy() -> Outcome {
    let reports: Vec<CheckReport> = (1..=4).map(|n| verify_energy(n, 10.0, 1e-10, 1e-8)).collect();
    let (ok, worst, at) = worst_of(&reports);
    outcome(ok, format!("max drift {worst:.2e} ({at}), n = 1..4, 10 periods"))
}

fn negative_control(cat: &Catalogue) -> Outcome {
    let mut weakest = (f64::INFINITY, String::new());
    for id in SolutionId::all() {
        let spec = undamped(id.get());
        let ode = cat.solution_ode(&spec);
        for i in (0..3).filter(|&i| ode.alpha[i] != 0.0) {
            let r = residual_500(cat, &spec, &ode.perturbed(i, 1.03));
            if r < weakest.0 {
                weakest = (r, format!("id {id}, alpha{}", i + 1));
            }
        }
    }
    outcome(weakest.0 > 1e-7, format!("smallest perturbed residual {:.2e} ({}) exceeds 1e-7", weakest.0, weakest.1))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let cat = Catalogue::new().unwrap();
    let criteria: Vec<Criterion> = vec![
        ("constants vs printed tables", Box::new(constants)),
        ("base-case trigonometric reduction", Box::new(base_case)),
        ("lemniscatic identity", Box::new(lemniscatic_identity)),
        ("undamped ODE residuals", Box::new(|| ode_residuals(&cat))),
        ("exact vs numeric", Box::new(|| exact_vs_numeric(&cat))),
        ("periods", Box::new(|| periods(&cat))),
        ("amplitude bounds", Box::new(|| amplitude_bounds(&cat))),
        ("kink slopes", Box::new(|| kinks(&cat))),
        ("damped battery", Box::new(|| damped_battery(&cat))),
        ("energy invariant", Box::new(energy)),
        ("negative control", Box::new(|| negative_control(&cat))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        failed += usize::from(!o.pass);
        println!("{:>2} {} {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{} of {} criteria passed in {:.1?}", criteria.len() - failed, criteria.len(), start.elapsed());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
