use leaf_duffing::duffing::{Catalogue, SolutionSpec};
use leaf_duffing::leaf::Basis;
use leaf_duffing::verify::*;

fn cat() -> Catalogue {
    Catalogue::new().unwrap()
}

fn find<'a>(reports: &'a [CheckReport], suffix: &str) -> &'a CheckReport {
    reports.iter().find(|r| r.check_id.ends_with(suffix)).unwrap_or_else(|| panic!("no {suffix} report"))
}

#[test]
fn id1_matches_numerics_over_three_periods() {
    let c = cat();
    let spec = SolutionSpec::new(1, 1.0, 1.0).unwrap();
    let reports = verify_solution(&c, &spec, &VerifyOptions::default());
    let numeric = find(&reports, "/numeric");
    assert!(numeric.passed() && numeric.tolerance == 1e-6, "{numeric:?}");
    assert!(numeric.notes.contains(&format!("{:.6}", 3.0 * c.pi2())));
    assert!(find(&reports, "/residual").passed());
}

#[test]
fn id8_is_tracked_until_blow_up() {
    let spec = SolutionSpec::new(8, 1.0, 1.0).unwrap();
    let reports = verify_solution(&cat(), &spec, &VerifyOptions::default());
    let numeric = find(&reports, "/numeric");
    assert!(numeric.passed() && numeric.notes.contains("blow-up flagged"), "{numeric:?}");
    assert!(find(&reports, "/blowup").passed());
}

#[test]
fn perturbed_alpha1_breaks_the_residual() {
    let c = cat();
    let spec = SolutionSpec::new(3, 1.0, 1.0).unwrap();
    // alpha1 = -3 w^2 becomes -3.1 w^2.
    let wrong = c.solution_ode(&spec).perturbed(0, 3.1 / 3.0);
    let worst = (0..500)
        .map(|i| 0.01 * i as f64)
        .map(|t| {
            let s = c.solution_state(&spec, t).unwrap();
            wrong.residual(t, s.x, s.v, s.a).scaled()
        })
        .fold(0.0, f64::max);
    assert!(worst > 1e-2);
    assert!(negative_control(&c, &spec, &VerifyOptions::default()).passed());
}

#[test]
fn identities() {
    let r = verify_identities(&Basis::new(2).unwrap(), 1000, 1e-9);
    assert!(r.iter().all(|r| r.passed()));
    assert!(r.iter().any(|r| r.check_id == "identity/n2/lemniscatic"));
    let r = verify_identities(&Basis::new(1).unwrap(), 1000, 1e-9);
    assert!(find(&r, "/sin").passed() && find(&r, "/cos").passed());
    let strict = verify_identities(&Basis::new(2).unwrap(), 1000, 0.0);
    assert!(strict.iter().any(|r| !r.passed()), "exact-zero tolerance should not be attainable");
}

#[test]
fn relations() {
    let c = cat();
    let opts = VerifyOptions::default();
    for (id, a) in [(4, 1.0), (6, 1.0), (11, 3.0), (5, 1.0), (7, 1.0), (13, -2.0)] {
        let spec = SolutionSpec::new(id, a, 1.0).unwrap();
        for r in verify_relations(&c, &spec, &opts) {
            assert!(r.passed(), "{r:?}");
        }
    }
    let spec = SolutionSpec::new(11, 3.0, 1.0).unwrap();
    let bounds = find(&verify_relations(&c, &spec, &opts), "/bounds").clone();
    assert!(bounds.notes.contains("max 4.242640687119"), "{}", bounds.notes);
    let spec = SolutionSpec::new(7, 1.0, 1.0).unwrap();
    assert!(find(&verify_relations(&c, &spec, &opts), "/bounds").notes.contains("not tight"));
}

#[test]
fn kinks_match_tabulated_slopes() {
    let c = cat();
    for id in [2, 4, 8, 9, 10, 11, 12, 14] {
        let spec = SolutionSpec::new(id, 1.3, 0.7).unwrap();
        let r = verify_kinks(&c, &spec, &VerifyOptions::default());
        assert!(r[0].passed(), "{:?}", r[0]);
    }
}

#[test]
fn energy_is_conserved() {
    for n in 1..=4 {
        assert!(verify_energy(n, 10.0, 1e-10, 1e-8).passed());
    }
}

#[test]
fn unattainable_tolerance_reports_failures() {
    let config = SuiteConfig {
        ids: vec![1, 7],
        global: false,
        options: VerifyOptions { tol: Tolerances::uniform(1e-15), ..VerifyOptions::default() },
        ..SuiteConfig::default()
    };
    let report = run_suite(&config);
    assert!(report.failures().count() > 0);
    assert!(report.reports.iter().all(|r| r.worst_residual.is_finite() || r.notes.starts_with("error")));
}

#[test]
fn divergent_selection() {
    let config = SuiteConfig { ids: vec![7, 8, 13, 14], global: false, ..SuiteConfig::default() };
    let report = run_suite(&config);
    assert!(report.all_passed(), "{}", report.summary_table());
    assert_eq!(report.reports.iter().filter(|r| r.check_id.ends_with("/blowup")).count(), 8);
    assert!(report.get("coverage").is_none());
}

#[test]
fn reports_are_reproducible() {
    let config = SuiteConfig { ids: vec![2, 13], global: false, threads: 1, ..SuiteConfig::default() };
    let first = run_suite(&config).to_jsonl();
    let threaded = run_suite(&SuiteConfig { threads: 3, ..config }).to_jsonl();
    assert_eq!(first, threaded);
    for line in first.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        for key in ["check_id", "status", "worst_residual", "worst_location", "tolerance", "notes"] {
            assert!(v.get(key).is_some(), "{key} missing in {line}");
        }
    }
}

#[test]
fn default_suite_is_green_and_complete() {
    let report = run_suite(&SuiteConfig::default());
    assert!(report.all_passed(), "{}", report.summary_table());
    assert!(report.get("coverage").unwrap().passed());
    for key in CONSTANTS_TABLE_CHECKS {
        assert!(report.get(key).is_some());
    }
}
