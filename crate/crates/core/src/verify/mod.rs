//! Verification battery: residuals, identities, periods, bounds, kinks and
//! closed-form vs numerical agreement, reported as one record per check.

mod global;
mod solution;

pub use global::{
    verify_constants, verify_energy, verify_identities, CONSTANTS_TABLE_CHECKS, PRINTED_CONSTANTS,
};
pub use solution::{
    comparison_track, negative_control, numeric_track, verify_kinks, verify_relations, verify_solution, NumericTrack,
};

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;
use thiserror::Error;

use crate::duffing::{Catalogue, Damping, DuffingError, Polynomial, SolutionId, SolutionSpec};
use crate::integrate::IntegrateError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Duffing(#[from] DuffingError),
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
    #[error("{0}")]
    Window(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check_id: String,
    pub status: Status,
    pub worst_residual: f64,
    pub worst_location: f64,
    pub tolerance: f64,
    pub notes: String,
}

impl CheckReport {
    /// Status follows from `worst_residual <= tolerance`; NaN fails.
    pub fn new(check_id: impl Into<String>, worst: Worst, tolerance: f64, notes: impl Into<String>) -> Self {
        let status = if worst.value <= tolerance { Status::Pass } else { Status::Fail };
        Self {
            check_id: check_id.into(),
            status,
            worst_residual: worst.value,
            worst_location: worst.at,
            tolerance,
            notes: notes.into(),
        }
    }

    /// A check that could not run; reported as an infinite residual.
    pub fn failed(check_id: impl Into<String>, tolerance: f64, at: f64, reason: impl std::fmt::Display) -> Self {
        Self::new(check_id, Worst { value: f64::INFINITY, at }, tolerance, format!("error: {reason}"))
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Running maximum with its location. NaN counts as worse than anything.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Worst {
    pub value: f64,
    pub at: f64,
}

impl Default for Worst {
    fn default() -> Self {
        Self { value: 0.0, at: f64::NAN }
    }
}

impl Worst {
    pub fn push(&mut self, value: f64, at: f64) {
        let value = if value.is_nan() { f64::INFINITY } else { value };
        if value > self.value || self.at.is_nan() && value >= self.value {
            *self = Self { value, at };
        }
    }

    pub fn merge(&mut self, other: Worst) {
        if !other.at.is_nan() {
            self.push(other.value, other.at);
        }
    }
}

/// Tolerance for every kind of check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub residual: f64,
    pub fd_residual: f64,
    pub numeric_periodic: f64,
    pub numeric_divergent: f64,
    pub blowup: f64,
    pub identity: f64,
    pub period: f64,
    pub bounds: f64,
    pub kink: f64,
    pub envelope: f64,
    pub constants: f64,
    pub energy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            residual: 1e-7,
            fd_residual: 1e-5,
            numeric_periodic: 1e-6,
            numeric_divergent: 1e-5,
            blowup: 1e-6,
            identity: 1e-9,
            period: 1e-8,
            bounds: 1e-6,
            kink: 1e-5,
            envelope: 1e-10,
            constants: 5e-4,
            energy: 1e-8,
        }
    }
}

impl Tolerances {
    /// Same tolerance everywhere.
    pub fn uniform(tol: f64) -> Self {
        Self {
            residual: tol,
            fd_residual: tol,
            numeric_periodic: tol,
            numeric_divergent: tol,
            blowup: tol,
            identity: tol,
            period: tol,
            bounds: tol,
            kink: tol,
            envelope: tol,
            constants: tol,
            energy: tol,
        }
    }
}

/// Sampling and integration settings shared by the per-solution checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub tol: Tolerances,
    /// Samples per period (or per pole spacing for divergent ids).
    pub points_per_period: usize,
    /// Periods covered by the residual and numeric checks.
    pub periods: f64,
    /// Window `[0, t]` for damped solutions.
    pub damped_window: f64,
    pub damped_points: usize,
    /// Half-width of the band excluded around kinks and poles.
    pub guard: f64,
    pub fd_step: f64,
    /// The finite-difference residual keeps this far from poles.
    pub fd_guard: f64,
    pub rk_tol: f64,
    /// Local tolerance for the numeric comparison of divergent ids. Near a
    /// pole `x` amplifies a shift of the singular time by up to `x^3 / 2`.
    pub divergent_rk_tol: f64,
    /// Numeric comparison of divergent ids stops at this `|x|`.
    pub divergent_cap: f64,
    pub kink_step: f64,
    pub period_points: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tol: Tolerances::default(),
            points_per_period: 500,
            periods: 3.0,
            damped_window: 10.0,
            damped_points: 1000,
            guard: 1e-3,
            fd_step: 1e-4,
            fd_guard: 0.05,
            rk_tol: 1e-10,
            divergent_rk_tol: 1e-14,
            divergent_cap: 1e3,
            kink_step: 1e-6,
            period_points: 200,
        }
    }
}

/// What `run_suite` should execute.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub ids: Vec<u8>,
    pub amplitude: f64,
    pub omega: f64,
    pub undamped: bool,
    pub damped: bool,
    pub damping: Damping,
    /// Identities, constants, energy and negative controls.
    pub global: bool,
    pub options: VerifyOptions,
    pub threads: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            ids: (1..=14).collect(),
            amplitude: 1.0,
            omega: 1.0,
            undamped: true,
            damped: true,
            damping: Damping { beta: Polynomial::constant(0.5), c: 0.0 },
            global: true,
            options: VerifyOptions::default(),
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

impl SuiteConfig {
    /// Every id, both variants and the global checks.
    pub fn is_full(&self) -> bool {
        self.undamped && self.damped && self.global && (1..=14).all(|id| self.ids.contains(&id))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub reports: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckReport> {
        self.reports.iter().filter(|r| !r.passed())
    }

    pub fn all_passed(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn get(&self, check_id: &str) -> Option<&CheckReport> {
        self.reports.iter().find(|r| r.check_id == check_id)
    }

    pub fn to_jsonl(&self) -> String {
        self.reports.iter().map(|r| r.to_json() + "\n").collect()
    }

    pub fn summary_table(&self) -> String {
        let width = self.reports.iter().map(|r| r.check_id.len()).max().unwrap_or(8).max(8);
        let mut out = format!("{:<width$}  {:<6}  {:>10}  {:>10}  {:>12}\n", "check", "status", "worst", "tolerance", "at");
        for r in &self.reports {
            let status = if r.passed() { "pass" } else { "FAIL" };
            out += &format!(
                "{:<width$}  {:<6}  {:>10.3e}  {:>10.1e}  {:>12.6}\n",
                r.check_id, status, r.worst_residual, r.tolerance, r.worst_location
            );
        }
        let failed = self.failures().count();
        out += &format!("{} checks, {} passed, {} failed\n", self.reports.len(), self.reports.len() - failed, failed);
        out
    }
}

pub(crate) fn solution_prefix(spec: &SolutionSpec) -> String {
    let variant = if spec.is_damped() { "damped" } else { "undamped" };
    format!("solution/{:02}/{variant}", spec.id.get())
}

type Job<'a> = Box<dyn Fn() -> Vec<CheckReport> + Send + Sync + 'a>;

/// Runs the selected battery. Reports come back in a fixed order no matter
/// how many threads are used.
pub fn run_suite(config: &SuiteConfig) -> SuiteReport {
    let cat = match Catalogue::new() {
        Ok(c) => c,
        Err(e) => return SuiteReport { reports: vec![CheckReport::failed("setup", 0.0, f64::NAN, e)] },
    };
    let opts = config.options;
    let mut specs = Vec::new();
    let mut reports = Vec::new();
    for &id in &config.ids {
        match SolutionSpec::new(id, config.amplitude, config.omega) {
            Ok(spec) => {
                if config.undamped {
                    specs.push(spec.clone());
                }
                if config.damped {
                    specs.push(spec.with_damping(config.damping.clone()));
                }
            }
            Err(e) => reports.push(CheckReport::failed(format!("solution/{id:02}"), 0.0, f64::NAN, e)),
        }
    }

    let mut jobs: Vec<Job> = Vec::new();
    if config.global {
        jobs.push(Box::new(|| verify_constants(&opts.tol)));
        for n in 1..=4 {
            jobs.push(Box::new(move || match crate::leaf::Basis::new(n) {
                Ok(b) => verify_identities(&b, 1000, opts.tol.identity),
                Err(e) => vec![CheckReport::failed(format!("identity/n{n}"), 0.0, f64::NAN, e)],
            }));
        }
        for n in 1..=4 {
            jobs.push(Box::new(move || vec![verify_energy(n, 10.0, opts.rk_tol, opts.tol.energy)]));
        }
    }
    for spec in &specs {
        let cat = &cat;
        jobs.push(Box::new(move || verify_solution(cat, spec, &opts)));
        if !spec.is_damped() {
            jobs.push(Box::new(move || verify_relations(cat, spec, &opts)));
        }
        if spec.id.has_kinks() {
            jobs.push(Box::new(move || verify_kinks(cat, spec, &opts)));
        }
        if config.global && !spec.is_damped() {
            jobs.push(Box::new(move || vec![negative_control(cat, spec, &opts)]));
        }
    }

    reports.extend(execute(&jobs, config.threads.max(1)));
    if config.is_full() {
        reports.push(coverage(&reports));
    }
    SuiteReport { reports }
}

fn execute(jobs: &[Job], threads: usize) -> Vec<CheckReport> {
    let slots: Vec<Mutex<Vec<CheckReport>>> = jobs.iter().map(|_| Mutex::new(Vec::new())).collect();
    let next = AtomicUsize::new(0);
    let work = || loop {
        let i = next.fetch_add(1, Ordering::Relaxed);
        let Some(job) = jobs.get(i) else { break };
        *slots[i].lock().expect("slot lock") = job();
    };
    if threads == 1 {
        work();
    } else {
        std::thread::scope(|s| {
            for _ in 0..threads {
                s.spawn(work);
            }
        });
    }
    slots.into_iter().flat_map(|s| s.into_inner().expect("slot lock")).collect()
}

/// Fails unless each of the 28 instances got a residual check and each
/// constants table was compared.
fn coverage(reports: &[CheckReport]) -> CheckReport {
    let mut missing = Vec::new();
    for id in SolutionId::all() {
        for variant in ["undamped", "damped"] {
            let key = format!("solution/{:02}/{variant}/residual", id.get());
            if !reports.iter().any(|r| r.check_id == key) {
                missing.push(key);
            }
        }
    }
    for key in CONSTANTS_TABLE_CHECKS {
        if !reports.iter().any(|r| r.check_id == key) {
            missing.push(key.to_string());
        }
    }
    let worst = Worst { value: missing.len() as f64, at: f64::NAN };
    let notes = if missing.is_empty() {
        "28 solution instances and 3 constants tables covered".to_string()
    } else {
        format!("missing: {}", missing.join(", "))
    };
    CheckReport::new("coverage", worst, 0.0, notes)
}
