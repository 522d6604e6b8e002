//! Command-line front end.
//!
//! Exit statuses: 0 success, 1 failed checks, 2 usage error, 3 domain
//! error, 4 I/O error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::duffing::{Catalogue, Damping, DuffingCoefficients, DuffingError, Polynomial, SolutionSpec};
use crate::integrate::{rk_integrate, RkOptions, SecondOrderIvp};
use crate::leaf::{Basis, LeafError, LeafKind};
use crate::verify::{comparison_track, run_suite, SuiteConfig, Tolerances, VerifyOptions};

/// Largest number of rows a wave or simulate run may emit.
pub const MAX_ROWS: f64 = 1e7;
/// Evaluations this close to a pole or escape time get a warning.
pub const NEAR_POLE: f64 = 1e-3;

#[derive(Debug, Parser)]
#[command(name = "leaf-duffing", version, about = "Leaf functions and exact Duffing solutions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Table of pi_n, eta_n and zeta_n.
    Constants {
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..=16))]
        n_max: u32,
    },
    /// Evaluate one leaf function.
    Eval {
        kind: LeafKind,
        n: u32,
        #[arg(allow_negative_numbers = true)]
        t: f64,
    },
    /// Sample a catalogue solution to CSV.
    Wave(WaveArgs),
    /// Run the verification battery.
    Verify(VerifyArgs),
    /// Integrate a Duffing equation from arbitrary data to CSV.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SolutionArgs {
    #[arg(long = "A", allow_negative_numbers = true, default_value_t = 1.0)]
    pub amplitude: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    pub omega: f64,
    /// Damping polynomial, constant term first ("0.5" is beta = 1/2).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub beta: Option<Vec<f64>>,
    /// Lower limit of the damping integral.
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Channel {
    Exact,
    Numeric,
    Residual,
    Envelope,
}

#[derive(Debug, Clone, Args)]
pub struct WaveArgs {
    #[arg(long)]
    pub id: u8,
    #[command(flatten)]
    pub solution: SolutionArgs,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub t_min: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub t_max: f64,
    #[arg(long)]
    pub dt: f64,
    #[arg(long, value_delimiter = ',', default_value = "exact")]
    pub channels: Vec<Channel>,
    /// Local tolerance of the numeric channel (defaults match `verify`).
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_delimiter = ',')]
    pub ids: Option<Vec<u8>>,
    /// Only the damped extensions.
    #[arg(long)]
    pub damped: bool,
    /// Only the undamped solutions.
    #[arg(long)]
    pub undamped: bool,
    #[command(flatten)]
    pub solution: SolutionArgs,
    /// One tolerance for every numerical check.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Write one JSON record per check here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Take coefficients and initial data from this catalogue solution.
    #[arg(long)]
    pub id: Option<u8>,
    #[command(flatten)]
    pub solution: SolutionArgs,
    /// Explicit alpha1,alpha2[,alpha3]; overrides --id.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub alpha: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    pub x0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub v0: Option<f64>,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub t_min: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub t_max: f64,
    #[arg(long)]
    pub dt: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
    Io(String),
    ChecksFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ChecksFailed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(m) => write!(f, "domain error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::ChecksFailed(n) => write!(f, "{n} check(s) failed"),
        }
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

impl From<DuffingError> for CliError {
    fn from(e: DuffingError) -> Self {
        match e {
            DuffingError::InvalidId(_)
            | DuffingError::InvalidAmplitude(_)
            | DuffingError::InvalidFrequency(_)
            | DuffingError::InvalidDamping(_) => CliError::Usage(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

/// Formats with 15 significant digits; scientific notation outside
/// `[1e-4, 1e6)`, trailing zeros dropped.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{v:.14e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let fixed = format!("{v:.*}", (14 - exp) as usize);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Parses `args` (program name first), runs the command, and returns the
/// exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Constants { n_max } => cmd_constants(n_max, out),
        Command::Eval { kind, n, t } => cmd_eval(kind, n, t, out, err),
        Command::Wave(args) => cmd_wave(&args, out, err),
        Command::Verify(args) => cmd_verify(&args, out),
        Command::Simulate(args) => cmd_simulate(&args, out, err),
    }
}

pub fn cmd_constants(n_max: u32, out: &mut dyn Write) -> Result<(), CliError> {
    if !(1..=16).contains(&n_max) {
        return Err(CliError::Usage(format!("n_max must be between 1 and 16, got {n_max}")));
    }
    let opt = |v: Option<f64>| v.map_or("N/A".to_string(), format_number);
    writeln!(out, "n,pi_n,eta_n,zeta_n").map_err(io_err)?;
    for n in 1..=n_max {
        let b = Basis::new(n).map_err(|e| CliError::Domain(e.to_string()))?;
        writeln!(out, "{n},{},{},{}", format_number(b.pi_n()), opt(b.eta_n()), opt(b.zeta_n())).map_err(io_err)?;
    }
    Ok(())
}

pub fn cmd_eval(kind: LeafKind, n: u32, t: f64, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let basis = Basis::new(n).map_err(|e| CliError::Usage(e.to_string()))?;
    let x = basis.eval(kind, t).map_err(|e| match e {
        LeafError::NonFinite(_) => CliError::Usage(e.to_string()),
        _ => CliError::Domain(e.to_string()),
    })?;
    writeln!(out, "{}", format_number(x)).map_err(io_err)?;
    if let Some((d, what, at)) = near_singularity(&basis, kind, t) {
        writeln!(err, "warning: t = {t} is {d:.3e} from the {what} of {kind}_{n} at t = {}", format_number(at))
            .map_err(io_err)?;
    }
    Ok(())
}

/// Distance to the nearest pole or escape time when it is below [`NEAR_POLE`].
fn near_singularity(basis: &Basis, kind: LeafKind, t: f64) -> Option<(f64, &'static str, f64)> {
    let (d, what, at) = match kind {
        LeafKind::Cleafh => {
            let eta = basis.eta_n()?;
            let pole = (2.0 * ((t / eta - 1.0) / 2.0).round() + 1.0) * eta;
            ((t - pole).abs(), "pole", pole)
        }
        LeafKind::Sleafh => {
            let zeta = basis.zeta_n()?;
            (zeta - t.abs(), "escape time", zeta.copysign(t))
        }
        _ => return None,
    };
    (d < NEAR_POLE).then_some((d, what, at))
}

fn build_spec(id: u8, s: &SolutionArgs) -> Result<SolutionSpec, CliError> {
    let spec = SolutionSpec::new(id, s.amplitude, s.omega)?;
    Ok(match &s.beta {
        Some(coeffs) => spec.with_damping(Damping::new(Polynomial::new(coeffs.clone())?, s.c)?),
        None => spec,
    })
}

fn row_count(t_min: f64, t_max: f64, dt: f64) -> Result<usize, CliError> {
    if !(t_min.is_finite() && t_max.is_finite() && t_min < t_max) {
        return Err(CliError::Usage(format!("need finite t_min < t_max, got [{t_min}, {t_max}]")));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(CliError::Usage(format!("dt must be positive, got {dt}")));
    }
    let steps = ((t_max - t_min) / dt * (1.0 + 1e-12)).floor();
    if steps > MAX_ROWS {
        return Err(CliError::Usage(format!("{steps} rows exceed the limit of {MAX_ROWS}")));
    }
    Ok(steps as usize + 1)
}

fn open_output<'a>(path: &Option<PathBuf>, out: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>, CliError> {
    Ok(match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            Box::new(BufWriter::new(f))
        }
        None => Box::new(BufWriter::new(out)),
    })
}

pub fn cmd_wave(args: &WaveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let spec = build_spec(args.id, &args.solution)?;
    let rows = row_count(args.t_min, args.t_max, args.dt)?;
    let cat = Catalogue::new()?;
    let has = |c: Channel| args.channels.contains(&c);
    let mut opts = VerifyOptions::default();
    if let Some(tol) = args.tol {
        if !(tol > 0.0) {
            return Err(CliError::Usage(format!("tolerance must be positive, got {tol}")));
        }
        opts.rk_tol = tol;
        opts.divergent_rk_tol = tol;
    }
    let track = if has(Channel::Numeric) && args.t_max > 0.0 {
        match comparison_track(&cat, &spec, args.t_max, &opts) {
            Ok(t) => Some(t),
            Err(e) => {
                writeln!(err, "note: numeric channel unavailable: {e}").map_err(io_err)?;
                None
            }
        }
    } else {
        None
    };
    let ode = cat.solution_ode(&spec);
    let poles = cat.poles(&spec);
    let kinks = cat.kink_points(&spec);

    let mut w = open_output(&args.out, out)?;
    let mut header = String::from("t,x_exact");
    for (c, name) in [(Channel::Numeric, "x_numeric"), (Channel::Residual, "residual"), (Channel::Envelope, "envelope")] {
        if has(c) {
            header += ",";
            header += name;
        }
    }
    writeln!(w, "{header}").map_err(io_err)?;
    let mut guarded = 0usize;
    for i in 0..rows {
        let t = args.t_min + i as f64 * args.dt;
        let in_guard = poles.is_some_and(|p| p.distance(t) < opts.guard);
        let mut line = format_number(t);
        line.push(',');
        if in_guard {
            guarded += 1;
        } else {
            line += &format_number(cat.solution_value(&spec, t)?);
        }
        if has(Channel::Numeric) {
            line.push(',');
            if let Some(x) = track.as_ref().filter(|_| !in_guard).and_then(|tr| tr.value(t)) {
                line += &format_number(x);
            }
        }
        if has(Channel::Residual) {
            line.push(',');
            let near_kink = kinks.is_some_and(|k| k.points.distance(t) < opts.guard);
            if !in_guard && !near_kink {
                let s = cat.solution_state(&spec, t)?;
                line += &format_number(ode.residual(t, s.x, s.v, s.a).scaled());
            }
        }
        if has(Channel::Envelope) {
            line.push(',');
            line += &format_number(spec.damping.as_ref().map_or(1.0, |d| d.envelope(t)));
        }
        writeln!(w, "{line}").map_err(io_err)?;
    }
    w.flush().map_err(io_err)?;
    drop(w);
    if guarded > 0 {
        writeln!(err, "note: {guarded} row(s) within {} of a pole left empty", opts.guard).map_err(io_err)?;
    }
    Ok(())
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut config = SuiteConfig::default();
    let selective = args.ids.is_some() || args.damped || args.undamped;
    if let Some(ids) = &args.ids {
        config.ids = ids.clone();
    }
    if args.damped || args.undamped {
        config.damped = args.damped;
        config.undamped = args.undamped;
    }
    config.global = !selective;
    config.amplitude = args.solution.amplitude;
    config.omega = args.solution.omega;
    if let Some(beta) = &args.solution.beta {
        config.damping = Damping::new(Polynomial::new(beta.clone())?, args.solution.c)?;
    } else {
        config.damping.c = args.solution.c;
    }
    if let Some(tol) = args.tol {
        if !(tol > 0.0) {
            return Err(CliError::Usage(format!("tolerance must be positive, got {tol}")));
        }
        config.options.tol = Tolerances::uniform(tol);
    }
    let report = run_suite(&config);
    if let Some(path) = &args.out {
        std::fs::write(path, report.to_jsonl()).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    write!(out, "{}", report.summary_table()).map_err(io_err)?;
    match report.failures().count() {
        0 => Ok(()),
        n => Err(CliError::ChecksFailed(n)),
    }
}

pub fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let rows = row_count(args.t_min, args.t_max, args.dt)?;
    if !(args.tol > 0.0) {
        return Err(CliError::Usage(format!("tolerance must be positive, got {}", args.tol)));
    }
    let cat = Catalogue::new()?;
    let spec = args.id.map(|id| build_spec(id, &args.solution)).transpose()?;
    let damping = match &args.solution.beta {
        Some(b) => Some(Damping::new(Polynomial::new(b.clone())?, args.solution.c)?),
        None => None,
    };
    let coeffs = match (&args.alpha, &spec) {
        (Some(a), _) => {
            if a.is_empty() || a.len() > 3 || a.iter().any(|v| !v.is_finite()) {
                return Err(CliError::Usage("--alpha takes one to three finite coefficients".into()));
            }
            let mut alpha = [0.0; 3];
            alpha[..a.len()].copy_from_slice(a);
            DuffingCoefficients { alpha, damping }
        }
        (None, Some(spec)) => cat.solution_ode(spec),
        (None, None) => return Err(CliError::Usage("give --id or --alpha".into())),
    };
    let start = match &spec {
        Some(spec) => match cat.solution_state(spec, args.t_min) {
            Ok(s) => Some((s.x, s.v)),
            Err(DuffingError::Kink { right, .. }) => Some((cat.solution_value(spec, args.t_min)?, right)),
            Err(e) => return Err(e.into()),
        },
        None => None,
    };
    let x0 = args.x0.or(start.map(|s| s.0));
    let v0 = args.v0.or(start.map(|s| s.1));
    let (Some(x0), Some(v0)) = (x0, v0) else {
        return Err(CliError::Usage("initial data needs --x0 and --v0 (or --id)".into()));
    };
    let ivp = SecondOrderIvp { accel: |t: f64, x: f64, v: f64| coeffs.accel(t, x, v), t0: args.t_min, x0, v0 };
    let opts = RkOptions { tol: args.tol, ..RkOptions::default() };
    let wave = rk_integrate(&ivp, args.t_max, &opts).map_err(|e| CliError::Domain(e.to_string()))?;

    let mut w = open_output(&args.out, out)?;
    writeln!(w, "t,x,v").map_err(io_err)?;
    for i in 0..rows {
        let t = args.t_min + i as f64 * args.dt;
        let Some((x, v)) = wave.interpolate(t.min(args.t_max)) else { break };
        writeln!(w, "{},{},{}", format_number(t), format_number(x), format_number(v)).map_err(io_err)?;
    }
    w.flush().map_err(io_err)?;
    drop(w);
    if let Some(b) = wave.blowup {
        writeln!(err, "note: |x| passed {:e} at t = {}; later rows omitted", opts.blowup_cap, format_number(b.t))
            .map_err(io_err)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::format_number;

    #[test]
    fn number_format() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(-2.5), "-2.5");
        assert_eq!(format_number(2.622057554292119), "2.62205755429212");
        assert_eq!(format_number(1e-4), "0.0001");
        assert_eq!(format_number(5e-5), "5e-5");
        assert_eq!(format_number(999999.0), "999999");
        assert_eq!(format_number(1e6), "1e6");
        assert_eq!(format_number(0.99999999999999999), "1");
        assert_eq!(format_number(123456.7890123456), "123456.789012346");
    }
}
