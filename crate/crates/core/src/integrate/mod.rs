//! Numerical engines: singular quadrature, monotone inversion and an adaptive
//! Runge-Kutta integrator for second-order scalar ODEs.

mod quad;
mod rk;
mod roots;

pub use quad::{quad_geometric, quad_semi_infinite, quad_singular, Node, Quadrature};
pub use rk::{rk_integrate, BlowUp, RkOptions, Sample, SecondOrderIvp, SolverStats, Waveform};
pub use roots::{golden_section_max, golden_section_min, invert_monotone, newton_bracketed};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrateError {
    #[error("quadrature did not converge after {levels} levels (best {best:e}, estimated error {err_est:e})")]
    NotConverged { best: f64, err_est: f64, levels: u32 },
    #[error("integrand returned a non-finite value at x = {x:e}")]
    NonFiniteIntegrand { x: f64 },
    #[error("target {target:e} is not bracketed by f({lo:e}) = {f_lo:e} and f({hi:e}) = {f_hi:e}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64, target: f64 },
    #[error("root finder stalled after {iterations} iterations near x = {x:e}")]
    RootNotConverged { x: f64, iterations: u32 },
    #[error("step size underflow at t = {t:e} (h = {h:e}); the solution is probably singular here")]
    StepUnderflow { t: f64, h: f64 },
    #[error("step budget of {max_steps} exhausted at t = {t:e}")]
    StepBudget { t: f64, max_steps: usize },
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
}
