mod point;
mod sweeps;
mod verify;

use clap::Args;
use ewa_core::orbits::PeriodOptions;
use ewa_core::Params;

use crate::error::CliError;
use crate::output::Format;
use crate::registry::{Op, Registry};

#[derive(Args, Debug, Clone)]
pub struct GameArgs {
    /// Intensity of choice
    #[arg(long)]
    pub a: f64,
    /// Equilibrium split
    #[arg(long)]
    pub b: f64,
    /// Discount factor (memory loss)
    #[arg(long, default_value = "0")]
    pub sigma: f64,
}

impl GameArgs {
    pub fn params(&self) -> Result<Params, CliError> {
        Ok(Params::new(self.a, self.b, self.sigma)?)
    }
}

#[derive(Args, Debug, Clone)]
pub struct DetectArgs {
    /// Initial condition(s); later seeds are tried when earlier ones find nothing
    #[arg(long, default_value = "0.2", value_delimiter = ',')]
    pub x0: Vec<f64>,
    #[arg(long, default_value = "20000")]
    pub transient: usize,
    #[arg(long, default_value = "8")]
    pub max_period: usize,
    /// Closeness |f^n(x) - x| that counts as periodic
    #[arg(long, default_value = "1e-13")]
    pub tol: f64,
    /// Use tolerance 1e-16 instead of --tol
    #[arg(long)]
    pub paper_exact: bool,
    /// Use the seeds 0.2, 0.499, 0.8 instead of --x0
    #[arg(long)]
    pub multi_seed: bool,
}

impl DetectArgs {
    pub fn options(&self) -> Result<PeriodOptions, CliError> {
        if !(self.tol > 0.0) {
            return Err(CliError::Usage(format!(
                "--tol must be > 0, got {}",
                self.tol
            )));
        }
        let mut opts = PeriodOptions {
            seeds: self.x0.clone(),
            transient: self.transient,
            max_period: self.max_period,
            tol: self.tol,
        };
        if self.paper_exact {
            opts = opts.strict();
        }
        if self.multi_seed {
            opts = opts.multi_seed();
        }
        Ok(opts)
    }
}

/// Evenly spaced grid with both endpoints.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        n => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

pub fn builtin() -> Registry {
    use Format::{Csv, Json};
    let mut r = Registry::new();
    r.register(Box::new(Op::new(
        "fixpoint",
        "Perturbed equilibrium and its local stability",
        Json,
        point::fixpoint,
    )))
    .register(Box::new(Op::new(
        "threshold",
        "Intensity a0 at which the equilibrium loses stability",
        Json,
        point::threshold,
    )))
    .register(Box::new(Op::new(
        "boundary",
        "Flip-bifurcation curves b1(a), b2(a)",
        Csv,
        point::boundary,
    )))
    .register(Box::new(Op::new(
        "astar",
        "Intensity beyond which no game has a stable equilibrium",
        Json,
        point::astar,
    )))
    .register(Box::new(Op::new(
        "regime",
        "Large-intensity regime: period2, chaos or boundary",
        Json,
        point::regime,
    )))
    .register(Box::new(Op::new(
        "orbit",
        "Trajectory x_n after a transient",
        Csv,
        point::orbit,
    )))
    .register(Box::new(Op::new(
        "period",
        "Attracting period after a transient",
        Json,
        point::period,
    )))
    .register(Box::new(Op::new(
        "certify-chaos",
        "Period-3 certificate and entropy bound",
        Json,
        point::certify_chaos,
    )))
    .register(Box::new(Op::new(
        "verify-trap",
        "Trapping intervals for the attracting 2-cycle",
        Json,
        point::verify_trap,
    )))
    .register(Box::new(Op::new(
        "lyapunov",
        "Lyapunov exponent estimate",
        Json,
        point::lyapunov,
    )))
    .register(Box::new(Op::new(
        "bifurcation",
        "Post-transient states over an intensity range",
        Csv,
        sweeps::bifurcation,
    )))
    .register(Box::new(Op::new(
        "period-diagram",
        "Attracting period over the (a, b) plane",
        Csv,
        sweeps::period_diagram,
    )))
    .register(Box::new(Op::new(
        "regime-map",
        "Regime labels over the (sigma, b) plane",
        Csv,
        sweeps::regime_map,
    )))
    .register(Box::new(Op::new(
        "cobweb",
        "Cobweb staircase segments",
        Csv,
        sweeps::cobweb,
    )))
    .register(Box::new(Op::new(
        "potential",
        "Game potential sampled on [0, 1]",
        Csv,
        sweeps::potential,
    )))
    .register(Box::new(Op::new(
        "verify",
        "Run the acceptance checks",
        Csv,
        verify::verify,
    )));
    r
}
