use clap::Args;
use ewa_core::equilibrium::solve_fixed_point;
use ewa_core::orbits::{
    certify_chaos as certify, chaos_passes, detect_period, iterate, lyapunov_estimate,
    smallest_passing_a, trap_passes, verify_period2_trap,
};
use ewa_core::stability::{
    boundary_point, classify, regime as regime_of, regime_interval, threshold_a0,
    universal_threshold_astar,
};
use serde_json::Value;

use super::{linspace, DetectArgs, GameArgs};
use crate::error::CliError;
use crate::output::{Report, Table};
use crate::registry::Context;

pub fn fixpoint(args: GameArgs, _: &Context) -> Result<Report, CliError> {
    let p = args.params()?;
    let eq = solve_fixed_point(&p);
    let st = classify(&p);
    Ok(Report::record(&eq)?
        .with("multiplier", st.multiplier)
        .with("class", serde_json::to_value(st.class)?))
}

#[derive(Args, Debug)]
pub struct SplitArgs {
    #[arg(long)]
    b: f64,
    #[arg(long, default_value = "0")]
    sigma: f64,
}

pub fn threshold(args: SplitArgs, _: &Context) -> Result<Report, CliError> {
    let a0 = threshold_a0(args.b, args.sigma)?;
    Report::record(&serde_json::json!({ "a0": a0 }))
}

pub fn regime(args: SplitArgs, _: &Context) -> Result<Report, CliError> {
    let label = regime_of(args.b, args.sigma)?;
    let (lo, hi) = regime_interval(args.sigma);
    Report::record(&serde_json::json!({
        "regime": label.to_string(),
        "period2_interval": [lo, hi],
    }))
}

#[derive(Args, Debug)]
pub struct BoundaryArgs {
    #[arg(long, default_value = "0")]
    sigma: f64,
    /// Must be at least 4(2 - sigma); the default is valid for every sigma
    #[arg(long, default_value = "8")]
    a_min: f64,
    #[arg(long, default_value = "54")]
    a_max: f64,
    #[arg(long, default_value = "200")]
    a_steps: usize,
}

pub fn boundary(args: BoundaryArgs, _: &Context) -> Result<Report, CliError> {
    if args.a_max < args.a_min {
        return Err(CliError::Usage("--a-max must not be below --a-min".into()));
    }
    let mut t = Table::new(&["a", "x1", "x2", "b1", "b2"]);
    for a in linspace(args.a_min, args.a_max, args.a_steps) {
        let bp = boundary_point(args.sigma, a)?;
        t.push(vec![
            bp.a.into(),
            bp.x1.into(),
            bp.x2.into(),
            bp.b1.into(),
            bp.b2.into(),
        ]);
    }
    Ok(Report::table(t))
}

#[derive(Args, Debug)]
pub struct SigmaArgs {
    #[arg(long)]
    sigma: f64,
}

pub fn astar(args: SigmaArgs, _: &Context) -> Result<Report, CliError> {
    let (value, status) = match universal_threshold_astar(args.sigma)? {
        None => (Value::Null, "none"),
        Some(a) if a.is_finite() => (Value::from(a), "finite"),
        Some(_) => (Value::Null, "beyond-double-range"),
    };
    Report::record(&serde_json::json!({ "a_star": value, "status": status }))
}

#[derive(Args, Debug)]
pub struct OrbitArgs {
    #[command(flatten)]
    game: GameArgs,
    #[arg(long, default_value = "0.2")]
    x0: f64,
    #[arg(long, default_value = "0")]
    transient: usize,
    #[arg(long, default_value = "1000")]
    samples: usize,
}

pub fn orbit(args: OrbitArgs, _: &Context) -> Result<Report, CliError> {
    let trace = iterate(&args.game.params()?, args.x0, args.transient, args.samples)?;
    let mut t = Table::new(&["n", "x"]);
    for (k, x) in trace.samples.iter().enumerate() {
        t.push(vec![(trace.transient + k).into(), (*x).into()]);
    }
    Ok(Report::table(t).note(format!("clamp events: {}", trace.clamp_events)))
}

#[derive(Args, Debug)]
pub struct PeriodArgs {
    #[command(flatten)]
    game: GameArgs,
    #[command(flatten)]
    detect: DetectArgs,
}

pub fn period(args: PeriodArgs, _: &Context) -> Result<Report, CliError> {
    let opts = args.detect.options()?;
    let report = detect_period(&args.game.params()?, &opts)?;
    Ok(Report::record(&report)?.with("tol", opts.tol))
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    #[command(flatten)]
    game: GameArgs,
    /// Also scan a from --a to this value for the smallest passing intensity
    #[arg(long, default_value = "1000")]
    scan_a_max: f64,
    /// Grid points of the scan; 0 disables it
    #[arg(long, default_value = "0")]
    scan_steps: usize,
}

impl CertifyArgs {
    fn scan(
        &self,
        passes: fn(&ewa_core::Params) -> ewa_core::Result<bool>,
    ) -> Result<Option<Value>, CliError> {
        if self.scan_steps == 0 {
            return Ok(None);
        }
        if self.scan_a_max <= self.game.a {
            return Err(CliError::Usage("--scan-a-max must exceed --a".into()));
        }
        let grid = linspace(self.game.a, self.scan_a_max, self.scan_steps);
        let found = smallest_passing_a(self.game.b, self.game.sigma, &grid, passes)?;
        Ok(Some(found.map_or(Value::Null, Value::from)))
    }
}

pub fn certify_chaos(args: CertifyArgs, _: &Context) -> Result<Report, CliError> {
    let cert = certify(&args.game.params()?)?;
    let mut report = Report::record(&cert)?;
    if let Some(a) = args.scan(chaos_passes)? {
        report = report.with("smallest_certified_a_on_grid", a);
    }
    Ok(report)
}

pub fn verify_trap(args: CertifyArgs, _: &Context) -> Result<Report, CliError> {
    let trap = verify_period2_trap(&args.game.params()?)?;
    let mut report = Report::record(&trap)?;
    if let Some(a) = args.scan(trap_passes)? {
        report = report.with("smallest_trapping_a_on_grid", a);
    }
    Ok(report)
}

#[derive(Args, Debug)]
pub struct LyapunovArgs {
    #[command(flatten)]
    game: GameArgs,
    #[arg(long, default_value = "0.2")]
    x0: f64,
    #[arg(long, default_value = "20000")]
    transient: usize,
    /// Number of averaged steps
    #[arg(long, default_value = "100000")]
    n: usize,
}

pub fn lyapunov(args: LyapunovArgs, _: &Context) -> Result<Report, CliError> {
    let est = lyapunov_estimate(&args.game.params()?, args.x0, args.transient, args.n)?;
    Report::record(&est)
}
