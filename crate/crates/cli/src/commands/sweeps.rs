use clap::Args;
use ewa_core::sweep::{
    bifurcation_diagram, cobweb_trace, period_diagram as sweep_periods, potential_curve,
    regime_map as sweep_regimes, BifurcationSpec, PeriodDiagramSpec,
};
use ewa_core::Params;

use super::{DetectArgs, GameArgs};
use crate::error::CliError;
use crate::output::{Report, Table};
use crate::registry::Context;

#[derive(Args, Debug)]
pub struct BifurcationArgs {
    #[arg(long, default_value = "0.4")]
    b: f64,
    #[arg(long, default_value = "0")]
    sigma: f64,
    #[arg(long, default_value = "1")]
    a_min: f64,
    #[arg(long, default_value = "60")]
    a_max: f64,
    #[arg(long, default_value = "500")]
    a_steps: usize,
    /// States kept per intensity after the transient
    #[arg(long, default_value = "100")]
    samples: usize,
    #[arg(long, default_value = "0.2")]
    x0: f64,
    #[arg(long, default_value = "20000")]
    transient: usize,
}

pub fn bifurcation(args: BifurcationArgs, ctx: &Context) -> Result<Report, CliError> {
    let spec = BifurcationSpec {
        b: args.b,
        sigma: args.sigma,
        a_min: args.a_min,
        a_max: args.a_max,
        a_steps: args.a_steps,
        samples_per_a: args.samples,
        x0: args.x0,
        transient: args.transient,
    };
    let grid = bifurcation_diagram(&spec, ctx.threads)?;
    let mut t = Table::new(&["a", "x"]);
    for cell in &grid.cells {
        for &x in &cell.payload {
            t.push(vec![cell.coords[0].into(), x.into()]);
        }
    }
    Ok(Report::table(t))
}

#[derive(Args, Debug)]
pub struct PeriodDiagramArgs {
    #[arg(long, default_value = "0.25")]
    sigma: f64,
    #[arg(long, default_value = "4")]
    a_min: f64,
    #[arg(long, default_value = "54")]
    a_max: f64,
    #[arg(long, default_value = "0")]
    b_min: f64,
    #[arg(long, default_value = "1")]
    b_max: f64,
    #[arg(long, default_value = "200")]
    a_steps: usize,
    #[arg(long, default_value = "200")]
    b_steps: usize,
    #[command(flatten)]
    detect: DetectArgs,
}

pub const PERIOD_LEGEND: &str =
    "legend: period 1..8 = attracting period, 0 = none up to 8, -1 = invalid b";

pub fn period_diagram(args: PeriodDiagramArgs, ctx: &Context) -> Result<Report, CliError> {
    let spec = PeriodDiagramSpec {
        sigma: args.sigma,
        a_min: args.a_min,
        a_max: args.a_max,
        b_min: args.b_min,
        b_max: args.b_max,
        a_steps: args.a_steps,
        b_steps: args.b_steps,
        options: args.detect.options()?,
    };
    let grid = sweep_periods(&spec, ctx.threads)?;
    let mut t = Table::new(&["a", "b", "period"]);
    for cell in &grid.cells {
        t.push(vec![
            cell.coords[0].into(),
            cell.coords[1].into(),
            cell.payload.code().into(),
        ]);
    }
    Ok(Report::table(t)
        .note(PERIOD_LEGEND)
        .note("grid: cell centres"))
}

#[derive(Args, Debug)]
pub struct RegimeMapArgs {
    /// Points on [0, 1], both ends included
    #[arg(long, default_value = "101")]
    sigma_steps: usize,
    /// Cell centres on (0, 1)
    #[arg(long, default_value = "200")]
    b_steps: usize,
}

pub fn regime_map(args: RegimeMapArgs, ctx: &Context) -> Result<Report, CliError> {
    let grid = sweep_regimes(args.sigma_steps, args.b_steps, ctx.threads)?;
    let mut t = Table::new(&["sigma", "b", "regime"]);
    for cell in &grid.cells {
        t.push(vec![
            cell.coords[0].into(),
            cell.coords[1].into(),
            cell.payload.to_string().as_str().into(),
        ]);
    }
    Ok(Report::table(t))
}

#[derive(Args, Debug)]
pub struct CobwebArgs {
    #[command(flatten)]
    game: GameArgs,
    #[arg(long, default_value = "0.2")]
    x0: f64,
    #[arg(long, default_value = "50")]
    steps: usize,
}

/// Each segment contributes its start and end point under the same index.
pub fn cobweb(args: CobwebArgs, _: &Context) -> Result<Report, CliError> {
    let trace = cobweb_trace(&args.game.params()?, args.x0, args.steps)?;
    let mut t = Table::new(&["segment_index", "x", "y"]);
    for (i, seg) in trace.segments.iter().enumerate() {
        t.push(vec![i.into(), seg.from.0.into(), seg.from.1.into()]);
        t.push(vec![i.into(), seg.to.0.into(), seg.to.1.into()]);
    }
    Ok(Report::table(t))
}

#[derive(Args, Debug)]
pub struct PotentialArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long, default_value = "1000")]
    samples: usize,
}

pub fn potential(args: PotentialArgs, _: &Context) -> Result<Report, CliError> {
    // The potential does not depend on the discount factor.
    let p = Params::new(args.a, args.b, 0.0)?;
    let mut t = Table::new(&["x", "phi"]);
    for (x, phi) in potential_curve(&p, args.samples) {
        t.push(vec![x.into(), phi.into()]);
    }
    Ok(Report::table(t))
}
