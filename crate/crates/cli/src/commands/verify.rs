use clap::Args;
use ewa_core::verify::{run_criterion, VerifyOptions, CRITERIA};

use crate::error::CliError;
use crate::output::{Report, Table};
use crate::registry::Context;

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Criteria to run, e.g. 1,3,7 [default: all]
    #[arg(long, value_delimiter = ',')]
    criteria: Vec<u8>,
    #[arg(long, default_value = "20190401")]
    seed: u64,
}

pub fn verify(args: VerifyArgs, ctx: &Context) -> Result<Report, CliError> {
    let ids: Vec<u8> = if args.criteria.is_empty() {
        CRITERIA.iter().map(|c| c.0).collect()
    } else {
        args.criteria
    };
    let opts = VerifyOptions {
        seed: args.seed,
        threads: ctx.threads,
    };
    let mut t = Table::new(&["id", "name", "result", "seconds", "detail"]);
    let mut success = true;
    for id in ids {
        let o = run_criterion(id, &opts)
            .ok_or_else(|| CliError::Usage(format!("no criterion {id}")))?;
        eprintln!("{o}");
        success &= o.passed;
        t.push(vec![
            (o.id as usize).into(),
            o.name.into(),
            if o.passed { "pass" } else { "fail" }.into(),
            o.seconds.into(),
            o.detail.as_str().into(),
        ]);
    }
    let mut report = Report::table(t);
    report.success = success;
    Ok(report)
}
