//! Analyses are trait objects registered by subcommand name; the dispatcher
//! builds the command line from whatever is registered.

use std::marker::PhantomData;

use clap::{Arg, ArgAction, ArgMatches, Args, Command, FromArgMatches};

use crate::error::CliError;
use crate::output::{Format, Header, Report};

/// Settings that shape how an analysis runs but not what it computes.
#[derive(Debug, Clone, Copy, Default)]
pub struct Context {
    pub threads: Option<usize>,
}

pub trait Analysis: Send + Sync {
    fn name(&self) -> &'static str;
    fn about(&self) -> &'static str;
    fn default_format(&self) -> Format;
    /// Add this analysis' own flags to its subcommand.
    fn augment(&self, cmd: Command) -> Command;
    fn run(&self, matches: &ArgMatches, ctx: &Context) -> Result<Report, CliError>;
}

/// Adapter turning a clap `Args` struct and a function into an [`Analysis`].
pub struct Op<A> {
    name: &'static str,
    about: &'static str,
    format: Format,
    run: fn(A, &Context) -> Result<Report, CliError>,
    _args: PhantomData<fn() -> A>,
}

impl<A> Op<A> {
    pub fn new(
        name: &'static str,
        about: &'static str,
        format: Format,
        run: fn(A, &Context) -> Result<Report, CliError>,
    ) -> Self {
        Op {
            name,
            about,
            format,
            run,
            _args: PhantomData,
        }
    }
}

impl<A: Args + FromArgMatches + 'static> Analysis for Op<A> {
    fn name(&self) -> &'static str {
        self.name
    }

    fn about(&self) -> &'static str {
        self.about
    }

    fn default_format(&self) -> Format {
        self.format
    }

    fn augment(&self, cmd: Command) -> Command {
        A::augment_args(cmd)
    }

    fn run(&self, matches: &ArgMatches, ctx: &Context) -> Result<Report, CliError> {
        let args = A::from_arg_matches(matches).map_err(|e| CliError::Usage(e.to_string()))?;
        (self.run)(args, ctx)
    }
}

/// Flags every subcommand accepts; only `format` is echoed into headers.
const OUT: &str = "out";
const FORMAT: &str = "format";
const THREADS: &str = "threads";
const NOT_ECHOED: [&str; 4] = ["help", OUT, THREADS, "version"];

#[derive(Default)]
pub struct Registry {
    entries: Vec<Box<dyn Analysis>>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Register an analysis. Names must be unique.
    pub fn register(&mut self, analysis: Box<dyn Analysis>) -> &mut Self {
        assert!(
            self.get(analysis.name()).is_none(),
            "analysis {} registered twice",
            analysis.name()
        );
        self.entries.push(analysis);
        self
    }

    pub fn get(&self, name: &str) -> Option<&dyn Analysis> {
        self.entries
            .iter()
            .find(|a| a.name() == name)
            .map(|a| a.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.iter().map(|a| a.name())
    }

    fn subcommand(analysis: &dyn Analysis) -> Command {
        let cmd = Command::new(analysis.name()).about(analysis.about());
        analysis
            .augment(cmd)
            .arg(
                Arg::new(FORMAT)
                    .long(FORMAT)
                    .value_parser(clap::value_parser!(Format))
                    .default_value(analysis.default_format().as_str())
                    .help("Output format"),
            )
            .arg(
                Arg::new(OUT)
                    .long(OUT)
                    .value_name("PATH")
                    .help("Write to a file instead of standard output"),
            )
            .arg(
                Arg::new(THREADS)
                    .long(THREADS)
                    .value_parser(clap::value_parser!(u64).range(1..))
                    .help("Worker threads for sweeps [default: all cores]"),
            )
    }

    pub fn command(&self) -> Command {
        let mut root = Command::new("ewa")
            .version(env!("CARGO_PKG_VERSION"))
            .about("Discounted EWA learning dynamics in two-resource congestion games")
            .subcommand_required(true)
            .arg_required_else_help(true);
        for entry in &self.entries {
            root = root.subcommand(Self::subcommand(entry.as_ref()));
        }
        root
    }

    /// Execute the parsed subcommand and return its report with the header
    /// describing the run.
    pub fn dispatch(&self, name: &str, matches: &ArgMatches) -> Result<Dispatched, CliError> {
        let analysis = self
            .get(name)
            .ok_or_else(|| CliError::Usage(format!("unknown analysis {name}")))?;
        let ctx = Context {
            threads: matches.get_one::<u64>(THREADS).map(|&n| n as usize),
        };
        let header = Header {
            command: name.to_string(),
            flags: echoed_flags(&Self::subcommand(analysis), matches),
        };
        let report = analysis.run(matches, &ctx)?;
        Ok(Dispatched {
            header,
            report,
            format: *matches
                .get_one::<Format>(FORMAT)
                .expect("format has a default"),
            out: matches.get_one::<String>(OUT).cloned(),
        })
    }
}

pub struct Dispatched {
    pub header: Header,
    pub report: Report,
    pub format: Format,
    pub out: Option<String>,
}

/// Effective flag values, defaults included, in declaration order.
fn echoed_flags(cmd: &Command, matches: &ArgMatches) -> Vec<(String, Option<String>)> {
    let mut flags = Vec::new();
    for arg in cmd.get_arguments() {
        let id = arg.get_id().as_str();
        let Some(long) = arg.get_long() else { continue };
        if NOT_ECHOED.contains(&id) {
            continue;
        }
        match arg.get_action() {
            ArgAction::SetTrue => {
                if matches.get_flag(id) {
                    flags.push((long.to_string(), None));
                }
            }
            _ => {
                if let Some(raw) = matches.get_raw(id) {
                    let joined: Vec<String> =
                        raw.map(|v| v.to_string_lossy().into_owned()).collect();
                    flags.push((long.to_string(), Some(joined.join(","))));
                }
            }
        }
    }
    flags
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::output::Table;

    #[derive(Args, Debug)]
    struct Demo {
        #[arg(long, default_value = "1.5")]
        width: f64,
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<f64>,
        #[arg(long)]
        fast: bool,
    }

    fn demo(args: Demo, _: &Context) -> Result<Report, CliError> {
        let mut t = Table::new(&["width"]);
        t.push(vec![args.width.into()]);
        Ok(Report::table(t))
    }

    fn registry() -> Registry {
        let mut r = Registry::new();
        r.register(Box::new(Op::new(
            "demo",
            "demo analysis",
            Format::Csv,
            demo,
        )));
        r
    }

    #[test]
    fn lookup_by_name() {
        let r = registry();
        assert_eq!(r.names().collect::<Vec<_>>(), ["demo"]);
        assert!(r.get("demo").is_some() && r.get("other").is_none());
    }

    #[test]
    #[should_panic(expected = "registered twice")]
    fn duplicate_names_rejected() {
        let mut r = registry();
        r.register(Box::new(Op::new("demo", "again", Format::Json, demo)));
    }

    #[test]
    fn header_echoes_defaults_lists_and_switches() {
        let r = registry();
        let m = r
            .command()
            .try_get_matches_from([
                "ewa",
                "demo",
                "--seeds",
                "0.2,0.8",
                "--fast",
                "--threads",
                "3",
            ])
            .unwrap();
        let (name, sub) = m.subcommand().unwrap();
        let d = r.dispatch(name, sub).unwrap();
        let expected: Vec<(String, Option<String>)> = vec![
            ("width".into(), Some("1.5".into())),
            ("seeds".into(), Some("0.2,0.8".into())),
            ("fast".into(), None),
            ("format".into(), Some("csv".into())),
        ];
        assert_eq!(d.header.flags, expected);
        assert_eq!(d.format, Format::Csv);
    }
}
