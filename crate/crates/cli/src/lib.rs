//! Command-line front end for `graph-purify`.

pub mod commands;
pub mod scenario;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use commands::{CliError, Output};
use scenario::{Range, Scenario, SizeRange};

#[derive(Debug, Parser)]
#[command(name = "graph-purify", version, about = "Recurrence purification of two-colorable graph states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Iterate the protocol from one family member and write the trace.
    Purify(RunArgs),
    /// One threshold or fixed-point value.
    Threshold(RunArgs),
    /// Thresholds or fixed points over a grid of sizes and p.
    Scan(RunArgs),
    /// Reachable fidelity against the bound from purified pairs over a p-grid.
    CompareBepp(RunArgs),
    /// Compare the coefficient maps with the dense simulator.
    OracleCheck(OracleArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// TOML scenario file; flags override its values.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Graph kind: ghz, path, ring or grid.
    #[arg(long)]
    pub graph: Option<String>,
    /// Number of qubits, or an inclusive range lo:hi.
    #[arg(long)]
    pub n: Option<SizeRange>,
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub cols: Option<usize>,
    /// Graph file ("n m" then one "u v" per edge).
    #[arg(long)]
    pub graph_file: Option<PathBuf>,
    /// rho-q, rho-x, rho-a or restricted-bitflip.
    #[arg(long)]
    pub family: Option<String>,
    /// Family parameter (q, x or F).
    #[arg(long)]
    pub param: Option<Range>,
    /// Gate-noise parameter: a value or lo:hi:step.
    #[arg(long, alias = "p-grid")]
    pub p: Option<Range>,
    /// Probability of misreading one measurement outcome.
    #[arg(long)]
    pub f_m: Option<f64>,
    /// Comma-separated protocol schedule, e.g. P1,P2.
    #[arg(long, value_delimiter = ',')]
    pub schedule: Option<Vec<String>>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_rounds: Option<usize>,
    /// fmin, fmax, qmin or pmin.
    #[arg(long)]
    pub quantity: Option<String>,
    /// Bisection tolerance.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also save the merged scenario as TOML.
    #[arg(long)]
    pub save_scenario: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random states per graph.
    #[arg(long, default_value_t = 50)]
    pub states: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl RunArgs {
    /// Scenario from the file (if any) with every given flag applied on top.
    pub fn scenario(&self) -> Result<Scenario, CliError> {
        let mut s = match &self.scenario {
            Some(path) => Scenario::load(path)?,
            None => Scenario::default(),
        };
        let g = &mut s.graph;
        if let Some(kind) = &self.graph {
            g.kind = Some(kind.to_ascii_lowercase());
            g.file = None;
        }
        if self.graph_file.is_some() {
            g.file = self.graph_file.clone();
        }
        macro_rules! set {
            ($($dst:expr => $src:expr),* $(,)?) => { $( if let Some(v) = $src.clone() { $dst = v.into(); } )* };
        }
        set!(
            g.n => self.n.map(Some),
            g.rows => self.rows.map(Some),
            g.cols => self.cols.map(Some),
            s.family => self.family.clone().map(Some),
            s.param => self.param.map(Some),
            s.p => self.p,
            s.f_m => self.f_m,
            s.schedule => self.schedule,
            s.stop.epsilon => self.epsilon,
            s.stop.tol => self.tol,
            s.stop.max_rounds => self.max_rounds,
            s.quantity => self.quantity.clone().map(Some),
            s.tolerance => self.tolerance.map(Some),
            s.seed => self.seed,
            s.out => self.out.clone().map(Some),
        );
        s.validate()?;
        Ok(s)
    }
}

fn emit(out: Option<&PathBuf>, output: Output) -> Result<(), CliError> {
    if let Some(summary) = &output.summary {
        eprintln!("{summary}");
    }
    match out {
        Some(path) => std::fs::write(path, output.csv).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{}", output.csv);
            Ok(())
        }
    }
}

type Runner = fn(&Scenario) -> Result<Output, CliError>;

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let (args, run): (RunArgs, Runner) = match cli.command {
        Command::OracleCheck(a) => return emit(a.out.as_ref(), commands::oracle_check(a.seed, a.states)?),
        Command::Purify(a) => (a, commands::purify),
        Command::Threshold(a) => (a, commands::threshold),
        Command::Scan(a) => (a, commands::scan),
        Command::CompareBepp(a) => (a, commands::compare_bepp),
    };
    let s = args.scenario()?;
    if let Some(path) = &args.save_scenario {
        std::fs::write(path, s.to_toml()).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    emit(s.out.as_ref(), run(&s)?)
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit status.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
