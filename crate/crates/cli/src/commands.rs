use std::fmt;
use std::sync::Arc;

use graph_purify::analysis::{
    bepp_bound, f_max, f_min_search, family_fixed_point, p_min_search, q_min_search, Family, Quantity,
    SearchOptions, ThresholdReport,
};
use graph_purify::oracle::equivalence_suite;
use graph_purify::{fmt_f64, iterate, Error, Graph};
use rayon::prelude::*;

use crate::scenario::{GraphCell, ParseError, Scenario};

/// Largest oracle deviation tolerated by `oracle-check`.
pub const ORACLE_TOL: f64 = 1e-10;

pub const THRESHOLD_HEADER: &str = "graph_kind,N,family,p,quantity,value,tolerance,rounds_used";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical { cell: String, source: Error },
    OracleMismatch(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical { .. } => 3,
            CliError::OracleMismatch(_) => 4,
            CliError::Io(_) => 1,
        }
    }

    fn in_cell(cell: String, source: Error) -> Self {
        match source {
            Error::BracketError { .. }
            | Error::ZeroSuccess(_)
            | Error::NoFixedPoint(_)
            | Error::EmptyRegion(_)
            | Error::NegativeCoefficient { .. } => CliError::Numerical { cell, source },
            other => CliError::Usage(format!("{cell}: {other}")),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::OracleMismatch(m) | CliError::Io(m) => f.write_str(m),
            CliError::Numerical { cell, source } => write!(f, "numerical failure at {cell}: {source}"),
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Usage(e.0)
    }
}

/// First line of every CSV we write.
pub fn version_stamp() -> String {
    format!("# graph-purify {}\n", env!("CARGO_PKG_VERSION"))
}

fn single_graph(s: &Scenario) -> Result<GraphCell, CliError> {
    let mut cells = s.graph.cells()?;
    if cells.len() != 1 {
        return Err(CliError::Usage("this command takes a single graph; give --n as one number".into()));
    }
    Ok(cells.remove(0))
}

fn single_p(s: &Scenario) -> Result<f64, CliError> {
    if s.p.lo != s.p.hi {
        return Err(CliError::Usage("this command takes a single --p".into()));
    }
    Ok(s.p.lo)
}

fn cell_label(cell: &GraphCell, family: Option<Family>, p: Option<f64>, quantity: Option<Quantity>) -> String {
    let mut label = format!("graph={} N={}", cell.kind, cell.graph.n());
    if let Some(f) = family {
        label.push_str(&format!(" family={f}"));
    }
    if let Some(p) = p {
        label.push_str(&format!(" p={p}"));
    }
    if let Some(q) = quantity {
        label.push_str(&format!(" quantity={q}"));
    }
    label
}

/// Output of a successful command: CSV for `--out` or stdout, plus a
/// one-line summary for stderr.
pub struct Output {
    pub csv: String,
    pub summary: Option<String>,
}

pub fn purify(s: &Scenario) -> Result<Output, CliError> {
    s.validate()?;
    let cell = single_graph(s)?;
    let p = single_p(s)?;
    let family = s.family()?.unwrap_or(Family::RhoQ);
    let param = match s.param {
        Some(r) if r.lo == r.hi => r.lo,
        Some(_) => return Err(CliError::Usage("purify takes a single --param".into())),
        None => return Err(CliError::Usage("purify needs --param".into())),
    };
    let label = cell_label(&cell, Some(family), Some(p), None);
    let state = family.member(&cell.graph, param).map_err(|e| CliError::in_cell(label.clone(), e))?;
    let cfg = family.step_config(p, s.f_m);
    let trace = iterate(&state, &s.protocols()?, &cfg, &s.stop.into()).map_err(|e| CliError::in_cell(label, e))?;
    let summary = format!(
        "verdict={} rounds={} F_initial={} F_final={} expected_cost={}",
        trace.verdict,
        trace.rounds.len(),
        fmt_f64(trace.initial_fidelity),
        fmt_f64(trace.final_fidelity()),
        fmt_f64(trace.expected_cost)
    );
    Ok(Output { csv: version_stamp() + &trace.to_csv(), summary: Some(summary) })
}

fn search_options(s: &Scenario) -> SearchOptions {
    let mut opts = SearchOptions::default().with_meas_flip(s.f_m);
    opts.tolerance = s.tolerance;
    opts
}

fn row(cell: &GraphCell, family: Family, p: Option<f64>, quantity: Quantity, value: Option<f64>, tol: f64, rounds: usize) -> String {
    format!(
        "{},{},{},{},{},{},{},{}\n",
        cell.kind,
        cell.graph.n(),
        family,
        p.map(fmt_f64).unwrap_or_default(),
        quantity,
        value.map(fmt_f64).unwrap_or_default(),
        fmt_f64(tol),
        rounds
    )
}

fn report_row(cell: &GraphCell, r: &ThresholdReport) -> String {
    row(cell, r.family, r.p, r.quantity, Some(r.reported()), r.tolerance, r.rounds_used)
}

/// One threshold or fixed-point computation for a single grid cell.
fn threshold_cell(
    cell: &GraphCell,
    family: Family,
    quantity: Quantity,
    p: f64,
    opts: &SearchOptions,
) -> graph_purify::Result<String> {
    let g: &Arc<Graph> = &cell.graph;
    Ok(match quantity {
        Quantity::FMin => report_row(cell, &f_min_search(g, family, p, opts)?),
        Quantity::QMin => report_row(cell, &q_min_search(g, p, opts)?),
        Quantity::PMin => report_row(cell, &p_min_search(g, family, opts)?),
        Quantity::FMax => {
            let (f, rounds) = family_fixed_point(g, family, p, opts)?;
            row(cell, family, Some(p), quantity, Some(f), opts.fixed_point_stop.tol, rounds)
        }
    })
}

fn quantity_and_family(s: &Scenario) -> Result<(Quantity, Family), CliError> {
    let quantity = s.quantity()?.ok_or_else(|| CliError::Usage("--quantity is required".into()))?;
    let family = match (quantity, s.family()?) {
        (Quantity::QMin, Some(f)) if f != Family::RhoQ => {
            return Err(CliError::Usage("q_min is defined for the RHO_Q family only".into()))
        }
        (Quantity::QMin, _) => Family::RhoQ,
        (_, Some(f)) => f,
        (_, None) => Family::RhoQ,
    };
    Ok((quantity, family))
}

pub fn threshold(s: &Scenario) -> Result<Output, CliError> {
    s.validate()?;
    let cell = single_graph(s)?;
    let (quantity, family) = quantity_and_family(s)?;
    let p = if quantity == Quantity::PMin { f64::NAN } else { single_p(s)? };
    let label = cell_label(&cell, Some(family), (quantity != Quantity::PMin).then_some(p), Some(quantity));
    let line = threshold_cell(&cell, family, quantity, p, &search_options(s)).map_err(|e| CliError::in_cell(label, e))?;
    Ok(Output { csv: format!("{}{THRESHOLD_HEADER}\n{line}", version_stamp()), summary: None })
}

/// Grid of threshold computations over graph sizes and `p`, computed in
/// parallel and written in grid order. Cells without a nontrivial fixed
/// point get an empty value.
pub fn scan(s: &Scenario) -> Result<Output, CliError> {
    s.validate()?;
    let graphs = s.graph.cells()?;
    let (quantity, family) = quantity_and_family(s)?;
    let ps = if quantity == Quantity::PMin { vec![f64::NAN] } else { s.p.points() };
    let opts = search_options(s);
    let cells: Vec<(&GraphCell, f64)> = graphs.iter().flat_map(|g| ps.iter().map(move |&p| (g, p))).collect();
    let rows: Vec<Result<String, CliError>> = cells
        .par_iter()
        .map(|&(cell, p)| match threshold_cell(cell, family, quantity, p, &opts) {
            Ok(line) => Ok(line),
            Err(Error::NoFixedPoint(_)) => Ok(row(cell, family, Some(p), quantity, None, 0.0, 0)),
            Err(e) => {
                let p = (quantity != Quantity::PMin).then_some(p);
                Err(CliError::in_cell(cell_label(cell, Some(family), p, Some(quantity)), e))
            }
        })
        .collect();
    let mut csv = format!("{}{THRESHOLD_HEADER}\n", version_stamp());
    for r in rows {
        csv.push_str(&r?);
    }
    Ok(Output { csv, summary: None })
}

pub fn compare_bepp(s: &Scenario) -> Result<Output, CliError> {
    s.validate()?;
    let cell = single_graph(s)?;
    let mut csv = format!("{}p,f_max,bepp_bound,gap\n", version_stamp());
    for p in s.p.points() {
        let label = cell_label(&cell, None, Some(p), None);
        let mepp = f_max(&cell.graph, p, s.f_m).map_err(|e| CliError::in_cell(label.clone(), e))?;
        let bepp = bepp_bound(&cell.graph, p).map_err(|e| CliError::in_cell(label, e))?;
        csv.push_str(&format!("{},{},{},{}\n", fmt_f64(p), fmt_f64(mepp), fmt_f64(bepp), fmt_f64(mepp - bepp)));
    }
    Ok(Output { csv, summary: None })
}

pub fn oracle_check(seed: u64, states: usize) -> Result<Output, CliError> {
    let rep = equivalence_suite(seed, states, &[1.0, 0.95, 0.9], &[0.0, 0.02])
        .map_err(|e| CliError::in_cell(format!("oracle suite seed={seed}"), e))?;
    let mut csv = format!("{}check,max_error\n", version_stamp());
    for (name, v) in [
        ("step_coefficients", rep.step_coeff_err),
        ("step_p_succ", rep.step_psucc_err),
        ("channels", rep.channel_err),
        ("basis_permutation", rep.permutation_err),
    ] {
        csv.push_str(&format!("{name},{}\n", fmt_f64(v)));
    }
    let summary = format!("{} step cases, max error {:e}", rep.cases, rep.max_error());
    if rep.max_error() > ORACLE_TOL {
        return Err(CliError::OracleMismatch(format!("oracle mismatch: {summary} exceeds {ORACLE_TOL:e}\n{csv}")));
    }
    Ok(Output { csv, summary: Some(summary) })
}
