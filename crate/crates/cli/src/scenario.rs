//! Run descriptions: read from a TOML file, overridden by flags, validated
//! once before any computation starts.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use graph_purify::analysis::{Family, Quantity};
use graph_purify::{Graph, Protocol, StandardGraph, StopCriteria};
use serde::{Deserialize, Serialize};

/// A rejected scenario, naming the flag, key or file line at fault.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError(pub String);

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError(msg.into()))
}

/// Closed interval with an optional step, written `lo`, `lo:hi` or
/// `lo:hi:step` on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
}

impl Range {
    pub fn single(x: f64) -> Self {
        Range { lo: x, hi: x, step: None }
    }

    /// Grid points from `lo` to `hi`; a missing step yields both ends.
    pub fn points(&self) -> Vec<f64> {
        match self.step {
            None if self.lo == self.hi => vec![self.lo],
            None => vec![self.lo, self.hi],
            Some(step) => {
                let count = ((self.hi - self.lo) / step + 1e-9).floor() as usize;
                (0..=count).map(|i| self.lo + step * i as f64).collect()
            }
        }
    }

    fn check(&self, name: &str, lo: f64, hi: f64) -> Result<(), ParseError> {
        if self.lo.is_nan() || self.hi.is_nan() || self.lo > self.hi {
            return err(format!("{name}: empty range {}..{}", self.lo, self.hi));
        }
        if self.lo < lo || self.hi > hi {
            return err(format!("{name}: {}..{} outside [{lo}, {hi}]", self.lo, self.hi));
        }
        if let Some(step) = self.step {
            if step.is_nan() || step <= 0.0 {
                return err(format!("{name}: step must be positive, got {step}"));
            }
        }
        Ok(())
    }
}

impl FromStr for Range {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let parts = s
            .split(':')
            .map(|x| x.trim().parse::<f64>().map_err(|_| ParseError(format!("bad number {x:?} in range {s:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        match parts[..] {
            [x] => Ok(Range::single(x)),
            [lo, hi] => Ok(Range { lo, hi, step: None }),
            [lo, hi, step] => Ok(Range { lo, hi, step: Some(step) }),
            _ => err(format!("range {s:?} must be lo, lo:hi or lo:hi:step")),
        }
    }
}

/// Inclusive integer range for qubit counts, written `n` or `lo:hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeRange {
    pub lo: usize,
    pub hi: usize,
}

impl FromStr for SizeRange {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let parse = |x: &str| x.trim().parse::<usize>().map_err(|_| ParseError(format!("bad size {x:?}")));
        match s.split_once(':') {
            None => {
                let n = parse(s)?;
                Ok(SizeRange { lo: n, hi: n })
            }
            Some((a, b)) => Ok(SizeRange { lo: parse(a)?, hi: parse(b)? }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GraphSpec {
    /// `ghz`, `path`, `ring` or `grid`; ignored when `file` is set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<SizeRange>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

/// A graph to run on, with the labels used in CSV output.
#[derive(Debug, Clone)]
pub struct GraphCell {
    pub kind: String,
    pub graph: Arc<Graph>,
}

impl GraphSpec {
    pub fn standard(kind: &str, n: usize, rows: Option<usize>, cols: Option<usize>) -> Result<StandardGraph, ParseError> {
        Ok(match kind {
            "ghz" => StandardGraph::Ghz(n),
            "path" | "linear" => StandardGraph::LinearCluster(n),
            "ring" | "closed" => StandardGraph::ClosedCluster(n),
            "grid" => {
                let (rows, cols) = match (rows, cols) {
                    (Some(r), Some(c)) => (r, c),
                    (Some(r), None) if r > 0 && n.is_multiple_of(r) => (r, n / r),
                    _ => return err("--graph grid needs --rows and --cols"),
                };
                StandardGraph::GridCluster { rows, cols }
            }
            other => return err(format!("--graph: unknown kind {other:?} (ghz, path, ring, grid)")),
        })
    }

    /// Every graph this spec describes, in increasing size.
    pub fn cells(&self) -> Result<Vec<GraphCell>, ParseError> {
        if let Some(path) = &self.file {
            return Ok(vec![GraphCell { kind: "file".into(), graph: Arc::new(load_graph(path)?) }]);
        }
        let Some(kind) = &self.kind else { return err("no graph given: use --graph or --graph-file") };
        let sizes = match (self.n, self.rows, self.cols) {
            (Some(n), _, _) => n,
            (None, Some(r), Some(c)) => SizeRange { lo: r * c, hi: r * c },
            _ => return err("--n is required"),
        };
        if sizes.lo > sizes.hi {
            return err(format!("--n: empty range {}:{}", sizes.lo, sizes.hi));
        }
        (sizes.lo..=sizes.hi)
            .map(|n| {
                let std = GraphSpec::standard(kind, n, self.rows, self.cols)?;
                let graph = Graph::standard(std).map_err(|e| ParseError(format!("--graph {kind} --n {n}: {e}")))?;
                Ok(GraphCell { kind: std.kind_name().to_string(), graph: Arc::new(graph) })
            })
            .collect()
    }
}

pub fn load_graph(path: &Path) -> Result<Graph, ParseError> {
    let text = std::fs::read_to_string(path).map_err(|e| ParseError(format!("{}: {e}", path.display())))?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Graph::from_text(&text).map(|g| g.with_name(name)).map_err(|e| ParseError(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopSpec {
    pub epsilon: f64,
    pub tol: f64,
    pub max_rounds: usize,
}

impl Default for StopSpec {
    fn default() -> Self {
        let d = StopCriteria::default();
        StopSpec { epsilon: d.epsilon, tol: d.tol, max_rounds: d.max_rounds }
    }
}

impl From<StopSpec> for StopCriteria {
    fn from(s: StopSpec) -> Self {
        StopCriteria { epsilon: s.epsilon, tol: s.tol, max_rounds: s.max_rounds }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(default)]
    pub graph: GraphSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    /// Family parameter (q, x or F).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<Range>,
    #[serde(default = "unit_range")]
    pub p: Range,
    #[serde(default)]
    pub f_m: f64,
    #[serde(default = "alternating")]
    pub schedule: Vec<String>,
    #[serde(default)]
    pub stop: StopSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantity: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

fn unit_range() -> Range {
    Range::single(1.0)
}

fn alternating() -> Vec<String> {
    vec!["P1".into(), "P2".into()]
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            graph: GraphSpec::default(),
            family: None,
            param: None,
            p: unit_range(),
            f_m: 0.0,
            schedule: alternating(),
            stop: StopSpec::default(),
            quantity: None,
            tolerance: None,
            seed: 0,
            out: None,
        }
    }
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self, ParseError> {
        toml::from_str(text).map_err(|e| ParseError(format!("scenario: {e}")))
    }

    /// TOML text of a validated scenario.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("validated scenarios are representable")
    }

    pub fn load(path: &Path) -> Result<Self, ParseError> {
        let text = std::fs::read_to_string(path).map_err(|e| ParseError(format!("{}: {e}", path.display())))?;
        Scenario::from_toml(&text).map_err(|e| ParseError(format!("{}: {}", path.display(), e.0)))
    }

    pub fn family(&self) -> Result<Option<Family>, ParseError> {
        self.family
            .as_deref()
            .map(|f| f.parse::<Family>().map_err(|e| ParseError(format!("--family: {e}"))))
            .transpose()
    }

    pub fn quantity(&self) -> Result<Option<Quantity>, ParseError> {
        self.quantity.as_deref().map(parse_quantity).transpose()
    }

    pub fn protocols(&self) -> Result<Vec<Protocol>, ParseError> {
        if self.schedule.is_empty() {
            return err("--schedule: empty");
        }
        self.schedule
            .iter()
            .map(|s| s.parse::<Protocol>().map_err(|e| ParseError(format!("--schedule: {e}"))))
            .collect()
    }

    /// Checks every field against its domain.
    pub fn validate(&self) -> Result<(), ParseError> {
        self.p.check("--p", 0.0, 1.0)?;
        if self.p.lo <= 0.0 {
            return err("--p: must be positive");
        }
        if !(0.0..=0.5).contains(&self.f_m) {
            return err(format!("--f-m: {} outside [0, 0.5]", self.f_m));
        }
        if let Some(param) = &self.param {
            param.check("--param", 0.0, 1.0)?;
        }
        if let Some(t) = self.tolerance {
            if t.is_nan() || t <= 0.0 {
                return err(format!("--tolerance: must be positive, got {t}"));
            }
        }
        if self.stop.tol.is_nan() || self.stop.tol < 0.0 || self.stop.epsilon.is_nan() || self.stop.epsilon >= 1.0 || self.stop.max_rounds == 0 {
            return err("stop criteria: need tol >= 0, epsilon < 1 and max_rounds > 0");
        }
        if self.seed > i64::MAX as u64 {
            return err(format!("--seed: {} does not fit in a TOML integer", self.seed));
        }
        self.family()?;
        self.quantity()?;
        self.protocols()?;
        Ok(())
    }
}

pub fn parse_quantity(s: &str) -> Result<Quantity, ParseError> {
    match s.to_ascii_lowercase().replace('_', "").as_str() {
        "fmin" => Ok(Quantity::FMin),
        "fmax" => Ok(Quantity::FMax),
        "qmin" => Ok(Quantity::QMin),
        "pmin" => Ok(Quantity::PMin),
        _ => err(format!("--quantity: unknown {s:?} (fmin, fmax, qmin, pmin)")),
    }
}
