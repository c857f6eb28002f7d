//! Thresholds and fixed points of the iterated protocol.
//!
//! A state is called purifiable when iterating the noisy protocol from it
//! ends within `1e-6` of the fidelity reached from the pure target (the
//! p-dependent fixed point) and that fidelity exceeds the input fidelity.
//! Searches bisect a scalar family parameter on that predicate.

mod bipartite;

use std::cell::Cell;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub use bipartite::{bepp_bound, dejmps_fixed_point, dejmps_step, BellDiag};

use crate::error::{check_unit, Error, Result};
use crate::graph::{Graph, StandardGraph};
use crate::purify::{iterate, step, GateNoise, Protocol, StepConfig, StopCriteria, ALTERNATING};
use crate::state::GdState;

/// Distance to the fixed point accepted as "reached".
pub const REACH_TOL: f64 = 1e-6;
/// Default bisection tolerance on a family parameter.
pub const PARAM_TOL: f64 = 1e-6;
/// Default bisection tolerance on the gate-noise parameter.
pub const P_TOL: f64 = 1e-4;
pub const GRID_POINTS: usize = 64;
pub const MAX_BISECTIONS: usize = 53;
/// Range of the gate-noise parameter searched by [`p_min`].
pub const P_RANGE: (f64, f64) = (0.4, 1.0);

/// One-parameter input families. Fidelity increases with the parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Target with every qubit depolarized once, parameter `q`.
    RhoQ,
    /// Target mixed with white noise, parameter `x`.
    RhoX,
    /// Errors only on the A-part, parameter `F`.
    RhoA,
    /// `rho_A` with fidelity `x + (1 - x) / 2^{N_A}`, purified by P1 alone
    /// under bit-flip noise on the B-qubits.
    RestrictedBitflip,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::RhoQ, Family::RhoX, Family::RhoA, Family::RestrictedBitflip];

    pub fn name(self) -> &'static str {
        match self {
            Family::RhoQ => "RHO_Q",
            Family::RhoX => "RHO_X",
            Family::RhoA => "RHO_A",
            Family::RestrictedBitflip => "RESTRICTED_BITFLIP",
        }
    }

    pub fn parameter(self) -> &'static str {
        match self {
            Family::RhoQ => "q",
            Family::RhoA => "F",
            Family::RhoX | Family::RestrictedBitflip => "x",
        }
    }

    pub fn param_range(self) -> (f64, f64) {
        match self {
            Family::RhoQ => (0.5, 1.0),
            _ => (0.0, 1.0),
        }
    }

    pub fn member(self, g: &Arc<Graph>, param: f64) -> Result<GdState> {
        match self {
            Family::RhoQ => GdState::prepared_with_channel_noise(g.clone(), param),
            Family::RhoX => GdState::global_white(g.clone(), param),
            Family::RhoA => GdState::rho_a_family(g.clone(), param),
            Family::RestrictedBitflip => {
                check_unit("x", param)?;
                let floor = 1.0 / (1u64 << g.n_a()) as f64;
                GdState::rho_a_family(g.clone(), param + (1.0 - param) * floor)
            }
        }
    }

    /// Schedule used to purify members of the family. Inputs with errors on
    /// the A-part only are purified by P1 alone as long as nothing creates
    /// B-part errors.
    pub fn schedule(self, p: f64, meas_flip: f64) -> &'static [Protocol] {
        let clean = p == 1.0 && meas_flip == 0.0;
        match self {
            Family::RestrictedBitflip => &[Protocol::P1],
            Family::RhoA if clean => &[Protocol::P1],
            _ => &ALTERNATING,
        }
    }

    pub fn step_config(self, p: f64, meas_flip: f64) -> StepConfig {
        match self {
            Family::RestrictedBitflip => StepConfig {
                noise: if p == 1.0 { GateNoise::Perfect } else { GateNoise::BitflipB(p) },
                meas_flip,
                ..StepConfig::default()
            },
            _ => StepConfig::noisy(p, meas_flip),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_uppercase().replace('-', "_");
        Family::ALL
            .into_iter()
            .find(|f| f.name() == norm || (norm == "RESTRICTED" && *f == Family::RestrictedBitflip))
            .ok_or_else(|| Error::Parse(format!("unknown family '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    FMin,
    FMax,
    QMin,
    PMin,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::FMin => "F_min",
            Quantity::FMax => "F_max",
            Quantity::QMin => "q_min",
            Quantity::PMin => "p_min",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Knobs shared by the searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub meas_flip: f64,
    /// Bisection tolerance; `None` picks [`PARAM_TOL`] or [`P_TOL`].
    pub tolerance: Option<f64>,
    /// Iteration budget for every purifiability test.
    pub stop: StopCriteria,
    /// Iteration budget for locating the fixed point from the pure target.
    /// Its `epsilon` is ignored: the pure start must not count as converged.
    pub fixed_point_stop: StopCriteria,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            meas_flip: 0.0,
            tolerance: None,
            stop: StopCriteria { epsilon: 1e-6, tol: 1e-12, max_rounds: 5_000 },
            fixed_point_stop: StopCriteria { epsilon: 1e-6, tol: 1e-13, max_rounds: 100_000 },
        }
    }
}

impl SearchOptions {
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = Some(tol);
        self
    }

    pub fn with_meas_flip(mut self, f_m: f64) -> Self {
        self.meas_flip = f_m;
        self
    }
}

/// Result of a bisection search. `lo`, `hi` and `value` live in the searched
/// parameter; `fidelity` is the fidelity of the critical family member when
/// that is the quantity of interest.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdReport {
    pub graph: String,
    pub family: Family,
    pub quantity: Quantity,
    pub parameter: &'static str,
    /// Gate-noise parameter the search ran at, if it was fixed.
    pub p: Option<f64>,
    pub lo: f64,
    pub hi: f64,
    pub value: f64,
    pub fidelity: Option<f64>,
    pub tolerance: f64,
    /// Protocol steps executed over the whole search.
    pub rounds_used: usize,
}

impl ThresholdReport {
    /// The number the search is about: the critical fidelity for `F_min`,
    /// otherwise the parameter itself.
    pub fn reported(&self) -> f64 {
        self.fidelity.unwrap_or(self.value)
    }
}

/// Fidelity after one perfect P1 step on `rho_A` input with fidelity `f`.
pub fn ra_map_closed_form(f: f64, n_a: usize) -> Result<f64> {
    check_unit("F", f)?;
    if n_a == 0 || n_a > 62 {
        return Err(Error::BadParam { name: "N_A", value: n_a as f64, reason: "must lie in 1..=62" });
    }
    let rest = (1.0 - f).powi(2) / ((1u64 << n_a) - 1) as f64;
    Ok(f * f / (f * f + rest))
}

/// Restricted-model GHZ threshold `2^{-1/(N-1)}`.
pub fn ghz_restricted_p_min(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::BadParam { name: "N", value: n as f64, reason: "need at least 2 qubits" });
    }
    Ok(0.5f64.powf(1.0 / (n - 1) as f64))
}

/// Fidelity reached by iterating `family`'s schedule from the pure target.
fn fixed_point(g: &Arc<Graph>, family: Family, p: f64, opts: &SearchOptions, used: &Cell<usize>) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::BadParam { name: "p", value: p, reason: "must lie in (0, 1]" });
    }
    if p == 1.0 && opts.meas_flip == 0.0 {
        return Ok(1.0);
    }
    let schedule = family.schedule(p, opts.meas_flip);
    let cfg = family.step_config(p, opts.meas_flip);
    let stop = StopCriteria { epsilon: -1.0, ..opts.fixed_point_stop };
    let trace = match iterate(&GdState::pure_target(g.clone()), schedule, &cfg, &stop) {
        Ok(t) => t,
        Err(Error::ZeroSuccess(_)) => {
            return Err(Error::NoFixedPoint(format!("post-selection never succeeds at p = {p}")))
        }
        Err(e) => return Err(e),
    };
    used.set(used.get() + trace.rounds.len());
    use crate::purify::Verdict::*;
    match trace.verdict {
        Diverged => Err(Error::NoFixedPoint(format!("iteration from the pure state diverges at p = {p}"))),
        MaxRounds => Err(Error::NoFixedPoint(format!(
            "no stationary fidelity within {} rounds at p = {p}",
            opts.fixed_point_stop.max_rounds
        ))),
        Stalled | Converged => {
            let lambda = trace.final_state.coefficients();
            let f = lambda[0];
            let runner_up = lambda[1..].iter().cloned().fold(0.0, f64::max);
            if f - runner_up <= REACH_TOL {
                Err(Error::NoFixedPoint(format!(
                    "iteration from the pure state settles on a state with no preference for the target at p = {p}"
                )))
            } else {
                Ok(f)
            }
        }
    }
}

/// Maximal reachable fidelity under the alternating schedule with
/// depolarizing gate noise `p` and measurement misreads `f_m`.
pub fn f_max(g: &Arc<Graph>, p: f64, meas_flip: f64) -> Result<f64> {
    let opts = SearchOptions::default().with_meas_flip(meas_flip);
    fixed_point(g, Family::RhoQ, p, &opts, &Cell::new(0))
}

/// Fixed-point fidelity of `family`'s own schedule and noise model, with the
/// number of protocol steps it took to settle.
pub fn family_fixed_point(g: &Arc<Graph>, family: Family, p: f64, opts: &SearchOptions) -> Result<(f64, usize)> {
    let used = Cell::new(0);
    let f = fixed_point(g, family, p, opts, &used)?;
    Ok((f, used.get()))
}

struct Purifier<'a> {
    g: &'a Arc<Graph>,
    family: Family,
    cfg: StepConfig,
    schedule: &'static [Protocol],
    stop: StopCriteria,
    target: f64,
    used: &'a Cell<usize>,
}

impl<'a> Purifier<'a> {
    fn new(g: &'a Arc<Graph>, family: Family, p: f64, opts: &SearchOptions, used: &'a Cell<usize>) -> Result<Self> {
        let target = fixed_point(g, family, p, opts, used)?;
        Ok(Purifier {
            g,
            family,
            cfg: family.step_config(p, opts.meas_flip),
            schedule: family.schedule(p, opts.meas_flip),
            // below a perfect fixed point even the pure state must be iterated
            stop: if target < 1.0 { StopCriteria { epsilon: -1.0, ..opts.stop } } else { opts.stop },
            target,
            used,
        })
    }

    fn reaches(&self, s: &GdState) -> Result<bool> {
        let trace = match iterate(s, self.schedule, &self.cfg, &self.stop) {
            Ok(t) => t,
            Err(Error::ZeroSuccess(_)) => return Ok(false),
            Err(e) => return Err(e),
        };
        self.used.set(self.used.get() + trace.rounds.len());
        Ok((trace.final_fidelity() - self.target).abs() <= REACH_TOL)
    }

    fn purifiable(&self, param: f64) -> Result<bool> {
        let s = self.family.member(self.g, param)?;
        Ok(self.target > s.fidelity() && self.reaches(&s)?)
    }

    /// Largest parameter whose member fidelity does not exceed the target.
    fn param_at_target(&self) -> Result<f64> {
        let (mut lo, mut hi) = self.family.param_range();
        if self.family.member(self.g, hi)?.fidelity() <= self.target {
            return Ok(hi);
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.family.member(self.g, mid)?.fidelity() <= self.target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }
}

/// Bisects a predicate that is false at `lo` and true at `hi`.
fn bisect(
    what: impl Fn() -> String,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    mut pred: impl FnMut(f64) -> Result<bool>,
) -> Result<(f64, f64)> {
    let (a, b) = (lo, hi);
    if pred(lo)? || !pred(hi)? {
        return Err(Error::BracketError { what: what(), lo, hi });
    }
    let mut steps = 0;
    while hi - lo > 2.0 * tol && steps < MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
        steps += 1;
    }
    if (lo, hi) != (a, b) && (pred(lo)? || !pred(hi)?) {
        return Err(Error::BracketError { what: format!("{} (re-check)", what()), lo, hi });
    }
    Ok((lo, hi))
}

/// Smallest family fidelity that still purifies at gate noise `p`.
///
/// The family parameter is bisected on "reaches the fixed point". Members at
/// or above the fixed point satisfy it trivially, so the search bracket is
/// the whole family range.
pub fn f_min_search(g: &Arc<Graph>, family: Family, p: f64, opts: &SearchOptions) -> Result<ThresholdReport> {
    let used = Cell::new(0);
    let pur = Purifier::new(g, family, p, opts, &used)?;
    let tol = opts.tolerance.unwrap_or(PARAM_TOL);
    let (lo, hi) = family.param_range();
    let (lo, hi) = bisect(
        || format!("F_min of {} / {family} at p = {p}", g.name()),
        lo,
        hi,
        tol,
        |x| pur.reaches(&family.member(g, x)?),
    )?;
    let value = 0.5 * (lo + hi);
    Ok(ThresholdReport {
        graph: g.name().to_string(),
        family,
        quantity: Quantity::FMin,
        parameter: family.parameter(),
        p: Some(p),
        lo,
        hi,
        value,
        fidelity: Some(family.member(g, value)?.fidelity()),
        tolerance: tol,
        rounds_used: used.get(),
    })
}

/// [`f_min_search`] with default options, returning the critical fidelity.
pub fn f_min(g: &Arc<Graph>, family: Family, p: f64) -> Result<f64> {
    Ok(f_min_search(g, family, p, &SearchOptions::default())?.reported())
}

/// Smallest single-qubit depolarizing parameter of the preparation that
/// still purifies at gate noise `p`.
pub fn q_min_search(g: &Arc<Graph>, p: f64, opts: &SearchOptions) -> Result<ThresholdReport> {
    let mut r = f_min_search(g, Family::RhoQ, p, opts)?;
    r.quantity = Quantity::QMin;
    r.fidelity = None;
    Ok(r)
}

pub fn q_min(g: &Arc<Graph>, p: f64) -> Result<f64> {
    Ok(q_min_search(g, p, &SearchOptions::default())?.value)
}

/// Does some member of `family` purify at gate noise `p`?
///
/// For the restricted model the test is a single-step fidelity gain. For the
/// other families a geometric grid of parameters is scanned downward from the
/// member whose fidelity equals the fixed point, where the basin survives
/// longest as `p` drops.
pub fn purifiable_member_exists(g: &Arc<Graph>, family: Family, p: f64, opts: &SearchOptions) -> Result<bool> {
    purifiable_member_exists_counted(g, family, p, opts, &Cell::new(0))
}

fn purifiable_member_exists_counted(
    g: &Arc<Graph>,
    family: Family,
    p: f64,
    opts: &SearchOptions,
    used: &Cell<usize>,
) -> Result<bool> {
    if family == Family::RestrictedBitflip {
        let cfg = family.step_config(p, opts.meas_flip);
        for x in geometric_grid(1e-12, 1.0, GRID_POINTS) {
            used.set(used.get() + 1);
            if one_step_gain(g, x, &cfg)? > GAIN_FLOOR {
                return Ok(true);
            }
        }
        return Ok(false);
    }
    let pur = match Purifier::new(g, family, p, opts, used) {
        Ok(pur) => pur,
        Err(Error::NoFixedPoint(_)) => return Ok(false),
        Err(e) => return Err(e),
    };
    let top = pur.param_at_target()?;
    let (bottom, _) = family.param_range();
    let span = top - bottom;
    if span <= 0.0 {
        return Ok(false);
    }
    for offset in geometric_grid(1e-7 * span, span, GRID_POINTS) {
        if pur.purifiable(top - offset)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Smallest gate-noise parameter in `[0.4, 1]` at which some member of
/// `family` is purifiable.
pub fn p_min_search(g: &Arc<Graph>, family: Family, opts: &SearchOptions) -> Result<ThresholdReport> {
    let used = Cell::new(0);
    let tol = opts.tolerance.unwrap_or(P_TOL);
    let (lo, hi) = bisect(
        || format!("p_min of {} / {family}", g.name()),
        P_RANGE.0,
        P_RANGE.1,
        tol,
        |p| purifiable_member_exists_counted(g, family, p, opts, &used),
    )?;
    Ok(ThresholdReport {
        graph: g.name().to_string(),
        family,
        quantity: Quantity::PMin,
        parameter: "p",
        p: None,
        lo,
        hi,
        value: 0.5 * (lo + hi),
        fidelity: None,
        tolerance: tol,
        rounds_used: used.get(),
    })
}

pub fn p_min(g: &Arc<Graph>, family: Family) -> Result<f64> {
    Ok(p_min_search(g, family, &SearchOptions::default())?.value)
}

/// Gains at or below this are treated as rounding noise.
const GAIN_FLOOR: f64 = 1e-15;

/// Fidelity change of one restricted-model P1 step on the member `x`.
fn one_step_gain(g: &Arc<Graph>, x: f64, cfg: &StepConfig) -> Result<f64> {
    let s = Family::RestrictedBitflip.member(g, x)?;
    let out = step(&s, Protocol::P1, cfg)?;
    Ok(out.state.fidelity() - s.fidelity())
}

/// `points` values from `lo` to `hi`, evenly spaced in the logarithm.
pub fn geometric_grid(lo: f64, hi: f64, points: usize) -> impl Iterator<Item = f64> {
    let ratio = (hi / lo).ln() / (points.max(2) - 1) as f64;
    (0..points).map(move |i| if i + 1 == points { hi } else { lo * (ratio * i as f64).exp() })
}

/// Range of `x` over which one restricted-model P1 step on the closed
/// cluster of `n` qubits raises the fidelity. `x_lo = 0` means the gain
/// persists down to the smallest `x` probed (`1e-15`).
pub fn restricted_gain_region(n: usize, p: f64) -> Result<(f64, f64)> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::BadParam { name: "p", value: p, reason: "must lie in (0, 1]" });
    }
    let g = Arc::new(Graph::standard(StandardGraph::ClosedCluster(n))?);
    let cfg = Family::RestrictedBitflip.step_config(p, 0.0);
    let gains = |x: f64| -> Result<bool> { Ok(one_step_gain(&g, x, &cfg)? > GAIN_FLOOR) };

    let grid: Vec<f64> = geometric_grid(1e-15, 1.0, 600).collect();
    let flags = grid.iter().map(|&x| gains(x)).collect::<Result<Vec<bool>>>()?;
    // longest run of consecutive grid points with a gain, measured in log x
    let mut best: Option<(usize, usize)> = None;
    let mut i = 0;
    while i < grid.len() {
        if !flags[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < grid.len() && flags[i + 1] {
            i += 1;
        }
        if best.is_none_or(|(a, b)| i - start > b - a) {
            best = Some((start, i));
        }
        i += 1;
    }
    let (a, b) = best.ok_or(Error::EmptyRegion(p))?;

    let refine = |inside: f64, outside: f64| -> Result<f64> {
        let (mut inn, mut out) = (inside.ln(), outside.ln());
        while (inn - out).abs() > 1e-7 {
            let mid = 0.5 * (inn + out);
            if gains(mid.exp())? {
                inn = mid;
            } else {
                out = mid;
            }
        }
        Ok(inn.exp())
    };
    let x_lo = if a == 0 { 0.0 } else { refine(grid[a], grid[a - 1])? };
    let x_hi = if b + 1 == grid.len() { 1.0 } else { refine(grid[b], grid[b + 1])? };
    Ok((x_lo, x_hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::purify::p1_step;

    fn graph(kind: StandardGraph) -> Arc<Graph> {
        Arc::new(Graph::standard(kind).unwrap())
    }

    #[test]
    fn closed_form_examples() {
        assert!((ra_map_closed_form(0.8, 1).unwrap() - 16.0 / 17.0).abs() < 1e-15);
        assert_eq!(ra_map_closed_form(1.0, 4).unwrap(), 1.0);
        assert!((ra_map_closed_form(0.125, 3).unwrap() - 0.125).abs() < 1e-15);
        assert!((ra_map_closed_form(0.5, 3).unwrap() - 7.0 / 8.0).abs() < 1e-15);
        assert!(ra_map_closed_form(1.2, 3).is_err());
        assert!(ra_map_closed_form(0.5, 0).is_err());
    }

    #[test]
    fn closed_form_matches_step() {
        for kind in [StandardGraph::Ghz(5), StandardGraph::LinearCluster(6), StandardGraph::ClosedCluster(6)] {
            let g = graph(kind);
            for f in [0.3, 0.7, 0.99] {
                let s = GdState::rho_a_family(g.clone(), f).unwrap();
                let out = p1_step(&s, 1.0, 0.0).unwrap();
                let want = ra_map_closed_form(f, g.n_a()).unwrap();
                assert!((out.state.fidelity() - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn f_max_is_one_without_noise() {
        assert_eq!(f_max(&graph(StandardGraph::Ghz(3)), 1.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn f_max_below_one_with_noise_and_fails_when_too_noisy() {
        let g = graph(StandardGraph::LinearCluster(4));
        let f = f_max(&g, 0.97, 0.0).unwrap();
        assert!(f > 0.5 && f < 1.0, "{f}");
        assert!(matches!(f_max(&g, 0.6, 0.0), Err(Error::NoFixedPoint(_))));
    }

    #[test]
    fn same_graph_same_f_max() {
        let a = f_max(&graph(StandardGraph::Ghz(2)), 0.95, 0.0).unwrap();
        let b = f_max(&graph(StandardGraph::LinearCluster(2)), 0.95, 0.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ghz3_rho_a_basin() {
        let r = f_min_search(&graph(StandardGraph::Ghz(3)), Family::RhoA, 1.0, &SearchOptions::default()).unwrap();
        assert!(r.lo < r.value && r.value < r.hi);
        assert!(r.hi - r.lo <= 2.0 * r.tolerance);
        assert!((r.reported() - 0.5).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn restricted_ghz_threshold() {
        let g = graph(StandardGraph::Ghz(4));
        let r = p_min_search(&g, Family::RestrictedBitflip, &SearchOptions::default()).unwrap();
        assert!((r.value - ghz_restricted_p_min(4).unwrap()).abs() < 1e-3, "{r:?}");
    }

    #[test]
    fn gain_region_at_unit_p_reaches_one() {
        let (lo, hi) = restricted_gain_region(6, 1.0).unwrap();
        assert!(lo < hi);
        assert!(hi > 1.0 - 1e-5, "{hi}");
        assert!(matches!(restricted_gain_region(6, 0.3), Err(Error::EmptyRegion(_))));
    }

    #[test]
    fn bisect_reports_bad_bracket() {
        let err = bisect(|| "t".into(), 0.0, 1.0, 1e-3, |_| Ok(true)).unwrap_err();
        assert!(matches!(err, Error::BracketError { .. }));
        let (lo, hi) = bisect(|| "t".into(), 0.0, 1.0, 1e-3, |x| Ok(x > 0.3)).unwrap();
        assert!(lo <= 0.3 && hi > 0.3 && hi - lo <= 2e-3);
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert_eq!("restricted".parse::<Family>().unwrap(), Family::RestrictedBitflip);
        assert!("rho_z".parse::<Family>().is_err());
    }

    #[test]
    fn geometric_grid_ends() {
        let v: Vec<f64> = geometric_grid(1e-3, 1.0, 4).collect();
        assert_eq!(v.len(), 4);
        assert!((v[0] - 1e-3).abs() < 1e-18 && v[3] == 1.0);
        assert!((v[1] - 1e-2).abs() < 1e-12);
    }
}
