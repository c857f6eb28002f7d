//! The two recurrence sub-protocols and the driver that alternates them.
//!
//! In `P1` every A-party applies a CNOT from its copy-1 qubit to its copy-2
//! qubit and every B-party the reverse. Copy 2 is then measured (A-qubits in
//! the X basis, B-qubits in the Z basis) and copy 1 is kept when the recovered
//! A-syndrome of the pair vanishes. On graph-diagonal inputs this is
//!
//! ```text
//! u[gA | gB] = sum_{mB ^ nB = gB} lambda[gA | mB] * lambda[gA | nB]
//! ```
//!
//! i.e. coincidence on the A-part and XOR-convolution over the B-part.
//! `P2` is the same with A and B exchanged.

use std::fmt;
use std::str::FromStr;

use crate::error::{check_unit, Error, Result};
use crate::graph::{Color, Graph};
use crate::state::{
    bitflip_in_place, compress, depolarize_all_in_place, normalize, subsets, GdState,
};
use crate::wht::{iwht_over, wht_over};

/// Acceptance probabilities below this are reported as failures.
pub const MIN_SUCCESS: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Protocol {
    P1,
    P2,
}

impl Protocol {
    /// Side whose syndrome is read out and must agree between the copies.
    pub fn checked_side(self) -> Color {
        match self {
            Protocol::P1 => Color::A,
            Protocol::P2 => Color::B,
        }
    }

    /// Side whose syndrome patterns are XOR-combined.
    pub fn combined_side(self) -> Color {
        match self {
            Protocol::P1 => Color::B,
            Protocol::P2 => Color::A,
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Protocol::P1 => "P1",
            Protocol::P2 => "P2",
        })
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "P1" => Ok(Protocol::P1),
            "P2" => Ok(Protocol::P2),
            other => Err(Error::Parse(format!("unknown protocol {other:?}"))),
        }
    }
}

/// Which evaluation of the convolution kernel to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelMode {
    /// Walsh-Hadamard transform, `O(2^n n)`.
    #[default]
    Fast,
    /// Direct double sum.
    Naive,
}

/// Noise acting on the qubits of both copies before the CNOT layer.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum GateNoise {
    #[default]
    Perfect,
    /// Depolarizing channel with parameter `p` on every qubit.
    Depolarizing(f64),
    /// Bit flips `p rho + (1-p)/2 (rho + X rho X)` on the B-qubits only.
    BitflipB(f64),
}

impl GateNoise {
    fn validate(self) -> Result<()> {
        match self {
            GateNoise::Perfect => Ok(()),
            GateNoise::Depolarizing(p) | GateNoise::BitflipB(p) => check_unit("p", p),
        }
    }

    pub(crate) fn apply(self, g: &Graph, lambda: &mut [f64]) {
        match self {
            GateNoise::Perfect => {}
            GateNoise::Depolarizing(p) => depolarize_all_in_place(g, lambda, p),
            GateNoise::BitflipB(p) => bitflip_in_place(g, lambda, Color::B, p),
        }
    }
}

/// Operational parameters of a single step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepConfig {
    pub noise: GateNoise,
    /// Probability that a single measurement outcome is misread, in `[0, 1/2]`.
    pub meas_flip: f64,
    pub mode: KernelMode,
}

impl StepConfig {
    /// Depolarizing gate noise `p` and outcome flips `f_m`.
    pub fn noisy(p: f64, meas_flip: f64) -> Self {
        StepConfig {
            noise: if p == 1.0 { GateNoise::Perfect } else { GateNoise::Depolarizing(p) },
            meas_flip,
            mode: KernelMode::Fast,
        }
    }

    pub fn with_mode(mut self, mode: KernelMode) -> Self {
        self.mode = mode;
        self
    }

    fn validate(&self) -> Result<()> {
        self.noise.validate()?;
        if !(0.0..=0.5).contains(&self.meas_flip) {
            return Err(Error::BadParam {
                name: "f_m",
                value: self.meas_flip,
                reason: "must lie in [0, 1/2]",
            });
        }
        Ok(())
    }
}

/// Outcome of one post-selected step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub state: GdState,
    /// Acceptance probability, equal to the trace of the unnormalized output.
    pub p_succ: f64,
    pub protocol: Protocol,
}

/// One step of `P1` with depolarizing gate noise `p` and outcome flips `f_m`.
pub fn p1_step(s: &GdState, p: f64, meas_flip: f64) -> Result<StepResult> {
    step(s, Protocol::P1, &StepConfig::noisy(p, meas_flip))
}

/// One step of `P2`; see [`p1_step`].
pub fn p2_step(s: &GdState, p: f64, meas_flip: f64) -> Result<StepResult> {
    step(s, Protocol::P2, &StepConfig::noisy(p, meas_flip))
}

/// One recurrence step on two identical copies of `s`.
pub fn step(s: &GdState, protocol: Protocol, cfg: &StepConfig) -> Result<StepResult> {
    cfg.validate()?;
    let g = s.graph();
    let mut noisy = s.coefficients().to_vec();
    cfg.noise.apply(g, &mut noisy);
    let u = coincidence_square(&noisy, g, protocol, cfg.meas_flip, cfg.mode);
    let p_succ: f64 = u.iter().sum();
    if p_succ.is_nan() || p_succ < MIN_SUCCESS {
        return Err(Error::ZeroSuccess(p_succ));
    }
    let (lambda, _) = normalize(u)?;
    Ok(StepResult {
        state: GdState::from_normalized(s.graph_arc().clone(), lambda),
        p_succ,
        protocol,
    })
}

/// The unnormalized `P1` kernel for perfect measurements: coincidence on
/// A-parts, XOR self-convolution over B-parts.
pub fn xor_square_over_b(lambda: &[f64], g: &Graph, mode: KernelMode) -> Vec<f64> {
    coincidence_square(lambda, g, Protocol::P1, 0.0, mode)
}

/// Unnormalized output of `protocol` on two copies of `lambda`, where each
/// measured outcome is independently misread with probability `meas_flip`.
///
/// With misreads the checked parts of the two copies may differ by any
/// pattern `a`, weighted by the probability `W(a)` that the outcome flips
/// compose to `a`:
///
/// ```text
/// u[gS | gO] = sum_a W(a) sum_{mO ^ nO = gO} lambda[gS | mO] * lambda[gS ^ a | nO]
/// ```
pub fn coincidence_square(
    lambda: &[f64],
    g: &Graph,
    protocol: Protocol,
    meas_flip: f64,
    mode: KernelMode,
) -> Vec<f64> {
    assert_eq!(lambda.len(), g.dim(), "coefficient vector has the wrong length");
    match mode {
        KernelMode::Fast => fast_kernel(lambda, g, protocol, meas_flip),
        KernelMode::Naive => naive_kernel(lambda, g, protocol, meas_flip),
    }
}

/// Syndrome masks toggled by a misread of each measured copy-2 qubit.
///
/// A qubit on the checked side is read in the X basis and feeds only its own
/// syndrome bit; a qubit on the other side is read in the Z basis and feeds
/// the syndrome bits of all its neighbors.
pub fn misread_masks(g: &Graph, protocol: Protocol) -> Vec<u64> {
    let checked = g.mask_of(protocol.checked_side());
    (0..g.n())
        .map(|q| if checked >> q & 1 == 1 { 1u64 << q } else { g.neighbor_mask(q) })
        .collect()
}

fn fast_kernel(lambda: &[f64], g: &Graph, protocol: Protocol, meas_flip: f64) -> Vec<f64> {
    let checked = g.mask_of(protocol.checked_side());
    let combined = g.mask_of(protocol.combined_side());

    let mut hat = lambda.to_vec();
    wht_over(&mut hat, combined);

    let mut out = if meas_flip > 0.0 {
        // partner[k] = sum_a W(a) hat[k ^ a], computed as a convolution over
        // the checked bits in their own transform domain
        let masks = misread_masks(g, protocol);
        let mut partner = hat.clone();
        wht_over(&mut partner, checked);
        for (k, x) in partner.iter_mut().enumerate() {
            let k = k as u64 & checked;
            let w: f64 = masks
                .iter()
                .filter(|&&m| (k & m).count_ones() % 2 == 1)
                .map(|_| 1.0 - 2.0 * meas_flip)
                .product();
            *x *= w;
        }
        iwht_over(&mut partner, checked);
        partner.iter_mut().zip(&hat).for_each(|(p, h)| *p *= h);
        partner
    } else {
        hat.iter_mut().for_each(|h| *h *= *h);
        hat
    };
    iwht_over(&mut out, combined);
    out
}

fn naive_kernel(lambda: &[f64], g: &Graph, protocol: Protocol, meas_flip: f64) -> Vec<f64> {
    let checked = g.mask_of(protocol.checked_side());
    let combined = g.mask_of(protocol.combined_side());

    // explicit misread distribution over checked patterns
    let mut weights = vec![(0u64, 1.0)];
    if meas_flip > 0.0 {
        let mut dense = vec![0.0; 1 << checked.count_ones()];
        dense[0] = 1.0;
        for m in misread_masks(g, protocol) {
            let cm = compress(m, checked);
            let prev = dense.clone();
            for (i, d) in dense.iter_mut().enumerate() {
                *d = (1.0 - meas_flip) * prev[i] + meas_flip * prev[i ^ cm];
            }
        }
        weights = subsets(checked)
            .map(|a| (a, dense[compress(a, checked)]))
            .filter(|&(_, w)| w != 0.0)
            .collect();
    }

    let mut out = vec![0.0; lambda.len()];
    for (gamma, slot) in out.iter_mut().enumerate() {
        let gamma = gamma as u64;
        let (gs, go) = (gamma & checked, gamma & combined);
        let mut acc = 0.0;
        for &(a, w) in &weights {
            let mut inner = 0.0;
            for mu in subsets(combined) {
                inner += lambda[(gs | mu) as usize] * lambda[((gs ^ a) | (mu ^ go)) as usize];
            }
            acc += w * inner;
        }
        *slot = acc;
    }
    out
}

/// When to stop iterating.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopCriteria {
    /// Converged once the fidelity reaches `1 - epsilon`; a negative value
    /// turns the test off.
    pub epsilon: f64,
    /// Stalled once the fidelity moves less than this over one schedule period.
    pub tol: f64,
    pub max_rounds: usize,
}

impl Default for StopCriteria {
    fn default() -> Self {
        StopCriteria {
            epsilon: 1e-6,
            tol: 1e-12,
            max_rounds: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Converged,
    Stalled,
    Diverged,
    MaxRounds,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Converged => "CONVERGED",
            Verdict::Stalled => "STALLED",
            Verdict::Diverged => "DIVERGED",
            Verdict::MaxRounds => "MAX_ROUNDS",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundRecord {
    /// 1-based.
    pub round: usize,
    pub protocol: Protocol,
    pub f_before: f64,
    pub f_after: f64,
    pub p_succ: f64,
}

/// History of an iterated purification run.
#[derive(Debug, Clone, PartialEq)]
pub struct PurificationTrace {
    pub rounds: Vec<RoundRecord>,
    pub verdict: Verdict,
    /// Expected number of input copies per output copy, `2^r / prod p_succ`.
    pub expected_cost: f64,
    pub initial_fidelity: f64,
    pub final_state: GdState,
}

impl PurificationTrace {
    pub fn final_fidelity(&self) -> f64 {
        self.final_state.fidelity()
    }

    /// Output copies per input copy, the reciprocal of the expected cost.
    pub fn efficiency(&self) -> f64 {
        1.0 / self.expected_cost
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("round,protocol,F_before,F_after,p_succ,cumulative_expected_cost\n");
        let mut cost = 1.0;
        for r in &self.rounds {
            cost *= 2.0 / r.p_succ;
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.round,
                r.protocol,
                crate::fmt_f64(r.f_before),
                crate::fmt_f64(r.f_after),
                crate::fmt_f64(r.p_succ),
                crate::fmt_f64(cost)
            ));
        }
        s
    }
}

/// Strict alternation `P1, P2`.
pub const ALTERNATING: [Protocol; 2] = [Protocol::P1, Protocol::P2];

/// Applies the cyclic `schedule` until one of the stop conditions holds.
///
/// Stalling is judged over a whole schedule period since `P1` and `P2` move
/// different coefficient sectors.
pub fn iterate(
    s0: &GdState,
    schedule: &[Protocol],
    cfg: &StepConfig,
    stop: &StopCriteria,
) -> Result<PurificationTrace> {
    if schedule.is_empty() {
        return Err(Error::InvalidParam("empty protocol schedule".into()));
    }
    cfg.validate()?;
    let floor = 1.0 / s0.graph().dim() as f64;
    let period = schedule.len();
    let mut state = s0.clone();
    let mut rounds = Vec::new();
    let mut cost = 1.0;
    let mut period_start = state.fidelity();

    let verdict = loop {
        let f = state.fidelity();
        if f >= 1.0 - stop.epsilon {
            break Verdict::Converged;
        }
        if rounds.len() >= stop.max_rounds {
            break Verdict::MaxRounds;
        }
        let protocol = schedule[rounds.len() % period];
        let res = step(&state, protocol, cfg)?;
        cost *= 2.0 / res.p_succ;
        rounds.push(RoundRecord {
            round: rounds.len() + 1,
            protocol,
            f_before: f,
            f_after: res.state.fidelity(),
            p_succ: res.p_succ,
        });
        state = res.state;
        let f = state.fidelity();
        if f < floor * (1.0 - 1e-9) {
            break Verdict::Diverged;
        }
        if rounds.len() % period == 0 {
            if f < 1.0 - stop.epsilon && (f - period_start).abs() < stop.tol {
                break Verdict::Stalled;
            }
            period_start = f;
        }
    };

    Ok(PurificationTrace {
        rounds,
        verdict,
        expected_cost: cost,
        initial_fidelity: s0.fidelity(),
        final_state: state,
    })
}
