//! Graph-diagonal mixed states and Pauli noise acting on them.
//!
//! A state diagonal in the graph basis is a probability vector over the `2^n`
//! syndrome patterns. A Pauli on qubit `v` permutes that basis by XOR with a
//! fixed mask (see [`pauli_flip_mask`]), so every Pauli channel is a mixture
//! of index permutations and never leaves the diagonal.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{check_unit, Error, Result};
use crate::graph::{bits, Color, Graph, SyndromeIndex};

/// Coefficients more negative than this are treated as a bug, not roundoff.
pub const NEGATIVE_SLACK: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub const ALL: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];
}

/// Syndrome bits toggled by the Pauli `axis` on vertex `v`.
///
/// `Z` anticommutes only with the vertex's own correlation operator, `X`
/// with those of its neighbors, and `Y` with both.
pub fn pauli_flip_mask(g: &Graph, v: usize, axis: PauliAxis) -> SyndromeIndex {
    let own = 1u64 << v;
    let nb = g.neighbor_mask(v);
    (match axis {
        PauliAxis::X => nb,
        PauliAxis::Y => own ^ nb,
        PauliAxis::Z => own,
    }) as usize
}

/// A mixed state diagonal in the graph-state basis of `graph`.
#[derive(Debug, Clone, PartialEq)]
pub struct GdState {
    graph: Arc<Graph>,
    lambda: Vec<f64>,
}

impl GdState {
    /// Wraps a coefficient vector, clamping roundoff negatives and
    /// normalizing to unit trace.
    pub fn from_coefficients(graph: Arc<Graph>, lambda: Vec<f64>) -> Result<Self> {
        if lambda.len() != graph.dim() {
            return Err(Error::InvalidParam(format!(
                "expected {} coefficients, got {}",
                graph.dim(),
                lambda.len()
            )));
        }
        let (lambda, _) = normalize(lambda)?;
        Ok(GdState { graph, lambda })
    }

    /// Same as [`from_coefficients`](Self::from_coefficients) but skips
    /// renormalization; the caller guarantees a probability vector.
    pub(crate) fn from_normalized(graph: Arc<Graph>, lambda: Vec<f64>) -> Self {
        debug_assert_eq!(lambda.len(), graph.dim());
        GdState { graph, lambda }
    }

    /// The target state: all weight on syndrome 0.
    pub fn pure_target(graph: Arc<Graph>) -> Self {
        let mut lambda = vec![0.0; graph.dim()];
        lambda[0] = 1.0;
        GdState { graph, lambda }
    }

    /// The completely depolarized state.
    pub fn uniform(graph: Arc<Graph>) -> Self {
        let d = graph.dim();
        GdState {
            graph,
            lambda: vec![1.0 / d as f64; d],
        }
    }

    /// `x |target><target| + (1 - x) 1 / 2^n`.
    pub fn global_white(graph: Arc<Graph>, x: f64) -> Result<Self> {
        check_unit("x", x)?;
        let d = graph.dim();
        let w = (1.0 - x) / d as f64;
        let mut lambda = vec![w; d];
        lambda[0] = x + w;
        Ok(GdState { graph, lambda })
    }

    /// Every vertex of the target passed once through a depolarizing channel
    /// with parameter `q`.
    pub fn prepared_with_channel_noise(graph: Arc<Graph>, q: f64) -> Result<Self> {
        check_unit("q", q)?;
        GdState::pure_target(graph).depolarize_all(q)
    }

    /// Fidelity `f` on the target, the rest spread evenly over the patterns
    /// with zero B-part and nonzero A-part.
    pub fn rho_a_family(graph: Arc<Graph>, f: f64) -> Result<Self> {
        GdState::sector_family(graph, Color::A, f)
    }

    /// Mirror image of [`rho_a_family`](Self::rho_a_family): support on
    /// patterns with zero A-part.
    pub fn rho_b_family(graph: Arc<Graph>, f: f64) -> Result<Self> {
        GdState::sector_family(graph, Color::B, f)
    }

    fn sector_family(graph: Arc<Graph>, side: Color, f: f64) -> Result<Self> {
        check_unit("F", f)?;
        let mask = graph.mask_of(side);
        let k = mask.count_ones();
        if k == 0 {
            return Err(Error::BadParam {
                name: "F",
                value: f,
                reason: "the family is empty for a graph with no vertex on this side",
            });
        }
        let rest = (1.0 - f) / ((1u64 << k) - 1) as f64;
        let mut lambda = vec![0.0; graph.dim()];
        for idx in subsets(mask) {
            lambda[idx as usize] = if idx == 0 { f } else { rest };
        }
        Ok(GdState { graph, lambda })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn graph_arc(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.lambda
    }

    pub fn into_coefficients(self) -> Vec<f64> {
        self.lambda
    }

    /// Overlap with the target state, i.e. the weight on syndrome 0.
    pub fn fidelity(&self) -> f64 {
        self.lambda[0]
    }

    pub fn trace(&self) -> f64 {
        self.lambda.iter().sum()
    }

    /// Applies the Pauli channel `probs = (p_I, p_X, p_Y, p_Z)` to vertex `v`.
    pub fn apply_pauli_channel(&self, v: usize, probs: [f64; 4]) -> Result<Self> {
        check_distribution(probs)?;
        if v >= self.graph.n() {
            return Err(Error::VertexOutOfRange { vertex: v, n: self.graph.n() });
        }
        let mut out = self.clone();
        pauli_channel_in_place(&self.graph, &mut out.lambda, v, probs);
        Ok(out)
    }

    /// Single-qubit depolarizing channel `q rho + (1 - q)/2 * 1 (x) tr_v rho`.
    pub fn depolarize(&self, v: usize, q: f64) -> Result<Self> {
        check_unit("q", q)?;
        self.apply_pauli_channel(v, depolarizing_probs(q))
    }

    /// Depolarizing channel with parameter `q` on every vertex.
    pub fn depolarize_all(&self, q: f64) -> Result<Self> {
        check_unit("q", q)?;
        let mut out = self.clone();
        depolarize_all_in_place(&self.graph, &mut out.lambda, q);
        Ok(out)
    }

    /// Bit flips `p rho + (1 - p)/2 (rho + X rho X)` on every B-vertex.
    pub fn bitflip_b_noise(&self, p: f64) -> Result<Self> {
        check_unit("p", p)?;
        let mut out = self.clone();
        bitflip_in_place(&self.graph, &mut out.lambda, Color::B, p);
        Ok(out)
    }

    /// CSV dump of the nonzero coefficients.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("index,a_part,b_part,lambda\n");
        for (idx, &l) in self.lambda.iter().enumerate() {
            if l != 0.0 {
                let (a, b) = self.graph.syndrome_parts(idx);
                writeln!(s, "{idx},{a},{b},{}", crate::fmt_f64(l)).unwrap();
            }
        }
        s
    }
}

pub(crate) fn depolarizing_probs(q: f64) -> [f64; 4] {
    let e = (1.0 - q) / 4.0;
    [q + e, e, e, e]
}

fn check_distribution(probs: [f64; 4]) -> Result<()> {
    let sum: f64 = probs.iter().sum();
    if probs.iter().any(|&p| p.is_nan() || p < 0.0) || (sum - 1.0).abs() > 1e-12 {
        return Err(Error::BadDistribution(probs));
    }
    Ok(())
}

pub(crate) fn pauli_channel_in_place(g: &Graph, lambda: &mut [f64], v: usize, probs: [f64; 4]) {
    let [pi, px, py, pz] = probs;
    if pi == 1.0 {
        return;
    }
    let mx = pauli_flip_mask(g, v, PauliAxis::X);
    let my = pauli_flip_mask(g, v, PauliAxis::Y);
    let mz = pauli_flip_mask(g, v, PauliAxis::Z);
    let src = lambda.to_vec();
    for (m, out) in lambda.iter_mut().enumerate() {
        *out = pi * src[m] + px * src[m ^ mx] + py * src[m ^ my] + pz * src[m ^ mz];
    }
}

pub(crate) fn depolarize_all_in_place(g: &Graph, lambda: &mut [f64], q: f64) {
    if q == 1.0 {
        return;
    }
    let probs = depolarizing_probs(q);
    for v in 0..g.n() {
        pauli_channel_in_place(g, lambda, v, probs);
    }
}

pub(crate) fn bitflip_in_place(g: &Graph, lambda: &mut [f64], side: Color, p: f64) {
    let flip = (1.0 - p) / 2.0;
    for v in g.vertices_of(side) {
        pauli_channel_in_place(g, lambda, v, [1.0 - flip, flip, 0.0, 0.0]);
    }
}

/// Clamps roundoff negatives and rescales to unit sum. Returns the vector
/// and its sum before rescaling.
pub(crate) fn normalize(mut lambda: Vec<f64>) -> Result<(Vec<f64>, f64)> {
    for (index, l) in lambda.iter_mut().enumerate() {
        if *l < 0.0 {
            if *l < -NEGATIVE_SLACK || l.is_nan() {
                return Err(Error::NegativeCoefficient { index, value: *l });
            }
            *l = 0.0;
        } else if l.is_nan() {
            return Err(Error::NegativeCoefficient { index, value: *l });
        }
    }
    let sum: f64 = lambda.iter().sum();
    if sum.is_nan() || sum <= 0.0 {
        return Err(Error::ZeroSuccess(sum));
    }
    lambda.iter_mut().for_each(|l| *l /= sum);
    Ok((lambda, sum))
}

/// All submasks of `mask`, starting with 0.
pub(crate) fn subsets(mask: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(0u64);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == mask { None } else { Some((cur.wrapping_sub(mask)) & mask) };
        Some(cur)
    })
}

/// Compresses the bits of `idx` selected by `mask` into a dense integer.
pub(crate) fn compress(idx: u64, mask: u64) -> usize {
    bits(mask)
        .enumerate()
        .fold(0usize, |acc, (i, b)| acc | (((idx >> b) & 1) as usize) << i)
}
