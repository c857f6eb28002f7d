//! Brute-force density-matrix simulation for small systems.
//!
//! Nothing here uses the syndrome-flip shortcuts of [`crate::state`] or the
//! convolution kernels of [`crate::purify`]: graph states are built from the
//! stabilizer projectors, channels act through explicit partial traces and
//! conjugations, and the purification circuit is simulated gate by gate with
//! every measurement branch enumerated. The results are the ground truth the
//! coefficient-level maps are checked against.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{bits, Graph, StandardGraph};
use crate::purify::{step, GateNoise, Protocol, StepConfig};
use crate::state::GdState;

/// Largest single-copy graph accepted by the dense routines.
pub const MAX_DENSE_QUBITS: usize = 8;
/// Largest graph whose two-copy circuit is simulated densely.
pub const MAX_TWO_COPY_VERTICES: usize = 4;

type C = Complex64;

const ZERO: C = C { re: 0.0, im: 0.0 };
const ONE: C = C { re: 1.0, im: 0.0 };

/// A dense `2^n x 2^n` density matrix, row-major. Qubit `q` is bit `q` of
/// the row/column index.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    qubits: usize,
    data: Vec<C>,
}

impl DenseState {
    pub fn zeros(qubits: usize) -> Self {
        let d = 1 << qubits;
        DenseState {
            qubits,
            data: vec![ZERO; d * d],
        }
    }

    pub fn maximally_mixed(qubits: usize) -> Self {
        let mut s = DenseState::zeros(qubits);
        let d = s.dim();
        for i in 0..d {
            s.data[i * d + i] = C::new(1.0 / d as f64, 0.0);
        }
        s
    }

    /// `|psi><psi|`.
    pub fn pure(psi: &[C]) -> Self {
        let qubits = psi.len().trailing_zeros() as usize;
        let d = psi.len();
        let mut data = vec![ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                data[i * d + j] = psi[i] * psi[j].conj();
            }
        }
        DenseState { qubits, data }
    }

    /// `sum_mu lambda[mu] |Psi_mu><Psi_mu|` in the graph basis of `g`.
    pub fn from_graph_diagonal(g: &Graph, lambda: &[f64]) -> Result<Self> {
        check_size(g.n(), MAX_DENSE_QUBITS)?;
        let mut s = DenseState::zeros(g.n());
        let d = s.dim();
        for (mu, &l) in lambda.iter().enumerate() {
            if l == 0.0 {
                continue;
            }
            let psi = graph_basis_vector(g, mu);
            for i in 0..d {
                for j in 0..d {
                    s.data[i * d + j] += psi[i] * psi[j].conj() * l;
                }
            }
        }
        Ok(s)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn get(&self, i: usize, j: usize) -> C {
        self.data[i * self.dim() + j]
    }

    pub fn trace(&self) -> C {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// Largest deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut err: f64 = 0.0;
        for i in 0..d {
            for j in 0..=i {
                err = err.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        err
    }

    /// `<psi| rho |psi>`.
    pub fn expectation(&self, psi: &[C]) -> C {
        let d = self.dim();
        let mut acc = ZERO;
        for i in 0..d {
            if psi[i] == ZERO {
                continue;
            }
            let row: C = (0..d).map(|j| self.data[i * d + j] * psi[j]).sum();
            acc += psi[i].conj() * row;
        }
        acc
    }

    /// `rho1 (x) rho2`, with `rho1` on the low qubits.
    pub fn tensor(&self, other: &DenseState) -> DenseState {
        let (d1, d2) = (self.dim(), other.dim());
        let mut out = DenseState::zeros(self.qubits + other.qubits);
        let d = out.dim();
        for i2 in 0..d2 {
            for j2 in 0..d2 {
                let b = other.get(i2, j2);
                if b == ZERO {
                    continue;
                }
                for i1 in 0..d1 {
                    for j1 in 0..d1 {
                        out.data[(i1 | (i2 * d1)) * d + (j1 | (j2 * d1))] = self.get(i1, j1) * b;
                    }
                }
            }
        }
        out
    }

    /// `rho -> U rho U^dagger` for a single-qubit unitary `u` on `q`.
    pub fn apply_unitary_1q(&mut self, q: usize, u: [[C; 2]; 2]) {
        let d = self.dim();
        let h = 1 << q;
        // left multiplication, row pairs
        for i in 0..d {
            if i & h != 0 {
                continue;
            }
            for j in 0..d {
                let (a, b) = (self.data[i * d + j], self.data[(i | h) * d + j]);
                self.data[i * d + j] = u[0][0] * a + u[0][1] * b;
                self.data[(i | h) * d + j] = u[1][0] * a + u[1][1] * b;
            }
        }
        // right multiplication by U^dagger, column pairs
        for i in 0..d {
            for j in 0..d {
                if j & h != 0 {
                    continue;
                }
                let (a, b) = (self.data[i * d + j], self.data[i * d + (j | h)]);
                self.data[i * d + j] = a * u[0][0].conj() + b * u[0][1].conj();
                self.data[i * d + (j | h)] = a * u[1][0].conj() + b * u[1][1].conj();
            }
        }
    }

    /// Conjugation by the basis permutation `|x> -> |perm(x)>`.
    pub fn apply_permutation(&mut self, perm: impl Fn(usize) -> usize) {
        let d = self.dim();
        let map: Vec<usize> = (0..d).map(perm).collect();
        let mut out = vec![ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                out[map[i] * d + map[j]] = self.data[i * d + j];
            }
        }
        self.data = out;
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        self.apply_permutation(|x| if x >> control & 1 == 1 { x ^ 1 << target } else { x });
    }

    /// `1/2 * 1_q (x) tr_q(rho)`.
    fn replace_by_mixed(&self, q: usize) -> DenseState {
        let d = self.dim();
        let h = 1 << q;
        let mut out = DenseState::zeros(self.qubits);
        for i in 0..d {
            for j in 0..d {
                if (i ^ j) & h != 0 {
                    continue;
                }
                let (i0, j0) = (i & !h, j & !h);
                let reduced = self.data[i0 * d + j0] + self.data[(i0 | h) * d + (j0 | h)];
                out.data[i * d + j] = reduced * 0.5;
            }
        }
        out
    }

    /// `q rho + (1 - q)/2 * 1_k (x) tr_k(rho)` on qubit `k`.
    pub fn depolarize(&mut self, k: usize, q: f64) {
        if q == 1.0 {
            return;
        }
        let mixed = self.replace_by_mixed(k);
        for (x, m) in self.data.iter_mut().zip(&mixed.data) {
            *x = *x * q + *m * (1.0 - q);
        }
    }

    /// `p rho + (1 - p)/2 (rho + X rho X)` on qubit `k`.
    pub fn bitflip(&mut self, k: usize, p: f64) {
        let mut flipped = self.clone();
        flipped.apply_unitary_1q(k, pauli_x());
        for (x, f) in self.data.iter_mut().zip(&flipped.data) {
            *x = *x * (p + (1.0 - p) / 2.0) + *f * ((1.0 - p) / 2.0);
        }
    }

    fn apply_gate_noise(&mut self, noise: GateNoise, qubits: impl Iterator<Item = usize>) {
        for q in qubits {
            match noise {
                GateNoise::Perfect => {}
                GateNoise::Depolarizing(p) => self.depolarize(q, p),
                GateNoise::BitflipB(p) => self.bitflip(q, p),
            }
        }
    }
}

fn check_size(qubits: usize, limit: usize) -> Result<()> {
    if qubits > limit {
        Err(Error::TooLarge { qubits, limit })
    } else {
        Ok(())
    }
}

fn pauli_x() -> [[C; 2]; 2] {
    [[ZERO, ONE], [ONE, ZERO]]
}

fn hadamard() -> [[C; 2]; 2] {
    let h = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

/// `exp(-i theta X / 2)`.
fn rx(theta: f64) -> [[C; 2]; 2] {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    [[C::new(c, 0.0), C::new(0.0, -s)], [C::new(0.0, -s), C::new(c, 0.0)]]
}

/// `K_j v` with `K_j = X_j prod_{k ~ j} Z_k`.
fn apply_correlation_operator(g: &Graph, j: usize, v: &[C]) -> Vec<C> {
    let nb = g.neighbor_mask(j) as usize;
    (0..v.len())
        .map(|y| {
            let src = v[y ^ 1 << j];
            if (y & nb).count_ones() % 2 == 1 {
                -src
            } else {
                src
            }
        })
        .collect()
}

/// The graph-basis vector `|Psi_mu>`: the normalized image of `|0...0>` under
/// `prod_j (1 + (-1)^mu_j K_j) / 2`.
pub fn graph_basis_vector(g: &Graph, mu: usize) -> Vec<C> {
    let d = g.dim();
    let mut v = vec![ZERO; d];
    v[0] = ONE;
    for j in 0..g.n() {
        let kv = apply_correlation_operator(g, j, &v);
        let sign = if mu >> j & 1 == 1 { -1.0 } else { 1.0 };
        v = v.iter().zip(&kv).map(|(a, b)| (a + b * sign) * 0.5).collect();
    }
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|c| c / norm).collect()
}

/// The same vector built as a circuit: Hadamards, a controlled phase on every
/// edge, then `Z` on each vertex with `mu_v = 1`.
pub fn graph_basis_vector_by_circuit(g: &Graph, mu: usize) -> Vec<C> {
    let d = g.dim();
    let amp = 1.0 / (d as f64).sqrt();
    (0..d)
        .map(|x| {
            let mut parity = (x & mu).count_ones();
            for &(u, v) in g.edges() {
                parity += ((x >> u) & (x >> v) & 1) as u32;
            }
            C::new(if parity.is_multiple_of(2) { amp } else { -amp }, 0.0)
        })
        .collect()
}

/// `|Psi_0><Psi_0|`.
pub fn dense_graph_state(g: &Graph) -> Result<DenseState> {
    check_size(g.n(), MAX_DENSE_QUBITS)?;
    Ok(DenseState::pure(&graph_basis_vector(g, 0)))
}

/// Diagonal of `rho` in the graph basis of `g`.
pub fn graph_basis_twirl(rho: &DenseState, g: &Graph) -> Result<Vec<f64>> {
    check_size(g.n(), MAX_DENSE_QUBITS)?;
    if rho.qubits() != g.n() {
        return Err(Error::InvalidParam(format!(
            "{}-qubit state for a {}-vertex graph",
            rho.qubits(),
            g.n()
        )));
    }
    Ok((0..g.dim())
        .map(|mu| rho.expectation(&graph_basis_vector(g, mu)).re)
        .collect())
}

/// Copy-2 qubit of vertex `v` in the two-copy register.
fn second(g: &Graph, v: usize) -> usize {
    g.n() + v
}

/// Applies the transversal CNOT layer of `protocol` to the `2n`-qubit
/// register, as a map on computational basis indices.
///
/// On the checked side the copy-2 qubit is the computational-basis control,
/// on the other side the copy-1 qubit. This is the orientation that moves the
/// checked syndrome of copy 1 onto copy 2 (in the X basis the roles of
/// control and target are exchanged).
pub fn cnot_layer(g: &Graph, protocol: Protocol) -> impl Fn(usize) -> usize + '_ {
    let checked = g.mask_of(protocol.checked_side());
    move |mut x| {
        for v in 0..g.n() {
            let (c, t) = if checked >> v & 1 == 1 { (second(g, v), v) } else { (v, second(g, v)) };
            if x >> c & 1 == 1 {
                x ^= 1 << t;
            }
        }
        x
    }
}

/// Gate-by-gate simulation of one purification step on `rho1 (x) rho2`.
///
/// Returns the graph-basis diagonal of the kept copy, normalized, and the
/// acceptance probability.
pub fn dense_step(
    rho1: &DenseState,
    rho2: &DenseState,
    g: &Graph,
    protocol: Protocol,
    noise: GateNoise,
    meas_flip: f64,
) -> Result<(Vec<f64>, f64)> {
    check_size(g.n(), MAX_TWO_COPY_VERTICES)?;
    let n = g.n();
    let mut rho = rho1.tensor(rho2);

    let noisy_qubits: Vec<usize> = match noise {
        GateNoise::BitflipB(_) => bits(g.b_mask())
            .flat_map(|v| [v, second(g, v)])
            .collect(),
        _ => (0..2 * n).collect(),
    };
    rho.apply_gate_noise(noise, noisy_qubits.into_iter());
    rho.apply_permutation(cnot_layer(g, protocol));

    // checked-side qubits of copy 2 are read in the X basis
    let checked = g.mask_of(protocol.checked_side());
    for v in bits(checked) {
        rho.apply_unitary_1q(second(g, v), hadamard());
    }

    let syndrome_clear = |o: usize| {
        bits(checked).all(|j| {
            let parity = (o >> j & 1) + (o & g.neighbor_mask(j) as usize).count_ones() as usize;
            parity.is_multiple_of(2)
        })
    };
    let d1 = 1 << n;
    let accept_weight: Vec<f64> = (0..d1)
        .map(|o| {
            (0..d1)
                .filter(|&e| syndrome_clear(o ^ e))
                .map(|e| {
                    let k = (e as u64).count_ones() as i32;
                    meas_flip.powi(k) * (1.0 - meas_flip).powi(n as i32 - k)
                })
                .sum()
        })
        .collect();

    let mut kept = DenseState::zeros(n);
    let d = rho.dim();
    for (o, &w) in accept_weight.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        for a in 0..d1 {
            for b in 0..d1 {
                kept.data[a * d1 + b] += rho.data[(a | o << n) * d + (b | o << n)] * w;
            }
        }
    }
    let p_succ = kept.trace().re;
    if p_succ.is_nan() || p_succ <= 1e-14 {
        return Err(Error::ZeroSuccess(p_succ));
    }
    let lambda = graph_basis_twirl(&kept, g)?;
    Ok((lambda.iter().map(|l| l / p_succ).collect(), p_succ))
}

/// [`dense_step`] for `P1` with depolarizing gate noise `p`.
pub fn dense_p1(
    rho1: &DenseState,
    rho2: &DenseState,
    g: &Graph,
    p: f64,
    meas_flip: f64,
) -> Result<(Vec<f64>, f64)> {
    dense_step(rho1, rho2, g, Protocol::P1, depolarizing(p), meas_flip)
}

/// [`dense_step`] for `P2` with depolarizing gate noise `p`.
pub fn dense_p2(
    rho1: &DenseState,
    rho2: &DenseState,
    g: &Graph,
    p: f64,
    meas_flip: f64,
) -> Result<(Vec<f64>, f64)> {
    dense_step(rho1, rho2, g, Protocol::P2, depolarizing(p), meas_flip)
}

fn depolarizing(p: f64) -> GateNoise {
    if p == 1.0 {
        GateNoise::Perfect
    } else {
        GateNoise::Depolarizing(p)
    }
}

/// Bell basis of two qubits (qubit 0 low) in the order `Phi+, Psi-, Psi+, Phi-`.
fn bell_vectors() -> [[C; 4]; 4] {
    let h = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [
        [h, ZERO, ZERO, h],
        [ZERO, h, -h, ZERO],
        [ZERO, h, h, ZERO],
        [h, ZERO, ZERO, -h],
    ]
}

/// Dense simulation of one bipartite recurrence step on two Bell-diagonal
/// pairs, each qubit depolarized with parameter `p` first.
///
/// Qubits 0/1 hold pair 1 (Alice/Bob), qubits 2/3 pair 2. Alice rotates by
/// `Rx(pi/2)`, Bob by `Rx(-pi/2)`, both apply CNOT pair 1 -> pair 2, pair 2 is
/// read in the Z basis and pair 1 kept when the outcomes agree. Returns the
/// Bell coefficients of the kept pair and the acceptance probability.
pub fn dense_dejmps_step(coeffs: [f64; 4], p: f64) -> ([f64; 4], f64) {
    let bell = bell_vectors();
    let mut pair = DenseState::zeros(2);
    for (c, v) in coeffs.iter().zip(&bell) {
        pair.data
            .iter_mut()
            .zip(DenseState::pure(v).data)
            .for_each(|(x, y)| *x += y * *c);
    }
    let mut rho = pair.tensor(&pair);
    for q in 0..4 {
        rho.depolarize(q, p);
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    for (q, theta) in [(0, half_pi), (2, half_pi), (1, -half_pi), (3, -half_pi)] {
        rho.apply_unitary_1q(q, rx(theta));
    }
    rho.apply_cnot(0, 2);
    rho.apply_cnot(1, 3);

    let mut kept = DenseState::zeros(2);
    for o in [0b00usize, 0b11] {
        for a in 0..4 {
            for b in 0..4 {
                kept.data[a * 4 + b] += rho.get(a | o << 2, b | o << 2);
            }
        }
    }
    let p_succ = kept.trace().re;
    let mut out = [0.0; 4];
    for (slot, v) in out.iter_mut().zip(&bell) {
        *slot = kept.expectation(v).re / p_succ;
    }
    (out, p_succ)
}

/// A random graph-diagonal state with strictly positive coefficients.
pub fn random_gd_state(graph: Arc<Graph>, rng: &mut impl Rng) -> GdState {
    let lambda: Vec<f64> = (0..graph.dim()).map(|_| -rng.gen::<f64>().max(1e-300).ln()).collect();
    GdState::from_coefficients(graph, lambda).expect("positive weights")
}

/// Largest deviations found by [`equivalence_suite`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SuiteReport {
    pub cases: usize,
    /// Coefficient error of the purification steps.
    pub step_coeff_err: f64,
    /// Acceptance-probability error of the purification steps.
    pub step_psucc_err: f64,
    /// Coefficient error of the single-qubit channels.
    pub channel_err: f64,
    /// Largest `| |<expected|CNOT layer|mu,nu>| - 1 |` over random basis pairs.
    pub permutation_err: f64,
}

impl SuiteReport {
    pub fn max_error(&self) -> f64 {
        self.step_coeff_err
            .max(self.step_psucc_err)
            .max(self.channel_err)
            .max(self.permutation_err)
    }
}

/// Graphs used by the equivalence suite.
pub fn suite_graphs() -> Vec<Graph> {
    [
        StandardGraph::Ghz(3),
        StandardGraph::Ghz(4),
        StandardGraph::LinearCluster(3),
        StandardGraph::LinearCluster(4),
        StandardGraph::ClosedCluster(4),
    ]
    .into_iter()
    .map(|k| Graph::standard(k).expect("standard graph"))
    .collect()
}

/// Compares every coefficient-level map against the dense simulation.
///
/// For each suite graph, `states` seeded random states are pushed through
/// both sub-protocols for every `p` in `ps` and `f_m` in `meas_flips`; the
/// channels are compared on the same states and the CNOT layer is checked as
/// a basis permutation on 20 random basis pairs.
pub fn equivalence_suite(seed: u64, states: usize, ps: &[f64], meas_flips: &[f64]) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::default();
    for g in suite_graphs() {
        let g = Arc::new(g);
        rep.permutation_err = rep.permutation_err.max(permutation_error(&g, 20, &mut rng));
        for _ in 0..states {
            let s = random_gd_state(g.clone(), &mut rng);
            let dense = DenseState::from_graph_diagonal(&g, s.coefficients())?;
            rep.channel_err = rep.channel_err.max(channel_error(&s, &dense, &mut rng)?);
            for &p in ps {
                for &fm in meas_flips {
                    for protocol in [Protocol::P1, Protocol::P2] {
                        let fast = step(&s, protocol, &StepConfig::noisy(p, fm))?;
                        let (lambda, p_succ) =
                            dense_step(&dense, &dense, &g, protocol, depolarizing(p), fm)?;
                        rep.step_coeff_err = rep
                            .step_coeff_err
                            .max(max_abs_diff(fast.state.coefficients(), &lambda));
                        rep.step_psucc_err = rep.step_psucc_err.max((fast.p_succ - p_succ).abs());
                        rep.cases += 1;
                    }
                }
            }
        }
    }
    Ok(rep)
}

fn channel_error(s: &GdState, dense: &DenseState, rng: &mut impl Rng) -> Result<f64> {
    let g = s.graph();
    let v = rng.gen_range(0..g.n());
    let q: f64 = rng.gen();
    let mut rho = dense.clone();
    rho.depolarize(v, q);
    let mut err = max_abs_diff(s.depolarize(v, q)?.coefficients(), &graph_basis_twirl(&rho, g)?);

    let p: f64 = rng.gen();
    let mut rho = dense.clone();
    for b in bits(g.b_mask()) {
        rho.bitflip(b, p);
    }
    err = err.max(max_abs_diff(s.bitflip_b_noise(p)?.coefficients(), &graph_basis_twirl(&rho, g)?));
    Ok(err)
}

/// Checks the CNOT layers against the index map
/// `(mu, nu) -> (mu_A | mu_B ^ nu_B, nu_A ^ mu_A | nu_B)` for `P1` and its
/// mirror for `P2`.
fn permutation_error(g: &Graph, samples: usize, rng: &mut impl Rng) -> f64 {
    let d = g.dim();
    let n = g.n();
    let mut err: f64 = 0.0;
    for _ in 0..samples {
        let (mu, nu) = (rng.gen_range(0..d), rng.gen_range(0..d));
        let psi_mu = graph_basis_vector(g, mu);
        let psi_nu = graph_basis_vector(g, nu);
        for protocol in [Protocol::P1, Protocol::P2] {
            let keep = g.mask_of(protocol.checked_side()) as usize;
            let comb = g.mask_of(protocol.combined_side()) as usize;
            let out1 = (mu & keep) | ((mu ^ nu) & comb);
            let out2 = ((mu ^ nu) & keep) | (nu & comb);
            let perm = cnot_layer(g, protocol);
            let mut image = vec![ZERO; d * d];
            for x2 in 0..d {
                for x1 in 0..d {
                    image[perm(x1 | x2 << n)] = psi_mu[x1] * psi_nu[x2];
                }
            }
            let e1 = graph_basis_vector(g, out1);
            let e2 = graph_basis_vector(g, out2);
            let mut overlap = ZERO;
            for x2 in 0..d {
                for x1 in 0..d {
                    overlap += (e1[x1] * e2[x2]).conj() * image[x1 | x2 << n];
                }
            }
            err = err.max((overlap.norm() - 1.0).abs());
        }
    }
    err
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
