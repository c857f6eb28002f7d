//! Bipartite recurrence (DEJMPS) and the upper bound it implies for building
//! graph states out of purified pairs.

use std::sync::Arc;

use crate::error::{check_unit, Error, Result};
use crate::graph::Graph;
use crate::state::GdState;

/// Bell-diagonal two-qubit state with coefficients on
/// `Phi+, Psi-, Psi+, Phi-`; `a` is the fidelity with `Phi+`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellDiag {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl BellDiag {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let s = BellDiag { a, b, c, d };
        let arr = s.to_array();
        if arr.iter().any(|&x| x.is_nan() || x < 0.0) || (arr.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::BadDistribution(arr));
        }
        Ok(s)
    }

    pub const PERFECT: BellDiag = BellDiag { a: 1.0, b: 0.0, c: 0.0, d: 0.0 };

    /// Fidelity `f`, the rest spread evenly.
    pub fn werner(f: f64) -> Result<Self> {
        check_unit("F", f)?;
        let r = (1.0 - f) / 3.0;
        Ok(BellDiag { a: f, b: r, c: r, d: r })
    }

    pub fn fidelity(&self) -> f64 {
        self.a
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn from_array(x: [f64; 4]) -> Self {
        BellDiag { a: x[0], b: x[1], c: x[2], d: x[3] }
    }

    /// Probabilities `(p_I, p_X, p_Y, p_Z)` of the one-sided Pauli channel
    /// that turns `Phi+` into this state.
    pub fn as_pauli_channel(&self) -> [f64; 4] {
        [self.a, self.c, self.b, self.d]
    }
}

/// One DEJMPS round on two copies of `b`, every qubit first depolarized with
/// parameter `p`. Returns the kept pair and the acceptance probability.
pub fn dejmps_step(b: &BellDiag, p: f64) -> Result<(BellDiag, f64)> {
    check_unit("p", p)?;
    let x = b.to_array();
    if x.iter().any(|&v| v.is_nan() || v < 0.0) || (x.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(Error::BadDistribution(x));
    }
    // two one-sided depolarizations per pair
    let p2 = p * p;
    let [a, bb, c, d] = x.map(|v| p2 * v + (1.0 - p2) / 4.0);
    let norm = (a + bb).powi(2) + (c + d).powi(2);
    if norm.is_nan() || norm <= 0.0 {
        return Err(Error::ZeroSuccess(norm));
    }
    let out = BellDiag {
        a: (a * a + bb * bb) / norm,
        b: 2.0 * c * d / norm,
        c: (c * c + d * d) / norm,
        d: 2.0 * a * bb / norm,
    };
    Ok((out, norm))
}

/// Stationary state of noisy DEJMPS reached from a perfect pair.
pub fn dejmps_fixed_point(p: f64) -> Result<BellDiag> {
    let mut b = BellDiag::PERFECT;
    for _ in 0..100_000 {
        let (next, _) = dejmps_step(&b, p)?;
        let moved = (next.a - b.a).abs();
        b = next;
        if moved < 1e-15 {
            break;
        }
    }
    if b.a <= 0.5 + 1e-9 {
        return Err(Error::NoFixedPoint(format!(
            "bipartite recurrence loses all entanglement at p = {p}"
        )));
    }
    Ok(b)
}

/// Best graph-state fidelity obtainable from purified pairs at the DEJMPS
/// fixed point, assuming perfect assembly.
///
/// One party prepares the graph state locally and teleports the other
/// `n - 1` qubits over fixed-point pairs, so each of those qubits suffers the
/// one-sided Pauli channel of a pair. The home vertex is chosen to maximize
/// the resulting fidelity.
pub fn bepp_bound(g: &Arc<Graph>, p: f64) -> Result<f64> {
    check_unit("p", p)?;
    if p == 1.0 {
        return Ok(1.0);
    }
    let pair = dejmps_fixed_point(p)?;
    let channel = pair.as_pauli_channel();
    let mut best: f64 = 0.0;
    for home in 0..g.n() {
        let mut s = GdState::pure_target(g.clone());
        for v in (0..g.n()).filter(|&v| v != home) {
            s = s.apply_pauli_channel(v, channel)?;
        }
        best = best.max(s.fidelity());
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::dense_dejmps_step;

    #[test]
    fn perfect_pair_is_fixed() {
        let (b, p) = dejmps_step(&BellDiag::PERFECT, 1.0).unwrap();
        assert_eq!(b, BellDiag::PERFECT);
        assert_eq!(p, 1.0);
    }

    #[test]
    fn matches_dense_circuit() {
        let states = [
            BellDiag::werner(0.7).unwrap(),
            BellDiag::new(0.6, 0.25, 0.1, 0.05).unwrap(),
            BellDiag::new(0.4, 0.1, 0.2, 0.3).unwrap(),
        ];
        for s in states {
            for p in [1.0, 0.97, 0.8] {
                let (fast, pf) = dejmps_step(&s, p).unwrap();
                let (dense, pd) = dense_dejmps_step(s.to_array(), p);
                assert!((pf - pd).abs() < 1e-12, "{s:?} p={p}");
                for (x, y) in fast.to_array().iter().zip(dense) {
                    assert!((x - y).abs() < 1e-12, "{s:?} p={p}: {fast:?} vs {dense:?}");
                }
            }
        }
    }

    #[test]
    fn werner_purifies_to_perfect() {
        let mut b = BellDiag::werner(0.7).unwrap();
        let mut rounds = 0;
        while b.a < 1.0 - 1e-12 && rounds < 30 {
            b = dejmps_step(&b, 1.0).unwrap().0;
            let sum: f64 = b.to_array().iter().sum();
            assert!((sum - 1.0).abs() < 1e-14);
            assert!(b.to_array().iter().all(|&x| x >= 0.0));
            rounds += 1;
        }
        assert!(b.a >= 1.0 - 1e-12, "{b:?} after {rounds}");
    }

    #[test]
    fn noisy_fixed_point_is_sub_unit() {
        let b = dejmps_fixed_point(0.97).unwrap();
        assert!(b.a > 0.5 && b.a < 1.0);
        let (again, _) = dejmps_step(&b, 0.97).unwrap();
        assert!((again.a - b.a).abs() < 1e-13);
        assert!(dejmps_fixed_point(0.5).is_err());
    }

    #[test]
    fn pauli_channel_mapping() {
        // teleporting half of Phi+ through a pair applies the pair's Pauli frame
        let b = BellDiag::new(0.7, 0.1, 0.15, 0.05).unwrap();
        assert_eq!(b.as_pauli_channel(), [0.7, 0.15, 0.1, 0.05]);
    }

    #[test]
    fn bound_for_a_single_edge_is_pair_fidelity() {
        let g = Arc::new(Graph::standard(crate::graph::StandardGraph::Ghz(2)).unwrap());
        let f = bepp_bound(&g, 0.97).unwrap();
        let b = dejmps_fixed_point(0.97).unwrap();
        assert!((f - b.a).abs() < 1e-12);
        assert_eq!(bepp_bound(&g, 1.0).unwrap(), 1.0);
    }
}
