use std::sync::Arc;

use graph_purify::analysis::ra_map_closed_form;
use graph_purify::oracle::{equivalence_suite, max_abs_diff, random_gd_state};
use graph_purify::{
    iterate, p1_step, p2_step, step, xor_square_over_b, GdState, Graph, KernelMode, Protocol, StandardGraph, StepConfig,
    StopCriteria, Verdict,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn graph(kind: StandardGraph) -> Arc<Graph> {
    Arc::new(Graph::standard(kind).unwrap())
}

fn graphs() -> Vec<Arc<Graph>> {
    [
        StandardGraph::Ghz(2),
        StandardGraph::Ghz(4),
        StandardGraph::Ghz(7),
        StandardGraph::LinearCluster(5),
        StandardGraph::LinearCluster(8),
        StandardGraph::ClosedCluster(6),
        StandardGraph::GridCluster { rows: 2, cols: 4 },
    ]
    .into_iter()
    .map(graph)
    .collect()
}

fn state() -> impl Strategy<Value = GdState> {
    (0..graphs().len(), any::<u64>())
        .prop_map(|(i, seed)| random_gd_state(graphs()[i].clone(), &mut ChaCha8Rng::seed_from_u64(seed)))
}

/// Sum over the groups that share the checked part, squared.
fn coincidence_probability(s: &GdState, checked: u64) -> f64 {
    let mut groups = vec![0.0; s.graph().dim()];
    for (m, &l) in s.coefficients().iter().enumerate() {
        groups[m & checked as usize] += l;
    }
    groups.iter().map(|x| x * x).sum()
}

proptest! {
    #[test]
    fn success_probability_identity(s in state()) {
        let g = s.graph();
        let p1 = p1_step(&s, 1.0, 0.0).unwrap();
        prop_assert!((p1.p_succ - coincidence_probability(&s, g.a_mask())).abs() <= 1e-12);
        let p2 = p2_step(&s, 1.0, 0.0).unwrap();
        prop_assert!((p2.p_succ - coincidence_probability(&s, g.b_mask())).abs() <= 1e-12);
    }

    #[test]
    fn outputs_are_normalized(s in state(), p in 0.5f64..=1.0, fm in 0.0f64..=0.5) {
        for protocol in [Protocol::P1, Protocol::P2] {
            let out = step(&s, protocol, &StepConfig::noisy(p, fm)).unwrap();
            let c = out.state.coefficients();
            prop_assert!((c.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            prop_assert!(c.iter().all(|&x| x >= 0.0));
            prop_assert!(out.p_succ > 0.0 && out.p_succ <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn kernel_modes_agree(s in state(), p in 0.5f64..=1.0, fm in 0.0f64..=0.5) {
        for protocol in [Protocol::P1, Protocol::P2] {
            let cfg = StepConfig::noisy(p, fm);
            let fast = step(&s, protocol, &cfg).unwrap();
            let naive = step(&s, protocol, &cfg.with_mode(KernelMode::Naive)).unwrap();
            prop_assert!(max_abs_diff(fast.state.coefficients(), naive.state.coefficients()) <= 1e-12);
            prop_assert!((fast.p_succ - naive.p_succ).abs() <= 1e-12);
        }
    }

    #[test]
    fn rho_a_family_is_closed_under_p1(i in 0..graphs().len(), f in 0.01f64..0.99) {
        let g = graphs()[i].clone();
        let s = GdState::rho_a_family(g.clone(), f).unwrap();
        let out = p1_step(&s, 1.0, 0.0).unwrap().state;
        let lambda = s.coefficients();
        let norm: f64 = lambda.iter().map(|x| x * x).sum();
        for (m, (&x, &y)) in lambda.iter().zip(out.coefficients()).enumerate() {
            if m as u64 & g.b_mask() != 0 {
                prop_assert_eq!(y, 0.0);
            } else {
                prop_assert!((y - x * x / norm).abs() <= 1e-12);
            }
        }
        prop_assert!((out.fidelity() - ra_map_closed_form(f, g.n_a()).unwrap()).abs() <= 1e-12);
    }
}

#[test]
fn fast_and_naive_xor_square_agree_up_to_twelve_qubits() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 2..=12 {
        for kind in [StandardGraph::Ghz(n), StandardGraph::LinearCluster(n)] {
            let g = graph(kind);
            for _ in 0..3 {
                let s = random_gd_state(g.clone(), &mut rng);
                let fast = xor_square_over_b(s.coefficients(), &g, KernelMode::Fast);
                let naive = xor_square_over_b(s.coefficients(), &g, KernelMode::Naive);
                assert!(max_abs_diff(&fast, &naive) <= 1e-12, "{}", g.name());
            }
        }
    }
}

#[test]
fn perfect_p1_gains_above_the_trivial_fixed_point() {
    for n_a in 1..=5 {
        let g = graph(if n_a == 1 { StandardGraph::Ghz(3) } else { StandardGraph::ClosedCluster(2 * n_a) });
        assert_eq!(g.n_a(), n_a);
        let floor = 1.0 / (1u64 << n_a) as f64;
        for f in [0.5 + 1e-3, 0.6, 0.75, 0.9, 0.99].into_iter().filter(|&f| f > floor) {
            let s = GdState::rho_a_family(g.clone(), f).unwrap();
            let out = p1_step(&s, 1.0, 0.0).unwrap();
            assert!(out.state.fidelity() > f, "N_A={n_a} F={f}");
        }
    }
}

#[test]
fn dense_two_copy_simulation_agrees() {
    let rep = equivalence_suite(0, 50, &[1.0, 0.95, 0.9], &[0.0]).unwrap();
    assert!(rep.step_coeff_err <= 1e-10 && rep.step_psucc_err <= 1e-10, "{rep:?}");
    assert!(rep.channel_err <= 1e-12, "{rep:?}");
    assert!(rep.permutation_err <= 1e-10, "{rep:?}");
}

#[test]
fn pure_target_needs_no_rounds() {
    let g = graph(StandardGraph::LinearCluster(4));
    let t = iterate(&GdState::pure_target(g), &[Protocol::P1, Protocol::P2], &StepConfig::default(), &StopCriteria::default())
        .unwrap();
    assert_eq!(t.verdict, Verdict::Converged);
    assert!(t.rounds.is_empty());
    assert_eq!(t.expected_cost, 1.0);
}
