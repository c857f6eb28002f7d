use std::sync::Arc;

use graph_purify::analysis::{
    bepp_bound, dejmps_step, f_max, f_min_search, q_min_search, BellDiag, Family, SearchOptions,
};
use graph_purify::{Graph, StandardGraph};
use proptest::prelude::*;

fn graph(kind: StandardGraph) -> Arc<Graph> {
    Arc::new(Graph::standard(kind).unwrap())
}

fn bell() -> impl Strategy<Value = BellDiag> {
    prop::array::uniform4(0.0f64..1.0).prop_filter("nonzero", |w| w.iter().sum::<f64>() > 1e-3).prop_map(|w| {
        let s: f64 = w.iter().sum();
        BellDiag::from_array(w.map(|x| x / s))
    })
}

proptest! {
    #[test]
    fn dejmps_keeps_a_distribution(b in bell(), p in 0.0f64..=1.0) {
        let (out, p_succ) = dejmps_step(&b, p).unwrap();
        let c = out.to_array();
        prop_assert!((c.iter().sum::<f64>() - 1.0).abs() <= 1e-14);
        prop_assert!(c.iter().all(|&x| x >= 0.0));
        prop_assert!(p_succ > 0.0 && p_succ <= 1.0);
    }

    #[test]
    fn perfect_dejmps_purifies_above_one_half(a in 0.52f64..1.0, rest in bell()) {
        let [_, x, y, z] = rest.to_array();
        let r = (1.0 - a) / (x + y + z).max(1e-12);
        let mut s = BellDiag::from_array([a, x * r, y * r, z * r]);
        for _ in 0..200 {
            s = dejmps_step(&s, 1.0).unwrap().0;
        }
        prop_assert!(s.a > 1.0 - 1e-9, "{s:?}");
    }
}

#[test]
fn f_max_does_not_grow_with_noise() {
    for kind in [StandardGraph::LinearCluster(4), StandardGraph::Ghz(3)] {
        let g = graph(kind);
        let mut prev = 1.0;
        for i in 0..=20 {
            let p = 1.0 - 0.0025 * i as f64;
            let f = f_max(&g, p, 0.0).unwrap();
            assert!(f <= prev + 1e-9, "{} p={p}: {f} > {prev}", g.name());
            prev = f;
        }
    }
}

#[test]
fn bepp_bound_does_not_grow_with_noise() {
    let g = graph(StandardGraph::LinearCluster(4));
    let mut prev = 1.0;
    for i in 0..=12 {
        let p = 1.0 - 0.005 * i as f64;
        let b = bepp_bound(&g, p).unwrap();
        assert!(b <= prev + 1e-12);
        prev = b;
    }
}

#[test]
fn bisection_brackets_hold() {
    let g = graph(StandardGraph::LinearCluster(4));
    let opts = SearchOptions::default();
    for r in [
        f_min_search(&g, Family::RhoX, 1.0, &opts).unwrap(),
        f_min_search(&g, Family::RhoX, 0.99, &opts).unwrap(),
        q_min_search(&g, 1.0, &opts).unwrap(),
    ] {
        assert!(r.lo < r.value && r.value < r.hi, "{r:?}");
        assert!(r.hi - r.lo <= 2.0 * r.tolerance, "{r:?}");
        assert!(r.rounds_used > 0);
    }
}

#[test]
fn noisy_f_min_sits_between_perfect_f_min_and_f_max() {
    let g = graph(StandardGraph::LinearCluster(4));
    let opts = SearchOptions::default();
    let perfect = f_min_search(&g, Family::RhoX, 1.0, &opts).unwrap().reported();
    let noisy = f_min_search(&g, Family::RhoX, 0.99, &opts).unwrap().reported();
    let top = f_max(&g, 0.99, 0.0).unwrap();
    assert!(perfect < noisy && noisy < top, "{perfect} {noisy} {top}");
}

#[test]
fn regression_baselines() {
    let path4 = graph(StandardGraph::LinearCluster(4));
    let close = |x: f64, y: f64| (x - y).abs() < 1e-9;
    assert!(close(f_max(&path4, 0.97, 0.0).unwrap(), 0.9237740042869534));
    assert!(close(bepp_bound(&path4, 0.97).unwrap(), 0.8865435264744543));
    let star = graph_purify::analysis::dejmps_fixed_point(0.97).unwrap().to_array();
    let want = [0.9606172319433465, 0.001885293793264584, 0.0028977938228428803, 0.034599680440546225];
    assert!(star.iter().zip(want).all(|(x, y)| close(*x, y)), "{star:?}");
    let f = graph_purify::analysis::f_min(&path4, Family::RhoX, 0.99).unwrap();
    assert!((f - 0.2791607975959778).abs() < 1e-5, "{f}");
}
