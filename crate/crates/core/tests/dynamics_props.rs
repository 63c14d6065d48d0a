//! Dynamics invariants: equivalence with the lifted system, contraction,
//! linearity, and clustering recovery from trajectories.

use gainflock::dynamics::{
    cluster_disagreement, detect_limit, lifted_state, simulate, step, LimitVerdict, Tolerances,
};
use gainflock::generate::{
    random_balanced_strongly_connected, random_gain_graph, random_state,
    random_strongly_connected, random_unbalanced_strongly_connected,
};
use gainflock::graph::{GainArc, GainGraph, GainGraphLike};
use gainflock::group::GroupOrder;
use gainflock::lift::lift_matrix;
use gainflock::sequence::GraphSequence;
use gainflock::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ord(m: u32) -> GroupOrder {
    GroupOrder::new(m).unwrap()
}

fn with_self_arcs(g: &GainGraph) -> GainGraph {
    let order = g.order();
    let mut arcs: Vec<GainArc> = g
        .arcs()
        .iter()
        .filter(|a| !a.is_self_arc())
        .copied()
        .collect();
    arcs.extend((1..=g.vertex_count()).map(|v| GainArc::new(v, v, order.identity())));
    GainGraph::new(g.vertex_count(), order, arcs).unwrap()
}

#[test]
fn one_step_commutes_with_lifting() {
    // z(t+1) = Ḡ·z(t) must reproduce the lifted next state exactly (up to
    // floating error): the expanded system is the same dynamics.
    let mut rng = ChaCha8Rng::seed_from_u64(0x11f7ed);
    for _ in 0..200 {
        let m = rng.gen_range(2..=6);
        let n = rng.gen_range(1..=6);
        let g = with_self_arcs(&random_gain_graph(&mut rng, n, ord(m), 0.4));
        let x = random_state(&mut rng, n);

        let direct = lifted_state(&step(&g, &x).unwrap(), g.order());
        let matrix = lift_matrix(&g).unwrap();
        let z = lifted_state(&x, g.order());
        let dim = matrix.dim();
        let mf = matrix.to_f64();
        for i in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..dim {
                acc += z[j] * mf[i * dim + j];
            }
            assert!(
                (acc - direct[i]).norm() < 1e-10,
                "lifted step mismatch at row {i}: {acc} vs {}",
                direct[i]
            );
        }
    }
}

#[test]
fn max_modulus_never_grows() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0ffee);
    for _ in 0..100 {
        let m = rng.gen_range(2..=5);
        let n = rng.gen_range(1..=6);
        let g = random_strongly_connected(&mut rng, n, ord(m), 0.3);
        let seq = GraphSequence::periodic(vec![g], 1).unwrap();
        let x0 = random_state(&mut rng, n);
        let trace = simulate(&seq, &x0, 50, None).unwrap();
        for w in trace.max_modulus().windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }
}

#[test]
fn dynamics_are_linear_in_the_initial_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x11ea4);
    for _ in 0..50 {
        let m = rng.gen_range(2..=4);
        let n = rng.gen_range(2..=5);
        let g = random_strongly_connected(&mut rng, n, ord(m), 0.4);
        let seq = GraphSequence::periodic(vec![g], 1).unwrap();
        let x0 = random_state(&mut rng, n);
        let scale = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let scaled: Vec<Complex64> = x0.iter().map(|&v| v * scale).collect();
        let t1 = simulate(&seq, &x0, 60, None).unwrap();
        let t2 = simulate(&seq, &scaled, 60, None).unwrap();
        for (a, b) in t1.final_state().iter().zip(t2.final_state()) {
            assert!((a * scale - b).norm() < 1e-9);
        }
    }
}

#[test]
fn recovered_clustering_matches_construction_on_balanced_runs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xb41a4ced);
    let mut checked = 0;
    while checked < 100 {
        let m = rng.gen_range(2..=4);
        let n = rng.gen_range(2..=6);
        let (g, b) = random_balanced_strongly_connected(&mut rng, n, ord(m), 0.3);
        let seq = GraphSequence::periodic(vec![g], 1).unwrap();
        let x0 = random_state(&mut rng, n);
        let trace = simulate(&seq, &x0, 3000, Some(&b)).unwrap();
        match detect_limit(&trace, Tolerances::default()) {
            LimitVerdict::MModulusConsensus { clustering, .. } => {
                assert_eq!(clustering, b);
                checked += 1;
            }
            other => panic!("balanced run did not reach consensus: {other:?}"),
        }
    }
}

#[test]
fn signed_case_polarizes_or_dies() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xa17af1);
    // Balanced signed graphs with both camps occupied: two opposite clusters.
    for _ in 0..40 {
        let n = rng.gen_range(2..=6);
        let (g, b) = random_balanced_strongly_connected(&mut rng, n, ord(2), 0.4);
        if b.class_partition()[1].is_empty() {
            continue;
        }
        let seq = GraphSequence::periodic(vec![g], 1).unwrap();
        let x0 = random_state(&mut rng, n);
        let trace = simulate(&seq, &x0, 4000, Some(&b)).unwrap();
        match detect_limit(&trace, Tolerances::default()) {
            LimitVerdict::MModulusConsensus {
                clustering,
                cluster_values,
                ..
            } => {
                assert_eq!(clustering, b);
                assert_eq!(cluster_values.len(), 2);
                let (v0, v1) = (cluster_values[0].1, cluster_values[1].1);
                assert!((v0 + v1).norm() < 1e-6, "clusters not opposite: {v0} {v1}");
                assert!(v0.norm() > 1e-6);
            }
            other => panic!("balanced signed run: {other:?}"),
        }
    }
    // Unbalanced signed graphs: modulus dies.
    for _ in 0..40 {
        let n = rng.gen_range(2..=6);
        let g = random_unbalanced_strongly_connected(&mut rng, n, ord(2), 0.4);
        let seq = GraphSequence::periodic(vec![g], 1).unwrap();
        let x0 = random_state(&mut rng, n);
        let trace = simulate(&seq, &x0, 6000, None).unwrap();
        assert!(
            detect_limit(&trace, Tolerances::default()).is_zero(),
            "unbalanced signed run kept mass: {}",
            trace.max_modulus().last().unwrap()
        );
    }
}

#[test]
fn adversarial_initial_states_still_die_on_unbalanced_graphs() {
    // Initial states aligned with a clustering pattern are no escape: the
    // zero limit holds for them too.
    let mut rng = ChaCha8Rng::seed_from_u64(0xad7a);
    for _ in 0..20 {
        let m = rng.gen_range(2..=4);
        let n = rng.gen_range(2..=5);
        let g = random_unbalanced_strongly_connected(&mut rng, n, ord(m), 0.3);
        let b = gainflock::generate::random_clustering(&mut rng, n, ord(m));
        let x0: Vec<Complex64> = b.entries().iter().map(|e| e.to_complex()).collect();
        let seq = GraphSequence::periodic(vec![g], 1).unwrap();
        let trace = simulate(&seq, &x0, 8000, None).unwrap();
        assert!(
            trace.max_modulus().last().unwrap() < &1e-6,
            "aligned state survived"
        );
    }
}

#[test]
fn disagreement_vanishes_exactly_on_consensus_patterns() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9a77e4);
    for _ in 0..100 {
        let m = rng.gen_range(2..=8);
        let n = rng.gen_range(1..=7);
        let b = gainflock::generate::random_clustering(&mut rng, n, ord(m));
        let v = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let x: Vec<Complex64> = b.entries().iter().map(|e| e.to_complex() * v).collect();
        assert!(cluster_disagreement(&x, &b) < 1e-12);
    }
}
