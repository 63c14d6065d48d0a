//! Cross-checks of the balance decision against independent routes: the
//! semi-cycle oracle, the directed-cycle-only check on strongly connected
//! graphs, and clustering-vector round trips.

use gainflock::balance::{
    check_balance, is_balanced_wrt, oracle_check_balance, BalanceVerdict, ClusteringVector,
};
use gainflock::generate::{
    exhaustive_gain_graphs, random_balanced_strongly_connected, random_gain_graph,
    random_strongly_connected,
};
use gainflock::graph::{
    semiwalk_gain, union, GainGraph, GainGraphLike, SemiStep, SemiWalk, StepDirection,
};
use gainflock::group::GroupOrder;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ord(m: u32) -> GroupOrder {
    GroupOrder::new(m).unwrap()
}

fn assert_same_class<G: GainGraphLike>(g: &G, tag: &str) {
    let fast = check_balance(g);
    let oracle = oracle_check_balance(g).expect("graph within oracle bounds");
    assert_eq!(
        fast.is_balanced(),
        oracle.is_balanced(),
        "verdict class mismatch on {tag}"
    );
    match (&fast, &oracle) {
        (BalanceVerdict::Balanced(b1), BalanceVerdict::Balanced(b2)) => {
            // Both anchor component roots at exponent 0, so they agree exactly.
            assert_eq!(b1, b2, "clustering mismatch on {tag}");
            assert!(is_balanced_wrt(g, b1).unwrap());
        }
        (BalanceVerdict::Unbalanced(w1), BalanceVerdict::Unbalanced(w2)) => {
            for w in [w1, w2] {
                assert!(w.is_closed());
                assert!(!semiwalk_gain(g, w).unwrap().is_identity());
            }
        }
        _ => unreachable!(),
    }
}

#[test]
fn oracle_equivalence_exhaustive_small_graphs() {
    // Every gain graph with n ≤ 3 for m ∈ {2, 3, 4}; the n = 4 exhaustive
    // sweep at acceptance scale lives in the CLI crate's acceptance suite.
    for m in [2, 3, 4] {
        let order = ord(m);
        for n in 1..=3 {
            for g in exhaustive_gain_graphs(n, order) {
                assert_same_class(&g, &format!("n={n} m={m}"));
            }
        }
    }
}

#[test]
fn oracle_equivalence_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_ba1a);
    for _ in 0..10_000 {
        let m = rng.gen_range(2..=4);
        let n = rng.gen_range(1..=5);
        let p = rng.gen_range(0.05..0.9);
        let g = random_gain_graph(&mut rng, n, ord(m), p);
        assert_same_class(&g, &format!("random n={n} m={m}"));
    }
}

#[test]
fn oracle_equivalence_random_multigraph_unions() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xab1e);
    for _ in 0..2_000 {
        let m = rng.gen_range(2..=4);
        let n = rng.gen_range(1..=4);
        let a = random_gain_graph(&mut rng, n, ord(m), 0.4);
        let b = random_gain_graph(&mut rng, n, ord(m), 0.4);
        let u = union([&a, &b]).unwrap();
        if u.arcs().len() > 24 {
            continue;
        }
        assert_same_class(&u, &format!("union n={n} m={m}"));
    }
}

#[test]
fn balanced_verdicts_round_trip_through_is_balanced_wrt() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0f0f);
    for _ in 0..2_000 {
        let m = rng.gen_range(2..=6);
        let n = rng.gen_range(2..=8);
        // A graph balanced with respect to some b must be reported balanced,
        // and the reported clustering must itself pass the arc-level check.
        let (g, b) = random_balanced_strongly_connected(&mut rng, n, ord(m), 0.3);
        let verdict = check_balance(&g);
        let reported = verdict.clustering().expect("balanced by construction");
        assert!(is_balanced_wrt(&g, reported).unwrap());
        // Strongly connected, so the clustering is unique given its anchor.
        assert_eq!(reported, &b);
    }
}

/// Directed-cycle-only balance check: enumerates cycles (forward steps only)
/// anchored at their smallest vertex and demands identity gain on each.
fn all_directed_cycles_have_identity_gain(g: &GainGraph) -> bool {
    let n = g.vertex_count();
    let m = g.order().get();
    for arc in g.arcs() {
        if arc.is_self_arc() && !arc.gain.is_identity() {
            return false;
        }
    }
    let mut outs = vec![Vec::new(); n]; // 0-based tails
    for arc in g.arcs() {
        if !arc.is_self_arc() {
            outs[arc.tail - 1].push(*arc);
        }
    }

    fn dfs(
        outs: &[Vec<gainflock::graph::GainArc>],
        m: u32,
        anchor: usize,
        v: usize,
        visited: u32,
        gain: u32,
    ) -> bool {
        for arc in &outs[v] {
            let w = arc.head - 1;
            let next = (gain + arc.gain.exponent()) % m;
            if w == anchor {
                if next != 0 {
                    return false;
                }
                continue;
            }
            if w < anchor || visited & (1 << w) != 0 {
                continue;
            }
            if !dfs(outs, m, anchor, w, visited | (1 << w), next) {
                return false;
            }
        }
        true
    }

    (0..n).all(|anchor| dfs(&outs, m, anchor, anchor, 1 << anchor, 0))
}

#[test]
fn cycle_check_suffices_on_strongly_connected_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc1c1e);
    for _ in 0..2_000 {
        let m = rng.gen_range(2..=4);
        let n = rng.gen_range(2..=6);
        let g = random_strongly_connected(&mut rng, n, ord(m), 0.3);
        assert_eq!(
            all_directed_cycles_have_identity_gain(&g),
            check_balance(&g).is_balanced(),
            "cycle-only check diverged on a strongly connected graph"
        );
    }
}

#[test]
fn cycle_check_fails_without_strong_connectivity() {
    // No directed cycles at all, yet the semi-cycle 1 -> 2 <- 3 -> 1 has
    // gain α₁: the cycle-only check needs strong connectivity.
    let order = ord(3);
    let g = GainGraph::new(
        3,
        order,
        vec![
            gainflock::graph::GainArc::new(1, 2, order.element(1)),
            gainflock::graph::GainArc::new(3, 2, order.element(0)),
            gainflock::graph::GainArc::new(3, 1, order.element(0)),
        ],
    )
    .unwrap();
    assert!(all_directed_cycles_have_identity_gain(&g));
    assert!(!check_balance(&g).is_balanced());
}

#[test]
fn balance_class_survives_self_union() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd0b1e);
    for _ in 0..1_000 {
        let m = rng.gen_range(2..=4);
        let n = rng.gen_range(1..=5);
        let g = random_gain_graph(&mut rng, n, ord(m), 0.4);
        let doubled = union([&g, &g]).unwrap();
        assert_eq!(
            check_balance(&g).is_balanced(),
            check_balance(&doubled).is_balanced()
        );
    }
}

#[test]
fn clustering_vector_unique_on_connected_balanced_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x117);
    for _ in 0..500 {
        let m = rng.gen_range(2..=4);
        let n = rng.gen_range(2..=5);
        let (g, _) = random_balanced_strongly_connected(&mut rng, n, ord(m), 0.3);
        let via_fast = check_balance(&g).clustering().cloned().unwrap();
        let via_oracle = oracle_check_balance(&g)
            .unwrap()
            .clustering()
            .cloned()
            .unwrap();
        assert_eq!(via_fast, via_oracle);
        // Any b' the graph is balanced with respect to is the same vector.
        for b in candidate_clusterings(n, ord(m)) {
            if is_balanced_wrt(&g, &b).unwrap() {
                assert_eq!(b, via_fast);
            }
        }
    }
}

fn candidate_clusterings(n: usize, order: GroupOrder) -> Vec<ClusteringVector> {
    let m = order.get();
    let total = (m as u64).pow((n - 1) as u32);
    (0..total)
        .map(|mut code| {
            let mut exps = vec![0u32];
            for _ in 1..n {
                exps.push((code % u64::from(m)) as u32);
                code /= u64::from(m);
            }
            ClusteringVector::from_exponents(order, &exps).unwrap()
        })
        .collect()
}

#[test]
fn witnesses_traverse_parallel_arcs_by_identity() {
    // Union with itself plus one twisted copy: witness must pick arcs, not
    // just vertex pairs.
    let order = ord(3);
    let a = GainGraph::new(
        2,
        order,
        vec![gainflock::graph::GainArc::new(1, 2, order.element(0))],
    )
    .unwrap();
    let b = GainGraph::new(
        2,
        order,
        vec![gainflock::graph::GainArc::new(1, 2, order.element(2))],
    )
    .unwrap();
    let u = union([&a, &b]).unwrap();
    let w = check_balance(&u).witness().cloned().expect("unbalanced");
    assert_eq!(w.len(), 2);
    let dirs: Vec<StepDirection> = w.steps().iter().map(|s| s.direction).collect();
    assert!(dirs.contains(&StepDirection::Forward));
    assert!(dirs.contains(&StepDirection::Backward));
    assert!(!semiwalk_gain(&u, &w).unwrap().is_identity());
}

#[test]
fn semiwalk_reversal_and_composition_on_random_walks() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x3a3a);
    for _ in 0..500 {
        let m = rng.gen_range(2..=6);
        let n = rng.gen_range(2..=6);
        let g = random_strongly_connected(&mut rng, n, ord(m), 0.5);
        // Random semi-walk: stitch random incident arcs.
        let mut walk = SemiWalk::at(rng.gen_range(1..=n));
        for _ in 0..rng.gen_range(0..12) {
            let here = walk.end();
            let options: Vec<SemiStep> = g
                .arcs()
                .iter()
                .flat_map(|a| {
                    let mut v = Vec::new();
                    if a.tail == here {
                        v.push(SemiStep::forward(*a));
                    }
                    if a.head == here {
                        v.push(SemiStep::backward(*a));
                    }
                    v
                })
                .collect();
            let step = options[rng.gen_range(0..options.len())];
            walk.push(step).unwrap();
        }
        let gain = semiwalk_gain(&g, &walk).unwrap();
        assert_eq!(semiwalk_gain(&g, &walk.reversed()).unwrap(), gain.inv());

        // Split and recompose: gain(w) = gain(prefix)·gain(suffix).
        let cut = rng.gen_range(0..=walk.len());
        let prefix = SemiWalk::new(walk.start(), walk.steps()[..cut].to_vec()).unwrap();
        let suffix = SemiWalk::new(prefix.end(), walk.steps()[cut..].to_vec()).unwrap();
        let combined = semiwalk_gain(&g, &prefix)
            .unwrap()
            .try_mul(semiwalk_gain(&g, &suffix).unwrap())
            .unwrap();
        assert_eq!(combined, gain);
    }
}
