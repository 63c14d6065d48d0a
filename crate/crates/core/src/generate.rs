//! Randomized instance generators for property suites and experiments.
//!
//! All generators take a caller-provided RNG so runs are reproducible from a
//! recorded seed.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::balance::{check_balance, ClusteringVector};
use crate::dynamics::StateVector;
use crate::graph::{GainArc, GainGraph, GainGraphLike, Vertex};
use crate::group::GroupOrder;
use crate::sequence::GraphSequence;

/// Uniformly random gain graph: every ordered pair (self-arcs included)
/// carries an arc with probability `arc_prob`, gains uniform over the group.
pub fn random_gain_graph<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    order: GroupOrder,
    arc_prob: f64,
) -> GainGraph {
    let mut arcs = Vec::new();
    for tail in 1..=n {
        for head in 1..=n {
            if rng.gen_bool(arc_prob) {
                arcs.push(GainArc::new(tail, head, random_gain(rng, order)));
            }
        }
    }
    GainGraph::new(n, order, arcs).expect("generated arcs are valid")
}

/// Every gain graph on `n` vertices without self-arcs: each of the
/// `n(n−1)` ordered pairs is absent or carries one of the `m` gains.
/// Self-arcs are left out because identity self-arcs never affect balance
/// and non-identity ones are unbalanced outright.
///
/// The count is `(m+1)^(n(n−1))`; callers keep `n` and `m` small.
pub fn exhaustive_gain_graphs(
    n: usize,
    order: GroupOrder,
) -> impl Iterator<Item = GainGraph> {
    let pairs: Vec<(Vertex, Vertex)> = (1..=n)
        .flat_map(|t| (1..=n).filter(move |&h| h != t).map(move |h| (t, h)))
        .collect();
    let base = u64::from(order.get()) + 1;
    let total = base
        .checked_pow(pairs.len() as u32)
        .expect("enumeration too large for u64");
    (0..total).map(move |mut code| {
        let mut arcs = Vec::new();
        for &(tail, head) in &pairs {
            let digit = (code % base) as u32;
            code /= base;
            if digit > 0 {
                arcs.push(GainArc::new(tail, head, order.element(digit - 1)));
            }
        }
        GainGraph::new(n, order, arcs).expect("enumerated arcs are valid")
    })
}

fn random_gain<R: Rng + ?Sized>(rng: &mut R, order: GroupOrder) -> crate::group::GainExponent {
    order.element(rng.gen_range(0..order.get()))
}

/// Random strongly connected neighbor graph: identity self-arcs everywhere,
/// a random Hamiltonian cycle for strong connectivity, and extra arcs with
/// probability `extra_prob`; gains uniform.
pub fn random_strongly_connected<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    order: GroupOrder,
    extra_prob: f64,
) -> GainGraph {
    let mut perm: Vec<Vertex> = (1..=n).collect();
    // Fisher-Yates.
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        perm.swap(i, j);
    }
    let mut arcs: Vec<GainArc> = (1..=n)
        .map(|v| GainArc::new(v, v, order.identity()))
        .collect();
    if n > 1 {
        for i in 0..n {
            arcs.push(GainArc::new(
                perm[i],
                perm[(i + 1) % n],
                random_gain(rng, order),
            ));
        }
    }
    for tail in 1..=n {
        for head in 1..=n {
            if tail == head {
                continue;
            }
            let on_cycle = arcs.iter().any(|a| a.tail == tail && a.head == head);
            if !on_cycle && rng.gen_bool(extra_prob) {
                arcs.push(GainArc::new(tail, head, random_gain(rng, order)));
            }
        }
    }
    GainGraph::new(n, order, arcs).expect("generated arcs are valid")
}

/// Uniformly random clustering vector (anchor entry stays the identity).
pub fn random_clustering<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    order: GroupOrder,
) -> ClusteringVector {
    let mut entries = Vec::with_capacity(n);
    entries.push(order.identity());
    for _ in 1..n {
        entries.push(random_gain(rng, order));
    }
    ClusteringVector::new(entries).expect("anchor is identity")
}

/// Rewrites every arc gain to `b(head) − b(tail)`, making the graph balanced
/// with respect to `b` while keeping its arc pattern.
pub fn impose_clustering(g: &GainGraph, b: &ClusteringVector) -> GainGraph {
    let m = g.order().get();
    let arcs = g
        .arcs()
        .iter()
        .map(|arc| {
            let e = (b.get(arc.head).exponent() + m - b.get(arc.tail).exponent()) % m;
            GainArc::new(arc.tail, arc.head, g.order().element(e))
        })
        .collect();
    GainGraph::new(g.vertex_count(), g.order(), arcs).expect("same arc pattern")
}

/// Strongly connected neighbor graph balanced by construction, together with
/// its clustering vector.
pub fn random_balanced_strongly_connected<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    order: GroupOrder,
    extra_prob: f64,
) -> (GainGraph, ClusteringVector) {
    let b = random_clustering(rng, n, order);
    let g = impose_clustering(&random_strongly_connected(rng, n, order, extra_prob), &b);
    (g, b)
}

/// Strongly connected unbalanced neighbor graph, found by rejection sampling
/// over random gains. Needs `n ≥ 2`; a fresh gain assignment is drawn until
/// the graph is unbalanced.
pub fn random_unbalanced_strongly_connected<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    order: GroupOrder,
    extra_prob: f64,
) -> GainGraph {
    assert!(n >= 2, "an unbalanced graph needs at least two vertices");
    loop {
        let g = random_strongly_connected(rng, n, order, extra_prob);
        if !check_balance(&g).is_balanced() {
            return g;
        }
    }
}

/// Periodic sequence of strongly connected graphs all balanced with respect
/// to one sampled clustering vector; returns the sequence and that vector.
pub fn random_balanced_sequence<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    order: GroupOrder,
    period: usize,
    extra_prob: f64,
) -> (GraphSequence, ClusteringVector) {
    let b = random_clustering(rng, n, order);
    let graphs: Vec<GainGraph> = (0..period)
        .map(|_| impose_clustering(&random_strongly_connected(rng, n, order, extra_prob), &b))
        .collect();
    (
        GraphSequence::periodic(graphs, period).expect("generated graphs are neighbor graphs"),
        b,
    )
}

/// Periodic sequence of strongly connected graphs each unbalanced on its own,
/// hence repeatedly jointly unbalanced for unit windows.
pub fn random_unbalanced_sequence<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    order: GroupOrder,
    period: usize,
    extra_prob: f64,
) -> GraphSequence {
    let graphs: Vec<GainGraph> = (0..period)
        .map(|_| random_unbalanced_strongly_connected(rng, n, order, extra_prob))
        .collect();
    GraphSequence::periodic(graphs, period).expect("generated graphs are neighbor graphs")
}

/// Initial state with independent standard-normal real and imaginary parts.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> StateVector {
    (0..n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im)
        })
        .collect()
}
