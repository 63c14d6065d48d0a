//! Gain graphs, multigraphs, semi-walks and connectivity.
//!
//! Vertices are labeled `1..=n`. A [`GainGraph`] carries at most one arc per
//! ordered vertex pair; unions of graphs produce a [`GainMultigraph`] where
//! parallel arcs with arbitrary gains are allowed. Both expose their arcs
//! through [`GainGraphLike`], which is what every analysis in this crate is
//! written against.
//!
//! A *neighbor graph* is a gain graph where every vertex carries a self-arc
//! with identity gain; [`GainGraph::validate_neighbor_graph`] checks that
//! without restricting what plain gain graphs may contain.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::group::{GainExponent, GroupError, GroupOrder};
use crate::scc;

/// 1-based vertex label.
pub type Vertex = usize;

/// A directed arc `tail -> head` carrying a group element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GainArc {
    pub tail: Vertex,
    pub head: Vertex,
    pub gain: GainExponent,
}

impl GainArc {
    pub fn new(tail: Vertex, head: Vertex, gain: GainExponent) -> Self {
        GainArc { tail, head, gain }
    }

    pub fn is_self_arc(&self) -> bool {
        self.tail == self.head
    }
}

impl fmt::Display for GainArc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} (gain {})", self.tail, self.head, self.gain)
    }
}

/// Common read surface of [`GainGraph`] and [`GainMultigraph`].
pub trait GainGraphLike {
    fn vertex_count(&self) -> usize;
    fn order(&self) -> GroupOrder;
    fn arcs(&self) -> &[GainArc];

    /// Out-adjacency over vertex indices, 0-based, gains dropped.
    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for arc in self.arcs() {
            adj[arc.tail - 1].push(arc.head - 1);
        }
        adj
    }
}

/// Directed graph on `1..=n` with at most one gain-labeled arc per ordered pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GainGraph {
    n: usize,
    order: GroupOrder,
    arcs: Vec<GainArc>,
}

impl GainGraph {
    /// Builds a gain graph, validating labels, gain orders and pair uniqueness.
    /// Arcs are stored sorted, so equal graphs compare equal.
    pub fn new(n: usize, order: GroupOrder, mut arcs: Vec<GainArc>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::EmptyVertexSet);
        }
        validate_arcs(n, order, &arcs)?;
        arcs.sort_unstable();
        for w in arcs.windows(2) {
            if (w[0].tail, w[0].head) == (w[1].tail, w[1].head) {
                return Err(GraphError::DuplicateArc {
                    tail: w[0].tail,
                    head: w[0].head,
                });
            }
        }
        Ok(GainGraph { n, order, arcs })
    }

    /// Checks the neighbor-graph convention: every vertex has a self-arc and
    /// every self-arc carries the identity gain.
    pub fn validate_neighbor_graph(&self) -> Result<(), GraphError> {
        let mut has_self = vec![false; self.n];
        for arc in &self.arcs {
            if arc.is_self_arc() {
                if !arc.gain.is_identity() {
                    return Err(GraphError::NonIdentitySelfArc { vertex: arc.tail });
                }
                has_self[arc.tail - 1] = true;
            }
        }
        match has_self.iter().position(|&b| !b) {
            Some(i) => Err(GraphError::MissingSelfArc { vertex: i + 1 }),
            None => Ok(()),
        }
    }

    /// The gain on arc `tail -> head` if present.
    pub fn gain_of(&self, tail: Vertex, head: Vertex) -> Option<GainExponent> {
        self.arcs
            .iter()
            .find(|a| a.tail == tail && a.head == head)
            .map(|a| a.gain)
    }

    /// In-neighbors of each vertex: entry `i` lists the arcs with head `i + 1`.
    pub fn in_arcs(&self) -> Vec<Vec<GainArc>> {
        let mut ins = vec![Vec::new(); self.n];
        for arc in &self.arcs {
            ins[arc.head - 1].push(*arc);
        }
        ins
    }
}

impl GainGraphLike for GainGraph {
    fn vertex_count(&self) -> usize {
        self.n
    }

    fn order(&self) -> GroupOrder {
        self.order
    }

    fn arcs(&self) -> &[GainArc] {
        &self.arcs
    }
}

/// Directed multigraph: parallel arcs with any gains are permitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GainMultigraph {
    n: usize,
    order: GroupOrder,
    arcs: Vec<GainArc>,
}

impl GainMultigraph {
    pub fn new(n: usize, order: GroupOrder, mut arcs: Vec<GainArc>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::EmptyVertexSet);
        }
        validate_arcs(n, order, &arcs)?;
        arcs.sort_unstable();
        Ok(GainMultigraph { n, order, arcs })
    }
}

impl From<&GainGraph> for GainMultigraph {
    fn from(g: &GainGraph) -> Self {
        GainMultigraph {
            n: g.n,
            order: g.order,
            arcs: g.arcs.clone(),
        }
    }
}

impl GainGraphLike for GainMultigraph {
    fn vertex_count(&self) -> usize {
        self.n
    }

    fn order(&self) -> GroupOrder {
        self.order
    }

    fn arcs(&self) -> &[GainArc] {
        &self.arcs
    }
}

fn validate_arcs(n: usize, order: GroupOrder, arcs: &[GainArc]) -> Result<(), GraphError> {
    for arc in arcs {
        if arc.tail == 0 || arc.tail > n || arc.head == 0 || arc.head > n {
            return Err(GraphError::VertexOutOfRange {
                tail: arc.tail,
                head: arc.head,
                n,
            });
        }
        if arc.gain.order() != order {
            return Err(GraphError::Group(GroupError::MismatchedOrders {
                left: order.get(),
                right: arc.gain.order().get(),
            }));
        }
    }
    Ok(())
}

/// Multiset union of the arc sets of graphs over a shared vertex set.
pub fn union<'a, G, I>(parts: I) -> Result<GainMultigraph, GraphError>
where
    G: GainGraphLike + 'a,
    I: IntoIterator<Item = &'a G>,
{
    let mut iter = parts.into_iter();
    let first = iter.next().ok_or(GraphError::EmptyUnion)?;
    let n = first.vertex_count();
    let order = first.order();
    let mut arcs = first.arcs().to_vec();
    for g in iter {
        if g.vertex_count() != n || g.order() != order {
            return Err(GraphError::IncompatibleUnion {
                expected_n: n,
                expected_m: order.get(),
                got_n: g.vertex_count(),
                got_m: g.order().get(),
            });
        }
        arcs.extend_from_slice(g.arcs());
    }
    GainMultigraph::new(n, order, arcs)
}

/// Direction in which a semi-walk traverses an arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepDirection {
    Forward,
    Backward,
}

/// One traversal step: an arc together with the direction it is crossed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SemiStep {
    pub arc: GainArc,
    pub direction: StepDirection,
}

impl SemiStep {
    pub fn forward(arc: GainArc) -> Self {
        SemiStep {
            arc,
            direction: StepDirection::Forward,
        }
    }

    pub fn backward(arc: GainArc) -> Self {
        SemiStep {
            arc,
            direction: StepDirection::Backward,
        }
    }

    /// Vertex the step leaves from.
    pub fn from(&self) -> Vertex {
        match self.direction {
            StepDirection::Forward => self.arc.tail,
            StepDirection::Backward => self.arc.head,
        }
    }

    /// Vertex the step arrives at.
    pub fn to(&self) -> Vertex {
        match self.direction {
            StepDirection::Forward => self.arc.head,
            StepDirection::Backward => self.arc.tail,
        }
    }

    /// The same arc crossed the other way.
    pub fn reversed(&self) -> Self {
        SemiStep {
            arc: self.arc,
            direction: match self.direction {
                StepDirection::Forward => StepDirection::Backward,
                StepDirection::Backward => StepDirection::Forward,
            },
        }
    }
}

/// A vertex-consistent sequence of arc traversals; arc directions may be
/// ignored. With all steps forward it is an ordinary walk.
///
/// Steps identify arcs, not just vertices, so parallel arcs of a multigraph
/// are traversed unambiguously.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemiWalk {
    start: Vertex,
    steps: Vec<SemiStep>,
}

impl SemiWalk {
    /// The empty semi-walk sitting at `start`.
    pub fn at(start: Vertex) -> Self {
        SemiWalk {
            start,
            steps: Vec::new(),
        }
    }

    /// Builds a semi-walk, checking that consecutive steps share a vertex.
    pub fn new(start: Vertex, steps: Vec<SemiStep>) -> Result<Self, GraphError> {
        let mut at = start;
        for step in &steps {
            if step.from() != at {
                return Err(GraphError::DisconnectedStep {
                    expected: at,
                    found: step.from(),
                });
            }
            at = step.to();
        }
        Ok(SemiWalk { start, steps })
    }

    pub fn start(&self) -> Vertex {
        self.start
    }

    pub fn end(&self) -> Vertex {
        self.steps.last().map_or(self.start, |s| s.to())
    }

    pub fn steps(&self) -> &[SemiStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.end() == self.start
    }

    pub fn is_walk(&self) -> bool {
        self.steps
            .iter()
            .all(|s| s.direction == StepDirection::Forward)
    }

    /// Appends a step; the step must leave from the current end vertex.
    pub fn push(&mut self, step: SemiStep) -> Result<(), GraphError> {
        if step.from() != self.end() {
            return Err(GraphError::DisconnectedStep {
                expected: self.end(),
                found: step.from(),
            });
        }
        self.steps.push(step);
        Ok(())
    }

    /// The same semi-walk traversed end to start.
    pub fn reversed(&self) -> SemiWalk {
        SemiWalk {
            start: self.end(),
            steps: self.steps.iter().rev().map(|s| s.reversed()).collect(),
        }
    }
}

/// Gain along a walk: the product of arc gains in traversal order.
///
/// The walk must consist of forward steps only and reference arcs of `g`.
pub fn walk_gain<G: GainGraphLike + ?Sized>(g: &G, walk: &SemiWalk) -> Result<GainExponent, GraphError> {
    if !walk.is_walk() {
        return Err(GraphError::BackwardStepInWalk);
    }
    semiwalk_gain(g, walk)
}

/// Gain along a semi-walk: forward steps contribute their gain, backward steps
/// the inverse gain.
pub fn semiwalk_gain<G: GainGraphLike + ?Sized>(
    g: &G,
    walk: &SemiWalk,
) -> Result<GainExponent, GraphError> {
    let mut acc = g.order().identity();
    for step in walk.steps() {
        if !g.arcs().contains(&step.arc) {
            return Err(GraphError::ArcNotInGraph { arc: step.arc });
        }
        let factor = match step.direction {
            StepDirection::Forward => step.arc.gain,
            StepDirection::Backward => step.arc.gain.inv(),
        };
        acc = acc.try_mul(factor).map_err(GraphError::Group)?;
    }
    Ok(acc)
}

/// Standard digraph strong connectivity; gains are ignored.
pub fn is_strongly_connected<G: GainGraphLike + ?Sized>(g: &G) -> bool {
    scc::tarjan_scc(&g.adjacency()).len() == 1
}

/// Connected components when arc directions are ignored, as sorted 1-based
/// vertex sets ordered by smallest member.
pub fn weak_components<G: GainGraphLike + ?Sized>(g: &G) -> Vec<Vec<Vertex>> {
    scc::undirected_components(&g.adjacency())
        .into_iter()
        .map(|comp| comp.into_iter().map(|v| v + 1).collect())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphError {
    EmptyVertexSet,
    VertexOutOfRange { tail: Vertex, head: Vertex, n: usize },
    DuplicateArc { tail: Vertex, head: Vertex },
    MissingSelfArc { vertex: Vertex },
    NonIdentitySelfArc { vertex: Vertex },
    Group(GroupError),
    EmptyUnion,
    IncompatibleUnion { expected_n: usize, expected_m: u32, got_n: usize, got_m: u32 },
    DisconnectedStep { expected: Vertex, found: Vertex },
    BackwardStepInWalk,
    ArcNotInGraph { arc: GainArc },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::EmptyVertexSet => write!(f, "graph needs at least one vertex"),
            GraphError::VertexOutOfRange { tail, head, n } => {
                write!(f, "arc ({tail}, {head}) outside vertex range 1..={n}")
            }
            GraphError::DuplicateArc { tail, head } => {
                write!(f, "duplicate arc ({tail}, {head}) in gain graph")
            }
            GraphError::MissingSelfArc { vertex } => {
                write!(f, "vertex {vertex} lacks the self-arc required of a neighbor graph")
            }
            GraphError::NonIdentitySelfArc { vertex } => {
                write!(f, "self-arc at vertex {vertex} must carry the identity gain")
            }
            GraphError::Group(e) => write!(f, "{e}"),
            GraphError::EmptyUnion => write!(f, "union of an empty graph list"),
            GraphError::IncompatibleUnion {
                expected_n,
                expected_m,
                got_n,
                got_m,
            } => write!(
                f,
                "union over mismatched graphs: expected n={expected_n}, m={expected_m}, got n={got_n}, m={got_m}"
            ),
            GraphError::DisconnectedStep { expected, found } => {
                write!(f, "semi-walk step starts at {found}, expected {expected}")
            }
            GraphError::BackwardStepInWalk => write!(f, "walk contains a backward step"),
            GraphError::ArcNotInGraph { arc } => {
                write!(f, "semi-walk references arc {arc} absent from the graph")
            }
        }
    }
}

impl core::error::Error for GraphError {}

impl From<GroupError> for GraphError {
    fn from(e: GroupError) -> Self {
        GraphError::Group(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupOrder;

    fn ord(m: u32) -> GroupOrder {
        GroupOrder::new(m).unwrap()
    }

    fn arc(tail: Vertex, head: Vertex, e: u32, m: u32) -> GainArc {
        GainArc::new(tail, head, ord(m).element(e))
    }

    /// The three-vertex example graph: cycle 3 -> 1 -> 2 -> 3 with gains
    /// 1, α₁, α₂ (m = 3), self-arcs at every vertex.
    fn example_graph() -> GainGraph {
        let m = 3;
        GainGraph::new(
            3,
            ord(m),
            vec![
                arc(1, 1, 0, m),
                arc(2, 2, 0, m),
                arc(3, 3, 0, m),
                arc(3, 1, 0, m),
                arc(1, 2, 1, m),
                arc(2, 3, 2, m),
            ],
        )
        .unwrap()
    }

    #[test]
    fn rejects_duplicate_ordered_pairs() {
        let err = GainGraph::new(2, ord(3), vec![arc(1, 2, 0, 3), arc(1, 2, 1, 3)]);
        assert_eq!(err, Err(GraphError::DuplicateArc { tail: 1, head: 2 }));
    }

    #[test]
    fn rejects_out_of_range_vertices() {
        assert!(GainGraph::new(2, ord(3), vec![arc(1, 3, 0, 3)]).is_err());
        assert!(GainGraph::new(2, ord(3), vec![arc(0, 1, 0, 3)]).is_err());
    }

    #[test]
    fn rejects_mismatched_gain_order() {
        let err = GainGraph::new(2, ord(3), vec![arc(1, 2, 0, 4)]);
        assert!(matches!(err, Err(GraphError::Group(_))));
    }

    #[test]
    fn neighbor_validation() {
        assert!(example_graph().validate_neighbor_graph().is_ok());

        let missing = GainGraph::new(2, ord(2), vec![arc(1, 1, 0, 2)]).unwrap();
        assert_eq!(
            missing.validate_neighbor_graph(),
            Err(GraphError::MissingSelfArc { vertex: 2 })
        );

        let twisted =
            GainGraph::new(1, ord(2), vec![arc(1, 1, 1, 2)]).unwrap();
        assert_eq!(
            twisted.validate_neighbor_graph(),
            Err(GraphError::NonIdentitySelfArc { vertex: 1 })
        );
    }

    #[test]
    fn empty_walk_has_identity_gain() {
        let g = example_graph();
        let w = SemiWalk::at(2);
        assert_eq!(walk_gain(&g, &w).unwrap(), ord(3).element(0));
    }

    #[test]
    fn example_cycle_gain_is_identity() {
        let g = example_graph();
        let w = SemiWalk::new(
            1,
            vec![
                SemiStep::forward(arc(1, 2, 1, 3)),
                SemiStep::forward(arc(2, 3, 2, 3)),
                SemiStep::forward(arc(3, 1, 0, 3)),
            ],
        )
        .unwrap();
        assert!(w.is_closed());
        assert_eq!(walk_gain(&g, &w).unwrap(), ord(3).element(0));
    }

    #[test]
    fn single_arc_walk_gain() {
        let g = example_graph();
        let w = SemiWalk::new(1, vec![SemiStep::forward(arc(1, 2, 1, 3))]).unwrap();
        assert_eq!(walk_gain(&g, &w).unwrap(), ord(3).element(1));
    }

    #[test]
    fn walk_gain_rejects_backward_steps() {
        let g = example_graph();
        let w = SemiWalk::new(2, vec![SemiStep::backward(arc(1, 2, 1, 3))]).unwrap();
        assert_eq!(walk_gain(&g, &w), Err(GraphError::BackwardStepInWalk));
        // The same steps are fine as a semi-walk; backward inverts the gain.
        assert_eq!(semiwalk_gain(&g, &w).unwrap(), ord(3).element(2));
    }

    #[test]
    fn semiwalk_gain_inverts_backward_arcs() {
        let g = example_graph();
        // 2 -> 1 against arc (1,2) gain α₁, then 1 -> 3 against arc (3,1) gain 1.
        let w = SemiWalk::new(
            2,
            vec![
                SemiStep::backward(arc(1, 2, 1, 3)),
                SemiStep::backward(arc(3, 1, 0, 3)),
            ],
        )
        .unwrap();
        assert_eq!(semiwalk_gain(&g, &w).unwrap(), ord(3).element(2));
    }

    #[test]
    fn semiwalk_rejects_foreign_arcs() {
        let g = example_graph();
        let w = SemiWalk::new(1, vec![SemiStep::forward(arc(1, 3, 0, 3))]).unwrap();
        assert!(matches!(
            semiwalk_gain(&g, &w),
            Err(GraphError::ArcNotInGraph { .. })
        ));
    }

    #[test]
    fn semiwalk_construction_requires_vertex_consistency() {
        let bad = SemiWalk::new(1, vec![SemiStep::forward(arc(2, 3, 0, 3))]);
        assert_eq!(
            bad,
            Err(GraphError::DisconnectedStep {
                expected: 1,
                found: 2
            })
        );
    }

    #[test]
    fn union_of_single_graph_is_itself_as_multigraph() {
        let g = example_graph();
        let u = union([&g]).unwrap();
        assert_eq!(u, GainMultigraph::from(&g));
    }

    #[test]
    fn union_keeps_parallel_arcs() {
        let a = GainGraph::new(2, ord(3), vec![arc(1, 2, 0, 3)]).unwrap();
        let b = GainGraph::new(2, ord(3), vec![arc(1, 2, 1, 3)]).unwrap();
        let u = union([&a, &b]).unwrap();
        assert_eq!(u.arcs().len(), 2);
        assert_eq!(u.arcs()[0], arc(1, 2, 0, 3));
        assert_eq!(u.arcs()[1], arc(1, 2, 1, 3));
    }

    #[test]
    fn union_rejects_mismatched_shapes() {
        let a = GainGraph::new(2, ord(3), vec![]).unwrap();
        let b = GainGraph::new(3, ord(3), vec![]).unwrap();
        assert!(matches!(
            union([&a, &b]),
            Err(GraphError::IncompatibleUnion { .. })
        ));
        let c = GainGraph::new(2, ord(4), vec![]).unwrap();
        assert!(union([&a, &c]).is_err());
        assert_eq!(union::<GainGraph, _>([]), Err(GraphError::EmptyUnion));
    }

    #[test]
    fn connectivity_queries() {
        assert!(is_strongly_connected(&example_graph()));

        let isolated = GainGraph::new(3, ord(2), vec![]).unwrap();
        assert!(!is_strongly_connected(&isolated));
        assert_eq!(weak_components(&isolated), vec![vec![1], vec![2], vec![3]]);

        let path = GainGraph::new(3, ord(2), vec![arc(1, 2, 0, 2), arc(2, 3, 0, 2)]).unwrap();
        assert!(!is_strongly_connected(&path));
        assert_eq!(weak_components(&path), vec![vec![1, 2, 3]]);
    }

    #[test]
    fn reversed_semiwalk_has_inverse_gain() {
        let g = example_graph();
        let w = SemiWalk::new(
            2,
            vec![
                SemiStep::backward(arc(1, 2, 1, 3)),
                SemiStep::backward(arc(3, 1, 0, 3)),
                SemiStep::forward(arc(3, 3, 0, 3)),
            ],
        )
        .unwrap();
        let r = w.reversed();
        assert_eq!(r.start(), w.end());
        assert_eq!(r.end(), w.start());
        let fwd = semiwalk_gain(&g, &w).unwrap();
        let bwd = semiwalk_gain(&g, &r).unwrap();
        assert_eq!(bwd, fwd.inv());
    }
}
