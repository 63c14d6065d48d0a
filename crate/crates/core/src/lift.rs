//! The lifted mn-dimensional system of a gain graph and its component
//! structure.
//!
//! Index conventions, used verbatim across this module:
//!
//! * Base vertices are `i ∈ 1..=n`; copies are `p ∈ 0..=m−1`. Lifted vertex
//!   `i + p·n` is copy `p` of agent `i`, so copy `p` occupies the block
//!   `p·n + 1 ..= (p+1)·n`.
//! * A base arc `j -> i` with gain exponent `q` lifts to the `m` arcs
//!   `j + ((p + q) mod m)·n  ->  i + p·n`, one per copy `p`.
//! * The lifted matrix entry on such an arc is the flocking weight
//!   `f_ij = 1/m_i` (`m_i` = in-degree of `i`, self-arc included); viewed as
//!   an `m × m` grid of `n × n` blocks it is block circulant: grid block
//!   `(r, c)` equals block `(r+1 mod m, c+1 mod m)`.
//! * For a clustering vector `b` with classes `V_1..V_m` (`i ∈ V_q` iff
//!   `b(i)` has exponent `q−1`), put `V_{r,c} = {(r−1)·n + i : i ∈ V_c}`.
//!   The predicted strongly connected components of the lift of a balanced,
//!   strongly connected graph are, for `p ∈ 1..=m`,
//!   `C_p = ∪_{c=1}^{m} V_{((p−c) mod m)+1, c}` — each of size `n`.
//!
//! Weights are exact rationals so printed matrices reproduce bit for bit;
//! complex values enter only through [`GainMatrix::complex`].

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;

use crate::balance::{check_balance, BalanceVerdict, ClusteringVector};
use crate::graph::{is_strongly_connected, GainGraph, GainGraphLike, GraphError};
use crate::group::{GainExponent, GroupOrder};
use crate::scc;

/// One nonzero gain-matrix entry: an exact flocking weight and a group element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GainEntry {
    pub weight: Rational64,
    pub gain: GainExponent,
}

/// The n×n gain matrix of a neighbor graph: entry `(i, j)` is `(1/m_i)·g_ij`
/// for in-neighbors `j` of `i`, kept as weight × gain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GainMatrix {
    n: usize,
    order: GroupOrder,
    entries: Vec<Option<GainEntry>>,
}

impl GainMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> GroupOrder {
        self.order
    }

    /// Entry at row `i`, column `j` (1-based).
    pub fn entry(&self, i: usize, j: usize) -> Option<GainEntry> {
        self.entries[(i - 1) * self.n + (j - 1)]
    }

    /// Dense row-major complex form, gains applied.
    pub fn complex(&self) -> Vec<Complex64> {
        self.entries
            .iter()
            .map(|e| match e {
                Some(entry) => {
                    let w = rational_to_f64(entry.weight);
                    entry.gain.to_complex() * w
                }
                None => Complex64::new(0.0, 0.0),
            })
            .collect()
    }

    /// The flocking matrix: entrywise modulus, gains dropped.
    pub fn flocking(&self) -> Vec<Rational64> {
        self.entries
            .iter()
            .map(|e| e.map_or_else(Rational64::zero, |entry| entry.weight))
            .collect()
    }

    /// Sum of entry moduli in row `i` (1-based); 1 on every valid row.
    pub fn row_modulus_sum(&self, i: usize) -> Rational64 {
        (1..=self.n)
            .map(|j| {
                self.entry(i, j)
                    .map_or_else(Rational64::zero, |e| e.weight)
            })
            .sum()
    }
}

/// Builds the gain matrix of a neighbor graph.
pub fn gain_matrix(g: &GainGraph) -> Result<GainMatrix, LiftError> {
    g.validate_neighbor_graph().map_err(LiftError::Graph)?;
    let n = g.vertex_count();
    let mut entries = vec![None; n * n];
    for (i, arcs) in g.in_arcs().iter().enumerate() {
        let degree = arcs.len() as i64;
        for arc in arcs {
            entries[i * n + (arc.tail - 1)] = Some(GainEntry {
                weight: Rational64::new(1, degree),
                gain: arc.gain,
            });
        }
    }
    Ok(GainMatrix {
        n,
        order: g.order(),
        entries,
    })
}

/// The mn-vertex lift of a gain graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedGraph {
    base_n: usize,
    order: GroupOrder,
    arcs: Vec<(usize, usize)>,
}

impl LiftedGraph {
    pub fn base_n(&self) -> usize {
        self.base_n
    }

    pub fn order(&self) -> GroupOrder {
        self.order
    }

    pub fn vertex_count(&self) -> usize {
        self.base_n * self.order.get() as usize
    }

    /// Lifted arcs as 1-based `(tail, head)` pairs, sorted.
    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn has_arc(&self, tail: usize, head: usize) -> bool {
        self.arcs.binary_search(&(tail, head)).is_ok()
    }

    /// Out-adjacency over 0-based lifted vertices.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for &(tail, head) in &self.arcs {
            adj[tail - 1].push(head - 1);
        }
        adj
    }
}

/// Lifts each base arc `j -> i` with gain exponent `q` to the arcs
/// `j + ((p+q) mod m)·n -> i + p·n` for every copy `p`.
pub fn lift_graph(g: &GainGraph) -> LiftedGraph {
    let n = g.vertex_count();
    let m = g.order().get() as usize;
    let mut arcs = Vec::with_capacity(g.arcs().len() * m);
    for arc in g.arcs() {
        let q = arc.gain.exponent() as usize;
        for p in 0..m {
            let tail = arc.tail + ((p + q) % m) * n;
            let head = arc.head + p * n;
            arcs.push((tail, head));
        }
    }
    arcs.sort_unstable();
    arcs.dedup();
    LiftedGraph {
        base_n: n,
        order: g.order(),
        arcs,
    }
}

/// The mn×mn row-stochastic lifted matrix, exact rational entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedMatrix {
    base_n: usize,
    order: GroupOrder,
    entries: Vec<Rational64>,
}

impl LiftedMatrix {
    pub fn base_n(&self) -> usize {
        self.base_n
    }

    pub fn order(&self) -> GroupOrder {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.base_n * self.order.get() as usize
    }

    /// Entry at row `i`, column `j` (1-based).
    pub fn entry(&self, i: usize, j: usize) -> Rational64 {
        self.entries[(i - 1) * self.dim() + (j - 1)]
    }

    pub fn entries(&self) -> &[Rational64] {
        &self.entries
    }

    pub fn row_sum(&self, i: usize) -> Rational64 {
        (1..=self.dim()).map(|j| self.entry(i, j)).sum()
    }

    /// The n×n block at grid position `(r, c)` (0-based, `r, c < m`),
    /// row-major.
    pub fn block(&self, r: usize, c: usize) -> Vec<Rational64> {
        let n = self.base_n;
        let mut out = Vec::with_capacity(n * n);
        for i in 1..=n {
            for j in 1..=n {
                out.push(self.entry(r * n + i, c * n + j));
            }
        }
        out
    }

    /// Arcs of the nonzero pattern, 1-based `(tail, head)`: entry `(i, j)`
    /// is the weight of lifted arc `j -> i`.
    pub fn adjacency_arcs(&self) -> Vec<(usize, usize)> {
        let dim = self.dim();
        let mut arcs = Vec::new();
        for i in 1..=dim {
            for j in 1..=dim {
                if !self.entry(i, j).is_zero() {
                    arcs.push((j, i));
                }
            }
        }
        arcs.sort_unstable();
        arcs
    }

    /// Dense row-major f64 form for numeric cross-checks.
    pub fn to_f64(&self) -> Vec<f64> {
        self.entries.iter().map(|r| rational_to_f64(*r)).collect()
    }
}

fn rational_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Builds the lifted matrix of a neighbor graph: the weight `f_ij` of every
/// base arc placed along its `m` lifted arcs.
pub fn lift_matrix(g: &GainGraph) -> Result<LiftedMatrix, LiftError> {
    g.validate_neighbor_graph().map_err(LiftError::Graph)?;
    let n = g.vertex_count();
    let m = g.order().get() as usize;
    let dim = n * m;
    let mut entries = vec![Rational64::zero(); dim * dim];
    for (i, arcs) in g.in_arcs().iter().enumerate() {
        let weight = Rational64::new(1, arcs.len() as i64);
        for arc in arcs {
            let q = arc.gain.exponent() as usize;
            for p in 0..m {
                let row = i + p * n;
                let col = (arc.tail - 1) + ((p + q) % m) * n;
                entries[row * dim + col] = weight;
            }
        }
    }
    Ok(LiftedMatrix {
        base_n: n,
        order: g.order(),
        entries,
    })
}

/// Strongly connected components of a lifted graph, members sorted and
/// components ordered by smallest member.
pub fn scc_partition(lg: &LiftedGraph) -> Vec<Vec<usize>> {
    scc::tarjan_scc(&lg.adjacency())
        .into_iter()
        .map(|comp| comp.into_iter().map(|v| v + 1).collect())
        .collect()
}

/// The component structure the lift of a balanced strongly connected graph
/// must have: the sets `C_p` of the module docs, canonically ordered like
/// [`scc_partition`] output.
pub fn predict_components(b: &ClusteringVector) -> Vec<Vec<usize>> {
    let n = b.len();
    let m = b.order().get() as usize;
    let classes = b.class_partition();
    let mut comps = Vec::with_capacity(m);
    for p in 1..=m {
        let mut comp = Vec::with_capacity(n);
        for (c, class) in classes.iter().enumerate() {
            // Grid row for class column c+1 in component p.
            let r = (p + m - (c + 1)) % m + 1;
            comp.extend(class.iter().map(|&i| (r - 1) * n + i));
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps.sort_by_key(|c| c.first().copied());
    comps
}

/// Lifted component report for a strongly connected gain graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentReport {
    /// Actual SCC partition of the lifted graph.
    pub components: Vec<Vec<usize>>,
    pub classification: Classification,
}

/// What the component structure says about the base graph.
#[derive(Debug, Clone, PartialEq)]
pub enum Classification {
    /// Balanced base graph: components should match the prediction exactly.
    Balanced {
        clustering: ClusteringVector,
        predicted: Vec<Vec<usize>>,
        matches_prediction: bool,
    },
    /// Unbalanced base graph: component count and minimum size against the
    /// `≤ ⌊m/2⌋` / `≥ 2n` bounds. A violation is recorded, not an error.
    Unbalanced {
        component_count: usize,
        min_component_size: usize,
        count_bound: usize,
        size_bound: usize,
        within_bounds: bool,
    },
}

/// Lifts a strongly connected gain graph and classifies its SCC structure.
pub fn classify(g: &GainGraph) -> Result<ComponentReport, LiftError> {
    if !is_strongly_connected(g) {
        return Err(LiftError::NotStronglyConnected);
    }
    let components = scc_partition(&lift_graph(g));
    let n = g.vertex_count();
    let m = g.order().get() as usize;
    let classification = match check_balance(g) {
        BalanceVerdict::Balanced(clustering) => {
            let predicted = predict_components(&clustering);
            let matches_prediction = components == predicted;
            Classification::Balanced {
                clustering,
                predicted,
                matches_prediction,
            }
        }
        BalanceVerdict::Unbalanced(_) => {
            let component_count = components.len();
            let min_component_size = components.iter().map(Vec::len).min().unwrap_or(0);
            let count_bound = m / 2;
            let size_bound = 2 * n;
            Classification::Unbalanced {
                component_count,
                min_component_size,
                count_bound,
                size_bound,
                within_bounds: component_count <= count_bound
                    && min_component_size >= size_bound,
            }
        }
    };
    Ok(ComponentReport {
        components,
        classification,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LiftError {
    Graph(GraphError),
    NotStronglyConnected,
}

impl fmt::Display for LiftError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LiftError::Graph(e) => write!(f, "{e}"),
            LiftError::NotStronglyConnected => {
                write!(f, "component classification needs a strongly connected graph")
            }
        }
    }
}

impl core::error::Error for LiftError {}

impl From<GraphError> for LiftError {
    fn from(e: GraphError) -> Self {
        LiftError::Graph(e)
    }
}
