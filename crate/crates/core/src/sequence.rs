//! Time-varying gain-graph sequences and their joint balance structure.
//!
//! A [`GraphSequence`] is a finite list of neighbor graphs evaluated either
//! periodically or as a finite stream. Windows of length `p` starting at
//! offset `q` are unioned into multigraphs; a periodic sequence has only
//! `lcm(period, p) / p` distinct windows, so the "for every window" verdicts
//! are decidable by scanning exactly those.

use alloc::vec::Vec;
use core::fmt;

use num_integer::Integer;

use crate::balance::{check_balance, BalanceVerdict, ClusteringVector};
use crate::graph::{is_strongly_connected, union, GainGraph, GainGraphLike, GainMultigraph, GraphError};
use crate::group::GroupOrder;

/// How a finite graph list extends to time `t ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    /// `graph_at(t) = graphs[t mod period]`.
    Periodic { period: usize },
    /// Only `t < len` is defined.
    Finite,
}

/// A sequence of neighbor graphs over a shared vertex set and gain group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSequence {
    graphs: Vec<GainGraph>,
    schedule: Schedule,
}

impl GraphSequence {
    /// A periodic sequence cycling through the first `period` graphs.
    pub fn periodic(graphs: Vec<GainGraph>, period: usize) -> Result<Self, SequenceError> {
        if graphs.is_empty() {
            return Err(SequenceError::Empty);
        }
        if period == 0 || period > graphs.len() {
            return Err(SequenceError::BadPeriod {
                period,
                len: graphs.len(),
            });
        }
        Self::validated(graphs, Schedule::Periodic { period })
    }

    /// A finite sequence defined for `t < len` only.
    pub fn finite(graphs: Vec<GainGraph>) -> Result<Self, SequenceError> {
        Self::validated(graphs, Schedule::Finite)
    }

    fn validated(graphs: Vec<GainGraph>, schedule: Schedule) -> Result<Self, SequenceError> {
        let first = graphs.first().ok_or(SequenceError::Empty)?;
        let (n, order) = (first.vertex_count(), first.order());
        for g in &graphs {
            if g.vertex_count() != n || g.order() != order {
                return Err(SequenceError::MixedShapes);
            }
            g.validate_neighbor_graph().map_err(SequenceError::Graph)?;
        }
        Ok(GraphSequence { graphs, schedule })
    }

    pub fn n(&self) -> usize {
        self.graphs[0].vertex_count()
    }

    pub fn order(&self) -> GroupOrder {
        self.graphs[0].order()
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        false // validated nonempty
    }

    pub fn schedule(&self) -> Schedule {
        self.schedule
    }

    pub fn period(&self) -> Option<usize> {
        match self.schedule {
            Schedule::Periodic { period } => Some(period),
            Schedule::Finite => None,
        }
    }

    pub fn graphs(&self) -> &[GainGraph] {
        &self.graphs
    }

    /// The graph governing the update at time `t`.
    pub fn graph_at(&self, t: usize) -> Result<&GainGraph, SequenceError> {
        match self.schedule {
            Schedule::Periodic { period } => Ok(&self.graphs[t % period]),
            Schedule::Finite => self
                .graphs
                .get(t)
                .ok_or(SequenceError::TimeOutOfRange { t, len: self.graphs.len() }),
        }
    }
}

/// Window layout: windows are `[offset + k·length, offset + (k+1)·length)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpec {
    pub offset: usize,
    pub length: usize,
}

impl WindowSpec {
    pub fn new(offset: usize, length: usize) -> Result<Self, SequenceError> {
        if length == 0 {
            return Err(SequenceError::EmptyWindow);
        }
        Ok(WindowSpec { offset, length })
    }

    pub fn start_of(&self, k: usize) -> usize {
        self.offset + k * self.length
    }
}

/// Union of the graphs in window `k`.
pub fn window_union(
    seq: &GraphSequence,
    w: WindowSpec,
    k: usize,
) -> Result<GainMultigraph, SequenceError> {
    let start = w.start_of(k);
    let graphs: Vec<&GainGraph> = (start..start + w.length)
        .map(|t| seq.graph_at(t))
        .collect::<Result<_, _>>()?;
    union(graphs).map_err(SequenceError::Graph)
}

/// Verdict kind for a periodic sequence under a fixed window layout.
#[derive(Debug, Clone, PartialEq)]
pub enum SequenceKind {
    /// Every window union is strongly connected and balanced with respect to
    /// this one clustering vector.
    RepeatedlyJointlyBalanced(ClusteringVector),
    /// Every window union is strongly connected and unbalanced.
    RepeatedlyJointlyUnbalanced,
    /// All windows strongly connected, but balance varies: some windows
    /// unbalanced and some balanced, or windows balanced with respect to
    /// different clustering vectors. Longer windows may turn this into
    /// a jointly unbalanced verdict; see [`search_window`].
    Mixed,
    /// Some window union is not strongly connected.
    NotJointlyStronglyConnected,
}

impl SequenceKind {
    pub fn is_balanced(&self) -> bool {
        matches!(self, SequenceKind::RepeatedlyJointlyBalanced(_))
    }
}

/// Per-window record backing a sequence verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowReport {
    pub window: usize,
    pub start: usize,
    pub strongly_connected: bool,
    pub verdict: BalanceVerdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceVerdict {
    pub kind: SequenceKind,
    pub windows: Vec<WindowReport>,
}

/// Classifies a periodic sequence under window layout `w` by evaluating each
/// of its `lcm(period, length) / length` distinct windows.
pub fn classify_sequence(
    seq: &GraphSequence,
    w: WindowSpec,
) -> Result<SequenceVerdict, SequenceError> {
    let period = seq.period().ok_or(SequenceError::NotPeriodic)?;
    let distinct = period / period.gcd(&w.length);

    let mut windows = Vec::with_capacity(distinct);
    for k in 0..distinct {
        let u = window_union(seq, w, k)?;
        windows.push(WindowReport {
            window: k,
            start: w.start_of(k),
            strongly_connected: is_strongly_connected(&u),
            verdict: check_balance(&u),
        });
    }

    let kind = if windows.iter().any(|r| !r.strongly_connected) {
        SequenceKind::NotJointlyStronglyConnected
    } else if windows.iter().all(|r| !r.verdict.is_balanced()) {
        SequenceKind::RepeatedlyJointlyUnbalanced
    } else {
        let mut common: Option<&ClusteringVector> = None;
        let mut uniform = true;
        for r in &windows {
            match r.verdict.clustering() {
                Some(b) => match common {
                    None => common = Some(b),
                    Some(seen) if seen == b => {}
                    Some(_) => {
                        uniform = false;
                        break;
                    }
                },
                None => {
                    uniform = false;
                    break;
                }
            }
        }
        if uniform {
            SequenceKind::RepeatedlyJointlyBalanced(common.expect("nonempty windows").clone())
        } else {
            SequenceKind::Mixed
        }
    };

    Ok(SequenceVerdict { kind, windows })
}

/// Scans offsets `0..period` and window lengths `1..=max_length` for the
/// first layout whose verdict is conclusive (balanced or unbalanced, all
/// windows strongly connected).
pub fn search_window(
    seq: &GraphSequence,
    max_length: usize,
) -> Result<Option<(WindowSpec, SequenceVerdict)>, SequenceError> {
    let period = seq.period().ok_or(SequenceError::NotPeriodic)?;
    for offset in 0..period {
        for length in 1..=max_length {
            let w = WindowSpec::new(offset, length)?;
            let verdict = classify_sequence(seq, w)?;
            match verdict.kind {
                SequenceKind::RepeatedlyJointlyBalanced(_)
                | SequenceKind::RepeatedlyJointlyUnbalanced => {
                    return Ok(Some((w, verdict)));
                }
                SequenceKind::Mixed | SequenceKind::NotJointlyStronglyConnected => {}
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SequenceError {
    Empty,
    MixedShapes,
    BadPeriod { period: usize, len: usize },
    TimeOutOfRange { t: usize, len: usize },
    EmptyWindow,
    NotPeriodic,
    Graph(GraphError),
}

impl fmt::Display for SequenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceError::Empty => write!(f, "graph sequence is empty"),
            SequenceError::MixedShapes => {
                write!(f, "graphs in a sequence must share vertex count and group order")
            }
            SequenceError::BadPeriod { period, len } => {
                write!(f, "period {period} invalid for a list of {len} graphs")
            }
            SequenceError::TimeOutOfRange { t, len } => {
                write!(f, "time {t} outside finite schedule of length {len}")
            }
            SequenceError::EmptyWindow => write!(f, "window length must be at least 1"),
            SequenceError::NotPeriodic => {
                write!(f, "sequence verdicts need a periodic schedule")
            }
            SequenceError::Graph(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SequenceError {}

impl From<GraphError> for SequenceError {
    fn from(e: GraphError) -> Self {
        SequenceError::Graph(e)
    }
}
