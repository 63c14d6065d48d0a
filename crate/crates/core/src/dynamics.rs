//! Complex-valued averaging dynamics and limit detection.
//!
//! Each agent updates to the in-degree-weighted average of its in-neighbors'
//! states rotated by the arc gains:
//! `x_i(t+1) = (1/m_i) Σ_j g_ij · x_j(t)`. Every update is a convex
//! combination of unit-modulus rotations, so `max_i |x_i|` never grows.
//!
//! For a graph balanced with respect to a clustering vector `b` the invariant
//! consensus pattern is `x_i = b(i)·v`: de-rotating each state by `b(i)⁻¹`
//! must make all agents agree. [`cluster_disagreement`] measures exactly
//! that, and [`detect_limit`] recovers the clustering from a trajectory by
//! rounding the phases of `x_i·conj(x_1)` to the nearest group element.

use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
// Needed for f64 math in no_std builds; the std test build has inherent methods.
#[allow(unused_imports)]
use num_traits::Float;

use crate::balance::ClusteringVector;
use crate::graph::{GainGraph, GainGraphLike, GraphError};
use crate::group::{GainExponent, GroupOrder};
use crate::sequence::{GraphSequence, Schedule, SequenceError};

/// Complex agent states, one per vertex.
pub type StateVector = Vec<Complex64>;

/// Detection thresholds; all overridable, these are the defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Below this final maximum modulus the trajectory counts as zero.
    pub zero: f64,
    /// Maximum de-rotated disagreement accepted as consensus.
    pub consensus: f64,
    /// Minimum distance between occupied cluster values.
    pub separation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            zero: 1e-9,
            consensus: 1e-9,
            separation: 1e-6,
        }
    }
}

/// Precomputed complex row form of one graph's update.
struct Stepper {
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl Stepper {
    fn new(g: &GainGraph) -> Self {
        let rows = g
            .in_arcs()
            .iter()
            .map(|arcs| {
                let w = 1.0 / arcs.len() as f64;
                arcs.iter()
                    .map(|arc| (arc.tail - 1, arc.gain.to_complex() * w))
                    .collect()
            })
            .collect();
        Stepper { rows }
    }

    fn apply(&self, x: &[Complex64], out: &mut Vec<Complex64>) {
        out.clear();
        out.extend(self.rows.iter().map(|row| {
            row.iter()
                .map(|&(j, coeff)| coeff * x[j])
                .sum::<Complex64>()
        }));
    }
}

/// One synchronous update under a neighbor graph.
pub fn step(g: &GainGraph, x: &[Complex64]) -> Result<StateVector, DynamicsError> {
    g.validate_neighbor_graph().map_err(DynamicsError::Graph)?;
    if x.len() != g.vertex_count() {
        return Err(DynamicsError::DimensionMismatch {
            expected: g.vertex_count(),
            got: x.len(),
        });
    }
    let mut out = Vec::with_capacity(x.len());
    Stepper::new(g).apply(x, &mut out);
    Ok(out)
}

/// States and per-step metrics of one simulated trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTrace {
    order: GroupOrder,
    states: Vec<StateVector>,
    max_modulus: Vec<f64>,
    modulus_spread: Vec<f64>,
    cluster_disagreement: Option<Vec<f64>>,
}

impl SimulationTrace {
    pub fn order(&self) -> GroupOrder {
        self.order
    }

    /// Number of recorded time points (simulated steps + 1).
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, t: usize) -> &[Complex64] {
        &self.states[t]
    }

    pub fn final_state(&self) -> &[Complex64] {
        self.states.last().expect("trace holds at least x(0)")
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn max_modulus(&self) -> &[f64] {
        &self.max_modulus
    }

    pub fn modulus_spread(&self) -> &[f64] {
        &self.modulus_spread
    }

    pub fn cluster_disagreement(&self) -> Option<&[f64]> {
        self.cluster_disagreement.as_deref()
    }

    /// The prefix of the trace up to and including time `t`.
    pub fn truncated(&self, t: usize) -> SimulationTrace {
        let end = (t + 1).min(self.states.len());
        SimulationTrace {
            order: self.order,
            states: self.states[..end].to_vec(),
            max_modulus: self.max_modulus[..end].to_vec(),
            modulus_spread: self.modulus_spread[..end].to_vec(),
            cluster_disagreement: self
                .cluster_disagreement
                .as_ref()
                .map(|s| s[..end].to_vec()),
        }
    }
}

/// Iterates the dynamics for `steps` updates from `x0`, recording states and
/// metrics at every time. With a clustering vector the de-rotated
/// disagreement is tracked as well.
pub fn simulate(
    seq: &GraphSequence,
    x0: &[Complex64],
    steps: usize,
    clustering: Option<&ClusteringVector>,
) -> Result<SimulationTrace, DynamicsError> {
    let n = seq.n();
    if x0.len() != n {
        return Err(DynamicsError::DimensionMismatch {
            expected: n,
            got: x0.len(),
        });
    }
    if x0.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(DynamicsError::NonFiniteState);
    }
    if let Some(b) = clustering {
        if b.len() != n {
            return Err(DynamicsError::DimensionMismatch {
                expected: n,
                got: b.len(),
            });
        }
        if b.order() != seq.order() {
            return Err(DynamicsError::OrderMismatch {
                sequence: seq.order().get(),
                clustering: b.order().get(),
            });
        }
    }

    let steppers: Vec<Stepper> = match seq.schedule() {
        Schedule::Periodic { period } => (0..period).map(|t| Stepper::new(&seq.graphs()[t])).collect(),
        Schedule::Finite => seq.graphs().iter().map(Stepper::new).collect(),
    };
    let stepper_at = |t: usize| -> Result<&Stepper, DynamicsError> {
        match seq.schedule() {
            Schedule::Periodic { period } => Ok(&steppers[t % period]),
            Schedule::Finite => steppers.get(t).ok_or(DynamicsError::Sequence(
                SequenceError::TimeOutOfRange { t, len: seq.len() },
            )),
        }
    };

    let derotation: Option<Vec<Complex64>> =
        clustering.map(|b| b.entries().iter().map(|e| e.inv().to_complex()).collect());

    let mut trace = SimulationTrace {
        order: seq.order(),
        states: Vec::with_capacity(steps + 1),
        max_modulus: Vec::with_capacity(steps + 1),
        modulus_spread: Vec::with_capacity(steps + 1),
        cluster_disagreement: derotation.as_ref().map(|_| Vec::with_capacity(steps + 1)),
    };

    let record = |trace: &mut SimulationTrace, x: &[Complex64]| {
        let (lo, hi) = modulus_range(x);
        trace.max_modulus.push(hi);
        trace.modulus_spread.push(hi - lo);
        if let (Some(series), Some(rot)) = (trace.cluster_disagreement.as_mut(), derotation.as_ref())
        {
            series.push(derotated_disagreement(x, rot));
        }
        trace.states.push(x.to_vec());
    };

    record(&mut trace, x0);
    let mut current = x0.to_vec();
    let mut next = Vec::with_capacity(n);
    for t in 0..steps {
        stepper_at(t)?.apply(&current, &mut next);
        core::mem::swap(&mut current, &mut next);
        record(&mut trace, &current);
    }
    Ok(trace)
}

fn modulus_range(x: &[Complex64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for c in x {
        let r = c.norm();
        lo = lo.min(r);
        hi = hi.max(r);
    }
    (lo, hi)
}

fn derotated_disagreement(x: &[Complex64], rot: &[Complex64]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..x.len() {
        let a = rot[i] * x[i];
        for j in (i + 1)..x.len() {
            worst = worst.max((a - rot[j] * x[j]).norm());
        }
    }
    worst
}

/// Spread of state moduli: `max|x_i| − min|x_i|`.
pub fn modulus_spread(x: &[Complex64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let (lo, hi) = modulus_range(x);
    hi - lo
}

/// Worst pairwise distance of the de-rotated states `b(i)⁻¹·x_i`; zero
/// exactly on the consensus pattern `x_i = b(i)·v`.
pub fn cluster_disagreement(x: &[Complex64], b: &ClusteringVector) -> f64 {
    assert_eq!(x.len(), b.len(), "state and clustering dimensions differ");
    let rot: Vec<Complex64> = b.entries().iter().map(|e| e.inv().to_complex()).collect();
    derotated_disagreement(x, &rot)
}

/// Stacks the `m` rotated copies `α_p·x`, `p = 0..m−1`, into one mn-vector.
pub fn lifted_state(x: &[Complex64], order: GroupOrder) -> Vec<Complex64> {
    let m = order.get();
    let mut z = Vec::with_capacity(x.len() * m as usize);
    for p in 0..m {
        let alpha = order.element(p).to_complex();
        z.extend(x.iter().map(|&xi| alpha * xi));
    }
    z
}

/// Log-linear fit of a metric tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateEstimate {
    /// Least-squares slope of `ln(metric)` against `t` with its fit quality.
    Fit { slope: f64, r_squared: f64 },
    /// The metric reached exact zero inside the fit window; the decay rate
    /// is effectively −∞.
    MetricHitZero,
}

/// Fits `ln(series[t]) ~ a + slope·t` over the last half of the series.
///
/// Returns `None` when fewer than two points are available. A constant
/// series fits perfectly with slope 0.
pub fn fit_log_slope(series: &[f64]) -> Option<RateEstimate> {
    if series.len() < 2 {
        return None;
    }
    let start = series.len() / 2;
    let window = &series[start..];
    if window.iter().any(|&v| v <= 0.0) {
        return Some(RateEstimate::MetricHitZero);
    }
    let k = window.len() as f64;
    let mut sum_t = 0.0;
    let mut sum_y = 0.0;
    for (offset, &v) in window.iter().enumerate() {
        sum_t += (start + offset) as f64;
        sum_y += v.ln();
    }
    let mean_t = sum_t / k;
    let mean_y = sum_y / k;
    let mut stt = 0.0;
    let mut sty = 0.0;
    let mut syy = 0.0;
    for (offset, &v) in window.iter().enumerate() {
        let dt = (start + offset) as f64 - mean_t;
        let dy = v.ln() - mean_y;
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    if stt == 0.0 {
        return None;
    }
    let slope = sty / stt;
    let ss_res = syy - sty * sty / stt;
    // A response variance at rounding-noise level means the series is flat;
    // the horizontal line is then a perfect fit.
    let noise = 1e-24 * k * (1.0 + mean_y * mean_y);
    let r_squared = if syy <= noise {
        1.0
    } else {
        (1.0 - ss_res / syy).min(1.0)
    };
    Some(RateEstimate::Fit { slope, r_squared })
}

/// Which recorded metric a rate estimate targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMetric {
    MaxModulus,
    ModulusSpread,
    ClusterDisagreement,
}

/// Log-linear decay rate of a recorded trace metric.
pub fn estimate_rate(
    trace: &SimulationTrace,
    metric: TraceMetric,
) -> Result<Option<RateEstimate>, DynamicsError> {
    let series = match metric {
        TraceMetric::MaxModulus => trace.max_modulus(),
        TraceMetric::ModulusSpread => trace.modulus_spread(),
        TraceMetric::ClusterDisagreement => trace
            .cluster_disagreement()
            .ok_or(DynamicsError::ClusterMetricMissing)?,
    };
    Ok(fit_log_slope(series))
}

/// Rounds the phases of `x_i·conj(x_1)` to the nearest group element.
///
/// Rejects (returns `None`) when any phase misses every group element by
/// more than `margin` radians, or when a modulus vanishes.
pub fn recover_clustering(
    x: &[Complex64],
    order: GroupOrder,
    margin: f64,
) -> Option<ClusteringVector> {
    let anchor = *x.first()?;
    if anchor.norm() == 0.0 {
        return None;
    }
    let m = f64::from(order.get());
    let tau = 2.0 * core::f64::consts::PI;
    let mut entries = Vec::with_capacity(x.len());
    for &xi in x {
        let ratio = xi * anchor.conj();
        if ratio.norm() == 0.0 {
            return None;
        }
        // Phase in units of the group spacing 2π/m.
        let raw = ratio.arg() * m / tau;
        let nearest = raw.round();
        if (raw - nearest).abs() * tau / m > margin {
            return None;
        }
        let e = nearest as i64;
        let m_i = i64::from(order.get());
        entries.push(order.element(e.rem_euclid(m_i) as u32));
    }
    ClusteringVector::new(entries).ok()
}

/// Default rejection margin for phase rounding: a quarter of the group
/// spacing.
pub fn default_rounding_margin(order: GroupOrder) -> f64 {
    core::f64::consts::PI / (2.0 * f64::from(order.get()))
}

/// Classified limit of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub enum LimitVerdict {
    /// Final maximum modulus below the zero tolerance.
    Zero { rate: Option<RateEstimate> },
    /// Consensus onto up to `m` clusters encoded by the recovered
    /// clustering vector; `cluster_values` maps occupied exponents to the
    /// class limit.
    MModulusConsensus {
        clustering: ClusteringVector,
        cluster_values: Vec<(GainExponent, Complex64)>,
        rate: Option<RateEstimate>,
    },
    /// Thresholds unmet: trajectory still in transient or not classifiable.
    Undecided,
}

impl LimitVerdict {
    pub fn is_zero(&self) -> bool {
        matches!(self, LimitVerdict::Zero { .. })
    }

    pub fn is_consensus(&self) -> bool {
        matches!(self, LimitVerdict::MModulusConsensus { .. })
    }
}

/// Classifies the end of a trace as zero, m-modulus consensus, or undecided.
///
/// Consensus requires: a clustering vector recoverable by phase rounding,
/// de-rotated disagreement below `tol.consensus`, every occupied cluster
/// value above `tol.zero` in modulus, and occupied values pairwise more than
/// `tol.separation` apart. Empty classes are simply unoccupied.
pub fn detect_limit(trace: &SimulationTrace, tol: Tolerances) -> LimitVerdict {
    if trace.len() < 2 {
        return LimitVerdict::Undecided;
    }
    let last = trace.final_state();
    if *trace.max_modulus().last().expect("nonempty") < tol.zero {
        return LimitVerdict::Zero {
            rate: fit_log_slope(decaying_prefix(trace.max_modulus(), tol.zero)),
        };
    }
    let order = trace.order();
    let Some(clustering) = recover_clustering(last, order, default_rounding_margin(order)) else {
        return LimitVerdict::Undecided;
    };
    if cluster_disagreement(last, &clustering) >= tol.consensus {
        return LimitVerdict::Undecided;
    }

    let mut cluster_values = Vec::new();
    for (e, class) in clustering.class_partition().into_iter().enumerate() {
        if class.is_empty() {
            continue;
        }
        let sum: Complex64 = class.iter().map(|&v| last[v - 1]).sum();
        let mean = sum / class.len() as f64;
        if mean.norm() <= tol.zero {
            return LimitVerdict::Undecided;
        }
        cluster_values.push((order.element(e as u32), mean));
    }
    for i in 0..cluster_values.len() {
        for j in (i + 1)..cluster_values.len() {
            if (cluster_values[i].1 - cluster_values[j].1).norm() <= tol.separation {
                return LimitVerdict::Undecided;
            }
        }
    }

    let rate = disagreement_series(trace, &clustering)
        .as_deref()
        .and_then(|s| fit_log_slope(decaying_prefix(s, tol.consensus)));
    LimitVerdict::MModulusConsensus {
        clustering,
        cluster_values,
        rate,
    }
}

/// The prefix of a metric series up to (and including) its first crossing
/// below `threshold`: the transient worth rate-fitting. A trace simulated far
/// past convergence would otherwise feed the fit its flat noise floor.
fn decaying_prefix(series: &[f64], threshold: f64) -> &[f64] {
    match series.iter().position(|&v| v < threshold) {
        Some(idx) => &series[..=idx],
        None => series,
    }
}

/// De-rotated disagreement of every recorded state against `b`.
pub fn disagreement_series(trace: &SimulationTrace, b: &ClusteringVector) -> Option<Vec<f64>> {
    if trace.states().first().map(Vec::len) != Some(b.len()) {
        return None;
    }
    let rot: Vec<Complex64> = b.entries().iter().map(|e| e.inv().to_complex()).collect();
    Some(
        trace
            .states()
            .iter()
            .map(|x| derotated_disagreement(x, &rot))
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub enum DynamicsError {
    DimensionMismatch { expected: usize, got: usize },
    OrderMismatch { sequence: u32, clustering: u32 },
    NonFiniteState,
    ClusterMetricMissing,
    Graph(GraphError),
    Sequence(SequenceError),
}

impl fmt::Display for DynamicsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynamicsError::DimensionMismatch { expected, got } => {
                write!(f, "expected a state of dimension {expected}, got {got}")
            }
            DynamicsError::OrderMismatch {
                sequence,
                clustering,
            } => write!(
                f,
                "clustering vector order {clustering} does not match sequence order {sequence}"
            ),
            DynamicsError::NonFiniteState => write!(f, "state contains non-finite entries"),
            DynamicsError::ClusterMetricMissing => {
                write!(f, "trace was simulated without a clustering vector")
            }
            DynamicsError::Graph(e) => write!(f, "{e}"),
            DynamicsError::Sequence(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for DynamicsError {}

impl From<GraphError> for DynamicsError {
    fn from(e: GraphError) -> Self {
        DynamicsError::Graph(e)
    }
}

impl From<SequenceError> for DynamicsError {
    fn from(e: SequenceError) -> Self {
        DynamicsError::Sequence(e)
    }
}
