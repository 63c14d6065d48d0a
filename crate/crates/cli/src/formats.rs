//! Text and CSV formats.
//!
//! Graph files: a header line `n m`, then one line `tail head exponent` per
//! arc, self-arcs explicit. Sequence files: a header `n m period`, then one
//! graph block per time step in the same arc-list format, blocks separated by
//! a `---` line. Blank lines and `#` comments are ignored everywhere.
//!
//! Matrices export with exact rational entries (`0`, `1`, `1/2`); complex
//! values are written as decimal re/im pairs with 17 significant digits so
//! they re-parse to the same bits.

use std::fmt;

use gainflock::balance::ClusteringVector;
use gainflock::dynamics::SimulationTrace;
use gainflock::graph::{GainArc, GainGraph, GainGraphLike};
use gainflock::group::GroupOrder;
use gainflock::lift::{GainMatrix, LiftedMatrix};
use gainflock::sequence::GraphSequence;
use gainflock::Complex64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based line in the input, 0 when no single line is at fault.
    pub line: usize,
    pub message: String,
}

impl ParseError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

impl std::error::Error for ParseError {}

/// Content lines with their 1-based line numbers; comments and blanks dropped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

fn parse_header(line: &str, lineno: usize, fields: usize) -> Result<Vec<u64>, ParseError> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    if parts.len() != fields {
        return Err(ParseError::at(
            lineno,
            format!("expected {fields} header fields, found {}", parts.len()),
        ));
    }
    parts
        .iter()
        .map(|p| {
            p.parse::<u64>()
                .map_err(|_| ParseError::at(lineno, format!("invalid integer `{p}`")))
        })
        .collect()
}

fn parse_arc_line(
    line: &str,
    lineno: usize,
    n: usize,
    order: GroupOrder,
) -> Result<GainArc, ParseError> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    if parts.len() != 3 {
        return Err(ParseError::at(
            lineno,
            format!("expected `tail head exponent`, found {} fields", parts.len()),
        ));
    }
    let nums: Vec<u64> = parts
        .iter()
        .map(|p| {
            p.parse::<u64>()
                .map_err(|_| ParseError::at(lineno, format!("invalid integer `{p}`")))
        })
        .collect::<Result<_, _>>()?;
    let (tail, head, exp) = (nums[0] as usize, nums[1] as usize, nums[2]);
    if tail == 0 || tail > n || head == 0 || head > n {
        return Err(ParseError::at(
            lineno,
            format!("arc ({tail}, {head}) outside vertex range 1..={n}"),
        ));
    }
    if exp >= u64::from(order.get()) {
        return Err(ParseError::at(
            lineno,
            format!("gain exponent {exp} out of range for m = {}", order.get()),
        ));
    }
    Ok(GainArc::new(tail, head, order.element(exp as u32)))
}

fn arcs_to_graph(
    n: usize,
    order: GroupOrder,
    arcs: Vec<(usize, GainArc)>,
) -> Result<GainGraph, ParseError> {
    let mut seen: Vec<(usize, usize)> = Vec::new();
    for (lineno, arc) in &arcs {
        if seen.contains(&(arc.tail, arc.head)) {
            return Err(ParseError::at(
                *lineno,
                format!("duplicate arc ({}, {})", arc.tail, arc.head),
            ));
        }
        seen.push((arc.tail, arc.head));
    }
    GainGraph::new(n, order, arcs.into_iter().map(|(_, a)| a).collect())
        .map_err(|e| ParseError::at(0, e.to_string()))
}

/// Parses a graph file: header `n m`, then arc lines.
pub fn parse_graph(text: &str) -> Result<GainGraph, ParseError> {
    let mut lines = content_lines(text);
    let (lineno, header) = lines.next().ok_or_else(|| ParseError::at(0, "empty graph file"))?;
    let fields = parse_header(header, lineno, 2)?;
    let n = fields[0] as usize;
    if n == 0 {
        return Err(ParseError::at(lineno, "vertex count must be positive"));
    }
    let order = GroupOrder::new(fields[1].try_into().unwrap_or(0))
        .map_err(|e| ParseError::at(lineno, e.to_string()))?;
    let mut arcs = Vec::new();
    for (lineno, line) in lines {
        arcs.push((lineno, parse_arc_line(line, lineno, n, order)?));
    }
    arcs_to_graph(n, order, arcs)
}

/// Parses a sequence file: header `n m period`, graph blocks split by `---`.
pub fn parse_sequence(text: &str) -> Result<GraphSequence, ParseError> {
    let mut lines = content_lines(text).peekable();
    let (lineno, header) = lines
        .next()
        .ok_or_else(|| ParseError::at(0, "empty sequence file"))?;
    let fields = parse_header(header, lineno, 3)?;
    let n = fields[0] as usize;
    if n == 0 {
        return Err(ParseError::at(lineno, "vertex count must be positive"));
    }
    let order = GroupOrder::new(fields[1].try_into().unwrap_or(0))
        .map_err(|e| ParseError::at(lineno, e.to_string()))?;
    let period = fields[2] as usize;

    let mut graphs = Vec::new();
    let mut block: Vec<(usize, GainArc)> = Vec::new();
    for (lineno, line) in lines {
        if line == "---" {
            graphs.push(arcs_to_graph(n, order, std::mem::take(&mut block))?);
        } else {
            block.push((lineno, parse_arc_line(line, lineno, n, order)?));
        }
    }
    graphs.push(arcs_to_graph(n, order, block)?);

    GraphSequence::periodic(graphs, period).map_err(|e| ParseError::at(0, e.to_string()))
}

/// Canonical graph serialization: header plus sorted arc lines.
pub fn write_graph(g: &GainGraph) -> String {
    let mut out = format!("{} {}\n", g.vertex_count(), g.order().get());
    for arc in g.arcs() {
        out.push_str(&format!(
            "{} {} {}\n",
            arc.tail,
            arc.head,
            arc.gain.exponent()
        ));
    }
    out
}

/// Canonical sequence serialization matching [`parse_sequence`].
pub fn write_sequence(seq: &GraphSequence) -> String {
    let period = seq.period().unwrap_or(seq.len());
    let mut out = format!("{} {} {}\n", seq.n(), seq.order().get(), period);
    for (i, g) in seq.graphs().iter().enumerate() {
        if i > 0 {
            out.push_str("---\n");
        }
        for arc in g.arcs() {
            out.push_str(&format!(
                "{} {} {}\n",
                arc.tail,
                arc.head,
                arc.gain.exponent()
            ));
        }
    }
    out
}

/// 17 significant digits; round-trips f64 exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Lifted matrix as CSV of exact fractions.
pub fn lifted_matrix_csv(lm: &LiftedMatrix) -> String {
    let dim = lm.dim();
    let mut out = String::new();
    for i in 1..=dim {
        let row: Vec<String> = (1..=dim).map(|j| lm.entry(i, j).to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Gain matrix as dense complex CSV: per entry a re/im column pair.
pub fn gain_matrix_csv(gm: &GainMatrix) -> String {
    let n = gm.n();
    let mut out = String::new();
    let header: Vec<String> = (1..=n)
        .flat_map(|j| [format!("re_{j}"), format!("im_{j}")])
        .collect();
    out.push_str(&header.join(","));
    out.push('\n');
    let dense = gm.complex();
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .flat_map(|j| {
                let c = dense[i * n + j];
                [fmt_f64(c.re), fmt_f64(c.im)]
            })
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Trace CSV: time, per-agent re/im, then the recorded metrics. The
/// disagreement column is empty when no clustering vector was supplied.
pub fn trace_csv(trace: &SimulationTrace) -> String {
    let n = trace.state(0).len();
    let mut out = String::from("t");
    for i in 1..=n {
        out.push_str(&format!(",re_{i},im_{i}"));
    }
    out.push_str(",modulus_spread,cluster_disagreement,max_modulus\n");
    for t in 0..trace.len() {
        out.push_str(&t.to_string());
        for c in trace.state(t) {
            out.push_str(&format!(",{},{}", fmt_f64(c.re), fmt_f64(c.im)));
        }
        let disagreement = trace
            .cluster_disagreement()
            .map(|s| fmt_f64(s[t]))
            .unwrap_or_default();
        out.push_str(&format!(
            ",{},{},{}\n",
            fmt_f64(trace.modulus_spread()[t]),
            disagreement,
            fmt_f64(trace.max_modulus()[t]),
        ));
    }
    out
}

/// Exponent list like `[0, 1, 0]`.
pub fn clustering_string(b: &ClusteringVector) -> String {
    let exps: Vec<String> = b.exponents().map(|e| e.to_string()).collect();
    format!("[{}]", exps.join(", "))
}

/// Class listing `V1 = {1, 3}` … including empty classes.
pub fn classes_string(b: &ClusteringVector) -> String {
    b.class_partition()
        .iter()
        .enumerate()
        .map(|(p, class)| {
            let members: Vec<String> = class.iter().map(|v| v.to_string()).collect();
            format!("V{} = {{{}}}", p + 1, members.join(", "))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn complex_string(c: Complex64) -> String {
    format!("{} + {}i", fmt_f64(c.re), fmt_f64(c.im))
}
