//! Command implementations behind the CLI surface.
//!
//! Exit codes are part of the contract:
//!
//! * `check-balance`: 0 balanced, 1 unbalanced, 2 error.
//! * `lift`: 0 done, 2 error.
//! * `classify-sequence`: 0 repeatedly jointly balanced, 1 repeatedly
//!   jointly unbalanced, 3 mixed, 4 not jointly strongly connected, 2 error.
//! * `simulate`: 0 every trial reached m-modulus consensus, 1 every trial
//!   converged to zero, 3 anything else, 2 error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::mpsc;

use gainflock::balance::{check_balance, BalanceVerdict, ClusteringVector};
use gainflock::dynamics::{
    detect_limit, simulate, LimitVerdict, RateEstimate, SimulationTrace, Tolerances,
};
use gainflock::generate::random_state;
use gainflock::graph::{GainGraphLike, StepDirection};
use gainflock::lift::{classify, gain_matrix, lift_graph, lift_matrix, Classification, LiftError};
use gainflock::sequence::{classify_sequence, GraphSequence, SequenceKind, WindowSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::formats::{
    classes_string, clustering_string, complex_string, fmt_f64, gain_matrix_csv,
    lifted_matrix_csv, parse_graph, parse_sequence, trace_csv,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_MIXED: i32 = 3;
pub const EXIT_DISCONNECTED: i32 = 4;

#[derive(Debug)]
pub struct CliError(pub String);

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError(e.to_string())
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

fn write_output(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
    Ok(())
}

fn describe_witness(out: &mut String, witness: &gainflock::graph::SemiWalk) {
    out.push_str("witness semi-cycle:\n");
    for step in witness.steps() {
        let dir = match step.direction {
            StepDirection::Forward => "forward ",
            StepDirection::Backward => "backward",
        };
        out.push_str(&format!(
            "  {dir} {} -> {} (gain {})\n",
            step.arc.tail, step.arc.head, step.arc.gain
        ));
    }
}

pub fn cmd_check_balance(graph_path: &Path) -> Result<i32, CliError> {
    let g = parse_graph(&read_input(graph_path)?).map_err(|e| CliError(e.to_string()))?;
    match check_balance(&g) {
        BalanceVerdict::Balanced(b) => {
            println!("balanced");
            println!("b = {}", clustering_string(&b));
            println!("{}", classes_string(&b));
            Ok(EXIT_OK)
        }
        BalanceVerdict::Unbalanced(witness) => {
            println!("unbalanced");
            let gain = gainflock::graph::semiwalk_gain(&g, &witness)
                .expect("witness arcs come from the graph");
            println!("witness gain exponent = {gain}");
            let mut text = String::new();
            describe_witness(&mut text, &witness);
            print!("{text}");
            Ok(EXIT_NEGATIVE)
        }
    }
}

pub fn cmd_lift(graph_path: &Path, out_dir: &Path) -> Result<i32, CliError> {
    let g = parse_graph(&read_input(graph_path)?).map_err(|e| CliError(e.to_string()))?;
    fs::create_dir_all(out_dir)?;

    let gm = gain_matrix(&g).map_err(|e| CliError(e.to_string()))?;
    let lm = lift_matrix(&g).map_err(|e| CliError(e.to_string()))?;
    let lg = lift_graph(&g);
    let components = gainflock::lift::scc_partition(&lg);

    write_output(&out_dir.join("lifted_matrix.csv"), &lifted_matrix_csv(&lm))?;
    write_output(&out_dir.join("gain_matrix.csv"), &gain_matrix_csv(&gm))?;

    let mut comp_text = String::new();
    for comp in &components {
        let members: Vec<String> = comp.iter().map(|v| v.to_string()).collect();
        comp_text.push_str(&members.join(" "));
        comp_text.push('\n');
    }
    write_output(&out_dir.join("components.txt"), &comp_text)?;

    let mut report = String::new();
    report.push_str(&format!("input: {}\n", graph_path.display()));
    report.push_str(&format!("n = {}\nm = {}\n", g.vertex_count(), g.order()));
    report.push_str(&format!("lifted vertices = {}\n", lg.vertex_count()));
    report.push_str(&format!("components = {}\n", components.len()));
    match classify(&g) {
        Ok(rep) => match rep.classification {
            Classification::Balanced {
                clustering,
                predicted,
                matches_prediction,
            } => {
                report.push_str("balanced = true\n");
                report.push_str(&format!("b = {}\n", clustering_string(&clustering)));
                report.push_str(&format!("{}\n", classes_string(&clustering)));
                report.push_str("actual components:\n");
                for comp in &rep.components {
                    report.push_str(&format!("  {comp:?}\n"));
                }
                report.push_str("predicted components:\n");
                for comp in &predicted {
                    report.push_str(&format!("  {comp:?}\n"));
                }
                report.push_str(&format!("matches_prediction = {matches_prediction}\n"));
            }
            Classification::Unbalanced {
                component_count,
                min_component_size,
                count_bound,
                size_bound,
                within_bounds,
            } => {
                report.push_str("balanced = false\n");
                report.push_str(&format!(
                    "components = {component_count} (bound: at most {count_bound})\n"
                ));
                report.push_str(&format!(
                    "min component size = {min_component_size} (bound: at least {size_bound})\n"
                ));
                report.push_str(&format!("within_bounds = {within_bounds}\n"));
            }
        },
        Err(LiftError::NotStronglyConnected) => {
            report.push_str("strongly_connected = false\n");
            report.push_str("component classification skipped (needs strong connectivity)\n");
        }
        Err(e) => return Err(CliError(e.to_string())),
    }
    write_output(&out_dir.join("report.txt"), &report)?;

    println!(
        "lifted {} vertices into {}; {} strongly connected components",
        lg.vertex_count(),
        out_dir.display(),
        components.len()
    );
    Ok(EXIT_OK)
}

pub fn cmd_classify_sequence(
    seq_path: &Path,
    offset: usize,
    length: usize,
) -> Result<i32, CliError> {
    let seq = parse_sequence(&read_input(seq_path)?).map_err(|e| CliError(e.to_string()))?;
    let w = WindowSpec::new(offset, length).map_err(|e| CliError(e.to_string()))?;
    let verdict = classify_sequence(&seq, w).map_err(|e| CliError(e.to_string()))?;

    let code = match &verdict.kind {
        SequenceKind::RepeatedlyJointlyBalanced(b) => {
            println!("repeatedly jointly structurally balanced");
            println!("b = {}", clustering_string(b));
            EXIT_OK
        }
        SequenceKind::RepeatedlyJointlyUnbalanced => {
            println!("repeatedly jointly structurally unbalanced");
            EXIT_NEGATIVE
        }
        SequenceKind::Mixed => {
            println!("mixed: windows disagree on balance or clustering");
            EXIT_MIXED
        }
        SequenceKind::NotJointlyStronglyConnected => {
            println!("not jointly strongly connected at this window layout");
            EXIT_DISCONNECTED
        }
    };

    println!(
        "window layout: offset q = {}, length p = {}, distinct windows = {}",
        offset,
        length,
        verdict.windows.len()
    );
    for rep in &verdict.windows {
        let balance = match &rep.verdict {
            BalanceVerdict::Balanced(b) => format!("balanced b = {}", clustering_string(b)),
            BalanceVerdict::Unbalanced(_) => "unbalanced".to_string(),
        };
        println!(
            "  window {} (t = {}..{}): strongly_connected = {}, {}",
            rep.window,
            rep.start,
            rep.start + length - 1,
            rep.strongly_connected,
            balance
        );
    }
    Ok(code)
}

#[derive(Debug, Clone)]
pub struct SimulateConfig {
    pub input: PathBuf,
    pub offset: usize,
    pub length: usize,
    pub steps: Option<usize>,
    pub trials: usize,
    pub seed: Option<u64>,
    pub tolerances: Tolerances,
    pub out_dir: PathBuf,
    pub workers: Option<usize>,
}

struct TrialOutcome {
    trial: usize,
    record: serde_json::Value,
    kind: &'static str,
    line: String,
}

pub fn cmd_simulate(cfg: &SimulateConfig) -> Result<i32, CliError> {
    let seq = parse_sequence(&read_input(&cfg.input)?).map_err(|e| CliError(e.to_string()))?;
    let w = WindowSpec::new(cfg.offset, cfg.length).map_err(|e| CliError(e.to_string()))?;
    let steps = cfg.steps.unwrap_or(1000 * cfg.length);
    let seed = cfg.seed.unwrap_or_else(rand::random);
    let workers = cfg
        .workers
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
        .max(1);
    fs::create_dir_all(&cfg.out_dir)?;

    let sequence_verdict = classify_sequence(&seq, w).map_err(|e| CliError(e.to_string()))?;
    let balanced_wrt = match &sequence_verdict.kind {
        SequenceKind::RepeatedlyJointlyBalanced(b) => Some(b.clone()),
        _ => None,
    };
    let verdict_name = match &sequence_verdict.kind {
        SequenceKind::RepeatedlyJointlyBalanced(_) => "repeatedly-jointly-balanced",
        SequenceKind::RepeatedlyJointlyUnbalanced => "repeatedly-jointly-unbalanced",
        SequenceKind::Mixed => "mixed",
        SequenceKind::NotJointlyStronglyConnected => "not-jointly-strongly-connected",
    };

    println!(
        "sequence: n = {}, m = {}, period = {:?}; classified {} at (q = {}, p = {})",
        seq.n(),
        seq.order(),
        seq.period(),
        verdict_name,
        cfg.offset,
        cfg.length
    );
    println!("running {} trials of {} steps, seed {}", cfg.trials, steps, seed);

    let outcomes = run_trials(
        &seq,
        balanced_wrt.as_ref(),
        steps,
        cfg.trials,
        seed,
        cfg.tolerances,
        workers,
        &cfg.out_dir,
    )?;

    let mut consensus = 0usize;
    let mut zero = 0usize;
    let mut undecided = 0usize;
    let mut records = Vec::with_capacity(outcomes.len());
    for o in &outcomes {
        match o.kind {
            "m-modulus-consensus" => consensus += 1,
            "zero" => zero += 1,
            _ => undecided += 1,
        }
        println!("{}", o.line);
        records.push(o.record.clone());
    }

    let aggregate = if consensus == cfg.trials && cfg.trials > 0 {
        "consensus"
    } else if zero == cfg.trials && cfg.trials > 0 {
        "zero"
    } else {
        "mixed"
    };

    let summary = json!({
        "command": "simulate",
        "input": cfg.input.display().to_string(),
        "n": seq.n(),
        "m": seq.order().get(),
        "period": seq.period(),
        "window": {"offset": cfg.offset, "length": cfg.length},
        "sequence_verdict": verdict_name,
        "sequence_clustering": balanced_wrt.as_ref().map(|b| b.exponents().collect::<Vec<_>>()),
        "steps": steps,
        "trials": cfg.trials,
        "seed": seed,
        "tolerances": {
            "zero": cfg.tolerances.zero,
            "consensus": cfg.tolerances.consensus,
            "separation": cfg.tolerances.separation,
        },
        "results": records,
        "aggregate": {
            "consensus": consensus,
            "zero": zero,
            "undecided": undecided,
            "verdict": aggregate,
        },
    });
    let summary_path = cfg.out_dir.join("summary.json");
    let mut file = fs::File::create(&summary_path)
        .map_err(|e| CliError(format!("{}: {e}", summary_path.display())))?;
    serde_json::to_writer_pretty(&mut file, &summary).map_err(|e| CliError(e.to_string()))?;
    file.write_all(b"\n")?;

    println!(
        "aggregate: {} consensus, {} zero, {} undecided -> {}",
        consensus, zero, undecided, aggregate
    );
    println!("summary written to {}", summary_path.display());

    Ok(match aggregate {
        "consensus" => EXIT_OK,
        "zero" => EXIT_NEGATIVE,
        _ => EXIT_MIXED,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_trials(
    seq: &GraphSequence,
    balanced_wrt: Option<&ClusteringVector>,
    steps: usize,
    trials: usize,
    seed: u64,
    tolerances: Tolerances,
    workers: usize,
    out_dir: &Path,
) -> Result<Vec<TrialOutcome>, CliError> {
    let (tx, rx) = mpsc::channel::<Result<TrialOutcome, CliError>>();
    std::thread::scope(|scope| {
        for worker in 0..workers.min(trials.max(1)) {
            let tx = tx.clone();
            scope.spawn(move || {
                let mut trial = worker;
                while trial < trials {
                    let result = run_one_trial(
                        seq,
                        balanced_wrt,
                        steps,
                        seed,
                        trial,
                        tolerances,
                        out_dir,
                    );
                    if tx.send(result).is_err() {
                        return;
                    }
                    trial += workers;
                }
            });
        }
        drop(tx);

        let mut outcomes = Vec::with_capacity(trials);
        for received in rx {
            outcomes.push(received?);
        }
        outcomes.sort_by_key(|o| o.trial);
        Ok(outcomes)
    })
}

fn run_one_trial(
    seq: &GraphSequence,
    balanced_wrt: Option<&ClusteringVector>,
    steps: usize,
    seed: u64,
    trial: usize,
    tolerances: Tolerances,
    out_dir: &Path,
) -> Result<TrialOutcome, CliError> {
    // Stream separation keeps trials independent of worker scheduling.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let x0 = random_state(&mut rng, seq.n());
    let trace = simulate(seq, &x0, steps, balanced_wrt).map_err(|e| CliError(e.to_string()))?;
    let verdict = detect_limit(&trace, tolerances);

    let trace_path = out_dir.join(format!("trace_{trial:03}.csv"));
    write_output(&trace_path, &trace_csv(&trace))?;

    let final_max = *trace.max_modulus().last().expect("nonempty trace");
    let (kind, record, line) = describe_verdict(&verdict, &trace, trial, final_max);
    Ok(TrialOutcome {
        trial,
        record,
        kind,
        line,
    })
}

fn rate_json(rate: &Option<RateEstimate>) -> serde_json::Value {
    match rate {
        Some(RateEstimate::Fit { slope, r_squared }) => json!({
            "type": "fit",
            "slope": slope,
            "r_squared": r_squared,
        }),
        Some(RateEstimate::MetricHitZero) => json!({"type": "metric-hit-zero"}),
        None => serde_json::Value::Null,
    }
}

fn rate_text(rate: &Option<RateEstimate>) -> String {
    match rate {
        Some(RateEstimate::Fit { slope, r_squared }) => {
            format!("rate = {} (r² = {})", fmt_f64(*slope), fmt_f64(*r_squared))
        }
        Some(RateEstimate::MetricHitZero) => "rate = -inf (metric hit zero)".to_string(),
        None => "rate unavailable".to_string(),
    }
}

fn describe_verdict(
    verdict: &LimitVerdict,
    trace: &SimulationTrace,
    trial: usize,
    final_max: f64,
) -> (&'static str, serde_json::Value, String) {
    match verdict {
        LimitVerdict::MModulusConsensus {
            clustering,
            cluster_values,
            rate,
        } => {
            let values: Vec<serde_json::Value> = cluster_values
                .iter()
                .map(|(e, v)| {
                    json!({"exponent": e.exponent(), "re": v.re, "im": v.im})
                })
                .collect();
            let record = json!({
                "trial": trial,
                "verdict": "m-modulus-consensus",
                "clustering": clustering.exponents().collect::<Vec<_>>(),
                "occupied_classes": cluster_values.len(),
                "cluster_values": values,
                "rate": rate_json(rate),
                "final_max_modulus": final_max,
            });
            let vals: Vec<String> = cluster_values
                .iter()
                .map(|(e, v)| format!("V{} -> {}", e.exponent() + 1, complex_string(*v)))
                .collect();
            let line = format!(
                "trial {trial}: m-modulus-consensus b = {} ({}); {}",
                clustering_string(clustering),
                vals.join(", "),
                rate_text(rate)
            );
            ("m-modulus-consensus", record, line)
        }
        LimitVerdict::Zero { rate } => {
            let record = json!({
                "trial": trial,
                "verdict": "zero",
                "rate": rate_json(rate),
                "final_max_modulus": final_max,
            });
            let line = format!(
                "trial {trial}: zero (final max modulus {}); {}",
                fmt_f64(final_max),
                rate_text(rate)
            );
            ("zero", record, line)
        }
        LimitVerdict::Undecided => {
            let record = json!({
                "trial": trial,
                "verdict": "undecided",
                "final_max_modulus": final_max,
                "final_modulus_spread": trace.modulus_spread().last(),
            });
            let line = format!(
                "trial {trial}: undecided (final max modulus {})",
                fmt_f64(final_max)
            );
            ("undecided", record, line)
        }
    }
}

