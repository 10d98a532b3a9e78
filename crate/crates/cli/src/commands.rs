//! The three subcommands: `run`, `compare` and `consensus-bench`.

use std::path::Path;
use std::time::Instant;

use rfed_core::consensus::{self, ConsensusConfig, ConsensusMethod};
use rfed_core::fedopt::{self, Algorithm};
use rfed_core::manifold::distance;
use rfed_core::metrics;
use rfed_core::rng::{derive_rng, stream};
use rfed_core::{ManifoldPoint, Result};

use crate::output::{self, Series};
use crate::spec::{build_problem, ExperimentSpec, Problem};

/// One persisted history line: metrics at the iterate a round started
/// from, plus a final line for the returned point.
#[derive(Debug, Clone)]
pub struct HistoryRow {
    pub repeat: usize,
    pub round: usize,
    pub grad_norm: f64,
    pub loss: f64,
    pub loss_gap: f64,
    pub principal_angle_sum: f64,
    pub elapsed_seconds: f64,
}

/// Per-round aggregate over repeats.
#[derive(Debug, Clone)]
pub struct AggregateRow {
    pub round: usize,
    pub grad_norm: f64,
    pub loss_gap: f64,
    pub principal_angle_sum: f64,
}

pub struct ResultTable {
    pub histories: Vec<Vec<HistoryRow>>,
    pub aggregate: Vec<AggregateRow>,
}

fn run_once(
    spec: &ExperimentSpec,
    problem: &Problem,
    repeat: usize,
) -> Result<Vec<HistoryRow>> {
    let seed = spec.algorithm.seed.wrapping_add(repeat as u64);
    let mut cfg = spec.algorithm.clone();
    cfg.seed = seed;
    let mut init_rng = derive_rng(seed, &[stream::INIT]);
    let x0 = ManifoldPoint::random(problem.kind, &mut init_rng)?;
    let (final_point, history) =
        fedopt::run(&cfg, &problem.global, &x0, Some(&problem.truth.x_star))?;

    let mut rows = Vec::with_capacity(history.len() + 1);
    for rec in &history {
        rows.push(HistoryRow {
            repeat,
            round: rec.round,
            grad_norm: rec.grad_norm,
            loss: rec.loss,
            loss_gap: rec.loss - problem.truth.f_star,
            principal_angle_sum: rec.principal_angle_sum.unwrap_or(f64::NAN),
            elapsed_seconds: rec.elapsed_seconds,
        });
    }
    // close the trajectory with the returned point; with T = 0 this is the
    // only row and describes the initial point
    let loss = problem.global.value(&final_point)?;
    rows.push(HistoryRow {
        repeat,
        round: history.len(),
        grad_norm: metrics::global_grad_norm(&problem.global, &final_point)?,
        loss,
        loss_gap: loss - problem.truth.f_star,
        principal_angle_sum: metrics::principal_angle_sum(&final_point, &problem.truth.x_star)?,
        elapsed_seconds: 0.0,
    });
    Ok(rows)
}

fn aggregate(histories: &[Vec<HistoryRow>]) -> Vec<AggregateRow> {
    let rounds = histories.first().map_or(0, |h| h.len());
    let mut out = Vec::with_capacity(rounds);
    for t in 0..rounds {
        let m = histories.len() as f64;
        out.push(AggregateRow {
            round: t,
            grad_norm: histories.iter().map(|h| h[t].grad_norm).sum::<f64>() / m,
            loss_gap: histories.iter().map(|h| h[t].loss_gap).sum::<f64>() / m,
            principal_angle_sum: histories
                .iter()
                .map(|h| h[t].principal_angle_sum)
                .sum::<f64>()
                / m,
        });
    }
    out
}

fn run_repeats(spec: &ExperimentSpec, problem: &Problem) -> Result<ResultTable> {
    let mut histories = Vec::with_capacity(spec.repeats);
    for repeat in 0..spec.repeats {
        histories.push(run_once(spec, problem, repeat)?);
    }
    let aggregate = aggregate(&histories);
    Ok(ResultTable { histories, aggregate })
}

fn history_lines(histories: &[Vec<HistoryRow>], label: Option<&str>) -> Vec<String> {
    let mut lines = Vec::new();
    for h in histories {
        for r in h {
            let prefix = match label {
                Some(l) => format!("{},", l),
                None => String::new(),
            };
            lines.push(format!(
                "{}{},{},{},{},{},{}",
                prefix, r.repeat, r.round, r.grad_norm, r.loss, r.loss_gap, r.principal_angle_sum
            ));
        }
    }
    lines
}

fn timing_lines(histories: &[Vec<HistoryRow>], label: Option<&str>) -> Vec<String> {
    let mut lines = Vec::new();
    for h in histories {
        for r in h {
            let prefix = match label {
                Some(l) => format!("{},", l),
                None => String::new(),
            };
            lines.push(format!("{}{},{},{}", prefix, r.repeat, r.round, r.elapsed_seconds));
        }
    }
    lines
}

fn aggregate_lines(rows: &[AggregateRow], label: Option<&str>) -> Vec<String> {
    rows.iter()
        .map(|r| {
            let prefix = match label {
                Some(l) => format!("{},", l),
                None => String::new(),
            };
            format!(
                "{}{},{},{},{}",
                prefix, r.round, r.grad_norm, r.loss_gap, r.principal_angle_sum
            )
        })
        .collect()
}

fn metric_series(rows: &[AggregateRow], label: &str) -> [Series; 3] {
    [
        Series {
            label: label.to_string(),
            values: rows.iter().map(|r| r.grad_norm).collect(),
        },
        Series {
            label: label.to_string(),
            values: rows.iter().map(|r| r.loss_gap).collect(),
        },
        Series {
            label: label.to_string(),
            values: rows.iter().map(|r| r.principal_angle_sum).collect(),
        },
    ]
}

const METRIC_NAMES: [&str; 3] = ["grad_norm", "loss_gap", "principal_angle_sum"];

fn write_charts(dir: &Path, per_metric: Vec<Vec<Series>>) -> Result<()> {
    for (name, series) in METRIC_NAMES.iter().zip(per_metric) {
        let titles = [
            "Global gradient norm",
            "Loss gap f(x_t) - f*",
            "Principal angle sum (radians)",
        ];
        let title = titles[METRIC_NAMES.iter().position(|n| n == name).unwrap()];
        output::write_svg_log_y(&dir.join(format!("{}.svg", name)), title, name, &series)?;
    }
    Ok(())
}

fn write_spec_json(dir: &Path, spec: &ExperimentSpec) -> Result<()> {
    let path = dir.join("spec.json");
    let json = serde_json::to_string_pretty(spec)
        .map_err(|e| rfed_core::Error::Format {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
    std::fs::write(&path, json + "\n").map_err(|e| output::io_err(&path, e))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| output::io_err(dir, e))
}

/// Runs the configured algorithm `repeats` times and persists history.csv,
/// aggregate.csv, timing.csv, spec.json and one log-scale chart per metric.
/// Wall-clock goes to timing.csv only, so history.csv is byte-identical
/// across reruns and worker counts.
pub fn cmd_run(spec: &ExperimentSpec) -> Result<ResultTable> {
    spec.validate()?;
    let problem = build_problem(spec)?;
    let table = run_repeats(spec, &problem)?;
    let dir = &spec.output_dir;
    ensure_dir(dir)?;
    output::write_lines(
        &dir.join("history.csv"),
        "repeat,round,grad_norm,loss,loss_gap,principal_angle_sum",
        &history_lines(&table.histories, None),
    )?;
    output::write_lines(
        &dir.join("timing.csv"),
        "repeat,round,elapsed_s",
        &timing_lines(&table.histories, None),
    )?;
    output::write_lines(
        &dir.join("aggregate.csv"),
        "round,grad_norm,loss_gap,principal_angle_sum",
        &aggregate_lines(&table.aggregate, None),
    )?;
    write_spec_json(dir, spec)?;
    let [g, l, a] = metric_series(&table.aggregate, &spec.algorithm.algorithm.to_string());
    write_charts(dir, vec![vec![g], vec![l], vec![a]])?;
    Ok(table)
}

/// Runs all three algorithms on identical data, partition and initial
/// points; persists a merged history plus overlay charts.
pub fn cmd_compare(spec: &ExperimentSpec) -> Result<Vec<(Algorithm, ResultTable)>> {
    spec.validate()?;
    let problem = build_problem(spec)?;
    let dir = &spec.output_dir;
    ensure_dir(dir)?;
    let mut merged_history = Vec::new();
    let mut merged_timing = Vec::new();
    let mut merged_aggregate = Vec::new();
    let mut per_metric: Vec<Vec<Series>> = vec![Vec::new(), Vec::new(), Vec::new()];
    let mut out = Vec::new();
    for alg in [Algorithm::RFedSvrg, Algorithm::RFedAvg, Algorithm::RFedProx] {
        let mut sub = spec.clone();
        sub.algorithm.algorithm = alg;
        let table = run_repeats(&sub, &problem)?;
        let label = alg.to_string();
        merged_history.extend(history_lines(&table.histories, Some(&label)));
        merged_timing.extend(timing_lines(&table.histories, Some(&label)));
        merged_aggregate.extend(aggregate_lines(&table.aggregate, Some(&label)));
        let [g, l, a] = metric_series(&table.aggregate, &label);
        per_metric[0].push(g);
        per_metric[1].push(l);
        per_metric[2].push(a);
        out.push((alg, table));
    }
    output::write_lines(
        &dir.join("history.csv"),
        "algorithm,repeat,round,grad_norm,loss,loss_gap,principal_angle_sum",
        &merged_history,
    )?;
    output::write_lines(
        &dir.join("timing.csv"),
        "algorithm,repeat,round,elapsed_s",
        &merged_timing,
    )?;
    output::write_lines(
        &dir.join("aggregate.csv"),
        "algorithm,round,grad_norm,loss_gap,principal_angle_sum",
        &merged_aggregate,
    )?;
    write_spec_json(dir, spec)?;
    write_charts(dir, per_metric)?;
    Ok(out)
}

/// Averaged consensus benchmark measurements for one dimension and method.
#[derive(Debug, Clone)]
pub struct ConsensusBenchRow {
    pub d: usize,
    pub method: ConsensusMethod,
    /// Mean squared distance from the anchor to the client points.
    pub h_before: f64,
    /// Mean squared distance from the consensus point to the client points.
    pub h_after: f64,
    /// Squared distance the consensus step moved the anchor.
    pub move_sq: f64,
    pub seconds: f64,
}

/// Benchmarks both consensus methods on uniformly random sphere
/// configurations, averaging over `trials`.
pub fn cmd_consensus_bench(
    d_list: &[usize],
    k: usize,
    trials: usize,
    seed: u64,
    out_dir: &Path,
) -> Result<Vec<ConsensusBenchRow>> {
    if k == 0 || trials == 0 {
        return Err(rfed_core::Error::InvalidConfig(
            "k and trials must be at least 1".into(),
        ));
    }
    ensure_dir(out_dir)?;
    let cfg = ConsensusConfig::default();
    let mut rows = Vec::new();
    for &d in d_list {
        let mut acc = [(0.0, 0.0, 0.0, 0.0); 2];
        for trial in 0..trials {
            let mut rng = derive_rng(seed, &[stream::DATA, d as u64, trial as u64]);
            let kind = rfed_core::ManifoldKind::sphere(d);
            let anchor = ManifoldPoint::random(kind, &mut rng)?;
            let points: Result<Vec<_>> = (0..k)
                .map(|_| ManifoldPoint::random(kind, &mut rng))
                .collect();
            let points = points?;
            let h_before = consensus::mean_squared_distance(&anchor, &points)?;

            let started = Instant::now();
            let tangent = consensus::tangent_space_mean(&anchor, &points, 1.0)?;
            let t_tangent = started.elapsed().as_secs_f64();

            let started = Instant::now();
            let karcher = consensus::karcher_mean(&points, &anchor, &cfg)?.point;
            let t_karcher = started.elapsed().as_secs_f64();

            for (slot, point, secs) in [
                (0usize, &tangent, t_tangent),
                (1usize, &karcher, t_karcher),
            ] {
                acc[slot].0 += h_before;
                acc[slot].1 += consensus::mean_squared_distance(point, &points)?;
                let moved = distance(&anchor, point)?;
                acc[slot].2 += moved * moved;
                acc[slot].3 += secs;
            }
        }
        let m = trials as f64;
        for (slot, method) in [
            (0usize, ConsensusMethod::TangentSpace),
            (1usize, ConsensusMethod::Karcher),
        ] {
            rows.push(ConsensusBenchRow {
                d,
                method,
                h_before: acc[slot].0 / m,
                h_after: acc[slot].1 / m,
                move_sq: acc[slot].2 / m,
                seconds: acc[slot].3 / m,
            });
        }
    }
    let lines: Vec<String> = rows
        .iter()
        .map(|r| {
            let name = match r.method {
                ConsensusMethod::TangentSpace => "tangent",
                ConsensusMethod::Karcher => "karcher",
            };
            format!(
                "{},{},{},{},{},{}",
                r.d, name, r.h_before, r.h_after, r.move_sq, r.seconds
            )
        })
        .collect();
    output::write_lines(
        &out_dir.join("consensus.csv"),
        "d,method,h_before,h_after,move_sq,seconds",
        &lines,
    )?;
    Ok(rows)
}
