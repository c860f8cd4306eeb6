//! Multi-start benchmark execution and report files.
//!
//! Summary CSV schema, one row per optimizer:
//! `optimizer,box,runs,iter_min,iter_q1,iter_median,iter_mean,iter_q3,iter_max,mean_forward,mean_backward,mean_time_s,percent_converged`
//!
//! Basin CSV schema, one row per basin plus a final `Other` row for runs
//! that did not converge:
//! `nll,<parameter names...>,<percent per optimizer...>`

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use hmmfit_core::bench::{cluster_basins, start_list, summarize, BasinTable, OptimizerSummary};
use hmmfit_core::models::{AnyModel, ModelKind};
use hmmfit_core::optim::StopReason;
use hmmfit_core::{BoxKind, HmmModel, ObsSequence, Optimizer, OptimizerConfig, RunRecord};
use rayon::prelude::*;

use crate::config::BenchConfig;
use crate::error::Error;

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub model: ModelKind,
    /// Box each optimizer ran in, in optimizer order.
    pub boxes: Vec<(Optimizer, BoxKind)>,
    pub n_starts: usize,
    pub seed: u64,
    pub starts: Vec<Vec<f64>>,
    /// Runs per optimizer, in start order.
    pub runs: Vec<(Optimizer, Vec<RunRecord>)>,
    pub summaries: Vec<OptimizerSummary>,
    pub basins: BasinTable,
}

impl BenchReport {
    pub fn box_of(&self, optimizer: Optimizer) -> Option<BoxKind> {
        self.boxes.iter().find(|(o, _)| *o == optimizer).map(|(_, b)| *b)
    }

    pub fn runs_of(&self, optimizer: Optimizer) -> Option<&[RunRecord]> {
        self.runs.iter().find(|(o, _)| *o == optimizer).map(|(_, r)| r.as_slice())
    }
}

fn failed_run(optimizer: Optimizer, theta0: &[f64]) -> RunRecord {
    RunRecord {
        optimizer,
        final_theta: theta0.to_vec(),
        final_loglik: f64::NEG_INFINITY,
        iterations: 0,
        n_forward: 0,
        n_backward: 0,
        wall_time_s: 0.0,
        converged: false,
        stop_reason: StopReason::NonFiniteLoglik,
        mode_trace: Vec::new(),
        loglik_trace: Vec::new(),
    }
}

/// Runs one optimizer from one start and times it. Errors become a failed
/// record so that one bad run cannot abort a benchmark.
pub fn timed_run<M: HmmModel>(
    optimizer: Optimizer,
    model: &M,
    seq: &ObsSequence,
    theta0: &[f64],
    cfg: &OptimizerConfig,
    timing: bool,
) -> RunRecord {
    let clock = Instant::now();
    let mut rec = optimizer.run(model, seq, theta0, cfg).unwrap_or_else(|_| failed_run(optimizer, theta0));
    rec.wall_time_s = if timing { clock.elapsed().as_secs_f64() } else { 0.0 };
    rec
}

/// Runs every optimizer from every shared start in parallel, then
/// aggregates in start order.
pub fn run_bench(cfg: &BenchConfig, seq: &ObsSequence, timing: bool) -> Result<BenchReport, Error> {
    run_bench_with(&cfg.model.build(), cfg, seq, timing)
}

pub fn run_bench_with(model: &AnyModel, cfg: &BenchConfig, seq: &ObsSequence, timing: bool) -> Result<BenchReport, Error> {
    model.validate(seq)?;
    cfg.optim.stop()?;
    let starts = start_list(model, cfg.n_starts, cfg.seed);
    let jobs: Vec<(usize, usize)> =
        (0..cfg.optimizers.len()).flat_map(|o| (0..starts.len()).map(move |s| (o, s))).collect();
    let records: Vec<RunRecord> = jobs
        .par_iter()
        .map(|&(o, s)| timed_run(cfg.optimizers[o], model, seq, &starts[s], &cfg.optim, timing))
        .collect();
    let mut runs: Vec<(Optimizer, Vec<RunRecord>)> = cfg.optimizers.iter().map(|&o| (o, Vec::new())).collect();
    for (&(o, _), rec) in jobs.iter().zip(records) {
        runs[o].1.push(rec);
    }
    let summaries = runs.iter().map(|(o, r)| summarize(*o, r)).collect();
    let groups: Vec<(Optimizer, &[RunRecord])> = runs.iter().map(|(o, r)| (*o, r.as_slice())).collect();
    let basins = cluster_basins(model, &groups, cfg.basins);
    Ok(BenchReport {
        model: cfg.model,
        boxes: cfg.optimizers.iter().map(|&o| (o, o.box_kind(model, &cfg.optim))).collect(),
        n_starts: cfg.n_starts,
        seed: cfg.seed,
        starts,
        runs,
        summaries,
        basins,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Markdown,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Markdown => "md",
            Format::Csv => "csv",
        }
    }
}

fn table(format: Format, header: &[String], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    match format {
        Format::Markdown => {
            let _ = writeln!(out, "| {} |", header.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(header.len()));
            for row in rows {
                let _ = writeln!(out, "| {} |", row.join(" | "));
            }
        }
        Format::Csv => {
            let _ = writeln!(out, "{}", header.join(","));
            for row in rows {
                let _ = writeln!(out, "{}", row.join(","));
            }
        }
    }
    out
}

/// Iteration-summary table. Counts, means and times use two decimals.
pub fn summary_table(report: &BenchReport, format: Format) -> String {
    let header: Vec<String> = [
        "optimizer", "box", "runs", "iter_min", "iter_q1", "iter_median", "iter_mean", "iter_q3", "iter_max",
        "mean_forward", "mean_backward", "mean_time_s", "percent_converged",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let rows: Vec<Vec<String>> = report
        .summaries
        .iter()
        .map(|s| {
            let mut row = vec![s.optimizer.name().to_string(), report.box_of(s.optimizer).map_or("", BoxKind::name).to_string(), s.runs.to_string()];
            match s.iterations {
                Some(q) => row.extend([q.min, q.q1, q.median, q.mean, q.q3, q.max].iter().map(|v| format!("{v:.2}"))),
                None => row.extend(std::iter::repeat_n(String::new(), 6)),
            }
            row.extend([s.mean_forward, s.mean_backward, s.mean_time_s, s.percent_converged].iter().map(|v| format!("{v:.2}")));
            row
        })
        .collect();
    table(format, &header, &rows)
}

/// Convergence-point table: NLL to one decimal, parameters to two (`ND`
/// where a parameter has no effect), percent of runs per optimizer to one.
pub fn basin_table(report: &BenchReport, format: Format) -> String {
    let model = report.model.build();
    let table_data = &report.basins;
    let mut header = vec!["nll".to_string()];
    header.extend(model.param_names().iter().map(|s| s.to_string()));
    header.extend(table_data.optimizers.iter().map(|o| o.name().to_string()));
    let mut rows: Vec<Vec<String>> = table_data
        .basins
        .iter()
        .map(|b| {
            let mut row = vec![format!("{:.1}", b.nll)];
            row.extend(b.theta.iter().map(|v| if v.is_nan() { "ND".to_string() } else { format!("{v:.2}") }));
            row.extend(b.counts.iter().enumerate().map(|(i, &c)| format!("{:.1}", table_data.percent(i, c))));
            row
        })
        .collect();
    if !table_data.optimizers.is_empty() {
        let mut row = vec!["Other".to_string()];
        row.extend(std::iter::repeat_n(String::new(), model.param_dim()));
        row.extend(table_data.other.iter().enumerate().map(|(i, &c)| format!("{:.1}", table_data.percent(i, c))));
        rows.push(row);
    }
    table(format, &header, &rows)
}

/// Writes `<model>_<stamp>_summary.{md,csv}` and `<model>_<stamp>_basins.{md,csv}`.
pub fn write_reports(report: &BenchReport, dir: &Path, stamp: &str) -> Result<Vec<PathBuf>, Error> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    for format in [Format::Markdown, Format::Csv] {
        for (kind, text) in [("summary", summary_table(report, format)), ("basins", basin_table(report, format))] {
            let path = dir.join(format!("{}_{stamp}_{kind}.{}", report.model.name(), format.extension()));
            std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
            written.push(path);
        }
    }
    Ok(written)
}
