use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use netform_core::analysis::markov::{
    binomial_law, ehrenfest_transition_matrix, parity_averaged_distance, stationary_distribution,
    total_variation,
};
use netform_core::analysis::{classify_state, median, summarize_ensemble, SummaryThresholds};
use netform_core::{
    run_ensemble, EnsembleSummary, GameName, GameSpec, ProbabilityMatrix, Rule, StateLabel,
    TrajectoryRecord,
};
use serde::Serialize;

use crate::config::{ExperimentConfig, Format};

/// Largest chain whose stationary vector is printed in full.
const PRINT_STATIONARY_MAX: usize = 10;

#[derive(Debug, Clone)]
pub struct Report {
    pub config: ExperimentConfig,
    pub summary: EnsembleSummary,
    /// Ensemble mean of the final visit probabilities.
    pub mean: Vec<Vec<f64>>,
    pub finals: Vec<ProbabilityMatrix>,
    /// Exact stationary law of one agent's urn pair, for the transfer rule.
    pub stationary: Option<Vec<f64>>,
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let n = cfg.agents;
    let spec = GameSpec::new(cfg.game());
    let records = run_ensemble(
        n,
        spec,
        &cfg.dynamics(),
        cfg.rounds,
        cfg.runs,
        cfg.seed,
        cfg.stride(),
    )?;
    let mut summary = summarize_ensemble(
        &records,
        SummaryThresholds {
            graph_eps: cfg.graph_eps(),
            fixation_tol: cfg.fixation_tol,
        },
    )?;
    occupancy(&records, cfg, &mut summary)?;
    if cfg.game() == GameName::StagHunt {
        cross_type(&records, &mut summary)?;
    }
    let stationary = if cfg.rule() == Rule::Transfer {
        Some(transfer_statistics(&records, cfg, &mut summary)?)
    } else {
        None
    };

    let mut mean = vec![vec![0.0; n]; n];
    for r in &records {
        for (i, row) in mean.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x += r.final_probabilities.get(i, j);
            }
        }
    }
    let runs = records.len() as f64;
    mean.iter_mut().flatten().for_each(|x| *x /= runs);

    Ok(Report {
        config: cfg.clone(),
        summary,
        mean,
        finals: records.into_iter().map(|r| r.final_probabilities).collect(),
        stationary,
    })
}

/// Share of all snapshots after time 0 falling in each class.
fn occupancy(
    records: &[TrajectoryRecord],
    cfg: &ExperimentConfig,
    summary: &mut EnsembleSummary,
) -> Result<()> {
    let mut counts = [0usize; StateLabel::ALL.len()];
    let mut total = 0usize;
    for s in records
        .iter()
        .flat_map(|r| &r.snapshots)
        .filter(|s| s.round > 0)
    {
        let label = classify_state(&s.probabilities, cfg.graph_eps(), cfg.fixation_tol)?.label();
        counts[StateLabel::ALL.iter().position(|&l| l == label).unwrap()] += 1;
        total += 1;
    }
    if total > 0 {
        for (label, c) in StateLabel::ALL.iter().zip(counts) {
            summary.statistics.insert(
                format!("occupancy_{}", label.as_str()),
                c as f64 / total as f64,
            );
        }
    }
    Ok(())
}

/// Per-agent probability of visiting the other type, at the horizon.
fn cross_type(records: &[TrajectoryRecord], summary: &mut EnsembleSummary) -> Result<()> {
    let mut cross = Vec::new();
    for r in records {
        let p = &r.final_probabilities;
        let types = r.final_profile.types();
        for i in 0..p.n() {
            let x: f64 = (0..p.n())
                .filter(|&j| types[j] != types[i])
                .map(|j| p.get(i, j))
                .sum();
            cross.push(x);
        }
    }
    summary
        .statistics
        .insert("median_cross_type_probability".into(), median(&cross)?);
    Ok(())
}

/// Agent 0's urns are `w[0][1]` and `w[0][2]`, so its first-urn count is
/// `p[0][1]` times the ball count. The time average runs over every
/// snapshot after time 0; the chain has period 2, so an odd stride is
/// needed for it to see both parities.
fn transfer_statistics(
    records: &[TrajectoryRecord],
    cfg: &ExperimentConfig,
    summary: &mut EnsembleSummary,
) -> Result<Vec<f64>> {
    let balls = (2.0 * cfg.init_weight).round() as usize;
    let chain = ehrenfest_transition_matrix(balls)?;
    let stationary = stationary_distribution(&chain, 1e-15, 1_000_000)?;
    let mut law = vec![0.0; balls + 1];
    let mut total = 0.0;
    for s in records
        .iter()
        .flat_map(|r| &r.snapshots)
        .filter(|s| s.round > 0)
    {
        let first = (s.probabilities.get(0, 1) * balls as f64).round() as usize;
        law[balls - first] += 1.0;
        total += 1.0;
    }
    let st = &mut summary.statistics;
    st.insert("urn_balls".into(), balls as f64);
    if total > 0.0 {
        law.iter_mut().for_each(|x| *x /= total);
        st.insert(
            "tv_time_average_to_binomial".into(),
            total_variation(&law, &binomial_law(balls)),
        );
    }
    st.insert(
        "exact_tv_from_full_urn_at_horizon".into(),
        parity_averaged_distance(balls, cfg.rounds)?,
    );
    if balls <= PRINT_STATIONARY_MAX {
        for (k, x) in stationary.iter().enumerate() {
            st.insert(format!("stationary_{k}"), *x);
        }
    }
    Ok(stationary)
}

/// One matrix as CSV: no header, six decimals, diagonal written as `0`.
pub fn matrix_csv(rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(j, x)| {
                if i == j {
                    "0".to_string()
                } else {
                    format!("{x:.6}")
                }
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn summary_csv(report: &Report) -> String {
    let s = &report.summary;
    let mut out = String::from("key,value\n");
    writeln!(out, "replicas,{}", s.replicas).unwrap();
    for (label, c) in &s.class_counts {
        writeln!(out, "class_{},{c}", label.as_str()).unwrap();
    }
    writeln!(out, "absorption_all_stag,{}", s.absorption.all_stag).unwrap();
    writeln!(out, "absorption_all_rabbit,{}", s.absorption.all_rabbit).unwrap();
    writeln!(out, "absorption_mixed,{}", s.absorption.mixed).unwrap();
    for (k, v) in &s.statistics {
        writeln!(out, "{k},{v}").unwrap();
    }
    out
}

#[derive(Serialize)]
struct SummaryJson<'a> {
    config: &'a ExperimentConfig,
    class_counts: std::collections::BTreeMap<&'static str, usize>,
    absorption: &'a netform_core::analysis::Absorption,
    statistics: &'a std::collections::BTreeMap<String, f64>,
}

#[derive(Serialize)]
struct MatricesJson {
    mean: Vec<Vec<f64>>,
    runs: Vec<Vec<Vec<f64>>>,
}

pub fn summary_json(report: &Report) -> String {
    let s = &report.summary;
    let doc = SummaryJson {
        config: &report.config,
        class_counts: s
            .class_counts
            .iter()
            .map(|(l, c)| (l.as_str(), *c))
            .collect(),
        absorption: &s.absorption,
        statistics: &s.statistics,
    };
    serde_json::to_string_pretty(&doc).expect("summary serializes") + "\n"
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

/// Writes the report's files under `config.out` in the configured format.
pub fn write_outputs(report: &Report) -> Result<()> {
    let dir = &report.config.out;
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    match report.config.format {
        Format::Csv => {
            write(&dir.join("mean_p.csv"), &matrix_csv(&report.mean))?;
            let runs = dir.join("final_p");
            fs::create_dir_all(&runs)
                .with_context(|| format!("cannot create {}", runs.display()))?;
            for (k, p) in report.finals.iter().enumerate() {
                write(
                    &runs.join(format!("run_{k:05}.csv")),
                    &matrix_csv(&p.to_rows()),
                )?;
            }
            write(&dir.join("summary.csv"), &summary_csv(report))?;
        }
        Format::Json => {
            let m = MatricesJson {
                mean: report.mean.clone(),
                runs: report.finals.iter().map(|p| p.to_rows()).collect(),
            };
            write(
                &dir.join("matrices.json"),
                &(serde_json::to_string(&m)? + "\n"),
            )?;
            write(&dir.join("summary.json"), &summary_json(report))?;
        }
    }
    Ok(())
}

pub fn print_summary(report: &Report, out: &mut impl Write) -> std::io::Result<()> {
    let c = &report.config;
    let s = &report.summary;
    writeln!(
        out,
        "{:?} with {} agents, {} rounds, {} runs, seed {}",
        c.game(),
        c.agents,
        c.rounds,
        c.runs,
        c.seed
    )?;
    for (label, n) in &s.class_counts {
        writeln!(out, "  {:<18}{n}", label.as_str())?;
    }
    if c.game() == GameName::StagHunt {
        let a = &s.absorption;
        writeln!(
            out,
            "  all stag {} ({:.1}%), all rabbit {}, mixed {}",
            a.all_stag,
            100.0 * s.all_stag_fraction(),
            a.all_rabbit,
            a.mixed
        )?;
    }
    if let Some(pi) = report
        .stationary
        .as_ref()
        .filter(|pi| pi.len() <= PRINT_STATIONARY_MAX + 1)
    {
        let cells: Vec<String> = pi.iter().map(|x| format!("{x:.6}")).collect();
        writeln!(out, "  stationary vector ({})", cells.join(", "))?;
    }
    for (k, v) in &s.statistics {
        writeln!(out, "  {k} = {v:.6}")?;
    }
    Ok(())
}
