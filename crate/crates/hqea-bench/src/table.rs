//! Trace aggregation: reads run CSVs back, checks the run grid is
//! complete, and renders mean best fitness per checkpoint as Table-style
//! text plus an optional long-format CSV.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use hqea::optimizer::Algorithm;

/// One trace file read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub algorithm: Algorithm,
    pub instance_id: String,
    pub seed: u64,
    /// Best-so-far fitness per generation, generation 1 first.
    pub best: Vec<u64>,
}

#[derive(Debug, Deserialize)]
struct TraceRow {
    algorithm: String,
    instance_id: String,
    seed: u64,
    generation: u32,
    best_fitness: u64,
}

/// Parses one trace CSV, checking the rows form one run with consecutive
/// generations.
pub fn read_trace(path: &Path) -> Result<TraceRecord> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading trace {}", path.display()))?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut record: Option<TraceRecord> = None;
    for row in reader.deserialize() {
        let row: TraceRow = row.with_context(|| format!("parsing trace {}", path.display()))?;
        let algorithm: Algorithm = row
            .algorithm
            .parse()
            .with_context(|| format!("parsing trace {}", path.display()))?;
        let current = record.get_or_insert_with(|| TraceRecord {
            algorithm,
            instance_id: row.instance_id.clone(),
            seed: row.seed,
            best: Vec::new(),
        });
        if current.algorithm != algorithm
            || current.instance_id != row.instance_id
            || current.seed != row.seed
        {
            bail!("trace {} mixes rows from different runs", path.display());
        }
        if row.generation as usize != current.best.len() + 1 {
            bail!(
                "trace {} has a generation gap at row {}",
                path.display(),
                row.generation
            );
        }
        current.best.push(row.best_fitness);
    }
    record
        .filter(|r| !r.best.is_empty())
        .with_context(|| format!("trace {} contains no rows", path.display()))
}

/// Reads every `.csv` file directly inside `dir`.
pub fn read_trace_dir(dir: &Path) -> Result<Vec<TraceRecord>> {
    let mut paths: Vec<_> = fs::read_dir(dir)
        .with_context(|| format!("reading trace directory {}", dir.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "csv"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        bail!("no trace CSVs found in {}", dir.display());
    }
    paths.iter().map(|p| read_trace(p)).collect()
}

/// Mean best fitness per (instance, checkpoint, algorithm), rounded
/// half-up to the nearest integer.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregatedTable {
    /// Instance blocks in id order.
    pub blocks: Vec<InstanceBlock>,
    pub checkpoints: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceBlock {
    pub instance_id: String,
    pub runs: usize,
    /// Algorithms present, in [`Algorithm::ALL`] order.
    pub algorithms: Vec<Algorithm>,
    /// `cells[c][a]` is the rounded mean at `checkpoints[c]` for
    /// `algorithms[a]`.
    pub cells: Vec<Vec<u64>>,
}

fn round_half_up(x: f64) -> u64 {
    (x + 0.5).floor() as u64
}

/// Groups traces by instance and algorithm, verifies the run grid is
/// complete (every algorithm of an instance ran the same seed set), and
/// averages best-so-far fitness at each checkpoint.
pub fn aggregate(traces: &[TraceRecord], checkpoints: &[u32]) -> Result<AggregatedTable> {
    assert!(!checkpoints.is_empty(), "aggregation needs checkpoints");
    assert!(
        checkpoints.windows(2).all(|w| w[0] < w[1]),
        "checkpoints must be strictly ascending"
    );

    let mut grid: BTreeMap<String, BTreeMap<Algorithm, Vec<&TraceRecord>>> = BTreeMap::new();
    for trace in traces {
        grid.entry(trace.instance_id.clone())
            .or_default()
            .entry(trace.algorithm)
            .or_default()
            .push(trace);
    }

    // gap detection: every algorithm of an instance must cover the same seeds
    let mut gaps = Vec::new();
    for (instance_id, by_algorithm) in &grid {
        let mut all_seeds: BTreeSet<u64> = BTreeSet::new();
        for runs in by_algorithm.values() {
            all_seeds.extend(runs.iter().map(|t| t.seed));
        }
        for (algorithm, runs) in by_algorithm {
            let have: BTreeSet<u64> = runs.iter().map(|t| t.seed).collect();
            if have.len() != runs.len() {
                gaps.push(format!("{instance_id}/{algorithm}: duplicate seeds"));
            }
            let missing: Vec<String> = all_seeds.difference(&have).map(|s| s.to_string()).collect();
            if !missing.is_empty() {
                gaps.push(format!(
                    "{instance_id}/{algorithm}: missing runs for seeds {}",
                    missing.join(", ")
                ));
            }
        }
    }
    if !gaps.is_empty() {
        bail!("incomplete run grid:\n  {}", gaps.join("\n  "));
    }

    let mut blocks = Vec::new();
    for (instance_id, by_algorithm) in &grid {
        let algorithms: Vec<Algorithm> = Algorithm::ALL
            .into_iter()
            .filter(|a| by_algorithm.contains_key(a))
            .collect();
        let runs = by_algorithm.values().next().expect("nonempty group").len();
        let mut cells = Vec::with_capacity(checkpoints.len());
        for &checkpoint in checkpoints {
            let mut row = Vec::with_capacity(algorithms.len());
            for &algorithm in &algorithms {
                let group = &by_algorithm[&algorithm];
                let mut sum = 0.0;
                for trace in group.iter() {
                    let idx = checkpoint as usize - 1;
                    let best = trace.best.get(idx).copied().with_context(|| {
                        format!(
                            "{instance_id}/{algorithm} seed {} records only {} generations, \
                             checkpoint {checkpoint} is unavailable",
                            trace.seed,
                            trace.best.len()
                        )
                    })?;
                    sum += best as f64;
                }
                row.push(round_half_up(sum / group.len() as f64));
            }
            cells.push(row);
        }
        blocks.push(InstanceBlock {
            instance_id: instance_id.clone(),
            runs,
            algorithms,
            cells,
        });
    }
    Ok(AggregatedTable {
        blocks,
        checkpoints: checkpoints.to_vec(),
    })
}

impl AggregatedTable {
    /// Aligned text form: one block per instance, checkpoint rows by
    /// algorithm columns.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let _ = writeln!(
                out,
                "instance: {} (runs: {})",
                block.instance_id, block.runs
            );
            let mut widths: Vec<usize> = block.algorithms.iter().map(|a| a.name().len()).collect();
            for row in &block.cells {
                for (w, cell) in widths.iter_mut().zip(row) {
                    *w = (*w).max(cell.to_string().len());
                }
            }
            let iter_width = "iterations".len().max(
                self.checkpoints
                    .iter()
                    .map(|c| c.to_string().len())
                    .max()
                    .unwrap_or(0),
            );
            let _ = write!(out, "{:>iter_width$}", "iterations");
            for (algorithm, width) in block.algorithms.iter().zip(&widths) {
                let _ = write!(out, "  {:>width$}", algorithm.name());
            }
            out.push('\n');
            for (checkpoint, row) in self.checkpoints.iter().zip(&block.cells) {
                let _ = write!(out, "{checkpoint:>iter_width$}");
                for (cell, width) in row.iter().zip(&widths) {
                    let _ = write!(out, "  {cell:>width$}");
                }
                out.push('\n');
            }
        }
        out
    }

    /// Long-format CSV: `instance_id,checkpoint,algorithm,mean_best`.
    pub fn render_csv(&self) -> String {
        let mut out = String::from("instance_id,checkpoint,algorithm,mean_best\n");
        for block in &self.blocks {
            for (checkpoint, row) in self.checkpoints.iter().zip(&block.cells) {
                for (algorithm, cell) in block.algorithms.iter().zip(row) {
                    let _ = writeln!(out, "{},{checkpoint},{algorithm},{cell}", block.instance_id);
                }
            }
        }
        out
    }
}

/// Reads a trace directory and renders the aggregate; writes the CSV form
/// to `csv_out` when given. Returns the text form.
pub fn cmd_table(trace_dir: &Path, checkpoints: &[u32], csv_out: Option<&Path>) -> Result<String> {
    let traces = read_trace_dir(trace_dir)?;
    let table = aggregate(&traces, checkpoints)?;
    if let Some(path) = csv_out {
        fs::write(path, table.render_csv())
            .with_context(|| format!("writing table CSV {}", path.display()))?;
    }
    Ok(table.render_text())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace(algorithm: Algorithm, instance_id: &str, seed: u64, best: &[u64]) -> TraceRecord {
        TraceRecord {
            algorithm,
            instance_id: instance_id.to_string(),
            seed,
            best: best.to_vec(),
        }
    }

    #[test]
    fn means_round_half_up() {
        let traces = vec![
            trace(Algorithm::Qea, "toy", 1, &[10, 10]),
            trace(Algorithm::Qea, "toy", 2, &[11, 12]),
        ];
        let table = aggregate(&traces, &[1, 2]).unwrap();
        // 10.5 rounds up to 11; 11.0 stays 11
        assert_eq!(table.blocks[0].cells, vec![vec![11], vec![11]]);
    }

    #[test]
    fn single_run_tables_echo_the_trace() {
        let traces = vec![trace(Algorithm::Hqea, "toy", 5, &[3, 7, 9])];
        let table = aggregate(&traces, &[1, 2, 3]).unwrap();
        assert_eq!(table.blocks[0].cells, vec![vec![3], vec![7], vec![9]]);
        assert_eq!(table.blocks[0].runs, 1);
    }

    #[test]
    fn algorithm_columns_follow_the_canonical_order() {
        let traces = vec![
            trace(Algorithm::Hqea, "toy", 1, &[5]),
            trace(Algorithm::Cga, "toy", 1, &[3]),
            trace(Algorithm::Qea, "toy", 1, &[4]),
        ];
        let table = aggregate(&traces, &[1]).unwrap();
        assert_eq!(
            table.blocks[0].algorithms,
            vec![Algorithm::Cga, Algorithm::Qea, Algorithm::Hqea]
        );
        assert_eq!(table.blocks[0].cells, vec![vec![3, 4, 5]]);
    }

    #[test]
    fn missing_runs_are_reported_per_algorithm_and_seed() {
        let traces = vec![
            trace(Algorithm::Qea, "toy", 1, &[1]),
            trace(Algorithm::Qea, "toy", 2, &[1]),
            trace(Algorithm::Cga, "toy", 1, &[1]),
        ];
        let err = aggregate(&traces, &[1]).unwrap_err().to_string();
        assert!(err.contains("toy/CGA"), "got: {err}");
        assert!(err.contains("2"), "got: {err}");
    }

    #[test]
    fn short_traces_fail_checkpoints_beyond_their_length() {
        let traces = vec![trace(Algorithm::Qea, "toy", 1, &[1, 2])];
        let err = aggregate(&traces, &[5]).unwrap_err().to_string();
        assert!(err.contains("checkpoint 5"), "got: {err}");
    }

    #[test]
    fn text_rendering_is_aligned_and_blocked_by_instance() {
        let traces = vec![
            trace(Algorithm::Cga, "alpha", 1, &[900, 950]),
            trace(Algorithm::Hqea, "alpha", 1, &[1000, 1100]),
            trace(Algorithm::Qea, "beta", 1, &[7, 8]),
        ];
        let table = aggregate(&traces, &[1, 2]).unwrap();
        let text = table.render_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "instance: alpha (runs: 1)");
        assert_eq!(lines[1], "iterations  CGA  HQEA");
        assert_eq!(lines[2], "         1  900  1000");
        assert_eq!(lines[3], "         2  950  1100");
        assert_eq!(lines[4], "");
        assert_eq!(lines[5], "instance: beta (runs: 1)");
    }

    #[test]
    fn csv_rendering_uses_the_long_format() {
        let traces = vec![
            trace(Algorithm::Qea, "toy", 1, &[4]),
            trace(Algorithm::Cga, "toy", 1, &[3]),
        ];
        let table = aggregate(&traces, &[1]).unwrap();
        assert_eq!(
            table.render_csv(),
            "instance_id,checkpoint,algorithm,mean_best\ntoy,1,CGA,3\ntoy,1,QEA,4\n"
        );
    }
}
