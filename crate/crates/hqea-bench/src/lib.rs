//! Library half of the `hqea-bench` binary: experiment specs, batch
//! execution, and trace aggregation.
//!
//! The benchmark protocol is a pure function of the experiment spec. Run
//! seeds derive from the master seed by run index and are shared across
//! algorithms, so run `i` of HQEA, QEA, and CGA all start from the same
//! stream family and comparisons are paired. Rerunning a spec rewrites
//! byte-identical trace files.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use hqea::knapsack::{KnapsackInstance, Profile};
use hqea::optimizer::{run, Algorithm, OptimizerConfig, RunTrace};
use hqea::stream::run_seed;
use hqea::walk::run_walk;

pub mod cli;
pub mod table;

/// Error class that maps to exit code 2 (bad invocation or spec) instead of
/// 1 (runtime failure).
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

pub const DEFAULT_CHECKPOINTS: [u32; 5] = [50, 100, 250, 500, 1000];

/// A batch of runs: every algorithm on every instance, `runs` times each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    /// Instance files in the JSON instance format.
    pub instances: Vec<PathBuf>,
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "default_runs")]
    pub runs: u32,
    /// Generations per run; traces record one row per generation.
    #[serde(default = "default_generations")]
    pub generations: u32,
    /// Generation counts the table reports, ascending.
    #[serde(default = "default_checkpoints")]
    pub checkpoints: Vec<u32>,
    #[serde(default = "default_master_seed")]
    pub master_seed: u64,
    /// Where trace CSVs land; the CLI may override this.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn default_algorithms() -> Vec<Algorithm> {
    Algorithm::ALL.to_vec()
}

fn default_runs() -> u32 {
    10
}

fn default_generations() -> u32 {
    1000
}

fn default_checkpoints() -> Vec<u32> {
    DEFAULT_CHECKPOINTS.to_vec()
}

fn default_master_seed() -> u64 {
    42
}

impl ExperimentSpec {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading experiment spec {}", path.display()))?;
        let spec: ExperimentSpec = serde_json::from_str(&text)
            .map_err(|e| usage(format!("malformed experiment spec {}: {e}", path.display())))?;
        Ok(spec)
    }

    /// Rejects contradictions before any run starts.
    pub fn validate(&self) -> Result<()> {
        if self.instances.is_empty() {
            return Err(usage("the experiment needs at least one instance file"));
        }
        if self.algorithms.is_empty() {
            return Err(usage("the experiment needs at least one algorithm"));
        }
        if self.runs < 1 {
            return Err(usage("runs must be at least 1"));
        }
        if self.generations < 1 {
            return Err(usage("generations must be at least 1"));
        }
        if self.checkpoints.is_empty() {
            return Err(usage("the experiment needs at least one checkpoint"));
        }
        if !self.checkpoints.windows(2).all(|w| w[0] < w[1]) {
            return Err(usage("checkpoints must be strictly ascending"));
        }
        if let Some(&beyond) = self.checkpoints.iter().find(|&&c| c > self.generations) {
            return Err(usage(format!(
                "checkpoint {beyond} lies beyond the run length of {} generations",
                self.generations
            )));
        }
        Ok(())
    }
}

/// Generates an instance file; returns the instance id.
pub fn cmd_gen(items: usize, profile: Profile, seed: u64, out: Option<PathBuf>) -> Result<String> {
    if items < 1 {
        return Err(usage("--items must be at least 1"));
    }
    let inst = KnapsackInstance::generate(items, profile, seed);
    let path = out.unwrap_or_else(|| PathBuf::from(format!("{}.json", inst.id())));
    fs::write(&path, inst.to_json_string())
        .with_context(|| format!("writing instance file {}", path.display()))?;
    Ok(inst.id().to_string())
}

/// Executes the spec: one trace CSV per (instance, algorithm, run).
/// Returns the written paths in a deterministic order.
pub fn cmd_run(
    spec: &ExperimentSpec,
    config: &OptimizerConfig,
    output_dir: &Path,
    workers: Option<usize>,
) -> Result<Vec<PathBuf>> {
    spec.validate()?;
    config
        .validate()
        .map_err(|e| usage(format!("optimizer configuration: {e}")))?;

    // fail on any missing or malformed instance before starting work
    let instances: Vec<KnapsackInstance> = spec
        .instances
        .iter()
        .map(|path| {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading instance file {}", path.display()))?;
            KnapsackInstance::from_json_str(&text)
                .with_context(|| format!("loading instance file {}", path.display()))
        })
        .collect::<Result<_>>()?;

    fs::create_dir_all(output_dir)
        .with_context(|| format!("creating output directory {}", output_dir.display()))?;

    struct Job<'a> {
        inst: &'a KnapsackInstance,
        algorithm: Algorithm,
        run_index: u32,
    }

    let mut jobs = Vec::new();
    for inst in &instances {
        for &algorithm in &spec.algorithms {
            for run_index in 0..spec.runs {
                jobs.push(Job {
                    inst,
                    algorithm,
                    run_index,
                });
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .context("building the worker pool")?;
    let paths: Vec<PathBuf> = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let seed = run_seed(spec.master_seed, job.run_index);
                let trace = run(job.algorithm, job.inst, config, seed);
                let path =
                    output_dir.join(trace_file_name(job.inst.id(), job.algorithm, job.run_index));
                write_trace(&trace, &path)?;
                Ok(path)
            })
            .collect::<Result<_>>()
    })?;
    Ok(paths)
}

fn trace_file_name(instance_id: &str, algorithm: Algorithm, run_index: u32) -> String {
    format!("{instance_id}-{algorithm}-run{run_index:02}.csv")
}

fn write_trace(trace: &RunTrace, path: &Path) -> Result<()> {
    let file =
        fs::File::create(path).with_context(|| format!("creating trace {}", path.display()))?;
    trace
        .write_csv(file)
        .with_context(|| format!("writing trace {}", path.display()))?;
    Ok(())
}

/// Exports the exact walk distribution for external plotting.
pub fn cmd_walkdist(steps: u32, n_max: u32, out: &Path) -> Result<()> {
    if n_max < 1 {
        return Err(usage("--n-max must be at least 1"));
    }
    if steps > n_max {
        return Err(usage(format!(
            "--steps {steps} exceeds --n-max {n_max}; the walk would leave the angle lattice"
        )));
    }
    let angles = run_walk(steps)
        .to_angles(n_max)
        .map_err(|e| usage(e.to_string()))?;
    let file = fs::File::create(out)
        .with_context(|| format!("creating walk distribution file {}", out.display()))?;
    angles
        .write_csv(file)
        .with_context(|| format!("writing walk distribution {}", out.display()))?;
    Ok(())
}
