//! Command-line surface of the benchmark harness.

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use hqea::knapsack::Profile;
use hqea::optimizer::{Algorithm, OptimizerConfig};

use crate::table::cmd_table;
use crate::{cmd_gen, cmd_run, cmd_walkdist, ExperimentSpec, UsageError, DEFAULT_CHECKPOINTS};

#[derive(Debug, Parser)]
#[command(
    name = "hqea-bench",
    version,
    about = "Seeded, reproducible optimizer benchmarks on 0-1 knapsack instances"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a knapsack instance file (JSON)
    Gen {
        /// Number of items
        #[arg(long)]
        items: usize,
        /// Instance family: uncorrelated | strongly_correlated
        #[arg(long, default_value = "strongly_correlated", value_parser = parse_profile)]
        profile: Profile,
        /// Generation seed; the instance is a pure function of
        /// (items, profile, seed)
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output path (defaults to <instance-id>.json in the working
        /// directory)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Execute a batch of seeded runs, one trace CSV per run
    Run(RunArgs),
    /// Aggregate trace CSVs into a mean-best-fitness table
    Table {
        /// Directory holding trace CSVs produced by `run`
        #[arg(long)]
        trace_dir: PathBuf,
        /// Checkpoint generations, ascending (comma separated or repeated)
        #[arg(long, num_args = 1.., value_delimiter = ',')]
        checkpoints: Option<Vec<u32>>,
        /// Also write the table as long-format CSV to this path
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Export the exact walk angle distribution as CSV for plotting
    Walkdist {
        /// Walk length n
        #[arg(long)]
        steps: u32,
        /// Angle lattice size; positions map onto [-pi, pi]
        #[arg(long, default_value_t = 100)]
        n_max: u32,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Experiment spec JSON; replaces the per-field flags below
    #[arg(
        long,
        conflicts_with_all = ["instances", "algorithms", "runs", "generations", "checkpoints", "master_seed"]
    )]
    pub spec: Option<PathBuf>,
    /// Instance files to benchmark
    #[arg(long, num_args = 1..)]
    pub instances: Vec<PathBuf>,
    /// Algorithms to run (default: CGA QEA HQEA)
    #[arg(long, num_args = 1.., value_parser = parse_algorithm)]
    pub algorithms: Option<Vec<Algorithm>>,
    /// Seeded runs per (instance, algorithm) pair
    #[arg(long)]
    pub runs: Option<u32>,
    /// Generations per run
    #[arg(long)]
    pub generations: Option<u32>,
    /// Checkpoints the later table will read (validated against the run
    /// length up front)
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    pub checkpoints: Option<Vec<u32>>,
    /// Seed all run seeds derive from
    #[arg(long)]
    pub master_seed: Option<u64>,
    /// Trace output directory (default: traces)
    #[arg(long, env = "HQEA_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
    /// Worker threads (default: available parallelism)
    #[arg(long)]
    pub workers: Option<usize>,
    /// Local search walk length
    #[arg(long, default_value_t = 10)]
    pub local_n: u32,
    /// Remote search walk length
    #[arg(long, default_value_t = 100)]
    pub remote_n: u32,
    /// Angle lattice size shared by both searches
    #[arg(long, default_value_t = 100)]
    pub n_max: u32,
    /// Proposal rounds per selected individual
    #[arg(long, default_value_t = 5)]
    pub trials: u32,
    /// Population share each search refines, in (0, 1]
    #[arg(long, default_value_t = 0.2)]
    pub fraction: f64,
}

fn parse_profile(s: &str) -> Result<Profile, hqea::error::Error> {
    s.parse()
}

fn parse_algorithm(s: &str) -> Result<Algorithm, hqea::error::Error> {
    s.parse()
}

impl RunArgs {
    fn spec(&self) -> Result<ExperimentSpec> {
        if let Some(path) = &self.spec {
            return ExperimentSpec::from_json_file(path);
        }
        if self.instances.is_empty() {
            return Err(anyhow::Error::new(UsageError(
                "either --spec or --instances is required".into(),
            )));
        }
        Ok(ExperimentSpec {
            instances: self.instances.clone(),
            algorithms: self
                .algorithms
                .clone()
                .unwrap_or_else(|| Algorithm::ALL.to_vec()),
            runs: self.runs.unwrap_or(10),
            generations: self.generations.unwrap_or(1000),
            checkpoints: self
                .checkpoints
                .clone()
                .unwrap_or_else(|| DEFAULT_CHECKPOINTS.to_vec()),
            master_seed: self.master_seed.unwrap_or(42),
            output_dir: None,
        })
    }

    fn optimizer_config(&self, generations: u32) -> OptimizerConfig {
        let mut config = OptimizerConfig {
            max_generations: generations,
            ..OptimizerConfig::default()
        };
        config.local.walk_steps = self.local_n;
        config.remote.walk_steps = self.remote_n;
        for search in [&mut config.local, &mut config.remote] {
            search.n_max = self.n_max;
            search.trials = self.trials;
            search.fraction = self.fraction;
        }
        config
    }
}

/// Runs one parsed invocation to completion.
pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen {
            items,
            profile,
            seed,
            out,
        } => {
            let id = cmd_gen(items, profile, seed, out)?;
            println!("{id}");
        }
        Command::Run(args) => {
            let spec = args.spec()?;
            let out_dir = args
                .out_dir
                .clone()
                .or_else(|| spec.output_dir.clone())
                .unwrap_or_else(|| PathBuf::from("traces"));
            let config = args.optimizer_config(spec.generations);
            let paths = cmd_run(&spec, &config, &out_dir, args.workers)?;
            println!("wrote {} trace files to {}", paths.len(), out_dir.display());
        }
        Command::Table {
            trace_dir,
            checkpoints,
            csv,
        } => {
            let checkpoints = checkpoints.unwrap_or_else(|| DEFAULT_CHECKPOINTS.to_vec());
            if !checkpoints.windows(2).all(|w| w[0] < w[1]) {
                return Err(anyhow::Error::new(UsageError(
                    "checkpoints must be strictly ascending".into(),
                )));
            }
            let text = cmd_table(&trace_dir, &checkpoints, csv.as_deref())?;
            print!("{text}");
        }
        Command::Walkdist { steps, n_max, out } => {
            cmd_walkdist(steps, n_max, &out)?;
            println!(
                "wrote walk distribution for n={steps}, n_max={n_max} to {}",
                out.display()
            );
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn run_args_build_the_documented_defaults() {
        let cli = Cli::parse_from(["hqea-bench", "run", "--instances", "a.json"]);
        let Command::Run(args) = cli.command else {
            panic!("expected run");
        };
        let spec = args.spec().unwrap();
        assert_eq!(spec.runs, 10);
        assert_eq!(spec.generations, 1000);
        assert_eq!(spec.checkpoints, DEFAULT_CHECKPOINTS.to_vec());
        assert_eq!(spec.master_seed, 42);
        let config = args.optimizer_config(spec.generations);
        assert_eq!(config, OptimizerConfig::default());
    }

    #[test]
    fn search_knobs_flow_into_both_operators() {
        let cli = Cli::parse_from([
            "hqea-bench",
            "run",
            "--instances",
            "a.json",
            "--local-n",
            "5",
            "--remote-n",
            "50",
            "--n-max",
            "50",
            "--trials",
            "2",
            "--fraction",
            "0.5",
        ]);
        let Command::Run(args) = cli.command else {
            panic!("expected run");
        };
        let config = args.optimizer_config(100);
        assert_eq!(config.local.walk_steps, 5);
        assert_eq!(config.remote.walk_steps, 50);
        assert_eq!(config.local.n_max, 50);
        assert_eq!(config.remote.trials, 2);
        assert_eq!(config.local.fraction, 0.5);
    }

    #[test]
    fn spec_flag_conflicts_with_field_flags() {
        let parsed = Cli::try_parse_from(["hqea-bench", "run", "--spec", "s.json", "--runs", "3"]);
        assert!(parsed.is_err());
    }
}
