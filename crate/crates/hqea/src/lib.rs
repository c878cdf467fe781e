//! Quantum-inspired optimizers for binary problems, benchmarked on the
//! 0-1 knapsack.
//!
//! Three algorithm families share one evaluation model ([`Evaluator`]) and
//! one trace format ([`optimizer::RunTrace`]):
//!
//! - [`optimizer::run_cga`]: a conventional genetic algorithm baseline
//!   (roulette selection, uniform crossover, bit-flip mutation, elitism).
//! - [`optimizer::run_qea`]: a quantum-inspired evolutionary algorithm.
//!   Population slots are [`qea::QbitIndividual`]s — per-bit two-amplitude
//!   superpositions — observed into bitstrings each generation and rotated
//!   toward banked best solutions.
//! - [`optimizer::run_hqea`]: QEA plus two walk-driven operators per
//!   generation ([`search`]): a remote search proposing large rotations for
//!   the worst slots and a local search proposing small ones for the best.
//!   Proposal angles are sampled from exact Hadamard-walk distributions
//!   ([`walk`]), whose quadratic spreading gives long walks heavy shoulders
//!   and short walks tight support.
//!
//! Everything is deterministic given a seed: RNG use is split into named
//! streams keyed by (master seed, concern, generation, slot) ([`stream`]),
//! so runs reproduce bit for bit and algorithms can be compared on paired
//! seeds. See the `hqea-bench` binary for the experiment CLI and the book
//! under `book/` for a guided tour.
//!
//! ```
//! use hqea::knapsack::{KnapsackInstance, Profile};
//! use hqea::optimizer::{run, Algorithm, OptimizerConfig};
//!
//! let instance = KnapsackInstance::generate(20, Profile::Uncorrelated, 1);
//! let config = OptimizerConfig { max_generations: 50, ..OptimizerConfig::default() };
//! let trace = run(Algorithm::Hqea, &instance, &config, 7);
//! assert_eq!(trace.best_per_generation.len(), 50);
//! assert_eq!(trace, run(Algorithm::Hqea, &instance, &config, 7));
//! ```

pub mod error;
pub mod knapsack;
pub mod optimizer;
pub mod qea;
pub mod search;
pub mod stream;
pub mod walk;

use qea::Bitstring;
use stream::StreamRng;

/// A repairing fitness oracle over fixed-length bitstrings.
///
/// The optimizers never see raw observations: every candidate goes through
/// `repair_and_score`, which maps an arbitrary bitstring to a feasible
/// solution and its fitness. Higher fitness is better. Implementations must
/// be pure given the rng, so that seeded runs reproduce exactly.
pub trait Evaluator {
    /// Solution length the optimizers must produce.
    fn num_bits(&self) -> usize;

    /// Label recorded in run traces.
    fn id(&self) -> &str;

    /// Repairs `raw` into a feasible solution and scores it. Each call
    /// counts as one fitness evaluation.
    fn repair_and_score(&self, raw: Bitstring, rng: &mut StreamRng) -> (Bitstring, u64);
}
