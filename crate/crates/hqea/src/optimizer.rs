//! The three comparable optimizers: HQEA, the QEA baseline, and a
//! conventional genetic algorithm.
//!
//! All three run generation-by-generation against an [`Evaluator`] and
//! record the best fitness seen so far after each generation, so their
//! traces line up column-for-column in downstream tables. HQEA and QEA
//! share every line of machinery; HQEA differs only by running the remote
//! and local walk searches between evaluation and the rotation-gate update.
//! With search trials set to zero the two produce identical traces under
//! the same seed, which pins down that the searches are the *only*
//! difference (and that the rng stream discipline keeps their randomness
//! out of the shared phases).
//!
//! Randomness is split into named streams keyed by `(seed, concern,
//! generation, slot)`, so each concern draws from its own reproducible
//! sequence regardless of what the other concerns consume.

use std::cell::Cell;
use std::cmp::Reverse;
use std::fmt;
use std::io;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::qea::{Bitstring, QbitIndividual, SolutionBank};
use crate::search::{apply_search, Member, SearchParams};
use crate::stream::{stream, StreamKind, StreamRng};
use crate::Evaluator;
use rand::Rng;

/// The optimizer families the benchmark compares.
///
/// The derived order (CGA < QEA < HQEA) doubles as the presentation order
/// in aggregated tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Algorithm {
    Cga,
    Qea,
    Hqea,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Cga, Algorithm::Qea, Algorithm::Hqea];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Cga => "CGA",
            Algorithm::Qea => "QEA",
            Algorithm::Hqea => "HQEA",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "CGA" => Ok(Algorithm::Cga),
            "QEA" => Ok(Algorithm::Qea),
            "HQEA" => Ok(Algorithm::Hqea),
            other => Err(Error::InvalidConfig(format!(
                "unknown algorithm {other:?}; expected CGA, QEA, or HQEA"
            ))),
        }
    }
}

/// Conventional-GA operator rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CgaParams {
    /// Probability that a child is built by uniform crossover rather than
    /// copied from its first parent.
    pub crossover_rate: f64,
    /// Per-bit flip probability applied to every child.
    pub mutation_rate: f64,
    /// Number of best individuals carried over unchanged each generation.
    pub elitism: usize,
}

impl Default for CgaParams {
    fn default() -> Self {
        CgaParams {
            crossover_rate: 0.65,
            mutation_rate: 0.05,
            elitism: 1,
        }
    }
}

/// Shared configuration for all three optimizers.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub population_size: usize,
    /// Generations to run (`t_max`); traces have this many entries.
    pub max_generations: u32,
    /// Rotation-gate step for the update toward banked solutions.
    pub delta_theta: f64,
    /// Bank migration period in generations.
    pub migration_period: u64,
    pub local: SearchParams,
    pub remote: SearchParams,
    pub cga: CgaParams,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            population_size: 10,
            max_generations: 1000,
            delta_theta: 0.01 * std::f64::consts::PI,
            migration_period: 100,
            local: SearchParams::local(),
            remote: SearchParams::remote(),
            cga: CgaParams::default(),
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.population_size < 2 {
            return Err(Error::InvalidConfig(format!(
                "population_size must be at least 2, got {}",
                self.population_size
            )));
        }
        if self.max_generations < 1 {
            return Err(Error::InvalidConfig(
                "max_generations must be at least 1".into(),
            ));
        }
        if self.migration_period < 1 {
            return Err(Error::InvalidConfig(
                "migration_period must be at least 1".into(),
            ));
        }
        for rate in [self.cga.crossover_rate, self.cga.mutation_rate] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(Error::InvalidConfig(format!(
                    "CGA rates must lie in [0, 1], got {rate}"
                )));
            }
        }
        if self.cga.elitism > self.population_size {
            return Err(Error::InvalidConfig(format!(
                "elitism {} exceeds the population size {}",
                self.cga.elitism, self.population_size
            )));
        }
        self.local.validate()?;
        self.remote.validate()?;
        Ok(())
    }
}

/// Record of one seeded run: the best-so-far fitness after each generation
/// plus the exact number of fitness evaluations consumed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub algorithm: Algorithm,
    pub instance_id: String,
    pub seed: u64,
    /// `best_per_generation[t - 1]` is the best fitness seen through
    /// generation `t`; nondecreasing by construction.
    pub best_per_generation: Vec<u64>,
    pub evaluations_used: u64,
}

impl RunTrace {
    pub fn final_best(&self) -> u64 {
        *self
            .best_per_generation
            .last()
            .expect("traces cover at least one generation")
    }

    /// Best-so-far fitness through generation `generation` (1-based,
    /// inclusive).
    pub fn best_at(&self, generation: u32) -> u64 {
        assert!(
            generation >= 1 && generation as usize <= self.best_per_generation.len(),
            "generation {generation} outside the recorded range"
        );
        self.best_per_generation[generation as usize - 1]
    }

    /// Writes the trace as CSV rows
    /// `algorithm,instance_id,seed,generation,best_fitness` with LF line
    /// endings.
    pub fn write_csv<W: io::Write>(&self, writer: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "algorithm",
            "instance_id",
            "seed",
            "generation",
            "best_fitness",
        ])?;
        for (i, &best) in self.best_per_generation.iter().enumerate() {
            w.write_record([
                self.algorithm.name(),
                &self.instance_id,
                &self.seed.to_string(),
                &(i + 1).to_string(),
                &best.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs the given algorithm against the evaluator with the shared seed.
pub fn run<E: Evaluator + ?Sized>(
    algorithm: Algorithm,
    evaluator: &E,
    config: &OptimizerConfig,
    seed: u64,
) -> RunTrace {
    match algorithm {
        Algorithm::Cga => run_cga(evaluator, config, seed),
        Algorithm::Qea => run_qea(evaluator, config, seed),
        Algorithm::Hqea => run_hqea(evaluator, config, seed),
    }
}

/// HQEA: the QEA loop with the remote and local walk searches applied
/// between evaluation and the rotation-gate update each generation.
pub fn run_hqea<E: Evaluator + ?Sized>(
    evaluator: &E,
    config: &OptimizerConfig,
    seed: u64,
) -> RunTrace {
    run_quantum(evaluator, config, seed, true)
}

/// The QEA baseline: identical to HQEA with both search phases skipped.
pub fn run_qea<E: Evaluator + ?Sized>(
    evaluator: &E,
    config: &OptimizerConfig,
    seed: u64,
) -> RunTrace {
    run_quantum(evaluator, config, seed, false)
}

fn run_quantum<E: Evaluator + ?Sized>(
    evaluator: &E,
    config: &OptimizerConfig,
    seed: u64,
    with_search: bool,
) -> RunTrace {
    config.validate().expect("optimizer config");
    let counter = CountingEvaluator::new(evaluator);
    let num_bits = evaluator.num_bits();

    // generation 0: uniform superposition, observed and banked
    let mut members: Vec<Member> = (0..config.population_size)
        .map(|j| {
            let individual = QbitIndividual::new(num_bits);
            let raw = individual.observe(&mut stream(seed, StreamKind::Observe, 0, j as u64));
            let (solution, fitness) =
                counter.repair_and_score(raw, &mut stream(seed, StreamKind::Repair, 0, j as u64));
            Member {
                individual,
                solution,
                fitness,
            }
        })
        .collect();
    let mut bank = SolutionBank::new(&solution_pairs(&members));

    let mut best_per_generation = Vec::with_capacity(config.max_generations as usize);
    for t in 1..=config.max_generations as u64 {
        for (j, member) in members.iter_mut().enumerate() {
            let raw =
                member
                    .individual
                    .observe(&mut stream(seed, StreamKind::Observe, t, j as u64));
            let (solution, fitness) =
                counter.repair_and_score(raw, &mut stream(seed, StreamKind::Repair, t, j as u64));
            member.solution = solution;
            member.fitness = fitness;
        }
        if with_search {
            apply_search(&mut members, &config.remote, &counter, |slot| {
                stream(seed, StreamKind::RemoteSearch, t, slot as u64)
            });
            apply_search(&mut members, &config.local, &counter, |slot| {
                stream(seed, StreamKind::LocalSearch, t, slot as u64)
            });
        }
        // rotation-gate update toward each slot's banked best from the
        // previous generation
        for (member, entry) in members.iter_mut().zip(bank.entries()) {
            let x_not_worse = member.fitness >= entry.1;
            member.individual = member.individual.qea_update(
                &member.solution,
                &entry.0,
                x_not_worse,
                config.delta_theta,
            );
        }
        bank.update(&solution_pairs(&members));
        bank.migrate(t, config.migration_period);
        best_per_generation.push(bank.best_fitness());
    }

    RunTrace {
        algorithm: if with_search {
            Algorithm::Hqea
        } else {
            Algorithm::Qea
        },
        instance_id: evaluator.id().to_string(),
        seed,
        best_per_generation,
        evaluations_used: counter.count(),
    }
}

/// The conventional GA: roulette-wheel selection, uniform crossover,
/// per-bit mutation, repair, and elitist carry-over.
pub fn run_cga<E: Evaluator + ?Sized>(
    evaluator: &E,
    config: &OptimizerConfig,
    seed: u64,
) -> RunTrace {
    config.validate().expect("optimizer config");
    let counter = CountingEvaluator::new(evaluator);
    let num_bits = evaluator.num_bits();
    let pop = config.population_size;

    let mut population: Vec<(Bitstring, u64)> = (0..pop)
        .map(|j| {
            let mut ops = stream(seed, StreamKind::CgaOps, 0, j as u64);
            let raw = Bitstring::from_bits((0..num_bits).map(|_| ops.gen_bool(0.5)).collect());
            counter.repair_and_score(raw, &mut stream(seed, StreamKind::Repair, 0, j as u64))
        })
        .collect();
    let mut best_so_far = population
        .iter()
        .map(|&(_, f)| f)
        .max()
        .expect("population");

    let mut best_per_generation = Vec::with_capacity(config.max_generations as usize);
    for t in 1..=config.max_generations as u64 {
        let mut order: Vec<usize> = (0..pop).collect();
        order.sort_by_key(|&i| (Reverse(population[i].1), i));
        let mut next: Vec<(Bitstring, u64)> = order[..config.cga.elitism]
            .iter()
            .map(|&i| population[i].clone())
            .collect();
        for slot in config.cga.elitism..pop {
            let mut ops = stream(seed, StreamKind::CgaOps, t, slot as u64);
            let first = roulette(&population, &mut ops);
            let second = roulette(&population, &mut ops);
            let mut child = if ops.gen_bool(config.cga.crossover_rate) {
                uniform_crossover(&population[first].0, &population[second].0, &mut ops)
            } else {
                population[first].0.clone()
            };
            mutate(&mut child, config.cga.mutation_rate, &mut ops);
            let scored = counter
                .repair_and_score(child, &mut stream(seed, StreamKind::Repair, t, slot as u64));
            next.push(scored);
        }
        population = next;
        let generation_best = population
            .iter()
            .map(|&(_, f)| f)
            .max()
            .expect("population");
        best_so_far = best_so_far.max(generation_best);
        best_per_generation.push(best_so_far);
    }

    RunTrace {
        algorithm: Algorithm::Cga,
        instance_id: evaluator.id().to_string(),
        seed,
        best_per_generation,
        evaluations_used: counter.count(),
    }
}

/// Roulette-wheel draw proportional to fitness. Zero-fitness members keep
/// a `1e-9` sliver of the wheel so the spin stays well defined; an all-zero
/// population falls back to a uniform draw.
fn roulette(population: &[(Bitstring, u64)], rng: &mut StreamRng) -> usize {
    let total: f64 = population.iter().map(|&(_, f)| f as f64).sum();
    if total == 0.0 {
        return rng.gen_range(0..population.len());
    }
    let weights: Vec<f64> = population
        .iter()
        .map(|&(_, f)| if f == 0 { 1e-9 * total } else { f as f64 })
        .collect();
    let wheel: f64 = weights.iter().sum();
    let mut spin = rng.gen::<f64>() * wheel;
    for (i, w) in weights.iter().enumerate() {
        if spin < *w {
            return i;
        }
        spin -= w;
    }
    population.len() - 1
}

fn uniform_crossover(a: &Bitstring, b: &Bitstring, rng: &mut StreamRng) -> Bitstring {
    let bits = a
        .bits()
        .iter()
        .zip(b.bits())
        .map(|(&from_a, &from_b)| if rng.gen_bool(0.5) { from_a } else { from_b })
        .collect();
    Bitstring::from_bits(bits)
}

fn mutate(x: &mut Bitstring, rate: f64, rng: &mut StreamRng) {
    for i in 0..x.len() {
        if rng.gen_bool(rate) {
            x.set(i, !x.bit(i));
        }
    }
}

fn solution_pairs(members: &[Member]) -> Vec<(Bitstring, u64)> {
    members
        .iter()
        .map(|m| (m.solution.clone(), m.fitness))
        .collect()
}

/// Delegating evaluator that counts every fitness evaluation.
struct CountingEvaluator<'a, E: ?Sized> {
    inner: &'a E,
    evaluations: Cell<u64>,
}

impl<'a, E: Evaluator + ?Sized> CountingEvaluator<'a, E> {
    fn new(inner: &'a E) -> Self {
        CountingEvaluator {
            inner,
            evaluations: Cell::new(0),
        }
    }

    fn count(&self) -> u64 {
        self.evaluations.get()
    }
}

impl<E: Evaluator + ?Sized> Evaluator for CountingEvaluator<'_, E> {
    fn num_bits(&self) -> usize {
        self.inner.num_bits()
    }

    fn id(&self) -> &str {
        self.inner.id()
    }

    fn repair_and_score(&self, raw: Bitstring, rng: &mut StreamRng) -> (Bitstring, u64) {
        self.evaluations.set(self.evaluations.get() + 1);
        self.inner.repair_and_score(raw, rng)
    }
}
