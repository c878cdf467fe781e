//! Walk-driven search operators: rotation proposals sampled from a
//! Hadamard-walk angle distribution, accepted on strict fitness
//! improvement.
//!
//! Both operators share one mechanism and differ only in tuning. Local
//! search refines the best slice of the population with a short walk
//! (default 10 steps on the 100-site lattice), so every proposal stays
//! within `±0.1 pi` per q-bit: small, exploitative nudges around solutions
//! already known to be good. Remote search refines the *worst* slice with a
//! full-length walk whose proposals span up to `±pi`, enough to invert any
//! bit probability outright: exploratory jumps that give stragglers a
//! genuinely new location instead of a slow crawl out of a bad basin.
//!
//! A proposal round samples one walk angle per q-bit, rotates, and scores
//! the rotated individual by a single observe-repair-evaluate pass. Only a
//! strictly better score replaces the incumbent, so plateaus do not churn
//! and refined fitness never degrades.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::Error;
use crate::qea::{Bitstring, QbitIndividual};
use crate::stream::StreamRng;
use crate::walk::{run_walk, AngleDistribution};
use crate::Evaluator;

/// Which end of the fitness ranking a search operator refines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Refine the best-ranked individuals (exploitation).
    Local,
    /// Refine the worst-ranked individuals (exploration).
    Remote,
}

/// Tuning of one search operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchParams {
    /// Walk length `n`; longer walks spread proposals further.
    pub walk_steps: u32,
    /// Angle lattice size: positions map onto `[-pi, pi]` in units of
    /// `pi / n_max`.
    pub n_max: u32,
    /// Proposal rounds per selected individual (`m`).
    pub trials: u32,
    /// Share of the population selected for refinement, in `(0, 1]`;
    /// the selected count is `ceil(fraction * population)`.
    pub fraction: f64,
    pub mode: SearchMode,
}

impl SearchParams {
    /// Exploitation defaults: 10-step walk on the 100-site lattice, five
    /// rounds for the best fifth of the population.
    pub fn local() -> Self {
        SearchParams {
            walk_steps: 10,
            n_max: 100,
            trials: 5,
            fraction: 0.20,
            mode: SearchMode::Local,
        }
    }

    /// Exploration defaults: full-length 100-step walk, five rounds for
    /// the worst fifth of the population.
    pub fn remote() -> Self {
        SearchParams {
            walk_steps: 100,
            n_max: 100,
            trials: 5,
            fraction: 0.20,
            mode: SearchMode::Remote,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.walk_steps < 1 || self.walk_steps > self.n_max {
            return Err(Error::InvalidConfig(format!(
                "walk_steps must lie in [1, n_max = {}], got {}",
                self.n_max, self.walk_steps
            )));
        }
        if !(self.fraction > 0.0 && self.fraction <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "selection fraction must lie in (0, 1], got {}",
                self.fraction
            )));
        }
        Ok(())
    }
}

/// One population slot: the q-bit individual together with its current
/// observed-and-repaired solution and that solution's fitness.
#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub individual: QbitIndividual,
    pub solution: Bitstring,
    pub fitness: u64,
}

/// Picks `ceil(fraction * len)` indices: the highest-fitness ones for
/// [`SearchMode::Local`], the lowest for [`SearchMode::Remote`]. Ties go to
/// the lower index. Returned indices are in ascending order.
pub fn select_individuals(fitnesses: &[u64], fraction: f64, mode: SearchMode) -> Vec<usize> {
    assert!(!fitnesses.is_empty(), "selection needs a population");
    assert!(
        fraction > 0.0 && fraction <= 1.0,
        "selection fraction must lie in (0, 1], got {fraction}"
    );
    let count = ((fraction * fitnesses.len() as f64).ceil() as usize).min(fitnesses.len());
    let mut indices: Vec<usize> = (0..fitnesses.len()).collect();
    match mode {
        SearchMode::Local => indices.sort_by_key(|&i| (std::cmp::Reverse(fitnesses[i]), i)),
        SearchMode::Remote => indices.sort_by_key(|&i| (fitnesses[i], i)),
    }
    indices.truncate(count);
    indices.sort_unstable();
    indices
}

type WalkCacheMap = HashMap<(u32, u32), Arc<AngleDistribution>>;

static WALK_CACHE: OnceLock<Mutex<WalkCacheMap>> = OnceLock::new();

/// The walk-angle distribution for `(walk_steps, n_max)`, computed once per
/// process and shared afterwards. Safe for concurrent callers.
pub fn cached_angle_distribution(walk_steps: u32, n_max: u32) -> Arc<AngleDistribution> {
    let cache = WALK_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("walk cache lock");
    map.entry((walk_steps, n_max))
        .or_insert_with(|| {
            let dist = run_walk(walk_steps)
                .to_angles(n_max)
                .expect("a walk of n <= n_max steps stays on the lattice");
            Arc::new(dist)
        })
        .clone()
}

/// Runs `params.trials` proposal rounds on one member.
///
/// Each round samples an independent walk angle per q-bit, rotates the
/// individual by them, scores the rotated candidate with a single
/// observe-repair-evaluate pass (one fitness evaluation), and replaces the
/// member only on a strictly better score. The member's fitness never
/// decreases; with `trials = 0` the member is untouched and the rng is
/// never drawn from.
pub fn qhw_refine<E: Evaluator + ?Sized>(
    member: &mut Member,
    params: &SearchParams,
    evaluator: &E,
    rng: &mut StreamRng,
) {
    if params.trials == 0 {
        return;
    }
    let angles = cached_angle_distribution(params.walk_steps, params.n_max);
    let num_bits = member.individual.len();
    for _ in 0..params.trials {
        let deltas: Vec<f64> = (0..num_bits).map(|_| angles.sample(rng)).collect();
        let candidate = member.individual.rotate_all(&deltas);
        let raw = candidate.observe(rng);
        let (solution, fitness) = evaluator.repair_and_score(raw, rng);
        if fitness > member.fitness {
            member.individual = candidate;
            member.solution = solution;
            member.fitness = fitness;
        }
    }
}

/// Applies one search operator to a population: selects the fraction given
/// by `params.mode`, then refines each selected member with its own rng
/// stream (obtained from `rng_for_slot` by population index). Unselected
/// members are untouched.
pub fn apply_search<E: Evaluator + ?Sized>(
    members: &mut [Member],
    params: &SearchParams,
    evaluator: &E,
    mut rng_for_slot: impl FnMut(usize) -> StreamRng,
) {
    let fitnesses: Vec<u64> = members.iter().map(|m| m.fitness).collect();
    for idx in select_individuals(&fitnesses, params.fraction, params.mode) {
        let mut rng = rng_for_slot(idx);
        qhw_refine(&mut members[idx], params, evaluator, &mut rng);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knapsack::{KnapsackInstance, Profile};
    use crate::stream::{seeded, stream, StreamKind};
    use std::f64::consts::PI;

    #[test]
    fn local_selection_takes_the_top_of_the_ranking() {
        assert_eq!(
            select_individuals(&[5, 9, 1, 7], 0.25, SearchMode::Local),
            [1]
        );
        assert_eq!(
            select_individuals(&[5, 9, 1, 7], 1.0, SearchMode::Local),
            [0, 1, 2, 3]
        );
    }

    #[test]
    fn remote_selection_takes_the_bottom_of_the_ranking() {
        assert_eq!(
            select_individuals(&[5, 9, 1, 7], 0.5, SearchMode::Remote),
            [0, 2]
        );
    }

    #[test]
    fn tied_fitnesses_select_the_lowest_indices() {
        assert_eq!(select_individuals(&[3, 3, 3], 0.30, SearchMode::Local), [0]);
        assert_eq!(
            select_individuals(&[3, 3, 3], 0.30, SearchMode::Remote),
            [0]
        );
    }

    #[test]
    fn selected_count_is_the_ceiling_of_the_fraction() {
        // 0.34 * 3 = 1.02 rounds up to two selected
        assert_eq!(
            select_individuals(&[3, 3, 3], 0.34, SearchMode::Local),
            [0, 1]
        );
        // the default fraction on the default population picks exactly two
        let fitnesses: Vec<u64> = (0..10).collect();
        assert_eq!(
            select_individuals(&fitnesses, 0.2, SearchMode::Local).len(),
            2
        );
        assert_eq!(
            select_individuals(&fitnesses, 0.2, SearchMode::Remote),
            [0, 1]
        );
        assert_eq!(
            select_individuals(&fitnesses, 0.2, SearchMode::Local),
            [8, 9]
        );
    }

    #[test]
    #[should_panic(expected = "needs a population")]
    fn selecting_from_an_empty_population_panics() {
        select_individuals(&[], 0.5, SearchMode::Local);
    }

    #[test]
    #[should_panic(expected = "fraction must lie in (0, 1]")]
    fn out_of_range_fraction_panics() {
        select_individuals(&[1, 2], 1.5, SearchMode::Local);
    }

    #[test]
    fn default_params_pass_validation() {
        assert!(SearchParams::local().validate().is_ok());
        assert!(SearchParams::remote().validate().is_ok());
        let mut bad = SearchParams::local();
        bad.walk_steps = 101;
        assert!(bad.validate().is_err());
        bad = SearchParams::local();
        bad.fraction = 0.0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn cache_returns_the_shared_precomputed_distribution() {
        let cached = cached_angle_distribution(10, 100);
        let fresh = run_walk(10).to_angles(100).unwrap();
        assert_eq!(cached.entries(), fresh.entries());
        let again = cached_angle_distribution(10, 100);
        assert!(Arc::ptr_eq(&cached, &again));
    }

    fn fresh_member(inst: &KnapsackInstance, seed: u64) -> Member {
        let individual = QbitIndividual::new(inst.num_items());
        let mut rng = seeded(seed);
        let raw = individual.observe(&mut rng);
        let (solution, fitness) = inst.repair_and_score(raw, &mut rng);
        Member {
            individual,
            solution,
            fitness,
        }
    }

    #[test]
    fn zero_trials_leave_the_member_and_rng_untouched() {
        let inst = KnapsackInstance::generate(12, Profile::StronglyCorrelated, 1);
        let mut member = fresh_member(&inst, 1);
        let before = member.clone();
        let mut rng = seeded(42);
        let mut params = SearchParams::local();
        params.trials = 0;
        qhw_refine(&mut member, &params, &inst, &mut rng);
        assert_eq!(member, before);
        assert_eq!(rng, seeded(42));
    }

    #[test]
    fn refinement_never_degrades_fitness() {
        let inst = KnapsackInstance::generate(20, Profile::StronglyCorrelated, 2);
        for seed in 0..40 {
            for params in [SearchParams::local(), SearchParams::remote()] {
                let mut member = fresh_member(&inst, seed);
                let before = member.fitness;
                let mut rng = seeded(500 + seed);
                qhw_refine(&mut member, &params, &inst, &mut rng);
                assert!(member.fitness >= before);
                assert!(inst.is_feasible(&member.solution));
                assert_eq!(member.fitness, inst.evaluate(&member.solution));
            }
        }
    }

    #[test]
    fn refinement_is_deterministic_per_rng_stream() {
        let inst = KnapsackInstance::generate(15, Profile::Uncorrelated, 3);
        let run = |seed: u64| {
            let mut member = fresh_member(&inst, 9);
            let mut rng = stream(seed, StreamKind::LocalSearch, 1, 0);
            qhw_refine(&mut member, &SearchParams::local(), &inst, &mut rng);
            member
        };
        assert_eq!(run(7), run(7));
    }

    /// Scores every solution identically, so no candidate is ever strictly
    /// better than the incumbent.
    struct Plateau(usize);

    impl Evaluator for Plateau {
        fn num_bits(&self) -> usize {
            self.0
        }
        fn id(&self) -> &str {
            "plateau"
        }
        fn repair_and_score(&self, raw: Bitstring, _rng: &mut StreamRng) -> (Bitstring, u64) {
            (raw, 10)
        }
    }

    #[test]
    fn plateaus_do_not_churn_the_incumbent() {
        let evaluator = Plateau(8);
        let mut member = Member {
            individual: QbitIndividual::new(8),
            solution: Bitstring::zeros(8),
            fitness: 10,
        };
        let before = member.clone();
        let mut rng = seeded(4);
        qhw_refine(&mut member, &SearchParams::remote(), &evaluator, &mut rng);
        assert_eq!(member, before);
    }

    #[test]
    fn local_proposals_stay_within_a_tenth_of_pi_per_round() {
        let params = SearchParams::local();
        let angles = cached_angle_distribution(params.walk_steps, params.n_max);
        for &(_, angle, _) in angles.entries() {
            assert!(angle.abs() <= 0.1 * PI + 1e-15);
        }
        // a single accepted round can move a q-bit by at most the support bound
        let inst = KnapsackInstance::generate(12, Profile::StronglyCorrelated, 5);
        let mut member = fresh_member(&inst, 11);
        let start = member.individual.clone();
        let mut one_round = params;
        one_round.trials = 1;
        let mut rng = seeded(13);
        qhw_refine(&mut member, &one_round, &inst, &mut rng);
        for (a, b) in start.thetas().iter().zip(member.individual.thetas()) {
            assert!((a - b).abs() <= 0.1 * PI + 1e-15);
        }
    }

    #[test]
    fn remote_proposals_span_the_full_angle_range() {
        let params = SearchParams::remote();
        let angles = cached_angle_distribution(params.walk_steps, params.n_max);
        let max_abs = angles
            .entries()
            .iter()
            .map(|&(_, a, _)| a.abs())
            .fold(0.0, f64::max);
        assert!(max_abs <= PI + 1e-15);
        assert!(max_abs > 0.5 * PI, "remote support unexpectedly narrow");
    }

    #[test]
    fn search_refines_only_the_selected_slots() {
        let inst = KnapsackInstance::generate(14, Profile::StronglyCorrelated, 6);
        let mut members: Vec<Member> = (0..5).map(|s| fresh_member(&inst, s)).collect();
        let before: Vec<Member> = members.clone();
        let fitnesses: Vec<u64> = members.iter().map(|m| m.fitness).collect();
        let mut params = SearchParams::remote();
        params.fraction = 0.4;
        let selected = select_individuals(&fitnesses, params.fraction, params.mode);
        apply_search(&mut members, &params, &inst, |slot| {
            stream(99, StreamKind::RemoteSearch, 1, slot as u64)
        });
        for (i, (now, was)) in members.iter().zip(&before).enumerate() {
            assert!(now.fitness >= was.fitness);
            if !selected.contains(&i) {
                assert_eq!(now, was, "unselected slot {i} changed");
            }
        }
    }
}
