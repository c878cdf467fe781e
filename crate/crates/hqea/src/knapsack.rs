//! 0-1 knapsack problem model: instance generation, feasibility repair,
//! fitness evaluation, and an exhaustive oracle for small instances.
//!
//! Fitness is the integer profit sum of the selected items, so comparisons
//! between solutions are exact. Infeasible bitstrings are never scored;
//! callers repair first. Repair is deliberately unbiased: it removes
//! uniformly random items until the selection fits, then fills remaining
//! slack in a uniformly random item order. A profit-density-greedy repair
//! would add selection pressure of its own and muddy comparisons between
//! optimizers.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::qea::Bitstring;
use crate::stream::StreamRng;
use crate::Evaluator;
use rand::seq::SliceRandom;
use rand::Rng;

/// Item-value family for generated instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// Weights and profits drawn independently, uniform in `[1, 10]`.
    Uncorrelated,
    /// Profit tracks weight: `p_i = w_i + 5`. The classic hard family for
    /// greedy choices, since profit densities bunch together.
    StronglyCorrelated,
}

impl Profile {
    fn slug(self) -> &'static str {
        match self {
            Profile::Uncorrelated => "uncorr",
            Profile::StronglyCorrelated => "strongcorr",
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Uncorrelated => f.write_str("uncorrelated"),
            Profile::StronglyCorrelated => f.write_str("strongly_correlated"),
        }
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uncorrelated" => Ok(Profile::Uncorrelated),
            "strongly_correlated" => Ok(Profile::StronglyCorrelated),
            other => Err(Error::InvalidInstance(format!(
                "unknown profile {other:?}; expected \"uncorrelated\" or \"strongly_correlated\""
            ))),
        }
    }
}

/// A 0-1 knapsack instance with integer weights and profits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnapsackInstance {
    id: String,
    capacity: u64,
    weights: Vec<u64>,
    profits: Vec<u64>,
}

impl KnapsackInstance {
    /// Builds an instance from raw vectors. Only shape is checked here;
    /// call [`KnapsackInstance::validate`] for the full invariants expected
    /// of instance files.
    pub fn new(id: impl Into<String>, weights: Vec<u64>, profits: Vec<u64>, capacity: u64) -> Self {
        assert_eq!(
            weights.len(),
            profits.len(),
            "weights and profits must pair up"
        );
        assert!(!weights.is_empty(), "an instance needs at least one item");
        KnapsackInstance {
            id: id.into(),
            capacity,
            weights,
            profits,
        }
    }

    /// Draws a fresh instance: weights uniform in `[1, 10]`, profits per
    /// `profile`, capacity `ceil(sum of weights / 2)`. Pure in
    /// `(num_items, profile, seed)`.
    pub fn generate(num_items: usize, profile: Profile, seed: u64) -> Self {
        assert!(num_items >= 1, "an instance needs at least one item");
        let mut rng = crate::stream::seeded(seed);
        let weights: Vec<u64> = (0..num_items).map(|_| rng.gen_range(1..=10)).collect();
        let profits: Vec<u64> = match profile {
            Profile::StronglyCorrelated => weights.iter().map(|w| w + 5).collect(),
            Profile::Uncorrelated => (0..num_items).map(|_| rng.gen_range(1..=10)).collect(),
        };
        let total: u64 = weights.iter().sum();
        let capacity = total.div_ceil(2);
        KnapsackInstance {
            id: format!("{}-n{}-seed{}", profile.slug(), num_items, seed),
            capacity,
            weights,
            profits,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn num_items(&self) -> usize {
        self.weights.len()
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn profits(&self) -> &[u64] {
        &self.profits
    }

    /// Checks the invariants expected of instances loaded from files:
    /// positive item values, a capacity that makes the problem nontrivial
    /// (below the total weight) and satisfiable (at least the lightest
    /// item).
    pub fn validate(&self) -> Result<(), Error> {
        if self.weights.contains(&0) {
            return Err(Error::InvalidInstance("weights must be positive".into()));
        }
        if self.profits.contains(&0) {
            return Err(Error::InvalidInstance("profits must be positive".into()));
        }
        let total: u64 = self.weights.iter().sum();
        if self.capacity >= total {
            return Err(Error::InvalidInstance(format!(
                "capacity {} admits every item (total weight {total}); the instance is trivial",
                self.capacity
            )));
        }
        let lightest = *self.weights.iter().min().expect("nonempty");
        if self.capacity < lightest {
            return Err(Error::InvalidInstance(format!(
                "capacity {} is below the lightest item ({lightest}); nothing fits",
                self.capacity
            )));
        }
        Ok(())
    }

    pub fn total_weight(&self, x: &Bitstring) -> u64 {
        assert_eq!(x.len(), self.num_items(), "solution length mismatch");
        self.weights
            .iter()
            .zip(x.bits())
            .filter(|&(_, &bit)| bit)
            .map(|(&w, _)| w)
            .sum()
    }

    pub fn is_feasible(&self, x: &Bitstring) -> bool {
        self.total_weight(x) <= self.capacity
    }

    /// Profit of a feasible solution. Infeasible input is a contract
    /// violation: repair first.
    pub fn evaluate(&self, x: &Bitstring) -> u64 {
        assert!(
            self.is_feasible(x),
            "evaluate called on an infeasible solution (weight {} > capacity {})",
            self.total_weight(x),
            self.capacity
        );
        self.profits
            .iter()
            .zip(x.bits())
            .filter(|&(_, &bit)| bit)
            .map(|(&p, _)| p)
            .sum()
    }

    /// Makes `x` feasible: removes uniformly random selected items while
    /// the selection is overweight, then walks the unselected items in a
    /// uniformly random order and adds each one that still fits.
    ///
    /// Feasible inputs only ever gain items, so their profit is monotone
    /// under repair.
    pub fn repair(&self, x: &Bitstring, rng: &mut StreamRng) -> Bitstring {
        assert_eq!(x.len(), self.num_items(), "solution length mismatch");
        let mut repaired = x.clone();
        let mut weight = self.total_weight(&repaired);
        while weight > self.capacity {
            let selected: Vec<usize> = (0..repaired.len()).filter(|&i| repaired.bit(i)).collect();
            let &victim = selected.choose(rng).expect("overweight implies nonempty");
            repaired.set(victim, false);
            weight -= self.weights[victim];
        }
        let mut unselected: Vec<usize> =
            (0..repaired.len()).filter(|&i| !repaired.bit(i)).collect();
        unselected.shuffle(rng);
        for i in unselected {
            if weight + self.weights[i] <= self.capacity {
                repaired.set(i, true);
                weight += self.weights[i];
            }
        }
        repaired
    }

    /// Exact maximum profit by exhaustive enumeration. Limited to 24 items
    /// to bound the runtime of the 2^n scan.
    pub fn brute_force_optimum(&self) -> u64 {
        let n = self.num_items();
        assert!(
            n <= 24,
            "exhaustive enumeration is limited to 24 items, got {n}"
        );
        let mut best = 0u64;
        for mask in 0u32..(1u32 << n) {
            let mut weight = 0u64;
            let mut profit = 0u64;
            for i in 0..n {
                if mask & (1 << i) != 0 {
                    weight += self.weights[i];
                    profit += self.profits[i];
                }
            }
            if weight <= self.capacity && profit > best {
                best = profit;
            }
        }
        best
    }

    /// Renders the instance file format: JSON with alphabetically sorted
    /// keys and a trailing newline, byte-stable for a given instance.
    pub fn to_json_string(&self) -> String {
        let value = serde_json::to_value(self).expect("instance is plain data");
        let mut text = serde_json::to_string_pretty(&value).expect("JSON value renders");
        text.push('\n');
        text
    }

    /// Parses and validates the instance file format.
    pub fn from_json_str(text: &str) -> Result<Self, Error> {
        let inst: KnapsackInstance = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInstance(format!("malformed JSON: {e}")))?;
        if inst.weights.len() != inst.profits.len() {
            return Err(Error::InvalidInstance(format!(
                "{} weights but {} profits",
                inst.weights.len(),
                inst.profits.len()
            )));
        }
        if inst.weights.is_empty() {
            return Err(Error::InvalidInstance("no items".into()));
        }
        inst.validate()?;
        Ok(inst)
    }
}

impl Evaluator for KnapsackInstance {
    fn num_bits(&self) -> usize {
        self.num_items()
    }

    fn id(&self) -> &str {
        &self.id
    }

    fn repair_and_score(&self, raw: Bitstring, rng: &mut StreamRng) -> (Bitstring, u64) {
        let repaired = self.repair(&raw, rng);
        let fitness = self.evaluate(&repaired);
        (repaired, fitness)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::seeded;
    use std::collections::HashSet;

    fn toy() -> KnapsackInstance {
        KnapsackInstance::new("toy", vec![2, 3, 4], vec![3, 4, 5], 5)
    }

    #[test]
    fn generation_is_pure_in_its_inputs() {
        let a = KnapsackInstance::generate(50, Profile::StronglyCorrelated, 9);
        let b = KnapsackInstance::generate(50, Profile::StronglyCorrelated, 9);
        assert_eq!(a, b);
        let c = KnapsackInstance::generate(50, Profile::StronglyCorrelated, 10);
        assert_ne!(a, c);
    }

    #[test]
    fn strongly_correlated_profits_sit_five_above_weights() {
        let inst = KnapsackInstance::generate(200, Profile::StronglyCorrelated, 1);
        for (w, p) in inst.weights().iter().zip(inst.profits()) {
            assert!((1..=10).contains(w));
            assert_eq!(*p, w + 5);
        }
    }

    #[test]
    fn uncorrelated_samples_both_columns_in_range() {
        let inst = KnapsackInstance::generate(200, Profile::Uncorrelated, 1);
        assert!(inst.weights().iter().all(|w| (1..=10).contains(w)));
        assert!(inst.profits().iter().all(|p| (1..=10).contains(p)));
    }

    #[test]
    fn capacity_is_half_the_total_weight_rounded_up() {
        let inst = KnapsackInstance::generate(200, Profile::StronglyCorrelated, 1);
        let total: u64 = inst.weights().iter().sum();
        assert_eq!(inst.capacity(), total.div_ceil(2));
        assert!(inst.capacity() <= total);
        assert!(inst.validate().is_ok());
    }

    #[test]
    fn profile_names_parse_and_render_round_trip() {
        for profile in [Profile::Uncorrelated, Profile::StronglyCorrelated] {
            assert_eq!(profile.to_string().parse::<Profile>().unwrap(), profile);
        }
        assert!("greedy".parse::<Profile>().is_err());
    }

    #[test]
    fn empty_knapsack_scores_zero() {
        assert_eq!(toy().evaluate(&Bitstring::zeros(3)), 0);
    }

    #[test]
    fn evaluation_sums_selected_profits() {
        assert_eq!(toy().evaluate(&"110".parse().unwrap()), 7);
        assert_eq!(toy().evaluate(&"100".parse().unwrap()), 3);
    }

    #[test]
    #[should_panic(expected = "infeasible")]
    fn evaluating_an_infeasible_solution_panics() {
        toy().evaluate(&"111".parse().unwrap());
    }

    #[test]
    fn repair_keeps_a_tight_feasible_selection_intact() {
        // selected weight equals capacity and the remaining item cannot fit
        let inst = KnapsackInstance::new("tight", vec![3, 3], vec![1, 1], 3);
        let x: Bitstring = "10".parse().unwrap();
        let mut rng = seeded(2);
        assert_eq!(inst.repair(&x, &mut rng), x);
    }

    #[test]
    fn repair_of_the_full_selection_lands_on_a_known_subset() {
        let inst = toy();
        let mut profits_seen = HashSet::new();
        for seed in 0..60 {
            let mut rng = seeded(seed);
            let repaired = inst.repair(&"111".parse().unwrap(), &mut rng);
            assert!(inst.is_feasible(&repaired));
            let profit = inst.evaluate(&repaired);
            assert!(
                profit == 5 || profit == 7,
                "repair produced profit {profit}, outside the reachable set"
            );
            profits_seen.insert(profit);
        }
        // both removal outcomes occur across seeds
        assert_eq!(profits_seen, HashSet::from([5, 7]));
    }

    #[test]
    fn repair_always_restores_feasibility_from_all_ones() {
        for seed in 0..20 {
            let inst = KnapsackInstance::generate(30, Profile::StronglyCorrelated, seed);
            let mut rng = seeded(1000 + seed);
            let repaired = inst.repair(&Bitstring::ones(30), &mut rng);
            assert!(inst.is_feasible(&repaired));
        }
    }

    #[test]
    fn repair_never_drops_profit_from_a_feasible_start() {
        for seed in 0..20 {
            let inst = KnapsackInstance::generate(16, Profile::Uncorrelated, seed);
            let mut rng = seeded(seed);
            let start = {
                let raw = Bitstring::from_bits((0..16).map(|_| rng.gen_bool(0.3)).collect());
                inst.repair(&raw, &mut rng)
            };
            let before = inst.evaluate(&start);
            let repaired = inst.repair(&start, &mut rng);
            assert!(inst.evaluate(&repaired) >= before);
        }
    }

    #[test]
    fn brute_force_agrees_with_hand_enumeration() {
        assert_eq!(toy().brute_force_optimum(), 7);
    }

    #[test]
    fn brute_force_takes_everything_under_a_loose_capacity() {
        let inst = KnapsackInstance::new("loose", vec![2, 3, 4], vec![3, 4, 5], 100);
        assert_eq!(inst.brute_force_optimum(), 12);
    }

    #[test]
    fn brute_force_scores_zero_when_nothing_fits() {
        let inst = KnapsackInstance::new("heavy", vec![10], vec![99], 4);
        assert_eq!(inst.brute_force_optimum(), 0);
    }

    #[test]
    #[should_panic(expected = "limited to 24 items")]
    fn brute_force_refuses_large_instances() {
        let inst = KnapsackInstance::generate(25, Profile::Uncorrelated, 0);
        inst.brute_force_optimum();
    }

    #[test]
    fn repaired_solutions_never_beat_the_oracle() {
        let inst = KnapsackInstance::generate(14, Profile::StronglyCorrelated, 3);
        let optimum = inst.brute_force_optimum();
        let mut rng = seeded(8);
        for _ in 0..200 {
            let raw = Bitstring::from_bits((0..14).map(|_| rng.gen_bool(0.5)).collect());
            let repaired = inst.repair(&raw, &mut rng);
            assert!(inst.evaluate(&repaired) <= optimum);
        }
    }

    #[test]
    fn json_render_is_byte_stable_with_sorted_keys() {
        let text = toy().to_json_string();
        assert_eq!(text, toy().to_json_string());
        let expected = "{\n  \"capacity\": 5,\n  \"id\": \"toy\",\n  \"profits\": [\n    3,\n    4,\n    5\n  ],\n  \"weights\": [\n    2,\n    3,\n    4\n  ]\n}\n";
        assert_eq!(text, expected);
    }

    #[test]
    fn json_round_trips_through_the_file_format() {
        let inst = KnapsackInstance::generate(12, Profile::StronglyCorrelated, 4);
        let back = KnapsackInstance::from_json_str(&inst.to_json_string()).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn loading_rejects_invalid_instances() {
        let trivial = KnapsackInstance::new("t", vec![2, 2], vec![1, 1], 10).to_json_string();
        assert!(matches!(
            KnapsackInstance::from_json_str(&trivial),
            Err(Error::InvalidInstance(_))
        ));
        let unsatisfiable = KnapsackInstance::new("u", vec![8, 9], vec![1, 1], 3).to_json_string();
        assert!(matches!(
            KnapsackInstance::from_json_str(&unsatisfiable),
            Err(Error::InvalidInstance(_))
        ));
        assert!(KnapsackInstance::from_json_str("{oops").is_err());
    }

    #[test]
    fn evaluator_interface_repairs_then_scores() {
        let inst = toy();
        let mut rng = seeded(5);
        let (solution, fitness) = inst.repair_and_score("111".parse().unwrap(), &mut rng);
        assert!(inst.is_feasible(&solution));
        assert_eq!(fitness, inst.evaluate(&solution));
        assert_eq!(Evaluator::num_bits(&inst), 3);
        assert_eq!(Evaluator::id(&inst), "toy");
    }
}
