//! Q-bit individuals, observation, rotation updates, and the best-solution
//! bank: the population machinery shared by the quantum-inspired optimizers.
//!
//! A q-bit individual stores one rotation angle per problem bit. The angle
//! encodes the amplitude pair `(alpha, beta) = (cos theta, sin theta)`, and
//! observing the individual collapses each bit independently to 1 with
//! probability `sin^2 theta`. Evolution happens entirely through angle
//! rotations: small fixed-step rotations toward banked solutions (the
//! rotation-gate update) and larger walk-sampled rotations applied by the
//! search operators.
//!
//! Angles are stored unbounded. The trigonometric encoding is periodic, and
//! walk-sampled rotations legitimately reach `±pi`; clamping to a quadrant
//! would silently truncate those moves.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::stream::StreamRng;
use rand::Rng;

/// A concrete candidate solution: one bit per problem item.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bitstring {
    bits: Vec<bool>,
}

impl Bitstring {
    pub fn zeros(len: usize) -> Self {
        Bitstring {
            bits: vec![false; len],
        }
    }

    pub fn ones(len: usize) -> Self {
        Bitstring {
            bits: vec![true; len],
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Bitstring { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, index: usize) -> bool {
        self.bits[index]
    }

    pub fn set(&mut self, index: usize, value: bool) {
        self.bits[index] = value;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bitstring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                other => return Err(Error::InvalidBitstring(other)),
            }
        }
        Ok(Bitstring { bits })
    }
}

/// A q-bit individual: one rotation angle per problem bit.
///
/// Serializes as `{"thetas": [ ... radians ... ]}`. Deserialization rejects
/// non-finite angles, for which the amplitude identity
/// `cos^2 + sin^2 = 1` breaks down.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "UncheckedThetas")]
pub struct QbitIndividual {
    thetas: Vec<f64>,
}

#[derive(Deserialize)]
struct UncheckedThetas {
    thetas: Vec<f64>,
}

impl TryFrom<UncheckedThetas> for QbitIndividual {
    type Error = String;

    fn try_from(raw: UncheckedThetas) -> Result<Self, Self::Error> {
        for (i, &theta) in raw.thetas.iter().enumerate() {
            let norm = theta.cos().powi(2) + theta.sin().powi(2);
            // the comparison is false for NaN, so non-finite angles fail
            let unit = (norm - 1.0).abs() <= 1e-12;
            if !unit {
                return Err(format!(
                    "q-bit {i}: angle {theta} gives cos^2 + sin^2 = {norm}, not a unit amplitude pair"
                ));
            }
        }
        Ok(QbitIndividual { thetas: raw.thetas })
    }
}

impl QbitIndividual {
    /// A fresh individual of `num_bits` q-bits, all in the uniform
    /// superposition `theta = pi/4` (each bit observes to 1 with
    /// probability one half).
    pub fn new(num_bits: usize) -> Self {
        assert!(num_bits >= 1, "an individual needs at least one q-bit");
        QbitIndividual {
            thetas: vec![std::f64::consts::FRAC_PI_4; num_bits],
        }
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    /// Probability that bit `index` observes to 1: `sin^2 theta_i`.
    pub fn probability_of_one(&self, index: usize) -> f64 {
        self.thetas[index].sin().powi(2)
    }

    /// Collapses every q-bit independently: bit `i` is 1 with probability
    /// `sin^2 theta_i`.
    pub fn observe(&self, rng: &mut StreamRng) -> Bitstring {
        let bits = self
            .thetas
            .iter()
            .map(|&theta| {
                let p = theta.sin().powi(2).clamp(0.0, 1.0);
                rng.gen_bool(p)
            })
            .collect();
        Bitstring { bits }
    }

    /// Adds `deltas[i]` to each `theta_i`. No clamping: the encoding is
    /// periodic and large rotations are meaningful moves.
    pub fn rotate_all(&self, deltas: &[f64]) -> QbitIndividual {
        assert_eq!(
            deltas.len(),
            self.thetas.len(),
            "one rotation delta per q-bit"
        );
        let thetas = self
            .thetas
            .iter()
            .zip(deltas)
            .map(|(&theta, &delta)| theta + delta)
            .collect();
        QbitIndividual { thetas }
    }

    /// The rotation-gate update: nudges each q-bit toward the banked
    /// solution `b` by `delta_theta` wherever the observed solution `x`
    /// disagrees with `b` and scored strictly worse.
    ///
    /// `x_not_worse` is the caller's comparison `fitness(x) >= fitness(b)`.
    /// Which bits rotate comes from [`ROTATION_TABLE`]; the sign is picked
    /// per quadrant so the observation probability moves toward `b_i`.
    pub fn qea_update(
        &self,
        x: &Bitstring,
        b: &Bitstring,
        x_not_worse: bool,
        delta_theta: f64,
    ) -> QbitIndividual {
        assert_eq!(x.len(), self.len(), "observed solution length mismatch");
        assert_eq!(b.len(), self.len(), "bank solution length mismatch");
        let thetas = self
            .thetas
            .iter()
            .enumerate()
            .map(|(i, &theta)| {
                let rule = rule_for(x.bit(i), b.bit(i), x_not_worse);
                if !rule.rotates {
                    return theta;
                }
                // In quadrants where cos and sin share a sign, increasing
                // theta raises sin^2 theta; in the others it lowers it.
                let toward_one = if theta.cos() * theta.sin() >= 0.0 {
                    1.0
                } else {
                    -1.0
                };
                let direction = if rule.b { toward_one } else { -toward_one };
                theta + direction * delta_theta
            })
            .collect();
        QbitIndividual { thetas }
    }
}

/// One row of the rotation-gate lookup: whether the fixed-step rotation
/// applies for a given `(x_i, b_i, x_not_worse)` combination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RotationRule {
    /// Observed bit of the individual's current solution.
    pub x: bool,
    /// Matching bit of the bank solution it is compared against.
    pub b: bool,
    /// Whether the observed solution scored at least as well as the bank's.
    pub x_not_worse: bool,
    /// Whether this combination rotates the q-bit at all.
    pub rotates: bool,
}

/// The full rotation-gate lookup table, indexed by
/// `(x_i << 2) | (b_i << 1) | x_not_worse`.
///
/// A q-bit rotates only when its observed bit disagrees with the bank's and
/// the observed solution scored strictly worse; the rotation then drives the
/// observation probability toward the bank's bit. Agreeing bits stay put,
/// and a solution at least as good as the bank's is left to speak for
/// itself.
pub const ROTATION_TABLE: [RotationRule; 8] = [
    RotationRule {
        x: false,
        b: false,
        x_not_worse: false,
        rotates: false,
    },
    RotationRule {
        x: false,
        b: false,
        x_not_worse: true,
        rotates: false,
    },
    RotationRule {
        x: false,
        b: true,
        x_not_worse: false,
        rotates: true,
    },
    RotationRule {
        x: false,
        b: true,
        x_not_worse: true,
        rotates: false,
    },
    RotationRule {
        x: true,
        b: false,
        x_not_worse: false,
        rotates: true,
    },
    RotationRule {
        x: true,
        b: false,
        x_not_worse: true,
        rotates: false,
    },
    RotationRule {
        x: true,
        b: true,
        x_not_worse: false,
        rotates: false,
    },
    RotationRule {
        x: true,
        b: true,
        x_not_worse: true,
        rotates: false,
    },
];

fn rule_for(x: bool, b: bool, x_not_worse: bool) -> &'static RotationRule {
    let idx = ((x as usize) << 2) | ((b as usize) << 1) | (x_not_worse as usize);
    &ROTATION_TABLE[idx]
}

/// Per-slot elitist memory of the best solutions seen so far.
///
/// Holds one entry per population slot plus the global best across the
/// whole history. Entries only ever improve, so the global best fitness is
/// monotone nondecreasing over any generation sequence.
#[derive(Debug, Clone)]
pub struct SolutionBank {
    entries: Vec<(Bitstring, u64)>,
    global_best: (Bitstring, u64),
}

impl SolutionBank {
    /// Seeds the bank from the first evaluated population.
    pub fn new(population: &[(Bitstring, u64)]) -> Self {
        assert!(!population.is_empty(), "bank needs at least one slot");
        let entries: Vec<(Bitstring, u64)> = population.to_vec();
        let mut global_best = entries[0].clone();
        for entry in &entries[1..] {
            if entry.1 > global_best.1 {
                global_best = entry.clone();
            }
        }
        SolutionBank {
            entries,
            global_best,
        }
    }

    pub fn entries(&self) -> &[(Bitstring, u64)] {
        &self.entries
    }

    pub fn global_best(&self) -> &(Bitstring, u64) {
        &self.global_best
    }

    pub fn best_fitness(&self) -> u64 {
        self.global_best.1
    }

    /// Per-slot elitism: slot `j` keeps the better of its entry and
    /// `population[j]`; ties keep the incumbent.
    pub fn update(&mut self, population: &[(Bitstring, u64)]) {
        assert_eq!(
            population.len(),
            self.entries.len(),
            "population and bank must have the same slot count"
        );
        for (entry, candidate) in self.entries.iter_mut().zip(population) {
            if candidate.1 > entry.1 {
                *entry = candidate.clone();
                if candidate.1 > self.global_best.1 {
                    self.global_best = candidate.clone();
                }
            }
        }
    }

    /// Global migration: on-period generations overwrite every slot with
    /// the global best; off-period generations leave the bank untouched.
    pub fn migrate(&mut self, t: u64, period: u64) {
        assert!(period >= 1, "migration period must be at least 1");
        if t.is_multiple_of(period) {
            for entry in &mut self.entries {
                *entry = self.global_best.clone();
            }
        }
    }
}
