//! Discrete-time Hadamard walk on the integer line.
//!
//! The walker carries a two-valued internal coin state (its *chirality*)
//! alongside its lattice position. One step applies the balanced unitary
//! coin
//!
//! ```text
//!         1  | 1  i |
//! H = ------ |      |
//!      sqrt2 | i  1 |
//! ```
//!
//! to the chirality amplitudes at every site, then shifts the chirality-0
//! amplitude one site left and the chirality-1 amplitude one site right.
//! Interference between the two components makes the position variance grow
//! quadratically in the step count, in contrast to the linear growth of a
//! classical random walk — after `n` steps the distribution has spread
//! across a window of width proportional to `n`, not `sqrt(n)`.
//!
//! The walk starts centered at the origin in the chirality superposition
//! `(i|0> + |1>)/sqrt2`. The shift direction per chirality is a convention:
//! the coin and initial state are symmetric under swapping it, so the
//! opposite convention produces the exact mirror image of every
//! distribution (tested as the mirror-equivalence property).
//!
//! [`run_walk`] measures the position register after `n` steps, and
//! [`PositionDistribution::to_angles`] maps positions `[-n_max, n_max]`
//! linearly onto rotation angles `[-pi, pi]`, giving the sampleable angle
//! distribution the search operators draw from.

use std::f64::consts::PI;
use std::io;

use num_complex::Complex64;

use crate::error::Error;
use crate::stream::StreamRng;
use rand::Rng;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Amplitudes of a Hadamard walk over (chirality, position).
///
/// Positions range over `[-n, n]` for a walk of `n` steps; amplitudes at
/// positions whose parity differs from the parity of the steps taken so far
/// are identically zero.
#[derive(Debug, Clone)]
pub struct WalkState {
    steps_total: u32,
    steps_taken: u32,
    /// Chirality-0 amplitudes, indexed by `position + steps_total`.
    left: Vec<Complex64>,
    /// Chirality-1 amplitudes, same indexing.
    right: Vec<Complex64>,
}

impl WalkState {
    /// A fresh walk of `steps_total` steps, centered at the origin in the
    /// chirality state `(i|0> + |1>)/sqrt2`.
    pub fn new(steps_total: u32) -> Self {
        let len = 2 * steps_total as usize + 1;
        let mut left = vec![Complex64::ZERO; len];
        let mut right = vec![Complex64::ZERO; len];
        left[steps_total as usize] = Complex64::new(0.0, FRAC_1_SQRT_2);
        right[steps_total as usize] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        WalkState {
            steps_total,
            steps_taken: 0,
            left,
            right,
        }
    }

    pub fn steps_total(&self) -> u32 {
        self.steps_total
    }

    pub fn steps_taken(&self) -> u32 {
        self.steps_taken
    }

    pub fn is_complete(&self) -> bool {
        self.steps_taken == self.steps_total
    }

    /// Amplitude of the given chirality (0 or 1) at position `k`.
    /// Zero outside `[-n, n]`.
    pub fn amplitude(&self, chirality: u8, k: i32) -> Complex64 {
        assert!(chirality < 2, "chirality is 0 or 1");
        let idx = k + self.steps_total as i32;
        if idx < 0 || idx as usize >= self.left.len() {
            return Complex64::ZERO;
        }
        match chirality {
            0 => self.left[idx as usize],
            _ => self.right[idx as usize],
        }
    }

    /// Sum of `|amplitude|^2` over all sites and both chiralities.
    pub fn total_probability(&self) -> f64 {
        self.left
            .iter()
            .chain(self.right.iter())
            .map(|a| a.norm_sqr())
            .sum()
    }

    /// Applies the Hadamard coin at every site, then the chirality shift.
    ///
    /// Panics when the walk has already taken all of its steps.
    pub fn step(&mut self) {
        assert!(
            self.steps_taken < self.steps_total,
            "walk of {} steps already complete",
            self.steps_total
        );
        let len = self.left.len();
        let mut left = vec![Complex64::ZERO; len];
        let mut right = vec![Complex64::ZERO; len];
        for idx in 0..len {
            let a0 = self.left[idx];
            let a1 = self.right[idx];
            if a0 == Complex64::ZERO && a1 == Complex64::ZERO {
                continue;
            }
            // coin: (a0, a1) -> ((a0 + i a1)/sqrt2, (i a0 + a1)/sqrt2)
            let c0 = (a0 + Complex64::i() * a1) * FRAC_1_SQRT_2;
            let c1 = (Complex64::i() * a0 + a1) * FRAC_1_SQRT_2;
            // shift: chirality 0 one site left, chirality 1 one site right
            if idx > 0 {
                left[idx - 1] += c0;
            }
            if idx + 1 < len {
                right[idx + 1] += c1;
            }
        }
        self.left = left;
        self.right = right;
        self.steps_taken += 1;
    }

    /// Measures the position register: `P(k) = |psi_0(k)|^2 + |psi_1(k)|^2`.
    ///
    /// Positions with exactly zero probability are dropped from the support.
    pub fn measure(&self) -> PositionDistribution {
        let n = self.steps_total as i32;
        let mut entries = Vec::new();
        for k in -n..=n {
            let p = self.amplitude(0, k).norm_sqr() + self.amplitude(1, k).norm_sqr();
            if p > 0.0 {
                entries.push((k, p));
            }
        }
        PositionDistribution { entries }
    }
}

/// Runs a fresh `steps`-step walk to completion and measures it.
pub fn run_walk(steps: u32) -> PositionDistribution {
    let mut state = WalkState::new(steps);
    for _ in 0..steps {
        state.step();
    }
    state.measure()
}

/// Measured position distribution of a walk.
///
/// Entries are sorted by position and carry strictly positive probability;
/// the probabilities sum to one up to floating-point rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionDistribution {
    entries: Vec<(i32, f64)>,
}

impl PositionDistribution {
    /// Support positions with their probabilities, ascending by position.
    pub fn entries(&self) -> &[(i32, f64)] {
        &self.entries
    }

    /// Probability at position `k`; zero off the support.
    pub fn probability(&self, k: i32) -> f64 {
        self.entries
            .binary_search_by_key(&k, |&(pos, _)| pos)
            .map(|idx| self.entries[idx].1)
            .unwrap_or(0.0)
    }

    pub fn total_probability(&self) -> f64 {
        self.entries.iter().map(|&(_, p)| p).sum()
    }

    /// Mean position `E[k]`.
    pub fn mean(&self) -> f64 {
        self.entries.iter().map(|&(k, p)| k as f64 * p).sum()
    }

    /// Position variance `E[k^2] - E[k]^2`.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        let second: f64 = self
            .entries
            .iter()
            .map(|&(k, p)| (k as f64) * (k as f64) * p)
            .sum();
        second - mean * mean
    }

    /// Maps positions `[-n_max, n_max]` linearly onto angles `[-pi, pi]`.
    ///
    /// Fails if any support position lies outside the lattice.
    pub fn to_angles(&self, n_max: u32) -> Result<AngleDistribution, Error> {
        AngleDistribution::from_positions(&self.entries, n_max)
    }
}

/// Discrete rotation-angle distribution on the lattice `k * pi / n_max`.
///
/// Built from a position distribution; angles are exact lattice multiples by
/// construction and never exceed `pi` in magnitude. A cumulative table is
/// precomputed so sampling is one uniform draw plus a binary search.
#[derive(Debug, Clone)]
pub struct AngleDistribution {
    n_max: u32,
    /// (position, angle, probability), ascending by position.
    entries: Vec<(i32, f64, f64)>,
    /// Cumulative probabilities aligned with `entries`.
    cumulative: Vec<f64>,
}

impl AngleDistribution {
    /// Builds the distribution from `(position, probability)` pairs.
    pub fn from_positions(positions: &[(i32, f64)], n_max: u32) -> Result<Self, Error> {
        assert!(n_max > 0, "angle lattice needs n_max >= 1");
        let mut sorted: Vec<(i32, f64)> = positions.to_vec();
        sorted.sort_by_key(|&(k, _)| k);
        let mut entries = Vec::with_capacity(sorted.len());
        let mut cumulative = Vec::with_capacity(sorted.len());
        let mut acc = 0.0;
        for (k, p) in sorted {
            if k.unsigned_abs() > n_max {
                return Err(Error::PositionOutOfRange { position: k, n_max });
            }
            // ratio-first keeps the endpoints exact: k = +-n_max gives +-pi
            let angle = (k as f64 / n_max as f64) * PI;
            acc += p;
            entries.push((k, angle, p));
            cumulative.push(acc);
        }
        Ok(AngleDistribution {
            n_max,
            entries,
            cumulative,
        })
    }

    /// The lattice scale: angles are integer multiples of `pi / n_max`.
    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    /// `(position, angle, probability)` triples, ascending by position.
    pub fn entries(&self) -> &[(i32, f64, f64)] {
        &self.entries
    }

    pub fn total_probability(&self) -> f64 {
        self.entries.iter().map(|&(_, _, p)| p).sum()
    }

    /// Draws one angle by inverse CDF over the position-ordered entries.
    pub fn sample(&self, rng: &mut StreamRng) -> f64 {
        assert!(
            !self.entries.is_empty(),
            "cannot sample an empty distribution"
        );
        let u: f64 = rng.gen();
        let idx = self
            .cumulative
            .partition_point(|&c| c <= u)
            .min(self.entries.len() - 1);
        self.entries[idx].1
    }

    /// Writes the distribution as CSV with header `position,angle_rad,probability`.
    pub fn write_csv<W: io::Write>(&self, mut writer: W) -> io::Result<()> {
        writeln!(writer, "position,angle_rad,probability")?;
        for &(k, angle, p) in &self.entries {
            writeln!(writer, "{k},{angle},{p}")?;
        }
        Ok(())
    }
}
