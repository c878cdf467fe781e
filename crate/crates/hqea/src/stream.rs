//! Seeded random-number streams.
//!
//! Every source of randomness in this crate is a [`StreamRng`], a ChaCha8
//! generator with a fixed, portable algorithm: the same seed produces the
//! same draw sequence on every platform and in every release of this crate.
//!
//! Optimizer runs never share one generator. Each concern (observation,
//! repair, the two walk searches, the CGA operators) gets its own stream per
//! generation, derived from the master seed by [`stream`]. This keeps the
//! draw sequence of one concern independent of whether another concern drew
//! anything at all — disabling the walk searches, for example, leaves the
//! observation and repair sequences untouched.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The fixed generator used everywhere in this crate.
pub type StreamRng = ChaCha8Rng;

/// The concerns that draw randomness inside an optimizer run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamKind {
    /// Collapsing q-bit individuals into bitstrings.
    Observe,
    /// Feasibility repair of observed bitstrings.
    Repair,
    /// Walk sampling, candidate observation and repair in the remote search.
    RemoteSearch,
    /// Walk sampling, candidate observation and repair in the local search.
    LocalSearch,
    /// Selection, crossover and mutation draws of the CGA baseline.
    CgaOps,
}

impl StreamKind {
    fn tag(self) -> u64 {
        match self {
            StreamKind::Observe => 1,
            StreamKind::Repair => 2,
            StreamKind::RemoteSearch => 3,
            StreamKind::LocalSearch => 4,
            StreamKind::CgaOps => 5,
        }
    }
}

/// SplitMix64 finalizer. Bijective on u64, used only to spread seed material.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives the stream for one (concern, generation, slot) triple of a run.
///
/// `slot` distinguishes per-individual streams where a concern refines
/// population members independently; concerns that walk the population with
/// a single stream pass 0.
pub fn stream(master_seed: u64, kind: StreamKind, generation: u64, slot: u64) -> StreamRng {
    let mut s = mix64(master_seed);
    s = mix64(s ^ kind.tag());
    s = mix64(s ^ generation);
    s = mix64(s ^ slot);
    StreamRng::seed_from_u64(s)
}

/// Derives the master seed of run `run_index` in a batch experiment.
///
/// All algorithms and instances of a batch share the same per-run seed so
/// that run `r` is a paired trial across algorithms.
pub fn run_seed(batch_seed: u64, run_index: u32) -> u64 {
    mix64(mix64(batch_seed) ^ u64::from(run_index))
}

/// A plain seeded stream, for uses outside the per-run discipline
/// (instance generation, tests, examples).
pub fn seeded(seed: u64) -> StreamRng {
    StreamRng::seed_from_u64(seed)
}
