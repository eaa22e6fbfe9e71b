//! Direction-aware fitness and neighborhood abstractions, plus the
//! neutrality/evolvability primitives shared by every landscape family and
//! every heuristic.
//!
//! Conventions that the rest of the crate relies on:
//!
//! * Fitness is an exact integer ([`RawFitness`]). Two solutions are neutral
//!   iff their raw fitness values are *equal*; no floating point is involved
//!   until reporting.
//! * [`Landscape::for_each_neighbor_fitness`] enumerates neighbors
//!   **excluding** the solution itself. The inclusive neighborhood used by
//!   some definitions is recovered by also looking at the solution, which is
//!   what [`evol`] does.
//! * Every fitness computation goes through an [`EvalCounter`], incremented
//!   exactly once per evaluation. Nothing in the default pipeline caches
//!   fitness values across calls, so the counters reflect raw evaluation
//!   effort.

use std::hash::{BuildHasher, Hash};

use crate::rng::RunRng;

/// Whether larger or smaller raw fitness wins.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Maximize,
    Minimize,
}

impl Direction {
    /// Strict "a beats b" under this direction.
    #[inline]
    pub fn better(self, a: RawFitness, b: RawFitness) -> bool {
        match self {
            Direction::Maximize => a.0 > b.0,
            Direction::Minimize => a.0 < b.0,
        }
    }

    /// The better of two values (left-biased on ties).
    #[inline]
    pub fn best(self, a: RawFitness, b: RawFitness) -> RawFitness {
        if self.better(b, a) {
            b
        } else {
            a
        }
    }

    /// Best element of a nonempty iterator.
    pub fn best_of<I: IntoIterator<Item = RawFitness>>(self, values: I) -> Option<RawFitness> {
        values.into_iter().reduce(|acc, v| self.best(acc, v))
    }

    /// The opposite direction.
    pub fn flipped(self) -> Direction {
        match self {
            Direction::Maximize => Direction::Minimize,
            Direction::Minimize => Direction::Maximize,
        }
    }
}

/// Exact integer fitness. For NKq this is the component sum in
/// `[0, N*(q-1)]`; for the lattice TSP it is the tour length in lattice
/// units. Normalization happens only in reporting code.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RawFitness(pub i64);

/// Counts fitness evaluations for one run or sampling stream.
///
/// Monotonically non-decreasing; never shared between concurrent runs.
#[derive(Debug, Default, Clone)]
pub struct EvalCounter {
    count: u64,
}

impl EvalCounter {
    pub fn new() -> Self {
        EvalCounter { count: 0 }
    }

    #[inline]
    pub fn bump(&mut self) {
        self.count += 1;
    }

    pub fn count(&self) -> u64 {
        self.count
    }
}

/// Contract implemented by each landscape family.
///
/// Instances are immutable after construction and safe to share across
/// concurrent runs; all per-run state (RNG, counter) lives outside.
pub trait Landscape: Sync {
    /// Solution representation.
    type Solution: Clone + PartialEq + std::fmt::Debug + Send + Sync;
    /// Deduplication key for a solution; must be injective for exact types
    /// (bit strings) and may be a wide fingerprint where storing full
    /// solutions would be too costly (tours).
    type Key: Eq + Hash + Clone;
    /// Hasher used for key sets/maps in the search loops.
    type KeyHasher: BuildHasher + Default;

    fn direction(&self) -> Direction;

    /// Size of the (exclusive) neighborhood of `s`.
    fn neighborhood_size(&self, s: &Self::Solution) -> usize;

    /// Evaluates `s`, bumping the counter exactly once.
    fn evaluate(&self, s: &Self::Solution, counter: &mut EvalCounter) -> RawFitness;

    /// Calls `visit(index, neighbor)` for every neighbor of `s`, in the
    /// canonical enumeration order. The enumeration never yields `s` itself
    /// and is deterministic.
    fn for_each_neighbor<F: FnMut(usize, &Self::Solution)>(&self, s: &Self::Solution, visit: F);

    /// Computes every neighbor's fitness in enumeration order without
    /// touching a counter. Implementations may avoid materializing each
    /// neighbor as long as each fitness is recomputed in full.
    fn for_each_neighbor_fitness_raw<F: FnMut(usize, RawFitness)>(
        &self,
        s: &Self::Solution,
        mut visit: F,
    ) {
        self.for_each_neighbor(s, |idx, n| {
            visit(idx, self.evaluate_uncounted(n));
        });
    }

    /// Evaluates every neighbor of `s` in enumeration order, bumping the
    /// counter once per neighbor.
    fn for_each_neighbor_fitness<F: FnMut(usize, RawFitness)>(
        &self,
        s: &Self::Solution,
        counter: &mut EvalCounter,
        mut visit: F,
    ) {
        self.for_each_neighbor_fitness_raw(s, |idx, f| {
            counter.bump();
            visit(idx, f);
        });
    }

    /// Fitness without counter bookkeeping; only for use inside
    /// `for_each_neighbor_fitness`-style wrappers that do their own counting.
    fn evaluate_uncounted(&self, s: &Self::Solution) -> RawFitness;

    /// Materializes the neighbor with the given enumeration index.
    fn neighbor(&self, s: &Self::Solution, index: usize) -> Self::Solution {
        let mut found = None;
        self.for_each_neighbor(s, |idx, n| {
            if idx == index {
                found = Some(n.clone());
            }
        });
        found.expect("neighbor index out of range")
    }

    /// The full neighbor enumeration as owned solutions.
    fn neighbors(&self, s: &Self::Solution) -> Vec<Self::Solution> {
        let mut out = Vec::with_capacity(self.neighborhood_size(s));
        self.for_each_neighbor(s, |_, n| out.push(n.clone()));
        out
    }

    fn key(&self, s: &Self::Solution) -> Self::Key;

    /// Draws a uniform random solution from the run's own generator.
    fn random_solution(&self, rng: &mut RunRng) -> Self::Solution;

    /// Two-move composition structure, when it does not depend on the
    /// concrete solution. Both built-in families have this property: moves
    /// act on positions, so which move pairs collide is fixed by the move
    /// set alone. Consumers without a table fall back to key-based
    /// deduplication.
    fn move_pair_table(&self, _s: &Self::Solution) -> Option<MovePairTable> {
        None
    }
}

/// Which (first-move, second-move) pairs yield the first occurrence of a
/// distinct solution two moves away.
///
/// A pair is *fresh* iff its composed result differs from the base solution
/// and from every direct neighbor, and no lexicographically earlier pair
/// produced the same result. Fresh pairs are exactly the distance-2 shell of
/// the deduplicated extended neighborhood, so counting one evaluation per
/// fresh pair reproduces key-based bookkeeping bit for bit.
pub struct MovePairTable {
    move_count: usize,
    fresh: Vec<u64>,
}

impl MovePairTable {
    /// Builds the table from a classifier over pairs in lexicographic order.
    pub fn build<F: FnMut(usize, usize) -> bool>(move_count: usize, mut is_fresh: F) -> Self {
        let bits = move_count * move_count;
        let mut fresh = vec![0u64; bits.div_ceil(64)];
        for m1 in 0..move_count {
            for m2 in 0..move_count {
                if is_fresh(m1, m2) {
                    let bit = m1 * move_count + m2;
                    fresh[bit / 64] |= 1 << (bit % 64);
                }
            }
        }
        MovePairTable { move_count, fresh }
    }

    pub fn move_count(&self) -> usize {
        self.move_count
    }

    #[inline(always)]
    pub fn is_fresh(&self, m1: usize, m2: usize) -> bool {
        let bit = m1 * self.move_count + m2;
        self.fresh[bit / 64] >> (bit % 64) & 1 == 1
    }

    /// Number of fresh pairs: the size of the distance-2 shell.
    pub fn fresh_count(&self) -> usize {
        self.fresh.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Best fitness reachable in the inclusive neighborhood of `s` (the solution
/// itself plus every neighbor). Costs `1 + neighborhood_size(s)` evaluations.
pub fn evol<L: Landscape>(
    landscape: &L,
    s: &L::Solution,
    counter: &mut EvalCounter,
) -> RawFitness {
    let dir = landscape.direction();
    let mut best = landscape.evaluate(s, counter);
    landscape.for_each_neighbor_fitness(s, counter, |_, f| {
        best = dir.best(best, f);
    });
    best
}

/// The neighbors of `s` with fitness exactly equal to `s`'s fitness.
pub fn neutral_neighbors<L: Landscape>(
    landscape: &L,
    s: &L::Solution,
    counter: &mut EvalCounter,
) -> Vec<L::Solution> {
    let fs = landscape.evaluate(s, counter);
    let mut neutral_idx = Vec::new();
    landscape.for_each_neighbor_fitness(s, counter, |idx, f| {
        if f == fs {
            neutral_idx.push(idx);
        }
    });
    materialize(landscape, s, &neutral_idx)
}

/// Number of neutral neighbors of `s`.
pub fn neutral_degree<L: Landscape>(
    landscape: &L,
    s: &L::Solution,
    counter: &mut EvalCounter,
) -> usize {
    let fs = landscape.evaluate(s, counter);
    let mut degree = 0;
    landscape.for_each_neighbor_fitness(s, counter, |_, f| {
        if f == fs {
            degree += 1;
        }
    });
    degree
}

/// The generic local-optimum predicate: true iff no element of `within(s)`
/// strictly beats `s` under `score`.
pub fn is_local<L, G, W>(
    landscape: &L,
    s: &L::Solution,
    mut score: G,
    within: W,
    counter: &mut EvalCounter,
) -> bool
where
    L: Landscape,
    G: FnMut(&L::Solution, &mut EvalCounter) -> RawFitness,
    W: Fn(&L::Solution) -> Vec<L::Solution>,
{
    let dir = landscape.direction();
    let here = score(s, counter);
    within(s)
        .iter()
        .all(|n| !dir.better(score(n, counter), here))
}

/// True iff no neutral neighbor of `s` has strictly better evolvability.
/// Vacuously true when `s` has no neutral neighbors.
pub fn is_local_neutral<L: Landscape>(
    landscape: &L,
    s: &L::Solution,
    counter: &mut EvalCounter,
) -> bool {
    let dir = landscape.direction();
    let here = evol(landscape, s, counter);
    neutral_neighbors(landscape, s, counter)
        .iter()
        .all(|n| !dir.better(evol(landscape, n, counter), here))
}

/// Everything reachable by at most two neighbor moves, minus `s` itself,
/// deduplicated. Contains every direct neighbor of `s`.
pub fn extended_neighbors<L: Landscape>(landscape: &L, s: &L::Solution) -> Vec<L::Solution> {
    let mut seen = std::collections::HashSet::<L::Key, L::KeyHasher>::default();
    seen.insert(landscape.key(s));
    let mut out = Vec::new();
    let push_new = |n: &L::Solution,
                    seen: &mut std::collections::HashSet<L::Key, L::KeyHasher>,
                    out: &mut Vec<L::Solution>| {
        if seen.insert(landscape.key(n)) {
            out.push(n.clone());
        }
    };
    let firsts = landscape.neighbors(s);
    for n in &firsts {
        push_new(n, &mut seen, &mut out);
    }
    for n in &firsts {
        landscape.for_each_neighbor(n, |_, n2| {
            push_new(n2, &mut seen, &mut out);
        });
    }
    out
}

/// Best fitness over `s` and its extended (distance <= 2) neighborhood.
/// Costs `1 + |extended_neighbors(s)|` evaluations.
pub fn evol2<L: Landscape>(
    landscape: &L,
    s: &L::Solution,
    counter: &mut EvalCounter,
) -> RawFitness {
    let dir = landscape.direction();
    let mut best = landscape.evaluate(s, counter);
    for n in extended_neighbors(landscape, s) {
        best = dir.best(best, landscape.evaluate(&n, counter));
    }
    best
}

fn materialize<L: Landscape>(
    landscape: &L,
    s: &L::Solution,
    indices: &[usize],
) -> Vec<L::Solution> {
    if indices.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(indices.len());
    let mut cursor = 0;
    landscape.for_each_neighbor(s, |idx, n| {
        if cursor < indices.len() && indices[cursor] == idx {
            out.push(n.clone());
            cursor += 1;
        }
    });
    debug_assert_eq!(out.len(), indices.len());
    out
}
