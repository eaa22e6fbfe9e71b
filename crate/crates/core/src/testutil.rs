//! Tiny synthetic landscapes over bit strings, used by unit tests, the
//! oracle suites and doc examples. They implement [`Landscape`] exactly like
//! the real families, just with hand-checkable fitness functions.

use std::hash::{BuildHasherDefault, DefaultHasher};

use rand::Rng;

use crate::landscape::{Direction, EvalCounter, Landscape, MovePairTable, RawFitness};
use crate::rng::RunRng;

fn flip_enumeration<F: FnMut(usize, &Vec<u8>)>(s: &[u8], mut visit: F) {
    let mut scratch = s.to_vec();
    for i in 0..s.len() {
        scratch[i] ^= 1;
        visit(i, &scratch);
        scratch[i] ^= 1;
    }
}

fn random_bits(n: usize, rng: &mut RunRng) -> Vec<u8> {
    (0..n).map(|_| rng.gen_range(0..2u8)).collect()
}

macro_rules! bitstring_landscape_boilerplate {
    () => {
        type Solution = Vec<u8>;
        type Key = Vec<u8>;
        type KeyHasher = BuildHasherDefault<DefaultHasher>;

        fn neighborhood_size(&self, s: &Vec<u8>) -> usize {
            s.len()
        }

        fn for_each_neighbor<F: FnMut(usize, &Vec<u8>)>(&self, s: &Vec<u8>, visit: F) {
            flip_enumeration(s, visit);
        }

        fn key(&self, s: &Vec<u8>) -> Vec<u8> {
            s.clone()
        }

        fn random_solution(&self, rng: &mut RunRng) -> Vec<u8> {
            random_bits(self.n, rng)
        }
    };
}

/// All solutions share one fitness value.
pub struct ConstantLandscape {
    n: usize,
    value: i64,
}

impl ConstantLandscape {
    pub fn new(n: usize, value: i64) -> Self {
        ConstantLandscape { n, value }
    }
}

impl Landscape for ConstantLandscape {
    bitstring_landscape_boilerplate!();

    fn direction(&self) -> Direction {
        Direction::Maximize
    }

    fn evaluate(&self, s: &Vec<u8>, counter: &mut EvalCounter) -> RawFitness {
        counter.bump();
        self.evaluate_uncounted(s)
    }

    fn evaluate_uncounted(&self, _s: &Vec<u8>) -> RawFitness {
        RawFitness(self.value)
    }
}

/// Every genotype has a distinct fitness: the bit string read as an integer.
pub struct DistinctLandscape {
    n: usize,
}

impl DistinctLandscape {
    pub fn new(n: usize) -> Self {
        assert!(n <= 62);
        DistinctLandscape { n }
    }
}

impl Landscape for DistinctLandscape {
    bitstring_landscape_boilerplate!();

    fn direction(&self) -> Direction {
        Direction::Maximize
    }

    fn evaluate(&self, s: &Vec<u8>, counter: &mut EvalCounter) -> RawFitness {
        counter.bump();
        self.evaluate_uncounted(s)
    }

    fn evaluate_uncounted(&self, s: &Vec<u8>) -> RawFitness {
        RawFitness(s.iter().fold(0i64, |acc, &b| (acc << 1) | i64::from(b)))
    }
}

/// Single-peak landscape: fitness is `n` minus the Hamming distance to a
/// target genotype, so the target is the unique global maximum.
pub struct PeakLandscape {
    n: usize,
    target: Vec<u8>,
}

impl PeakLandscape {
    pub fn new(target: Vec<u8>) -> Self {
        PeakLandscape {
            n: target.len(),
            target,
        }
    }
}

impl Landscape for PeakLandscape {
    bitstring_landscape_boilerplate!();

    fn direction(&self) -> Direction {
        Direction::Maximize
    }

    fn evaluate(&self, s: &Vec<u8>, counter: &mut EvalCounter) -> RawFitness {
        counter.bump();
        self.evaluate_uncounted(s)
    }

    fn evaluate_uncounted(&self, s: &Vec<u8>) -> RawFitness {
        let dist = s
            .iter()
            .zip(&self.target)
            .filter(|(a, b)| a != b)
            .count() as i64;
        RawFitness(self.n as i64 - dist)
    }
}

/// Fitness-negated, direction-flipped view of another landscape. Selection
/// sets are identical to the wrapped landscape's, which is what the
/// direction-generality property asserts.
pub struct Mirrored<'a, L: Landscape>(pub &'a L);

impl<L: Landscape> Landscape for Mirrored<'_, L> {
    type Solution = L::Solution;
    type Key = L::Key;
    type KeyHasher = L::KeyHasher;

    fn direction(&self) -> Direction {
        self.0.direction().flipped()
    }

    fn neighborhood_size(&self, s: &Self::Solution) -> usize {
        self.0.neighborhood_size(s)
    }

    fn evaluate(&self, s: &Self::Solution, counter: &mut EvalCounter) -> RawFitness {
        counter.bump();
        self.evaluate_uncounted(s)
    }

    fn evaluate_uncounted(&self, s: &Self::Solution) -> RawFitness {
        RawFitness(-self.0.evaluate_uncounted(s).0)
    }

    fn for_each_neighbor<F: FnMut(usize, &Self::Solution)>(&self, s: &Self::Solution, visit: F) {
        self.0.for_each_neighbor(s, visit)
    }

    fn key(&self, s: &Self::Solution) -> Self::Key {
        self.0.key(s)
    }

    fn random_solution(&self, rng: &mut RunRng) -> Self::Solution {
        self.0.random_solution(rng)
    }

    fn move_pair_table(&self, s: &Self::Solution) -> Option<MovePairTable> {
        self.0.move_pair_table(s)
    }
}

/// Hides a landscape's move-pair table, forcing consumers onto the generic
/// key-based deduplication path. Used to check the two paths agree.
pub struct NoPairTable<'a, L: Landscape>(pub &'a L);

impl<L: Landscape> Landscape for NoPairTable<'_, L> {
    type Solution = L::Solution;
    type Key = L::Key;
    type KeyHasher = L::KeyHasher;

    fn direction(&self) -> Direction {
        self.0.direction()
    }

    fn neighborhood_size(&self, s: &Self::Solution) -> usize {
        self.0.neighborhood_size(s)
    }

    fn evaluate(&self, s: &Self::Solution, counter: &mut EvalCounter) -> RawFitness {
        self.0.evaluate(s, counter)
    }

    fn evaluate_uncounted(&self, s: &Self::Solution) -> RawFitness {
        self.0.evaluate_uncounted(s)
    }

    fn for_each_neighbor<F: FnMut(usize, &Self::Solution)>(&self, s: &Self::Solution, visit: F) {
        self.0.for_each_neighbor(s, visit)
    }

    fn for_each_neighbor_fitness_raw<F: FnMut(usize, RawFitness)>(
        &self,
        s: &Self::Solution,
        visit: F,
    ) {
        self.0.for_each_neighbor_fitness_raw(s, visit)
    }

    fn neighbor(&self, s: &Self::Solution, index: usize) -> Self::Solution {
        self.0.neighbor(s, index)
    }

    fn key(&self, s: &Self::Solution) -> Self::Key {
        self.0.key(s)
    }

    fn random_solution(&self, rng: &mut RunRng) -> Self::Solution {
        self.0.random_solution(rng)
    }
}
