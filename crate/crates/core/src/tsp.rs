//! Travelling salesman on a randomly diluted square lattice with the
//! Manhattan metric and the 2-opt neighborhood.
//!
//! `N` cities occupy distinct sites of an `L x L` grid; the occupation
//! concentration `N / L^2` controls how many tours share the same integer
//! length, i.e. how neutral the landscape is. Tour lengths are exact lattice
//! units and the direction is minimization.

use std::fmt::Write as _;
use std::hash::Hasher;

use rand::seq::index::sample as sample_indices;
use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::landscape::{Direction, EvalCounter, Landscape, MovePairTable, RawFitness};
use crate::nkq::parse_num;
use crate::rng::{mix, rng_from_seed, RunRng};

/// A tour: permutation of the city indices `0..N`.
pub type Tour = Vec<u16>;

/// Largest supported lattice side; keeps every pairwise Manhattan distance
/// within `u16`.
pub const MAX_L: u32 = 32_768;

/// Manhattan distance between two lattice sites.
#[inline]
pub fn manhattan(a: (u16, u16), b: (u16, u16)) -> i64 {
    (i64::from(a.0) - i64::from(b.0)).abs() + (i64::from(a.1) - i64::from(b.1)).abs()
}

/// Canonical 2-opt move: reverse the tour segment at positions `i..=j`.
///
/// The enumeration `1 <= i < j <= N-1` minus `(1, N-1)` removes two
/// non-adjacent tour edges and reconnects; it yields each distinct resulting
/// cycle exactly once (position 0 never moves), giving exactly `N(N-3)/2`
/// moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoOptMove {
    pub i: usize,
    pub j: usize,
}

/// All canonical 2-opt moves for a tour of `n` cities, in enumeration order.
pub fn two_opt_moves(n: usize) -> impl Iterator<Item = TwoOptMove> {
    (1..n.saturating_sub(1)).flat_map(move |i| {
        (i + 1..n)
            .filter(move |&j| !(i == 1 && j == n - 1))
            .map(move |j| TwoOptMove { i, j })
    })
}

/// The move at a given position of the canonical enumeration.
pub fn two_opt_move_at(n: usize, index: usize) -> TwoOptMove {
    debug_assert!(index < two_opt_move_count(n));
    let mut remaining = index;
    for i in 1..n - 1 {
        // Row i holds j = i+1 ..= n-1, except j = n-1 is excluded for i = 1.
        let row_len = (n - 1 - i) - usize::from(i == 1);
        if remaining < row_len {
            return TwoOptMove {
                i,
                j: i + 1 + remaining,
            };
        }
        remaining -= row_len;
    }
    unreachable!("index out of range for {n} cities")
}

/// `N(N-3)/2` for `N >= 4`, 0 below.
pub fn two_opt_move_count(n: usize) -> usize {
    if n < 4 {
        0
    } else {
        n * (n - 3) / 2
    }
}

/// An immutable diluted-lattice instance with a precomputed distance matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeInstance {
    l: u32,
    seed: u64,
    cities: Vec<(u16, u16)>,
    dist: Vec<u16>,
}

impl LatticeInstance {
    /// Samples `n` distinct sites uniformly from the `l x l` grid,
    /// deterministically in `seed`. Site index `s` maps to coordinates
    /// `(s % l, s / l)`.
    pub fn build(l: u32, n: usize, seed: u64) -> Result<Self> {
        if l == 0 || l > MAX_L {
            return Err(Error::InvalidParams(format!(
                "lattice side must be in [1, {MAX_L}], got {l}"
            )));
        }
        let sites = (l as usize) * (l as usize);
        if n == 0 || n > sites {
            return Err(Error::InvalidParams(format!(
                "need 1 <= N <= L^2 (N={n}, L^2={sites})"
            )));
        }
        let mut rng = rng_from_seed(seed);
        let cities: Vec<(u16, u16)> = sample_indices(&mut rng, sites, n)
            .into_iter()
            .map(|s| ((s % l as usize) as u16, (s / l as usize) as u16))
            .collect();
        Ok(Self::from_cities(l, cities, seed))
    }

    /// Assembles an instance from explicit city coordinates (file reader).
    pub fn from_parts(l: u32, cities: Vec<(u16, u16)>, seed: u64) -> Result<Self> {
        if l == 0 || l > MAX_L {
            return Err(Error::InvalidParams(format!(
                "lattice side must be in [1, {MAX_L}], got {l}"
            )));
        }
        if cities.is_empty() {
            return Err(Error::InvalidParams("need at least one city".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for &(x, y) in &cities {
            if u32::from(x) >= l || u32::from(y) >= l {
                return Err(Error::InvalidParams(format!(
                    "city ({x}, {y}) outside the {l} x {l} lattice"
                )));
            }
            if !seen.insert((x, y)) {
                return Err(Error::InvalidParams(format!("duplicate city ({x}, {y})")));
            }
        }
        Ok(Self::from_cities(l, cities, seed))
    }

    fn from_cities(l: u32, cities: Vec<(u16, u16)>, seed: u64) -> Self {
        let n = cities.len();
        let mut dist = vec![0u16; n * n];
        for a in 0..n {
            for b in 0..n {
                dist[a * n + b] = manhattan(cities[a], cities[b]) as u16;
            }
        }
        LatticeInstance {
            l,
            seed,
            cities,
            dist,
        }
    }

    pub fn side(&self) -> u32 {
        self.l
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n(&self) -> usize {
        self.cities.len()
    }

    pub fn cities(&self) -> &[(u16, u16)] {
        &self.cities
    }

    /// Occupation concentration `N / L^2`.
    pub fn concentration(&self) -> f64 {
        self.n() as f64 / (self.l as f64 * self.l as f64)
    }

    /// Distance-matrix lookup.
    ///
    /// Safety: callers pass city indices `< n` (tours are permutations of
    /// `0..n` by construction; see `validate_tour`), so `a*n + b < n*n`,
    /// the matrix length. Skipping the bounds check keeps the million-fold
    /// edge summations in the search loops cheap.
    #[inline(always)]
    fn edge(&self, n: usize, a: u16, b: u16) -> u64 {
        let idx = a as usize * n + b as usize;
        debug_assert!(idx < self.dist.len());
        u64::from(unsafe { *self.dist.get_unchecked(idx) })
    }

    /// Sum of the consecutive edges within one stretch of a tour.
    #[inline(always)]
    fn path_sum(&self, n: usize, part: &[u16]) -> u64 {
        let Some((&first, rest)) = part.split_first() else {
            return 0;
        };
        let mut sum = 0u64;
        let mut prev = first;
        let mut chunks = rest.chunks_exact(4);
        for c in &mut chunks {
            sum += self.edge(n, prev, c[0])
                + self.edge(n, c[0], c[1])
                + self.edge(n, c[1], c[2])
                + self.edge(n, c[2], c[3]);
            prev = c[3];
        }
        for &b in chunks.remainder() {
            sum += self.edge(n, prev, b);
            prev = b;
        }
        sum
    }

    /// Exact closed-tour length in lattice units. `t` must be a permutation
    /// of the instance's city indices.
    #[inline]
    pub fn tour_length(&self, t: &[u16]) -> i64 {
        let n = self.cities.len();
        assert_eq!(t.len(), n);
        (self.path_sum(n, t) + self.edge(n, t[n - 1], t[0])) as i64
    }

    /// Length of the neighbor obtained by reversing `t[i..=j]`, computed by
    /// summing all `N` edges of the resulting tour (the reversed segment's
    /// internal edges are read off `t` directly since the metric is
    /// symmetric). No incremental shortcut is taken: every edge is summed.
    #[inline]
    pub fn tour_length_after_reversal(&self, t: &[u16], i: usize, j: usize) -> i64 {
        let n = self.cities.len();
        assert!(t.len() == n && 1 <= i && i < j && j < n);
        let mut sum = self.path_sum(n, &t[..i]);
        sum += self.edge(n, t[i - 1], t[j]);
        sum += self.path_sum(n, &t[i..=j]);
        if j == n - 1 {
            sum += self.edge(n, t[i], t[0]);
        } else {
            sum += self.edge(n, t[i], t[j + 1]);
            sum += self.path_sum(n, &t[j + 1..]);
            sum += self.edge(n, t[n - 1], t[0]);
        }
        sum as i64
    }

    pub fn validate_tour(&self, t: &[u16]) -> Result<()> {
        let n = self.cities.len();
        if t.len() != n {
            return Err(Error::InvalidParams(format!(
                "tour has {} entries, instance has {n} cities",
                t.len()
            )));
        }
        let mut seen = vec![false; n];
        for &c in t {
            let c = c as usize;
            if c >= n || seen[c] {
                return Err(Error::InvalidParams(
                    "tour is not a permutation of the city indices".into(),
                ));
            }
            seen[c] = true;
        }
        Ok(())
    }

    /// Serializes to the instance format: `TSPN 1`, `L N seed`, then one
    /// `x y` line per city.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "TSPN 1");
        let _ = writeln!(out, "{} {} {}", self.l, self.n(), self.seed);
        for &(x, y) in &self.cities {
            let _ = writeln!(out, "{x} {y}");
        }
        out
    }

    pub fn from_file_string(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::MalformedInstance("empty file".into()))?;
        if header.trim() != "TSPN 1" {
            return Err(Error::MalformedInstance(format!(
                "expected header `TSPN 1`, got `{header}`"
            )));
        }
        let meta = lines
            .next()
            .ok_or_else(|| Error::MalformedInstance("missing parameter line".into()))?;
        let fields: Vec<&str> = meta.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::MalformedInstance(format!(
                "parameter line needs 3 fields, got {}",
                fields.len()
            )));
        }
        let l: u32 = parse_num(fields[0], "L")?;
        let n: usize = parse_num(fields[1], "N")?;
        let seed: u64 = parse_num(fields[2], "seed")?;
        let mut cities = Vec::with_capacity(n);
        for i in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| Error::MalformedInstance(format!("missing city line {i}")))?;
            let xy: Vec<&str> = line.split_whitespace().collect();
            if xy.len() != 2 {
                return Err(Error::MalformedInstance(format!(
                    "city line {i} needs 2 fields"
                )));
            }
            cities.push((parse_num(xy[0], "x")?, parse_num(xy[1], "y")?));
        }
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(Error::MalformedInstance("trailing content".into()));
        }
        LatticeInstance::from_parts(l, cities, seed)
    }

    pub fn write_to_path(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_file_string())?;
        Ok(())
    }

    pub fn read_from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_file_string(&text)
    }
}

/// The 2-opt neighbor enumeration as owned tours; errors below 4 cities
/// where every reversal degenerates to the original cycle.
pub fn two_opt_neighbors(instance: &LatticeInstance, t: &Tour) -> Result<Vec<Tour>> {
    if instance.n() < 4 {
        return Err(Error::InvalidParams(
            "2-opt neighborhood needs at least 4 cities".into(),
        ));
    }
    instance.validate_tour(t)?;
    Ok(instance.neighbors(t))
}

impl Landscape for LatticeInstance {
    type Solution = Tour;
    type Key = u128;
    type KeyHasher = std::hash::BuildHasherDefault<FingerprintHasher>;

    fn direction(&self) -> Direction {
        Direction::Minimize
    }

    fn neighborhood_size(&self, s: &Tour) -> usize {
        two_opt_move_count(s.len())
    }

    fn evaluate(&self, s: &Tour, counter: &mut EvalCounter) -> RawFitness {
        counter.bump();
        RawFitness(self.tour_length(s))
    }

    fn evaluate_uncounted(&self, s: &Tour) -> RawFitness {
        RawFitness(self.tour_length(s))
    }

    fn for_each_neighbor<F: FnMut(usize, &Tour)>(&self, s: &Tour, mut visit: F) {
        let mut scratch = s.clone();
        for (idx, m) in two_opt_moves(s.len()).enumerate() {
            scratch[m.i..=m.j].reverse();
            visit(idx, &scratch);
            scratch[m.i..=m.j].reverse();
        }
    }

    fn neighbor(&self, s: &Tour, index: usize) -> Tour {
        let m = two_opt_move_at(s.len(), index);
        let mut n = s.clone();
        n[m.i..=m.j].reverse();
        n
    }

    /// Computes each neighbor's length by walking all edges of the reversed
    /// tour without materializing it.
    fn for_each_neighbor_fitness_raw<F: FnMut(usize, RawFitness)>(&self, s: &Tour, mut visit: F) {
        let n = s.len();
        let mut idx = 0;
        for i in 1..n.saturating_sub(1) {
            let j_end = if i == 1 { n - 1 } else { n };
            for j in i + 1..j_end {
                visit(idx, RawFitness(self.tour_length_after_reversal(s, i, j)));
                idx += 1;
            }
        }
    }

    fn key(&self, s: &Tour) -> u128 {
        fingerprint(s)
    }

    fn random_solution(&self, rng: &mut RunRng) -> Tour {
        let mut t: Tour = (0..self.n() as u16).collect();
        t.shuffle(rng);
        t
    }

    /// Segment reversals act on positions, so two-move collisions are fixed
    /// by the move set alone: composing the position maps of every move
    /// pair and deduplicating them (seeded with the identity and all single
    /// moves) classifies pairs for any base tour at once.
    fn move_pair_table(&self, s: &Tour) -> Option<MovePairTable> {
        let n = s.len();
        if n < 4 {
            return None;
        }
        let sigmas: Vec<Vec<u16>> = two_opt_moves(n)
            .map(|m| {
                let mut sigma: Vec<u16> = (0..n as u16).collect();
                sigma[m.i..=m.j].reverse();
                sigma
            })
            .collect();
        let mut seen: std::collections::HashSet<u128, Self::KeyHasher> =
            std::collections::HashSet::with_capacity_and_hasher(
                two_opt_move_count(n) * (n + 10),
                Default::default(),
            );
        let identity: Vec<u16> = (0..n as u16).collect();
        seen.insert(fingerprint(&identity));
        for sigma in &sigmas {
            seen.insert(fingerprint(sigma));
        }
        let mut composed = vec![0u16; n];
        Some(MovePairTable::build(sigmas.len(), |m1, m2| {
            if m1 == m2 {
                return false;
            }
            let (s1, s2) = (&sigmas[m1], &sigmas[m2]);
            for (c, &p2) in composed.iter_mut().zip(s2.iter()) {
                *c = s1[p2 as usize];
            }
            seen.insert(fingerprint(&composed))
        }))
    }
}

/// 128-bit tour fingerprint: two independent multiply-rotate lanes over the
/// index array. Used as the dedup key for extended neighborhoods, where
/// storing full tours would dominate memory; at the scales searched here a
/// collision is vanishingly unlikely.
pub fn fingerprint(t: &[u16]) -> u128 {
    const M1: u64 = 0x9E37_79B9_7F4A_7C15;
    const M2: u64 = 0xC2B2_AE3D_27D4_EB4F;
    let mut h1: u64 = 0x517C_C1B7_2722_0A95;
    let mut h2: u64 = 0x2545_F491_4F6C_DD1D;
    let mut chunks = t.chunks_exact(4);
    for c in &mut chunks {
        let w = u64::from(c[0])
            | u64::from(c[1]) << 16
            | u64::from(c[2]) << 32
            | u64::from(c[3]) << 48;
        h1 = (h1.rotate_left(5) ^ w).wrapping_mul(M1);
        h2 = (h2.rotate_left(7) ^ w).wrapping_mul(M2);
    }
    for &x in chunks.remainder() {
        h1 = (h1.rotate_left(5) ^ u64::from(x)).wrapping_mul(M1);
        h2 = (h2.rotate_left(7) ^ u64::from(x)).wrapping_mul(M2);
    }
    u128::from(h1) << 64 | u128::from(h2)
}

/// Pass-through hasher for keys that are already fingerprints.
#[derive(Default)]
pub struct FingerprintHasher(u64);

impl Hasher for FingerprintHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = self.0.rotate_left(8) ^ u64::from(b);
        }
    }

    fn write_u128(&mut self, v: u128) {
        self.0 = (v as u64) ^ ((v >> 64) as u64);
    }

    fn write_u64(&mut self, v: u64) {
        self.0 = v;
    }
}

/// Builds one instance from `(l, n, seed)`, draws `samples` uniform random
/// tours from a stream derived from the same seed, and returns the mean
/// proportion of neutral 2-opt neighbors.
pub fn sample_neutral_proportion(l: u32, n: usize, samples: usize, seed: u64) -> Result<f64> {
    if samples == 0 {
        return Err(Error::InvalidParams("need at least one sample".into()));
    }
    if n < 4 {
        return Err(Error::InvalidParams(
            "2-opt neighborhood needs at least 4 cities".into(),
        ));
    }
    let instance = LatticeInstance::build(l, n, seed)?;
    let mut rng = rng_from_seed(mix(seed, 1));
    let mut counter = EvalCounter::new();
    let nbhd = two_opt_move_count(n) as u64;
    let mut total_neutral = 0u64;
    for _ in 0..samples {
        let t = instance.random_solution(&mut rng);
        total_neutral += crate::landscape::neutral_degree(&instance, &t, &mut counter) as u64;
    }
    Ok(total_neutral as f64 / (samples as u64 * nbhd) as f64)
}
