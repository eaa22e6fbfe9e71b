//! NKq fitness landscapes: binary strings of `N` loci, each contributing an
//! integer component in `[0, q-1]` that depends on its own allele and the
//! alleles of `K` linked loci. `K` tunes ruggedness, `q` tunes neutrality
//! (small `q` means many coincident component values, hence many neutral
//! one-bit flips).
//!
//! Raw fitness is the exact component sum in `[0, N*(q-1)]`; the normalized
//! value `sum / (N*(q-1))` is only produced by reporting code.

use std::fmt::Write as _;
use std::hash::{BuildHasherDefault, DefaultHasher};

use rand::seq::index::sample as sample_indices;
use rand::Rng;

use crate::error::{Error, Result};
use crate::landscape::{Direction, EvalCounter, Landscape, MovePairTable, RawFitness};
use crate::rng::{mix, rng_from_seed, RunRng};

/// Genotype: a sequence of N values in {0, 1}.
pub type BitGenotype = Vec<u8>;

/// Largest supported epistasis degree; component tables hold `2^(K+1)`
/// entries per locus, so this caps table memory.
pub const MAX_K: usize = 20;

/// How the K epistatic links of each locus are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkKind {
    /// The K nearest loci with wrap-around: `ceil(K/2)` to the right, then
    /// `floor(K/2)` to the left, each side in increasing distance order.
    Adjacent,
    /// K distinct loci drawn uniformly from the other N-1.
    Random,
}

impl LinkKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LinkKind::Adjacent => "adjacent",
            LinkKind::Random => "random",
        }
    }

    pub fn parse(token: &str) -> Result<Self> {
        match token {
            "adjacent" => Ok(LinkKind::Adjacent),
            "random" => Ok(LinkKind::Random),
            other => Err(Error::InvalidParams(format!(
                "unknown link kind `{other}` (expected `adjacent` or `random`)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NkqParams {
    pub n: usize,
    pub k: usize,
    pub q: u32,
    pub kind: LinkKind,
    pub seed: u64,
}

impl NkqParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParams("N must be positive".into()));
        }
        if self.k >= self.n {
            return Err(Error::InvalidParams(format!(
                "K must satisfy 0 <= K <= N-1 (got K={}, N={})",
                self.k, self.n
            )));
        }
        if self.k > MAX_K {
            return Err(Error::InvalidParams(format!(
                "K={} exceeds the supported maximum {MAX_K}",
                self.k
            )));
        }
        if self.q < 2 {
            return Err(Error::InvalidParams("q must be at least 2".into()));
        }
        if self.q > u32::from(u16::MAX) + 1 {
            return Err(Error::InvalidParams(format!(
                "q={} exceeds the supported maximum {}",
                self.q,
                u32::from(u16::MAX) + 1
            )));
        }
        Ok(())
    }
}

/// A fully built, immutable NKq instance.
///
/// Construction is a deterministic function of the parameters (including the
/// seed): one ChaCha8 stream seeded with `params.seed` first draws the link
/// lists in locus order, then every component table in locus order. Component
/// tables are indexed by the K+1 relevant alleles read as a binary number
/// with the locus's own allele as the most significant bit, followed by the
/// linked alleles in stored link order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NkqInstance {
    params: NkqParams,
    links: Vec<Vec<u16>>,
    tables: Vec<Vec<u16>>,
}

impl NkqInstance {
    pub fn build(params: NkqParams) -> Result<Self> {
        params.validate()?;
        let NkqParams { n, k, q, kind, .. } = params;
        let mut rng = rng_from_seed(params.seed);

        let links: Vec<Vec<u16>> = (0..n)
            .map(|i| match kind {
                LinkKind::Adjacent => adjacent_links(i, n, k),
                LinkKind::Random => {
                    // Draw from the other N-1 loci by skipping over i.
                    sample_indices(&mut rng, n - 1, k)
                        .into_iter()
                        .map(|raw| if raw >= i { raw + 1 } else { raw } as u16)
                        .collect()
                }
            })
            .collect();

        let table_len = 1usize << (k + 1);
        let tables: Vec<Vec<u16>> = (0..n)
            .map(|_| {
                (0..table_len)
                    .map(|_| rng.gen_range(0..q) as u16)
                    .collect()
            })
            .collect();

        Ok(NkqInstance {
            params,
            links,
            tables,
        })
    }

    /// Assembles an instance from explicit links and tables (used by the
    /// instance-file reader and by tests that pin exact component values).
    pub fn from_parts(params: NkqParams, links: Vec<Vec<u16>>, tables: Vec<Vec<u16>>) -> Result<Self> {
        params.validate()?;
        let NkqParams { n, k, q, .. } = params;
        if links.len() != n || tables.len() != n {
            return Err(Error::InvalidParams(format!(
                "expected {n} link lists and {n} tables"
            )));
        }
        for (i, row) in links.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidParams(format!(
                    "locus {i}: expected {k} links, got {}",
                    row.len()
                )));
            }
            let mut seen = vec![false; n];
            for &l in row {
                let l = l as usize;
                if l >= n || l == i || seen[l] {
                    return Err(Error::InvalidParams(format!(
                        "locus {i}: invalid link {l}"
                    )));
                }
                seen[l] = true;
            }
        }
        let table_len = 1usize << (k + 1);
        for (i, table) in tables.iter().enumerate() {
            if table.len() != table_len {
                return Err(Error::InvalidParams(format!(
                    "locus {i}: expected {table_len} table entries, got {}",
                    table.len()
                )));
            }
            if table.iter().any(|&y| u32::from(y) >= q) {
                return Err(Error::InvalidParams(format!(
                    "locus {i}: table entry out of [0, q-1]"
                )));
            }
        }
        Ok(NkqInstance {
            params,
            links,
            tables,
        })
    }

    pub fn params(&self) -> &NkqParams {
        &self.params
    }

    pub fn links(&self) -> &[Vec<u16>] {
        &self.links
    }

    pub fn tables(&self) -> &[Vec<u16>] {
        &self.tables
    }

    /// Largest possible raw fitness, `N*(q-1)`.
    pub fn max_raw(&self) -> i64 {
        self.params.n as i64 * (i64::from(self.params.q) - 1)
    }

    /// Raw fitness: the exact sum of the N component values.
    #[inline]
    pub fn fitness(&self, g: &[u8]) -> i64 {
        debug_assert_eq!(g.len(), self.params.n);
        let mut sum = 0u64;
        for i in 0..self.params.n {
            let mut idx = g[i] as usize;
            for &l in &self.links[i] {
                idx = (idx << 1) | g[l as usize] as usize;
            }
            sum += u64::from(self.tables[i][idx]);
        }
        sum as i64
    }

    /// Reporting-only normalization to [0, 1].
    pub fn normalized(&self, raw: i64) -> f64 {
        raw as f64 / self.max_raw() as f64
    }

    pub fn validate_genotype(&self, g: &[u8]) -> Result<()> {
        if g.len() != self.params.n {
            return Err(Error::InvalidParams(format!(
                "genotype length {} does not match N={}",
                g.len(),
                self.params.n
            )));
        }
        if g.iter().any(|&b| b > 1) {
            return Err(Error::InvalidParams("genotype values must be 0 or 1".into()));
        }
        Ok(())
    }

    /// Serializes to the line-oriented instance format:
    /// `NKQ 1`, then `N K q kind seed`, then N link lines, then N table lines.
    pub fn to_file_string(&self) -> String {
        let p = &self.params;
        let mut out = String::new();
        let _ = writeln!(out, "NKQ 1");
        let _ = writeln!(out, "{} {} {} {} {}", p.n, p.k, p.q, p.kind.as_str(), p.seed);
        for row in &self.links {
            let _ = writeln!(out, "{}", join_nums(row));
        }
        for table in &self.tables {
            let _ = writeln!(out, "{}", join_nums(table));
        }
        out
    }

    pub fn from_file_string(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::MalformedInstance("empty file".into()))?;
        if header.trim() != "NKQ 1" {
            return Err(Error::MalformedInstance(format!(
                "expected header `NKQ 1`, got `{header}`"
            )));
        }
        let meta = lines
            .next()
            .ok_or_else(|| Error::MalformedInstance("missing parameter line".into()))?;
        let fields: Vec<&str> = meta.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(Error::MalformedInstance(format!(
                "parameter line needs 5 fields, got {}",
                fields.len()
            )));
        }
        let n: usize = parse_num(fields[0], "N")?;
        let k: usize = parse_num(fields[1], "K")?;
        let q: u32 = parse_num(fields[2], "q")?;
        let kind = LinkKind::parse(fields[3])?;
        let seed: u64 = parse_num(fields[4], "seed")?;
        let params = NkqParams { n, k, q, kind, seed };
        params.validate()?;

        let mut links = Vec::with_capacity(n);
        for i in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| Error::MalformedInstance(format!("missing link line for locus {i}")))?;
            let row: Vec<u16> = line
                .split_whitespace()
                .map(|t| parse_num(t, "link index"))
                .collect::<Result<_>>()?;
            links.push(row);
        }
        let mut tables = Vec::with_capacity(n);
        for i in 0..n {
            let line = lines.next().ok_or_else(|| {
                Error::MalformedInstance(format!("missing table line for locus {i}"))
            })?;
            let table: Vec<u16> = line
                .split_whitespace()
                .map(|t| parse_num(t, "table entry"))
                .collect::<Result<_>>()?;
            tables.push(table);
        }
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(Error::MalformedInstance("trailing content".into()));
        }
        NkqInstance::from_parts(params, links, tables)
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

fn adjacent_links(i: usize, n: usize, k: usize) -> Vec<u16> {
    let right = k.div_ceil(2);
    let left = k / 2;
    let mut row = Vec::with_capacity(k);
    for d in 1..=right {
        row.push(((i + d) % n) as u16);
    }
    for d in 1..=left {
        row.push(((i + n - d) % n) as u16);
    }
    row
}

fn join_nums<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

pub(crate) fn parse_num<T: std::str::FromStr>(token: &str, what: &str) -> Result<T> {
    token
        .parse()
        .map_err(|_| Error::MalformedInstance(format!("bad {what}: `{token}`")))
}

impl Landscape for NkqInstance {
    type Solution = BitGenotype;
    type Key = BitGenotype;
    type KeyHasher = BuildHasherDefault<DefaultHasher>;

    fn direction(&self) -> Direction {
        Direction::Maximize
    }

    fn neighborhood_size(&self, _s: &BitGenotype) -> usize {
        self.params.n
    }

    fn evaluate(&self, s: &BitGenotype, counter: &mut EvalCounter) -> RawFitness {
        counter.bump();
        RawFitness(self.fitness(s))
    }

    fn evaluate_uncounted(&self, s: &BitGenotype) -> RawFitness {
        RawFitness(self.fitness(s))
    }

    /// One-bit flips in locus order.
    fn for_each_neighbor<F: FnMut(usize, &BitGenotype)>(&self, s: &BitGenotype, mut visit: F) {
        let mut scratch = s.clone();
        for i in 0..self.params.n {
            scratch[i] ^= 1;
            visit(i, &scratch);
            scratch[i] ^= 1;
        }
    }

    fn neighbor(&self, s: &BitGenotype, index: usize) -> BitGenotype {
        let mut n = s.clone();
        n[index] ^= 1;
        n
    }

    fn key(&self, s: &BitGenotype) -> BitGenotype {
        s.clone()
    }

    fn random_solution(&self, rng: &mut RunRng) -> BitGenotype {
        (0..self.params.n).map(|_| rng.gen_range(0..2u8)).collect()
    }

    /// Bit flips commute: flipping m1 then m2 reproduces the base genotype
    /// when m1 = m2, and otherwise yields the two-flip point first reached
    /// with m1 < m2.
    fn move_pair_table(&self, _s: &BitGenotype) -> Option<MovePairTable> {
        Some(MovePairTable::build(self.params.n, |m1, m2| m1 < m2))
    }
}

/// Builds one instance from `params`, draws `samples` uniform random
/// genotypes from a separate stream seeded with `sample_seed`, and returns
/// the mean neutral degree over the sample.
pub fn sample_neutral_degree(params: NkqParams, samples: usize, sample_seed: u64) -> Result<f64> {
    if samples == 0 {
        return Err(Error::InvalidParams("need at least one sample".into()));
    }
    let instance = NkqInstance::build(params)?;
    let mut rng = rng_from_seed(mix(sample_seed, 0));
    let mut counter = EvalCounter::new();
    let mut total = 0u64;
    for _ in 0..samples {
        let g = instance.random_solution(&mut rng);
        total += crate::landscape::neutral_degree(&instance, &g, &mut counter) as u64;
    }
    Ok(total as f64 / samples as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::neutral_degree;
    use proptest::prelude::*;

    fn params(n: usize, k: usize, q: u32, kind: LinkKind, seed: u64) -> NkqParams {
        NkqParams { n, k, q, kind, seed }
    }

    #[test]
    fn rejects_bad_params() {
        assert!(NkqInstance::build(params(8, 8, 2, LinkKind::Random, 0)).is_err());
        assert!(NkqInstance::build(params(8, 2, 1, LinkKind::Random, 0)).is_err());
        assert!(NkqInstance::build(params(0, 0, 2, LinkKind::Random, 0)).is_err());
        assert!(NkqInstance::build(params(64, 21, 2, LinkKind::Random, 0)).is_err());
    }

    #[test]
    fn table_sizes_follow_k() {
        let inst = NkqInstance::build(params(64, 2, 3, LinkKind::Random, 5)).unwrap();
        assert!(inst.tables().iter().all(|t| t.len() == 8));
    }

    #[test]
    fn build_is_deterministic() {
        let a = NkqInstance::build(params(64, 4, 3, LinkKind::Random, 99)).unwrap();
        let b = NkqInstance::build(params(64, 4, 3, LinkKind::Random, 99)).unwrap();
        assert_eq!(a, b);
        let c = NkqInstance::build(params(64, 4, 3, LinkKind::Random, 100)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn random_links_are_distinct_and_never_self() {
        let inst = NkqInstance::build(params(64, 4, 2, LinkKind::Random, 7)).unwrap();
        for (i, row) in inst.links().iter().enumerate() {
            assert_eq!(row.len(), 4);
            let mut sorted = row.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted.len(), 4, "locus {i} has duplicate links");
            assert!(row.iter().all(|&l| l as usize != i));
        }
    }

    #[test]
    fn adjacent_links_wrap_around() {
        let inst = NkqInstance::build(params(6, 3, 2, LinkKind::Adjacent, 0)).unwrap();
        // ceil(3/2)=2 right, floor(3/2)=1 left.
        assert_eq!(inst.links()[0], vec![1, 2, 5]);
        assert_eq!(inst.links()[5], vec![0, 1, 4]);
    }

    #[test]
    fn fitness_matches_component_table_arithmetic() {
        // N=2, K=0, q=3 with f0(0)=2, f0(1)=0, f1(0)=1, f1(1)=2.
        let p = params(2, 0, 3, LinkKind::Adjacent, 0);
        let inst = NkqInstance::from_parts(p, vec![vec![], vec![]], vec![vec![2, 0], vec![1, 2]])
            .unwrap();
        assert_eq!(inst.fitness(&[0, 1]), 4);
        assert_eq!(inst.normalized(4), 1.0);
        assert_eq!(inst.fitness(&[1, 0]), 1);
        assert_eq!(inst.normalized(1), 0.25);
    }

    #[test]
    fn extreme_tables_hit_bounds() {
        let p = params(3, 1, 4, LinkKind::Adjacent, 0);
        let links = vec![vec![1], vec![2], vec![0]];
        let zeros = NkqInstance::from_parts(p, links.clone(), vec![vec![0; 4]; 3]).unwrap();
        assert_eq!(zeros.fitness(&[1, 0, 1]), 0);
        assert_eq!(zeros.normalized(0), 0.0);
        let tops = NkqInstance::from_parts(p, links, vec![vec![3; 4]; 3]).unwrap();
        assert_eq!(tops.fitness(&[1, 0, 1]), 9);
        assert_eq!(tops.normalized(9), 1.0);
    }

    #[test]
    fn neighbors_are_single_flips_in_locus_order() {
        let inst = NkqInstance::build(params(3, 0, 2, LinkKind::Random, 1)).unwrap();
        let g = vec![0, 0, 0];
        let ns = inst.neighbors(&g);
        assert_eq!(ns, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
    }

    #[test]
    fn own_allele_is_most_significant_table_bit() {
        // K=1: index = own*2 + linked. Table [f(0,0), f(0,1), f(1,0), f(1,1)].
        let p = params(2, 1, 5, LinkKind::Adjacent, 0);
        let inst = NkqInstance::from_parts(
            p,
            vec![vec![1], vec![0]],
            vec![vec![0, 1, 2, 3], vec![0, 0, 0, 0]],
        )
        .unwrap();
        // g = (1, 0): locus 0 sees own=1, linked=0 -> index 2 -> value 2.
        assert_eq!(inst.fitness(&[1, 0]), 2);
        // g = (0, 1): own=0, linked=1 -> index 1 -> value 1.
        assert_eq!(inst.fitness(&[0, 1]), 1);
    }

    #[test]
    fn k0_neutral_degree_counts_equal_component_pairs() {
        let p = params(6, 0, 2, LinkKind::Random, 11);
        let inst = NkqInstance::build(p).unwrap();
        let expected = inst
            .tables()
            .iter()
            .filter(|t| t[0] == t[1])
            .count();
        let mut c = EvalCounter::new();
        for g in [vec![0; 6], vec![1; 6], vec![0, 1, 0, 1, 0, 1]] {
            assert_eq!(neutral_degree(&inst, &g, &mut c), expected);
        }
    }

    #[test]
    fn file_round_trip_is_bit_exact_and_evaluates_identically() {
        let inst = NkqInstance::build(params(16, 3, 4, LinkKind::Random, 1234)).unwrap();
        let text = inst.to_file_string();
        let back = NkqInstance::from_file_string(&text).unwrap();
        assert_eq!(back.to_file_string(), text);
        let mut rng = rng_from_seed(5);
        for _ in 0..32 {
            let g = inst.random_solution(&mut rng);
            assert_eq!(inst.fitness(&g), back.fitness(&g));
        }
    }

    #[test]
    fn file_round_trip_with_k0_empty_link_lines() {
        let inst = NkqInstance::build(params(4, 0, 2, LinkKind::Adjacent, 3)).unwrap();
        let text = inst.to_file_string();
        let back = NkqInstance::from_file_string(&text).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn malformed_files_are_rejected() {
        assert!(NkqInstance::from_file_string("").is_err());
        assert!(NkqInstance::from_file_string("TSPN 1\n").is_err());
        assert!(NkqInstance::from_file_string("NKQ 1\n2 0 3 random\n").is_err());
        let inst = NkqInstance::build(params(4, 1, 2, LinkKind::Random, 0)).unwrap();
        let mut text = inst.to_file_string();
        text.push_str("999\n");
        assert!(NkqInstance::from_file_string(&text).is_err());
    }

    #[test]
    fn sample_neutral_degree_matches_k0_expectation() {
        // K=0, q=2: flipping locus i is neutral iff the two table entries
        // agree, so a single instance realizes Binomial(64, 1/2).
        for seed in [1u64, 2, 3] {
            let p = params(64, 0, 2, LinkKind::Random, seed);
            let mean = sample_neutral_degree(p, 200, 77).unwrap();
            assert!((mean - 32.0).abs() <= 12.0, "seed {seed}: mean {mean}");
        }
    }

    #[test]
    fn sample_neutral_degree_high_q_high_k_is_near_zero() {
        // At q=100 a flip is neutral only when ~K+1 independent component
        // deltas cancel exactly, so the mean degree sits well under one
        // neutral neighbor in 64 (versus ~9 at q=2, K=16).
        let p = params(64, 16, 100, LinkKind::Random, 4);
        let mean = sample_neutral_degree(p, 300, 9).unwrap();
        assert!(mean < 0.5, "mean {mean}");
    }

    proptest! {
        #[test]
        fn raw_fitness_is_within_bounds(seed in 0u64..1000, k in 0usize..5, q in 2u32..20) {
            let p = params(12, k, q, LinkKind::Random, seed);
            let inst = NkqInstance::build(p).unwrap();
            let mut rng = rng_from_seed(seed ^ 0xABCD);
            let g = inst.random_solution(&mut rng);
            let raw = inst.fitness(&g);
            prop_assert!(raw >= 0 && raw <= inst.max_raw());
            let norm = inst.normalized(raw);
            prop_assert!((0.0..=1.0).contains(&norm));
        }

        #[test]
        fn every_neighbor_is_at_hamming_distance_one(seed in 0u64..200) {
            let p = params(10, 2, 3, LinkKind::Random, seed);
            let inst = NkqInstance::build(p).unwrap();
            let mut rng = rng_from_seed(seed);
            let g = inst.random_solution(&mut rng);
            let ns = inst.neighbors(&g);
            prop_assert_eq!(ns.len(), 10);
            for n in ns {
                let dist: usize = n.iter().zip(&g).filter(|(a, b)| a != b).count();
                prop_assert_eq!(dist, 1);
            }
        }
    }
}
