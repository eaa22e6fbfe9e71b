//! Brute-force oracles shared by the integration suites. Everything here
//! enumerates exhaustively and independently of the library's neighborhood
//! and search code paths: genotype flips and tour sets are generated by
//! direct combinatorics, fitness comes only from the instance's evaluation
//! function.

#![allow(dead_code)]

use scuba_core::landscape::{Direction, RawFitness};
use scuba_core::nkq::NkqInstance;
use scuba_core::tsp::LatticeInstance;

/// Every genotype of length `n`, ordered by the integer value of the bits
/// (most significant bit = locus 0).
pub fn all_genotypes(n: usize) -> Vec<Vec<u8>> {
    (0..1usize << n)
        .map(|v| (0..n).map(|i| ((v >> (n - 1 - i)) & 1) as u8).collect())
        .collect()
}

/// All genotypes at Hamming distance exactly 1, by direct bit arithmetic.
pub fn flips(g: &[u8]) -> Vec<Vec<u8>> {
    (0..g.len())
        .map(|i| {
            let mut f = g.to_vec();
            f[i] ^= 1;
            f
        })
        .collect()
}

pub fn hamming(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// All genotypes within Hamming distance `r` of `g`, excluding `g`.
pub fn ball_excl(g: &[u8], r: usize) -> Vec<Vec<u8>> {
    all_genotypes(g.len())
        .into_iter()
        .filter(|h| {
            let d = hamming(g, h);
            d >= 1 && d <= r
        })
        .collect()
}

/// Best fitness over `g` and its 1-flip neighbors (maximization).
pub fn brute_evol(inst: &NkqInstance, g: &[u8]) -> i64 {
    flips(g)
        .iter()
        .map(|f| inst.fitness(f))
        .chain([inst.fitness(g)])
        .max()
        .unwrap()
}

/// Best fitness over `g` and everything within Hamming distance 2.
pub fn brute_evol2(inst: &NkqInstance, g: &[u8]) -> i64 {
    ball_excl(g, 2)
        .iter()
        .map(|h| inst.fitness(h))
        .chain([inst.fitness(g)])
        .max()
        .unwrap()
}

/// The 1-flip neighbors with fitness exactly equal to `g`'s.
pub fn brute_neutral_set(inst: &NkqInstance, g: &[u8]) -> Vec<Vec<u8>> {
    let fg = inst.fitness(g);
    flips(g)
        .into_iter()
        .filter(|f| inst.fitness(f) == fg)
        .collect()
}

/// True iff no 1-flip neighbor strictly beats `g`.
pub fn brute_is_local(inst: &NkqInstance, g: &[u8]) -> bool {
    let fg = inst.fitness(g);
    flips(g).iter().all(|f| inst.fitness(f) <= fg)
}

/// True iff no solution within Hamming distance 2 strictly beats `g`.
pub fn brute_is_local2(inst: &NkqInstance, g: &[u8]) -> bool {
    let fg = inst.fitness(g);
    ball_excl(g, 2).iter().all(|h| inst.fitness(h) <= fg)
}

/// True iff no neutral 1-flip neighbor has strictly better brute-force
/// evolvability.
pub fn brute_is_local_neutral(inst: &NkqInstance, g: &[u8]) -> bool {
    let eg = brute_evol(inst, g);
    brute_neutral_set(inst, g)
        .iter()
        .all(|v| brute_evol(inst, v) <= eg)
}

/// Exhaustive optimum tour length with city 0 pinned at position 0.
pub fn brute_best_tour_length(inst: &LatticeInstance) -> i64 {
    let n = inst.n();
    assert!(n <= 9, "factorial search");
    let mut rest: Vec<u16> = (1..n as u16).collect();
    let mut best = i64::MAX;
    permute(&mut rest, 0, &mut |perm| {
        let mut tour = Vec::with_capacity(n);
        tour.push(0u16);
        tour.extend_from_slice(perm);
        best = best.min(inst.tour_length(&tour));
    });
    best
}

fn permute(xs: &mut [u16], k: usize, visit: &mut impl FnMut(&[u16])) {
    if k == xs.len() {
        visit(xs);
        return;
    }
    for i in k..xs.len() {
        xs.swap(k, i);
        permute(xs, k + 1, visit);
        xs.swap(k, i);
    }
}

/// One-sided Welch z statistic for "mean(a) beats mean(b)" given per-sample
/// values; callers compare against the normal quantile they need.
pub fn welch_z(a: &[f64], b: &[f64]) -> f64 {
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let var = |xs: &[f64], m: f64| {
        xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
    };
    let (ma, mb) = (mean(a), mean(b));
    let (va, vb) = (var(a, ma), var(b, mb));
    (ma - mb) / (va / a.len() as f64 + vb / b.len() as f64).sqrt()
}

/// Direction-aware wrapper used by trajectory audits.
pub fn strictly_better(dir: Direction, a: RawFitness, b: RawFitness) -> bool {
    dir.better(a, b)
}
