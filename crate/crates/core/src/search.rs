//! The three search procedures: hill climbing, two-step hill climbing and
//! scuba search.
//!
//! All three share the same bookkeeping style: one full neighborhood sweep
//! per visited point, evaluated through the run's [`EvalCounter`], with
//! uniform random tie-breaking drawn from the run's own generator. Nothing is
//! cached across sweeps, so evaluation counts reflect the raw cost of each
//! walk:
//!
//! * hill climbing pays `1 + |V(s)|` evaluations per visited point;
//! * two-step hill climbing additionally evaluates every distinct solution
//!   two moves away, once per visited point;
//! * scuba search pays `(1 + Degn(s)) * (1 + |V(s)|)` per neutral-phase
//!   iteration, where `Degn(s)` is the neutral degree of the current point.
//!
//! Scuba search alternates two dynamics. While some neutral neighbor has
//! strictly better evolvability (the best fitness reachable from its own
//! neighborhood), it drifts along the plateau to a neutral neighbor of
//! maximal evolvability, counting a *flat* move. Once the plateau is locally
//! optimal in evolvability, it jumps to a strictly better neighbor whose
//! fitness attains the current evolvability, counting a *gate* move. The walk
//! stops when the current point is a local optimum of the plain fitness.

use std::collections::HashMap;

use crate::landscape::{EvalCounter, Landscape, RawFitness};
use crate::rng::RunRng;
use rand::Rng;

/// Sentinel index meaning "stay at the current solution".
const SELF: usize = usize::MAX;

/// What a single accepted move did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveKind {
    /// Fitness changed by a plain neighborhood move (strictly better for
    /// hill climbing; possibly a two-step descent for the extended variant).
    Climb,
    /// Fitness unchanged.
    Neutral,
    /// Scuba gate move: strictly improving exit from a plateau.
    Jump,
}

impl MoveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MoveKind::Climb => "climb",
            MoveKind::Neutral => "neutral",
            MoveKind::Jump => "jump",
        }
    }
}

/// One accepted move of a logged run.
#[derive(Debug, Clone)]
pub struct LogEntry<S> {
    pub kind: MoveKind,
    /// The solution the walk moved to.
    pub to: S,
    pub fitness_before: RawFitness,
    pub fitness_after: RawFitness,
    /// Cumulative evaluation count when the move was accepted.
    pub evaluations: u64,
}

/// Final state and counters of one search run.
#[derive(Debug, Clone)]
pub struct SearchOutcome<S> {
    pub solution: S,
    pub fitness: RawFitness,
    /// Loop iterations for the hill climbers; accepted moves for scuba.
    pub steps: u64,
    /// Accepted neutral-phase moves (scuba only).
    pub flat_count: u64,
    /// Accepted jumps (scuba only).
    pub gate_count: u64,
    pub evaluations: u64,
}

/// One sweep over the inclusive neighborhood of a point: its fitness, the
/// best reachable fitness, the indices attaining that best (with [`SELF`]
/// standing for the point itself) and the indices of neutral neighbors.
#[derive(Default)]
struct Scan {
    fitness: RawFitness,
    best: RawFitness,
    best_indices: Vec<usize>,
    neutral_indices: Vec<usize>,
}

impl Scan {
    fn run<L: Landscape>(&mut self, landscape: &L, s: &L::Solution, counter: &mut EvalCounter) {
        let dir = landscape.direction();
        self.fitness = landscape.evaluate(s, counter);
        self.best = self.fitness;
        self.best_indices.clear();
        self.best_indices.push(SELF);
        self.neutral_indices.clear();
        let (fitness, best, best_indices, neutral_indices) = (
            self.fitness,
            &mut self.best,
            &mut self.best_indices,
            &mut self.neutral_indices,
        );
        landscape.for_each_neighbor_fitness(s, counter, |idx, f| {
            if f == fitness {
                neutral_indices.push(idx);
            }
            if dir.better(f, *best) {
                *best = f;
                best_indices.clear();
                best_indices.push(idx);
            } else if f == *best {
                best_indices.push(idx);
            }
        });
    }

    /// True iff no neighbor strictly beats the point.
    fn is_local(&self) -> bool {
        self.best == self.fitness
    }
}

fn choose(rng: &mut RunRng, candidates: &[usize]) -> usize {
    debug_assert!(!candidates.is_empty());
    candidates[rng.gen_range(0..candidates.len())]
}

fn log_move<S: Clone>(
    log: &mut Option<&mut Vec<LogEntry<S>>>,
    kind: MoveKind,
    to: &S,
    before: RawFitness,
    after: RawFitness,
    evaluations: u64,
) {
    if let Some(entries) = log.as_deref_mut() {
        entries.push(LogEntry {
            kind,
            to: to.clone(),
            fitness_before: before,
            fitness_after: after,
            evaluations,
        });
    }
}

/// Plain hill climbing: repeatedly move to a uniformly chosen solution of
/// the inclusive neighborhood attaining the best reachable fitness, until
/// the walk sits on a local optimum. The loop body always runs at least
/// once, so `steps >= 1` even when the start is already optimal.
pub fn hill_climb<L: Landscape>(
    landscape: &L,
    s0: L::Solution,
    rng: &mut RunRng,
) -> SearchOutcome<L::Solution> {
    hill_climb_logged(landscape, s0, rng, None)
}

pub fn hill_climb_logged<L: Landscape>(
    landscape: &L,
    s0: L::Solution,
    rng: &mut RunRng,
    mut log: Option<&mut Vec<LogEntry<L::Solution>>>,
) -> SearchOutcome<L::Solution> {
    let mut counter = EvalCounter::new();
    let mut s = s0;
    let mut steps = 0u64;
    let mut scan = Scan::default();
    loop {
        scan.run(landscape, &s, &mut counter);
        if steps > 0 && scan.is_local() {
            break;
        }
        let before = scan.fitness;
        let pick = choose(rng, &scan.best_indices);
        if pick != SELF {
            s = landscape.neighbor(&s, pick);
        }
        steps += 1;
        let kind = if scan.best == before {
            MoveKind::Neutral
        } else {
            MoveKind::Climb
        };
        log_move(&mut log, kind, &s, before, scan.best, counter.count());
    }
    SearchOutcome {
        fitness: scan.fitness,
        solution: s,
        steps,
        flat_count: 0,
        gate_count: 0,
        evaluations: counter.count(),
    }
}

/// Two-step hill climbing: looks two moves ahead. If nothing two moves away
/// beats the best direct neighbor, it moves like plain hill climbing toward
/// the best reachable fitness; otherwise it moves to a direct neighbor whose
/// own evolvability attains the extended best, and climbs out from there on
/// the next iteration. Terminates when no solution within two moves is
/// strictly better.
pub fn hill_climb_two_steps<L: Landscape>(
    landscape: &L,
    s0: L::Solution,
    rng: &mut RunRng,
) -> SearchOutcome<L::Solution> {
    hill_climb_two_steps_logged(landscape, s0, rng, None)
}

pub fn hill_climb_two_steps_logged<L: Landscape>(
    landscape: &L,
    s0: L::Solution,
    rng: &mut RunRng,
    mut log: Option<&mut Vec<LogEntry<L::Solution>>>,
) -> SearchOutcome<L::Solution> {
    let dir = landscape.direction();
    let pair_table = landscape.move_pair_table(&s0);
    let mut counter = EvalCounter::new();
    let mut s = s0;
    let mut steps = 0u64;

    // Per-sweep scratch, reused across iterations. Without a move-pair
    // table, `seen` maps every distinct solution within distance 2 (plus the
    // point itself) to its fitness so each is evaluated exactly once per
    // sweep.
    let mut seen: HashMap<L::Key, RawFitness, L::KeyHasher> = HashMap::default();
    let mut first_fitness: Vec<RawFitness> = Vec::new();
    let mut first_evol: Vec<RawFitness> = Vec::new();
    let mut qualifiers: Vec<usize> = Vec::new();

    loop {
        first_fitness.clear();
        first_evol.clear();

        let f_s = landscape.evaluate(&s, &mut counter);
        let mut evol_s = f_s;
        let mut evol2_s = f_s;

        // First pass: direct neighbors.
        landscape.for_each_neighbor_fitness(&s, &mut counter, |_, f1| {
            first_fitness.push(f1);
            evol_s = dir.best(evol_s, f1);
        });
        evol2_s = dir.best(evol2_s, evol_s);

        // Second pass: neighbors of neighbors. Each distinct solution two
        // moves out is counted (and, without a table, evaluated) exactly
        // once per sweep; duplicate pairs recompute an already-counted value.
        match &pair_table {
            Some(table) => {
                landscape.for_each_neighbor(&s, |m1, t1| {
                    let mut ev = first_fitness[m1];
                    landscape.for_each_neighbor_fitness_raw(t1, |m2, f2| {
                        if table.is_fresh(m1, m2) {
                            counter.bump();
                        }
                        ev = dir.best(ev, f2);
                    });
                    first_evol.push(ev);
                    evol2_s = dir.best(evol2_s, ev);
                });
            }
            None => {
                seen.clear();
                seen.insert(landscape.key(&s), f_s);
                landscape.for_each_neighbor(&s, |m1, t1| {
                    seen.insert(landscape.key(t1), first_fitness[m1]);
                });
                landscape.for_each_neighbor(&s, |m1, t1| {
                    let mut ev = first_fitness[m1];
                    landscape.for_each_neighbor(t1, |_, t2| {
                        let f2 = *seen
                            .entry(landscape.key(t2))
                            .or_insert_with(|| landscape.evaluate(t2, &mut counter));
                        ev = dir.best(ev, f2);
                    });
                    first_evol.push(ev);
                    evol2_s = dir.best(evol2_s, ev);
                });
            }
        }

        if steps > 0 && evol2_s == f_s {
            break;
        }

        qualifiers.clear();
        if evol_s == evol2_s {
            // Move straight to a best direct neighbor (or stay, when the
            // point itself attains the extended best).
            if f_s == evol2_s {
                qualifiers.push(SELF);
            }
            for (idx, &f1) in first_fitness.iter().enumerate() {
                if f1 == evol2_s {
                    qualifiers.push(idx);
                }
            }
        } else {
            // Move to a neighbor that can reach the extended best.
            for (idx, &ev) in first_evol.iter().enumerate() {
                if ev == evol2_s {
                    qualifiers.push(idx);
                }
            }
        }
        let pick = choose(rng, &qualifiers);
        let after = if pick == SELF {
            f_s
        } else {
            let f1 = first_fitness[pick];
            s = landscape.neighbor(&s, pick);
            f1
        };
        steps += 1;
        let kind = if after == f_s {
            MoveKind::Neutral
        } else {
            MoveKind::Climb
        };
        log_move(&mut log, kind, &s, f_s, after, counter.count());
    }

    let fitness = landscape.evaluate_uncounted(&s);
    SearchOutcome {
        solution: s,
        fitness,
        steps,
        flat_count: 0,
        gate_count: 0,
        evaluations: counter.count(),
    }
}

/// Scuba search: optimize evolvability along plateaus, then jump.
///
/// The outer loop first drifts while the current point is not locally
/// optimal in evolvability within its neutral neighborhood: each flat move
/// goes to a uniformly chosen neutral neighbor of maximal evolvability. It
/// then stops if the point is a plain local optimum, and otherwise jumps to
/// a uniformly chosen strictly better neighbor attaining the current
/// evolvability.
pub fn scuba_search<L: Landscape>(
    landscape: &L,
    s0: L::Solution,
    rng: &mut RunRng,
) -> SearchOutcome<L::Solution> {
    scuba_search_logged(landscape, s0, rng, None)
}

pub fn scuba_search_logged<L: Landscape>(
    landscape: &L,
    s0: L::Solution,
    rng: &mut RunRng,
    mut log: Option<&mut Vec<LogEntry<L::Solution>>>,
) -> SearchOutcome<L::Solution> {
    let dir = landscape.direction();
    let mut counter = EvalCounter::new();
    let mut s = s0;
    let mut flat_count = 0u64;
    let mut gate_count = 0u64;
    let mut scan = Scan::default();
    let mut tie_set: Vec<usize> = Vec::new();

    loop {
        // Neutral phase: drift while some neutral neighbor has strictly
        // better evolvability.
        loop {
            scan.run(landscape, &s, &mut counter);
            if scan.neutral_indices.is_empty() {
                break;
            }
            // Evolvability of every neutral neighbor, recomputed in full.
            let mut best_neutral_evol: Option<RawFitness> = None;
            tie_set.clear();
            for &vidx in &scan.neutral_indices {
                let v = landscape.neighbor(&s, vidx);
                let ev = crate::landscape::evol(landscape, &v, &mut counter);
                match best_neutral_evol {
                    Some(m) if !dir.better(ev, m) => {
                        if ev == m {
                            tie_set.push(vidx);
                        }
                    }
                    _ => {
                        best_neutral_evol = Some(ev);
                        tie_set.clear();
                        tie_set.push(vidx);
                    }
                }
            }
            let m = best_neutral_evol.expect("nonempty neutral set");
            if !dir.better(m, scan.best) {
                break;
            }
            // The loop condition guarantees a strict evolvability gain; a
            // violation here means the sweep and the move disagree.
            assert!(dir.better(m, scan.best));
            let pick = choose(rng, &tie_set);
            s = landscape.neighbor(&s, pick);
            flat_count += 1;
            log_move(
                &mut log,
                MoveKind::Neutral,
                &s,
                scan.fitness,
                scan.fitness,
                counter.count(),
            );
        }

        // Guard: on a plain local optimum the jump set would be empty.
        if scan.is_local() {
            break;
        }

        // Jump: every index in `best_indices` is a strictly better neighbor
        // whose fitness attains the current evolvability.
        debug_assert!(!scan.best_indices.contains(&SELF));
        let pick = choose(rng, &scan.best_indices);
        s = landscape.neighbor(&s, pick);
        gate_count += 1;
        log_move(
            &mut log,
            MoveKind::Jump,
            &s,
            scan.fitness,
            scan.best,
            counter.count(),
        );
    }

    SearchOutcome {
        fitness: scan.fitness,
        solution: s,
        steps: flat_count + gate_count,
        flat_count,
        gate_count,
        evaluations: counter.count(),
    }
}
