//! Experiment orchestration: deterministic multi-run experiments over one
//! shared instance, aggregation, and the row builders behind the table/figure
//! subcommands.
//!
//! Seeding scheme: an experiment owns two seeds. `instance_seed` feeds the
//! landscape builder; `master_seed` drives the runs, with run `i` seeded by
//! `derive_run_seed(master_seed, i)`. Each run draws its own initial solution
//! and all of its tie-breaks from its own generator, so a run's outcome
//! depends only on `(instance, heuristic, run seed)` — never on execution
//! order or worker count. Grid builders (tables, figures) derive per-cell
//! seeds from the user-facing seed via tagged [`mix_all`] chains.

use rayon::prelude::*;

use crate::csv::{Field, Row};
use crate::error::{Error, Result};
use crate::landscape::{Direction, Landscape};
use crate::nkq::{self, LinkKind, NkqInstance, NkqParams};
use crate::rng::{mix, mix_all, rng_from_seed};
use crate::search::{
    hill_climb, hill_climb_logged, hill_climb_two_steps, hill_climb_two_steps_logged,
    scuba_search, scuba_search_logged, LogEntry, SearchOutcome,
};
use crate::tsp::{self, LatticeInstance};

/// Stream tags for the tagged seed chains; distinct per role so no two grid
/// cells or streams collide.
mod tag {
    pub const NKQ_DEGREE_INSTANCE: u64 = 1;
    pub const NKQ_DEGREE_SAMPLING: u64 = 2;
    pub const TSP_PROPORTION: u64 = 3;
    pub const NKQ_RUNS_INSTANCE: u64 = 4;
    pub const NKQ_RUNS_MASTER: u64 = 5;
    pub const TSP_RUNS_INSTANCE: u64 = 6;
    pub const TSP_RUNS_MASTER: u64 = 7;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Heuristic {
    Hc,
    Ss,
    Hc2,
}

impl Heuristic {
    pub const ALL: [Heuristic; 3] = [Heuristic::Hc, Heuristic::Ss, Heuristic::Hc2];

    pub fn as_str(self) -> &'static str {
        match self {
            Heuristic::Hc => "hc",
            Heuristic::Ss => "ss",
            Heuristic::Hc2 => "hc2",
        }
    }

    pub fn parse(token: &str) -> Result<Self> {
        match token {
            "hc" => Ok(Heuristic::Hc),
            "ss" => Ok(Heuristic::Ss),
            "hc2" => Ok(Heuristic::Hc2),
            other => Err(Error::InvalidParams(format!(
                "unknown heuristic `{other}` (expected hc, ss or hc2)"
            ))),
        }
    }
}

/// Structural problem parameters; the instance seed lives in
/// [`ExperimentSpec`] so instance and run randomness stay independently
/// controllable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemParams {
    Nkq {
        n: usize,
        k: usize,
        q: u32,
        kind: LinkKind,
    },
    Tspn {
        l: u32,
        n: usize,
    },
}

impl ProblemParams {
    pub fn label(&self) -> &'static str {
        match self {
            ProblemParams::Nkq { .. } => "nkq",
            ProblemParams::Tspn { .. } => "tspn",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ExperimentSpec {
    pub problem: ProblemParams,
    pub heuristic: Heuristic,
    pub runs: u64,
    pub master_seed: u64,
    pub instance_seed: u64,
}

/// Type-erased per-run result, sufficient for every report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunRecord {
    pub run: u64,
    pub seed: u64,
    pub raw_fitness: i64,
    pub steps: u64,
    pub flat_count: u64,
    pub gate_count: u64,
    pub evaluations: u64,
}

/// Summary statistics of one experiment's final fitness values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateStats {
    pub mean: f64,
    /// Sample standard deviation (divisor `runs - 1`); 0 for a single run.
    pub stddev: f64,
    /// Best final raw fitness under the problem's direction.
    pub best: i64,
    pub mean_evaluations: f64,
}

/// Seed of run `runIndex` under `masterSeed`; injective in the run index.
pub fn derive_run_seed(master_seed: u64, run_index: u64) -> u64 {
    mix(master_seed, run_index)
}

fn run_one<L: Landscape>(
    landscape: &L,
    heuristic: Heuristic,
    s0: L::Solution,
    rng: &mut crate::rng::RunRng,
) -> SearchOutcome<L::Solution> {
    match heuristic {
        Heuristic::Hc => hill_climb(landscape, s0, rng),
        Heuristic::Ss => scuba_search(landscape, s0, rng),
        Heuristic::Hc2 => hill_climb_two_steps(landscape, s0, rng),
    }
}

fn run_one_logged<L: Landscape>(
    landscape: &L,
    heuristic: Heuristic,
    s0: L::Solution,
    rng: &mut crate::rng::RunRng,
    log: &mut Vec<LogEntry<L::Solution>>,
) -> SearchOutcome<L::Solution> {
    match heuristic {
        Heuristic::Hc => hill_climb_logged(landscape, s0, rng, Some(log)),
        Heuristic::Ss => scuba_search_logged(landscape, s0, rng, Some(log)),
        Heuristic::Hc2 => hill_climb_two_steps_logged(landscape, s0, rng, Some(log)),
    }
}

/// Executes `runs` independent searches against one shared landscape.
/// Run `i` draws its initial solution and every tie-break from a generator
/// seeded with `derive_run_seed(master_seed, i)`; results are returned in
/// run order whatever the degree of concurrency.
pub fn run_experiment_on<L: Landscape>(
    landscape: &L,
    heuristic: Heuristic,
    runs: u64,
    master_seed: u64,
) -> Vec<SearchOutcome<L::Solution>> {
    (0..runs)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(derive_run_seed(master_seed, i));
            let s0 = landscape.random_solution(&mut rng);
            run_one(landscape, heuristic, s0, &mut rng)
        })
        .collect()
}

/// [`run_experiment_on`] reduced to type-erased records.
pub fn run_records_on<L: Landscape>(
    landscape: &L,
    heuristic: Heuristic,
    runs: u64,
    master_seed: u64,
) -> Vec<RunRecord> {
    run_experiment_on(landscape, heuristic, runs, master_seed)
        .into_iter()
        .enumerate()
        .map(|(i, out)| to_record(i as u64, master_seed, &out))
        .collect()
}

fn to_record<S>(run: u64, master_seed: u64, out: &SearchOutcome<S>) -> RunRecord {
    RunRecord {
        run,
        seed: derive_run_seed(master_seed, run),
        raw_fitness: out.fitness.0,
        steps: out.steps,
        flat_count: out.flat_count,
        gate_count: out.gate_count,
        evaluations: out.evaluations,
    }
}

/// A built instance for a spec, dispatching over the problem family.
pub enum BuiltInstance {
    Nkq(NkqInstance),
    Tspn(LatticeInstance),
}

pub fn build_instance(spec: &ExperimentSpec) -> Result<BuiltInstance> {
    match spec.problem {
        ProblemParams::Nkq { n, k, q, kind } => Ok(BuiltInstance::Nkq(NkqInstance::build(
            NkqParams {
                n,
                k,
                q,
                kind,
                seed: spec.instance_seed,
            },
        )?)),
        ProblemParams::Tspn { l, n } => {
            Ok(BuiltInstance::Tspn(LatticeInstance::build(l, n, spec.instance_seed)?))
        }
    }
}

/// Builds the spec's instance once and executes all runs.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<RunRecord>> {
    Ok(match build_instance(spec)? {
        BuiltInstance::Nkq(inst) => {
            run_records_on(&inst, spec.heuristic, spec.runs, spec.master_seed)
        }
        BuiltInstance::Tspn(inst) => {
            run_records_on(&inst, spec.heuristic, spec.runs, spec.master_seed)
        }
    })
}

/// A type-erased trace entry of one accepted move.
#[derive(Debug, Clone)]
pub struct TraceRecord {
    pub run: u64,
    pub index: u64,
    pub kind: crate::search::MoveKind,
    pub fitness_before: i64,
    pub fitness_after: i64,
    pub evaluations: u64,
}

/// [`run_records_on`] plus one trace record per accepted move of every run.
pub fn run_records_traced_on<L: Landscape>(
    landscape: &L,
    heuristic: Heuristic,
    runs: u64,
    master_seed: u64,
) -> (Vec<RunRecord>, Vec<TraceRecord>) {
    let per_run: Vec<(RunRecord, Vec<TraceRecord>)> = (0..runs)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(derive_run_seed(master_seed, i));
            let s0 = landscape.random_solution(&mut rng);
            let mut log = Vec::new();
            let out = run_one_logged(landscape, heuristic, s0, &mut rng, &mut log);
            let trace = log
                .iter()
                .enumerate()
                .map(|(m, e)| TraceRecord {
                    run: i,
                    index: m as u64,
                    kind: e.kind,
                    fitness_before: e.fitness_before.0,
                    fitness_after: e.fitness_after.0,
                    evaluations: e.evaluations,
                })
                .collect();
            (to_record(i, master_seed, &out), trace)
        })
        .collect();
    let mut records = Vec::with_capacity(per_run.len());
    let mut traces = Vec::new();
    for (r, t) in per_run {
        records.push(r);
        traces.extend(t);
    }
    (records, traces)
}

/// Like [`run_experiment`], additionally collecting one trace record per
/// accepted move of every run.
pub fn run_experiment_traced(spec: &ExperimentSpec) -> Result<(Vec<RunRecord>, Vec<TraceRecord>)> {
    Ok(match build_instance(spec)? {
        BuiltInstance::Nkq(inst) => {
            run_records_traced_on(&inst, spec.heuristic, spec.runs, spec.master_seed)
        }
        BuiltInstance::Tspn(inst) => {
            run_records_traced_on(&inst, spec.heuristic, spec.runs, spec.master_seed)
        }
    })
}

/// Mean, sample standard deviation, direction-aware best and mean evaluation
/// count over a nonempty record set. Computed from exact integer sums, so
/// the result is independent of record order.
pub fn aggregate(direction: Direction, records: &[RunRecord]) -> Result<AggregateStats> {
    if records.is_empty() {
        return Err(Error::EmptyAggregate);
    }
    let n = records.len() as i128;
    let sum: i128 = records.iter().map(|r| i128::from(r.raw_fitness)).sum();
    let sum_sq: i128 = records
        .iter()
        .map(|r| i128::from(r.raw_fitness) * i128::from(r.raw_fitness))
        .sum();
    let mean = sum as f64 / n as f64;
    let stddev = if records.len() < 2 {
        0.0
    } else {
        let num = n * sum_sq - sum * sum;
        (num as f64 / (n * (n - 1)) as f64).max(0.0).sqrt()
    };
    let best = records
        .iter()
        .map(|r| r.raw_fitness)
        .reduce(|a, b| match direction {
            Direction::Maximize => a.max(b),
            Direction::Minimize => a.min(b),
        })
        .expect("nonempty");
    let eval_sum: u128 = records.iter().map(|r| u128::from(r.evaluations)).sum();
    Ok(AggregateStats {
        mean,
        stddev,
        best,
        mean_evaluations: eval_sum as f64 / n as f64,
    })
}

/// Neutral-degree grid over `(q, k)` cells, one fresh instance per cell
/// (Table 1 layout). Returns `neutral_degree` schema rows.
pub fn neutral_degree_rows(
    n: usize,
    qs: &[u32],
    ks: &[usize],
    samples: usize,
    seed: u64,
) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for &q in qs {
        for &k in ks {
            let params = NkqParams {
                n,
                k,
                q,
                kind: LinkKind::Random,
                seed: mix_all(seed, &[tag::NKQ_DEGREE_INSTANCE, u64::from(q), k as u64]),
            };
            let sample_seed = mix_all(seed, &[tag::NKQ_DEGREE_SAMPLING, u64::from(q), k as u64]);
            let mean = nkq::sample_neutral_degree(params, samples, sample_seed)?;
            rows.push(vec![
                Field::Str("nkq".into()),
                Field::Int(i64::from(q)),
                Field::Int(k as i64),
                Field::Empty,
                Field::Uint(samples as u64),
                Field::Fixed(mean, 2),
            ]);
        }
    }
    Ok(rows)
}

/// Neutral-proportion series over lattice sizes (Figure 1 layout). Returns
/// `neutral_proportion` schema rows.
pub fn neutral_proportion_rows(
    n: usize,
    ls: &[u32],
    samples: usize,
    seed: u64,
) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for &l in ls {
        let cell_seed = mix_all(seed, &[tag::TSP_PROPORTION, u64::from(l)]);
        let proportion = tsp::sample_neutral_proportion(l, n, samples, cell_seed)?;
        rows.push(vec![
            Field::Str("tspn".into()),
            Field::Empty,
            Field::Empty,
            Field::Int(i64::from(l)),
            Field::Uint(samples as u64),
            Field::Fixed(proportion, 6),
        ]);
    }
    Ok(rows)
}

/// One results row per `(q, k, heuristic)` cell on NKq. All heuristics of a
/// cell share the instance and the per-run seeds, so comparisons are paired.
/// Fitness columns are normalized to [0, 1].
pub fn nkq_results_rows(
    n: usize,
    qs: &[u32],
    ks: &[usize],
    kind: LinkKind,
    runs: u64,
    seed: u64,
) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for &q in qs {
        for &k in ks {
            let instance_seed = mix_all(seed, &[tag::NKQ_RUNS_INSTANCE, u64::from(q), k as u64]);
            let master_seed = mix_all(seed, &[tag::NKQ_RUNS_MASTER, u64::from(q), k as u64]);
            let instance = NkqInstance::build(NkqParams {
                n,
                k,
                q,
                kind,
                seed: instance_seed,
            })?;
            let max_raw = instance.max_raw() as f64;
            for h in Heuristic::ALL {
                let records = run_records_on(&instance, h, runs, master_seed);
                let stats = aggregate(Direction::Maximize, &records)?;
                rows.push(vec![
                    Field::Str("nkq".into()),
                    Field::Int(i64::from(q)),
                    Field::Int(k as i64),
                    Field::Empty,
                    Field::Str(h.as_str().into()),
                    Field::Uint(runs),
                    Field::Fixed(stats.mean / max_raw, 4),
                    Field::Fixed(stats.stddev / max_raw, 4),
                    Field::Fixed(stats.best as f64 / max_raw, 4),
                    Field::Fixed(stats.mean_evaluations, 2),
                ]);
            }
        }
    }
    Ok(rows)
}

/// One results row per `(l, heuristic)` cell on TSPn; lengths stay in raw
/// lattice units.
pub fn tspn_results_rows(n: usize, ls: &[u32], runs: u64, seed: u64) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for &l in ls {
        let instance_seed = mix_all(seed, &[tag::TSP_RUNS_INSTANCE, u64::from(l)]);
        let master_seed = mix_all(seed, &[tag::TSP_RUNS_MASTER, u64::from(l)]);
        let instance = LatticeInstance::build(l, n, instance_seed)?;
        for h in Heuristic::ALL {
            let records = run_records_on(&instance, h, runs, master_seed);
            let stats = aggregate(Direction::Minimize, &records)?;
            rows.push(vec![
                Field::Str("tspn".into()),
                Field::Empty,
                Field::Empty,
                Field::Int(i64::from(l)),
                Field::Str(h.as_str().into()),
                Field::Uint(runs),
                Field::Fixed(stats.mean, 2),
                Field::Fixed(stats.stddev, 2),
                Field::Int(stats.best),
                Field::Fixed(stats.mean_evaluations, 2),
            ]);
        }
    }
    Ok(rows)
}
