//! `scuba` — benchmark CLI over the NKq and diluted-lattice TSP landscapes.
//!
//! Every subcommand is deterministic in its flags: the same invocation
//! produces byte-identical CSV, whatever `--workers` says.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use scuba_core::bench::{self, ExperimentSpec, Heuristic, ProblemParams};
use scuba_core::csv::{self, Field, Row};
use scuba_core::nkq::{LinkKind, NkqInstance, NkqParams};
use scuba_core::rng::mix_all;
use scuba_core::tsp::LatticeInstance;

/// Stream tag for deriving an instance seed from `--seed` when
/// `--instance-seed` is not given.
const RUN_INSTANCE_TAG: u64 = 8;

#[derive(Parser)]
#[command(name = "scuba", about = "Neutrality-aware local search benchmarks", version)]
struct Cli {
    /// Worker threads (0 = one per core). Output bytes do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,

    /// Write CSV (or the generated instance) here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Adjacent,
    Random,
}

impl From<KindArg> for LinkKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Adjacent => LinkKind::Adjacent,
            KindArg::Random => LinkKind::Random,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum HeuristicArg {
    Hc,
    Ss,
    Hc2,
}

impl From<HeuristicArg> for Heuristic {
    fn from(h: HeuristicArg) -> Self {
        match h {
            HeuristicArg::Hc => Heuristic::Hc,
            HeuristicArg::Ss => Heuristic::Ss,
            HeuristicArg::Hc2 => Heuristic::Hc2,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Mean neutral degree over the (q, K) grid on NKq.
    Table1 {
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 50_000)]
        samples: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Mean proportion of neutral 2-opt neighbors per lattice size.
    Fig1 {
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 50_000)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_value = "10,20,30,100")]
        l: Vec<u32>,
    },
    /// Mean final fitness per heuristic as a function of K, at one q.
    Fig2 {
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long)]
        q: u32,
        #[arg(long, value_delimiter = ',', default_value = "0,2,4,8,12,16")]
        k: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        runs: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = KindArg::Random)]
        kind: KindArg,
    },
    /// Tour-length statistics per heuristic per lattice size.
    Table2 {
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_value = "10,20,30,100")]
        l: Vec<u32>,
        #[arg(long, default_value_t = 500)]
        runs: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Evaluation counts per heuristic over the (q, K) grid on NKq.
    Table3 {
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,100")]
        q: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_value = "0,2,4,8,12,16")]
        k: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        runs: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = KindArg::Random)]
        kind: KindArg,
    },
    /// Evaluation counts per heuristic per lattice size.
    Table4 {
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_value = "10,20,30,100")]
        l: Vec<u32>,
        #[arg(long, default_value_t = 500)]
        runs: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Raw per-run results for one experiment.
    Run(RunArgs),
    /// Write an instance file for later reuse.
    Gen {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Args)]
struct ProblemArgs {
    /// Problem family: nkq or tspn.
    #[arg(long)]
    problem: String,
    /// Locus count (nkq) or city count (tspn).
    #[arg(long)]
    n: Option<usize>,
    /// Epistasis degree (nkq).
    #[arg(long)]
    k: Option<usize>,
    /// Component value count (nkq).
    #[arg(long)]
    q: Option<u32>,
    #[arg(long, value_enum, default_value_t = KindArg::Random)]
    kind: KindArg,
    /// Lattice side (tspn).
    #[arg(long)]
    l: Option<u32>,
}

impl ProblemArgs {
    fn to_params(&self) -> Result<ProblemParams> {
        match self.problem.as_str() {
            "nkq" => {
                let n = self.n.context("--n is required for nkq")?;
                let k = self.k.context("--k is required for nkq")?;
                let q = self.q.context("--q is required for nkq")?;
                Ok(ProblemParams::Nkq {
                    n,
                    k,
                    q,
                    kind: self.kind.into(),
                })
            }
            "tspn" => {
                let l = self.l.context("--l is required for tspn")?;
                let n = self.n.context("--n is required for tspn")?;
                Ok(ProblemParams::Tspn { l, n })
            }
            other => bail!("unknown problem `{other}` (expected nkq or tspn)"),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Inline problem parameters; alternatively load `--instance`.
    #[command(flatten)]
    problem: Option<ProblemArgs>,
    /// Instance file written by `gen` (family inferred from the header).
    #[arg(long, conflicts_with = "problem")]
    instance: Option<PathBuf>,
    #[arg(long, value_enum)]
    heuristic: HeuristicArg,
    #[arg(long)]
    runs: u64,
    /// Master seed for the runs.
    #[arg(long)]
    seed: u64,
    /// Instance seed; defaults to a stream derived from --seed.
    #[arg(long)]
    instance_seed: Option<u64>,
    /// Write one CSV record per accepted move here.
    #[arg(long)]
    trace: Option<PathBuf>,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let workers = cli.workers;
    let run_all = || dispatch(&cli);
    if workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .context("building worker pool")?
            .install(run_all)
    } else {
        run_all()
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.cmd {
        Cmd::Table1 { n, samples, seed } => {
            let rows =
                bench::neutral_degree_rows(*n, &[2, 3, 4, 100], &[0, 2, 4, 8, 12, 16], *samples, *seed)?;
            write_csv(cli, &csv::NEUTRAL_DEGREE, &rows)
        }
        Cmd::Fig1 {
            n,
            samples,
            seed,
            l,
        } => {
            let rows = bench::neutral_proportion_rows(*n, l, *samples, *seed)?;
            write_csv(cli, &csv::NEUTRAL_PROPORTION, &rows)
        }
        Cmd::Fig2 {
            n,
            q,
            k,
            runs,
            seed,
            kind,
        } => {
            let rows = bench::nkq_results_rows(*n, &[*q], k, (*kind).into(), *runs, *seed)?;
            write_csv(cli, &csv::RESULTS, &rows)
        }
        Cmd::Table2 { n, l, runs, seed } => {
            let rows = bench::tspn_results_rows(*n, l, *runs, *seed)?;
            write_csv(cli, &csv::RESULTS, &rows)
        }
        Cmd::Table3 {
            n,
            q,
            k,
            runs,
            seed,
            kind,
        } => {
            let rows = bench::nkq_results_rows(*n, q, k, (*kind).into(), *runs, *seed)?;
            write_csv(cli, &csv::RESULTS, &rows)
        }
        Cmd::Table4 { n, l, runs, seed } => {
            let rows = bench::tspn_results_rows(*n, l, *runs, *seed)?;
            write_csv(cli, &csv::RESULTS, &rows)
        }
        Cmd::Run(args) => run_cmd(cli, args),
        Cmd::Gen { problem, seed } => gen_cmd(cli, problem, *seed),
    }
}

fn run_cmd(cli: &Cli, args: &RunArgs) -> Result<()> {
    let heuristic: Heuristic = args.heuristic.into();

    // Resolve the instance: either from a file or from inline parameters.
    let (label, instance, normalizer) = if let Some(path) = &args.instance {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        match text.lines().next().map(str::trim) {
            Some("NKQ 1") => {
                let inst = NkqInstance::from_file_string(&text)?;
                let max = inst.max_raw() as f64;
                ("nkq", bench::BuiltInstance::Nkq(inst), Some(max))
            }
            Some("TSPN 1") => {
                let inst = LatticeInstance::from_file_string(&text)?;
                ("tspn", bench::BuiltInstance::Tspn(inst), None)
            }
            _ => bail!("unrecognized instance header in {}", path.display()),
        }
    } else {
        let problem = args
            .problem
            .as_ref()
            .context("either --problem or --instance is required")?
            .to_params()?;
        let instance_seed = args
            .instance_seed
            .unwrap_or_else(|| mix_all(args.seed, &[RUN_INSTANCE_TAG]));
        let spec = ExperimentSpec {
            problem,
            heuristic,
            runs: args.runs,
            master_seed: args.seed,
            instance_seed,
        };
        let built = bench::build_instance(&spec)?;
        let normalizer = match &built {
            bench::BuiltInstance::Nkq(i) => Some(i.max_raw() as f64),
            bench::BuiltInstance::Tspn(_) => None,
        };
        (spec.problem.label(), built, normalizer)
    };

    let (records, traces) = match &instance {
        bench::BuiltInstance::Nkq(inst) => {
            collect_runs(inst, heuristic, args.runs, args.seed, args.trace.is_some())
        }
        bench::BuiltInstance::Tspn(inst) => {
            collect_runs(inst, heuristic, args.runs, args.seed, args.trace.is_some())
        }
    };

    if let Some(path) = &args.trace {
        let trace_rows: Vec<Row> = traces
            .iter()
            .map(|t| {
                vec![
                    Field::Uint(t.run),
                    Field::Uint(t.index),
                    Field::Str(t.kind.as_str().into()),
                    Field::Int(t.fitness_before),
                    Field::Int(t.fitness_after),
                    Field::Uint(t.evaluations),
                ]
            })
            .collect();
        std::fs::write(path, csv::emit(&csv::TRACE, &trace_rows)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }

    let rows: Vec<Row> = records
        .iter()
        .map(|r| {
            let fitness = match normalizer {
                Some(max) => Field::Fixed(r.raw_fitness as f64 / max, 4),
                None => Field::Int(r.raw_fitness),
            };
            vec![
                Field::Str(label.into()),
                Field::Str(heuristic.as_str().into()),
                Field::Uint(r.run),
                Field::Uint(r.seed),
                Field::Int(r.raw_fitness),
                fitness,
                Field::Uint(r.steps),
                Field::Uint(r.flat_count),
                Field::Uint(r.gate_count),
                Field::Uint(r.evaluations),
            ]
        })
        .collect();
    write_csv(cli, &csv::RUNS, &rows)
}

fn collect_runs<L: scuba_core::Landscape>(
    instance: &L,
    heuristic: Heuristic,
    runs: u64,
    master_seed: u64,
    traced: bool,
) -> (Vec<bench::RunRecord>, Vec<bench::TraceRecord>) {
    if traced {
        bench::run_records_traced_on(instance, heuristic, runs, master_seed)
    } else {
        (
            bench::run_records_on(instance, heuristic, runs, master_seed),
            Vec::new(),
        )
    }
}

fn gen_cmd(cli: &Cli, problem: &ProblemArgs, seed: u64) -> Result<()> {
    let out = cli
        .out
        .as_ref()
        .context("gen requires --out FILE for the instance")?;
    match problem.to_params()? {
        ProblemParams::Nkq { n, k, q, kind } => {
            let inst = NkqInstance::build(NkqParams { n, k, q, kind, seed })?;
            inst.write_to_path(out)?;
        }
        ProblemParams::Tspn { l, n } => {
            let inst = LatticeInstance::build(l, n, seed)?;
            inst.write_to_path(out)?;
        }
    }
    Ok(())
}

fn write_csv(cli: &Cli, schema: &csv::Schema, rows: &[Row]) -> Result<()> {
    let text = csv::emit(schema, rows)?;
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}
