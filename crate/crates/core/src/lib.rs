//! Scuba search and hill-climbing baselines on landscapes with tunable
//! neutrality.
//!
//! The crate provides:
//!
//! * [`landscape`] — direction-aware fitness/neighborhood contracts and the
//!   neutrality and evolvability primitives built on them;
//! * [`nkq`] — NKq fitness landscapes over bit strings (`q` tunes
//!   neutrality, `K` ruggedness);
//! * [`tsp`] — travelling salesman on randomly diluted lattices with the
//!   Manhattan metric and a canonical 2-opt neighborhood;
//! * [`search`] — hill climbing, two-step hill climbing and scuba search,
//!   with exact evaluation accounting and reproducible tie-breaking;
//! * [`bench`] — deterministic experiment orchestration and aggregation;
//! * [`csv`] — fixed-schema CSV emission for the benchmark CLI.
//!
//! Everything is deterministic in the seeds: one experiment specification
//! reproduces byte-identical reports no matter how many worker threads run
//! it.

pub mod bench;
pub mod csv;
pub mod error;
pub mod landscape;
pub mod nkq;
pub mod rng;
pub mod search;
pub mod testutil;
pub mod tsp;

pub use error::{Error, Result};
pub use landscape::{Direction, EvalCounter, Landscape, RawFitness};
pub use search::{MoveKind, SearchOutcome};
