//! Deterministic CSV emission for the benchmark subcommands.
//!
//! Each named schema fixes a header and a sort key; rows are sorted before
//! writing, numbers are formatted with fixed precision, so a given row set
//! always produces identical bytes regardless of generation order or worker
//! count.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// A named CSV schema: header fields plus the indices of the key columns
/// rows are ordered by.
#[derive(Debug, Clone, Copy)]
pub struct Schema {
    pub name: &'static str,
    pub header: &'static [&'static str],
    pub key_columns: &'static [usize],
}

/// Field values keep their natural type until emission so key columns sort
/// numerically, not lexically.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Int(i64),
    /// Unsigned counter (seeds, run indices).
    Uint(u64),
    /// Fixed-precision decimal: (value, digits after the point).
    Fixed(f64, usize),
    Str(String),
    /// Not applicable in this row; rendered empty.
    Empty,
}

impl Field {
    fn render(&self) -> String {
        match self {
            Field::Int(v) => v.to_string(),
            Field::Uint(v) => v.to_string(),
            Field::Fixed(v, digits) => format!("{v:.digits$}"),
            Field::Str(s) => s.clone(),
            Field::Empty => String::new(),
        }
    }

    fn sort_cmp(&self, other: &Field) -> Ordering {
        use Field::*;
        match (self, other) {
            (Int(a), Int(b)) => a.cmp(b),
            (Uint(a), Uint(b)) => a.cmp(b),
            (Fixed(a, _), Fixed(b, _)) => a.partial_cmp(b).unwrap_or(Ordering::Equal),
            (Str(a), Str(b)) => a.cmp(b),
            (Empty, Empty) => Ordering::Equal,
            // Empty fields sort before populated ones; mixed numeric kinds
            // compare by rendering, which never happens within one schema.
            (Empty, _) => Ordering::Less,
            (_, Empty) => Ordering::Greater,
            (a, b) => a.render().cmp(&b.render()),
        }
    }
}

/// One CSV record; field count must match the schema it is emitted under.
pub type Row = Vec<Field>;

pub const NEUTRAL_DEGREE: Schema = Schema {
    name: "neutral_degree",
    header: &["problem", "q", "k", "l", "samples", "mean_degree"],
    key_columns: &[0, 1, 2, 3],
};

pub const NEUTRAL_PROPORTION: Schema = Schema {
    name: "neutral_proportion",
    header: &["problem", "q", "k", "l", "samples", "mean_proportion"],
    key_columns: &[0, 1, 2, 3],
};

// The heuristic column is deliberately not a key: rows are generated in
// hc, ss, hc2 order per cell and the sort is stable.
pub const RESULTS: Schema = Schema {
    name: "results",
    header: &[
        "problem",
        "q",
        "k",
        "l",
        "heuristic",
        "runs",
        "mean_fitness",
        "stddev_fitness",
        "best_fitness",
        "mean_evaluations",
    ],
    key_columns: &[0, 1, 2, 3],
};

pub const RUNS: Schema = Schema {
    name: "runs",
    header: &[
        "problem",
        "heuristic",
        "run",
        "seed",
        "raw_fitness",
        "fitness",
        "steps",
        "flat_count",
        "gate_count",
        "evaluations",
    ],
    key_columns: &[0, 1, 2],
};

pub const TRACE: Schema = Schema {
    name: "trace",
    header: &[
        "run",
        "move",
        "kind",
        "fitness_before",
        "fitness_after",
        "evaluations",
    ],
    key_columns: &[0, 1],
};

/// Renders `rows` under `schema`: header line, then one sorted record per
/// row. Errors if any row's field count differs from the header's.
pub fn emit(schema: &Schema, rows: &[Row]) -> Result<String> {
    for row in rows {
        if row.len() != schema.header.len() {
            return Err(Error::SchemaMismatch {
                schema: schema.name,
                expected: schema.header.len(),
                got: row.len(),
            });
        }
    }
    let mut ordered: Vec<&Row> = rows.iter().collect();
    ordered.sort_by(|a, b| {
        schema
            .key_columns
            .iter()
            .map(|&c| a[c].sort_cmp(&b[c]))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    });
    let mut out = String::new();
    out.push_str(&schema.header.join(","));
    out.push('\n');
    for row in ordered {
        let fields: Vec<String> = row.iter().map(Field::render).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Splits emitted text back into records (fields never contain commas).
pub fn parse(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}
