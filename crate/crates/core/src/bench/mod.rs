//! Built-in problems, problem files, table reproduction and reports.

pub mod catalog;
pub mod file;
pub mod report;
pub mod table;

use rayon::prelude::*;
use thiserror::Error;

use crate::funcspace::FuncError;
use crate::ham::HamError;
use crate::tuner::TuneError;

pub use catalog::{builtin, Builtin, CatalogError, ReferenceRow, ReferenceTable};
pub use file::{FileError, ProblemFile};
pub use table::{reproduce, BenchOptions, Cell, Check, Row, TableReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BenchError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Ham(#[from] HamError),
    #[error(transparent)]
    Tune(#[from] TuneError),
    #[error(transparent)]
    Func(#[from] FuncError),
    #[error("example {id}:{variant} has neither a reference table nor an exact solution")]
    NoReference { id: u32, variant: String },
}

/// The variants `bench --all` reproduces: every reference table plus the
/// exactly solvable polynomial example.
pub const BENCH_TARGETS: [(u32, &str); 9] = [
    (1, "k1"),
    (1, "k2"),
    (2, "v1"),
    (2, "v2"),
    (3, "exact"),
    (4, "table"),
    (5, "table"),
    (6, "table"),
    (7, "table"),
];

/// Reproduces `targets` in parallel; results keep the input order.
pub fn run_targets(
    targets: &[(u32, &str)],
    opts: &BenchOptions,
) -> Vec<Result<TableReport, BenchError>> {
    targets
        .par_iter()
        .map(|&(id, v)| reproduce(&builtin(id, Some(v))?, opts))
        .collect()
}
