//! Exact norm engine and experiment harness for a Banach space whose norm is
//! induced by a recursively generated set of functionals on finitely
//! supported rational vectors.
//!
//! The functional set contains the signed unit vectors and is closed under
//! two forming rules: scaled averages of successively supported functionals,
//! and Schreier-style sums of average functionals subject to admissibility
//! and very-fast-growth constraints. All arithmetic is exact; no floating
//! point enters any computed value.
//!
//! Module map:
//! * [`rat`], [`vector`], [`space`], [`tree`], [`validate`], [`class`]:
//!   core types, tree evaluation, restriction, membership checking, and the
//!   text formats.
//! * [`engine`]: exact norm and constrained best-value computation with
//!   certifying witnesses, plus an independent brute-force enumeration
//!   oracle.
//! * [`index_lab`]: quantified index surrogate sweeps and the averaging
//!   bound check.
//! * [`seq_lab`]: block sequence construction, index selection, sandwich,
//!   spreading, asymptotic-model and symmetry experiments.

pub mod class;
pub mod engine;
pub mod index_lab;
pub mod rat;
pub mod report;
pub mod seq_lab;
pub mod space;
pub mod tree;
pub mod validate;
pub mod vector;

pub use class::NodeClass;
pub use rat::Rat;
pub use space::SpaceSpec;
pub use tree::{FunctionalTree, Sign};
pub use validate::{validate, ValidationReport, Violation, ViolationKind};
pub use vector::FinVec;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error (line {line}): {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid tree at node {path}: {msg}")]
    InvalidTree { path: String, msg: String },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty class: {0}")]
    EmptyFamily(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("member {index} has norm {norm}, expected 1/1")]
    NotNormalized { index: usize, norm: String },

    #[error("not a block sequence: member {index} does not start past member {prev}")]
    NotBlock { prev: usize, index: usize },

    #[error("sequences not interleaved at pair {pair}")]
    NotInterleaved { pair: usize },

    #[error("invalid index family: {0}")]
    BadFamily(String),

    #[error("selection exhausted on row {row}: {reason}")]
    Exhausted { row: usize, reason: String },

    #[error("node budget {budget} exceeded")]
    ResourceBudget { budget: u64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for this error class: 2 for bad input or violated
    /// preconditions, 1 for failed checks and exhausted searches, 3 for
    /// resource aborts.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Exhausted { .. } => 1,
            Error::ResourceBudget { .. } => 3,
            Error::Io(_) => 2,
            _ => 2,
        }
    }
}
