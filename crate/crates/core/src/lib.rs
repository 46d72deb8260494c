//! Adversary lower bounds for quantum query problems.
//!
//! The crate builds additive, hybrid and multiplicative adversary bounds for
//! explicitly enumerated oracle problems, reduces them with symmetric-group
//! representation theory, and checks the reductions against brute force and a
//! statevector simulator.

pub mod bounds;
pub mod delta;
pub mod matrix;
pub mod problems;
pub mod products;
pub mod report;
pub mod rng;
pub mod simulator;
pub mod suite;
pub mod symmetry;
pub mod young;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite matrix entry at ({0}, {1})")]
    NonFinite(usize, usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not Hermitian (asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("eigendecomposition did not converge")]
    NoConvergence,
    #[error("matrix is not positive semidefinite (eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("matrix is singular (smallest eigenvalue {0:.3e})")]
    Singular(f64),
    #[error("projectors do not resolve the identity: {0}")]
    NotResolution(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid adversary matrix: {0}")]
    InvalidAdversary(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{what} has size {size}, above the limit {limit}")]
    TooLarge {
        what: String,
        size: usize,
        limit: usize,
    },
    #[error("decomposition failed: {0}")]
    Decomposition(String),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("no progress possible: {0}")]
    NoProgress(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn too_large(what: &str, size: usize, limit: usize) -> Error {
    Error::TooLarge {
        what: what.to_string(),
        size,
        limit,
    }
}

/// Maps `f` over `0..n`, in parallel when the `parallel` feature is on.
/// Results keep index order, so reductions over them are deterministic.
pub(crate) fn par_map<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}
