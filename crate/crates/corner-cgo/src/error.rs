//! Error taxonomy shared by all modules.
//!
//! The CLI maps these onto process exit codes: configuration/validation
//! problems exit 2, numerical non-convergence exits 3, and failed
//! checks/assertions exit 4.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An evaluation point or parameter violates a mathematical
    /// precondition (origin input, branch cut, aperture out of range, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A structural problem with inputs: mismatched grids, bad node
    /// counts, invalid exponents.
    #[error("configuration error: {0}")]
    Config(String),

    /// A numerical procedure failed to reach its tolerance.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// The Neumann iteration's terms grew for several consecutive steps;
    /// the contraction requires a smaller h.
    #[error("h too large: series term norms grew for {consecutive} consecutive iterations (h = {h}, last term norm {last_norm:.3e})")]
    HTooLarge {
        h: f64,
        consecutive: usize,
        last_norm: f64,
    },

    /// The Neumann iteration ran out of its iteration budget. The partial
    /// sum accumulated so far is preserved for diagnostics.
    #[error("non-convergence: {iterations} iterations, last term norm {last_norm:.3e} (tolerance target {tol:.1e})")]
    NonConvergence {
        iterations: usize,
        last_norm: f64,
        tol: f64,
        partial: Vec<num_complex::Complex64>,
    },

    /// A self-check (witness identity, fixture verdict, lemma sweep)
    /// did not hold.
    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("report write error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI contract.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Config(_) | Error::Parse(_) => 2,
            Error::Numerical(_) | Error::HTooLarge { .. } | Error::NonConvergence { .. } => 3,
            Error::CheckFailed(_) => 4,
            Error::Io(_) | Error::Csv(_) => 3,
        }
    }
}
