//! Numerical kernel shared by the simulator: dense complex matrices, random
//! streams, special functions, eigen and least-squares routines.

mod eigen;
mod matrix;
mod qr;
mod rng;
mod special;

#[cfg(test)]
pub(crate) mod oracle;

use thiserror::Error;

pub use eigen::principal_eigenvector;
pub use matrix::{dot, norm, ComplexMatrix};
pub use qr::{left_pseudo_inverse, QrFactorization, ZeroForcing, MAX_CONDITION};
pub use rng::{sample_complex_gaussian, RandomStream};
pub use special::{integrate, mpsk_sep_exact, q_function};

pub(crate) use special::check_psk_order;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MathError {
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian")]
    NotHermitian,
    #[error("matrix is rank deficient (condition estimate {condition:e})")]
    RankDeficient { condition: f64 },
    #[error("iteration did not converge after {iterations} steps")]
    NoConvergence { iterations: usize },
    #[error("{0}")]
    InvalidArgument(String),
}
