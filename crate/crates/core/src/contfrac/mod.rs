//! Classical and Jacobi-Perron continued fractions, period matrices and Hecke units.

mod cf;
mod jp;

pub(crate) use jp::locate;
pub use cf::{cf_expand, cf_value, CfExpansion, QuadraticSurd};
pub use jp::{
    abs, convergence_errors, digit_matrix, hecke_unit, jp_expand, jp_step, unit_from_matrix,
    verify_perron_eigenvector, HeckeUnit, JPState, JacobiPerronExpansion, JpStatus,
};

use thiserror::Error;

use crate::exact::ExactError;

/// Default bound on Jacobi-Perron steps.
pub const DEFAULT_MAX_STEPS: usize = 2000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JpError {
    #[error("expansion terminates: rational input or vanishing fractional part")]
    DegenerateRational,
    #[error("expected a quadratic irrational, got degree {0}")]
    WrongDegree(usize),
    #[error("expansion is not periodic")]
    NotPeriodic,
    #[error("period matrix has no real root above 1 matching the eigenvector")]
    NoPerronRoot,
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}
