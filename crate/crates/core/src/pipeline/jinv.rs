//! Pairing the real roots of `P(A)` with Hecke pseudo-lattices by embedding.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contfrac::{locate, unit_from_matrix, HeckeUnit, JPState, JpError};
use crate::exact::{AlgebraicReal, IntMatrix};
use crate::pseudolattice::{slope, PseudoLattice};

#[derive(Debug, Error)]
pub enum JInvariantError {
    #[error("{lattices} lattices but P(A) has {roots} distinct real roots")]
    CountMismatch { roots: usize, lattices: usize },
    #[error("no lattices given")]
    Empty,
    #[error("lattice {0} is not in a conjugate embedding of the first lattice's field")]
    NotConjugate(usize),
    #[error("embeddings {0} and {1} give the same root of P(A)")]
    NotBijective(usize, usize),
    #[error("period matrix must be 2x2 for rank-2 lattices, got {0}x{0}")]
    Dimension(usize),
    #[error(transparent)]
    Jp(#[from] JpError),
}

/// `j(m_i) = lambda_i`, with `root_index` the position of `lambda_i` among the increasing real roots of `P(A)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JPair {
    pub lattice: usize,
    pub root_index: usize,
    pub lambda: AlgebraicReal,
}

/// j-invariants from a 2x2 period matrix and rank-2 lattices; the Perron root is
/// taken against the slope of the first lattice.
pub fn j_invariants(a: &IntMatrix, lattices: &[PseudoLattice]) -> Result<Vec<JPair>, JInvariantError> {
    if a.nrows() != 2 {
        return Err(JInvariantError::Dimension(a.nrows()));
    }
    let first = lattices.first().ok_or(JInvariantError::Empty)?;
    let state = JPState::new(vec![slope(first)])?;
    let unit = unit_from_matrix(a, &state)?;
    j_invariants_from_unit(&unit, lattices)
}

/// `lambda_i = sigma_i(lambda_A)` where `sigma_i` moves the first lattice's embedding to the `i`-th one.
pub fn j_invariants_from_unit(unit: &HeckeUnit, lattices: &[PseudoLattice]) -> Result<Vec<JPair>, JInvariantError> {
    if lattices.is_empty() {
        return Err(JInvariantError::Empty);
    }
    let roots = unit.conjugates.len();
    if lattices.len() > roots {
        return Err(JInvariantError::CountMismatch {
            roots,
            lattices: lattices.len(),
        });
    }
    let base = unit.value.field();
    let mut out: Vec<JPair> = Vec::with_capacity(lattices.len());
    for (i, m) in lattices.iter().enumerate() {
        if m.field().poly() != base.poly() {
            return Err(JInvariantError::NotConjugate(i));
        }
        let lambda = unit.value.with_field(m.field());
        let root_index = locate(&lambda, &unit.conjugates, &unit.char_poly);
        if let Some(prev) = out.iter().find(|p| p.root_index == root_index) {
            return Err(JInvariantError::NotBijective(prev.lattice, i));
        }
        out.push(JPair {
            lattice: i,
            root_index,
            lambda,
        });
    }
    Ok(out)
}
