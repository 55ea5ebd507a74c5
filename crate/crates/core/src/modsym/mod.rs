//! Weight-2 modular symbols for Gamma_0(N): the cuspidal plus-subspace,
//! Hecke operators, Galois orbits of eigenforms, and exact eigenvectors.

mod orbits;
pub mod p1;
mod space;

pub use orbits::{
    eigen_orbits, eigen_orbits_with, eigenvector_lattice, flag_oldforms, EigenOrbit, EigenVector, OrbitSummary,
    SeparatingOperator, DEFAULT_POSITIVITY_BOUNDS,
};
pub use space::{commutes_with_star, heilbronn_merel, star_is_involution, ModularSymbolSpace};

use thiserror::Error;

use crate::exact::ExactError;

#[derive(Debug, Error)]
pub enum ModsymError {
    #[error("level must be positive, got {0}")]
    InvalidLevel(i64),
    #[error("Hecke index must be positive, got {0}")]
    InvalidIndex(i64),
    #[error("operator does not preserve the cuspidal plus-subspace")]
    NotInvariant,
    #[error("operator is not integral on the plus-subspace basis")]
    NonIntegral,
    #[error("no separating operator among {tried:?}")]
    NonSeparating { tried: Vec<String> },
    #[error("genus 0: no cusp forms")]
    NoCuspForms,
    #[error("orbit of degree {degree} does not fill genus {genus}")]
    NotAnosov { degree: usize, genus: usize },
    #[error("no positive eigenvector within shift bound {0}")]
    PositivityNotAchieved(i64),
    #[error("Hecke field is not totally real")]
    NotTotallyReal,
    #[error("embedding index {0} out of range")]
    NoSuchEmbedding(usize),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

fn legendre_minus_one(p: i64) -> i64 {
    match p % 4 {
        1 => 1,
        3 => -1,
        _ => 0,
    }
}

fn legendre_minus_three(p: i64) -> i64 {
    match p % 3 {
        1 => 1,
        2 => -1,
        _ => 0,
    }
}

/// Genus of `X_0(N)` from the index, elliptic points and cusps.
pub fn genus_formula(n: i64) -> i64 {
    assert!(n >= 1);
    let ps = p1::prime_divisors(n);
    let mu = p1::psi(n);
    let nu2: i64 = if n % 4 == 0 { 0 } else { ps.iter().map(|&p| 1 + legendre_minus_one(p)).product() };
    let nu3: i64 = if n % 9 == 0 { 0 } else { ps.iter().map(|&p| 1 + legendre_minus_three(p)).product() };
    let cusps = p1::cusp_count(n);
    // 12 g = 12 + mu - 3 nu2 - 4 nu3 - 6 cusps
    let twelve_g = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * cusps;
    debug_assert_eq!(twelve_g % 12, 0);
    twelve_g / 12
}

/// Dimension of the new subspace at level `N`, from `g(N) = sum_{M | N} new(M) d(N/M)`.
pub fn new_dimension(n: i64) -> i64 {
    let old: i64 = p1::divisors(n)
        .into_iter()
        .filter(|&m| m < n)
        .map(|m| new_dimension(m) * p1::divisors(n / m).len() as i64)
        .sum();
    genus_formula(n) - old
}
