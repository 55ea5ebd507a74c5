//! Finitely generated Z-modules of real algebraic numbers and their
//! endomorphism rings.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contfrac::QuadraticSurd;
use crate::exact::matrix::{solve_in_row_span, z_row_echelon};
use crate::exact::{compositum, AlgebraicReal, ExactError, IntMatrix, IntPolynomial, RealNumberField, DEFAULT_DEGREE_CAP};
use crate::quadorder::{order_from_disc, QuadOrder};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("module has no nonzero generator")]
    EmptyModule,
    #[error("slope {0} is rational")]
    RationalSlope(String),
    #[error("expected rank {expected}, got {actual}")]
    RankMismatch { expected: usize, actual: usize },
    #[error("need at least {0} generators")]
    TooFewGenerators(usize),
    #[error("genus must be positive, got {0}")]
    InvalidGenus(i64),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Default coefficient bound for module elements tried as proportionality witnesses.
pub const DEFAULT_WITNESS_BOUND: i64 = 10;

/// `Z lambda_1 + ... + Z lambda_n` inside one real number field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PseudoLattice {
    generators: Vec<AlgebraicReal>,
    basis: Vec<AlgebraicReal>,
}

impl PseudoLattice {
    /// Module spanned by `periods`; a Z-basis is computed exactly.
    pub fn from_periods(periods: &[AlgebraicReal]) -> Result<Self, LatticeError> {
        if periods.iter().all(|p| p.is_zero()) {
            return Err(LatticeError::EmptyModule);
        }
        let k = periods[0].field().clone();
        if periods.iter().any(|p| p.field() != &k) {
            return Err(LatticeError::Exact(ExactError::FieldMismatch));
        }
        let generators: Vec<AlgebraicReal> = periods.iter().map(|p| p.with_field(&k)).collect();
        let basis = z_basis(&generators);
        Ok(PseudoLattice { generators, basis })
    }

    pub fn generators(&self) -> &[AlgebraicReal] {
        &self.generators
    }

    /// A Z-basis in Hermite echelon order.
    pub fn basis(&self) -> &[AlgebraicReal] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn field(&self) -> &RealNumberField {
        self.generators[0].field()
    }

    /// `mu * m`.
    pub fn scale(&self, mu: &AlgebraicReal) -> Result<Self, LatticeError> {
        let (gens, mu) = if mu.field() == self.field() {
            (self.generators.clone(), mu.with_field(self.field()))
        } else {
            let c = compositum(self.field(), mu.field(), DEFAULT_DEGREE_CAP)?;
            (
                self.generators.iter().map(|g| c.embed_left(g)).collect(),
                c.embed_right(mu),
            )
        };
        Self::from_periods(&gens.iter().map(|g| g * &mu).collect::<Vec<_>>())
    }

    /// Rescaled so that the first nonzero generator is 1.
    pub fn scaled(&self) -> Self {
        let first = self.generators.iter().find(|g| !g.is_zero()).unwrap();
        let inv = first.inv().unwrap();
        Self::from_periods(&self.generators.iter().map(|g| g * &inv).collect::<Vec<_>>()).unwrap()
    }

    /// Whether `x` lies in the module.
    pub fn contains(&self, x: &AlgebraicReal) -> bool {
        let rows: Vec<Vec<BigRational>> = self.basis.iter().map(|b| b.coords().to_vec()).collect();
        match solve_in_row_span(&rows, x.coords()) {
            Some(c) => c.iter().all(|q| q.is_integer()),
            None => false,
        }
    }

    /// Module elements `sum c_i b_i` with `|c_i| <= bound`, in a fixed order.
    fn elements(&self, bound: i64) -> Vec<AlgebraicReal> {
        let r = self.rank();
        let mut out = Vec::new();
        let side = (2 * bound + 1) as usize;
        let total = side.checked_pow(r as u32).unwrap_or(usize::MAX).min(200_000);
        for idx in 0..total {
            let mut rest = idx;
            let mut acc = AlgebraicReal::zero(self.field());
            for b in &self.basis {
                let c = (rest % side) as i64 - bound;
                rest /= side;
                if c != 0 {
                    acc = &acc + &b.scale(&BigRational::from_integer(c.into()));
                }
            }
            if !acc.is_zero() {
                out.push(acc);
            }
        }
        out
    }
}

fn z_basis(gens: &[AlgebraicReal]) -> Vec<AlgebraicReal> {
    let k = gens[0].field();
    let den = gens
        .iter()
        .flat_map(|g| g.coords().iter())
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let scale = BigRational::from_integer(den.clone());
    let rows: Vec<Vec<BigInt>> = gens
        .iter()
        .map(|g| g.coords().iter().map(|c| (c * &scale).to_integer()).collect())
        .collect();
    z_row_echelon(&rows)
        .into_iter()
        .map(|r| {
            AlgebraicReal::new(
                k,
                r.into_iter().map(|c| BigRational::new(c, den.clone())).collect(),
            )
        })
        .collect()
}

/// Bring two modules into a common field.
fn common(m: &PseudoLattice, n: &PseudoLattice) -> Result<(PseudoLattice, PseudoLattice), LatticeError> {
    if m.field() == n.field() {
        let k = m.field();
        let n2 = PseudoLattice::from_periods(&n.generators.iter().map(|g| g.with_field(k)).collect::<Vec<_>>())?;
        return Ok((m.clone(), n2));
    }
    let c = compositum(m.field(), n.field(), DEFAULT_DEGREE_CAP)?;
    let a: Vec<AlgebraicReal> = m.generators.iter().map(|g| c.embed_left(g)).collect();
    let b: Vec<AlgebraicReal> = n.generators.iter().map(|g| c.embed_right(g)).collect();
    Ok((PseudoLattice::from_periods(&a)?, PseudoLattice::from_periods(&b)?))
}

/// Module equality (not proportionality).
pub fn equals(m: &PseudoLattice, n: &PseudoLattice) -> Result<bool, LatticeError> {
    let (m, n) = common(m, n)?;
    if m.rank() != n.rank() {
        return Ok(false);
    }
    Ok(n.basis.iter().all(|b| m.contains(b)) && m.basis.iter().all(|b| n.contains(b)))
}

/// A positive `mu` with `mu * m = n`, if one exists among generator ratios
/// and ratios of bounded elements of `n` to the first basis element of `m`.
/// Module equality is reported as `mu = 1`.
pub fn is_proportional(m: &PseudoLattice, n: &PseudoLattice, bound: i64) -> Result<Option<AlgebraicReal>, LatticeError> {
    if m.rank() != n.rank() {
        return Ok(None);
    }
    let (m, n) = common(m, n)?;
    if equals(&m, &n)? {
        return Ok(Some(AlgebraicReal::one(m.field())));
    }
    // the cached enclosure inside AlgebraicReal does not affect Hash or Eq
    #[allow(clippy::mutable_key_type)]
    let mut tried = HashSet::new();
    let mut cands = Vec::new();
    for a in n.generators.iter().chain(&n.basis) {
        for b in m.generators.iter().chain(&m.basis) {
            if let Some(mu) = a.checked_div(b) {
                cands.push(mu);
            }
        }
    }
    let b1_inv = m.basis[0].inv().unwrap();
    cands.extend(n.elements(bound).iter().map(|w| w * &b1_inv));
    for mu in cands {
        if !mu.is_positive() || !tried.insert(mu.clone()) {
            continue;
        }
        let scaled = PseudoLattice::from_periods(&m.generators.iter().map(|g| g * &mu).collect::<Vec<_>>())?;
        if equals(&scaled, &n)? {
            return Ok(Some(mu));
        }
    }
    Ok(None)
}

/// Real-multiplication data of `Z + Z theta`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RMCertificate {
    pub theta: AlgebraicReal,
    pub min_poly: IntPolynomial,
    #[serde(rename = "D")]
    #[serde(with = "crate::exact::serde_int::big")]
    pub discriminant: BigInt,
    #[serde(rename = "dK")]
    #[serde(with = "crate::exact::serde_int::big")]
    pub fundamental_discriminant: BigInt,
    #[serde(with = "crate::exact::serde_int::big")]
    pub f: BigInt,
}

impl RMCertificate {
    pub fn order(&self) -> QuadOrder {
        QuadOrder {
            d_k: self.fundamental_discriminant.clone(),
            f: self.f.clone(),
            d: self.discriminant.clone(),
        }
    }

    /// `(a, b, c)` of the minimal polynomial `a x^2 + b x + c`.
    pub fn form(&self) -> (BigInt, BigInt, BigInt) {
        (self.min_poly.coeff(2), self.min_poly.coeff(1), self.min_poly.coeff(0))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EndRing {
    RealMultiplication(RMCertificate),
    /// `End = Z`; the slope has the given degree.
    Trivial { degree: usize },
}

/// Canonical generator of the GL2(Z)-orbit of a quadratic irrational: the
/// complete quotient in its purely periodic continued-fraction cycle whose
/// primitive minimal polynomial `(a, b, c)` (with `a > 0`) is smallest.
pub fn canonical_theta(theta: &AlgebraicReal) -> Result<AlgebraicReal, LatticeError> {
    let s0 = QuadraticSurd::from_algebraic(theta).map_err(|_| LatticeError::RationalSlope(theta.canonical()))?;
    // walk into the periodic part, then around one cycle
    let mut seen = HashSet::new();
    let mut x = s0.clone();
    while seen.insert((x.p.clone(), x.q.clone())) {
        let a = x.floor();
        x = x.step(&a);
    }
    let start = x.clone();
    let mut best: Option<((BigInt, BigInt, BigInt), QuadraticSurd)> = None;
    loop {
        let key = surd_form(&x);
        if best.as_ref().is_none_or(|(k, _)| &key < k) {
            best = Some((key, x.clone()));
        }
        let a = x.floor();
        x = x.step(&a);
        if x == start {
            break;
        }
    }
    let (_, s) = best.unwrap();
    // sqrt(d) = q0 theta - p0 in the field of theta
    let k = theta.field();
    let sqrt_d = &theta.scale(&BigRational::from_integer(s0.q.clone()))
        - &AlgebraicReal::from_rational(k, BigRational::from_integer(s0.p.clone()));
    let num = &sqrt_d + &AlgebraicReal::from_rational(k, BigRational::from_integer(s.p.clone()));
    Ok(num.scale(&BigRational::new(BigInt::one(), s.q.clone())))
}

/// Primitive `(a, b, c)` with `a > 0` for the surd `(p + sqrt d)/q`.
fn surd_form(s: &QuadraticSurd) -> (BigInt, BigInt, BigInt) {
    // q x^2 - 2p x + (p^2 - d)/q = 0
    let a = s.q.clone();
    let b = BigInt::from(-2) * &s.p;
    let c = (&s.p * &s.p - &s.d) / &s.q;
    let g = a.gcd(&b).gcd(&c);
    let sign = if a.is_negative() { -BigInt::one() } else { BigInt::one() };
    let f = &g * sign;
    (a / &f, b / &f, c / &f)
}

/// Endomorphism ring of a rank-2 module from its slope.
pub fn endomorphism_ring(m: &PseudoLattice) -> Result<EndRing, LatticeError> {
    if m.rank() != 2 {
        return Err(LatticeError::RankMismatch {
            expected: 2,
            actual: m.rank(),
        });
    }
    let theta = m.basis[1].checked_div(&m.basis[0]).unwrap();
    let degree = theta.degree();
    if degree != 2 {
        return Ok(EndRing::Trivial { degree });
    }
    Ok(EndRing::RealMultiplication(rm_certificate(&theta)?))
}

/// Certificate for a quadratic irrational, using its canonical representative.
pub fn rm_certificate(theta: &AlgebraicReal) -> Result<RMCertificate, LatticeError> {
    let theta = canonical_theta(theta)?;
    let min_poly = theta.minimal_polynomial();
    let (c, b, a) = (min_poly.coeff(0), min_poly.coeff(1), min_poly.coeff(2));
    let d = &b * &b - BigInt::from(4) * &a * &c;
    let order = order_from_disc(&d).map_err(|e| LatticeError::RationalSlope(e.to_string()))?;
    Ok(RMCertificate {
        theta,
        min_poly,
        discriminant: d,
        fundamental_discriminant: order.d_k,
        f: order.f,
    })
}

/// `Z + Z (lambda_2 / lambda_1)` from the first two generators.
pub fn hecke_project(jac: &PseudoLattice) -> Result<PseudoLattice, LatticeError> {
    project_pair(jac, 0, 1)
}

/// `Z + Z (lambda_j / lambda_i)`.
pub fn project_pair(jac: &PseudoLattice, i: usize, j: usize) -> Result<PseudoLattice, LatticeError> {
    let g = jac.generators();
    if g.len() < 2 || i >= g.len() || j >= g.len() {
        return Err(LatticeError::TooFewGenerators(i.max(j) + 1));
    }
    let theta = g[j].checked_div(&g[i]).ok_or(LatticeError::EmptyModule)?;
    if theta.as_rational().is_some() {
        return Err(LatticeError::RationalSlope(theta.canonical()));
    }
    PseudoLattice::from_periods(&[AlgebraicReal::one(theta.field()), theta])
}

/// The slope `lambda_2 / lambda_1` of a projected module.
pub fn slope(m: &PseudoLattice) -> AlgebraicReal {
    let g = m.generators();
    g[1].checked_div(&g[0]).unwrap()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauTruncation {
    pub tau: IntMatrix,
    /// The input was not symmetric.
    pub asymmetric: bool,
    /// `(T + T^t)/2` was used for the block.
    pub symmetrized: bool,
}

/// Top-left 2x2 block of `T`, symmetrized when that keeps it integral.
pub fn tau_truncate(t: &IntMatrix) -> Result<TauTruncation, LatticeError> {
    if t.nrows() < 2 || !t.is_square() {
        return Err(LatticeError::TooFewGenerators(2));
    }
    let asymmetric = !t.is_symmetric();
    let (t11, t12, t21, t22) = (t.get(0, 0), t.get(0, 1), t.get(1, 0), t.get(1, 1));
    let sum = t12 + t21;
    let (off, symmetrized) = if asymmetric && sum.is_even() {
        (sum / 2, true)
    } else {
        (t12.clone(), false)
    };
    let tau = if symmetrized || !asymmetric {
        IntMatrix::from_rows(vec![vec![t11.clone(), off.clone()], vec![off, t22.clone()]])
    } else {
        IntMatrix::from_rows(vec![vec![t11.clone(), t12.clone()], vec![t21.clone(), t22.clone()]])
    };
    Ok(TauTruncation {
        tau,
        asymmetric,
        symmetrized,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RmQuadraticCheck {
    pub holds: bool,
    /// `t12 x^2 + (t11 - t22) x - t12`.
    pub quadratic: IntPolynomial,
    pub residual: AlgebraicReal,
}

pub fn rm_quadratic_check(theta: &AlgebraicReal, tau: &IntMatrix) -> RmQuadraticCheck {
    let t12 = tau.get(0, 1).clone();
    let quadratic = IntPolynomial::new(vec![-&t12, tau.get(0, 0) - tau.get(1, 1), t12]);
    let residual = theta.eval_poly(&quadratic);
    RmQuadraticCheck {
        holds: residual.is_zero(),
        quadratic,
        residual,
    }
}

/// Degree `2g - 1` of the ramified cover.
pub fn cover_degree(g: i64) -> Result<i64, LatticeError> {
    if g < 1 {
        return Err(LatticeError::InvalidGenus(g));
    }
    Ok(2 * g - 1)
}

/// Integer coordinates of a module element in the module basis, if it lies in it.
pub fn coordinates(m: &PseudoLattice, x: &AlgebraicReal) -> Option<Vec<BigInt>> {
    let rows: Vec<Vec<BigRational>> = m.basis.iter().map(|b| b.coords().to_vec()).collect();
    let c = solve_in_row_span(&rows, x.coords())?;
    if c.iter().all(|q| q.is_integer()) {
        Some(c.into_iter().map(|q| q.to_integer()).collect())
    } else {
        None
    }
}
