//! Jacobi-Perron expansions, period matrices and their Perron roots.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::matrix::rank;
use crate::exact::roots::{cauchy_bound, refine_to_width, sign_variations, sturm_sequence};
use crate::exact::{
    compositum, isolate_real_roots, AlgebraicReal, IntMatrix, IntPolynomial, Interval,
    RealNumberField, DEFAULT_DEGREE_CAP,
};

use super::JpError;

/// The vector `(theta_1, ..., theta_{n-1})` driving a Jacobi-Perron expansion.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JPState {
    theta: Vec<AlgebraicReal>,
}

impl JPState {
    /// Validated state: nonempty, one common field, all components positive.
    pub fn new(theta: Vec<AlgebraicReal>) -> Result<Self, JpError> {
        let first = theta.first().ok_or_else(|| JpError::InvalidState("empty state".into()))?;
        if theta.iter().any(|t| t.field() != first.field()) {
            return Err(JpError::InvalidState("components lie in different fields".into()));
        }
        if let Some(i) = theta.iter().position(|t| !t.is_positive()) {
            return Err(JpError::InvalidState(format!("component {} is not positive", i + 1)));
        }
        // keep one field handle so state keys compare by coordinates only
        let k = first.field().clone();
        let theta = theta.iter().map(|t| t.with_field(&k)).collect();
        Ok(JPState { theta })
    }

    /// State `(lambda_2/lambda_1, ..., lambda_n/lambda_1)` of a positive vector.
    pub fn from_vector(lambda: &[AlgebraicReal]) -> Result<Self, JpError> {
        if lambda.len() < 2 {
            return Err(JpError::InvalidState("need at least two components".into()));
        }
        let inv = lambda[0]
            .inv()
            .ok_or_else(|| JpError::InvalidState("first component is zero".into()))?;
        if !lambda[0].is_positive() {
            return Err(JpError::InvalidState("first component is not positive".into()));
        }
        Self::new(lambda[1..].iter().map(|l| l * &inv).collect())
    }

    pub fn theta(&self) -> &[AlgebraicReal] {
        &self.theta
    }

    /// Dimension `n` of the expansion (one more than the number of components).
    pub fn dimension(&self) -> usize {
        self.theta.len() + 1
    }

    pub fn field(&self) -> &RealNumberField {
        self.theta[0].field()
    }

    /// The vector `(1, theta_1, ..., theta_{n-1})`.
    pub fn vector(&self) -> Vec<AlgebraicReal> {
        let mut v = vec![AlgebraicReal::one(self.field())];
        v.extend(self.theta.iter().cloned());
        v
    }

    /// True when `1, theta_1, ..., theta_{n-1}` are linearly independent over Q.
    pub fn is_independent(&self) -> bool {
        let rows: Vec<Vec<BigRational>> = self.vector().iter().map(|x| x.coords().to_vec()).collect();
        rank(&rows) == rows.len()
    }

    fn key(&self) -> Vec<Vec<BigRational>> {
        self.theta.iter().map(|t| t.coords().to_vec()).collect()
    }
}

/// `B = [[0, ..., 0, 1], [I, b]]` for a digit vector `b` of length `n - 1`.
pub fn digit_matrix(b: &[BigInt]) -> IntMatrix {
    let n = b.len() + 1;
    let mut m = IntMatrix::zeros(n, n);
    m.set(0, n - 1, BigInt::one());
    for i in 1..n {
        m.set(i, i - 1, BigInt::one());
        let v = m.get(i, n - 1) + &b[i - 1];
        m.set(i, n - 1, v);
    }
    m
}

/// One step of the Jacobi-Perron map: digits `b_i = floor(theta_i)` and the
/// next state `(frac theta_2 / frac theta_1, ..., 1 / frac theta_1)`.
pub fn jp_step(state: &JPState) -> Result<(Vec<BigInt>, JPState), JpError> {
    let b: Vec<BigInt> = state.theta.iter().map(|t| t.floor()).collect();
    let fr: Vec<AlgebraicReal> = state
        .theta
        .iter()
        .zip(&b)
        .map(|(t, bi)| t - &AlgebraicReal::from_rational(t.field(), BigRational::from_integer(bi.clone())))
        .collect();
    let inv = fr[0].inv().ok_or(JpError::DegenerateRational)?;
    let mut next: Vec<AlgebraicReal> = fr[1..].iter().map(|f| f * &inv).collect();
    next.push(inv);
    Ok((b, JPState { theta: next }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JpStatus {
    Periodic,
    NotPeriodicWithinBound,
    Degenerate,
}

impl JpStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            JpStatus::Periodic => "periodic",
            JpStatus::NotPeriodicWithinBound => "not_periodic_within_bound",
            JpStatus::Degenerate => "degenerate",
        }
    }
}

#[derive(Clone, Debug)]
pub struct JacobiPerronExpansion {
    pub dimension: usize,
    /// All digit vectors computed, in order.
    pub digits: Vec<Vec<BigInt>>,
    pub preperiod_len: usize,
    /// Zero unless periodic.
    pub period_len: usize,
    pub status: JpStatus,
    /// State at the start of the period.
    pub period_state: Option<JPState>,
}

impl JacobiPerronExpansion {
    pub fn preperiod(&self) -> &[Vec<BigInt>] {
        &self.digits[..self.preperiod_len.min(self.digits.len())]
    }

    pub fn period(&self) -> &[Vec<BigInt>] {
        &self.digits[self.preperiod_len..self.preperiod_len + self.period_len]
    }

    pub fn digit_matrices(&self) -> Vec<IntMatrix> {
        self.digits.iter().map(|b| digit_matrix(b)).collect()
    }

    /// Product of the digit matrices over one period.
    pub fn period_matrix(&self) -> Option<IntMatrix> {
        if self.status != JpStatus::Periodic {
            return None;
        }
        let mut a = IntMatrix::identity(self.dimension);
        for b in self.period() {
            a = a.mul(&digit_matrix(b));
        }
        Some(a)
    }
}

/// Expand until the state repeats exactly, at most `max_steps` digit steps.
pub fn jp_expand(state: &JPState, max_steps: usize) -> Result<JacobiPerronExpansion, JpError> {
    if max_steps == 0 {
        return Err(JpError::InvalidState("max_steps must be at least 1".into()));
    }
    let mut exp = JacobiPerronExpansion {
        dimension: state.dimension(),
        digits: Vec::new(),
        preperiod_len: 0,
        period_len: 0,
        status: JpStatus::NotPeriodicWithinBound,
        period_state: None,
    };
    if !state.is_independent() {
        exp.status = JpStatus::Degenerate;
        return Ok(exp);
    }
    let mut seen: HashMap<Vec<Vec<BigRational>>, usize> = HashMap::new();
    let mut cur = state.clone();
    for step in 0..=max_steps {
        if let Some(&start) = seen.get(&cur.key()) {
            exp.preperiod_len = start;
            exp.period_len = step - start;
            exp.status = JpStatus::Periodic;
            // digit matrices repeat as well: B_k = B_(k+p) across one more period
            let mut probe = cur.clone();
            for k in start..step {
                let (b, next) = jp_step(&probe)?;
                if b != exp.digits[k] {
                    return Err(JpError::InvalidState("state repetition without digit repetition".into()));
                }
                probe = next;
            }
            exp.period_state = Some(cur);
            return Ok(exp);
        }
        if step == max_steps {
            break;
        }
        seen.insert(cur.key(), step);
        match jp_step(&cur) {
            Ok((b, next)) => {
                exp.digits.push(b);
                cur = next;
            }
            Err(JpError::DegenerateRational) => {
                exp.status = JpStatus::Degenerate;
                exp.preperiod_len = exp.digits.len();
                return Ok(exp);
            }
            Err(e) => return Err(e),
        }
    }
    exp.preperiod_len = exp.digits.len();
    Ok(exp)
}

/// Perron root of a period matrix together with its characteristic polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeckeUnit {
    pub value: AlgebraicReal,
    pub char_poly: IntPolynomial,
    /// Isolating intervals of the distinct real roots of the characteristic polynomial, increasing.
    pub conjugates: Vec<Interval>,
}

impl HeckeUnit {
    /// Index of `value` among `conjugates`.
    pub fn root_index(&self) -> usize {
        locate(&self.value, &self.conjugates, &self.char_poly)
    }
}

/// Index of the isolating interval containing `x`.
pub(crate) fn locate(x: &AlgebraicReal, roots: &[Interval], p: &IntPolynomial) -> usize {
    let q = p.to_q().squarefree_part();
    let mut ivs = roots.to_vec();
    let mut w = BigRational::new(BigInt::one(), BigInt::from(1024));
    loop {
        let e = x.enclosure_within(&w);
        let hits: Vec<usize> = (0..ivs.len()).filter(|&i| ivs[i].intersects(&e)).collect();
        if hits.len() == 1 {
            return hits[0];
        }
        for iv in ivs.iter_mut() {
            *iv = refine_to_width(&q, iv, &w);
        }
        w = &w / BigRational::from_integer(BigInt::from(64));
    }
}

/// The eigenvalue `lambda_A = (A v)_1` for `v = (1, theta)` at the start of the period.
pub fn hecke_unit(expansion: &JacobiPerronExpansion) -> Result<HeckeUnit, JpError> {
    let a = expansion.period_matrix().ok_or(JpError::NotPeriodic)?;
    let state = expansion.period_state.as_ref().ok_or(JpError::NotPeriodic)?;
    unit_from_matrix(&a, state)
}

pub fn unit_from_matrix(a: &IntMatrix, state: &JPState) -> Result<HeckeUnit, JpError> {
    let v = state.vector();
    let lambda = mat_vec(a, &v)[0].clone();
    let char_poly = a.charpoly();
    if !lambda.eval_poly(&char_poly).is_zero() {
        return Err(JpError::NoPerronRoot);
    }
    if (&lambda - &AlgebraicReal::one(state.field())).signum() != Ordering::Greater {
        return Err(JpError::NoPerronRoot);
    }
    let conjugates = isolate_real_roots(&char_poly).map_err(JpError::Exact)?;
    let unit = HeckeUnit {
        value: lambda,
        char_poly,
        conjugates,
    };
    if unit.root_index() + 1 != unit.conjugates.len() || roots_below(&unit.char_poly, &-&unit.value) > 0 {
        return Err(JpError::NoPerronRoot);
    }
    Ok(unit)
}

/// Number of distinct real roots of `p` strictly below `x`, by a Sturm
/// sequence evaluated exactly at `x`.
fn roots_below(p: &IntPolynomial, x: &AlgebraicReal) -> usize {
    let q = p.to_q().squarefree_part();
    let seq = sturm_sequence(&q);
    let bound = -cauchy_bound(&q);
    let at_bound = sign_variations(&seq, &bound);
    let signs: Vec<Ordering> = seq
        .iter()
        .map(|s| x.eval_qpoly(s).signum())
        .filter(|o| *o != Ordering::Equal)
        .collect();
    let at_x = signs.windows(2).filter(|w| w[0] != w[1]).count();
    // (bound, x] minus a root at x itself
    let upto = at_bound - at_x;
    upto - usize::from(x.eval_qpoly(&q).is_zero())
}

fn mat_vec(a: &IntMatrix, v: &[AlgebraicReal]) -> Vec<AlgebraicReal> {
    let k = v[0].field();
    (0..a.nrows())
        .map(|i| {
            let mut acc = AlgebraicReal::zero(k);
            for (j, vj) in v.iter().enumerate() {
                let c = a.get(i, j);
                if !c.is_zero() {
                    acc = &acc + &vj.scale(&BigRational::from_integer(c.clone()));
                }
            }
            acc
        })
        .collect()
}

/// Exact check of `A (1, theta) = lambda_A (1, theta)`.
pub fn verify_perron_eigenvector(a: &IntMatrix, state: &JPState, unit: &HeckeUnit) -> Result<bool, JpError> {
    if a.nrows() != state.dimension() || !a.is_square() {
        return Ok(false);
    }
    let v = state.vector();
    let (v, lambda) = if unit.value.field() == state.field() {
        let k = state.field();
        (v, unit.value.with_field(k))
    } else {
        let c = compositum(state.field(), unit.value.field(), DEFAULT_DEGREE_CAP).map_err(JpError::Exact)?;
        (
            v.iter().map(|x| c.embed_left(x)).collect(),
            c.embed_right(&unit.value),
        )
    };
    let av = mat_vec(a, &v);
    Ok(av.iter().zip(&v).all(|(l, r)| l == &(&lambda * r)))
}

/// Distance `max_i |u_i/u_0 - theta_i|` between the state and the direction of
/// `A^k (1, ..., 1)`, for `k = 1..=periods`. Values are exact.
pub fn convergence_errors(a: &IntMatrix, state: &JPState, periods: usize) -> Vec<AlgebraicReal> {
    let n = a.nrows();
    let k = state.field();
    let mut u = vec![BigInt::one(); n];
    let mut out = Vec::with_capacity(periods);
    for _ in 0..periods {
        u = a.mul_vec(&u);
        let mut worst: Option<AlgebraicReal> = None;
        for (i, t) in state.theta().iter().enumerate() {
            let r = AlgebraicReal::from_rational(k, BigRational::new(u[i + 1].clone(), u[0].clone()));
            let mut d = &r - t;
            if d.signum() == Ordering::Less {
                d = -&d;
            }
            worst = Some(match worst {
                Some(w) if (&w - &d).signum() != Ordering::Less => w,
                _ => d,
            });
        }
        out.push(worst.unwrap());
    }
    out
}

/// `|x|` for an algebraic real.
pub fn abs(x: &AlgebraicReal) -> AlgebraicReal {
    if x.signum() == Ordering::Less {
        -x
    } else {
        x.clone()
    }
}
