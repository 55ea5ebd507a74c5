//! Classical continued fractions of real quadratic irrationals.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::{AlgebraicReal, IntPolynomial, RealNumberField};

use super::JpError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CfExpansion {
    #[serde(with = "crate::exact::serde_int::big_list")]
    pub preperiod: Vec<BigInt>,
    #[serde(with = "crate::exact::serde_int::big_list")]
    pub period: Vec<BigInt>,
}

impl CfExpansion {
    /// First `count` partial quotients.
    pub fn digits(&self, count: usize) -> Vec<BigInt> {
        self.preperiod
            .iter()
            .chain(self.period.iter().cycle())
            .take(count)
            .cloned()
            .collect()
    }
}

/// A quadratic irrational written as `(p + sqrt(d)) / q` with `q | d - p^2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticSurd {
    pub p: BigInt,
    pub q: BigInt,
    pub d: BigInt,
}

impl QuadraticSurd {
    /// Write `theta` in surd form from its minimal polynomial.
    pub fn from_algebraic(theta: &AlgebraicReal) -> Result<Self, JpError> {
        let mp = theta.minimal_polynomial();
        match mp.degree() {
            Some(1) => return Err(JpError::DegenerateRational),
            Some(2) => {}
            Some(k) => return Err(JpError::WrongDegree(k)),
            None => unreachable!(),
        }
        let (c, b, a) = (mp.coeff(0), mp.coeff(1), mp.coeff(2));
        let d = &b * &b - BigInt::from(4) * &a * &c;
        // theta = (-b + sqrt d)/(2a) when it exceeds the midpoint -b/(2a)
        let mid = AlgebraicReal::from_rational(theta.field(), BigRational::new(-&b, BigInt::from(2) * &a));
        if (theta - &mid).is_positive() {
            Ok(QuadraticSurd { p: -b, q: BigInt::from(2) * a, d })
        } else {
            Ok(QuadraticSurd { p: b, q: BigInt::from(-2) * a, d })
        }
    }

    pub fn floor(&self) -> BigInt {
        let s = self.d.sqrt();
        if self.q.is_positive() {
            (&self.p + &s).div_floor(&self.q)
        } else {
            (-&self.p - &s - BigInt::one()).div_floor(&-&self.q)
        }
    }

    /// `1 / (self - a)` for `a = floor(self)`.
    pub fn step(&self, a: &BigInt) -> QuadraticSurd {
        let p = a * &self.q - &self.p;
        let q = (&self.d - &p * &p) / &self.q;
        QuadraticSurd { p, q, d: self.d.clone() }
    }
}

/// Continued fraction of a real quadratic irrational, split into preperiod
/// and minimal period.
pub fn cf_expand(theta: &AlgebraicReal) -> Result<CfExpansion, JpError> {
    let mut x = QuadraticSurd::from_algebraic(theta)?;
    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    let mut digits = Vec::new();
    loop {
        if let Some(&start) = seen.get(&(x.p.clone(), x.q.clone())) {
            let period = digits.split_off(start);
            return Ok(CfExpansion {
                preperiod: digits,
                period,
            });
        }
        seen.insert((x.p.clone(), x.q.clone()), digits.len());
        let a = x.floor();
        x = x.step(&a);
        digits.push(a);
    }
}

/// Value of an eventually periodic continued fraction, as an element of
/// the real quadratic field it generates.
pub fn cf_value(expansion: &CfExpansion) -> Result<AlgebraicReal, JpError> {
    if expansion.period.is_empty() {
        return Err(JpError::DegenerateRational);
    }
    // purely periodic tail psi = [p0; ..., pk, psi] is a fixed point of the period matrix
    let (mut m00, mut m01, mut m10, mut m11) = (BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one());
    for a in &expansion.period {
        let (n00, n10) = (&m00 * a + &m01, &m10 * a + &m11);
        m01 = m00;
        m11 = m10;
        m00 = n00;
        m10 = n10;
    }
    // m10 psi^2 + (m11 - m00) psi - m01 = 0, psi > 1 the larger root
    let poly = IntPolynomial::new(vec![-m01, &m11 - &m00, m10]);
    let fields = RealNumberField::real_embeddings(&poly).map_err(JpError::Exact)?;
    let k = fields.last().ok_or(JpError::DegenerateRational)?;
    let mut x = AlgebraicReal::generator(k);
    for a in expansion.preperiod.iter().rev() {
        x = &AlgebraicReal::from_rational(k, BigRational::from_integer(a.clone())) + &x.inv().unwrap();
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{compare, Interval};
    use std::cmp::Ordering;

    fn field(c: &[i64], lo: i64, hi: i64) -> RealNumberField {
        RealNumberField::new(
            &IntPolynomial::from_i64s(c),
            Interval::new(BigRational::from_integer(lo.into()), BigRational::from_integer(hi.into())),
        )
        .unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn classical_examples() {
        let phi = AlgebraicReal::generator(&field(&[-1, -1, 1], 1, 2));
        let e = cf_expand(&phi).unwrap();
        assert_eq!((e.preperiod, e.period), (ints(&[]), ints(&[1])));
        let r2 = AlgebraicReal::generator(&field(&[-2, 0, 1], 1, 2));
        let e = cf_expand(&r2).unwrap();
        assert_eq!((e.preperiod, e.period), (ints(&[1]), ints(&[2])));
        let r3 = AlgebraicReal::generator(&field(&[-3, 0, 1], 1, 2));
        let e = cf_expand(&r3).unwrap();
        assert_eq!((e.preperiod, e.period), (ints(&[1]), ints(&[1, 2])));
    }

    #[test]
    fn negative_and_small_values() {
        let k = field(&[-2, 0, 1], 1, 2);
        let x = -&AlgebraicReal::generator(&k);
        let e = cf_expand(&x).unwrap();
        assert_eq!(e.preperiod[0], BigInt::from(-2));
        assert_eq!(compare(&cf_value(&e).unwrap(), &x, 24).unwrap(), Ordering::Equal);
    }

    #[test]
    fn reconstruction() {
        let k = field(&[-7, 0, 1], 2, 3);
        let x = &AlgebraicReal::generator(&k).scale(&BigRational::new(3.into(), 5.into()))
            + &AlgebraicReal::from_int(&k, 4);
        let e = cf_expand(&x).unwrap();
        assert_eq!(compare(&cf_value(&e).unwrap(), &x, 24).unwrap(), Ordering::Equal);
    }

    #[test]
    fn rejects_rational_and_cubic() {
        let k = field(&[-2, 0, 1], 1, 2);
        assert!(matches!(cf_expand(&AlgebraicReal::from_int(&k, 3)), Err(JpError::DegenerateRational)));
        let c = field(&[-2, 0, 0, 1], 1, 2);
        assert!(matches!(cf_expand(&AlgebraicReal::generator(&c)), Err(JpError::WrongDegree(3))));
    }
}
