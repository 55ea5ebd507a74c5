//! Rational intervals and Sturm-sequence real root isolation.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::{IntPolynomial, QPoly};
use super::ExactError;

/// Closed interval `[lo, hi]` with rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Interval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        Interval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// `Some(Less)` if entirely below `other`, `Some(Greater)` if above, `None` if overlapping.
    pub fn separation(&self, other: &Interval) -> Option<Ordering> {
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if self.lo > other.hi {
            Some(Ordering::Greater)
        } else {
            None
        }
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    pub fn neg(&self) -> Interval {
        Interval::new(-&self.hi, -&self.lo)
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let cands = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = cands.iter().min().unwrap().clone();
        let hi = cands.iter().max().unwrap().clone();
        Interval::new(lo, hi)
    }

    pub fn scale(&self, k: &BigRational) -> Interval {
        if k.is_negative() {
            Interval::new(&self.hi * k, &self.lo * k)
        } else {
            Interval::new(&self.lo * k, &self.hi * k)
        }
    }

    pub fn add_scalar(&self, k: &BigRational) -> Interval {
        Interval::new(&self.lo + k, &self.hi + k)
    }

    /// Reciprocal; `None` when the interval contains zero.
    pub fn recip(&self) -> Option<Interval> {
        if self.contains_zero() {
            return None;
        }
        Some(Interval::new(self.hi.recip(), self.lo.recip()))
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.midpoint())
    }
}

impl serde::Serialize for Interval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Interval {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let s = String::deserialize(d)?;
        let (lo, hi) = s
            .split_once(',')
            .ok_or_else(|| D::Error::custom("interval needs lo,hi"))?;
        let lo = super::parse_rational(lo).map_err(D::Error::custom)?;
        let hi = super::parse_rational(hi).map_err(D::Error::custom)?;
        if lo > hi {
            return Err(D::Error::custom("empty interval"));
        }
        Ok(Interval { lo, hi })
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", fmt_ratio_full(&self.lo), fmt_ratio_full(&self.hi))
    }
}

/// `p/q` with an explicit denominator, as in interval endpoints of the canonical form.
pub fn fmt_ratio_full(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn ratio_to_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    match (x.numer().to_f64(), x.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() && d != 0.0 => n / d,
        _ => {
            // rescale huge fractions by shifting both parts
            let nb = x.numer().bits() as i64;
            let db = x.denom().bits() as i64;
            let shift = (nb.max(db) - 900).max(0) as usize;
            let n = (x.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (x.denom() >> shift).to_f64().unwrap_or(1.0);
            if d == 0.0 {
                if x.is_negative() {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            } else {
                n / d
            }
        }
    }
}

/// Evaluate `p` over an interval with Horner's scheme.
pub fn eval_interval(p: &QPoly, x: &Interval) -> Interval {
    let mut acc = Interval::point(BigRational::zero());
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(x).add_scalar(c);
    }
    acc
}

pub fn sturm_sequence(p: &QPoly) -> Vec<QPoly> {
    let mut seq = vec![p.clone()];
    if p.degree().unwrap_or(0) == 0 {
        return seq;
    }
    seq.push(p.derivative());
    loop {
        let n = seq.len();
        let r = seq[n - 2].rem(&seq[n - 1]);
        if r.is_zero() {
            break;
        }
        seq.push(-&r);
    }
    seq
}

pub fn sign_variations(seq: &[QPoly], x: &BigRational) -> usize {
    let signs: Vec<bool> = seq
        .iter()
        .map(|p| p.eval(x))
        .filter(|v| !v.is_zero())
        .map(|v| v.is_positive())
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots in the half-open interval `(a, b]`.
pub fn count_roots(seq: &[QPoly], a: &BigRational, b: &BigRational) -> usize {
    sign_variations(seq, a).saturating_sub(sign_variations(seq, b))
}

/// Strict bound: every real root lies in `(-B, B)`.
pub fn cauchy_bound(p: &QPoly) -> BigRational {
    let lc = p.leading().expect("nonzero polynomial").abs();
    let m = p
        .coeffs()
        .iter()
        .take(p.coeffs().len() - 1)
        .map(|c| c.abs() / &lc)
        .max()
        .unwrap_or_else(BigRational::zero);
    (m + BigRational::one()).ceil() + BigRational::one()
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Isolate the distinct real roots of `p` into pairwise disjoint closed
/// intervals, sorted increasingly. A rational root found during bisection
/// is returned as a point interval; every other interval has non-root
/// endpoints and contains exactly one root in its interior.
pub fn isolate_real_roots(p: &IntPolynomial) -> Result<Vec<Interval>, ExactError> {
    if p.is_zero() {
        return Err(ExactError::ZeroPolynomial);
    }
    let sf = p.to_q().squarefree_part();
    if sf.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    let seq = sturm_sequence(&sf);
    let b = cauchy_bound(&sf);
    let a = -b.clone();
    let total = count_roots(&seq, &a, &b);
    let mut out = Vec::new();
    isolate_rec(&sf, &seq, a, b, total, &mut out);
    out.sort_by(|x, y| x.lo.cmp(&y.lo));
    separate_touching(&sf, &mut out);
    Ok(out)
}

fn isolate_rec(
    p: &QPoly,
    seq: &[QPoly],
    a: BigRational,
    b: BigRational,
    count: usize,
    out: &mut Vec<Interval>,
) {
    if count == 0 {
        return;
    }
    if count == 1 {
        out.push(Interval::new(a, b));
        return;
    }
    let m = (&a + &b) / rat(2);
    if p.eval(&m).is_zero() {
        // carve out a root-free neighbourhood of the rational root m
        let mut delta = (&b - &a) / rat(4);
        loop {
            let l = &m - &delta;
            let r = &m + &delta;
            if !p.eval(&l).is_zero()
                && !p.eval(&r).is_zero()
                && count_roots(seq, &l, &r) == 1
            {
                out.push(Interval::point(m.clone()));
                let cl = count_roots(seq, &a, &l);
                let cr = count_roots(seq, &r, &b);
                isolate_rec(p, seq, a, l, cl, out);
                isolate_rec(p, seq, r, b, cr, out);
                return;
            }
            delta /= rat(2);
        }
    }
    let cl = count_roots(seq, &a, &m);
    let cr = count - cl;
    isolate_rec(p, seq, a, m.clone(), cl, out);
    isolate_rec(p, seq, m, b, cr, out);
}

/// Bisect an isolating interval once, keeping the half that holds the root.
pub fn bisect_once(p: &QPoly, iv: &Interval) -> Interval {
    if iv.is_point() {
        return iv.clone();
    }
    let m = iv.midpoint();
    let pm = p.eval(&m);
    if pm.is_zero() {
        return Interval::point(m);
    }
    let plo = p.eval(&iv.lo);
    if plo.is_positive() != pm.is_positive() {
        Interval::new(iv.lo.clone(), m)
    } else {
        Interval::new(m, iv.hi.clone())
    }
}

fn separate_touching(p: &QPoly, ivs: &mut [Interval]) {
    for i in 1..ivs.len() {
        while ivs[i - 1].hi >= ivs[i].lo {
            ivs[i - 1] = bisect_once(p, &ivs[i - 1]);
            ivs[i] = bisect_once(p, &ivs[i]);
        }
    }
}

/// Refine an isolating interval of a squarefree polynomial until its width
/// is at most `width` (or it becomes a point).
pub fn refine_to_width(p: &QPoly, iv: &Interval, width: &BigRational) -> Interval {
    let mut cur = iv.clone();
    while !cur.is_point() && &cur.width() > width {
        cur = bisect_once(p, &cur);
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ip(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64s(c)
    }

    #[test]
    fn sqrt_two_has_two_roots() {
        let r = isolate_real_roots(&ip(&[-2, 0, 1])).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r[0].hi < BigRational::zero() && r[1].lo > BigRational::zero());
        let p = ip(&[-2, 0, 1]).to_q();
        for iv in &r {
            let fine = refine_to_width(&p, iv, &BigRational::new(1.into(), 1000.into()));
            assert!((fine.to_f64().abs() - 2f64.sqrt()).abs() < 1e-3);
        }
    }

    #[test]
    fn no_real_roots() {
        assert!(isolate_real_roots(&ip(&[1, 0, 1])).unwrap().is_empty());
    }

    #[test]
    fn integer_roots_are_isolated() {
        // (x-1)(x-2)(x-3)
        let r = isolate_real_roots(&ip(&[-6, 11, -6, 1])).unwrap();
        assert_eq!(r.len(), 3);
        for (iv, root) in r.iter().zip([1, 2, 3]) {
            assert!(iv.contains(&rat(root)));
        }
        for w in r.windows(2) {
            assert!(w[0].hi < w[1].lo);
        }
    }

    #[test]
    fn repeated_roots_counted_once() {
        // (x-1)^2 (x+1)
        let r = isolate_real_roots(&ip(&[1, -1, -1, 1])).unwrap();
        assert_eq!(r.len(), 2);
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert!(matches!(
            isolate_real_roots(&IntPolynomial::zero()),
            Err(ExactError::ZeroPolynomial)
        ));
    }

    #[test]
    fn interval_ops() {
        let a = Interval::new(rat(-1), rat(2));
        let b = Interval::new(rat(3), rat(4));
        assert_eq!(a.mul(&b), Interval::new(rat(-4), rat(8)));
        assert!(a.recip().is_none());
        assert_eq!(b.recip().unwrap(), Interval::new(BigRational::new(1.into(), 4.into()), BigRational::new(1.into(), 3.into())));
    }
}
