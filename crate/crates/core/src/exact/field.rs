//! Real number fields `Q(alpha)` with a chosen real root `alpha`, and their elements.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::factor::factor_over_rationals;
use super::matrix::{charpoly_q, QMatrix};
use super::poly::{IntPolynomial, QPoly};
use super::roots::{
    bisect_once, count_roots, eval_interval, isolate_real_roots, ratio_to_f64, sturm_sequence,
    Interval,
};
use super::{fmt_rational, parse_rational, ExactError, DEFAULT_DEGREE_CAP};

struct FieldData {
    poly: IntPolynomial,
    modulus: QPoly,
    base: Interval,
    fine: Mutex<Interval>,
}

/// `Q(alpha)` for a real root `alpha` of an irreducible integer polynomial,
/// pinned down by an isolating rational interval.
#[derive(Clone)]
pub struct RealNumberField(Arc<FieldData>);

impl RealNumberField {
    /// Build from an irreducible polynomial and an interval isolating one of its real roots.
    pub fn new(poly: &IntPolynomial, interval: Interval) -> Result<Self, ExactError> {
        let poly = poly.primitive_part();
        if poly.degree().unwrap_or(0) == 0 {
            return Err(ExactError::ZeroPolynomial);
        }
        if !factor_over_rationals(&poly)?.is_irreducible() {
            return Err(ExactError::Reducible(poly.to_string()));
        }
        Self::new_unchecked(poly, interval)
    }

    pub(crate) fn new_unchecked(poly: IntPolynomial, interval: Interval) -> Result<Self, ExactError> {
        let modulus = poly.to_q().monic();
        if !isolates_one_root(&modulus, &interval) {
            return Err(ExactError::NotIsolating {
                poly: poly.to_string(),
                interval: interval.to_string(),
            });
        }
        let interval = if poly.degree() == Some(1) {
            Interval::point(-modulus.coeff(0))
        } else {
            interval
        };
        Ok(RealNumberField(Arc::new(FieldData {
            poly,
            modulus,
            fine: Mutex::new(interval.clone()),
            base: interval,
        })))
    }

    /// One field per real root of an irreducible polynomial, in increasing root order.
    pub fn real_embeddings(poly: &IntPolynomial) -> Result<Vec<Self>, ExactError> {
        let poly = poly.primitive_part();
        if !factor_over_rationals(&poly)?.is_irreducible() {
            return Err(ExactError::Reducible(poly.to_string()));
        }
        isolate_real_roots(&poly)?
            .into_iter()
            .map(|iv| Self::new_unchecked(poly.clone(), iv))
            .collect()
    }

    /// The field containing the root of `poly` inside `interval`, where `poly`
    /// may be reducible. Also returns the irreducible factor used.
    pub fn from_root(poly: &IntPolynomial, interval: Interval) -> Result<Self, ExactError> {
        let fac = factor_over_rationals(poly)?;
        for (f, _) in &fac.factors {
            if isolates_one_root(&f.to_q().monic(), &interval) {
                return Self::new_unchecked(f.clone(), interval);
            }
        }
        Err(ExactError::NotIsolating {
            poly: poly.to_string(),
            interval: interval.to_string(),
        })
    }

    pub fn rationals() -> Self {
        Self::new_unchecked(
            IntPolynomial::from_i64s(&[0, 1]),
            Interval::point(BigRational::zero()),
        )
        .unwrap()
    }

    pub fn degree(&self) -> usize {
        self.0.poly.degree().unwrap()
    }

    /// Primitive defining polynomial with positive leading coefficient.
    pub fn poly(&self) -> &IntPolynomial {
        &self.0.poly
    }

    pub fn modulus(&self) -> &QPoly {
        &self.0.modulus
    }

    /// The isolating interval the field was constructed with.
    pub fn interval(&self) -> &Interval {
        &self.0.base
    }

    /// Isolating interval for the root refined to width at most `width`.
    pub fn root_enclosure(&self, width: &BigRational) -> Interval {
        let mut fine = self.0.fine.lock().unwrap();
        while !fine.is_point() && &fine.width() > width {
            *fine = bisect_once(&self.0.modulus, &fine);
        }
        fine.clone()
    }

    fn current_enclosure(&self) -> Interval {
        self.0.fine.lock().unwrap().clone()
    }

    /// Halve the cached enclosure `steps` times.
    fn refine(&self, steps: usize) -> Interval {
        let mut fine = self.0.fine.lock().unwrap();
        for _ in 0..steps {
            if fine.is_point() {
                break;
            }
            *fine = bisect_once(&self.0.modulus, &fine);
        }
        fine.clone()
    }

    pub fn root_f64(&self) -> f64 {
        self.root_enclosure(&BigRational::new(BigInt::one(), BigInt::from(1u64 << 60)))
            .to_f64()
    }

    /// The same defining polynomial with the other real roots, i.e. the real
    /// conjugate embeddings (including this one).
    pub fn conjugates(&self) -> Vec<RealNumberField> {
        isolate_real_roots(&self.0.poly)
            .expect("nonzero polynomial")
            .into_iter()
            .map(|iv| {
                if iv.intersects(&self.0.base) && self.same_root(&iv) {
                    self.clone()
                } else {
                    Self::new_unchecked(self.0.poly.clone(), iv).unwrap()
                }
            })
            .collect()
    }

    pub fn is_totally_real(&self) -> bool {
        isolate_real_roots(&self.0.poly).unwrap().len() == self.degree()
    }

    fn same_root(&self, iv: &Interval) -> bool {
        let a = &self.0.base;
        if !a.intersects(iv) {
            return false;
        }
        let lo = (&a.lo).max(&iv.lo).clone();
        let hi = (&a.hi).min(&iv.hi).clone();
        let m = &self.0.modulus;
        if lo == hi {
            return m.eval(&lo).is_zero();
        }
        let seq = sturm_sequence(m);
        count_roots(&seq, &lo, &hi) + usize::from(m.eval(&lo).is_zero()) > 0
    }

    pub fn ptr_eq(&self, other: &RealNumberField) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

fn isolates_one_root(m: &QPoly, iv: &Interval) -> bool {
    if iv.is_point() {
        return m.eval(&iv.lo).is_zero();
    }
    if m.eval(&iv.lo).is_zero() || m.eval(&iv.hi).is_zero() {
        return false;
    }
    let seq = sturm_sequence(m);
    count_roots(&seq, &iv.lo, &iv.hi) == 1
}

impl PartialEq for RealNumberField {
    fn eq(&self, other: &Self) -> bool {
        self.ptr_eq(other) || (self.0.poly == other.0.poly && self.same_root(&other.0.base))
    }
}

impl Eq for RealNumberField {}

impl Hash for RealNumberField {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.poly.hash(state);
    }
}

impl fmt::Debug for RealNumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q[x]/({}) @ [{}]", self.0.poly, self.0.base)
    }
}

/// Element of a [`RealNumberField`], stored by rational coordinates in the
/// power basis `1, alpha, ..., alpha^(d-1)`.
#[derive(Clone)]
pub struct AlgebraicReal {
    field: RealNumberField,
    coords: Vec<BigRational>,
}

impl AlgebraicReal {
    /// Element from coordinates; longer inputs are reduced modulo the defining polynomial.
    pub fn new(field: &RealNumberField, coords: Vec<BigRational>) -> Self {
        let d = field.degree();
        let coords = if coords.len() > d {
            pad(QPoly::new(coords).rem(field.modulus()).into_coeffs(), d)
        } else {
            pad(coords, d)
        };
        AlgebraicReal {
            field: field.clone(),
            coords,
        }
    }

    pub fn from_poly(field: &RealNumberField, p: &QPoly) -> Self {
        Self::new(field, p.rem(field.modulus()).into_coeffs())
    }

    pub fn from_rational(field: &RealNumberField, q: BigRational) -> Self {
        Self::new(field, vec![q])
    }

    pub fn from_int(field: &RealNumberField, n: i64) -> Self {
        Self::from_rational(field, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero(field: &RealNumberField) -> Self {
        Self::new(field, Vec::new())
    }

    pub fn one(field: &RealNumberField) -> Self {
        Self::from_int(field, 1)
    }

    /// The distinguished root `alpha` itself.
    pub fn generator(field: &RealNumberField) -> Self {
        Self::from_poly(field, &QPoly::x())
    }

    pub fn field(&self) -> &RealNumberField {
        &self.field
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn as_qpoly(&self) -> QPoly {
        QPoly::new(self.coords.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.coords[1..]
            .iter()
            .all(Zero::is_zero)
            .then(|| self.coords[0].clone())
    }

    /// Same coordinates read in another field with the same defining polynomial
    /// (a real conjugate when the roots differ).
    pub fn with_field(&self, field: &RealNumberField) -> Self {
        assert_eq!(field.poly(), self.field.poly(), "conjugation needs equal polynomials");
        AlgebraicReal {
            field: field.clone(),
            coords: self.coords.clone(),
        }
    }

    fn check(&self, other: &Self) {
        assert!(
            self.field == other.field,
            "arithmetic on elements of different fields: {:?} vs {:?}",
            self.field,
            other.field
        );
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        AlgebraicReal {
            field: self.field.clone(),
            coords: self.coords.iter().map(|c| c * k).collect(),
        }
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(q) = self.as_rational() {
            return Some(Self::from_rational(&self.field, q.recip()));
        }
        let (g, s, _) = self.as_qpoly().xgcd(self.field.modulus());
        debug_assert_eq!(g, QPoly::one());
        Some(Self::from_poly(&self.field, &s))
    }

    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self * &i)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.field);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Evaluate an integer polynomial at this element.
    pub fn eval_poly(&self, p: &IntPolynomial) -> Self {
        let mut acc = Self::zero(&self.field);
        for c in p.coeffs().iter().rev() {
            acc = &(&acc * self) + &Self::from_rational(&self.field, BigRational::from_integer(c.clone()));
        }
        acc
    }

    /// Evaluate a rational polynomial at this element.
    pub fn eval_qpoly(&self, p: &QPoly) -> Self {
        let mut acc = Self::zero(&self.field);
        for c in p.coeffs().iter().rev() {
            acc = &(&acc * self) + &Self::from_rational(&self.field, c.clone());
        }
        acc
    }

    /// Enclosure of the real value using the field's current root interval.
    pub fn enclosure(&self) -> Interval {
        if let Some(q) = self.as_rational() {
            return Interval::point(q);
        }
        eval_interval(&self.as_qpoly(), &self.field.current_enclosure())
    }

    /// Enclosure of width at most `width`.
    pub fn enclosure_within(&self, width: &BigRational) -> Interval {
        if let Some(q) = self.as_rational() {
            return Interval::point(q);
        }
        let p = self.as_qpoly();
        let mut iv = eval_interval(&p, &self.field.current_enclosure());
        while &iv.width() > width {
            iv = eval_interval(&p, &self.field.refine(8));
        }
        iv
    }

    /// Sign of the real value, decided exactly.
    pub fn signum(&self) -> Ordering {
        if let Some(q) = self.as_rational() {
            return q.cmp(&BigRational::zero());
        }
        let p = self.as_qpoly();
        let mut iv = eval_interval(&p, &self.field.current_enclosure());
        loop {
            if iv.lo.is_positive() {
                return Ordering::Greater;
            }
            if iv.hi.is_negative() {
                return Ordering::Less;
            }
            // nonzero element of a field: the enclosure eventually excludes zero
            iv = eval_interval(&p, &self.field.refine(8));
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    /// Greatest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        if let Some(q) = self.as_rational() {
            return q.floor().to_integer();
        }
        let p = self.as_qpoly();
        let mut iv = eval_interval(&p, &self.field.current_enclosure());
        loop {
            // irrational values never sit on an integer, so the floors eventually agree
            let lo = iv.lo.floor();
            if lo == iv.hi.floor() {
                return lo.to_integer();
            }
            iv = eval_interval(&p, &self.field.refine(8));
        }
    }

    /// `self - floor(self)`, in `[0, 1)`.
    pub fn fract(&self) -> Self {
        let f = self.floor();
        self - &Self::from_rational(&self.field, BigRational::from_integer(f))
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(
            &self
                .enclosure_within(&BigRational::new(BigInt::one(), BigInt::from(1u64 << 55)))
                .midpoint(),
        )
    }

    /// Matrix of multiplication by `self` in the power basis (row `i` holds
    /// the coordinates of `self * alpha^i`).
    pub fn multiplication_matrix(&self) -> QMatrix {
        let d = self.field.degree();
        let alpha = Self::generator(&self.field);
        let mut cur = self.clone();
        let mut rows = Vec::with_capacity(d);
        for _ in 0..d {
            rows.push(cur.coords.clone());
            cur = &cur * &alpha;
        }
        rows
    }

    /// Norm down to Q.
    pub fn norm(&self) -> BigRational {
        let cp = charpoly_q(&self.multiplication_matrix());
        let c0 = cp.coeff(0);
        if self.field.degree().is_multiple_of(2) {
            c0
        } else {
            -c0
        }
    }

    pub fn trace(&self) -> BigRational {
        let m = self.multiplication_matrix();
        (0..m.len()).map(|i| m[i][i].clone()).sum()
    }

    /// Primitive irreducible integer polynomial with positive leading
    /// coefficient that annihilates this element.
    pub fn minimal_polynomial(&self) -> IntPolynomial {
        if let Some(q) = self.as_rational() {
            return IntPolynomial::new(vec![-q.numer().clone(), q.denom().clone()]).primitive_part();
        }
        charpoly_q(&self.multiplication_matrix())
            .squarefree_part()
            .to_primitive_int()
    }

    /// `Q(self)` as a field of its own, with the embedding that sends its
    /// generator to this value.
    pub fn root_field(&self) -> RealNumberField {
        let mp = self.minimal_polynomial();
        let mut ivs = isolate_real_roots(&mp).expect("nonzero minimal polynomial");
        let q = mp.to_q();
        let mut w = BigRational::new(BigInt::one(), BigInt::from(1024));
        loop {
            let e = self.enclosure_within(&w);
            let hits: Vec<usize> = (0..ivs.len()).filter(|&i| ivs[i].intersects(&e)).collect();
            if hits.len() == 1 {
                return RealNumberField::new_unchecked(mp, ivs.swap_remove(hits[0])).unwrap();
            }
            for iv in ivs.iter_mut() {
                while !iv.is_point() && iv.width() > w {
                    *iv = bisect_once(&q, iv);
                }
            }
            w = &w / BigRational::from_integer(BigInt::from(64));
        }
    }

    /// Degree of the element over Q.
    pub fn degree(&self) -> usize {
        self.minimal_polynomial().degree().unwrap()
    }

    /// Canonical text form `poly=...;root=lo,hi;coords=...`.
    pub fn canonical(&self) -> String {
        format!(
            "poly={};root={};coords={}",
            self.field.poly().to_coeff_string(),
            self.field.interval(),
            self.coords
                .iter()
                .map(fmt_rational)
                .collect::<Vec<_>>()
                .join(",")
        )
    }

    pub fn parse(s: &str) -> Result<Self, ExactError> {
        let mut poly = None;
        let mut root = None;
        let mut coords = None;
        for part in s.trim().split(';') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| ExactError::Parse(format!("expected key=value in {part:?}")))?;
            match k.trim() {
                "poly" => {
                    poly = Some(IntPolynomial::parse_coeff_string(v).map_err(ExactError::Parse)?)
                }
                "root" => {
                    let (lo, hi) = v
                        .split_once(',')
                        .ok_or_else(|| ExactError::Parse(format!("root needs lo,hi: {v:?}")))?;
                    let (lo, hi) = (parse_rational(lo)?, parse_rational(hi)?);
                    if lo > hi {
                        return Err(ExactError::Parse(format!("empty root interval {v:?}")));
                    }
                    root = Some(Interval::new(lo, hi));
                }
                "coords" => {
                    coords = Some(
                        v.split(',')
                            .map(parse_rational)
                            .collect::<Result<Vec<_>, _>>()?,
                    )
                }
                other => return Err(ExactError::Parse(format!("unknown key {other:?}"))),
            }
        }
        let poly = poly.ok_or_else(|| ExactError::Parse("missing poly".into()))?;
        let root = root.ok_or_else(|| ExactError::Parse("missing root".into()))?;
        let coords = coords.ok_or_else(|| ExactError::Parse("missing coords".into()))?;
        if poly.degree().unwrap_or(0) == 0 {
            return Err(ExactError::Parse("poly must have positive degree".into()));
        }
        let field = RealNumberField::from_root(&poly, root)?;
        Ok(Self::from_poly(&field, &QPoly::new(coords)))
    }

    /// Parse a list of canonical forms separated by `|`.
    pub fn parse_list(s: &str) -> Result<Vec<Self>, ExactError> {
        s.split('|').map(Self::parse).collect()
    }
}

fn pad(mut v: Vec<BigRational>, d: usize) -> Vec<BigRational> {
    v.resize(d, BigRational::zero());
    v
}

impl PartialEq for AlgebraicReal {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords && self.field == other.field
    }
}

impl Eq for AlgebraicReal {}

impl Hash for AlgebraicReal {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.field.hash(state);
        self.coords.hash(state);
    }
}

impl fmt::Debug for AlgebraicReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (~{:.6})", self.canonical(), self.to_f64())
    }
}

impl fmt::Display for AlgebraicReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

impl FromStr for AlgebraicReal {
    type Err = ExactError;
    fn from_str(s: &str) -> Result<Self, ExactError> {
        Self::parse(s)
    }
}

impl Serialize for AlgebraicReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.canonical())
    }
}

impl<'de> Deserialize<'de> for AlgebraicReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Self::parse(&s).map_err(serde::de::Error::custom)
    }
}

impl Add for &AlgebraicReal {
    type Output = AlgebraicReal;
    fn add(self, rhs: &AlgebraicReal) -> AlgebraicReal {
        self.check(rhs);
        AlgebraicReal {
            field: self.field.clone(),
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &AlgebraicReal {
    type Output = AlgebraicReal;
    fn sub(self, rhs: &AlgebraicReal) -> AlgebraicReal {
        self.check(rhs);
        AlgebraicReal {
            field: self.field.clone(),
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &AlgebraicReal {
    type Output = AlgebraicReal;
    fn mul(self, rhs: &AlgebraicReal) -> AlgebraicReal {
        self.check(rhs);
        if let Some(q) = self.as_rational() {
            return rhs.scale(&q);
        }
        if let Some(q) = rhs.as_rational() {
            return self.scale(&q);
        }
        AlgebraicReal::from_poly(&self.field, &(&self.as_qpoly() * &rhs.as_qpoly()))
    }
}

impl Neg for &AlgebraicReal {
    type Output = AlgebraicReal;
    fn neg(self) -> AlgebraicReal {
        AlgebraicReal {
            field: self.field.clone(),
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

/// Exact comparison of two algebraic reals, possibly from different fields.
/// Elements of different fields are first separated numerically; when that
/// fails a common field is built (subject to `cap`).
pub fn compare(x: &AlgebraicReal, y: &AlgebraicReal, cap: usize) -> Result<Ordering, ExactError> {
    if x.field == y.field {
        return Ok((x - y).signum());
    }
    if let Some(q) = y.as_rational() {
        return Ok((x - &AlgebraicReal::from_rational(&x.field, q)).signum());
    }
    if let Some(q) = x.as_rational() {
        return Ok((&AlgebraicReal::from_rational(&y.field, q) - y).signum());
    }
    let mut width = BigRational::new(BigInt::one(), BigInt::from(1u64 << 20));
    for _ in 0..4 {
        let ex = x.enclosure_within(&width);
        let ey = y.enclosure_within(&width);
        if let Some(o) = ex.separation(&ey) {
            return Ok(o);
        }
        width = &width * &width;
    }
    let c = super::compositum::compositum(&x.field, &y.field, cap)?;
    Ok((&c.embed_left(x) - &c.embed_right(y)).signum())
}

/// [`compare`] with the default degree cap.
pub fn compare_default(x: &AlgebraicReal, y: &AlgebraicReal) -> Result<Ordering, ExactError> {
    compare(x, y, DEFAULT_DEGREE_CAP)
}
