//! Polynomials over a real number field, factorization over such fields
//! (norm method), and the common field of two real number fields.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::factor::factor_over_rationals;
use super::field::{AlgebraicReal, RealNumberField};
use super::matrix::{charpoly_q, solve_in_row_span, QMatrix};
use super::poly::{IntPolynomial, QPoly};
use super::roots::{bisect_once, isolate_real_roots, Interval};
use super::ExactError;

/// Univariate polynomial with coefficients in a [`RealNumberField`].
#[derive(Clone, PartialEq, Eq)]
pub struct KPoly {
    field: RealNumberField,
    coeffs: Vec<AlgebraicReal>,
}

impl KPoly {
    pub fn new(field: &RealNumberField, mut coeffs: Vec<AlgebraicReal>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        KPoly {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn from_qpoly(field: &RealNumberField, p: &QPoly) -> Self {
        Self::new(
            field,
            p.coeffs()
                .iter()
                .map(|c| AlgebraicReal::from_rational(field, c.clone()))
                .collect(),
        )
    }

    pub fn from_int(field: &RealNumberField, p: &IntPolynomial) -> Self {
        Self::from_qpoly(field, &p.to_q())
    }

    pub fn zero(field: &RealNumberField) -> Self {
        Self::new(field, Vec::new())
    }

    pub fn one(field: &RealNumberField) -> Self {
        Self::new(field, vec![AlgebraicReal::one(field)])
    }

    /// `x - c`.
    pub fn linear(c: &AlgebraicReal) -> Self {
        let k = c.field();
        Self::new(k, vec![-c, AlgebraicReal::one(k)])
    }

    pub fn field(&self) -> &RealNumberField {
        &self.field
    }

    pub fn coeffs(&self) -> &[AlgebraicReal] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> AlgebraicReal {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| AlgebraicReal::zero(&self.field))
    }

    pub fn monic(&self) -> Self {
        match self.coeffs.last() {
            None => self.clone(),
            Some(lc) => {
                let inv = lc.inv().unwrap();
                Self::new(&self.field, self.coeffs.iter().map(|c| c * &inv).collect())
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            &self.field,
            (0..n).map(|i| &self.coeff(i) + &other.coeff(i)).collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            &self.field,
            (0..n).map(|i| &self.coeff(i) - &other.coeff(i)).collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.field);
        }
        let mut out = vec![AlgebraicReal::zero(&self.field); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Self::new(&self.field, out)
    }

    pub fn scale(&self, k: &AlgebraicReal) -> Self {
        Self::new(&self.field, self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let lc_inv = d.coeffs[dd].inv().unwrap();
        let mut r = self.coeffs.clone();
        let n = self.coeffs.len();
        if n <= dd {
            return (Self::zero(&self.field), self.clone());
        }
        let mut q = vec![AlgebraicReal::zero(&self.field); n - dd];
        for i in (0..n - dd).rev() {
            let c = &r[i + dd] * &lc_inv;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[i + j] = &r[i + j] - &(&c * dc);
                }
            }
            q[i] = c;
        }
        r.truncate(dd);
        (Self::new(&self.field, q), Self::new(&self.field, r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            &self.field,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.scale(&BigRational::from_integer(BigInt::from(i))))
                .collect(),
        )
    }

    pub fn eval(&self, x: &AlgebraicReal) -> AlgebraicReal {
        let mut acc = AlgebraicReal::zero(&self.field);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// `q(x + c)` for a rational polynomial `q`.
    pub fn compose_shift(q: &QPoly, c: &AlgebraicReal) -> Self {
        let k = c.field();
        let lin = KPoly::new(k, vec![c.clone(), AlgebraicReal::one(k)]);
        let mut acc = KPoly::zero(k);
        for a in q.coeffs().iter().rev() {
            acc = acc
                .mul(&lin)
                .add(&KPoly::new(k, vec![AlgebraicReal::from_rational(k, a.clone())]));
        }
        acc
    }

    pub fn squarefree_part(&self) -> Self {
        let g = self.gcd(&self.derivative());
        self.divrem(&g).0.monic()
    }
}

impl fmt::Debug for KPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}

/// The algebra `K[y]/(p(y))` for monic `p`, viewed as a Q-vector space with
/// basis `alpha^i y^j`, flattened at index `j*d + i`.
struct TensorAlgebra {
    p: KPoly,
    d: usize,
    n: usize,
}

impl TensorAlgebra {
    fn new(p: &KPoly) -> Self {
        TensorAlgebra {
            p: p.monic(),
            d: p.field().degree(),
            n: p.degree().unwrap(),
        }
    }

    fn dim(&self) -> usize {
        self.d * self.n
    }

    fn mul(&self, a: &KPoly, b: &KPoly) -> KPoly {
        a.mul(b).rem(&self.p)
    }

    fn flatten(&self, a: &KPoly) -> Vec<BigRational> {
        let mut out = Vec::with_capacity(self.dim());
        for j in 0..self.n {
            out.extend(a.coeff(j).coords().iter().cloned());
        }
        out
    }

    fn basis(&self, idx: usize) -> KPoly {
        let k = self.p.field();
        let (j, i) = (idx / self.d, idx % self.d);
        let mut coords = vec![BigRational::zero(); self.d];
        coords[i] = BigRational::one();
        let mut cs = vec![AlgebraicReal::zero(k); j + 1];
        cs[j] = AlgebraicReal::new(k, coords);
        KPoly::new(k, cs)
    }

    /// Characteristic polynomial over Q of multiplication by `e`.
    fn charpoly(&self, e: &KPoly) -> QPoly {
        let m: QMatrix = (0..self.dim())
            .map(|idx| self.flatten(&self.mul(e, &self.basis(idx))))
            .collect();
        charpoly_q(&m)
    }

    fn powers(&self, e: &KPoly, count: usize) -> Vec<Vec<BigRational>> {
        let mut cur = KPoly::one(self.p.field());
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            out.push(self.flatten(&cur));
            cur = self.mul(&cur, e);
        }
        out
    }
}

/// Shift sequence 0, 1, -1, 2, -2, ...
fn shifts() -> impl Iterator<Item = i64> {
    (0..).map(|k: i64| if k % 2 == 1 { (k + 1) / 2 } else { -k / 2 })
}

/// Factor a polynomial over its coefficient field into monic irreducible
/// factors (multiplicities dropped). The norm polynomial has degree
/// `[K:Q] * deg p`, bounded by `cap`.
pub fn factor_over_field(p: &KPoly, cap: usize) -> Result<Vec<KPoly>, ExactError> {
    if p.is_zero() {
        return Err(ExactError::ZeroPolynomial);
    }
    let k = p.field().clone();
    let p = p.squarefree_part();
    match p.degree() {
        Some(0) => return Ok(Vec::new()),
        Some(1) => return Ok(vec![p]),
        _ => {}
    }
    let dim = k.degree() * p.degree().unwrap();
    if dim > cap {
        return Err(ExactError::CompositumTooLarge { degree: dim, cap });
    }
    let alg = TensorAlgebra::new(&p);
    let alpha = AlgebraicReal::generator(&k);
    for s in shifts().take(64) {
        let sa = alpha.scale(&BigRational::from_integer(BigInt::from(s)));
        // y + s*alpha
        let e = KPoly::new(&k, vec![sa.clone(), AlgebraicReal::one(&k)]);
        let norm = alg.charpoly(&e);
        if norm.gcd(&norm.derivative()).degree() != Some(0) {
            continue;
        }
        let mut out = Vec::new();
        for (f, _) in factor_over_rationals(&norm.to_primitive_int())?.factors {
            // N_i(y + s*alpha) shares exactly one irreducible factor with p
            let g = p.gcd(&KPoly::compose_shift(&f.to_q(), &sa));
            if g.degree().unwrap_or(0) > 0 {
                out.push(g);
            }
        }
        out.sort_by_key(|g| g.degree());
        return Ok(out);
    }
    Err(ExactError::NumericFailure)
}

/// All roots of `p` lying in `k`, in increasing order.
pub fn roots_in_field(p: &IntPolynomial, k: &RealNumberField, cap: usize) -> Result<Vec<AlgebraicReal>, ExactError> {
    let kp = KPoly::from_int(k, p);
    let mut roots: Vec<AlgebraicReal> = factor_over_field(&kp, cap)?
        .into_iter()
        .filter(|f| f.degree() == Some(1))
        .map(|f| -&f.coeff(0))
        .collect();
    roots.sort_by(|a, b| (a - b).signum());
    Ok(roots)
}

/// A real number field containing two given ones, with the images of their generators.
#[derive(Clone, Debug)]
pub struct Compositum {
    pub field: RealNumberField,
    /// Image of the left generator as an element of `field`.
    pub left: AlgebraicReal,
    /// Image of the right generator.
    pub right: AlgebraicReal,
    /// `gamma = right + shift * left` generates `field`.
    pub shift: i64,
}

impl Compositum {
    pub fn embed_left(&self, x: &AlgebraicReal) -> AlgebraicReal {
        embed(x, &self.left)
    }

    pub fn embed_right(&self, x: &AlgebraicReal) -> AlgebraicReal {
        embed(x, &self.right)
    }
}

fn embed(x: &AlgebraicReal, image: &AlgebraicReal) -> AlgebraicReal {
    let k = image.field();
    let mut acc = AlgebraicReal::zero(k);
    for c in x.coords().iter().rev() {
        acc = &(&acc * image) + &AlgebraicReal::from_rational(k, c.clone());
    }
    acc
}

/// Smallest real number field containing both `a` and `b` (with their
/// distinguished embeddings).
pub fn compositum(a: &RealNumberField, b: &RealNumberField, cap: usize) -> Result<Compositum, ExactError> {
    if a == b {
        return Ok(Compositum {
            field: a.clone(),
            left: AlgebraicReal::generator(a),
            right: AlgebraicReal::generator(a),
            shift: 0,
        });
    }
    let dim = a.degree() * b.degree();
    if dim > cap {
        return Err(ExactError::CompositumTooLarge { degree: dim, cap });
    }
    let alg = TensorAlgebra::new(&KPoly::from_qpoly(a, b.modulus()));
    let alpha = AlgebraicReal::generator(a);
    let y = KPoly::new(a, vec![AlgebraicReal::zero(a), AlgebraicReal::one(a)]);
    let alpha_k = KPoly::new(a, vec![alpha.clone()]);
    for s in shifts().skip(1).take(64) {
        let gamma = KPoly::new(a, vec![alpha.scale(&BigRational::from_integer(BigInt::from(s))), AlgebraicReal::one(a)]);
        let cp = alg.charpoly(&gamma);
        if cp.gcd(&cp.derivative()).degree() != Some(0) {
            continue;
        }
        // gamma generates the algebra: express alpha and y in powers of gamma
        let pw = alg.powers(&gamma, dim);
        let ca = solve_in_row_span(&pw, &alg.flatten(&alpha_k)).ok_or(ExactError::NumericFailure)?;
        let cy = solve_in_row_span(&pw, &alg.flatten(&y)).ok_or(ExactError::NumericFailure)?;
        let field = locate_root(&cp, a, b, s)?;
        return Ok(Compositum {
            left: AlgebraicReal::from_poly(&field, &QPoly::new(ca)),
            right: AlgebraicReal::from_poly(&field, &QPoly::new(cy)),
            field,
            shift: s,
        });
    }
    Err(ExactError::NumericFailure)
}

/// The field of the irreducible factor of `cp` whose real root equals
/// `beta + s*alpha`.
fn locate_root(cp: &QPoly, a: &RealNumberField, b: &RealNumberField, s: i64) -> Result<RealNumberField, ExactError> {
    let mut cands: Vec<(IntPolynomial, QPoly, Interval)> = Vec::new();
    for (f, _) in factor_over_rationals(&cp.to_primitive_int())?.factors {
        let fq = f.to_q();
        for iv in isolate_real_roots(&f)? {
            cands.push((f.clone(), fq.clone(), iv));
        }
    }
    let sq = BigRational::from_integer(BigInt::from(s));
    let mut width = BigRational::new(BigInt::one(), BigInt::from(1024));
    loop {
        let target = b.root_enclosure(&width).add(&a.root_enclosure(&width).scale(&sq));
        cands.retain(|(_, _, iv)| iv.intersects(&target));
        if cands.len() == 1 {
            let (f, _, iv) = cands.pop().unwrap();
            return RealNumberField::new_unchecked(f, iv);
        }
        if cands.is_empty() {
            return Err(ExactError::NumericFailure);
        }
        for (_, fq, iv) in cands.iter_mut() {
            for _ in 0..4 {
                *iv = bisect_once(fq, iv);
            }
        }
        width = &width / BigRational::from_integer(BigInt::from(16));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::DEFAULT_DEGREE_CAP;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn sqrt_field(n: i64) -> RealNumberField {
        RealNumberField::new(
            &IntPolynomial::from_i64s(&[-n, 0, 1]),
            Interval::new(rat(0), rat(n.max(2))),
        )
        .unwrap()
    }

    #[test]
    fn compositum_of_two_quadratics() {
        let a = sqrt_field(2);
        let b = sqrt_field(3);
        let c = compositum(&a, &b, DEFAULT_DEGREE_CAP).unwrap();
        assert_eq!(c.field.degree(), 4);
        assert_eq!(c.left.minimal_polynomial(), IntPolynomial::from_i64s(&[-2, 0, 1]));
        assert_eq!(c.right.minimal_polynomial(), IntPolynomial::from_i64s(&[-3, 0, 1]));
        assert!(c.left.is_positive() && c.right.is_positive());
        let prod = &c.left * &c.right;
        assert_eq!(prod.minimal_polynomial(), IntPolynomial::from_i64s(&[-6, 0, 1]));
    }

    #[test]
    fn compositum_with_subfield_relation() {
        // Q(sqrt 2) and Q(sqrt 8) coincide
        let a = sqrt_field(2);
        let b = sqrt_field(8);
        let c = compositum(&a, &b, DEFAULT_DEGREE_CAP).unwrap();
        assert_eq!(c.field.degree(), 2);
        assert_eq!(&c.left.scale(&rat(2)) - &c.right, AlgebraicReal::zero(&c.field));
    }

    #[test]
    fn compositum_respects_cap() {
        let a = sqrt_field(2);
        let b = sqrt_field(3);
        assert!(matches!(
            compositum(&a, &b, 3),
            Err(ExactError::CompositumTooLarge { degree: 4, cap: 3 })
        ));
    }

    #[test]
    fn factor_over_quadratic_field() {
        let k = sqrt_field(5);
        // x^2 - x - 1 splits over Q(sqrt 5)
        let fs = factor_over_field(&KPoly::from_int(&k, &IntPolynomial::from_i64s(&[-1, -1, 1])), 24).unwrap();
        assert_eq!(fs.len(), 2);
        assert!(fs.iter().all(|f| f.degree() == Some(1)));
        // x^2 - 2 stays irreducible
        let fs = factor_over_field(&KPoly::from_int(&k, &IntPolynomial::from_i64s(&[-2, 0, 1])), 24).unwrap();
        assert_eq!(fs.len(), 1);
    }

    #[test]
    fn roots_in_quadratic_field() {
        let k = sqrt_field(5);
        let roots = roots_in_field(&IntPolynomial::from_i64s(&[-1, -1, 1]), &k, 24).unwrap();
        assert_eq!(roots.len(), 2);
        let phi = AlgebraicReal::new(&k, vec![BigRational::new(1.into(), 2.into()), BigRational::new(1.into(), 2.into())]);
        assert_eq!(roots[1], phi);
        assert!(roots_in_field(&IntPolynomial::from_i64s(&[-3, 0, 1]), &k, 24).unwrap().is_empty());
    }
}
