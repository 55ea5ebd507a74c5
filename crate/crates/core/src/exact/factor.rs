//! Factorization over the rationals for desk-scale degrees.
//!
//! Complex roots are located numerically; candidate factors are rebuilt from
//! root subsets, rounded to integer polynomials and accepted only after exact
//! division succeeds.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::poly::IntPolynomial;
use super::roots::ratio_to_f64;
use super::ExactError;

/// Largest squarefree degree the factorizer accepts.
pub const FACTOR_DEGREE_CAP: usize = 24;

/// `p = unit * prod(factor^multiplicity)` with primitive irreducible factors
/// of positive leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: BigInt,
    pub factors: Vec<(IntPolynomial, usize)>,
}

impl Factorization {
    pub fn expand(&self) -> IntPolynomial {
        let mut acc = IntPolynomial::new(vec![self.unit.clone()]);
        for (f, m) in &self.factors {
            acc = &acc * &f.pow(*m as u32);
        }
        acc
    }

    pub fn is_irreducible(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }
}

pub fn factor_over_rationals(p: &IntPolynomial) -> Result<Factorization, ExactError> {
    if p.is_zero() {
        return Err(ExactError::ZeroPolynomial);
    }
    let mut unit = p.content();
    if p.leading().unwrap().is_negative() {
        unit = -unit;
    }
    let prim = p.primitive_part();
    let mut factors = Vec::new();
    if prim.degree() == Some(0) {
        return Ok(Factorization { unit, factors });
    }
    for (sf, mult) in prim.to_q().squarefree_decomposition() {
        for f in factor_squarefree(&sf.to_primitive_int())? {
            factors.push((f, mult));
        }
    }
    factors.sort_by(|a, b| {
        a.0.degree()
            .cmp(&b.0.degree())
            .then_with(|| a.0.coeffs().cmp(b.0.coeffs()))
    });
    Ok(Factorization { unit, factors })
}

/// Irreducible factors of a primitive squarefree polynomial.
fn factor_squarefree(g: &IntPolynomial) -> Result<Vec<IntPolynomial>, ExactError> {
    let mut out = Vec::new();
    let mut g = g.clone();
    if g.degree().unwrap_or(0) <= 1 {
        return Ok(vec![g]);
    }
    if g.coeff(0).is_zero() {
        out.push(IntPolynomial::from_i64s(&[0, 1]));
        g = g.div_exact(&IntPolynomial::from_i64s(&[0, 1])).unwrap();
    }
    let deg = g.degree().unwrap();
    if deg > FACTOR_DEGREE_CAP {
        return Err(ExactError::FactorDegreeTooLarge(deg));
    }
    if deg <= 1 {
        out.push(g);
        return Ok(out);
    }
    let roots = complex_roots(&g).ok_or(ExactError::NumericFailure)?;
    let mut units = group_conjugates(&roots);
    'outer: loop {
        let d = g.degree().unwrap();
        if d <= 1 {
            if d == 1 {
                out.push(g.clone());
            }
            break;
        }
        let lc = ratio_to_f64(&BigRational::from_integer(g.leading().unwrap().clone()));
        for k in 1..=d / 2 {
            if let Some((h, used)) = search_subset(&units, k, lc, &g) {
                g = g.div_exact(&h).expect("verified factor");
                out.push(h);
                let mut idx = used;
                idx.sort_unstable_by(|a, b| b.cmp(a));
                for i in idx {
                    units.remove(i);
                }
                continue 'outer;
            }
        }
        out.push(g.clone());
        break;
    }
    Ok(out)
}

/// Roots grouped into real singletons and conjugate pairs.
fn group_conjugates(roots: &[Complex64]) -> Vec<Vec<Complex64>> {
    let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
    let tol = 1e-7 * scale;
    let mut used = vec![false; roots.len()];
    let mut units = Vec::new();
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let r = roots[i];
        if r.im.abs() <= tol {
            units.push(vec![Complex64::new(r.re, 0.0)]);
            continue;
        }
        let partner = (0..roots.len())
            .filter(|&j| !used[j])
            .min_by(|&a, &b| {
                (roots[a] - r.conj())
                    .norm()
                    .partial_cmp(&(roots[b] - r.conj()).norm())
                    .unwrap()
            });
        match partner {
            Some(j) => {
                used[j] = true;
                units.push(vec![r, r.conj()]);
            }
            None => units.push(vec![r]),
        }
    }
    units
}

fn search_subset(
    units: &[Vec<Complex64>],
    degree: usize,
    lc: f64,
    g: &IntPolynomial,
) -> Option<(IntPolynomial, Vec<usize>)> {
    let mut chosen = Vec::new();
    rec(units, 0, degree, lc, g, &mut chosen, Complex64::new(0.0, 0.0))
}

fn rec(
    units: &[Vec<Complex64>],
    start: usize,
    remaining: usize,
    lc: f64,
    g: &IntPolynomial,
    chosen: &mut Vec<usize>,
    sum: Complex64,
) -> Option<(IntPolynomial, Vec<usize>)> {
    if remaining == 0 {
        // trace filter: lc * (sum of roots) must be close to an integer
        let t = lc * sum.re;
        if (t - t.round()).abs() > 1e-5 * (1.0 + t.abs()) {
            return None;
        }
        let roots: Vec<Complex64> = chosen.iter().flat_map(|&i| units[i].clone()).collect();
        let cand = rebuild(&roots, lc)?;
        let h = cand.primitive_part();
        if h.degree().unwrap_or(0) == 0 {
            return None;
        }
        return g.div_exact(&h).map(|_| (h, chosen.clone()));
    }
    for i in start..units.len() {
        let w = units[i].len();
        if w > remaining {
            continue;
        }
        chosen.push(i);
        let s = units[i].iter().fold(sum, |acc, r| acc + r);
        if let Some(found) = rec(units, i + 1, remaining - w, lc, g, chosen, s) {
            return Some(found);
        }
        chosen.pop();
    }
    None
}

/// Round `lc * prod (x - r)` to an integer polynomial.
fn rebuild(roots: &[Complex64], lc: f64) -> Option<IntPolynomial> {
    let mut c = vec![Complex64::new(lc, 0.0)];
    for r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (i, a) in c.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= a * r;
        }
        c = next;
    }
    let scale = c.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let tol = (1e-6 * scale).min(0.45);
    let mut ints = Vec::with_capacity(c.len());
    for z in &c {
        if z.im.abs() > tol || (z.re - z.re.round()).abs() > tol {
            return None;
        }
        ints.push(BigInt::from(z.re.round().to_i128()?));
    }
    Some(IntPolynomial::new(ints))
}

/// All complex roots by the Aberth-Ehrlich iteration, polished with Newton steps.
pub fn complex_roots(p: &IntPolynomial) -> Option<Vec<Complex64>> {
    let n = p.degree()?;
    if n == 0 {
        return Some(Vec::new());
    }
    let coeffs: Vec<f64> = p
        .coeffs()
        .iter()
        .map(|c| c.to_f64().filter(|x| x.is_finite()))
        .collect::<Option<Vec<_>>>()?;
    let lc = coeffs[n];
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lc).collect();
    let radius = 1.0 + monic[..n].iter().map(|c| c.abs()).fold(0.0, f64::max);
    let r0 = radius.min(
        // Fujiwara-type bound is usually much tighter
        2.0 * (0..n)
            .map(|k| monic[k].abs().powf(1.0 / (n - k) as f64))
            .fold(0.0, f64::max),
    );
    let r0 = if r0 > 0.0 { r0 } else { 1.0 };
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            Complex64::from_polar(r0 * 0.9, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64)
        })
        .collect();
    let eval = |x: Complex64| -> (Complex64, Complex64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for c in monic.iter().rev() {
            d = d * x + v;
            v = v * x + c;
        }
        (v, d)
    };
    for _ in 0..2000 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let (v, d) = eval(z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let s: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let diff = z[i] - z[j];
                    if diff.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        diff.inv()
                    }
                })
                .sum();
            let denom = Complex64::new(1.0, 0.0) - ratio * s;
            let step = if denom.norm() == 0.0 { ratio } else { ratio / denom };
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    for r in z.iter_mut() {
        for _ in 0..3 {
            let (v, d) = eval(*r);
            if d.norm() == 0.0 {
                break;
            }
            let step = v / d;
            if step.is_finite() {
                *r -= step;
            }
        }
    }
    z.iter().all(|r| r.is_finite()).then_some(z)
}

/// Whether a polynomial is irreducible over the rationals.
pub fn is_irreducible(p: &IntPolynomial) -> Result<bool, ExactError> {
    if p.degree().unwrap_or(0) == 0 {
        return Ok(false);
    }
    Ok(factor_over_rationals(p)?.is_irreducible())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ip(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64s(c)
    }

    #[test]
    fn splits_difference_of_squares() {
        let f = factor_over_rationals(&ip(&[-1, 0, 1])).unwrap();
        assert_eq!(f.factors, vec![(ip(&[-1, 1]), 1), (ip(&[1, 1]), 1)]);
    }

    #[test]
    fn golden_is_irreducible() {
        assert!(is_irreducible(&ip(&[-1, 1, 1])).unwrap());
    }

    #[test]
    fn x4_minus_1() {
        let f = factor_over_rationals(&ip(&[-1, 0, 0, 0, 1])).unwrap();
        let polys: Vec<_> = f.factors.iter().map(|(p, _)| p.clone()).collect();
        assert_eq!(polys, vec![ip(&[-1, 1]), ip(&[1, 1]), ip(&[1, 0, 1])]);
        assert_eq!(f.expand(), ip(&[-1, 0, 0, 0, 1]));
    }

    #[test]
    fn content_and_multiplicity() {
        // 6 (x-1)^2 (2x+1)
        let p = &(&ip(&[6]) * &ip(&[-1, 1]).pow(2)) * &ip(&[1, 2]);
        let f = factor_over_rationals(&p).unwrap();
        assert_eq!(f.unit, BigInt::from(6));
        assert_eq!(f.expand(), p);
        assert!(f.factors.contains(&(ip(&[-1, 1]), 2)));
        assert!(f.factors.contains(&(ip(&[1, 2]), 1)));
    }

    #[test]
    fn product_of_quartics() {
        // (x^4 - 10x^2 + 1)(x^4 + x + 1): both irreducible
        let a = ip(&[1, 0, -10, 0, 1]);
        let b = ip(&[1, 1, 0, 0, 1]);
        let f = factor_over_rationals(&(&a * &b)).unwrap();
        assert_eq!(f.factors.len(), 2);
        assert_eq!(f.expand(), &a * &b);
    }

    #[test]
    fn zero_rejected() {
        assert!(factor_over_rationals(&IntPolynomial::zero()).is_err());
    }
}
