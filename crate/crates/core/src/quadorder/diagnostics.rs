//! Field-theoretic checks on a Hecke unit relative to a quadratic order.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::contfrac::HeckeUnit;
use crate::exact::{
    compositum, factor_over_field, isolate_real_roots, AlgebraicReal, IntPolynomial, KPoly,
    DEFAULT_DEGREE_CAP,
};

use super::{is_unit_of, OrderError, QuadOrder, UnitCheck};

/// Largest `[K:k]` for which normality and the Galois group are examined.
pub const NORMALITY_DEGREE_CAP: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDiagnostics {
    pub min_poly: IntPolynomial,
    /// Monic irreducible factors of the minimal polynomial over `k`, coefficients ascending.
    pub factors_over_k: Vec<Vec<AlgebraicReal>>,
    /// `[K:k]` for `K = k(lambda)`.
    pub degree_over_k: usize,
    pub totally_real: bool,
    /// `None` when `[K:k]` exceeds the normality cap.
    pub normal: Option<bool>,
    pub abelian: Option<bool>,
    /// Automorphisms of `K/k` as permutations of the roots in `K` of the factor through lambda.
    pub automorphisms: Vec<Vec<usize>>,
    /// Norm of lambda from `K` down to `k`.
    pub norm_to_k: AlgebraicReal,
    pub norm_to_k_unit: UnitCheck,
    pub lambda_in_order: UnitCheck,
}

pub fn field_diagnostics(unit: &HeckeUnit, order: &QuadOrder) -> Result<FieldDiagnostics, OrderError> {
    let lambda = &unit.value;
    let min_poly = lambda.minimal_polynomial();
    let deg = min_poly.degree().unwrap();
    let totally_real = isolate_real_roots(&min_poly)?.len() == deg;
    let k = order.field();
    if 2 * deg > DEFAULT_DEGREE_CAP {
        return Err(OrderError::DiagnosticSkipped(format!(
            "minimal polynomial of degree {deg} is beyond the factorization cap"
        )));
    }
    let q_lambda = lambda.root_field();
    let c = compositum(&k, &q_lambda, DEFAULT_DEGREE_CAP)?;
    let lam = c.right.clone();
    let factors = factor_over_field(&KPoly::from_int(&k, &min_poly), DEFAULT_DEGREE_CAP)?;
    let embed_poly = |f: &KPoly| KPoly::new(&c.field, f.coeffs().iter().map(|a| c.embed_left(a)).collect());
    let h = factors
        .iter()
        .find(|f| embed_poly(f).eval(&lam).is_zero())
        .expect("lambda is a root of one factor")
        .clone();
    let degree_over_k = h.degree().unwrap();
    let sign = if degree_over_k % 2 == 0 { 1 } else { -1 };
    let norm_to_k = h.coeff(0).scale(&BigRational::from_integer(BigInt::from(sign)));
    let norm_to_k_unit = is_unit_of(&norm_to_k, order);
    let lambda_in_order = is_unit_of(lambda, order);
    let factors_over_k = factors.iter().map(|f| f.coeffs().to_vec()).collect();

    let (normal, abelian, automorphisms) = if degree_over_k == 1 {
        (Some(true), Some(true), vec![vec![0]])
    } else if degree_over_k > NORMALITY_DEGREE_CAP {
        (None, None, Vec::new())
    } else {
        let hc = embed_poly(&h);
        let mut roots: Vec<AlgebraicReal> = factor_over_field(&hc, DEFAULT_DEGREE_CAP)?
            .into_iter()
            .filter(|f| f.degree() == Some(1))
            .map(|f| -&f.coeff(0))
            .collect();
        roots.sort_by(|a, b| (a - b).signum());
        if roots.len() != degree_over_k {
            (Some(false), None, Vec::new())
        } else {
            // sigma_j fixes k and sends lambda to roots[j]; gamma = lambda + s*sqrt(d_K)
            let shift = BigRational::from_integer(BigInt::from(c.shift));
            let perms: Vec<Vec<usize>> = roots
                .iter()
                .map(|r| {
                    let img_gamma = r + &c.left.scale(&shift);
                    roots
                        .iter()
                        .map(|x| {
                            let y = img_gamma.eval_qpoly(&x.as_qpoly());
                            roots.iter().position(|z| z == &y).expect("automorphism permutes roots")
                        })
                        .collect()
                })
                .collect();
            let compose = |p: &[usize], q: &[usize]| -> Vec<usize> { q.iter().map(|&i| p[i]).collect() };
            let abelian = perms
                .iter()
                .all(|p| perms.iter().all(|q| compose(p, q) == compose(q, p)));
            (Some(true), Some(abelian), perms)
        }
    };
    Ok(FieldDiagnostics {
        min_poly,
        factors_over_k,
        degree_over_k,
        totally_real,
        normal,
        abelian,
        automorphisms,
        norm_to_k,
        norm_to_k_unit,
        lambda_in_order,
    })
}
