//! Galois orbits of Hecke eigenforms and exact eigenvectors over the Hecke field.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::exact::{factor_over_rationals, isolate_real_roots, AlgebraicReal, IntMatrix, IntPolynomial, RealNumberField};

use super::p1::prime_divisors;
use super::{genus_formula, ModsymError, ModularSymbolSpace};

/// Shift bounds tried, in order, by the positivity search.
pub const DEFAULT_POSITIVITY_BOUNDS: [i64; 2] = [5, 10];

const DEFAULT_HECKE_BOUND: i64 = 20;

/// The operator whose characteristic polynomial splits the plus-subspace into orbits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparatingOperator {
    pub label: String,
    /// `(n, c)` pairs of the combination `sum c T_n`.
    pub terms: Vec<(i64, i64)>,
    pub matrix: IntMatrix,
    pub char_poly: IntPolynomial,
}

#[derive(Clone, Debug)]
pub struct EigenOrbit {
    /// Irreducible factor of the separating operator's characteristic polynomial.
    pub factor: IntPolynomial,
    /// Real embeddings of the Hecke field, in increasing order of the separating eigenvalue.
    pub embeddings: Vec<RealNumberField>,
    /// `a_n` in the first embedding.
    pub eigenvalues: BTreeMap<i64, AlgebraicReal>,
    /// Right eigenvector of every `T_n`, in the first embedding.
    pub eigenvector: Vec<AlgebraicReal>,
    pub is_anosov_hecke: bool,
    pub totally_real: bool,
    /// Smallest proper divisor level whose Hecke data matches this orbit.
    pub old_level: Option<i64>,
}

impl EigenOrbit {
    pub fn degree(&self) -> usize {
        self.factor.degree().unwrap()
    }

    pub fn field(&self) -> &RealNumberField {
        &self.embeddings[0]
    }

    /// `a_n` under embedding `e`.
    pub fn eigenvalue(&self, n: i64, e: usize) -> Option<AlgebraicReal> {
        let f = self.embeddings.get(e)?;
        self.eigenvalues.get(&n).map(|a| a.with_field(f))
    }

    pub fn summary(&self) -> OrbitSummary {
        OrbitSummary {
            factor: self.factor.clone(),
            kf: format!("poly={};root={}", self.field().poly().to_coeff_string(), self.field().interval()),
            degree: self.degree(),
            anosov: self.is_anosov_hecke,
            totally_real: self.totally_real,
            old_level: self.old_level,
            ap: self
                .eigenvalues
                .iter()
                .filter(|(n, _)| prime_divisors(**n).len() == 1 && prime_divisors(**n)[0] == **n)
                .map(|(n, a)| (*n, a.clone()))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitSummary {
    pub factor: IntPolynomial,
    #[serde(rename = "Kf")]
    pub kf: String,
    pub degree: usize,
    pub anosov: bool,
    pub totally_real: bool,
    pub old_level: Option<i64>,
    pub ap: BTreeMap<i64, AlgebraicReal>,
}

fn combination(ops: &BTreeMap<i64, IntMatrix>, terms: &[(i64, i64)]) -> IntMatrix {
    let g = ops[&1].nrows();
    terms.iter().fold(IntMatrix::zeros(g, g), |acc, (n, c)| acc.add(&ops[n].scale(&BigInt::from(*c))))
}

fn label(terms: &[(i64, i64)]) -> String {
    terms
        .iter()
        .map(|(n, c)| if *c == 1 { format!("T{n}") } else { format!("{c}*T{n}") })
        .collect::<Vec<_>>()
        .join("+")
}

/// Squarefree with only real roots, so that every factor gives a real orbit.
fn separates(p: &IntPolynomial) -> Result<bool, ModsymError> {
    let q = p.to_q();
    if q.gcd(&q.derivative()).degree() != Some(0) {
        return Ok(false);
    }
    Ok(isolate_real_roots(p)?.len() == p.degree().unwrap())
}

fn candidate_terms(level: i64, bound: i64, allow_bad: bool) -> Vec<Vec<(i64, i64)>> {
    let good = |p: i64| allow_bad || level % p != 0;
    let mut out: Vec<Vec<(i64, i64)>> = Vec::new();
    for p in [2, 3] {
        if p <= bound && good(p) {
            out.push(vec![(p, 1)]);
        }
    }
    if bound >= 3 && good(2) && good(3) {
        let mut combos: Vec<(i64, i64)> = Vec::new();
        for c2 in -3i64..=3 {
            for c3 in -3i64..=3 {
                if c2 != 0 && c3 != 0 {
                    combos.push((c2, c3));
                }
            }
        }
        combos.sort_by_key(|&(a, b)| (a.abs() + b.abs(), -a, -b));
        out.extend(combos.into_iter().map(|(a, b)| vec![(2, a), (3, b)]));
    }
    for p in 5..=bound {
        if prime_divisors(p) == vec![p] && good(p) {
            out.push(vec![(p, 1)]);
        }
    }
    out
}

/// Find a separating operator among `T_2`, `T_3`, small combinations of the
/// two, then further `T_p`; operators at primes dividing the level come last.
/// Levels carrying old forms never separate: `T_p` for `p` prime to the level
/// repeats eigenvalues there and `U_p` has non-real eigenvalues on old forms.
pub fn find_separating(
    level: i64,
    ops: &BTreeMap<i64, IntMatrix>,
) -> Result<SeparatingOperator, ModsymError> {
    let bound = *ops.keys().max().unwrap();
    let mut tried = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for allow_bad in [false, true] {
        for terms in candidate_terms(level, bound, allow_bad) {
            let name = label(&terms);
            if !seen.insert(name.clone()) {
                continue;
            }
            let m = combination(ops, &terms);
            let cp = m.charpoly();
            if separates(&cp)? {
                return Ok(SeparatingOperator {
                    label: name,
                    terms,
                    matrix: m,
                    char_poly: cp,
                });
            }
            tried.push(name);
        }
    }
    Err(ModsymError::NonSeparating { tried })
}

/// Right kernel of a matrix over a real number field.
fn right_kernel_k(mut m: Vec<Vec<AlgebraicReal>>, field: &RealNumberField) -> Vec<Vec<AlgebraicReal>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().unwrap();
        m[r] = m[r].iter().map(|x| x * &inv).collect();
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate().take(rows) {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                *row = row.iter().zip(&pivot_row).map(|(x, y)| x - &(&f * y)).collect();
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![AlgebraicReal::zero(field); cols];
        v[free] = AlgebraicReal::one(field);
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -&m[row][free];
        }
        out.push(v);
    }
    out
}

fn apply(m: &IntMatrix, v: &[AlgebraicReal]) -> Vec<AlgebraicReal> {
    m.rows()
        .iter()
        .map(|row| {
            row.iter().zip(v).fold(AlgebraicReal::zero(v[0].field()), |acc, (a, x)| {
                &acc + &x.scale(&BigRational::from_integer(a.clone()))
            })
        })
        .collect()
}

/// Orbits with the default Hecke bound, old-form flags included.
pub fn eigen_orbits(space: &ModularSymbolSpace) -> Result<Vec<EigenOrbit>, ModsymError> {
    let ops = space.hecke_operators(DEFAULT_HECKE_BOUND)?;
    let (_, mut orbits) = eigen_orbits_with(space, &ops)?;
    flag_oldforms(space.level(), &mut orbits, DEFAULT_HECKE_BOUND)?;
    Ok(orbits)
}

/// Orbits from precomputed operators `T_1..T_B`; eigenvalues are recorded for every `n <= B`.
pub fn eigen_orbits_with(
    space: &ModularSymbolSpace,
    ops: &BTreeMap<i64, IntMatrix>,
) -> Result<(SeparatingOperator, Vec<EigenOrbit>), ModsymError> {
    let g = space.genus();
    if g == 0 {
        return Err(ModsymError::NoCuspForms);
    }
    let sep = find_separating(space.level(), ops)?;
    let mut factors: Vec<IntPolynomial> =
        factor_over_rationals(&sep.char_poly)?.factors.into_iter().map(|(f, _)| f).collect();
    factors.sort_by(|a, b| (a.degree(), a.coeffs()).cmp(&(b.degree(), b.coeffs())));
    let mut orbits = Vec::new();
    for factor in factors {
        let embeddings = RealNumberField::real_embeddings(&factor)?;
        let deg = factor.degree().unwrap();
        if embeddings.len() != deg {
            return Err(ModsymError::NotTotallyReal);
        }
        let k = embeddings[0].clone();
        let alpha = AlgebraicReal::generator(&k);
        let shifted: Vec<Vec<AlgebraicReal>> = sep
            .matrix
            .rows()
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, x)| {
                        let v = AlgebraicReal::from_rational(&k, BigRational::from_integer(x.clone()));
                        if i == j {
                            &v - &alpha
                        } else {
                            v
                        }
                    })
                    .collect()
            })
            .collect();
        let kernel = right_kernel_k(shifted, &k);
        debug_assert_eq!(kernel.len(), 1);
        let v = kernel.into_iter().next().ok_or(ModsymError::NotInvariant)?;
        let pos = v.iter().position(|x| !x.is_zero()).unwrap();
        let mut eigenvalues = BTreeMap::new();
        for (&n, t) in ops {
            let tv = apply(t, &v);
            let a = tv[pos].checked_div(&v[pos]).unwrap();
            eigenvalues.insert(n, a);
        }
        orbits.push(EigenOrbit {
            factor,
            embeddings,
            eigenvalues,
            eigenvector: v,
            is_anosov_hecke: deg == g,
            totally_real: true,
            old_level: None,
        });
    }
    Ok((sep, orbits))
}

/// Mark orbits whose `a_p` (for small `p` prime to the level) all have minimal
/// polynomials dividing the characteristic polynomial of `T_p` at one proper
/// divisor level.
pub fn flag_oldforms(level: i64, orbits: &mut [EigenOrbit], bound: i64) -> Result<(), ModsymError> {
    let primes: Vec<i64> = (2..=bound.min(13))
        .filter(|&p| prime_divisors(p) == vec![p] && level % p != 0)
        .collect();
    if primes.is_empty() {
        return Ok(());
    }
    for m in (2..level).filter(|m| level % m == 0 && genus_formula(*m) > 0) {
        let space = ModularSymbolSpace::new(m)?;
        let ops = space.hecke_operators(*primes.last().unwrap())?;
        let cps: Vec<IntPolynomial> = primes.iter().map(|p| ops[p].charpoly()).collect();
        for orbit in orbits.iter_mut().filter(|o| o.old_level.is_none()) {
            let matches = primes.iter().zip(&cps).all(|(p, cp)| {
                let mp = orbit.eigenvalues[p].minimal_polynomial();
                cp.div_exact(&mp).is_some()
            });
            if matches {
                orbit.old_level = Some(m);
            }
        }
    }
    Ok(())
}

/// A positive eigenvector with first coordinate 1, together with the
/// unimodular change of basis `U` that produced it from the space's basis.
#[derive(Clone, Debug)]
pub struct EigenVector {
    pub embedding: usize,
    pub lambda: Vec<AlgebraicReal>,
    pub change: IntMatrix,
    /// The positivity bound that sufficed.
    pub bound: i64,
}

impl EigenVector {
    /// `U T U^{-1}` for an operator `T` in the space's basis.
    pub fn transform(&self, t: &IntMatrix) -> IntMatrix {
        let inv = self.change.inverse_unimodular().expect("change of basis is unimodular");
        self.change.mul(t).mul(&inv)
    }

    /// `(U T_n U^{-1} - a_n) lambda = 0` for every operator supplied.
    pub fn verify(&self, orbit: &EigenOrbit, ops: &BTreeMap<i64, IntMatrix>) -> bool {
        ops.iter().all(|(n, t)| {
            let Some(a) = orbit.eigenvalue(*n, self.embedding) else {
                return false;
            };
            let lhs = apply(&self.transform(t), &self.lambda);
            lhs.iter().zip(&self.lambda).all(|(x, l)| (x - &(&a * l)).is_zero())
        })
    }
}

/// Eigenvector of an Anosov-Hecke orbit in embedding `e`, scaled to `lambda_1 = 1`
/// and made positive by shifts `lambda_i += k lambda_1`.
pub fn eigenvector_lattice(
    space: &ModularSymbolSpace,
    orbit: &EigenOrbit,
    embedding: usize,
) -> Result<EigenVector, ModsymError> {
    let g = space.genus();
    if !orbit.is_anosov_hecke {
        return Err(ModsymError::NotAnosov {
            degree: orbit.degree(),
            genus: g,
        });
    }
    let field = orbit.embeddings.get(embedding).ok_or(ModsymError::NoSuchEmbedding(embedding))?;
    let mut v: Vec<AlgebraicReal> = orbit.eigenvector.iter().map(|x| x.with_field(field)).collect();
    let mut change = IntMatrix::identity(g);
    if v[0].is_zero() {
        let k = v.iter().position(|x| !x.is_zero()).unwrap();
        v.swap(0, k);
        let mut rows = change.rows().to_vec();
        rows.swap(0, k);
        change = IntMatrix::from_rows(rows);
    }
    let first = v[0].inv().unwrap();
    let mut lambda: Vec<AlgebraicReal> = v.iter().map(|x| x * &first).collect();
    let mut needed = 0i64;
    let mut shifts = vec![0i64; g];
    for (i, l) in lambda.iter().enumerate().skip(1) {
        if !l.is_positive() {
            // smallest k with l + k > 0; l is irrational or an integer
            let bump = if l.as_rational().is_some_and(|q| q.is_integer()) { 1 } else { 0 };
            let k = -l.floor() + BigInt::from(bump);
            let k = i64::try_from(k).map_err(|_| ModsymError::PositivityNotAchieved(i64::MAX))?;
            shifts[i] = k;
            needed = needed.max(k);
        }
    }
    let bound = DEFAULT_POSITIVITY_BOUNDS
        .iter()
        .copied()
        .find(|&b| needed <= b)
        .ok_or(ModsymError::PositivityNotAchieved(*DEFAULT_POSITIVITY_BOUNDS.last().unwrap()))?;
    let mut shift = IntMatrix::identity(g);
    for (i, &k) in shifts.iter().enumerate() {
        if k != 0 {
            shift.set(i, 0, BigInt::from(k));
            lambda[i] = &lambda[i] + &AlgebraicReal::from_int(field, k);
        }
    }
    if lambda.iter().any(|x| !x.is_positive()) {
        return Err(ModsymError::PositivityNotAchieved(bound));
    }
    Ok(EigenVector {
        embedding,
        lambda,
        change: shift.mul(&change),
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orbits_at_11_23_37() {
        let s11 = ModularSymbolSpace::new(11).unwrap();
        let o = eigen_orbits(&s11).unwrap();
        assert_eq!(o.len(), 1);
        assert!(o[0].is_anosov_hecke);
        assert_eq!(o[0].eigenvalues[&2], AlgebraicReal::from_int(o[0].field(), -2));

        let s23 = ModularSymbolSpace::new(23).unwrap();
        let o = eigen_orbits(&s23).unwrap();
        assert_eq!(o.len(), 1);
        assert_eq!(o[0].factor, IntPolynomial::from_i64s(&[-1, 1, 1]));
        assert!(o[0].is_anosov_hecke && o[0].old_level.is_none());

        let s37 = ModularSymbolSpace::new(37).unwrap();
        let o = eigen_orbits(&s37).unwrap();
        assert_eq!(o.len(), 2);
        assert!(o.iter().all(|x| x.degree() == 1 && !x.is_anosov_hecke));
    }

    #[test]
    fn eigenvectors() {
        let s11 = ModularSymbolSpace::new(11).unwrap();
        let o = &eigen_orbits(&s11).unwrap()[0];
        let ev = eigenvector_lattice(&s11, o, 0).unwrap();
        assert_eq!(ev.lambda, vec![AlgebraicReal::one(o.field())]);

        let s23 = ModularSymbolSpace::new(23).unwrap();
        let ops = s23.hecke_operators(12).unwrap();
        let o = &eigen_orbits(&s23).unwrap()[0];
        let e0 = eigenvector_lattice(&s23, o, 0).unwrap();
        let e1 = eigenvector_lattice(&s23, o, 1).unwrap();
        assert!(e0.verify(o, &ops) && e1.verify(o, &ops));
        assert!(e0.lambda[0].as_rational().is_some());
        assert_eq!(e0.lambda[1].degree(), 2);
        if e0.change == e1.change {
            // same basis: the second vector is the Galois conjugate of the first
            assert_eq!(e0.lambda[1].coords(), e1.lambda[1].coords());
        }
    }

    #[test]
    fn not_anosov_is_rejected() {
        let s37 = ModularSymbolSpace::new(37).unwrap();
        let o = &eigen_orbits(&s37).unwrap()[0];
        assert!(matches!(eigenvector_lattice(&s37, o, 0), Err(ModsymError::NotAnosov { .. })));
    }

    #[test]
    fn old_forms_block_separation() {
        let s = ModularSymbolSpace::new(22).unwrap();
        assert!(matches!(eigen_orbits(&s), Err(ModsymError::NonSeparating { .. })));
        let s = ModularSymbolSpace::new(31).unwrap();
        assert!(eigen_orbits(&s).unwrap().iter().all(|o| o.old_level.is_none()));
    }
}
