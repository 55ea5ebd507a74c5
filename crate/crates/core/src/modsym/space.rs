//! Weight-2 modular symbols for Gamma_0(N) via Manin symbols.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::exact::matrix::{
    left_kernel, q_identity, q_mul, rref, solve_in_row_span, z_left_kernel, z_row_echelon, QMatrix,
};
use crate::exact::IntMatrix;

use super::p1::{lift_to_sl2z, prime_divisors, Cusp, CuspClasses, P1List};
use super::ModsymError;

/// Manin symbols modulo the 2- and 3-term relations, with the cuspidal
/// plus-subspace and its integral structure.
#[derive(Clone, Debug)]
pub struct ModularSymbolSpace {
    level: i64,
    p1: P1List,
    /// Image of every Manin symbol in the quotient, in free coordinates.
    symbol_vectors: Vec<Vec<BigRational>>,
    /// Manin symbols (P1 indices) that form the free basis of the quotient.
    free: Vec<usize>,
    /// 3-term relations on the 2-term generators, one row per relation.
    relations: Vec<Vec<BigInt>>,
    cusps: Vec<Cusp>,
    /// Rows: free generators; columns: cusp classes.
    boundary: QMatrix,
    star: QMatrix,
    cuspidal_basis: Vec<Vec<BigRational>>,
    /// Z-basis of the cuspidal plus-subspace intersected with the lattice of Manin symbols.
    plus_basis: Vec<Vec<BigRational>>,
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn lcm_of_denominators<'a>(rows: impl IntoIterator<Item = &'a Vec<BigRational>>) -> BigInt {
    rows.into_iter()
        .flat_map(|r| r.iter())
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

fn to_int_rows(rows: &[Vec<BigRational>], scale: &BigInt) -> Vec<Vec<BigInt>> {
    let s = BigRational::from_integer(scale.clone());
    rows.iter()
        .map(|r| r.iter().map(|x| (x * &s).to_integer()).collect())
        .collect()
}

/// `(c : d) * [[a, b], [c', d']] = (c a + d c' : c b + d d')`.
fn act(cd: (i64, i64), m: &[i64; 4]) -> (i64, i64) {
    (cd.0 * m[0] + cd.1 * m[2], cd.0 * m[1] + cd.1 * m[3])
}

/// Merel's set `{[[a, b], [c, d]] : ad - bc = n, a > b >= 0, d > c >= 0}`.
pub fn heilbronn_merel(n: i64) -> Vec<[i64; 4]> {
    let mut out = Vec::new();
    // ad - bc >= a + d - 1 forces a + d <= n + 1
    for a in 1..=n {
        for d in 1..=(n + 1 - a) {
            let bc = a * d - n;
            if bc < 0 {
                continue;
            }
            for b in 0..a {
                if bc == 0 {
                    if b == 0 {
                        for c in 0..d {
                            out.push([a, 0, c, d]);
                        }
                    } else {
                        out.push([a, b, 0, d]);
                    }
                } else if b > 0 && bc % b == 0 && bc / b < d {
                    out.push([a, b, bc / b, d]);
                }
            }
        }
    }
    out
}

impl ModularSymbolSpace {
    pub fn new(level: i64) -> Result<Self, ModsymError> {
        if level < 1 {
            return Err(ModsymError::InvalidLevel(level));
        }
        let p1 = P1List::new(level);
        let np = p1.len();
        let sigma = |i: usize| {
            let (c, d) = p1.point(i);
            p1.index(d, -c).unwrap()
        };
        let tau = |i: usize| {
            let (c, d) = p1.point(i);
            p1.index(d, -c - d).unwrap()
        };

        // x + x sigma = 0: each symbol is +-1 times a generator, or zero
        let mut two_term: Vec<Option<(i64, usize)>> = vec![None; np];
        let mut gens: Vec<usize> = Vec::new();
        for i in 0..np {
            let j = sigma(i);
            if j == i {
                continue;
            }
            if i < j {
                two_term[i] = Some((1, gens.len()));
                two_term[j] = Some((-1, gens.len()));
                gens.push(i);
            }
        }
        let r = gens.len();

        // x + x tau + x tau^2 = 0 on the generators
        let mut relations: Vec<Vec<BigInt>> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for i in 0..np {
            let mut row = vec![BigInt::zero(); r];
            for k in [i, tau(i), tau(tau(i))] {
                if let Some((s, g)) = two_term[k] {
                    row[g] += s;
                }
            }
            if row.iter().any(|x| !x.is_zero()) && seen.insert(row.clone()) {
                relations.push(row);
            }
        }
        relations.sort();

        let mut reduced: QMatrix = relations
            .iter()
            .map(|row| row.iter().map(|x| BigRational::from_integer(x.clone())).collect())
            .collect();
        let pivots = rref(&mut reduced);
        let free_cols: Vec<usize> = (0..r).filter(|c| !pivots.contains(c)).collect();
        let m = free_cols.len();
        let mut gen_vectors: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); m]; r];
        for (k, &c) in free_cols.iter().enumerate() {
            gen_vectors[c][k] = BigRational::one();
        }
        for (row, &pc) in pivots.iter().enumerate() {
            for (k, &fc) in free_cols.iter().enumerate() {
                gen_vectors[pc][k] = -reduced[row][fc].clone();
            }
        }
        let symbol_vectors: Vec<Vec<BigRational>> = (0..np)
            .map(|i| match two_term[i] {
                None => vec![BigRational::zero(); m],
                Some((s, g)) => gen_vectors[g].iter().map(|x| x * q(s)).collect(),
            })
            .collect();
        let free: Vec<usize> = free_cols.iter().map(|&c| gens[c]).collect();

        // boundary (c : d) -> [a/c] - [b/d]
        let mut classes = CuspClasses::new(level);
        let mut raw: Vec<(usize, usize)> = Vec::with_capacity(m);
        for &i in &free {
            let (c, d) = p1.point(i);
            let g = lift_to_sl2z(c, d, level);
            let a = classes.class_of(Cusp::new(g[0], g[2]));
            let b = classes.class_of(Cusp::new(g[1], g[3]));
            raw.push((a, b));
        }
        let cusps = classes.reps().to_vec();
        let boundary: QMatrix = raw
            .iter()
            .map(|&(a, b)| {
                let mut row = vec![BigRational::zero(); cusps.len()];
                row[a] += BigRational::one();
                row[b] -= BigRational::one();
                row
            })
            .collect();

        let star: QMatrix = free
            .iter()
            .map(|&i| {
                let (c, d) = p1.point(i);
                symbol_vectors[p1.index(-c, d).unwrap()].clone()
            })
            .collect();

        let cuspidal_basis = if m == 0 { Vec::new() } else { left_kernel(&boundary) };
        if m == 0 {
            return Ok(ModularSymbolSpace {
                level,
                p1,
                symbol_vectors,
                free,
                relations,
                cusps,
                boundary,
                star,
                cuspidal_basis,
                plus_basis: Vec::new(),
            });
        }

        // integral structure: Z-span of all Manin symbols
        let den = lcm_of_denominators(symbol_vectors.iter());
        let lattice = z_row_echelon(&to_int_rows(&symbol_vectors, &den));
        let conditions: QMatrix = (0..m)
            .map(|i| {
                let mut row = boundary[i].clone();
                row.extend((0..m).map(|j| {
                    let id = if i == j { BigRational::one() } else { BigRational::zero() };
                    &star[i][j] - id
                }));
                row
            })
            .collect();
        let cden = lcm_of_denominators(conditions.iter());
        let cz = to_int_rows(&conditions, &cden);
        let lattice_q = IntMatrix::from_rows(lattice.clone());
        let bc = lattice_q.mul(&IntMatrix::from_rows(cz));
        let kernel = z_left_kernel(bc.rows());
        let plus_int = if kernel.is_empty() {
            Vec::new()
        } else {
            IntMatrix::from_rows(kernel).mul(&lattice_q).rows().to_vec()
        };
        let dq = BigRational::from_integer(den);
        let plus_basis = plus_int
            .iter()
            .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone()) / &dq).collect())
            .collect();

        Ok(ModularSymbolSpace {
            level,
            p1,
            symbol_vectors,
            free,
            relations,
            cusps,
            boundary,
            star,
            cuspidal_basis,
            plus_basis,
        })
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn genus(&self) -> usize {
        self.plus_basis.len()
    }

    pub fn manin_symbols(&self) -> &[(i64, i64)] {
        self.p1.points()
    }

    pub fn free_generators(&self) -> Vec<(i64, i64)> {
        self.free.iter().map(|&i| self.p1.point(i)).collect()
    }

    pub fn relations(&self) -> &[Vec<BigInt>] {
        &self.relations
    }

    pub fn cusps(&self) -> &[Cusp] {
        &self.cusps
    }

    /// Dimension of the full space of modular symbols.
    pub fn dimension(&self) -> usize {
        self.free.len()
    }

    pub fn boundary_matrix(&self) -> &QMatrix {
        &self.boundary
    }

    pub fn star_matrix(&self) -> &QMatrix {
        &self.star
    }

    pub fn cuspidal_basis(&self) -> &[Vec<BigRational>] {
        &self.cuspidal_basis
    }

    pub fn plus_basis(&self) -> &[Vec<BigRational>] {
        &self.plus_basis
    }

    /// Image of the Manin symbol `(c : d)` in free coordinates.
    pub fn symbol_vector(&self, c: i64, d: i64) -> Option<&[BigRational]> {
        self.p1.index(c, d).map(|i| self.symbol_vectors[i].as_slice())
    }

    /// `T_n` on the full space from Merel's set; rows are images of the free generators.
    pub fn hecke_ambient(&self, n: i64) -> QMatrix {
        let m = self.dimension();
        let merel = heilbronn_merel(n);
        self.free
            .iter()
            .map(|&i| {
                let x = self.p1.point(i);
                let mut row = vec![BigRational::zero(); m];
                for h in &merel {
                    let (c, d) = act(x, h);
                    if let Some(j) = self.p1.index(c, d) {
                        for (acc, v) in row.iter_mut().zip(&self.symbol_vectors[j]) {
                            *acc += v;
                        }
                    }
                }
                row
            })
            .collect()
    }

    /// Restrict an operator on the full space to the plus-subspace basis.
    pub fn restrict(&self, ambient: &QMatrix) -> Result<IntMatrix, ModsymError> {
        let images = q_mul(&self.plus_basis, ambient);
        let mut rows = Vec::with_capacity(images.len());
        for img in &images {
            let coords = solve_in_row_span(&self.plus_basis, img).ok_or(ModsymError::NotInvariant)?;
            let mut ints = Vec::with_capacity(coords.len());
            for c in coords {
                if !c.is_integer() {
                    return Err(ModsymError::NonIntegral);
                }
                ints.push(c.to_integer());
            }
            rows.push(ints);
        }
        Ok(IntMatrix::from_rows(rows))
    }

    /// `T_n` on the cuspidal plus-subspace straight from Merel's set.
    pub fn hecke_operator_direct(&self, n: i64) -> Result<IntMatrix, ModsymError> {
        if n < 1 {
            return Err(ModsymError::InvalidIndex(n));
        }
        self.restrict(&self.hecke_ambient(n))
    }

    /// `T_n` on the cuspidal plus-subspace: Merel's set at primes, then
    /// multiplicativity and the prime-power recurrence.
    pub fn hecke_operator(&self, n: i64) -> Result<IntMatrix, ModsymError> {
        Ok(self.hecke_operators(n)?.remove(&n).unwrap())
    }

    /// `T_1, ..., T_bound` on the cuspidal plus-subspace.
    pub fn hecke_operators(&self, bound: i64) -> Result<BTreeMap<i64, IntMatrix>, ModsymError> {
        if bound < 1 {
            return Err(ModsymError::InvalidIndex(bound));
        }
        let g = self.genus();
        let mut out: BTreeMap<i64, IntMatrix> = BTreeMap::new();
        out.insert(1, IntMatrix::identity(g));
        for n in 2..=bound {
            let ps = prime_divisors(n);
            let p = ps[0];
            let mut pr = 1;
            while n % (pr * p) == 0 {
                pr *= p;
            }
            let t = if pr != n {
                out[&pr].mul(&out[&(n / pr)])
            } else if pr == p {
                self.hecke_operator_direct(p)?
            } else if self.level % p == 0 {
                out[&(n / p)].mul(&out[&p])
            } else {
                let prev = out[&(n / p)].mul(&out[&p]);
                prev.sub(&out[&(n / p / p)].scale(&BigInt::from(p)))
            };
            out.insert(n, t);
        }
        Ok(out)
    }
}

/// `T` acting on the star-fixed space commutes with star.
pub fn commutes_with_star(space: &ModularSymbolSpace, ambient: &QMatrix) -> bool {
    q_mul(space.star_matrix(), ambient) == q_mul(ambient, space.star_matrix())
}

/// Star squares to the identity on the full space.
pub fn star_is_involution(space: &ModularSymbolSpace) -> bool {
    q_mul(space.star_matrix(), space.star_matrix()) == q_identity(space.dimension())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merel_set_sizes() {
        assert_eq!(heilbronn_merel(1), vec![[1, 0, 0, 1]]);
        assert_eq!(heilbronn_merel(2).len(), 4);
        for n in 1..30 {
            for m in heilbronn_merel(n) {
                assert_eq!(m[0] * m[3] - m[1] * m[2], n);
                assert!(m[0] > m[1] && m[1] >= 0 && m[3] > m[2] && m[2] >= 0);
            }
        }
    }

    #[test]
    fn small_levels() {
        assert_eq!(ModularSymbolSpace::new(11).unwrap().genus(), 1);
        assert_eq!(ModularSymbolSpace::new(15).unwrap().genus(), 1);
        assert_eq!(ModularSymbolSpace::new(23).unwrap().genus(), 2);
        assert_eq!(ModularSymbolSpace::new(37).unwrap().genus(), 2);
        assert_eq!(ModularSymbolSpace::new(1).unwrap().genus(), 0);
        assert!(ModularSymbolSpace::new(0).is_err());
    }

    #[test]
    fn full_space_dimension() {
        // dim = 2g + (cusps - 1)
        for n in [11i64, 12, 23, 30, 37] {
            let s = ModularSymbolSpace::new(n).unwrap();
            assert_eq!(s.dimension(), 2 * s.genus() + s.cusps().len() - 1, "N = {n}");
            assert_eq!(s.cuspidal_basis().len(), 2 * s.genus());
        }
    }

    #[test]
    fn t2_at_11() {
        let s = ModularSymbolSpace::new(11).unwrap();
        assert_eq!(s.hecke_operator(2).unwrap(), IntMatrix::from_i64(&[&[-2]]));
        assert_eq!(s.hecke_operator(3).unwrap(), IntMatrix::from_i64(&[&[-1]]));
        assert_eq!(s.hecke_operator(11).unwrap(), IntMatrix::from_i64(&[&[1]]));
    }

    #[test]
    fn t2_at_23() {
        let s = ModularSymbolSpace::new(23).unwrap();
        let t2 = s.hecke_operator(2).unwrap();
        assert_eq!(t2.charpoly(), crate::exact::IntPolynomial::from_i64s(&[-1, 1, 1]));
    }

    #[test]
    fn composite_operators_agree_with_merel() {
        for n in [11i64, 15, 23] {
            let s = ModularSymbolSpace::new(n).unwrap();
            let ops = s.hecke_operators(12).unwrap();
            for k in [4i64, 6, 8, 9, 10, 12] {
                assert_eq!(ops[&k], s.hecke_operator_direct(k).unwrap(), "N = {n}, n = {k}");
            }
        }
    }

    #[test]
    fn star_properties() {
        let s = ModularSymbolSpace::new(37).unwrap();
        assert!(star_is_involution(&s));
        for n in 2..8 {
            assert!(commutes_with_star(&s, &s.hecke_ambient(n)));
        }
    }
}
