//! Real quadratic orders: discriminants, fundamental units, form class
//! groups, and diagnostics for class-field claims.

mod diagnostics;
mod forms;

pub use diagnostics::{field_diagnostics, FieldDiagnostics, NORMALITY_DEGREE_CAP};
pub use forms::{reduced_forms, IndefiniteForm};

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contfrac::{hecke_unit, jp_expand, JPState};
use crate::exact::{AlgebraicReal, ExactError, IntPolynomial, Interval, RealNumberField};
use crate::pseudolattice::{endomorphism_ring, EndRing, PseudoLattice};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrderError {
    #[error("invalid discriminant {0}: need D > 0, D = 0 or 1 mod 4, D not a square")]
    InvalidDiscriminant(String),
    #[error("discriminant {0} is too large for form enumeration")]
    TooLarge(String),
    #[error("lattice has discriminant {found}, expected {expected}")]
    WrongOrder { expected: String, found: String },
    #[error("lattice has no real multiplication")]
    NoRealMultiplication,
    #[error("{lattices} lattices and {units} units")]
    LengthMismatch { lattices: usize, units: usize },
    #[error("diagnostic skipped: {0}")]
    DiagnosticSkipped(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// `Z + f O_K` inside the real quadratic field of discriminant `d_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadOrder {
    #[serde(rename = "dK")]
    #[serde(with = "crate::exact::serde_int::big")]
    pub d_k: BigInt,
    #[serde(with = "crate::exact::serde_int::big")]
    pub f: BigInt,
    #[serde(rename = "D")]
    #[serde(with = "crate::exact::serde_int::big")]
    pub d: BigInt,
}

fn is_fundamental(d: &BigInt) -> bool {
    let four = BigInt::from(4);
    let r = d.mod_floor(&four);
    if r == BigInt::one() {
        squarefree(d)
    } else if r.is_zero() {
        let m = d / &four;
        let m4 = m.mod_floor(&four);
        (m4 == BigInt::from(2) || m4 == BigInt::from(3)) && squarefree(&m)
    } else {
        false
    }
}

fn squarefree(n: &BigInt) -> bool {
    let n = n.abs();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        if (&n % (&p * &p)).is_zero() {
            return false;
        }
        p += 1;
    }
    true
}

/// Split `D = f^2 d_K` with `d_K` fundamental.
pub fn order_from_disc(d: &BigInt) -> Result<QuadOrder, OrderError> {
    let four = BigInt::from(4);
    let r = d.mod_floor(&four);
    if !d.is_positive() {
        return Err(OrderError::InvalidDiscriminant(d.to_string()));
    }
    let s = d.sqrt();
    if !(r.is_zero() || r.is_one()) || &s * &s == *d {
        return Err(OrderError::InvalidDiscriminant(d.to_string()));
    }
    // largest f with D/f^2 a discriminant that is fundamental
    let mut best = BigInt::one();
    let mut f = BigInt::one();
    while &f * &f <= *d {
        let ff = &f * &f;
        if (d % &ff).is_zero() && is_fundamental(&(d / &ff)) {
            best = f.clone();
        }
        f += 1;
    }
    Ok(QuadOrder {
        d_k: d / (&best * &best),
        f: best,
        d: d.clone(),
    })
}

impl QuadOrder {
    pub fn from_disc(d: i64) -> Result<Self, OrderError> {
        order_from_disc(&BigInt::from(d))
    }

    pub fn disc_i64(&self) -> Result<i64, OrderError> {
        self.d
            .to_i64()
            .filter(|d| *d < 1 << 40)
            .ok_or_else(|| OrderError::TooLarge(self.d.to_string()))
    }

    /// `Q(sqrt d_K)` with the positive square root.
    pub fn field(&self) -> RealNumberField {
        let poly = IntPolynomial::new(vec![-self.d_k.clone(), BigInt::zero(), BigInt::one()]);
        let hi = BigRational::from_integer(&self.d_k.sqrt() + BigInt::one());
        RealNumberField::new(&poly, Interval::new(BigRational::zero(), hi)).expect("fundamental discriminant is not a square")
    }

    /// `sqrt D` in [`Self::field`].
    pub fn sqrt_disc(&self) -> AlgebraicReal {
        AlgebraicReal::generator(&self.field()).scale(&BigRational::from_integer(self.f.clone()))
    }

    /// `omega = (D mod 2 + sqrt D)/2`, so that the order is `Z[omega]`.
    pub fn omega(&self) -> AlgebraicReal {
        let k = self.field();
        let sigma = self.d.mod_floor(&BigInt::from(2));
        (&AlgebraicReal::from_rational(&k, BigRational::from_integer(sigma)) + &self.sqrt_disc())
            .scale(&BigRational::new(BigInt::one(), BigInt::from(2)))
    }
}

/// Fundamental unit `eps > 1` of an order and its norm.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FundamentalUnit {
    pub unit: AlgebraicReal,
    pub norm: i64,
    /// `eps = (x + y sqrt D)/2`.
    #[serde(with = "crate::exact::serde_int::big")]
    pub x: BigInt,
    #[serde(with = "crate::exact::serde_int::big")]
    pub y: BigInt,
}

impl FundamentalUnit {
    /// `x^2 - D y^2 = 4 * norm`.
    pub fn pell_holds(&self, order: &QuadOrder) -> bool {
        &self.x * &self.x - &order.d * &self.y * &self.y == BigInt::from(4 * self.norm)
    }
}

/// Perron root of the continued-fraction period of `omega`.
pub fn fundamental_unit(order: &QuadOrder) -> Result<FundamentalUnit, OrderError> {
    // omega > 1 for every D >= 5
    let state = JPState::new(vec![order.omega()]).expect("omega is positive");
    let exp = jp_expand(&state, usize::MAX >> 1).expect("valid bound");
    let hu = hecke_unit(&exp).map_err(|_| OrderError::InvalidDiscriminant(order.d.to_string()))?;
    let unit = hu.value;
    let norm = unit.norm().to_integer().to_i64().unwrap();
    let c = unit.coords();
    let x = (&c[0] * BigRational::from_integer(BigInt::from(2))).to_integer();
    let y = (&c[1] * BigRational::new(BigInt::from(2), order.f.clone())).to_integer();
    Ok(FundamentalUnit { unit, norm, x, y })
}

/// Outcome of a unit-membership test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitCheck {
    pub is_unit: bool,
    pub degree: usize,
    pub note: Option<String>,
}

/// Whether `x` is a unit of the order.
pub fn is_unit_of(x: &AlgebraicReal, order: &QuadOrder) -> UnitCheck {
    let mp = x.minimal_polynomial();
    let degree = mp.degree().unwrap();
    let fail = |note: &str| UnitCheck {
        is_unit: false,
        degree,
        note: Some(note.to_string()),
    };
    if degree > 2 {
        return fail("degree exceeds 2; not in a quadratic order");
    }
    if !mp.is_monic() {
        return fail("not an algebraic integer");
    }
    if mp.coeff(0).abs() != BigInt::one() {
        return fail("norm is not +-1");
    }
    if degree == 1 {
        return UnitCheck {
            is_unit: true,
            degree,
            note: None,
        };
    }
    let (c, b) = (mp.coeff(0), mp.coeff(1));
    let disc = &b * &b - BigInt::from(4) * c;
    if !(&disc % &order.d).is_zero() {
        return fail("not contained in the order");
    }
    let ratio = &disc / &order.d;
    let r = ratio.sqrt();
    if &r * &r != ratio {
        return fail("not contained in the order");
    }
    UnitCheck {
        is_unit: true,
        degree,
        note: None,
    }
}

/// Form class group (narrow classes) with the wide class number.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassGroup {
    pub order: QuadOrder,
    /// One reduced cycle per narrow class; class 0 is principal.
    pub cycles: Vec<Vec<IndefiniteForm>>,
    pub h: usize,
    pub h_plus: usize,
    /// `table[i][j]` is the class of the product of classes `i` and `j`.
    pub table: Vec<Vec<usize>>,
    /// Narrow classes that become trivial in the wide group.
    pub wide_kernel: Vec<usize>,
    #[serde(skip)]
    index: HashMap<IndefiniteForm, usize>,
}

impl ClassGroup {
    pub fn principal_form(&self) -> IndefiniteForm {
        principal_form(self.order.disc_i64().unwrap())
    }

    /// Narrow class of a form of the right discriminant.
    pub fn class_of(&self, f: &IndefiniteForm) -> Option<usize> {
        self.index.get(&f.reduce()).copied()
    }

    /// Representative with positive first coefficient.
    pub fn representative(&self, class: usize) -> IndefiniteForm {
        *self.cycles[class].iter().find(|f| f.a > 0).expect("cycles alternate signs of a")
    }

    pub fn compose(&self, i: usize, j: usize) -> usize {
        self.table[i][j]
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.class_of(&self.representative(i).inverse()).unwrap()
    }

    /// Identity, associativity and inverses on the full table.
    pub fn verify_axioms(&self) -> bool {
        let n = self.h_plus;
        let id = (0..n).all(|i| self.table[0][i] == i && self.table[i][0] == i);
        let inv = (0..n).all(|i| self.table[i][self.inverse(i)] == 0);
        let comm = (0..n).all(|i| (0..n).all(|j| self.table[i][j] == self.table[j][i]));
        let assoc = (0..n).all(|i| {
            (0..n).all(|j| (0..n).all(|k| self.table[self.table[i][j]][k] == self.table[i][self.table[j][k]]))
        });
        id && inv && comm && assoc
    }

    /// Wide class of a narrow class: the smallest index in its coset of `wide_kernel`.
    pub fn wide_class(&self, i: usize) -> usize {
        self.wide_kernel.iter().map(|&k| self.table[i][k]).min().unwrap()
    }
}

fn principal_form(d: i64) -> IndefiniteForm {
    let b0 = d.rem_euclid(2);
    IndefiniteForm::from_ab(1, b0, d).unwrap()
}

/// Enumerate reduced primitive forms and split them into `rho`-cycles.
pub fn class_group(order: &QuadOrder) -> Result<ClassGroup, OrderError> {
    let d = order.disc_i64()?;
    let forms = reduced_forms(d);
    let mut index: HashMap<IndefiniteForm, usize> = HashMap::new();
    let mut cycles: Vec<Vec<IndefiniteForm>> = Vec::new();
    let principal = principal_form(d).reduce();
    let pc = principal.cycle();
    for f in &pc {
        index.insert(*f, 0);
    }
    cycles.push(pc);
    for f in &forms {
        if index.contains_key(f) {
            continue;
        }
        let c = f.cycle();
        for g in &c {
            index.insert(*g, cycles.len());
        }
        cycles.push(c);
    }
    let h_plus = cycles.len();
    let reps: Vec<IndefiniteForm> = cycles.iter().map(|c| *c.iter().find(|f| f.a > 0).unwrap()).collect();
    let mut table = vec![vec![0usize; h_plus]; h_plus];
    for i in 0..h_plus {
        for j in 0..h_plus {
            let p = reps[i].compose(&reps[j]).reduce();
            table[i][j] = index[&p];
        }
    }
    // the class of (-1, b0, -c0) is trivial in the wide group
    let p = principal_form(d);
    let neg = IndefiniteForm::new(-p.a, p.b, -p.c);
    let n = index[&neg.reduce()];
    let mut wide_kernel = vec![0];
    if n != 0 {
        wide_kernel.push(n);
    }
    Ok(ClassGroup {
        order: order.clone(),
        h: h_plus / wide_kernel.len(),
        cycles,
        h_plus,
        table,
        wide_kernel,
        index,
    })
}

/// Narrow class of `Z + Z theta` via its canonical slope's primitive minimal polynomial.
pub fn ideal_class_of(m: &PseudoLattice, cg: &ClassGroup) -> Result<usize, OrderError> {
    let cert = match endomorphism_ring(m).map_err(|_| OrderError::NoRealMultiplication)? {
        EndRing::RealMultiplication(c) => c,
        EndRing::Trivial { .. } => return Err(OrderError::NoRealMultiplication),
    };
    if cert.discriminant != cg.order.d {
        return Err(OrderError::WrongOrder {
            expected: cg.order.d.to_string(),
            found: cert.discriminant.to_string(),
        });
    }
    let (a, b, c) = cert.form();
    let f = IndefiniteForm::new(a.to_i64().unwrap(), b.to_i64().unwrap(), c.to_i64().unwrap());
    Ok(cg.class_of(&f).expect("primitive form of matching discriminant"))
}

/// Permutation action of the class group on labelled lattices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionTable {
    /// Class of each lattice.
    pub classes: Vec<usize>,
    /// `perm[a][i]` is the index of the lattice in class `a * classes[i]`.
    pub perm: Vec<Vec<usize>>,
    pub units: Vec<AlgebraicReal>,
}

impl ActionTable {
    /// `e * j = j` and `(ab) * j = a * (b * j)`.
    pub fn verify_axioms(&self, cg: &ClassGroup) -> bool {
        let n = self.classes.len();
        let id = (0..n).all(|i| self.perm[0][i] == i);
        let comp = (0..cg.h_plus).all(|a| {
            (0..cg.h_plus).all(|b| (0..n).all(|i| self.perm[cg.table[a][b]][i] == self.perm[a][self.perm[b][i]]))
        });
        id && comp
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum GaloisAction {
    Table(ActionTable),
    ClassCountMismatch {
        lattices: usize,
        distinct_classes: usize,
        h: usize,
        h_plus: usize,
    },
}

/// The induced action `a * j(m_i) = j(a * [m_i])` when the lattices hit
/// every narrow class exactly once.
pub fn galois_action_table(
    lattices: &[PseudoLattice],
    units: &[AlgebraicReal],
    cg: &ClassGroup,
) -> Result<GaloisAction, OrderError> {
    if lattices.len() != units.len() {
        return Err(OrderError::LengthMismatch {
            lattices: lattices.len(),
            units: units.len(),
        });
    }
    let classes = lattices
        .iter()
        .map(|m| ideal_class_of(m, cg))
        .collect::<Result<Vec<_>, _>>()?;
    let mut distinct = classes.clone();
    distinct.sort_unstable();
    distinct.dedup();
    if lattices.len() != cg.h_plus || distinct.len() != cg.h_plus {
        return Ok(GaloisAction::ClassCountMismatch {
            lattices: lattices.len(),
            distinct_classes: distinct.len(),
            h: cg.h,
            h_plus: cg.h_plus,
        });
    }
    let pos: HashMap<usize, usize> = classes.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let perm = (0..cg.h_plus)
        .map(|a| classes.iter().map(|&c| pos[&cg.table[a][c]]).collect())
        .collect();
    Ok(GaloisAction::Table(ActionTable {
        classes,
        perm,
        units: units.to_vec(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn discriminant_splitting() {
        for (d, dk, f) in [(5, 5, 1), (8, 8, 1), (20, 5, 2), (12, 12, 1), (45, 5, 3), (32, 8, 2), (72, 8, 3)] {
            let o = QuadOrder::from_disc(d).unwrap();
            assert_eq!((o.d_k, o.f), (b(dk), b(f)), "D = {d}");
        }
        for d in [0, -3, 4, 9, 7, 6] {
            assert!(QuadOrder::from_disc(d).is_err(), "D = {d}");
        }
    }

    #[test]
    fn units_match_pell_search() {
        // brute force over x^2 - D y^2 = +-4 with y minimal
        for d in [5i64, 8, 12, 13, 20, 21, 28, 40, 44, 60, 61, 76, 92, 136] {
            let o = QuadOrder::from_disc(d).unwrap();
            let u = fundamental_unit(&o).unwrap();
            assert!(u.pell_holds(&o), "D = {d}");
            let (mut bx, mut by, mut bn) = (0i64, 0i64, 0i64);
            'search: for y in 1i64.. {
                for n in [-4i64, 4] {
                    let x2 = d * y * y + n;
                    let x = (x2 as f64).sqrt().round() as i64;
                    if x > 0 && x * x == x2 {
                        (bx, by, bn) = (x, y, n / 4);
                        break 'search;
                    }
                }
            }
            assert_eq!((u.x.clone(), u.y.clone(), u.norm), (b(bx), b(by), bn), "D = {d}");
        }
    }

    #[test]
    fn unit_examples() {
        let u = fundamental_unit(&QuadOrder::from_disc(20).unwrap()).unwrap();
        // 2 + sqrt 5
        assert_eq!((u.x, u.y, u.norm), (b(4), b(1), -1));
        let u = fundamental_unit(&QuadOrder::from_disc(8).unwrap()).unwrap();
        assert_eq!((u.x, u.y, u.norm), (b(2), b(1), -1));
    }

    #[test]
    fn class_numbers() {
        for (d, h, hp) in [(5, 1, 1), (40, 2, 2), (12, 1, 2), (60, 2, 4), (8, 1, 1), (136, 2, 4), (145, 4, 4)] {
            let cg = class_group(&QuadOrder::from_disc(d).unwrap()).unwrap();
            assert_eq!((cg.h, cg.h_plus), (h, hp), "D = {d}");
            assert!(cg.verify_axioms());
        }
    }

    #[test]
    fn membership() {
        let o8 = QuadOrder::from_disc(8).unwrap();
        let k = o8.field();
        // the generator is sqrt 8
        let u = AlgebraicReal::new(&k, vec![BigRational::one(), BigRational::new(1.into(), 2.into())]);
        assert!(is_unit_of(&u, &o8).is_unit);
        let o20 = QuadOrder::from_disc(20).unwrap();
        let k5 = o20.field();
        let half = BigRational::new(1.into(), 2.into());
        let phi = AlgebraicReal::new(&k5, vec![half.clone(), half]);
        assert!(!is_unit_of(&phi, &o20).is_unit);
        assert!(is_unit_of(&phi, &QuadOrder::from_disc(5).unwrap()).is_unit);
        let e = AlgebraicReal::new(&k5, vec![BigRational::from_integer(b(2)), BigRational::one()]);
        assert!(is_unit_of(&e, &o20).is_unit);
    }

    fn lattice(order: &QuadOrder, coords: &[(i64, i64)]) -> PseudoLattice {
        let k = order.field();
        let theta = AlgebraicReal::new(&k, coords.iter().map(|&(n, d)| BigRational::new(n.into(), d.into())).collect());
        PseudoLattice::from_periods(&[AlgebraicReal::one(&k), theta]).unwrap()
    }

    #[test]
    fn ideal_classes() {
        let o8 = QuadOrder::from_disc(8).unwrap();
        let cg8 = class_group(&o8).unwrap();
        assert_eq!(ideal_class_of(&lattice(&o8, &[(0, 1), (1, 2)]), &cg8).unwrap(), 0);
        let o5 = QuadOrder::from_disc(5).unwrap();
        let cg5 = class_group(&o5).unwrap();
        assert_eq!(ideal_class_of(&lattice(&o5, &[(-1, 2), (1, 2)]), &cg5).unwrap(), 0);
        let o40 = QuadOrder::from_disc(40).unwrap();
        let cg40 = class_group(&o40).unwrap();
        // generator is sqrt 40 = 2 sqrt 10
        assert_eq!(ideal_class_of(&lattice(&o40, &[(0, 1), (1, 4)]), &cg40).unwrap(), 1);
        assert_eq!(ideal_class_of(&lattice(&o40, &[(0, 1), (1, 2)]), &cg40).unwrap(), 0);
        assert!(matches!(
            ideal_class_of(&lattice(&o8, &[(0, 1), (1, 1)]), &cg8),
            Err(OrderError::WrongOrder { .. })
        ));
    }

    #[test]
    fn action_tables() {
        let o5 = QuadOrder::from_disc(5).unwrap();
        let cg5 = class_group(&o5).unwrap();
        let k5 = o5.field();
        let t = galois_action_table(&[lattice(&o5, &[(-1, 2), (1, 2)])], &[AlgebraicReal::one(&k5)], &cg5).unwrap();
        match t {
            GaloisAction::Table(t) => {
                assert_eq!(t.perm, vec![vec![0]]);
                assert!(t.verify_axioms(&cg5));
            }
            other => panic!("{other:?}"),
        }
        let o40 = QuadOrder::from_disc(40).unwrap();
        let cg40 = class_group(&o40).unwrap();
        let k = o40.field();
        let labels = [AlgebraicReal::from_int(&k, 1), AlgebraicReal::from_int(&k, 2)];
        let two = [lattice(&o40, &[(0, 1), (1, 2)]), lattice(&o40, &[(0, 1), (1, 4)])];
        match galois_action_table(&two, &labels, &cg40).unwrap() {
            GaloisAction::Table(t) => {
                assert_eq!(t.perm, vec![vec![0, 1], vec![1, 0]]);
                assert!(t.verify_axioms(&cg40));
            }
            other => panic!("{other:?}"),
        }
        let same = [lattice(&o40, &[(0, 1), (1, 2)]), lattice(&o40, &[(3, 1), (1, 2)])];
        assert_eq!(
            galois_action_table(&same, &labels, &cg40).unwrap(),
            GaloisAction::ClassCountMismatch {
                lattices: 2,
                distinct_classes: 1,
                h: 2,
                h_plus: 2
            }
        );
    }
}
