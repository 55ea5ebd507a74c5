//! Indefinite binary quadratic forms: reduction cycles and composition.

use num_integer::{Integer, Roots};
use serde::{Deserialize, Serialize};

/// `a x^2 + b x y + c y^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IndefiniteForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl IndefiniteForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        IndefiniteForm { a, b, c }
    }

    /// Form with the given `a` and `b`; `c` is solved from the discriminant.
    pub fn from_ab(a: i64, b: i64, d: i64) -> Option<Self> {
        let num = b as i128 * b as i128 - d as i128;
        let den = 4 * a as i128;
        if a == 0 || num % den != 0 {
            return None;
        }
        Some(IndefiniteForm::new(a, b, (num / den) as i64))
    }

    pub fn discriminant(&self) -> i64 {
        (self.b as i128 * self.b as i128 - 4 * self.a as i128 * self.c as i128) as i64
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }

    /// `0 < b < sqrt D` and `sqrt D - b < 2|a| < sqrt D + b`.
    pub fn is_reduced(&self) -> bool {
        let d = self.discriminant() as i128;
        let b = self.b as i128;
        let a2 = 2 * (self.a as i128).abs();
        b > 0 && b * b < d && (a2 + b) * (a2 + b) > d && (a2 - b < 0 || (a2 - b) * (a2 - b) < d)
    }

    /// The opposite form `(a, -b, c)`, representing the inverse class.
    pub fn inverse(&self) -> Self {
        IndefiniteForm::new(self.a, -self.b, self.c)
    }

    /// Reduction operator: `(a, b, c) -> (c, b', (b'^2 - D)/(4c))` with
    /// `b' = -b mod 2|c|` normalized into the reduced range when `c^2 < D`.
    pub fn rho(&self) -> Self {
        let d = self.discriminant();
        let s = d.sqrt();
        let c = self.c;
        let m = 2 * c.abs();
        let bp = if (c as i128) * (c as i128) < d as i128 {
            s - (s + self.b).rem_euclid(m)
        } else {
            // representative of -b mod 2|c| in (-|c|, |c|]
            let mut r = (-self.b).rem_euclid(m);
            if r > c.abs() {
                r -= m;
            }
            r
        };
        IndefiniteForm::from_ab(c, bp, d).expect("rho preserves the discriminant")
    }

    /// Apply `rho` until reduced.
    pub fn reduce(&self) -> Self {
        let mut f = *self;
        let mut guard = 0usize;
        while !f.is_reduced() {
            f = f.rho();
            guard += 1;
            assert!(guard < 100_000, "reduction did not terminate for {self:?}");
        }
        f
    }

    /// The full `rho`-cycle of a reduced form, starting with it.
    pub fn cycle(&self) -> Vec<Self> {
        debug_assert!(self.is_reduced());
        let mut out = vec![*self];
        let mut f = self.rho();
        while f != *self {
            out.push(f);
            f = f.rho();
        }
        out
    }

    /// Gauss composition for forms with positive first coefficients; the
    /// result is not reduced.
    pub fn compose(&self, other: &Self) -> Self {
        let d = self.discriminant();
        debug_assert_eq!(d, other.discriminant());
        let (f1, f2) = if self.a > other.a { (other, self) } else { (self, other) };
        let (a1, b1) = (f1.a as i128, f1.b as i128);
        let (a2, b2, c2) = (f2.a as i128, f2.b as i128, f2.c as i128);
        let s = (b1 + b2) / 2;
        let n = b2 - s;
        let (y1, dd) = if a2 % a1 == 0 {
            (0, a1)
        } else {
            let e = a2.extended_gcd(&a1);
            (e.x, e.gcd)
        };
        let (x2, y2, d1) = if s % dd == 0 {
            (0, -1, dd)
        } else {
            let e = s.extended_gcd(&dd);
            (e.x, -e.y, e.gcd)
        };
        let v1 = a1 / d1;
        let v2 = a2 / d1;
        let r = (y1 * y2 * n - x2 * c2).rem_euclid(v1);
        let b3 = b2 + 2 * v2 * r;
        let a3 = v1 * v2;
        let c3 = (b3 * b3 - d as i128) / (4 * a3);
        debug_assert_eq!(b3 * b3 - 4 * a3 * c3, d as i128);
        IndefiniteForm::new(a3 as i64, b3 as i64, c3 as i64)
    }
}

/// All primitive reduced forms of discriminant `d`, sorted.
pub fn reduced_forms(d: i64) -> Vec<IndefiniteForm> {
    let s = d.sqrt();
    let mut out = Vec::new();
    let mut b = if d % 2 == 0 { 2 } else { 1 };
    while b <= s {
        if b * b < d {
            let ac = (b * b - d) / 4;
            for a in 1..=ac.abs() {
                if ac % a != 0 {
                    continue;
                }
                for sa in [a, -a] {
                    let f = IndefiniteForm::new(sa, b, ac / sa);
                    if f.is_reduced() && f.is_primitive() {
                        out.push(f);
                    }
                }
            }
        }
        b += 2;
    }
    out.sort();
    out
}
