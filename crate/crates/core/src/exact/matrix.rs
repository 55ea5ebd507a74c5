//! Small dense matrices over Z and Q.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::poly::{IntPolynomial, QPoly};

pub type QMatrix = Vec<Vec<BigRational>>;

/// Square or rectangular integer matrix stored by rows.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<String>>", try_from = "Vec<Vec<String>>")]
pub struct IntMatrix {
    rows: Vec<Vec<BigInt>>,
}

impl IntMatrix {
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        if let Some(first) = rows.first() {
            assert!(rows.iter().all(|r| r.len() == first.len()), "ragged matrix");
        }
        IntMatrix { rows }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        Self::from_rows(
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                        .collect()
                })
                .collect(),
        )
    }

    pub fn zeros(r: usize, c: usize) -> Self {
        Self::from_rows(vec![vec![BigInt::zero(); c]; r])
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols()
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.rows[i][j] = v;
    }

    pub fn transpose(&self) -> Self {
        let (r, c) = (self.nrows(), self.ncols());
        Self::from_rows(
            (0..c)
                .map(|j| (0..r).map(|i| self.rows[i][j].clone()).collect())
                .collect(),
        )
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.ncols(), other.nrows(), "dimension mismatch");
        let n = other.ncols();
        IntMatrix::from_rows(
            self.rows
                .iter()
                .map(|row| {
                    (0..n)
                        .map(|j| {
                            row.iter()
                                .zip(other.rows.iter())
                                .filter(|(a, _)| !a.is_zero())
                                .map(|(a, orow)| a * &orow[j])
                                .sum()
                        })
                        .collect()
                })
                .collect(),
        )
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        IntMatrix::from_rows(
            self.rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
        )
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        IntMatrix::from_rows(
            self.rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
                .collect(),
        )
    }

    pub fn scale(&self, k: &BigInt) -> IntMatrix {
        IntMatrix::from_rows(
            self.rows
                .iter()
                .map(|r| r.iter().map(|x| x * k).collect())
                .collect(),
        )
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn to_q(&self) -> QMatrix {
        self.rows
            .iter()
            .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
            .collect()
    }

    pub fn trace(&self) -> BigInt {
        (0..self.nrows()).map(|i| self.rows[i][i].clone()).sum()
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square());
        let n = self.nrows();
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.rows.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                    Some(i) => {
                        m.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    m[i][j] = v / &prev;
                }
            }
            prev = m[k][k].clone();
        }
        sign * &m[n - 1][n - 1]
    }

    /// Characteristic polynomial `det(xI - M)`.
    pub fn charpoly(&self) -> IntPolynomial {
        charpoly_q(&self.to_q())
            .to_int_exact()
            .expect("integer matrix has an integral characteristic polynomial")
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.nrows()).all(|i| (0..i).all(|j| self.rows[i][j] == self.rows[j][i]))
    }

    pub fn pow(&self, e: u32) -> IntMatrix {
        let mut acc = IntMatrix::identity(self.nrows());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Inverse of a unimodular matrix.
    pub fn inverse_unimodular(&self) -> Option<IntMatrix> {
        let inv = inverse_q(&self.to_q())?;
        let rows = inv
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|x| x.is_integer().then(|| x.to_integer()))
                    .collect::<Option<Vec<_>>>()
            })
            .collect::<Option<Vec<_>>>()?;
        Some(IntMatrix::from_rows(rows))
    }
}

impl From<IntMatrix> for Vec<Vec<String>> {
    fn from(m: IntMatrix) -> Self {
        m.rows
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect())
            .collect()
    }
}

impl TryFrom<Vec<Vec<String>>> for IntMatrix {
    type Error = String;
    fn try_from(v: Vec<Vec<String>>) -> Result<Self, String> {
        let rows = v
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| s.parse::<BigInt>().map_err(|e| e.to_string()))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(first) = rows.first() {
            if rows.iter().any(|r| r.len() != first.len()) {
                return Err("ragged matrix".into());
            }
        }
        Ok(IntMatrix { rows })
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, x) in r.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

pub fn q_zeros(r: usize, c: usize) -> QMatrix {
    vec![vec![BigRational::zero(); c]; r]
}

pub fn q_identity(n: usize) -> QMatrix {
    let mut m = q_zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = BigRational::one();
    }
    m
}

pub fn q_mul(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let n = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            let mut out = vec![BigRational::zero(); n];
            for (x, brow) in row.iter().zip(b) {
                if x.is_zero() {
                    continue;
                }
                for (o, y) in out.iter_mut().zip(brow) {
                    *o += x * y;
                }
            }
            out
        })
        .collect()
}

/// Row vector times matrix.
pub fn q_vec_mul(v: &[BigRational], m: &QMatrix) -> Vec<BigRational> {
    let n = m.first().map_or(0, Vec::len);
    let mut out = vec![BigRational::zero(); n];
    for (x, row) in v.iter().zip(m) {
        if x.is_zero() {
            continue;
        }
        for (o, y) in out.iter_mut().zip(row) {
            *o += x * y;
        }
    }
    out
}

pub fn q_transpose(m: &QMatrix) -> QMatrix {
    let c = m.first().map_or(0, Vec::len);
    (0..c)
        .map(|j| m.iter().map(|r| r[j].clone()).collect())
        .collect()
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut QMatrix) -> Vec<usize> {
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
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    pivots
}

pub fn rank(m: &QMatrix) -> usize {
    let mut c = m.clone();
    rref(&mut c).len()
}

/// Basis of the right kernel `{x : M x = 0}`.
pub fn right_kernel(m: &QMatrix, ncols: usize) -> Vec<Vec<BigRational>> {
    let mut r = m.clone();
    let pivots = rref(&mut r);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); ncols];
            v[f] = BigRational::one();
            for (row, &pc) in r.iter().zip(&pivots) {
                v[pc] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Basis of the left kernel `{x : x M = 0}`.
pub fn left_kernel(m: &QMatrix) -> Vec<Vec<BigRational>> {
    let rows = m.len();
    right_kernel(&q_transpose(m), rows)
}

/// Solve `x B = v` for a row vector `x`, where the rows of `B` are independent.
pub fn solve_in_row_span(basis: &[Vec<BigRational>], v: &[BigRational]) -> Option<Vec<BigRational>> {
    let k = basis.len();
    let n = v.len();
    // augmented system: columns are coordinates, unknowns are the k coefficients
    let mut aug: QMatrix = (0..n)
        .map(|j| {
            let mut row: Vec<BigRational> = basis.iter().map(|b| b[j].clone()).collect();
            row.push(v[j].clone());
            row
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&k) {
        return None;
    }
    let mut x = vec![BigRational::zero(); k];
    for (row, &pc) in aug.iter().zip(&pivots) {
        x[pc] = row[k].clone();
    }
    Some(x)
}

pub fn inverse_q(m: &QMatrix) -> Option<QMatrix> {
    let n = m.len();
    let mut aug: QMatrix = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            row
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Characteristic polynomial `det(xI - M)` via reduction to Hessenberg form.
pub fn charpoly_q(m: &QMatrix) -> QPoly {
    let n = m.len();
    let mut h = m.clone();
    // similarity reduction to upper Hessenberg form
    for c in 0..n.saturating_sub(2) {
        let Some(p) = (c + 1..n).find(|&i| !h[i][c].is_zero()) else {
            continue;
        };
        if p != c + 1 {
            h.swap(p, c + 1);
            for row in h.iter_mut() {
                row.swap(p, c + 1);
            }
        }
        let piv = h[c + 1][c].clone();
        for i in c + 2..n {
            if h[i][c].is_zero() {
                continue;
            }
            let f = &h[i][c] / &piv;
            let src = h[c + 1].clone();
            for (x, y) in h[i].iter_mut().zip(&src) {
                *x -= &f * y;
            }
            for row in h.iter_mut() {
                let add = &f * &row[i];
                row[c + 1] += add;
            }
        }
    }
    // recurrence on leading principal submatrices
    let mut polys: Vec<QPoly> = vec![QPoly::one()];
    for k in 0..n {
        let xk = &QPoly::x() - &QPoly::constant(h[k][k].clone());
        let mut pk = &xk * &polys[k];
        let mut prod = BigRational::one();
        for i in (0..k).rev() {
            prod *= &h[i + 1][i];
            if prod.is_zero() {
                break;
            }
            let coef = &prod * &h[i][k];
            pk = &pk - &polys[i].scale(&coef);
        }
        polys.push(pk);
    }
    polys.pop().unwrap()
}

// ---- integer lattices ----

/// Hermite-style row echelon form over Z of the given rows, returning the
/// nonzero rows (a Z-basis of the row lattice) in echelon order.
pub fn z_row_echelon(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let (h, _) = z_echelon_with_transform(rows, false);
    h
}

/// Echelon form with the unimodular row transform. Returns `(nonzero
/// echelon rows, transform rows that map the input onto zero rows)` when
/// `want_kernel` is set, i.e. a Z-basis of the left kernel.
fn z_echelon_with_transform(
    rows: &[Vec<BigInt>],
    want_kernel: bool,
) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let nr = rows.len();
    let nc = rows.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    let mut t: Vec<Vec<BigInt>> = if want_kernel {
        (0..nr)
            .map(|i| {
                (0..nr)
                    .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                    .collect()
            })
            .collect()
    } else {
        Vec::new()
    };
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..nc {
        if r == nr {
            break;
        }
        // gcd-combine all entries of column c (rows r..) into row r
        loop {
            let nz: Vec<usize> = (r..nr).filter(|&i| !m[i][c].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| m[i][c].abs()).unwrap();
            m.swap(r, p);
            if want_kernel {
                t.swap(r, p);
            }
            let mut done = true;
            for i in r + 1..nr {
                if m[i][c].is_zero() {
                    continue;
                }
                let q = m[i][c].div_floor(&m[r][c]);
                let (head, tail) = m.split_at_mut(i);
                for (x, y) in tail[0].iter_mut().zip(&head[r]) {
                    *x -= &q * y;
                }
                if want_kernel {
                    let (th, tt) = t.split_at_mut(i);
                    for (x, y) in tt[0].iter_mut().zip(&th[r]) {
                        *x -= &q * y;
                    }
                }
                if !m[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if m[r][c].is_zero() {
            continue;
        }
        if m[r][c].is_negative() {
            for x in m[r].iter_mut() {
                *x = -x.clone();
            }
            if want_kernel {
                for x in t[r].iter_mut() {
                    *x = -x.clone();
                }
            }
        }
        // reduce entries above the pivot
        for i in 0..r {
            if m[i][c].is_zero() {
                continue;
            }
            let q = m[i][c].div_floor(&m[r][c]);
            let (head, tail) = m.split_at_mut(r);
            for (x, y) in head[i].iter_mut().zip(&tail[0]) {
                *x -= &q * y;
            }
            if want_kernel {
                let (th, tt) = t.split_at_mut(r);
                for (x, y) in th[i].iter_mut().zip(&tt[0]) {
                    *x -= &q * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let kernel = if want_kernel { t.split_off(r) } else { Vec::new() };
    m.truncate(r);
    (m, kernel)
}

/// Z-basis of the left integer kernel `{x in Z^n : x M = 0}` of an integer matrix
/// given by its `n` rows.
pub fn z_left_kernel(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let (_, k) = z_echelon_with_transform(rows, true);
    z_row_echelon(&k)
}

/// Clear denominators of a rational vector; returns the primitive integer
/// vector spanning the same line (sign preserved).
pub fn primitive_int_vector(v: &[BigRational]) -> Vec<BigInt> {
    let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| (x * BigRational::from_integer(den.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}
