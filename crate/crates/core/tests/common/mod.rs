//! Independent oracles shared by the integration and acceptance tests. None of
//! these call into the library's algorithms.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use heckerm::exact::{AlgebraicReal, IntMatrix, IntPolynomial, RealNumberField};

pub fn isqrt(n: i128) -> i128 {
    assert!(n >= 0);
    let mut x = (n as f64).sqrt() as i128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn is_square(n: i128) -> bool {
    n >= 0 && isqrt(n).pow(2) == n
}

pub fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Continued-fraction digits of `(p + sqrt d)/q` by the integer recurrence.
pub fn cf_digits(p: i128, q: i128, d: i128, count: usize) -> Vec<i128> {
    assert!(q != 0 && d > 0 && !is_square(d));
    let (mut p, mut q, mut d) = (p, q, d);
    if (d - p * p) % q != 0 {
        // rescale so that q | d - p^2
        p *= q.abs();
        d *= q * q;
        q *= q.abs();
    }
    let s = isqrt(d);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let a = if q > 0 {
            (p + s).div_euclid(q)
        } else {
            -((p + s).div_euclid(-q)) - 1
        };
        out.push(a);
        p = a * q - p;
        q = (d - p * p) / q;
    }
    out
}

/// A random quadratic irrational `theta = (-b + s sqrt(disc))/(2a) > 1` from a
/// primitive-or-not minimal polynomial `a x^2 + b x + c` with `1 <= |coeffs| <= 50`.
pub struct Surd {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub sign: i64,
    pub disc: i64,
    pub theta: AlgebraicReal,
}

impl Surd {
    /// `theta = (p + sqrt(d))/q` in oracle form.
    pub fn pqd(&self) -> (i128, i128, i128) {
        let (p, q) = (-self.b as i128, 2 * self.a as i128);
        if self.sign > 0 {
            (p, q, self.disc as i128)
        } else {
            (-p, -q, self.disc as i128)
        }
    }
}

pub fn random_surd<R: Rng>(rng: &mut R) -> Surd {
    loop {
        let mut coeff = || {
            let v: i64 = rng.gen_range(1..=50);
            if rng.gen_bool(0.5) {
                v
            } else {
                -v
            }
        };
        let (a, b, c) = (coeff(), coeff(), coeff());
        let disc = b * b - 4 * a * c;
        if disc <= 0 || is_square(disc as i128) {
            continue;
        }
        let ks = RealNumberField::real_embeddings(&IntPolynomial::from_i64s(&[-disc, 0, 1])).unwrap();
        let k = &ks[1];
        for sign in [1i64, -1] {
            let theta = AlgebraicReal::new(
                k,
                vec![
                    BigRational::new((-b).into(), (2 * a).into()),
                    BigRational::new(sign.into(), (2 * a).into()),
                ],
            );
            if theta.to_f64() > 1.0 && theta.floor() >= BigInt::from(1) {
                return Surd {
                    a,
                    b,
                    c,
                    sign,
                    disc,
                    theta,
                };
            }
        }
    }
}

/// A random matrix in GL_n(Z) as a product of elementary moves.
pub fn random_unimodular<R: Rng>(rng: &mut R, n: usize, moves: usize, nonnegative: bool) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    for _ in 0..moves {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n);
        while j == i {
            j = rng.gen_range(0..n);
        }
        let mut e = IntMatrix::identity(n);
        match rng.gen_range(0..3) {
            0 => {
                let k: i64 = if nonnegative { rng.gen_range(1..=2) } else { rng.gen_range(-2..=2) };
                e.set(i, j, k.into());
            }
            1 => {
                e.set(i, i, 0.into());
                e.set(j, j, 0.into());
                e.set(i, j, 1.into());
                e.set(j, i, 1.into());
            }
            _ if !nonnegative => e.set(i, i, (-1).into()),
            _ => {}
        }
        m = e.mul(&m);
    }
    m
}

// ---------- indefinite binary quadratic forms ----------

pub type Form = (i64, i64, i64);

/// Reduced forms of positive nonsquare discriminant `d`: `0 < b < sqrt d`,
/// `sqrt d - b < 2|a| < sqrt d + b`.
pub fn reduced_forms(d: i64) -> Vec<Form> {
    let sd = (d as f64).sqrt();
    let mut out = Vec::new();
    for b in 1..=(sd.floor() as i64) {
        if (b * b - d) % 4 != 0 {
            continue;
        }
        let ac = (b * b - d) / 4;
        for a in 1..=ac.abs() {
            if ac % a != 0 {
                continue;
            }
            for sa in [a, -a] {
                let c = ac / sa;
                let two_a = 2.0 * a as f64;
                if sd - (b as f64) < two_a && two_a < sd + b as f64 {
                    out.push((sa, b, c));
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// `(a, b, c) -> (c, b', a')` with `b' = -b mod 2c` in `(sqrt d - 2|c|, sqrt d)`.
pub fn rho(f: Form, d: i64) -> Form {
    let (_, b, c) = f;
    let sd = (d as f64).sqrt();
    let m = 2 * c.abs();
    let mut bp = (-b).rem_euclid(m);
    // largest representative below sqrt d
    while (bp as f64) < sd - m as f64 {
        bp += m;
    }
    while (bp as f64) > sd {
        bp -= m;
    }
    let ap = (bp * bp - d) / (4 * c);
    (c, bp, ap)
}

fn find(p: &mut Vec<usize>, x: usize) -> usize {
    if p[x] != x {
        let r = find(p, p[x]);
        p[x] = r;
    }
    p[x]
}

/// `(h, h_plus)`: narrow classes are the orbits of rho on reduced primitive forms;
/// wide classes also identify `(a, b, c)` with `(-a, b, -c)`.
pub fn class_numbers(d: i64) -> (usize, usize) {
    let forms: Vec<Form> = reduced_forms(d)
        .into_iter()
        .filter(|&(a, b, c)| gcd(gcd(a, b), c) == 1)
        .collect();
    let idx: HashMap<Form, usize> = forms.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let mut parent: Vec<usize> = (0..forms.len()).collect();
    for (i, &f) in forms.iter().enumerate() {
        let j = idx[&rho(f, d)];
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        parent[ri] = rj;
    }
    let narrow: HashSet<usize> = (0..forms.len()).map(|i| find(&mut parent, i)).collect();
    let h_plus = narrow.len();
    for (i, &(a, b, c)) in forms.iter().enumerate() {
        let j = idx[&(-a, b, -c)];
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        parent[ri] = rj;
    }
    let wide: HashSet<usize> = (0..forms.len()).map(|i| find(&mut parent, i)).collect();
    (wide.len(), h_plus)
}

pub fn valid_discriminant(d: i64) -> bool {
    d > 0 && (d % 4 == 0 || d % 4 == 1) && !is_square(d as i128)
}

// ---------- positive definite forms ----------

/// Class number of primitive positive definite forms of discriminant `d < 0`,
/// with the forms of discriminant -4 and -3 weighted 1/2 and 1/3.
pub fn weighted_class_number(d: i64) -> BigRational {
    assert!(d < 0);
    let mut h = 0i64;
    let mut a = 1i64;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            if (b * b - d) % (4 * a) != 0 {
                continue;
            }
            let c = (b * b - d) / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            if gcd(gcd(a, b), c) == 1 {
                h += 1;
            }
        }
        a += 1;
    }
    let w = match d {
        -3 => 3,
        -4 => 2,
        _ => 1,
    };
    BigRational::new(h.into(), w.into())
}

// ---------- arithmetic of Gamma_0(N) ----------

pub fn divisors(n: i64) -> Vec<i64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

pub fn is_prime(n: i64) -> bool {
    n > 1 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

pub fn phi(n: i64) -> i64 {
    (1..=n).filter(|&k| gcd(k, n) == 1).count() as i64
}

/// Index of Gamma_0(N) in SL_2(Z): `N prod (1 + 1/p)`.
pub fn psi(n: i64) -> i64 {
    let primes: Vec<i64> = divisors(n).into_iter().filter(|&p| is_prime(p)).collect();
    primes.iter().fold(n, |acc, p| acc / p * (p + 1))
}

fn roots_mod(n: i64, f: impl Fn(i64) -> i64) -> i64 {
    (0..n).filter(|&x| f(x).rem_euclid(n) == 0).count() as i64
}

/// Genus of X_0(N) by brute-force counts of elliptic points and cusps.
pub fn genus(n: i64) -> i64 {
    let mu = psi(n);
    let nu2 = roots_mod(n, |x| x * x + 1);
    let nu3 = roots_mod(n, |x| x * x + x + 1);
    let cusps: i64 = divisors(n).iter().map(|&d| phi(gcd(d, n / d))).sum();
    let twelve = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * cusps;
    assert_eq!(twelve % 12, 0);
    twelve / 12
}

/// Trace of `T_n` on weight-2 cusp forms for Gamma_0(N), `gcd(n, N) = 1`, by the
/// Eichler-Selberg trace formula.
pub fn trace_formula(level: i64, n: i64) -> BigRational {
    assert_eq!(gcd(n, level), 1);
    let q = |a: i64| BigRational::from_integer(a.into());
    let half = BigRational::new(1.into(), 2.into());
    let mut total = BigRational::from_integer(0.into());
    // identity term
    let r = (n as f64).sqrt().round() as i64;
    if r * r == n {
        total += BigRational::new(psi(level).into(), 12.into());
    }
    // elliptic terms
    let mut ell = BigRational::from_integer(0.into());
    let mut t = 0i64;
    while t * t < 4 * n {
        t += 1;
    }
    for t in -(t - 1)..t {
        let disc = t * t - 4 * n;
        for f in 1..=((-disc) as f64).sqrt() as i64 {
            if disc % (f * f) != 0 {
                continue;
            }
            let d = disc / (f * f);
            if d.rem_euclid(4) > 1 {
                continue;
            }
            let nf = gcd(level, f);
            let m = level * nf;
            let sols = (0..level).filter(|&x| (x * x - t * x + n).rem_euclid(m) == 0).count() as i64;
            let mu = BigRational::new((psi(level) * sols).into(), psi(level / nf).into());
            ell += weighted_class_number(d) * mu;
        }
    }
    total -= &half * ell;
    // hyperbolic terms
    let mut hyp = 0i64;
    for d in divisors(n) {
        let e = n / d;
        let inner: i64 = divisors(level)
            .into_iter()
            .filter(|&tau| {
                let g = gcd(tau, level / tau);
                (e - d) % g == 0
            })
            .map(|tau| phi(gcd(tau, level / tau)))
            .sum();
        hyp += d.min(e) * inner;
    }
    total -= &half * q(hyp);
    // weight-2 correction
    total += q(divisors(n).into_iter().filter(|&t| gcd(level, n / t) == 1).sum());
    total
}
