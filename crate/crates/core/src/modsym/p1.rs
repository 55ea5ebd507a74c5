//! The projective line over Z/N, SL2 lifts, and cusp equivalence for Gamma_0(N).

use num_integer::Integer;

/// Points of `P^1(Z/N)` with a dense index.
#[derive(Clone, Debug)]
pub struct P1List {
    n: i64,
    points: Vec<(i64, i64)>,
    /// `lookup[c * n + d]` is the index of the class of `(c, d)`, if any.
    lookup: Vec<Option<usize>>,
}

impl P1List {
    pub fn new(n: i64) -> Self {
        assert!(n >= 1);
        let units: Vec<i64> = (1..=n.max(1)).filter(|u| u.gcd(&n) == 1).map(|u| u % n).collect();
        let size = (n * n) as usize;
        let mut canon: Vec<Option<(i64, i64)>> = vec![None; size];
        for c in 0..n {
            for d in 0..n {
                if c.gcd(&d).gcd(&n) != 1 {
                    continue;
                }
                let best = units
                    .iter()
                    .map(|&u| ((u * c).rem_euclid(n), (u * d).rem_euclid(n)))
                    .min()
                    .unwrap();
                canon[(c * n + d) as usize] = Some(best);
            }
        }
        let mut points: Vec<(i64, i64)> = canon.iter().flatten().copied().collect();
        points.sort();
        points.dedup();
        let lookup = canon
            .iter()
            .map(|p| p.map(|q| points.binary_search(&q).unwrap()))
            .collect();
        P1List { n, points, lookup }
    }

    pub fn level(&self) -> i64 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> (i64, i64) {
        self.points[i]
    }

    pub fn points(&self) -> &[(i64, i64)] {
        &self.points
    }

    /// Index of `(c : d)`, or `None` when `gcd(c, d, N) != 1`.
    pub fn index(&self, c: i64, d: i64) -> Option<usize> {
        let (c, d) = (c.rem_euclid(self.n), d.rem_euclid(self.n));
        self.lookup[(c * self.n + d) as usize]
    }
}

/// `psi(N) = N prod_{p | N} (1 + 1/p)`, the size of `P^1(Z/N)`.
pub fn psi(n: i64) -> i64 {
    let mut out = n;
    for p in prime_divisors(n) {
        out = out / p * (p + 1);
    }
    out
}

pub fn prime_divisors(mut n: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn euler_phi(n: i64) -> i64 {
    prime_divisors(n).into_iter().fold(n, |acc, p| acc / p * (p - 1))
}

pub fn divisors(n: i64) -> Vec<i64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// A matrix `[[a, b], [c', d']]` in `SL2(Z)` whose bottom row reduces to `(c : d)` mod `N`.
pub fn lift_to_sl2z(c: i64, d: i64, n: i64) -> [i64; 4] {
    if n == 1 {
        return [1, 0, 0, 1];
    }
    let mut c = c.rem_euclid(n);
    let d0 = d.rem_euclid(n);
    if c == 0 {
        c = n;
    }
    let mut d = d0;
    // some d + kN is coprime to c because gcd(c, d, N) = 1
    while c.gcd(&d) != 1 {
        d += n;
    }
    let e = d.extended_gcd(&c);
    // e.x d + e.y c = 1, so a = e.x, b = -e.y
    let m = [e.x, -e.y, c, d];
    debug_assert_eq!(m[0] * m[3] - m[1] * m[2], 1);
    m
}

/// Cusp `p/q` in lowest terms with `q >= 0`; infinity is `1/0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cusp {
    pub p: i64,
    pub q: i64,
}

impl Cusp {
    pub fn new(p: i64, q: i64) -> Self {
        let g = p.gcd(&q);
        let (mut p, mut q) = (p / g, q / g);
        if q < 0 || (q == 0 && p < 0) {
            p = -p;
            q = -q;
        }
        Cusp { p, q }
    }
}

/// `p1/q1 ~ p2/q2` under Gamma_0(N) iff `s1 q2 = s2 q1 mod gcd(q1 q2, N)`
/// where `s_i p_i = 1 mod q_i`.
pub fn cusps_equivalent(a: Cusp, b: Cusp, n: i64) -> bool {
    let inv = |p: i64, q: i64| -> i64 {
        if q == 0 || q == 1 {
            return 1;
        }
        p.rem_euclid(q).extended_gcd(&q).x.rem_euclid(q)
    };
    let (s1, s2) = (inv(a.p, a.q), inv(b.p, b.q));
    let m = (a.q * b.q).gcd(&n);
    (s1 * b.q - s2 * a.q).rem_euclid(m) == 0
}

/// Number of Gamma_0(N) cusp classes, `sum_{d | N} phi(gcd(d, N/d))`.
pub fn cusp_count(n: i64) -> i64 {
    divisors(n).into_iter().map(|d| euler_phi(d.gcd(&(n / d)))).sum()
}

/// Assigns class indices to cusps as they are encountered.
#[derive(Clone, Debug, Default)]
pub struct CuspClasses {
    n: i64,
    reps: Vec<Cusp>,
}

impl CuspClasses {
    pub fn new(n: i64) -> Self {
        CuspClasses { n, reps: Vec::new() }
    }

    pub fn class_of(&mut self, c: Cusp) -> usize {
        if let Some(i) = self.reps.iter().position(|r| cusps_equivalent(*r, c, self.n)) {
            return i;
        }
        self.reps.push(c);
        self.reps.len() - 1
    }

    pub fn reps(&self) -> &[Cusp] {
        &self.reps
    }
}
