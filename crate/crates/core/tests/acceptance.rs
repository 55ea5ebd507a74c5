//! Acceptance criteria 1-10, one PASS/FAIL line each.

mod common;

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use common::*;
use heckerm::contfrac::{hecke_unit, jp_expand, jp_step, verify_perron_eigenvector, JPState, JpStatus};
use heckerm::exact::{AlgebraicReal, IntMatrix, IntPolynomial, RealNumberField};
use heckerm::modsym::{genus_formula, ModularSymbolSpace};
use heckerm::pipeline::{
    analyze_level, analyze_levels, cache_get, cache_put, Config, LevelReport, LevelStatus, Stage, Verdict,
};
use heckerm::pseudolattice::{equals, EndRing, PseudoLattice};
use heckerm::quadorder::{class_group, fundamental_unit, GaloisAction, QuadOrder};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, u64);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const SEED: u64 = 0x5eed_2026;

fn check_unit_certificate(exp: &heckerm::contfrac::JacobiPerronExpansion) -> Result<(), String> {
    let a = exp.period_matrix().ok_or("no period matrix")?;
    let state = exp.period_state.as_ref().ok_or("no period state")?;
    ensure!(a.det().abs().is_one(), "det A = {}", a.det());
    let c0 = a.charpoly().coeff(0);
    ensure!(c0.abs().is_one(), "constant coefficient {c0}");
    let unit = hecke_unit(exp).map_err(|e| e.to_string())?;
    ensure!(unit.value.norm().abs().is_one(), "lambda_A has norm {}", unit.value.norm());
    ensure!(
        verify_perron_eigenvector(&a, state, &unit).map_err(|e| e.to_string())?,
        "Perron eigenvector check failed"
    );
    Ok(())
}

fn surds() -> Vec<Surd> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..50).map(|_| random_surd(&mut rng)).collect()
}

fn criterion1() -> Outcome {
    let mut periods = Vec::new();
    for s in surds() {
        let (p, q, d) = s.pqd();
        let oracle = cf_digits(p, q, d, 200);
        let mut state = JPState::new(vec![s.theta.clone()]).map_err(|e| e.to_string())?;
        for (i, want) in oracle.iter().enumerate() {
            let (b, next) = jp_step(&state).map_err(|e| e.to_string())?;
            ensure!(b[0] == BigInt::from(*want), "theta {}: digit {i} is {} not {want}", s.theta, b[0]);
            state = next;
        }
        let exp = jp_expand(&JPState::new(vec![s.theta.clone()]).unwrap(), 2000).map_err(|e| e.to_string())?;
        ensure!(exp.status == JpStatus::Periodic, "theta {}: not periodic", s.theta);
        periods.push(exp.period_len);
    }
    Ok(format!("50 surds x 200 digits, periods up to {}", periods.iter().max().unwrap()))
}

fn criterion2() -> Outcome {
    let mut count = 0;
    for s in surds() {
        let exp = jp_expand(&JPState::new(vec![s.theta.clone()]).unwrap(), 2000).map_err(|e| e.to_string())?;
        check_unit_certificate(&exp).map_err(|e| format!("theta {}: {e}", s.theta))?;
        count += 1;
    }
    let config = Config::default();
    for level in [23, 29, 31] {
        let r = analyze_level(level, &config).map_err(|e| e.to_string())?;
        for a in &r.anosov {
            for e in &a.embeddings {
                let lambda = &e.eigenvector.done().ok_or("no eigenvector")?.lambda;
                let exp = jp_expand(&JPState::from_vector(lambda).unwrap(), config.max_jp_steps)
                    .map_err(|e| e.to_string())?;
                if exp.status == JpStatus::Periodic {
                    check_unit_certificate(&exp).map_err(|err| format!("N = {level}, embedding {}: {err}", e.embedding))?;
                    let u = e.unit.done().ok_or("report lacks the unit")?;
                    ensure!(u.norm_is_unit && u.perron_eigenvector, "report certificate incomplete");
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} periodic expansions certified"))
}

/// Transition matrix `X` with `new = X old`, by elimination over Q on field coordinates.
fn transition(old: &[AlgebraicReal], new: &[AlgebraicReal]) -> Option<Vec<Vec<BigRational>>> {
    let n = old.len();
    let deg = old[0].field().degree();
    if n != deg {
        return None;
    }
    let coords = |x: &AlgebraicReal| -> Vec<BigRational> {
        let mut c = x.coords().to_vec();
        c.resize(deg, BigRational::zero());
        c
    };
    // solve X G = G' row by row: augmented [G^T | g'_i]
    let g: Vec<Vec<BigRational>> = old.iter().map(coords).collect();
    let mut x = Vec::new();
    for t in new {
        let target = coords(t);
        let mut m: Vec<Vec<BigRational>> =
            (0..deg).map(|c| (0..n).map(|r| g[r][c].clone()).chain([target[c].clone()]).collect()).collect();
        for col in 0..n {
            let piv = (col..deg).find(|&r| !m[r][col].is_zero())?;
            m.swap(col, piv);
            let p = m[col][col].clone();
            for v in m[col].iter_mut() {
                *v = &*v / &p;
            }
            for r in 0..deg {
                if r != col && !m[r][col].is_zero() {
                    let f = m[r][col].clone();
                    let pivot = m[col].clone();
                    for (v, p) in m[r].iter_mut().zip(&pivot) {
                        *v = &*v - &f * p;
                    }
                }
            }
        }
        x.push((0..n).map(|r| m[r][n].clone()).collect());
    }
    Some(x)
}

fn criterion3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 3);
    let cubic = RealNumberField::real_embeddings(&IntPolynomial::from_i64s(&[-1, -3, 0, 1])).unwrap();
    let surds = surds();
    for trial in 0..100 {
        let gens: Vec<AlgebraicReal> = if trial % 2 == 0 {
            let s = &surds[trial / 2];
            vec![AlgebraicReal::one(s.theta.field()), s.theta.clone()]
        } else {
            let k = &cubic[trial % cubic.len()];
            let x = AlgebraicReal::generator(k);
            vec![AlgebraicReal::one(k), x.clone(), &x * &x]
        };
        let u = random_unimodular(&mut rng, gens.len(), 10, false);
        let moved = combine(&u, &gens);
        let m = PseudoLattice::from_periods(&gens).map_err(|e| e.to_string())?;
        let m2 = PseudoLattice::from_periods(&moved).map_err(|e| e.to_string())?;
        ensure!(equals(&m, &m2).map_err(|e| e.to_string())?, "trial {trial}: modules differ");
        let x = transition(&gens, &moved).ok_or("oracle: singular coordinates")?;
        ensure!(
            x.iter().flatten().all(|v| v.is_integer()),
            "trial {trial}: oracle transition is not integral"
        );
    }
    // n = 2 and positive entries: same Perron unit
    let mut same = 0;
    for s in surds.iter().take(25) {
        let base = jp_expand(&JPState::new(vec![s.theta.clone()]).unwrap(), 2000).unwrap();
        let lam = hecke_unit(&base).map_err(|e| e.to_string())?.value;
        let k = s.theta.field();
        let v = [AlgebraicReal::one(k), s.theta.clone()];
        for _ in 0..4 {
            let u = random_unimodular(&mut rng, 2, 5, true);
            let w = combine(&u, &v);
            ensure!(w.iter().all(AlgebraicReal::is_positive), "positive change produced a nonpositive vector");
            let exp = jp_expand(&JPState::from_vector(&w).unwrap(), 2000).map_err(|e| e.to_string())?;
            ensure!(exp.status == JpStatus::Periodic, "moved vector not periodic");
            let lam2 = hecke_unit(&exp).map_err(|e| e.to_string())?.value;
            ensure!(lam2 == lam, "lambda_A changed: {} vs {}", lam, lam2);
            same += 1;
        }
    }
    Ok(format!("100 module changes, {same} positive changes keep lambda_A"))
}

fn combine(u: &IntMatrix, gens: &[AlgebraicReal]) -> Vec<AlgebraicReal> {
    let k = gens[0].field();
    (0..u.nrows())
        .map(|i| {
            gens.iter().enumerate().fold(AlgebraicReal::zero(k), |acc, (j, g)| {
                &acc + &g.scale(&BigRational::from_integer(u.get(i, j).clone()))
            })
        })
        .collect()
}

fn criterion4() -> Outcome {
    let mut checked = 0;
    for d in (1..200).filter(|&d| valid_discriminant(d)) {
        let cg = class_group(&QuadOrder::from_disc(d).unwrap()).map_err(|e| e.to_string())?;
        let oracle = class_numbers(d);
        ensure!((cg.h, cg.h_plus) == oracle, "D = {d}: got ({}, {}), oracle {oracle:?}", cg.h, cg.h_plus);
        ensure!(cg.verify_axioms(), "D = {d}: group axioms");
        let n = cg.h_plus;
        let t = &cg.table;
        for a in 0..n {
            ensure!(t[0][a] == a && t[a][0] == a, "D = {d}: identity");
            ensure!((0..n).any(|b| t[a][b] == 0), "D = {d}: inverse of {a}");
            for b in 0..n {
                ensure!(t[a][b] == t[b][a], "D = {d}: not abelian");
                for c in 0..n {
                    ensure!(t[t[a][b]][c] == t[a][t[b][c]], "D = {d}: not associative");
                }
            }
        }
        checked += 1;
    }
    let mut pell = 0;
    for d in (1..500).filter(|&d| valid_discriminant(d)) {
        let order = QuadOrder::from_disc(d).unwrap();
        let u = fundamental_unit(&order).map_err(|e| e.to_string())?;
        let lhs = &u.x * &u.x - BigInt::from(d) * &u.y * &u.y;
        ensure!(lhs == BigInt::from(4 * u.norm), "D = {d}: Pell identity");
        ensure!(u.pell_holds(&order), "D = {d}: pell_holds");
        // minimality for small units
        if let Ok(ymax) = i64::try_from(&u.y) {
            if ymax <= 100_000 {
                for y in 1..ymax {
                    let v = d as i128 * (y as i128) * (y as i128);
                    ensure!(
                        !is_square(v + 4) && !is_square(v - 4),
                        "D = {d}: smaller unit at y = {y}"
                    );
                }
            }
        }
        pell += 1;
    }
    Ok(format!("{checked} discriminants below 200, Pell for {pell} below 500"))
}

fn criterion5() -> Outcome {
    for n in 1..=100 {
        let space = ModularSymbolSpace::new(n).map_err(|e| e.to_string())?;
        let dim = space.plus_basis().len() as i64;
        ensure!(dim == genus_formula(n), "N = {n}: dim {dim}, formula {}", genus_formula(n));
        ensure!(dim == genus(n), "N = {n}: dim {dim}, oracle {}", genus(n));
    }
    Ok("N = 1..100".into())
}

fn criterion6() -> Outcome {
    for level in [11, 23, 29, 31, 37] {
        let space = ModularSymbolSpace::new(level).map_err(|e| e.to_string())?;
        let t: Vec<IntMatrix> = (0..=12)
            .map(|n| if n == 0 { IntMatrix::zeros(0, 0) } else { space.hecke_operator_direct(n).unwrap() })
            .collect();
        let g = space.genus();
        ensure!(t[1] == IntMatrix::identity(g), "N = {level}: T1 is not the identity");
        for m in 1..=12 {
            for n in 1..=12 {
                ensure!(t[m].mul(&t[n]) == t[n].mul(&t[m]), "N = {level}: T{m} T{n} do not commute");
                if m * n <= 12 && gcd(m as i64, n as i64) == 1 {
                    ensure!(t[m * n] == t[m].mul(&t[n]), "N = {level}: T{} != T{m} T{n}", m * n);
                }
            }
        }
        for p in [2usize, 3, 5, 7, 11] {
            let mut q = p;
            while q * p <= 12 {
                let next = if (level as usize).is_multiple_of(p) {
                    t[p].mul(&t[q])
                } else {
                    t[p].mul(&t[q]).sub(&t[q / p].scale(&BigInt::from(p)))
                };
                ensure!(t[q * p] == next, "N = {level}: recurrence fails at T{}", q * p);
                q *= p;
            }
        }
    }
    Ok("levels 11, 23, 29, 31, 37; n <= 12".into())
}

fn criterion7() -> Outcome {
    let r = analyze_level(23, &Config::default()).map_err(|e| e.to_string())?;
    ensure!(r.genus == 2, "genus {}", r.genus);
    ensure!(r.status == LevelStatus::Analyzed, "status {:?}", r.status);
    ensure!(r.orbits.len() == 1 && r.orbits[0].degree == 2 && r.orbits[0].anosov, "orbits {:?}", r.orbits);
    let t2 = r.hecke_charpolys.get(&2).ok_or("no T2")?;
    ensure!(*t2 == IntPolynomial::from_i64s(&[-1, 1, 1]), "T2 charpoly {t2}");
    let space = ModularSymbolSpace::new(23).unwrap();
    for n in [2, 4] {
        let tr = BigRational::from_integer(space.hecke_operator(n).unwrap().trace());
        ensure!(tr == trace_formula(23, n), "Tr T{n} = {tr}, trace formula {}", trace_formula(23, n));
    }
    ensure!(r.trace_identity == Some(true), "sum of a_p differs from Tr T_p");
    let a = &r.anosov[0];
    let mut statuses = Vec::new();
    for e in &a.embeddings {
        let ev = e.eigenvector.done().ok_or("no eigenvector")?;
        ensure!(ev.verified, "eigenvector not verified");
        let k = ev.lambda[0].field();
        let p = k.poly();
        let disc = p.coeff(1) * p.coeff(1) - BigInt::from(4) * p.coeff(0) * p.coeff(2);
        ensure!(p.degree() == Some(2) && disc == BigInt::from(5), "eigenvector field {p}");
        let theta = e.theta.as_ref().ok_or("no theta")?;
        ensure!(theta.degree() == 2, "theta of degree {}", theta.degree());
        ensure!(matches!(e.certificate.done(), Some(EndRing::RealMultiplication(_))), "theta not certified");
        let jp = e.jp.done().ok_or("JP did not run")?;
        ensure!(jp.status != JpStatus::Degenerate && jp.steps <= 2000, "JP status {:?}", jp.status);
        if jp.status == JpStatus::Periodic {
            ensure!(e.unit.is_done(), "unit certificate missing");
            ensure!(e.field_diagnostics.is_done(), "field diagnostics missing: {:?}", e.field_diagnostics);
        }
        statuses.push(jp.status.as_str());
    }
    Ok(format!("JP {:?}, {} ms", statuses, r.timing.total_ms))
}

fn criterion8() -> Outcome {
    let r = analyze_level(37, &Config::default()).map_err(|e| e.to_string())?;
    ensure!(r.genus == 2, "genus {}", r.genus);
    ensure!(r.status == LevelStatus::NoAnosovHecke, "status {:?}", r.status);
    ensure!(r.message.contains("no Anosov-Hecke eigenform"), "message {:?}", r.message);
    ensure!(r.orbits.len() == 2 && r.orbits.iter().all(|o| o.degree == 1), "orbits {:?}", r.orbits);
    Ok(r.message.clone())
}

fn check_theorem1(r: &LevelReport) -> Result<Vec<Verdict>, String> {
    let json: Value = serde_json::to_value(r).unwrap();
    let mut verdicts = Vec::new();
    for (i, a) in r.anosov.iter().enumerate() {
        let t = &a.theorem1;
        for d in [&t.h_r_equals_g, &t.ring_class_field, &t.lambda_in_order] {
            verdicts.push(d.verdict);
            if d.verdict != Verdict::UndeterminedAtBound {
                ensure!(!d.provenance.is_empty(), "N = {}: decided diagnostic without provenance", r.level);
            }
        }
        match &t.eq31 {
            Stage::Done(e) => match &e.action {
                GaloisAction::Table(_) => ensure!(e.axioms_hold == Some(true), "action table fails axioms"),
                GaloisAction::ClassCountMismatch { .. } => {
                    let m = &json["anosov"][i]["theorem1"]["eq31"]["value"];
                    for key in ["h", "h_plus"] {
                        ensure!(m["action"][key].is_u64(), "mismatch lacks {key}");
                    }
                    ensure!(m["g"].is_u64(), "mismatch lacks g");
                    for key in ["h", "h_plus", "g"] {
                        ensure!(m["provenance"][key].is_string(), "mismatch lacks provenance for {key}");
                    }
                }
            },
            Stage::Skipped(_) | Stage::Failed(_) => {}
        }
    }
    Ok(verdicts)
}

fn criterion9() -> Outcome {
    let mut seen = Vec::new();
    for level in [23, 29, 31] {
        let r = analyze_level(level, &Config::default()).map_err(|e| e.to_string())?;
        seen.extend(check_theorem1(&r)?);
    }
    // a one-step bound leaves the unit-dependent checks open
    let tight = Config { max_jp_steps: 1, ..Config::default() };
    let r = analyze_level(23, &tight).map_err(|e| e.to_string())?;
    let v = check_theorem1(&r)?;
    ensure!(v.contains(&Verdict::UndeterminedAtBound), "tight bound still decided every check");
    seen.extend(v);
    let count = |x: Verdict| seen.iter().filter(|&&v| v == x).count();
    Ok(format!(
        "verified {}, refuted {}, undetermined {}",
        count(Verdict::Verified),
        count(Verdict::Refuted),
        count(Verdict::UndeterminedAtBound)
    ))
}

fn criterion10() -> Outcome {
    let config = Config::default();
    let a = analyze_level(23, &config).map_err(|e| e.to_string())?;
    let b = analyze_level(23, &config).map_err(|e| e.to_string())?;
    ensure!(a.json_without_timing() == b.json_without_timing(), "repeated runs differ");
    let par = analyze_levels(&[23, 23, 23], &Config { jobs: 3, ..config.clone() }).map_err(|e| e.to_string())?;
    ensure!(
        par.iter().all(|r| r.json_without_timing() == a.json_without_timing()),
        "parallel runs differ"
    );
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    cache_put(dir.path(), &a, &config).map_err(|e| e.to_string())?;
    let back = cache_get(dir.path(), 23, &config).map_err(|e| e.to_string())?.ok_or("cache miss")?;
    ensure!(back == a, "cache round trip changed the report");
    ensure!(
        serde_json::to_vec(&back).unwrap() == serde_json::to_vec(&a).unwrap(),
        "cache round trip changed the bytes"
    );
    Ok("byte-identical across runs, threads and cache".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("JP digits equal CF digits, periodicity detected", criterion1, 10),
        ("unit certificates", criterion2, 10),
        ("module and unit invariance", criterion3, 30),
        ("class groups, axioms, Pell", criterion4, 60),
        ("plus-subspace dimension equals genus", criterion5, 120),
        ("Hecke commutativity, multiplicativity, recurrence", criterion6, 60),
        ("N = 23 pipeline", criterion7, 60),
        ("N = 37 has no Anosov-Hecke eigenform", criterion8, 60),
        ("three-valued diagnostics and action tables", criterion9, 60),
        ("determinism and cache round trip", criterion10, 60),
    ];
    let mut failed = 0;
    for (i, (name, f, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > Duration::from_secs(*limit) => {
                Err(format!("{detail}; took {elapsed:.2?}, limit {limit} s"))
            }
            r => r,
        };
        match result {
            Ok(detail) => println!("PASS {:>2} {name} [{elapsed:.2?}] {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{elapsed:.2?}] {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
