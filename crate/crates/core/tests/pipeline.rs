
use std::collections::HashSet;
use std::time::{Duration, Instant};

use num_traits::{One, Signed};

use heckerm::exact::{AlgebraicReal, IntMatrix, IntPolynomial, RealNumberField};
use heckerm::modsym::{commutes_with_star, ModularSymbolSpace};
use heckerm::pipeline::{analyze_level, j_invariants, Config, JInvariantError, LevelStatus, Stage};
use heckerm::pseudolattice::PseudoLattice;

#[test]
fn reports_hold_their_invariants() {
    let config = Config::default();
    for level in [11, 15, 23, 29, 31, 37] {
        let start = Instant::now();
        let r = analyze_level(level, &config).unwrap();
        assert!(start.elapsed() < Duration::from_secs(60), "N = {level} too slow");
        if !r.orbits.is_empty() {
            assert_eq!(r.trace_identity, Some(true), "N = {level}");
        }
        for a in &r.anosov {
            for e in &a.embeddings {
                if let Stage::Done(u) = &e.unit {
                    assert!(u.unit.value.norm().abs().is_one(), "N = {level}: lambda_A not a unit");
                    assert!(u.norm_is_unit);
                }
            }
            if let Stage::Done(pairs) = &a.j_invariants {
                let roots: HashSet<usize> = pairs.iter().map(|p| p.root_index).collect();
                let lattices: HashSet<usize> = pairs.iter().map(|p| p.lattice).collect();
                assert_eq!(roots.len(), pairs.len(), "N = {level}: pairing not injective");
                assert_eq!(lattices.len(), a.embeddings.len(), "N = {level}: pairing not total");
            }
        }
    }
}

#[test]
fn level_statuses() {
    let config = Config::default();
    let status = |n| analyze_level(n, &config).unwrap().status;
    assert_eq!(status(11), LevelStatus::DegenerateRank);
    assert_eq!(status(15), LevelStatus::DegenerateRank);
    assert_eq!(status(23), LevelStatus::Analyzed);
    assert_eq!(status(37), LevelStatus::NoAnosovHecke);
    assert_eq!(status(1), LevelStatus::NoCuspForms);
    // old forms from level 11 block separation
    assert_eq!(status(22), LevelStatus::NonSeparating);
}

#[test]
fn star_commutes_with_hecke_operators() {
    for level in [11, 15, 23, 29, 31, 37] {
        let space = ModularSymbolSpace::new(level).unwrap();
        for n in 1..=20 {
            assert!(commutes_with_star(&space, &space.hecke_ambient(n)), "N = {level}, n = {n}");
        }
    }
}

fn lattice(k: &RealNumberField, theta: AlgebraicReal) -> PseudoLattice {
    PseudoLattice::from_periods(&[AlgebraicReal::one(k), theta]).unwrap()
}

#[test]
fn j_invariant_examples() {
    let k5 = RealNumberField::real_embeddings(&IntPolynomial::from_i64s(&[-1, -1, 1])).unwrap();
    let phi = AlgebraicReal::generator(&k5[1]);
    let j = j_invariants(&IntMatrix::from_i64(&[&[0, 1], &[1, 1]]), &[lattice(&k5[1], phi.clone())]).unwrap();
    assert_eq!(j.len(), 1);
    assert_eq!(j[0].lambda, phi);

    let k2 = RealNumberField::real_embeddings(&IntPolynomial::from_i64s(&[-2, 0, 1])).unwrap();
    let silver = |k: &RealNumberField| &AlgebraicReal::one(k) + &AlgebraicReal::generator(k);
    let ms = [lattice(&k2[1], silver(&k2[1])), lattice(&k2[0], silver(&k2[0]))];
    let a = IntMatrix::from_i64(&[&[0, 1], &[1, 2]]);
    let j = j_invariants(&a, &ms).unwrap();
    // 1 + sqrt 2 for the first lattice, 1 - sqrt 2 for its conjugate
    assert!((j[0].lambda.to_f64() - (1.0 + 2f64.sqrt())).abs() < 1e-12);
    assert!((j[1].lambda.to_f64() - (1.0 - 2f64.sqrt())).abs() < 1e-12);
    assert_ne!(j[0].root_index, j[1].root_index);

    let three = [ms[0].clone(), ms[1].clone(), ms[0].clone()];
    assert!(matches!(j_invariants(&a, &three), Err(JInvariantError::CountMismatch { .. })));
}
