mod common;

use common::*;
use num_rational::BigRational;

use heckerm::modsym::{genus_formula, ModularSymbolSpace};
use heckerm::quadorder::{class_group, QuadOrder};

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

#[test]
fn trace_formula_vanishes_at_level_one() {
    for n in 1..=12 {
        assert_eq!(trace_formula(1, n), q(0), "n = {n}");
    }
}

#[test]
fn trace_of_identity_is_genus() {
    for level in 1..=100 {
        assert_eq!(trace_formula(level, 1), q(genus(level)), "N = {level}");
    }
}

#[test]
fn trace_formula_known_values() {
    assert_eq!(trace_formula(11, 2), q(-2));
    assert_eq!(trace_formula(11, 3), q(-1));
    assert_eq!(trace_formula(23, 2), q(-1));
    assert_eq!(trace_formula(23, 4), q(-1));
    assert_eq!(trace_formula(37, 2), q(-2));
}

#[test]
fn trace_formula_matches_hecke_matrices() {
    for level in [11, 14, 23, 29, 31, 37, 43] {
        let space = ModularSymbolSpace::new(level).unwrap();
        for n in 1..=10 {
            if gcd(n, level) != 1 {
                continue;
            }
            let t = space.hecke_operator(n).unwrap();
            assert_eq!(q(0) + BigRational::from_integer(t.trace()), trace_formula(level, n), "N = {level}, n = {n}");
        }
    }
}

#[test]
fn genus_oracle_matches_library_formula() {
    for n in 1..=200 {
        assert_eq!(genus(n), genus_formula(n), "N = {n}");
    }
}

#[test]
fn cf_oracle_known_expansions() {
    assert_eq!(cf_digits(0, 1, 2, 5), vec![1, 2, 2, 2, 2]);
    assert_eq!(cf_digits(1, 2, 5, 4), vec![1, 1, 1, 1]);
    assert_eq!(cf_digits(0, 1, 7, 9), vec![2, 1, 1, 1, 4, 1, 1, 1, 4]);
    // (-3 + sqrt 5)/(-2) = (3 - sqrt 5)/2
    assert_eq!(cf_digits(-3, -2, 5, 4), vec![0, 2, 1, 1]);
}

#[test]
fn class_number_oracle_known_values() {
    for (d, h, hp) in [(5, 1, 1), (8, 1, 1), (12, 1, 2), (40, 2, 2), (60, 2, 4), (136, 2, 4), (145, 4, 4)] {
        assert_eq!(class_numbers(d), (h, hp), "D = {d}");
    }
}

#[test]
fn class_numbers_agree_with_library() {
    for d in (5..300).filter(|&d| valid_discriminant(d)) {
        let cg = class_group(&QuadOrder::from_disc(d).unwrap()).unwrap();
        assert_eq!((cg.h, cg.h_plus), class_numbers(d), "D = {d}");
        assert_eq!(cg.cycles.len(), cg.h_plus);
    }
}
