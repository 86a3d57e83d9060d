//! Random instance generators shared by the property suites.
#![allow(dead_code)]

use boolforget::{Formula, Literal, VarId};
use proptest::prelude::*;

pub fn var_ids(n: u32) -> Vec<VarId> {
    (0..n).map(VarId).collect()
}

/// Formulas over the first `n` variables, with occasional constants.
pub fn formula(n: u32, depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        8 => (0..n).prop_map(|i| Formula::var(VarId(i))),
        1 => Just(Formula::True),
        1 => Just(Formula::False),
    ];
    leaf.prop_recursive(depth, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::imp(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::iff(a, b)),
        ]
    })
}

pub fn kb(n: u32, members: usize) -> impl Strategy<Value = Vec<Formula>> {
    prop::collection::vec(formula(n, 3), 1..=members)
}

pub fn literal(n: u32) -> impl Strategy<Value = Literal> {
    (0..n, any::<bool>()).prop_map(|(i, positive)| Literal {
        var: VarId(i),
        positive,
    })
}

/// A clause of `width` distinct variables out of `n`.
pub fn clause(n: u32, width: usize) -> impl Strategy<Value = Vec<Literal>> {
    (
        proptest::sample::subsequence((0..n).collect::<Vec<_>>(), width),
        prop::collection::vec(any::<bool>(), width),
    )
        .prop_map(|(vs, signs)| {
            vs.into_iter()
                .zip(signs)
                .map(|(i, positive)| Literal {
                    var: VarId(i),
                    positive,
                })
                .collect()
        })
}

pub fn clause_formula(c: &[Literal]) -> Formula {
    Formula::disjunction(c.iter().map(|l| l.to_formula()))
}

/// 3-CNF instances with up to `max_vars` variables and `max_clauses` clauses.
pub fn three_cnf(max_vars: u32, max_clauses: usize) -> impl Strategy<Value = Vec<Formula>> {
    (3..=max_vars).prop_flat_map(move |n| {
        prop::collection::vec(clause(n, 3), 1..=max_clauses)
            .prop_map(|cs| cs.iter().map(|c| clause_formula(c)).collect())
    })
}

/// Renames every variable of `f` through `map`.
pub fn rename(f: &Formula, map: &impl Fn(VarId) -> VarId) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Var(v) => Formula::var(map(*v)),
        Formula::Not(a) => Formula::not(rename(a, map)),
        Formula::And(a, b) => Formula::and(rename(a, map), rename(b, map)),
        Formula::Or(a, b) => Formula::or(rename(a, map), rename(b, map)),
        Formula::Imp(a, b) => Formula::imp(rename(a, map), rename(b, map)),
        Formula::Iff(a, b) => Formula::iff(rename(a, map), rename(b, map)),
    }
}

/// Multilinear polynomials over the first `n` variables.
pub fn poly(n: u32) -> impl Strategy<Value = boolforget::Poly> {
    use boolforget::{Monomial, Poly};
    prop::collection::vec(prop::collection::btree_set(0..n, 0..4), 0..7).prop_map(|ms| {
        Poly::from_monomials(
            ms.into_iter()
                .map(|s| Monomial::from_vars(s.into_iter().map(VarId))),
        )
    })
}
