//! Translations between formulas and polynomials, and between valuations
//! and points of 𝔽₂ⁿ.
//!
//! * [`to_poly_p`] is the plain translation `P` into 𝔽₂[x], keeping exponents.
//! * [`project_pi`] is `π = Φ∘P`, computed directly in the reduced ring.
//! * [`to_formula_theta`] is the inverse direction `Θ`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::boolpoly::{Assignment, Monomial, Poly};
use crate::formula::Formula;
use crate::vars::{VarId, Vars};

/// A monomial with explicit exponents, sorted by variable.
pub type ExpMonomial = Vec<(VarId, u32)>;

/// An element of 𝔽₂[x] before reduction modulo `x_i + x_i²`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExpPoly {
    terms: BTreeSet<ExpMonomial>,
}

impl ExpPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        ExpPoly {
            terms: BTreeSet::from([Vec::new()]),
        }
    }

    pub fn var(v: VarId) -> Self {
        ExpPoly {
            terms: BTreeSet::from([vec![(v, 1)]]),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = &ExpMonomial> {
        self.terms.iter()
    }

    fn toggle(&mut self, m: ExpMonomial) {
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    pub fn add(&self, other: &ExpPoly) -> ExpPoly {
        let mut out = self.clone();
        for m in &other.terms {
            out.toggle(m.clone());
        }
        out
    }

    pub fn mul(&self, other: &ExpPoly) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for a in &self.terms {
            for b in &other.terms {
                let mut exps: BTreeMap<VarId, u32> = a.iter().copied().collect();
                for &(v, e) in b {
                    *exps.entry(v).or_insert(0) += e;
                }
                out.toggle(exps.into_iter().collect());
            }
        }
        out
    }

    /// Largest exponent appearing anywhere (`deg_∞`).
    pub fn max_exponent(&self) -> u32 {
        self.terms
            .iter()
            .flat_map(|m| m.iter().map(|&(_, e)| e))
            .max()
            .unwrap_or(0)
    }

    /// `Φ`: flatten every positive exponent to 1, cancelling repeats mod 2.
    pub fn reduce(&self) -> Poly {
        Poly::from_monomials(
            self.terms
                .iter()
                .map(|m| Monomial::from_vars(m.iter().map(|&(v, _)| v))),
        )
    }

    pub fn display<'a>(&'a self, vars: &'a Vars) -> ExpPolyDisplay<'a> {
        ExpPolyDisplay { poly: self, vars }
    }
}

pub struct ExpPolyDisplay<'a> {
    poly: &'a ExpPoly,
    vars: &'a Vars,
}

impl fmt::Display for ExpPolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.terms.is_empty() {
            return write!(f, "0");
        }
        let mut terms: Vec<(u32, Vec<String>)> = self
            .poly
            .terms
            .iter()
            .map(|m| {
                let total = m.iter().map(|&(_, e)| e).sum();
                let mut parts: Vec<String> = m
                    .iter()
                    .map(|&(v, e)| {
                        let n = self.vars.display_name(v);
                        if e == 1 {
                            n
                        } else {
                            format!("{n}^{e}")
                        }
                    })
                    .collect();
                parts.sort();
                (total, parts)
            })
            .collect();
        terms.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
        let text: Vec<String> = terms
            .into_iter()
            .map(|(_, p)| {
                if p.is_empty() {
                    "1".into()
                } else {
                    p.join("*")
                }
            })
            .collect();
        write!(f, "{}", text.join("+"))
    }
}

/// The translation `P` into 𝔽₂[x], without reducing exponents.
///
/// Exponential in the worst case; reasoning code uses [`project_pi`].
pub fn to_poly_p(f: &Formula) -> ExpPoly {
    match f {
        Formula::True => ExpPoly::one(),
        Formula::False => ExpPoly::zero(),
        Formula::Var(v) => ExpPoly::var(*v),
        Formula::Not(a) => ExpPoly::one().add(&to_poly_p(a)),
        Formula::And(a, b) => to_poly_p(a).mul(&to_poly_p(b)),
        Formula::Or(a, b) => {
            let (x, y) = (to_poly_p(a), to_poly_p(b));
            x.add(&y).add(&x.mul(&y))
        }
        Formula::Imp(a, b) => {
            let (x, y) = (to_poly_p(a), to_poly_p(b));
            ExpPoly::one().add(&x).add(&x.mul(&y))
        }
        Formula::Iff(a, b) => ExpPoly::one().add(&to_poly_p(a)).add(&to_poly_p(b)),
    }
}

/// Polynomial projection `π(F)`: the reduced polynomial whose value at a
/// point is the truth value of `F` under the matching valuation.
pub fn project_pi(f: &Formula) -> Poly {
    match f {
        Formula::True => Poly::one(),
        Formula::False => Poly::zero(),
        Formula::Var(v) => Poly::var(*v),
        Formula::Not(a) => project_pi(a).complement(),
        Formula::And(a, b) => {
            let x = project_pi(a);
            if x.is_zero() {
                return x;
            }
            x.mul(&project_pi(b))
        }
        Formula::Or(a, b) => {
            // x + y + xy = 1 + (1+x)(1+y)
            let x = project_pi(a);
            if x.is_one() {
                return x;
            }
            x.complement().mul(&project_pi(b).complement()).complement()
        }
        Formula::Imp(a, b) => {
            // 1 + x + xy = 1 + x(1+y)
            let x = project_pi(a);
            if x.is_zero() {
                return Poly::one();
            }
            x.mul(&project_pi(b).complement()).complement()
        }
        Formula::Iff(a, b) => project_pi(a).add(&project_pi(b)).complement(),
    }
}

fn monomial_formula(names: &[String], vars: &Vars) -> Formula {
    let atoms: Vec<Formula> = names
        .iter()
        .map(|n| Formula::Var(vars.get(n).expect("name taken from the table")))
        .collect();
    atoms
        .into_iter()
        .rev()
        .reduce(|acc, f| Formula::and(f, acc))
        .unwrap_or(Formula::True)
}

/// `Θ(a)`: a formula whose projection is exactly `a`.
///
/// Monomials become right-nested conjunctions and the sum becomes a
/// right-nested chain `¬(m₁ ↔ ¬(m₂ ↔ …))`, both in canonical print order.
pub fn to_formula_theta(a: &Poly, vars: &Vars) -> Formula {
    if a.is_zero() {
        return Formula::False;
    }
    // canonical order needs names; extend a scratch table with any foreign ids
    let mut table = vars.clone();
    for v in a.vars() {
        if vars.name(v).is_none() {
            while table.len() <= v.index() {
                let n = format!("v{}", table.len());
                table.intern(&n);
            }
        }
    }
    let terms = a.canonical_terms(&table);
    let mut parts: Vec<Formula> = terms.iter().map(|t| monomial_formula(t, &table)).collect();
    let mut acc = parts.pop().expect("nonzero polynomial");
    while let Some(f) = parts.pop() {
        acc = Formula::not(Formula::iff(f, acc));
    }
    acc
}

/// A total or partial assignment of truth values, keyed by variable.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Valuation {
    values: BTreeMap<VarId, bool>,
}

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, v: VarId, value: bool) {
        self.values.insert(v, value);
    }

    pub fn get(&self, v: VarId) -> Option<bool> {
        self.values.get(&v).copied()
    }

    pub fn language(&self) -> impl Iterator<Item = VarId> + '_ {
        self.values.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Restriction to the variables in `keep`.
    pub fn restrict(&self, keep: &BTreeSet<VarId>) -> Valuation {
        Valuation {
            values: self
                .values
                .iter()
                .filter(|(v, _)| keep.contains(v))
                .map(|(&v, &b)| (v, b))
                .collect(),
        }
    }
}

impl FromIterator<(VarId, bool)> for Valuation {
    fn from_iter<I: IntoIterator<Item = (VarId, bool)>>(iter: I) -> Self {
        Valuation {
            values: iter.into_iter().collect(),
        }
    }
}

impl Assignment for Valuation {
    fn value(&self, v: VarId) -> Option<bool> {
        self.get(v)
    }
}

/// A point of 𝔽₂ⁿ: coordinates listed against an ordered language.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub language: Vec<VarId>,
    pub coords: Vec<bool>,
}

impl Point {
    pub fn new(language: Vec<VarId>, coords: Vec<bool>) -> Self {
        assert_eq!(language.len(), coords.len(), "one coordinate per variable");
        Point { language, coords }
    }

    /// Coordinates as 0/1 integers, in language order.
    pub fn bits(&self) -> Vec<u8> {
        self.coords.iter().map(|&b| b as u8).collect()
    }
}

impl Assignment for Point {
    fn value(&self, v: VarId) -> Option<bool> {
        self.language
            .iter()
            .position(|&w| w == v)
            .map(|i| self.coords[i])
    }
}

/// `v ↦ o_v`, with coordinates in ascending variable order.
pub fn valuation_to_point(v: &Valuation) -> Point {
    let (language, coords) = v.values.iter().map(|(&k, &b)| (k, b)).unzip();
    Point { language, coords }
}

/// `o ↦ v_o`: `v_o(p_i) = 1` iff `o_i = 1`.
pub fn point_to_valuation(o: &Point) -> Valuation {
    o.language
        .iter()
        .copied()
        .zip(o.coords.iter().copied())
        .collect()
}
