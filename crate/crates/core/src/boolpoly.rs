//! Multilinear Boolean polynomials: arithmetic in 𝔽₂[x]/⟨x_i + x_i²⟩.
//!
//! Every [`Poly`] is kept reduced, so exponents are always 0 or 1 and a
//! monomial is just a set of variables. Coefficients live in 𝔽₂, so adding a
//! monomial that is already present removes it.
//!
//! Besides ring arithmetic the module provides the Boolean derivative
//! `∂a/∂x = a{x:=1} + a{x:=0}`, the decomposition `a = b + x·c`, and the
//! independence rule, a forgetting operator computed from that decomposition.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::ops::{Add, Mul};

use smallvec::SmallVec;
use thiserror::Error;

use crate::vars::{VarId, Vars};

/// Source of truth values for variables.
pub trait Assignment {
    fn value(&self, v: VarId) -> Option<bool>;
}

impl Assignment for [Option<bool>] {
    fn value(&self, v: VarId) -> Option<bool> {
        self.get(v.index()).copied().flatten()
    }
}

impl Assignment for Vec<Option<bool>> {
    fn value(&self, v: VarId) -> Option<bool> {
        self.as_slice().value(v)
    }
}

impl Assignment for BTreeMap<VarId, bool> {
    fn value(&self, v: VarId) -> Option<bool> {
        self.get(&v).copied()
    }
}

impl Assignment for HashMap<VarId, bool> {
    fn value(&self, v: VarId) -> Option<bool> {
        self.get(&v).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable {0} has no value in the assignment")]
    Unassigned(VarId),
}

/// A multilinear monomial, stored as a bit set over variable indices.
///
/// Trailing zero words are trimmed so equal sets have equal representations.
/// The empty set is the constant monomial `1`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Monomial {
    words: SmallVec<[u64; 2]>,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(v: VarId) -> Self {
        let mut m = Self::one();
        m.insert(v);
        m
    }

    pub fn from_vars<I: IntoIterator<Item = VarId>>(vars: I) -> Self {
        let mut m = Self::one();
        for v in vars {
            m.insert(v);
        }
        m
    }

    fn insert(&mut self, v: VarId) {
        let (w, b) = (v.index() / 64, v.index() % 64);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1 << b;
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn is_one(&self) -> bool {
        self.words.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn contains(&self, v: VarId) -> bool {
        let (w, b) = (v.index() / 64, v.index() % 64);
        self.words.get(w).is_some_and(|x| x & (1 << b) != 0)
    }

    /// Product of two monomials: the union of their variable sets.
    pub fn union(&self, other: &Monomial) -> Monomial {
        let (long, short) = if self.words.len() >= other.words.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut words = long.words.clone();
        for (w, s) in words.iter_mut().zip(short.words.iter()) {
            *w |= s;
        }
        Monomial { words }
    }

    pub fn without(&self, v: VarId) -> Monomial {
        let mut m = self.clone();
        let (w, b) = (v.index() / 64, v.index() % 64);
        if let Some(x) = m.words.get_mut(w) {
            *x &= !(1 << b);
        }
        m.trim();
        m
    }

    pub fn is_subset(&self, other: &Monomial) -> bool {
        if self.words.len() > other.words.len() {
            return false;
        }
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    /// Variables in ascending id order.
    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros();
                rest &= rest - 1;
                Some(VarId(i as u32 * 64 + b))
            })
        })
    }
}

impl Ord for Monomial {
    /// Degree descending, then ascending on the sorted id sequence.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .degree()
            .cmp(&self.degree())
            .then_with(|| self.vars().cmp(other.vars()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.vars().map(|v| format!("x{}", v.0)).collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// A reduced Boolean polynomial: a set of monomials with implicit 𝔽₂ coefficients.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    monos: Vec<Monomial>,
}

fn toggle(set: &mut HashSet<Monomial>, m: Monomial) {
    if !set.remove(&m) {
        set.insert(m);
    }
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Poly {
            monos: vec![Monomial::one()],
        }
    }

    pub fn var(v: VarId) -> Self {
        Poly {
            monos: vec![Monomial::var(v)],
        }
    }

    pub fn monomial(m: Monomial) -> Self {
        Poly { monos: vec![m] }
    }

    /// Sums the given monomials mod 2: a monomial listed twice cancels.
    pub fn from_monomials<I: IntoIterator<Item = Monomial>>(monos: I) -> Self {
        let mut set = HashSet::new();
        for m in monos {
            toggle(&mut set, m);
        }
        Self::from_set(set)
    }

    fn from_set(set: HashSet<Monomial>) -> Self {
        let mut monos: Vec<Monomial> = set.into_iter().collect();
        monos.sort_unstable();
        Poly { monos }
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monos
    }

    /// Number of monomials; the zero polynomial has none.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_zero(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.monos.len() == 1 && self.monos[0].is_one()
    }

    pub fn degree(&self) -> usize {
        self.monos.first().map_or(0, Monomial::degree)
    }

    /// Union of the variable sets of all monomials.
    pub fn support(&self) -> Monomial {
        self.monos
            .iter()
            .fold(Monomial::one(), |acc, m| acc.union(m))
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        self.support().vars().collect()
    }

    pub fn contains_var(&self, v: VarId) -> bool {
        self.monos.iter().any(|m| m.contains(v))
    }

    pub fn add(&self, other: &Poly) -> Poly {
        // both sides are sorted: merge, dropping monomials present in both
        let mut out = Vec::with_capacity(self.monos.len() + other.monos.len());
        let (mut i, mut j) = (0, 0);
        while i < self.monos.len() && j < other.monos.len() {
            match self.monos[i].cmp(&other.monos[j]) {
                Ordering::Less => {
                    out.push(self.monos[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.monos[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.monos[i..]);
        out.extend_from_slice(&other.monos[j..]);
        Poly { monos: out }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        let mut set = HashSet::with_capacity(self.monos.len() * other.monos.len());
        for a in &self.monos {
            for b in &other.monos {
                toggle(&mut set, a.union(b));
            }
        }
        Self::from_set(set)
    }

    /// `1 + self`, i.e. the translation of negation.
    pub fn complement(&self) -> Poly {
        self.add(&Poly::one())
    }

    /// Value of the polynomial at a point.
    pub fn eval<A: Assignment + ?Sized>(&self, point: &A) -> Result<bool, EvalError> {
        let mut cache: HashMap<VarId, bool> = HashMap::new();
        let mut acc = false;
        for m in &self.monos {
            let mut term = true;
            for v in m.vars() {
                let bit = match cache.get(&v) {
                    Some(&b) => b,
                    None => {
                        let b = point.value(v).ok_or(EvalError::Unassigned(v))?;
                        cache.insert(v, b);
                        b
                    }
                };
                term &= bit;
            }
            acc ^= term;
        }
        Ok(acc)
    }

    /// Splits `self = b + x_v·c` with `b`, `c` free of `x_v`.
    pub fn decompose(&self, v: VarId) -> (Poly, Poly) {
        let mut b = Vec::new();
        let mut c = Vec::new();
        for m in &self.monos {
            if m.contains(v) {
                c.push(m.without(v));
            } else {
                b.push(m.clone());
            }
        }
        // dropping v is injective on the monomials that contain it
        c.sort_unstable();
        (Poly { monos: b }, Poly { monos: c })
    }

    /// Boolean derivative `∂/∂x_v`, equal to `self{v:=1} + self{v:=0}`.
    pub fn derivative(&self, v: VarId) -> Poly {
        self.decompose(v).1
    }

    /// Substitutes a constant for `x_v`.
    pub fn restrict(&self, v: VarId, value: bool) -> Poly {
        let (b, c) = self.decompose(v);
        if value {
            b.add(&c)
        } else {
            b
        }
    }

    /// Symbol count: each monomial costs `max(1, degree)`, plus one per `+`.
    pub fn size_symbols(&self) -> usize {
        if self.monos.is_empty() {
            return 1;
        }
        let terms: usize = self.monos.iter().map(|m| m.degree().max(1)).sum();
        terms + self.monos.len() - 1
    }

    /// Canonical text form using the names in `vars`.
    pub fn display<'a>(&'a self, vars: &'a Vars) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, vars }
    }

    pub fn to_text(&self, vars: &Vars) -> String {
        self.display(vars).to_string()
    }

    /// Monomials sorted in canonical print order: degree descending, then
    /// lexicographic on the sorted variable names.
    pub fn canonical_terms(&self, vars: &Vars) -> Vec<Vec<String>> {
        let mut terms: Vec<Vec<String>> = self
            .monos
            .iter()
            .map(|m| {
                let mut names: Vec<String> = m.vars().map(|v| vars.display_name(v)).collect();
                names.sort();
                names
            })
            .collect();
        terms.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        terms
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        Poly::add(self, rhs)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        Poly::mul(self, rhs)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monos.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.monos.iter().map(|m| format!("{m:?}")).collect();
        write!(f, "{}", parts.join("+"))
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    vars: &'a Vars,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (i, term) in self.poly.canonical_terms(self.vars).iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            if term.is_empty() {
                write!(f, "1")?;
            } else {
                write!(f, "{}", term.join("*"))?;
            }
        }
        Ok(())
    }
}

/// The independence rule `∂_{x_v}(a1, a2)`.
///
/// With `a_i = b_i + x_v·c_i` the result is
/// `1 + (1 + b1·b2)·(1 + (b1 + c1)·(b2 + c2))`. Its zero set over the
/// remaining variables is exactly the projection of the common models of
/// `a1` and `a2`, so it never mentions `x_v`.
pub fn independence_rule(a1: &Poly, a2: &Poly, v: VarId) -> Poly {
    let (b1, c1) = a1.decompose(v);
    let (b2, c2) = a2.decompose(v);
    // (b_i + c_i) is a_i with x_v := 1
    let high = b1.add(&c1).mul(&b2.add(&c2)).complement();
    if high.is_zero() {
        return Poly::one();
    }
    let low = b1.mul(&b2).complement();
    if low.is_zero() {
        return Poly::one();
    }
    low.mul(&high).complement()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyParseError {
    #[error("empty term at column {column}")]
    EmptyTerm { column: usize },
    #[error("unexpected character {found:?} at column {column}")]
    Unexpected { found: char, column: usize },
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Parses the `x1*x3+x2+1` text format. Whitespace is ignored; repeated
/// variables in a term collapse and repeated terms cancel.
pub fn parse_poly(text: &str, vars: &mut Vars) -> Result<Poly, PolyParseError> {
    let chars: Vec<(usize, char)> = text
        .chars()
        .enumerate()
        .filter(|(_, c)| !c.is_whitespace())
        .map(|(i, c)| (i + 1, c))
        .collect();
    let mut monos = Vec::new();
    let mut pos = 0;
    loop {
        // one term: factor ('*' factor)*
        let term_col = chars.get(pos).map_or(text.chars().count() + 1, |c| c.0);
        let mut factors: Vec<VarId> = Vec::new();
        let mut constant: Option<bool> = None;
        loop {
            let Some(&(col, c)) = chars.get(pos) else {
                return Err(PolyParseError::EmptyTerm { column: term_col });
            };
            if c == '0' || c == '1' {
                let start = pos;
                while chars.get(pos).is_some_and(|x| x.1.is_ascii_digit()) {
                    pos += 1;
                }
                let lit: String = chars[start..pos].iter().map(|x| x.1).collect();
                if lit != "0" && lit != "1" {
                    return Err(PolyParseError::Unexpected {
                        found: c,
                        column: col,
                    });
                }
                constant = Some(constant.unwrap_or(true) && lit == "1");
            } else if is_ident_start(c) {
                let start = pos;
                while chars.get(pos).is_some_and(|x| is_ident_char(x.1)) {
                    pos += 1;
                }
                let name: String = chars[start..pos].iter().map(|x| x.1).collect();
                factors.push(vars.intern(&name));
            } else {
                return Err(PolyParseError::Unexpected {
                    found: c,
                    column: col,
                });
            }
            match chars.get(pos) {
                Some((_, '*')) => pos += 1,
                _ => break,
            }
        }
        if constant != Some(false) {
            monos.push(Monomial::from_vars(factors));
        }
        match chars.get(pos) {
            None => break,
            Some((_, '+')) => pos += 1,
            Some(&(col, c)) => {
                return Err(PolyParseError::Unexpected {
                    found: c,
                    column: col,
                })
            }
        }
    }
    Ok(Poly::from_monomials(monos))
}
