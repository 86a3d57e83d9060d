//! Forgetting operators over knowledge bases.
//!
//! A [`PolyKB`] stores each member as its polynomial projection (value 1
//! means "true"), so a refutation ends when the polynomial `0` shows up.
//! [`forget_var`] applies the independence rule to every unordered pair of
//! members mentioning the variable; [`canonical_forget_kb`] does the same on
//! formulas with the substitution-based operator `σ∘δ*`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::boolpoly::{independence_rule, Poly};
use crate::formula::{simplify_sigma, Formula};
use crate::translate::project_pi;
use crate::vars::{VarId, Vars};

/// Default upper bound on the symbol size of an intermediate KB.
pub const DEFAULT_SIZE_CAP: usize = 2_000_000;

/// Environment variable overriding [`DEFAULT_SIZE_CAP`].
pub const SIZE_CAP_ENV: &str = "BOOLFORGET_SIZE_CAP";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ForgetError {
    #[error("knowledge base grew past the size cap of {cap} symbols while forgetting {var}")]
    SizeCap { var: VarId, cap: usize },
    #[error("elimination order is not a permutation of the variables to forget")]
    NotPermutation,
}

/// Resource limits applied while forgetting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub size_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            size_cap: DEFAULT_SIZE_CAP,
        }
    }
}

impl Limits {
    pub fn unbounded() -> Self {
        Limits {
            size_cap: usize::MAX,
        }
    }

    /// Default limits, with the cap taken from `BOOLFORGET_SIZE_CAP` when set.
    pub fn from_env() -> Self {
        std::env::var(SIZE_CAP_ENV)
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .map(|size_cap| Limits { size_cap })
            .unwrap_or_default()
    }
}

/// A knowledge base of projected polynomials.
///
/// Kept normalized: the constant 1 is never stored, duplicates collapse, and
/// an inconsistent KB is exactly `{0}`. An empty KB is consistent.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PolyKB {
    polys: BTreeSet<Poly>,
    language: BTreeSet<VarId>,
}

impl PolyKB {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_polys<I: IntoIterator<Item = Poly>>(polys: I) -> Self {
        let mut kb = PolyKB::new();
        for p in polys {
            kb.insert(p);
        }
        kb
    }

    pub fn from_formulas<'a, I: IntoIterator<Item = &'a Formula>>(formulas: I) -> Self {
        Self::from_polys(formulas.into_iter().map(project_pi))
    }

    /// Adds a member, keeping the KB normalized.
    pub fn insert(&mut self, p: Poly) {
        if self.is_inconsistent() || p.is_one() {
            return;
        }
        self.language.extend(p.vars());
        if p.is_zero() {
            self.polys.clear();
        }
        self.polys.insert(p);
    }

    /// Declares variables as part of the language without adding members.
    pub fn extend_language<I: IntoIterator<Item = VarId>>(&mut self, vars: I) {
        self.language.extend(vars);
    }

    pub fn with(&self, p: Poly) -> PolyKB {
        let mut out = self.clone();
        out.insert(p);
        out
    }

    pub fn polys(&self) -> impl Iterator<Item = &Poly> {
        self.polys.iter()
    }

    pub fn to_vec(&self) -> Vec<Poly> {
        self.polys.iter().cloned().collect()
    }

    pub fn language(&self) -> &BTreeSet<VarId> {
        &self.language
    }

    /// Variables actually occurring in some member.
    pub fn vars(&self) -> BTreeSet<VarId> {
        self.polys.iter().flat_map(Poly::vars).collect()
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn is_inconsistent(&self) -> bool {
        self.polys.first().is_some_and(Poly::is_zero)
    }

    pub fn size_symbols(&self) -> usize {
        self.polys.iter().map(Poly::size_symbols).sum()
    }

    /// Members in canonical text form, sorted.
    pub fn to_texts(&self, vars: &Vars) -> Vec<String> {
        let mut v: Vec<String> = self.polys.iter().map(|p| p.to_text(vars)).collect();
        v.sort();
        v
    }

    /// Number of members in which each variable occurs.
    pub fn occurrences(&self) -> BTreeMap<VarId, usize> {
        let mut counts = BTreeMap::new();
        for p in &self.polys {
            for v in p.vars() {
                *counts.entry(v).or_insert(0) += 1;
            }
        }
        counts
    }
}

/// Fewest-occurrences-first elimination order, ties broken by id.
pub fn default_order(kb: &PolyKB) -> Vec<VarId> {
    order_by_count(kb.occurrences())
}

fn order_by_count(occurrences: BTreeMap<VarId, usize>) -> Vec<VarId> {
    let mut counts: Vec<(usize, VarId)> = occurrences.into_iter().map(|(v, c)| (c, v)).collect();
    counts.sort();
    counts.into_iter().map(|(_, v)| v).collect()
}

/// Unordered pairs `(i, j)` with `i ≤ j`.
fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect()
}

/// Applies `op` to every unordered pair with repetition, concurrently.
///
/// Results are collected before normalization, so the output does not depend
/// on scheduling. Stops early once a pair yields the inconsistent constant or
/// the accumulated size passes `cap`.
fn apply_pairs<T, F, Z, S>(
    members: &[T],
    op: F,
    is_bottom: Z,
    size: S,
    cap: usize,
) -> Result<Vec<T>, ()>
where
    T: Send + Sync,
    F: Fn(&T, &T) -> T + Sync,
    Z: Fn(&T) -> bool + Sync,
    S: Fn(&T) -> usize + Sync,
{
    let total = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let over = AtomicBool::new(false);
    let out: Vec<Option<T>> = pairs(members.len())
        .into_par_iter()
        .map(|(i, j)| {
            if stop.load(Ordering::Relaxed) {
                return None;
            }
            let r = op(&members[i], &members[j]);
            if is_bottom(&r) {
                stop.store(true, Ordering::Relaxed);
            } else if total.fetch_add(size(&r), Ordering::Relaxed) > cap {
                over.store(true, Ordering::Relaxed);
                stop.store(true, Ordering::Relaxed);
            }
            Some(r)
        })
        .collect();
    let results: Vec<T> = out.into_iter().flatten().collect();
    if over.load(Ordering::Relaxed) && !results.iter().any(is_bottom) {
        return Err(());
    }
    Ok(results)
}

/// Outcome of one forgetting step, with the work it took.
#[derive(Clone, Debug)]
pub struct ForgetStep {
    pub kb: PolyKB,
    pub pairs_processed: usize,
}

/// `δ_p[K]` computed with the independence rule.
pub fn forget_var(kb: &PolyKB, p: VarId) -> PolyKB {
    forget_var_step(kb, p, Limits::unbounded())
        .expect("unbounded limits")
        .kb
}

/// [`forget_var`] under resource limits, reporting the number of rule
/// applications.
pub fn forget_var_step(kb: &PolyKB, p: VarId, limits: Limits) -> Result<ForgetStep, ForgetError> {
    let mut out = PolyKB::new();
    out.language = kb.language.iter().copied().filter(|&v| v != p).collect();
    if kb.is_inconsistent() {
        out.insert(Poly::zero());
        return Ok(ForgetStep {
            kb: out,
            pairs_processed: 0,
        });
    }
    let (with_p, free): (Vec<&Poly>, Vec<&Poly>) = kb.polys.iter().partition(|a| a.contains_var(p));
    for a in free {
        out.insert(a.clone());
    }
    let n = with_p.len();
    let results = apply_pairs(
        &with_p.into_iter().cloned().collect::<Vec<_>>(),
        |a, b| independence_rule(a, b, p),
        Poly::is_zero,
        Poly::size_symbols,
        limits.size_cap.saturating_sub(out.size_symbols()),
    )
    .map_err(|()| ForgetError::SizeCap {
        var: p,
        cap: limits.size_cap,
    })?;
    for r in results {
        out.insert(r);
    }
    if out.size_symbols() > limits.size_cap {
        return Err(ForgetError::SizeCap {
            var: p,
            cap: limits.size_cap,
        });
    }
    Ok(ForgetStep {
        kb: out,
        pairs_processed: n * (n + 1) / 2,
    })
}

/// `δ_p[K]` straight from the definition: the rule is applied to every
/// unordered pair of members, including pairs of `p`-free members (for which
/// it reduces to their product). Equivalent to [`forget_var`] but larger.
pub fn forget_var_all_pairs(kb: &PolyKB, p: VarId) -> PolyKB {
    let mut out = PolyKB::new();
    out.language = kb.language.iter().copied().filter(|&v| v != p).collect();
    let members = kb.to_vec();
    let results = apply_pairs(
        &members,
        |a, b| independence_rule(a, b, p),
        Poly::is_zero,
        |_| 0,
        usize::MAX,
    )
    .expect("no cap");
    for r in results {
        out.insert(r);
    }
    out
}

/// `δ_Q[K]`: forgets the variables of `forget` one after another in `order`.
pub fn retract(
    kb: &PolyKB,
    forget: &BTreeSet<VarId>,
    order: &[VarId],
    limits: Limits,
) -> Result<PolyKB, ForgetError> {
    let as_set: BTreeSet<VarId> = order.iter().copied().collect();
    if as_set.len() != order.len() || &as_set != forget {
        return Err(ForgetError::NotPermutation);
    }
    let mut cur = kb.clone();
    for &v in order {
        cur = forget_var_step(&cur, v, limits)?.kb;
    }
    Ok(cur)
}

/// Retracts onto `keep`, forgetting everything else in the default order.
pub fn retract_onto(
    kb: &PolyKB,
    keep: &BTreeSet<VarId>,
    limits: Limits,
) -> Result<PolyKB, ForgetError> {
    let order: Vec<VarId> = default_order(kb)
        .into_iter()
        .filter(|v| !keep.contains(v))
        .collect();
    let forget: BTreeSet<VarId> = order.iter().copied().collect();
    let mut out = retract(kb, &forget, &order, limits)?;
    out.language.retain(|v| keep.contains(v));
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Consistent,
    Inconsistent,
}

/// One row of a saturation run.
#[derive(Clone, Debug)]
pub struct TraceStep {
    pub variable: VarId,
    pub pairs_processed: usize,
    pub kb_polys: usize,
    pub kb_size_symbols: usize,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, Default)]
pub struct SaturationTrace {
    pub steps: Vec<TraceStep>,
    pub outcome: Option<Outcome>,
}

/// Forgets every variable of `kb`, following `order` first and then any
/// variables it left out in the default order. Stops as soon as `0` appears.
pub fn saturate(
    kb: &PolyKB,
    order: &[VarId],
    limits: Limits,
) -> Result<(Outcome, SaturationTrace), ForgetError> {
    let mut trace = SaturationTrace::default();
    let mut cur = kb.clone();
    let mut queue: Vec<VarId> = order.to_vec();
    let listed: BTreeSet<VarId> = order.iter().copied().collect();
    queue.extend(
        default_order(kb)
            .into_iter()
            .filter(|v| !listed.contains(v)),
    );
    for v in queue {
        if cur.is_inconsistent() {
            break;
        }
        let start = Instant::now();
        let step = forget_var_step(&cur, v, limits)?;
        cur = step.kb;
        trace.steps.push(TraceStep {
            variable: v,
            pairs_processed: step.pairs_processed,
            kb_polys: cur.len(),
            kb_size_symbols: cur.size_symbols(),
            elapsed: start.elapsed(),
        });
    }
    debug_assert!(
        cur.is_inconsistent() || cur.is_empty(),
        "saturation leaves only constants"
    );
    let outcome = if cur.is_inconsistent() {
        Outcome::Inconsistent
    } else {
        Outcome::Consistent
    };
    trace.outcome = Some(outcome);
    Ok((outcome, trace))
}

/// The canonical forgetting operator `δ⁰_p = σ∘δ*_p`, where
/// `δ*_p(F, G) = (F∧G){p/⊤} ∨ (F∧G){p/⊥}`.
pub fn canonical_forget(f: &Formula, g: &Formula, p: VarId) -> Formula {
    let both = Formula::and(f.clone(), g.clone());
    simplify_sigma(&Formula::or(
        both.substitute(p, &Formula::True),
        both.substitute(p, &Formula::False),
    ))
}

/// A knowledge base of σ-reduced formulas, normalized like [`PolyKB`]:
/// `⊤` is dropped and an inconsistent KB is exactly `{⊥}`.
///
/// σ only removes constants, so syntactically different but equivalent
/// members pile up quickly under repeated forgetting. A *merging* KB keys
/// every member by its polynomial projection and keeps only the first
/// member of each equivalence class, dropping valid ones; the members kept
/// are still exactly the formulas the operator produced.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormulaKB {
    members: BTreeSet<Formula>,
    keys: Option<BTreeSet<Poly>>,
}

impl FormulaKB {
    pub fn new() -> Self {
        Self::default()
    }

    /// An empty KB that merges equivalent members.
    pub fn merging() -> Self {
        FormulaKB {
            members: BTreeSet::new(),
            keys: Some(BTreeSet::new()),
        }
    }

    pub fn from_formulas<I: IntoIterator<Item = Formula>>(fs: I) -> Self {
        Self::new().extended(fs)
    }

    pub fn from_formulas_merging<I: IntoIterator<Item = Formula>>(fs: I) -> Self {
        Self::merging().extended(fs)
    }

    fn extended<I: IntoIterator<Item = Formula>>(mut self, fs: I) -> Self {
        for f in fs {
            self.insert(simplify_sigma(&f));
        }
        self
    }

    pub fn is_merging(&self) -> bool {
        self.keys.is_some()
    }

    fn empty_like(&self) -> Self {
        if self.is_merging() {
            Self::merging()
        } else {
            Self::new()
        }
    }

    fn insert(&mut self, f: Formula) {
        if self.is_inconsistent() || f == Formula::True {
            return;
        }
        let f = match &mut self.keys {
            Some(keys) => {
                let key = project_pi(&f);
                if key.is_one() {
                    return;
                }
                if key.is_zero() {
                    Formula::False
                } else if keys.insert(key) {
                    f
                } else {
                    return;
                }
            }
            None => f,
        };
        if f == Formula::False {
            self.members.clear();
            if let Some(keys) = &mut self.keys {
                keys.clear();
            }
        }
        self.members.insert(f);
    }

    pub fn members(&self) -> impl Iterator<Item = &Formula> {
        self.members.iter()
    }

    pub fn to_vec(&self) -> Vec<Formula> {
        self.members.iter().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_inconsistent(&self) -> bool {
        self.members.contains(&Formula::False)
    }

    /// Total AST node count.
    pub fn size_symbols(&self) -> usize {
        self.members.iter().map(Formula::size).sum()
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        self.members.iter().flat_map(Formula::vars).collect()
    }

    /// Number of members mentioning each variable.
    pub fn occurrences(&self) -> BTreeMap<VarId, usize> {
        let mut out = BTreeMap::new();
        for f in &self.members {
            for v in f.vars() {
                *out.entry(v).or_insert(0) += 1;
            }
        }
        out
    }
}

/// `δ⁰_p[K]` with the same pair enumeration and normalization as
/// [`forget_var`].
pub fn canonical_forget_kb(kb: &FormulaKB, p: VarId) -> FormulaKB {
    canonical_forget_step(kb, p, Limits::unbounded()).expect("unbounded limits")
}

/// [`canonical_forget_kb`] under resource limits.
pub fn canonical_forget_step(
    kb: &FormulaKB,
    p: VarId,
    limits: Limits,
) -> Result<FormulaKB, ForgetError> {
    let mut out = kb.empty_like();
    if kb.is_inconsistent() {
        out.insert(Formula::False);
        return Ok(out);
    }
    let (with_p, free): (Vec<&Formula>, Vec<&Formula>) =
        kb.members.iter().partition(|f| f.contains_var(p));
    for f in free {
        out.insert(f.clone());
    }
    let results = apply_pairs(
        &with_p.into_iter().cloned().collect::<Vec<_>>(),
        |f, g| canonical_forget(f, g, p),
        |f| *f == Formula::False,
        Formula::size,
        limits.size_cap.saturating_sub(out.size_symbols()),
    )
    .map_err(|()| ForgetError::SizeCap {
        var: p,
        cap: limits.size_cap,
    })?;
    for r in results {
        out.insert(r);
    }
    if out.size_symbols() > limits.size_cap {
        return Err(ForgetError::SizeCap {
            var: p,
            cap: limits.size_cap,
        });
    }
    Ok(out)
}

/// Fewest-occurrences-first order for a formula KB, as [`default_order`].
pub fn canonical_order(kb: &FormulaKB) -> Vec<VarId> {
    order_by_count(kb.occurrences())
}

/// Saturation with the canonical operator.
pub fn canonical_saturate(
    kb: &FormulaKB,
    order: &[VarId],
    limits: Limits,
) -> Result<Outcome, ForgetError> {
    let mut cur = kb.clone();
    let listed: BTreeSet<VarId> = order.iter().copied().collect();
    let mut queue = order.to_vec();
    queue.extend(
        canonical_order(kb)
            .into_iter()
            .filter(|v| !listed.contains(v)),
    );
    for v in queue {
        if cur.is_inconsistent() {
            break;
        }
        cur = canonical_forget_step(&cur, v, limits)?;
    }
    Ok(if cur.is_inconsistent() {
        Outcome::Inconsistent
    } else {
        Outcome::Consistent
    })
}
