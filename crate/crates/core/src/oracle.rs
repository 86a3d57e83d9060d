//! Brute-force truth-table semantics.
//!
//! Everything here evaluates formulas directly on the syntax tree, never via
//! polynomials, so it can serve as an independent reference for the rest of
//! the crate. It is exponential by design and bounded by [`MAX_LANGUAGE`].

use std::collections::BTreeSet;

use thiserror::Error;

use crate::boolpoly::Poly;
use crate::formula::Formula;
use crate::vars::VarId;

/// Largest language the enumerator accepts.
pub const MAX_LANGUAGE: usize = 24;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("language of {0} variables exceeds the enumeration bound of {MAX_LANGUAGE}")]
    LanguageTooLarge(usize),
    #[error("variable {0} is not in the model set's language")]
    NotSubset(VarId),
    #[error("variable {0} occurs in the input but not in the language")]
    Unassigned(VarId),
}

/// The models of something, as points over an ordered language.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelSet {
    pub language: Vec<VarId>,
    pub models: BTreeSet<Vec<bool>>,
}

impl ModelSet {
    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn contains(&self, point: &[bool]) -> bool {
        self.models.contains(point)
    }

    pub fn is_subset(&self, other: &ModelSet) -> bool {
        self.language == other.language && self.models.is_subset(&other.models)
    }
}

/// Anything the oracle can evaluate at a total assignment.
pub trait Semantics {
    fn holds(&self, point: &[Option<bool>]) -> Result<bool, OracleError>;
}

impl Semantics for Formula {
    fn holds(&self, point: &[Option<bool>]) -> Result<bool, OracleError> {
        eval_ast(self, point)
    }
}

impl Semantics for [Formula] {
    fn holds(&self, point: &[Option<bool>]) -> Result<bool, OracleError> {
        for f in self {
            if !eval_ast(f, point)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl Semantics for Vec<Formula> {
    fn holds(&self, point: &[Option<bool>]) -> Result<bool, OracleError> {
        self.as_slice().holds(point)
    }
}

/// Polynomial members are evaluated term by term with plain bit arithmetic;
/// used only to read off the models of a polynomial knowledge base.
impl Semantics for [Poly] {
    fn holds(&self, point: &[Option<bool>]) -> Result<bool, OracleError> {
        for p in self {
            let mut acc = false;
            for m in p.monomials() {
                let mut term = true;
                for v in m.vars() {
                    match point.get(v.index()).copied().flatten() {
                        Some(b) => term &= b,
                        None => return Err(OracleError::Unassigned(v)),
                    }
                }
                acc ^= term;
            }
            if !acc {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl Semantics for Poly {
    fn holds(&self, point: &[Option<bool>]) -> Result<bool, OracleError> {
        std::slice::from_ref(self).holds(point)
    }
}

impl Semantics for Vec<Poly> {
    fn holds(&self, point: &[Option<bool>]) -> Result<bool, OracleError> {
        self.as_slice().holds(point)
    }
}

fn eval_ast(f: &Formula, point: &[Option<bool>]) -> Result<bool, OracleError> {
    Ok(match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Var(v) => point
            .get(v.index())
            .copied()
            .flatten()
            .ok_or(OracleError::Unassigned(*v))?,
        Formula::Not(a) => !eval_ast(a, point)?,
        Formula::And(a, b) => eval_ast(a, point)? && eval_ast(b, point)?,
        Formula::Or(a, b) => eval_ast(a, point)? || eval_ast(b, point)?,
        Formula::Imp(a, b) => !eval_ast(a, point)? || eval_ast(b, point)?,
        Formula::Iff(a, b) => eval_ast(a, point)? == eval_ast(b, point)?,
    })
}

/// Enumerates every point over `language` at which `subject` holds.
pub fn models_of<S: Semantics + ?Sized>(
    subject: &S,
    language: &[VarId],
) -> Result<ModelSet, OracleError> {
    if language.len() > MAX_LANGUAGE {
        return Err(OracleError::LanguageTooLarge(language.len()));
    }
    let width = language.iter().map(|v| v.index() + 1).max().unwrap_or(0);
    let mut scratch = vec![None; width];
    let mut models = BTreeSet::new();
    for bits in 0u64..(1u64 << language.len()) {
        let coords: Vec<bool> = (0..language.len()).map(|i| bits >> i & 1 == 1).collect();
        for (v, &b) in language.iter().zip(&coords) {
            scratch[v.index()] = Some(b);
        }
        if subject.holds(&scratch)? {
            models.insert(coords);
        }
    }
    Ok(ModelSet {
        language: language.to_vec(),
        models,
    })
}

/// Restricts every model to the coordinates in `keep`, preserving the
/// order of the original language.
pub fn project_models(m: &ModelSet, keep: &BTreeSet<VarId>) -> Result<ModelSet, OracleError> {
    if let Some(&v) = keep.iter().find(|v| !m.language.contains(v)) {
        return Err(OracleError::NotSubset(v));
    }
    let idx: Vec<usize> = (0..m.language.len())
        .filter(|&i| keep.contains(&m.language[i]))
        .collect();
    Ok(ModelSet {
        language: idx.iter().map(|&i| m.language[i]).collect(),
        models: m
            .models
            .iter()
            .map(|pt| idx.iter().map(|&i| pt[i]).collect())
            .collect(),
    })
}

fn joint_language(a: &BTreeSet<VarId>, b: &BTreeSet<VarId>) -> Vec<VarId> {
    a.union(b).copied().collect()
}

fn formulas_vars(fs: &[Formula]) -> BTreeSet<VarId> {
    fs.iter().flat_map(Formula::vars).collect()
}

/// `Mod(K) ⊆ Mod(F)` over the joint language.
pub fn oracle_entails(k: &[Formula], f: &Formula) -> Result<bool, OracleError> {
    let lang = joint_language(&formulas_vars(k), &f.vars());
    Ok(models_of(k, &lang)?.is_subset(&models_of(f, &lang)?))
}

/// Equality of model sets over the joint language.
pub fn oracle_equivalent(a: &[Formula], b: &[Formula]) -> Result<bool, OracleError> {
    let lang = joint_language(&formulas_vars(a), &formulas_vars(b));
    Ok(models_of(a, &lang)? == models_of(b, &lang)?)
}

/// Whether the formulas have a common model.
pub fn oracle_satisfiable(k: &[Formula]) -> Result<bool, OracleError> {
    let lang: Vec<VarId> = formulas_vars(k).into_iter().collect();
    Ok(!models_of(k, &lang)?.is_empty())
}
