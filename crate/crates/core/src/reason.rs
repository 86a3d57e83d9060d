//! Reasoning services built on saturation: consistency, entailment (direct
//! and localized), sensitivity, irrelevance and dangerous-literal detection.

use std::collections::BTreeSet;

use rayon::prelude::*;
use thiserror::Error;

use crate::forget::{
    retract_onto, saturate, ForgetError, Limits, Outcome, PolyKB, SaturationTrace,
};
use crate::formula::{Formula, Literal};
use crate::translate::project_pi;
use crate::vars::VarId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReasonError {
    #[error(transparent)]
    Forget(#[from] ForgetError),
    #[error("variable {0} does not occur in the formula")]
    VariableNotInFormula(VarId),
    #[error("the knowledge base together with the state is inconsistent")]
    InconsistentState,
    #[error("the state already entails the warning")]
    WarningAlreadyEntailed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    DirectRefutation,
    Localized,
}

#[derive(Clone, Debug)]
pub struct EntailmentVerdict {
    pub holds: bool,
    pub method: Method,
    /// The retraction onto the goal's variables; present only for
    /// [`Method::Localized`].
    pub retraction_used: Option<PolyKB>,
    pub trace: SaturationTrace,
}

fn literal_poly(l: Literal) -> crate::boolpoly::Poly {
    project_pi(&l.to_formula())
}

/// Whether `kb` has a model, decided by saturation.
pub fn is_consistent(kb: &PolyKB, limits: Limits) -> Result<(bool, SaturationTrace), ForgetError> {
    let (outcome, trace) = saturate(kb, &[], limits)?;
    Ok((outcome == Outcome::Consistent, trace))
}

/// `K ⊨ F`, by refuting `K ∪ {¬F}`.
pub fn entails(kb: &PolyKB, f: &Formula, limits: Limits) -> Result<EntailmentVerdict, ForgetError> {
    let (consistent, trace) = is_consistent(&kb.with(project_pi(f).complement()), limits)?;
    Ok(EntailmentVerdict {
        holds: !consistent,
        method: Method::DirectRefutation,
        retraction_used: None,
        trace,
    })
}

/// `K ⊨ F`, after first retracting `K` onto the variables of `F`.
pub fn entails_localized(
    kb: &PolyKB,
    f: &Formula,
    limits: Limits,
) -> Result<EntailmentVerdict, ForgetError> {
    let retraction = retract_onto(kb, &f.vars(), limits)?;
    let (consistent, trace) = is_consistent(&retraction.with(project_pi(f).complement()), limits)?;
    Ok(EntailmentVerdict {
        holds: !consistent,
        method: Method::Localized,
        retraction_used: Some(retraction),
        trace,
    })
}

/// Whether `F` is sensitive in `p` with respect to `K`, i.e. whether
/// `K ∪ {∂F/∂p}` is consistent.
pub fn is_sensitive(
    kb: &PolyKB,
    f: &Formula,
    p: VarId,
    limits: Limits,
) -> Result<bool, ReasonError> {
    if !f.contains_var(p) {
        return Err(ReasonError::VariableNotInFormula(p));
    }
    let d = project_pi(f).derivative(p);
    Ok(is_consistent(&kb.with(d), limits)?.0)
}

/// Whether `F` is independent of `p` outright: its derivative vanishes.
pub fn irrelevance_check(f: &Formula, p: VarId) -> bool {
    project_pi(f).derivative(p).is_zero()
}

/// Classification of candidate facts against a warning variable.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DangerReport {
    /// Adding the literal makes the warning follow.
    pub dangerous: Vec<Literal>,
    /// The literal contradicts the state, so the warning follows vacuously.
    pub vacuous: Vec<Literal>,
    pub safe: Vec<Literal>,
}

/// Finds the facts `r` with `K ∪ state ∪ {r} ⊨ warning`.
///
/// `K` is retracted once onto the variables of the facts, the state and the
/// warning; every candidate is then tested against that retraction.
/// Candidates already in the state are skipped.
pub fn dangerous_literals(
    kb: &PolyKB,
    facts: &[Literal],
    state: &[Literal],
    warning: VarId,
    limits: Limits,
) -> Result<DangerReport, ReasonError> {
    let keep: BTreeSet<VarId> = facts
        .iter()
        .chain(state)
        .map(|l| l.var)
        .chain([warning])
        .collect();
    let mut base = retract_onto(kb, &keep, limits)?;
    for &l in state {
        base.insert(literal_poly(l));
    }
    if !is_consistent(&base, limits)?.0 {
        return Err(ReasonError::InconsistentState);
    }
    let safe_world = base.with(literal_poly(Literal::neg(warning)));
    if !is_consistent(&safe_world, limits)?.0 {
        return Err(ReasonError::WarningAlreadyEntailed);
    }
    let mut seen = BTreeSet::new();
    let candidates: Vec<Literal> = facts
        .iter()
        .copied()
        .filter(|l| !state.contains(l) && seen.insert(*l))
        .collect();
    // per candidate: (consistent with the base, consistent with the base and ¬warning)
    type Verdict = Result<(bool, bool), ForgetError>;
    let verdicts: Vec<(Literal, Verdict)> = candidates
        .par_iter()
        .map(|&l| {
            let r = (|| {
                let possible = is_consistent(&base.with(literal_poly(l)), limits)?.0;
                let escapes = is_consistent(&safe_world.with(literal_poly(l)), limits)?.0;
                Ok((possible, escapes))
            })();
            (l, r)
        })
        .collect();
    let mut report = DangerReport::default();
    for (l, r) in verdicts {
        match r? {
            (false, _) => report.vacuous.push(l),
            (true, false) => report.dangerous.push(l),
            (true, true) => report.safe.push(l),
        }
    }
    Ok(report)
}
