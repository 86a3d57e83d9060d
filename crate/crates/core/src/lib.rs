//! Propositional reasoning through Boolean polynomials.
//!
//! Formulas are translated into multilinear polynomials over 𝔽₂, where
//! variables can be forgotten with the independence rule. On top of that the
//! crate offers conservative retraction, saturation-based satisfiability and
//! entailment, sensitivity analysis, and a small benchmark harness.
//!
//! ```
//! use boolforget::{parse_formula, project_pi, Vars};
//!
//! let mut vars = Vars::new();
//! let f = parse_formula("p1 -> p1 & p2", &mut vars).unwrap();
//! assert_eq!(project_pi(&f).to_text(&vars), "p1*p2+p1+1");
//! ```

pub mod boolpoly;
pub mod cli;
pub mod forget;
pub mod formula;
pub mod gen;
pub mod io;
pub mod oracle;
pub mod reason;
pub mod translate;
pub mod vars;

pub use boolpoly::{independence_rule, parse_poly, Monomial, Poly};
pub use forget::{
    canonical_forget, canonical_forget_kb, forget_var, retract, saturate, FormulaKB, Limits,
    Outcome, PolyKB, SaturationTrace,
};
pub use formula::{
    formula_derivative, parse_formula, parse_formula_lines, simplify_sigma, Formula, Literal,
};
pub use reason::{
    dangerous_literals, entails, entails_localized, irrelevance_check, is_consistent, is_sensitive,
};
pub use translate::{project_pi, to_formula_theta, to_poly_p, Point, Valuation};
pub use vars::{VarId, Vars};
