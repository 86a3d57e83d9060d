//! Propositional formulas: AST, substitution, the σ simplifier, the
//! formula-level Boolean derivative, and concrete syntax.
//!
//! Grammar (loosest to tightest binding):
//!
//! ```text
//! iff  := imp ('<->' iff)?
//! imp  := or ('->' imp)?
//! or   := and ('|' and)*
//! and  := not ('&' not)*
//! not  := '~' not | atom
//! atom := 'T' | 'F' | ident | '(' iff ')'
//! ```
//!
//! `#` starts a comment that runs to the end of the line.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::boolpoly::{Assignment, EvalError};
use crate::translate::{project_pi, to_formula_theta};
use crate::vars::{VarId, Vars};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Var(VarId),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

/// A signed variable.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: VarId,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: VarId) -> Self {
        Literal {
            var,
            positive: true,
        }
    }

    pub fn neg(var: VarId) -> Self {
        Literal {
            var,
            positive: false,
        }
    }

    pub fn negated(self) -> Self {
        Literal {
            var: self.var,
            positive: !self.positive,
        }
    }

    pub fn to_formula(self) -> Formula {
        if self.positive {
            Formula::Var(self.var)
        } else {
            Formula::not(Formula::Var(self.var))
        }
    }

    pub fn to_text(self, vars: &Vars) -> String {
        let name = vars.display_name(self.var);
        if self.positive {
            name
        } else {
            format!("~{name}")
        }
    }
}

impl Formula {
    pub fn var(v: VarId) -> Self {
        Formula::Var(v)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Self {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    /// Left-nested conjunction; `⊤` for an empty iterator.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; `⊥` for an empty iterator.
    pub fn disjunction<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Formula::True | Formula::False)
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<VarId>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Var(v) => {
                out.insert(*v);
            }
            Formula::Not(a) => a.collect_vars(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) | Formula::Iff(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn contains_var(&self, v: VarId) -> bool {
        match self {
            Formula::True | Formula::False => false,
            Formula::Var(w) => *w == v,
            Formula::Not(a) => a.contains_var(v),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) | Formula::Iff(a, b) => {
                a.contains_var(v) || b.contains_var(v)
            }
        }
    }

    /// True if `⊤` or `⊥` occurs anywhere in the tree.
    pub fn has_constant(&self) -> bool {
        match self {
            Formula::True | Formula::False => true,
            Formula::Var(_) => false,
            Formula::Not(a) => a.has_constant(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) | Formula::Iff(a, b) => {
                a.has_constant() || b.has_constant()
            }
        }
    }

    /// AST node count.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Var(_) => 1,
            Formula::Not(a) => 1 + a.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) | Formula::Iff(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    /// Classical truth value under `a`.
    pub fn eval<A: Assignment + ?Sized>(&self, a: &A) -> Result<bool, EvalError> {
        Ok(match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Var(v) => a.value(*v).ok_or(EvalError::Unassigned(*v))?,
            Formula::Not(x) => !x.eval(a)?,
            Formula::And(x, y) => x.eval(a)? & y.eval(a)?,
            Formula::Or(x, y) => x.eval(a)? | y.eval(a)?,
            Formula::Imp(x, y) => !x.eval(a)? | y.eval(a)?,
            Formula::Iff(x, y) => x.eval(a)? == y.eval(a)?,
        })
    }

    /// `F{p/G}`: every occurrence of `p` replaced by `g`, simultaneously.
    pub fn substitute(&self, p: VarId, g: &Formula) -> Formula {
        let bin = |a: &Formula, b: &Formula, k: fn(Formula, Formula) -> Formula| {
            k(a.substitute(p, g), b.substitute(p, g))
        };
        match self {
            Formula::Var(v) if *v == p => g.clone(),
            Formula::True | Formula::False | Formula::Var(_) => self.clone(),
            Formula::Not(a) => Formula::not(a.substitute(p, g)),
            Formula::And(a, b) => bin(a, b, Formula::and),
            Formula::Or(a, b) => bin(a, b, Formula::or),
            Formula::Imp(a, b) => bin(a, b, Formula::imp),
            Formula::Iff(a, b) => bin(a, b, Formula::iff),
        }
    }

    pub fn display<'a>(&'a self, vars: &'a Vars) -> FormulaDisplay<'a> {
        FormulaDisplay {
            formula: self,
            vars,
        }
    }

    pub fn to_text(&self, vars: &Vars) -> String {
        self.display(vars).to_string()
    }
}

fn negate_reduced(f: Formula) -> Formula {
    match f {
        Formula::True => Formula::False,
        Formula::False => Formula::True,
        other => Formula::not(other),
    }
}

/// The simplification operator σ.
///
/// Works bottom-up: once both children are reduced, a constant child either
/// absorbs the node or disappears from it. The rules apply to both operand
/// orders, and `↔` with a constant operand reduces to the other side or its
/// negation. The output mentions `⊤`/`⊥` only if it is itself `⊤` or `⊥`.
pub fn simplify_sigma(f: &Formula) -> Formula {
    use Formula::*;
    match f {
        True | False | Var(_) => f.clone(),
        Not(a) => negate_reduced(simplify_sigma(a)),
        And(a, b) => match (simplify_sigma(a), simplify_sigma(b)) {
            (False, _) | (_, False) => False,
            (True, x) | (x, True) => x,
            (x, y) => Formula::and(x, y),
        },
        Or(a, b) => match (simplify_sigma(a), simplify_sigma(b)) {
            (True, _) | (_, True) => True,
            (False, x) | (x, False) => x,
            (x, y) => Formula::or(x, y),
        },
        Imp(a, b) => match (simplify_sigma(a), simplify_sigma(b)) {
            (False, _) | (_, True) => True,
            (True, x) => x,
            (x, False) => negate_reduced(x),
            (x, y) => Formula::imp(x, y),
        },
        Iff(a, b) => match (simplify_sigma(a), simplify_sigma(b)) {
            (True, x) | (x, True) => x,
            (False, x) | (x, False) => negate_reduced(x),
            (x, y) => Formula::iff(x, y),
        },
    }
}

/// Boolean derivative `∂F/∂p`, computed as `Θ(∂π(F)/∂x_p)`.
///
/// Semantically equal to `¬(F{p/¬p} ↔ F)`; the result never mentions `p`.
pub fn formula_derivative(f: &Formula, p: VarId, vars: &Vars) -> Formula {
    to_formula_theta(&project_pi(f).derivative(p), vars)
}

// Binding strength, higher binds tighter.
fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => 1,
        Formula::Imp(..) => 2,
        Formula::Or(..) => 3,
        Formula::And(..) => 4,
        Formula::Not(_) => 5,
        _ => 6,
    }
}

pub struct FormulaDisplay<'a> {
    formula: &'a Formula,
    vars: &'a Vars,
}

impl FormulaDisplay<'_> {
    fn child(&self, f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if prec(f) < min {
            write!(out, "(")?;
            self.write(f, out)?;
            write!(out, ")")
        } else {
            self.write(f, out)
        }
    }

    fn write(&self, f: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = prec(f);
        match f {
            Formula::True => write!(out, "T"),
            Formula::False => write!(out, "F"),
            Formula::Var(v) => write!(out, "{}", self.vars.display_name(*v)),
            Formula::Not(a) => {
                write!(out, "~")?;
                self.child(a, 5, out)
            }
            // left-associative
            Formula::And(a, b) | Formula::Or(a, b) => {
                let op = if matches!(f, Formula::And(..)) {
                    " & "
                } else {
                    " | "
                };
                self.child(a, p, out)?;
                write!(out, "{op}")?;
                self.child(b, p + 1, out)
            }
            // right-associative
            Formula::Imp(a, b) | Formula::Iff(a, b) => {
                let op = if matches!(f, Formula::Imp(..)) {
                    " -> "
                } else {
                    " <-> "
                };
                self.child(a, p + 1, out)?;
                write!(out, "{op}")?;
                self.child(b, p, out)
            }
        }
    }
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.formula, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Imp,
    Iff,
    LParen,
    RParen,
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    end: (usize, usize),
}

fn lex(text: &str, first_line: usize) -> Result<Lexer, SyntaxError> {
    let mut toks = Vec::new();
    let (mut line, mut col) = (first_line, 1);
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let err = |message: String| SyntaxError {
            line: tl,
            column: tc,
            message,
        };
        match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            c if c.is_whitespace() => {}
            '~' => toks.push((Tok::Not, tl, tc)),
            '&' => toks.push((Tok::And, tl, tc)),
            '|' => toks.push((Tok::Or, tl, tc)),
            '(' => toks.push((Tok::LParen, tl, tc)),
            ')' => toks.push((Tok::RParen, tl, tc)),
            '-' => {
                if chars.get(i + 1) == Some(&'>') {
                    toks.push((Tok::Imp, tl, tc));
                    i += 2;
                    col += 2;
                    continue;
                }
                return Err(err("expected '->'".into()));
            }
            '<' => {
                if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') {
                    toks.push((Tok::Iff, tl, tc));
                    i += 3;
                    col += 3;
                    continue;
                }
                return Err(err("expected '<->'".into()));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                col += i - start;
                let tok = match word.as_str() {
                    "T" => Tok::True,
                    "F" => Tok::False,
                    _ => Tok::Ident(word),
                };
                toks.push((tok, tl, tc));
                continue;
            }
            other => return Err(err(format!("unexpected character {other:?}"))),
        }
        i += 1;
        col += 1;
    }
    Ok(Lexer {
        toks,
        end: (line, col),
    })
}

struct Parser<'v> {
    lexer: Lexer,
    pos: usize,
    vars: &'v mut Vars,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.lexer.toks.get(self.pos).map(|t| &t.0)
    }

    fn here(&self) -> (usize, usize) {
        self.lexer
            .toks
            .get(self.pos)
            .map_or(self.lexer.end, |t| (t.1, t.2))
    }

    fn error(&self, message: &str) -> SyntaxError {
        let (line, column) = self.here();
        let found = match self.peek() {
            None => "end of input".to_owned(),
            Some(t) => format!("{t:?}"),
        };
        SyntaxError {
            line,
            column,
            message: format!("{message}, found {found}"),
        }
    }

    fn iff(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.imp()?;
        if self.peek() == Some(&Tok::Iff) {
            self.pos += 1;
            return Ok(Formula::iff(lhs, self.iff()?));
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.or()?;
        if self.peek() == Some(&Tok::Imp) {
            self.pos += 1;
            return Ok(Formula::imp(lhs, self.imp()?));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.not()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            lhs = Formula::and(lhs, self.not()?);
        }
        Ok(lhs)
    }

    fn not(&mut self) -> Result<Formula, SyntaxError> {
        if self.peek() == Some(&Tok::Not) {
            self.pos += 1;
            return Ok(Formula::not(self.not()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, SyntaxError> {
        let tok = self.peek().cloned();
        match tok {
            Some(Tok::True) => {
                self.pos += 1;
                Ok(Formula::True)
            }
            Some(Tok::False) => {
                self.pos += 1;
                Ok(Formula::False)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(Formula::Var(self.vars.intern(&name)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.iff()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => Err(self.error("expected a formula")),
        }
    }
}

fn parse_at(text: &str, first_line: usize, vars: &mut Vars) -> Result<Formula, SyntaxError> {
    let lexer = lex(text, first_line)?;
    let mut parser = Parser {
        lexer,
        pos: 0,
        vars,
    };
    let f = parser.iff()?;
    if parser.pos != parser.lexer.toks.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(f)
}

/// Parses a single formula, interning new variable names into `vars`.
pub fn parse_formula(text: &str, vars: &mut Vars) -> Result<Formula, SyntaxError> {
    parse_at(text, 1, vars)
}

/// Parses a KB file: one formula per line; blank and comment-only lines are skipped.
pub fn parse_formula_lines(text: &str, vars: &mut Vars) -> Result<Vec<Formula>, SyntaxError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        out.push(parse_at(line, i + 1, vars)?);
    }
    Ok(out)
}
