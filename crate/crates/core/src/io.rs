//! Reading and writing knowledge bases: DIMACS CNF, formula files,
//! polynomial files, and the CSV rows produced by the bench harness.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boolpoly::{parse_poly, Poly, PolyParseError};
use crate::forget::PolyKB;
use crate::formula::{parse_formula_lines, Formula, Literal, SyntaxError};
use crate::translate::{project_pi, to_formula_theta};
use crate::vars::Vars;

/// Longest clause accepted by [`clause_to_poly_checked`].
pub const DEFAULT_WIDTH_CAP: usize = 12;

#[derive(Debug, Error)]
pub enum DimacsError {
    #[error("line {line}: missing `p cnf` header before clauses")]
    MissingHeader { line: usize },
    #[error("line {line}: duplicate `p cnf` header")]
    DuplicateHeader { line: usize },
    #[error("line {line}: malformed header")]
    BadHeader { line: usize },
    #[error("line {line}: literal {lit} out of range 1..={num_vars}")]
    OutOfRange {
        line: usize,
        lit: i64,
        num_vars: usize,
    },
    #[error("line {line}: `{token}` is not an integer")]
    BadToken { line: usize, token: String },
    #[error("last clause is not terminated by 0")]
    Unterminated,
    #[error("line {line}: empty clause")]
    EmptyClause { line: usize },
    #[error("missing `p cnf` header")]
    NoHeader,
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Dimacs { path: PathBuf, source: DimacsError },
    #[error("{path}:{source}")]
    Formula { path: PathBuf, source: SyntaxError },
    #[error("{path}:{line}: {source}")]
    Poly {
        path: PathBuf,
        line: usize,
        source: PolyParseError,
    },
    #[error("{path}: unknown extension (expected .cnf, .fml or .pol)")]
    UnknownExtension { path: PathBuf },
    #[error("clause of width {width} exceeds the cap of {cap} literals")]
    ClauseTooWide { width: usize, cap: usize },
}

/// A CNF instance with 1-based signed literals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimacsProblem {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

pub fn parse_dimacs(text: &str) -> Result<DimacsProblem, DimacsError> {
    let mut num_vars = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            if num_vars.is_some() {
                return Err(DimacsError::DuplicateHeader { line: lineno });
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            match parts.as_slice() {
                ["p", "cnf", nv, _nc] => {
                    let nv = nv
                        .parse()
                        .map_err(|_| DimacsError::BadHeader { line: lineno })?;
                    num_vars = Some(nv);
                }
                _ => return Err(DimacsError::BadHeader { line: lineno }),
            }
            continue;
        }
        let nv = num_vars.ok_or(DimacsError::MissingHeader { line: lineno })?;
        for tok in line.split_whitespace() {
            let lit: i64 = tok.parse().map_err(|_| DimacsError::BadToken {
                line: lineno,
                token: tok.to_owned(),
            })?;
            if lit == 0 {
                if current.is_empty() {
                    return Err(DimacsError::EmptyClause { line: lineno });
                }
                clauses.push(std::mem::take(&mut current));
            } else if lit.unsigned_abs() as usize > nv {
                return Err(DimacsError::OutOfRange {
                    line: lineno,
                    lit,
                    num_vars: nv,
                });
            } else {
                current.push(lit as i32);
            }
        }
    }
    if !current.is_empty() {
        return Err(DimacsError::Unterminated);
    }
    Ok(DimacsProblem {
        num_vars: num_vars.ok_or(DimacsError::NoHeader)?,
        clauses,
    })
}

pub fn write_dimacs(p: &DimacsProblem) -> String {
    let mut out = format!("p cnf {} {}\n", p.num_vars, p.clauses.len());
    for c in &p.clauses {
        for l in c {
            let _ = write!(out, "{l} ");
        }
        out.push_str("0\n");
    }
    out
}

impl DimacsProblem {
    /// Literals of every clause, with variable `k` named `x<k>`.
    pub fn literal_clauses(&self, vars: &mut Vars) -> Vec<Vec<Literal>> {
        let ids: Vec<_> = (1..=self.num_vars)
            .map(|k| vars.intern(&format!("x{k}")))
            .collect();
        self.clauses
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&l| {
                        let v = ids[l.unsigned_abs() as usize - 1];
                        if l > 0 {
                            Literal::pos(v)
                        } else {
                            Literal::neg(v)
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

/// `π(l₁ ∨ … ∨ l_k) = 1 + ∏(1 + π(lᵢ))`.
pub fn clause_to_poly(clause: &[Literal]) -> Poly {
    let mut falsified = Poly::one();
    for l in clause {
        let lit = Poly::var(l.var);
        let factor = if l.positive { lit.complement() } else { lit };
        falsified = falsified.mul(&factor);
    }
    falsified.complement()
}

/// [`clause_to_poly`] with a guard on clause width.
pub fn clause_to_poly_checked(clause: &[Literal], cap: usize) -> Result<Poly, IoError> {
    if clause.len() > cap {
        return Err(IoError::ClauseTooWide {
            width: clause.len(),
            cap,
        });
    }
    Ok(clause_to_poly(clause))
}

pub fn clause_to_formula(clause: &[Literal]) -> Formula {
    Formula::disjunction(clause.iter().map(|l| l.to_formula()))
}

/// A knowledge base as read from disk: its members both as formulas and as
/// polynomials, index-aligned.
#[derive(Clone, Debug, Default)]
pub struct LoadedKb {
    pub formulas: Vec<Formula>,
    pub polys: Vec<Poly>,
}

impl LoadedKb {
    pub fn poly_kb(&self) -> PolyKB {
        let mut kb = PolyKB::from_polys(self.polys.iter().cloned());
        kb.extend_language(self.formulas.iter().flat_map(Formula::vars));
        kb
    }

    fn push_formula(&mut self, f: Formula) {
        self.polys.push(project_pi(&f));
        self.formulas.push(f);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Emit {
    Poly,
    Formula,
}

fn read(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_owned(),
        source,
    })
}

/// Parses KB text in the given format (`cnf`, `fml` or `pol`).
pub fn parse_kb(
    text: &str,
    format: &str,
    vars: &mut Vars,
    path: &Path,
) -> Result<LoadedKb, IoError> {
    let mut out = LoadedKb::default();
    match format {
        "cnf" => {
            let problem = parse_dimacs(text).map_err(|source| IoError::Dimacs {
                path: path.to_owned(),
                source,
            })?;
            for c in problem.literal_clauses(vars) {
                out.polys
                    .push(clause_to_poly_checked(&c, DEFAULT_WIDTH_CAP)?);
                out.formulas.push(clause_to_formula(&c));
            }
        }
        "fml" => {
            let fs = parse_formula_lines(text, vars).map_err(|source| IoError::Formula {
                path: path.to_owned(),
                source,
            })?;
            for f in fs {
                out.push_formula(f);
            }
        }
        "pol" => {
            for (i, line) in text.lines().enumerate() {
                let body = line.split('#').next().unwrap_or("").trim();
                if body.is_empty() {
                    continue;
                }
                let p = parse_poly(body, vars).map_err(|source| IoError::Poly {
                    path: path.to_owned(),
                    line: i + 1,
                    source,
                })?;
                out.formulas.push(to_formula_theta(&p, vars));
                out.polys.push(p);
            }
        }
        _ => {
            return Err(IoError::UnknownExtension {
                path: path.to_owned(),
            });
        }
    }
    Ok(out)
}

/// Loads a KB, dispatching on the file extension.
pub fn load_kb(path: &Path, vars: &mut Vars) -> Result<LoadedKb, IoError> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    if !matches!(ext, "cnf" | "fml" | "pol") {
        return Err(IoError::UnknownExtension {
            path: path.to_owned(),
        });
    }
    let text = read(path)?;
    parse_kb(&text, ext, vars, path)
}

/// One member per line, in canonical order.
pub fn render_kb(kb: &PolyKB, vars: &Vars, emit: Emit) -> String {
    let mut out = String::new();
    for line in kb_lines(kb, vars, emit) {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

pub fn kb_lines(kb: &PolyKB, vars: &Vars, emit: Emit) -> Vec<String> {
    match emit {
        Emit::Poly => kb.to_texts(vars),
        Emit::Formula => {
            let mut polys = kb.to_vec();
            polys.sort_by_key(|p| p.to_text(vars));
            polys
                .iter()
                .map(|p| to_formula_theta(p, vars).to_text(vars))
                .collect()
        }
    }
}

pub fn write_kb(kb: &PolyKB, path: &Path, vars: &Vars, emit: Emit) -> Result<(), IoError> {
    fs::write(path, render_kb(kb, vars, emit)).map_err(|source| IoError::Write {
        path: path.to_owned(),
        source,
    })
}

/// One row of bench output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub step: usize,
    pub variable: String,
    pub operator: String,
    pub kb_members: usize,
    pub kb_size_symbols: usize,
    pub elapsed_ms: f64,
    pub status: String,
}

pub fn write_bench_csv<W: io::Write>(rows: &[BenchRow], w: W) -> csv::Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    wtr.write_record([
        "step",
        "variable",
        "operator",
        "kb_members",
        "kb_size_symbols",
        "elapsed_ms",
        "status",
    ])?;
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_bench_csv<R: io::Read>(r: R) -> csv::Result<Vec<BenchRow>> {
    csv::Reader::from_reader(r).deserialize().collect()
}

/// Monomial count of a clause polynomial: the product part has
/// `2^(#positive literals)` terms, and the leading `1 +` adds or cancels the
/// constant depending on whether any literal is negative.
pub fn clause_poly_terms(clause: &[Literal]) -> usize {
    let product = 1usize << clause.iter().filter(|l| l.positive).count();
    if clause.iter().any(|l| !l.positive) {
        product + 1
    } else {
        product - 1
    }
}
