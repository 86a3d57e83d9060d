//! Command-line front end.
//!
//! Exit codes: `check-sat` returns 10 (SAT) or 20 (UNSAT); `entails`,
//! `sensitive` and `dangerous` return 0 when the property holds and 3 when
//! it does not; every command returns 1 on error.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use crate::forget::{
    canonical_forget_step, default_order, forget_var_all_pairs, forget_var_step, saturate,
    ForgetError, FormulaKB, Limits, Outcome, PolyKB,
};
use crate::formula::{parse_formula, Formula, Literal};
use crate::gen::{random_kcnf, shuffled};
use crate::io::{kb_lines, load_kb, write_bench_csv, write_dimacs, BenchRow, Emit, LoadedKb};
use crate::reason::{dangerous_literals, entails, entails_localized, is_sensitive};
use crate::translate::project_pi;
use crate::vars::{VarId, Vars};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NOT_HOLDS: i32 = 3;
pub const EXIT_SAT: i32 = 10;
pub const EXIT_UNSAT: i32 = 20;

#[derive(Parser, Debug)]
#[command(
    name = "boolforget",
    version,
    about = "Forgetting and saturation over Boolean polynomials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Operator {
    Independence,
    Canonical,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum BenchOp {
    Independence,
    Canonical,
    Both,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Sequence {
    /// Fewest occurrences in the input first; the seed breaks ties.
    Occurrence,
    /// A uniformly shuffled order.
    Random,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum EmitArg {
    Poly,
    Formula,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide satisfiability by saturation (exit 10 SAT, 20 UNSAT).
    CheckSat {
        file: PathBuf,
        /// Elimination order, comma separated; the rest follows by occurrence count.
        #[arg(long, value_delimiter = ',')]
        order: Vec<String>,
        /// Print one line per elimination step to stderr.
        #[arg(long)]
        trace: bool,
    },
    /// Forget variables and print the resulting knowledge base.
    Retract {
        file: PathBuf,
        #[arg(
            long,
            value_delimiter = ',',
            conflicts_with = "keep",
            required_unless_present = "keep"
        )]
        forget: Option<Vec<String>>,
        #[arg(long, value_delimiter = ',')]
        keep: Option<Vec<String>>,
        #[arg(long, value_delimiter = ',')]
        order: Vec<String>,
        #[arg(long, value_enum, default_value = "independence")]
        op: Operator,
        #[arg(long, value_enum, default_value = "poly")]
        emit: EmitArg,
        /// Apply the rule to every pair of members, not just those mentioning
        /// the variable (independence operator only).
        #[arg(long)]
        all_pairs: bool,
    },
    /// Decide whether the knowledge base entails a formula (exit 0 / 3).
    Entails {
        file: PathBuf,
        #[arg(long)]
        goal: String,
        /// Retract onto the goal's variables before refuting.
        #[arg(long)]
        localize: bool,
        /// Extra formula added to the knowledge base (repeatable).
        #[arg(long)]
        assume: Vec<String>,
    },
    /// Decide whether a formula is sensitive in a variable (exit 0 / 3).
    Sensitive {
        file: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        var: String,
        #[arg(long)]
        assume: Vec<String>,
    },
    /// List the facts that would make a warning variable follow (exit 0 if any).
    Dangerous {
        file: PathBuf,
        /// Candidate literals, e.g. `p1,~p1,p2`.
        #[arg(long, value_delimiter = ',')]
        facts: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        state: Vec<String>,
        #[arg(long)]
        warning: String,
    },
    /// Forget a seeded random sequence of variables, one CSV row per step.
    Bench {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        op: BenchOp,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// How the seeded variable sequence is drawn.
        #[arg(long, value_enum, default_value = "occurrence")]
        sequence: Sequence,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run both operators concurrently (timings are flagged).
        #[arg(long)]
        parallel: bool,
    },
    /// Write a random k-CNF instance in DIMACS format.
    GenCnf {
        #[arg(long)]
        vars: usize,
        #[arg(long)]
        clauses: usize,
        #[arg(long, default_value_t = 3)]
        width: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Runs the CLI with the given arguments and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_ERROR
        }
    }
}

fn load(path: &Path, vars: &mut Vars) -> Result<LoadedKb> {
    Ok(load_kb(path, vars)?)
}

fn lookup(vars: &Vars, name: &str) -> Result<VarId> {
    vars.get(name.trim())
        .ok_or_else(|| anyhow!("unknown variable `{}`", name.trim()))
}

fn parse_literal(text: &str, vars: &mut Vars) -> Result<Literal> {
    let t = text.trim();
    let (positive, name) = match t.strip_prefix('~').or_else(|| t.strip_prefix('-')) {
        Some(rest) => (false, rest.trim()),
        None => (true, t),
    };
    if name.is_empty() {
        bail!("empty literal in `{text}`");
    }
    let var = vars.intern(name);
    Ok(Literal { var, positive })
}

fn formula_arg(text: &str, vars: &mut Vars) -> Result<Formula> {
    parse_formula(text, vars).with_context(|| format!("in formula `{text}`"))
}

fn with_assumptions(loaded: &LoadedKb, assume: &[String], vars: &mut Vars) -> Result<PolyKB> {
    let mut kb = loaded.poly_kb();
    for a in assume {
        let f = formula_arg(a, vars)?;
        kb.extend_language(f.vars());
        kb.insert(project_pi(&f));
    }
    Ok(kb)
}

fn names(vars: &Vars, ids: impl IntoIterator<Item = VarId>) -> String {
    ids.into_iter()
        .map(|v| vars.display_name(v))
        .collect::<Vec<_>>()
        .join(",")
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let limits = Limits::from_env();
    let mut vars = Vars::new();
    match cmd {
        Command::CheckSat { file, order, trace } => {
            let kb = load(&file, &mut vars)?.poly_kb();
            let order = order
                .iter()
                .map(|n| lookup(&vars, n))
                .collect::<Result<Vec<_>>>()?;
            let (outcome, tr) = saturate(&kb, &order, limits)?;
            if trace {
                for (i, s) in tr.steps.iter().enumerate() {
                    writeln!(
                        err,
                        "step {} forget {}: {} pairs, {} members, {} symbols",
                        i + 1,
                        vars.display_name(s.variable),
                        s.pairs_processed,
                        s.kb_polys,
                        s.kb_size_symbols
                    )?;
                }
            }
            Ok(match outcome {
                Outcome::Consistent => {
                    writeln!(out, "SAT")?;
                    EXIT_SAT
                }
                Outcome::Inconsistent => {
                    writeln!(out, "UNSAT")?;
                    EXIT_UNSAT
                }
            })
        }
        Command::Retract {
            file,
            forget,
            keep,
            order,
            op,
            emit,
            all_pairs,
        } => {
            let loaded = load(&file, &mut vars)?;
            let kb = loaded.poly_kb();
            let present = kb.language().clone();
            let forget_set: BTreeSet<VarId> = match (forget, keep) {
                (Some(f), None) => f
                    .iter()
                    .filter(|n| !n.trim().is_empty())
                    .map(|n| lookup(&vars, n))
                    .collect::<Result<_>>()?,
                (None, Some(k)) => {
                    let keep: BTreeSet<VarId> =
                        k.iter().map(|n| lookup(&vars, n)).collect::<Result<_>>()?;
                    present.difference(&keep).copied().collect()
                }
                _ => bail!("exactly one of --forget and --keep is required"),
            };
            let order: Vec<VarId> = if order.is_empty() {
                let mut o: Vec<VarId> = default_order(&kb)
                    .into_iter()
                    .filter(|v| forget_set.contains(v))
                    .collect();
                o.extend(
                    forget_set
                        .iter()
                        .filter(|v| !o.contains(v))
                        .copied()
                        .collect::<Vec<_>>(),
                );
                o
            } else {
                order
                    .iter()
                    .map(|n| lookup(&vars, n))
                    .collect::<Result<_>>()?
            };
            let as_set: BTreeSet<VarId> = order.iter().copied().collect();
            if as_set != forget_set || as_set.len() != order.len() {
                return Err(ForgetError::NotPermutation.into());
            }
            let emit = match emit {
                EmitArg::Poly => Emit::Poly,
                EmitArg::Formula => Emit::Formula,
            };
            let lines = match op {
                Operator::Independence => {
                    let mut cur = kb;
                    for &v in &order {
                        cur = if all_pairs {
                            forget_var_all_pairs(&cur, v)
                        } else {
                            forget_var_step(&cur, v, limits)?.kb
                        };
                    }
                    kb_lines(&cur, &vars, emit)
                }
                Operator::Canonical => {
                    let mut cur = FormulaKB::from_formulas_merging(loaded.formulas.iter().cloned());
                    for &v in &order {
                        cur = canonical_forget_step(&cur, v, limits)?;
                    }
                    match emit {
                        Emit::Formula => {
                            let mut l: Vec<String> =
                                cur.members().map(|f| f.to_text(&vars)).collect();
                            l.sort();
                            l
                        }
                        Emit::Poly => {
                            kb_lines(&PolyKB::from_formulas(cur.members()), &vars, Emit::Poly)
                        }
                    }
                }
            };
            if lines.is_empty() {
                writeln!(out, "{}", if emit == Emit::Poly { "1" } else { "T" })?;
            }
            for l in lines {
                writeln!(out, "{l}")?;
            }
            Ok(EXIT_OK)
        }
        Command::Entails {
            file,
            goal,
            localize,
            assume,
        } => {
            let loaded = load(&file, &mut vars)?;
            let kb = with_assumptions(&loaded, &assume, &mut vars)?;
            let goal = formula_arg(&goal, &mut vars)?;
            let verdict = if localize {
                entails_localized(&kb, &goal, limits)?
            } else {
                entails(&kb, &goal, limits)?
            };
            writeln!(
                out,
                "{}",
                if verdict.holds {
                    "holds"
                } else {
                    "does not hold"
                }
            )?;
            if let Some(r) = &verdict.retraction_used {
                writeln!(out, "# retraction onto {{{}}}:", names(&vars, goal.vars()))?;
                let lines = kb_lines(r, &vars, Emit::Poly);
                if lines.is_empty() {
                    writeln!(out, "1")?;
                }
                for l in lines {
                    writeln!(out, "{l}")?;
                }
            }
            Ok(if verdict.holds {
                EXIT_OK
            } else {
                EXIT_NOT_HOLDS
            })
        }
        Command::Sensitive {
            file,
            formula,
            var,
            assume,
        } => {
            let loaded = load(&file, &mut vars)?;
            let kb = with_assumptions(&loaded, &assume, &mut vars)?;
            let f = formula_arg(&formula, &mut vars)?;
            let p = lookup(&vars, &var)?;
            let s = is_sensitive(&kb, &f, p, limits)?;
            writeln!(out, "{}", if s { "sensitive" } else { "not sensitive" })?;
            Ok(if s { EXIT_OK } else { EXIT_NOT_HOLDS })
        }
        Command::Dangerous {
            file,
            facts,
            state,
            warning,
        } => {
            let kb = load(&file, &mut vars)?.poly_kb();
            let facts = facts
                .iter()
                .map(|t| parse_literal(t, &mut vars))
                .collect::<Result<Vec<_>>>()?;
            let state = state
                .iter()
                .filter(|t| !t.trim().is_empty())
                .map(|t| parse_literal(t, &mut vars))
                .collect::<Result<Vec<_>>>()?;
            let w = lookup(&vars, &warning)?;
            let report = dangerous_literals(&kb, &facts, &state, w, limits)?;
            let show = |ls: &[Literal]| {
                ls.iter()
                    .map(|l| l.to_text(&vars))
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            writeln!(out, "dangerous: {}", show(&report.dangerous))?;
            writeln!(out, "vacuous: {}", show(&report.vacuous))?;
            writeln!(out, "safe: {}", show(&report.safe))?;
            Ok(if report.dangerous.is_empty() {
                EXIT_NOT_HOLDS
            } else {
                EXIT_OK
            })
        }
        Command::Bench {
            file,
            op,
            steps,
            seed,
            sequence,
            out: dest,
            parallel,
        } => {
            let loaded = load(&file, &mut vars)?;
            let rows = bench(&loaded, &vars, op, steps, seed, sequence, parallel, limits)?;
            match dest {
                Some(path) => {
                    let f = fs::File::create(&path)
                        .with_context(|| format!("creating {}", path.display()))?;
                    write_bench_csv(&rows, f)?;
                }
                None => write_bench_csv(&rows, &mut *out)?,
            }
            Ok(EXIT_OK)
        }
        Command::GenCnf {
            vars: n,
            clauses,
            width,
            seed,
            out: dest,
        } => {
            if width == 0 || width > n {
                bail!("clause width must be between 1 and the variable count");
            }
            let text = write_dimacs(&random_kcnf(n, clauses, width, seed));
            match dest {
                Some(path) => {
                    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?
                }
                None => out.write_all(text.as_bytes())?,
            }
            Ok(EXIT_OK)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn bench(
    loaded: &LoadedKb,
    vars: &Vars,
    op: BenchOp,
    steps: usize,
    seed: u64,
    how: Sequence,
    parallel: bool,
    limits: Limits,
) -> Result<Vec<BenchRow>> {
    let kb = loaded.poly_kb();
    let all: Vec<VarId> = kb.language().iter().copied().collect();
    if steps > all.len() {
        bail!(
            "--steps {steps} exceeds the {} variables of the knowledge base",
            all.len()
        );
    }
    let mut sequence = shuffled(&all, seed);
    if how == Sequence::Occurrence {
        let counts = kb.occurrences();
        // stable sort: the shuffle decides among equally frequent variables
        sequence.sort_by_key(|v| counts.get(v).copied().unwrap_or(0));
    }
    sequence.truncate(steps);
    let status = if parallel { "ok-parallel" } else { "ok" };
    let run_indep = || bench_independence(&kb, &sequence, vars, limits, status);
    let run_canon = || bench_canonical(loaded, &sequence, vars, limits, status);
    let mut rows = Vec::new();
    match op {
        BenchOp::Independence => rows.extend(run_indep()),
        BenchOp::Canonical => rows.extend(run_canon()),
        BenchOp::Both if parallel => {
            let (a, b) = rayon::join(run_indep, run_canon);
            rows.extend(a);
            rows.extend(b);
        }
        BenchOp::Both => {
            rows.extend(run_indep());
            rows.extend(run_canon());
        }
    }
    Ok(rows)
}

#[allow(clippy::too_many_arguments)]
fn row(
    step: usize,
    v: VarId,
    vars: &Vars,
    operator: &str,
    members: usize,
    size: usize,
    ms: f64,
    status: &str,
) -> BenchRow {
    BenchRow {
        step,
        variable: vars.display_name(v),
        operator: operator.to_owned(),
        kb_members: members,
        kb_size_symbols: size,
        elapsed_ms: (ms * 1000.0).round() / 1000.0,
        status: status.to_owned(),
    }
}

fn bench_independence(
    kb: &PolyKB,
    seq: &[VarId],
    vars: &Vars,
    limits: Limits,
    status: &str,
) -> Vec<BenchRow> {
    let mut rows = Vec::new();
    let mut cur = kb.clone();
    for (i, &v) in seq.iter().enumerate() {
        let start = Instant::now();
        let res = forget_var_step(&cur, v, limits);
        let ms = start.elapsed().as_secs_f64() * 1000.0;
        match res {
            Ok(step) => {
                cur = step.kb;
                rows.push(row(
                    i + 1,
                    v,
                    vars,
                    "independence",
                    cur.len(),
                    cur.size_symbols(),
                    ms,
                    status,
                ));
            }
            Err(_) => {
                rows.push(row(
                    i + 1,
                    v,
                    vars,
                    "independence",
                    cur.len(),
                    cur.size_symbols(),
                    ms,
                    "truncated",
                ));
                break;
            }
        }
    }
    rows
}

fn bench_canonical(
    loaded: &LoadedKb,
    seq: &[VarId],
    vars: &Vars,
    limits: Limits,
    status: &str,
) -> Vec<BenchRow> {
    let mut rows = Vec::new();
    let mut cur = FormulaKB::from_formulas(loaded.formulas.iter().cloned());
    for (i, &v) in seq.iter().enumerate() {
        let start = Instant::now();
        let res = canonical_forget_step(&cur, v, limits);
        let ms = start.elapsed().as_secs_f64() * 1000.0;
        match res {
            Ok(next) => {
                cur = next;
                rows.push(row(
                    i + 1,
                    v,
                    vars,
                    "canonical",
                    cur.len(),
                    cur.size_symbols(),
                    ms,
                    status,
                ));
            }
            Err(_) => {
                rows.push(row(
                    i + 1,
                    v,
                    vars,
                    "canonical",
                    cur.len(),
                    cur.size_symbols(),
                    ms,
                    "truncated",
                ));
                break;
            }
        }
    }
    rows
}
