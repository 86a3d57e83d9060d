//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use boolforget::cli;
use boolforget::forget::{
    canonical_forget_step, canonical_order, canonical_saturate, retract_onto, FormulaKB,
};
use boolforget::gen::random_kcnf;
use boolforget::io::{load_kb, read_bench_csv, write_dimacs, BenchRow};
use boolforget::oracle::{
    models_of, oracle_entails, oracle_equivalent, oracle_satisfiable, project_models,
};
use boolforget::reason::dangerous_literals;
use boolforget::translate::to_poly_p;
use boolforget::{
    forget_var, independence_rule, is_sensitive, parse_formula, parse_formula_lines, parse_poly,
    project_pi, saturate, to_formula_theta, Formula, Limits, Literal, Outcome, Poly, PolyKB, VarId,
    Vars,
};
use common::{formula, poly, three_cnf, var_ids};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRng, TestRunner};

type Verdict = Result<String, String>;
type Criterion = (&'static str, Option<Duration>, fn() -> Verdict);

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn load(name: &str, vars: &mut Vars) -> PolyKB {
    load_kb(&data(name), vars).expect("fixture loads").poly_kb()
}

/// A KB's texts with the dropped constant 1 left out.
fn texts(lines: &[&str], vars: &mut Vars) -> Vec<String> {
    let polys: Vec<Poly> = lines.iter().map(|l| parse_poly(l, vars).unwrap()).collect();
    let mut out: Vec<String> = polys
        .iter()
        .filter(|p| !p.is_one())
        .map(|p| p.to_text(vars))
        .collect();
    out.sort();
    out.dedup();
    out
}

fn var(vars: &Vars, name: &str) -> VarId {
    vars.get(name).unwrap()
}

fn ensure(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(config_algorithm()))
}

fn config_algorithm() -> proptest::test_runner::RngAlgorithm {
    Config::default().rng_algorithm
}

fn property<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner(cases)
        .run(&strategy, test)
        .map_err(|e| e.to_string())
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["boolforget"];
    argv.extend_from_slice(args);
    let code = cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned())
}

fn criterion_1() -> Verdict {
    let mut v = Vars::new();
    let mut k = load("five_vars.fml", &mut v);
    let steps: [(&str, &[&str]); 3] = [
        ("t", &["p*q*r*s+p*q*s+p*s+s+1", "p*s+s+1", "1"]),
        ("q", &["p*s+s+1", "1"]),
        ("p", &["1"]),
    ];
    for (name, expected) in steps {
        k = forget_var(&k, var(&v, name));
        let want = texts(expected, &mut v);
        ensure(
            k.to_texts(&v) == want,
            format!("after forgetting {name}: {:?} != {want:?}", k.to_texts(&v)),
        )?;
    }
    ensure(k.is_empty() && !k.is_inconsistent(), "final KB is not {1}")?;
    Ok("forgetting t, q, p reproduces all three expected sets, ending in {1}".into())
}

fn criterion_2() -> Verdict {
    let mut v = Vars::with_names(["x1", "x2", "x3", "x4"]);
    let p = |t: &str, v: &mut Vars| parse_poly(t, v).unwrap();
    let one = p("1+x1+x1*x2", &mut v);
    let two = p("1+x2*x4+x3*x4+x2*x3*x4+x2+x3+x2*x3", &mut v);
    let three = p("x1+x1*x4", &mut v);
    let mut f = Vars::new();
    let translated: Vec<Poly> = parse_formula_lines("p -> q\nq | r -> s\n~(p -> s)", &mut f)
        .unwrap()
        .iter()
        .map(project_pi)
        .collect();
    let renamed =
        ["1+p+p*q", "1+q*s+r*s+q*r*s+q+r+q*r", "p+p*s"].map(|t| parse_poly(t, &mut f).unwrap());
    ensure(
        translated == renamed,
        "translations of the three formulas differ from (1)-(3)",
    )?;
    let step4 = independence_rule(&one, &two, var(&v, "x2"));
    let want = p("1+x1+x3+x1*x4+x3*x4+x1*x3+x1*x3*x4", &mut v);
    ensure(step4 == want, format!("step 4 gave {}", step4.to_text(&v)))?;
    let step5 = independence_rule(&three, &step4, var(&v, "x1"));
    ensure(
        step5.is_zero(),
        format!("step 5 gave {}", step5.to_text(&v)),
    )?;
    let (code, out) = run_cli(&["check-sat", data("refutation.fml").to_str().unwrap()]);
    ensure(
        code == 20 && out.trim() == "UNSAT",
        format!("check-sat exited {code} with {out:?}"),
    )?;
    Ok("step 4 matches, step 5 is 0, check-sat exits 20".into())
}

fn criterion_3() -> Verdict {
    let mut failures = Vec::new();
    let mut notes = Vec::new();

    // a single rule application
    let mut w = Vars::new();
    let a1 = parse_poly("1+x2*x3*x5+x3*x5", &mut w).unwrap();
    let a2 = parse_poly("1+x1*x2*x3*x4*x5+x1*x2*x3*x5", &mut w).unwrap();
    let got = independence_rule(&a1, &a2, var(&w, "x2"));
    if got != parse_poly("1+x1*x3*x4*x5+x1*x3*x5", &mut w).unwrap() {
        failures.push(format!("rule application gave {}", got.to_text(&w)));
    } else {
        notes.push("rule application");
    }

    // sensitivity verdicts on the rule base
    let mut v = Vars::new();
    let k = load("rules.fml", &mut v);
    let rules =
        parse_formula_lines(&std::fs::read_to_string(data("rules.fml")).unwrap(), &mut v).unwrap();
    let r1 = parse_formula("p1 -> p9", &mut v).unwrap();
    let r5 = parse_formula("p1 & p7 -> p11", &mut v).unwrap();
    let p1 = var(&v, "p1");
    let not_p2 = parse_formula("~p2", &mut v).unwrap();
    let r1_sensitive =
        is_sensitive(&k.with(project_pi(&not_p2)), &r1, p1, Limits::default()).unwrap();
    let mut with_fact = rules.clone();
    with_fact.push(not_p2.clone());
    let flipped = r1.substitute(p1, &Formula::not(Formula::var(p1)));
    let oracle_r1 = !oracle_entails(&with_fact, &Formula::iff(flipped, r1.clone())).unwrap();
    if r1_sensitive {
        notes.push("R1 sensitive");
    } else {
        failures.push(format!(
            "R1 claimed sensitive in p1 w.r.t. K ∪ {{~p2}}, computed not sensitive (oracle on the definition: {}). \
             R3 (~p2 -> p9) makes K ∪ {{~p2}} entail p9, so R1 holds whichever value p1 takes and its derivative \
             ~p9 is inconsistent with K ∪ {{~p2}}; the retraction onto {{p9}} is {{p9}}, which shows \
             K ∪ {{~p2}} ⊭ ~p9 but not the consistency of ~p9 that sensitivity needs",
            if oracle_r1 { "sensitive" } else { "not sensitive" }
        ));
    }
    let r5_sensitive = is_sensitive(
        &k.with(project_pi(&parse_formula("p4", &mut v).unwrap())),
        &r5,
        p1,
        Limits::default(),
    )
    .unwrap();
    if r5_sensitive {
        failures.push("R5 computed sensitive in p1 w.r.t. K ∪ {p4}".into());
    } else {
        notes.push("R5 not sensitive");
    }

    // dangerous facts
    let ps: Vec<VarId> = (1..=6).map(|i| var(&v, &format!("p{i}"))).collect();
    let facts: Vec<Literal> = ps
        .iter()
        .flat_map(|&x| [Literal::pos(x), Literal::neg(x)])
        .collect();
    let state = [Literal::pos(ps[0]), Literal::neg(ps[1])];
    let report = dangerous_literals(&k, &facts, &state, var(&v, "p11"), Limits::default()).unwrap();
    let safe_ok = [ps[4], ps[5]]
        .iter()
        .all(|&x| report.safe.contains(&Literal::pos(x)));
    if report.dangerous != [Literal::pos(ps[2]), Literal::pos(ps[3])] || !safe_ok {
        failures.push(format!(
            "dangerous set {:?}",
            report
                .dangerous
                .iter()
                .map(|l| l.to_text(&v))
                .collect::<Vec<_>>()
        ));
    } else {
        notes.push("dangerous = {p3, p4}, p5 and p6 safe");
    }

    // espresso retractions
    let mut e = Vars::new();
    let a = load("espresso.fml", &mut e);
    let parts = [
        "ok_pump & on_pump -> water\nman_fill -> water\nman_fill -> ~on_pump\n~man_fill -> on_pump",
        "steam -> ok_boiler\nsteam -> on_boiler\nsteam -> water\nok_boiler & on_boiler & water -> steam",
        "coffee & steam -> hot_drink\ncoffee | teabag\nsteam & teabag -> hot_drink",
    ];
    for (i, text) in parts.iter().enumerate() {
        let expected = parse_formula_lines(text, &mut e).unwrap();
        let lang: BTreeSet<VarId> = expected.iter().flat_map(Formula::vars).collect();
        let names: Vec<VarId> = lang.iter().copied().collect();
        let j = retract_onto(&a, &lang, Limits::default()).unwrap();
        if models_of(&j.to_vec(), &names).unwrap() != models_of(&expected, &names).unwrap() {
            failures.push(format!("espresso part {} not equivalent", i + 1));
        }
    }
    if !failures.iter().any(|f| f.starts_with("espresso")) {
        notes.push("espresso parts 1-3 equivalent");
    }

    if failures.is_empty() {
        Ok(notes.join(", "))
    } else {
        Err(format!(
            "{} | passing sub-checks: {}",
            failures.join("; "),
            notes.join(", ")
        ))
    }
}

fn criterion_4() -> Verdict {
    let names = var_ids(6);
    property(500, (formula(6, 3), formula(6, 3), 0..6u32), |(f, g, p)| {
        let p = VarId(p);
        let derived = independence_rule(&project_pi(&f), &project_pi(&g), p);
        prop_assert!(!derived.contains_var(p));
        let rest: BTreeSet<VarId> = names.iter().copied().filter(|&x| x != p).collect();
        let rest_names: Vec<VarId> = rest.iter().copied().collect();
        let both = models_of(&vec![f, g], &names).unwrap();
        prop_assert_eq!(
            models_of(&derived, &rest_names).unwrap(),
            project_models(&both, &rest).unwrap()
        );
        Ok(())
    })?;
    Ok("500 formula pairs, zero failures".into())
}

fn canonical_retraction(cnf: &[Formula], keep: &BTreeSet<VarId>) -> FormulaKB {
    let mut cur = FormulaKB::from_formulas_merging(cnf.iter().cloned());
    let order: Vec<VarId> = canonical_order(&cur)
        .into_iter()
        .filter(|v| !keep.contains(v))
        .collect();
    for v in order {
        cur = canonical_forget_step(&cur, v, Limits::default()).unwrap();
    }
    cur
}

fn criterion_5() -> Verdict {
    let strategy = (
        three_cnf(10, 40),
        prop::collection::btree_set(0..10u32, 1..5),
    );
    property(200, strategy, |(cnf, keep)| {
        let sat = oracle_satisfiable(&cnf).unwrap();
        let (outcome, _) = saturate(&PolyKB::from_formulas(&cnf), &[], Limits::default()).unwrap();
        prop_assert_eq!(outcome == Outcome::Consistent, sat, "independence verdict");
        let merged = FormulaKB::from_formulas_merging(cnf.iter().cloned());
        let canonical = canonical_saturate(&merged, &[], Limits::default()).unwrap();
        prop_assert_eq!(canonical == Outcome::Consistent, sat, "canonical verdict");

        let keep: BTreeSet<VarId> = keep.into_iter().map(VarId).collect();
        let names: Vec<VarId> = keep.iter().copied().collect();
        let j = retract_onto(&PolyKB::from_formulas(&cnf), &keep, Limits::default()).unwrap();
        let c = canonical_retraction(&cnf, &keep);
        prop_assert!(c.vars().is_subset(&keep));
        prop_assert_eq!(
            models_of(&j.to_vec(), &names).unwrap(),
            models_of(&c.to_vec(), &names).unwrap()
        );
        Ok(())
    })?;
    Ok(
        "200 random 3-CNF: both operators agree with the oracle; retractions have equal model sets"
            .into(),
    )
}

/// The rule before rewriting into the `b`/`c` form.
fn rule_unrewritten(a1: &Poly, a2: &Poly, v: VarId) -> Poly {
    let d1 = a1.derivative(v);
    let d2 = a2.derivative(v);
    let right = Poly::one()
        .add(&a1.mul(&d2))
        .add(&a2.mul(&d1))
        .add(&d1.mul(&d2));
    a1.mul(a2).complement().mul(&right).complement()
}

fn criterion_6() -> Verdict {
    let names = Vars::with_names((0..6).map(|i| format!("x{i}")));
    property(500, (poly(6), poly(6), 0..6u32), |(a1, a2, v)| {
        prop_assert_eq!(
            independence_rule(&a1, &a2, VarId(v)),
            rule_unrewritten(&a1, &a2, VarId(v))
        );
        Ok(())
    })?;
    property(500, poly(6), |a| {
        prop_assert_eq!(a.mul(&a), a);
        Ok(())
    })?;
    property(500, poly(6), |a| {
        prop_assert_eq!(project_pi(&to_formula_theta(&a, &names)), a);
        Ok(())
    })?;
    property(500, formula(6, 4), |f| {
        let back = to_formula_theta(&to_poly_p(&f).reduce(), &names);
        prop_assert!(oracle_equivalent(&[back], &[f]).unwrap());
        Ok(())
    })?;
    Ok("two forms, a·a = a, π(Θ(a)) = a, Θ(P(F)) ≡ F: 500 cases each".into())
}

fn bench_rows(path: &str, op: &str) -> Result<Vec<BenchRow>, String> {
    let (code, out) = run_cli(&["bench", path, "--op", op, "--steps", "20", "--seed", "7"]);
    ensure(code == 0, format!("bench exited {code}"))?;
    ensure(
        out.starts_with("step,variable,operator,kb_members,kb_size_symbols,elapsed_ms,status\n"),
        "missing CSV header",
    )?;
    read_bench_csv(out.as_bytes()).map_err(|e| e.to_string())
}

fn criterion_7() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("random.cnf");
    std::fs::write(&path, write_dimacs(&random_kcnf(20, 60, 3, 7))).map_err(|e| e.to_string())?;
    let path = path.to_str().unwrap();
    let rows = bench_rows(path, "both")?;
    let indep: Vec<&BenchRow> = rows
        .iter()
        .filter(|r| r.operator == "independence")
        .collect();
    let canon: Vec<&BenchRow> = rows.iter().filter(|r| r.operator == "canonical").collect();
    ensure(
        indep.len() + canon.len() == rows.len(),
        "unknown operator column",
    )?;
    let ok = indep.iter().filter(|r| r.status == "ok").count();
    ensure(ok >= 10, format!("only {ok} independence steps completed"))?;
    for (i, r) in indep.iter().enumerate() {
        ensure(r.step == i + 1, "independence steps out of sequence")?;
    }
    for (a, b) in indep.iter().zip(&canon) {
        ensure(
            a.variable == b.variable,
            "operators forgot different variables",
        )?;
    }
    let again = bench_rows(path, "independence")?;
    let strip = |r: &BenchRow| {
        (
            r.step,
            r.variable.clone(),
            r.kb_members,
            r.kb_size_symbols,
            r.status.clone(),
        )
    };
    ensure(
        again.iter().map(strip).collect::<Vec<_>>()
            == indep.iter().map(|r| strip(r)).collect::<Vec<_>>(),
        "independence rows differ between runs",
    )?;
    let peak = indep.iter().map(|r| r.kb_size_symbols).max().unwrap_or(0);
    let canon_ok = canon.iter().filter(|r| r.status == "ok").count();
    let canon_last = canon
        .iter()
        .rfind(|r| r.status == "ok")
        .map_or(0, |r| r.kb_size_symbols);
    Ok(format!(
        "{ok} independence steps (peak {peak} symbols); canonical {canon_ok} steps, last size {canon_last}"
    ))
}

fn main() {
    let criteria: [Criterion; 7] = [
        (
            "five-variable retraction trace",
            Some(Duration::from_secs(1)),
            criterion_1,
        ),
        (
            "refutation trace",
            Some(Duration::from_secs(1)),
            criterion_2,
        ),
        ("rule-base and espresso results", Some(Duration::from_secs(5)), criterion_3),
        ("projection of models", None, criterion_4),
        ("completeness", Some(Duration::from_secs(120)), criterion_5),
        ("algebra", None, criterion_6),
        ("bench harness", None, criterion_7),
    ];
    let mut failed = 0;
    for (i, (title, bound, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let elapsed = start.elapsed();
        let result = match (result, bound) {
            (Ok(_), Some(b)) if elapsed > *b => Err(format!("took {elapsed:.2?}, bound {b:?}")),
            (r, _) => r,
        };
        let time = match bound {
            Some(b) => format!("{elapsed:.2?} < {b:?}"),
            None => format!("{elapsed:.2?}"),
        };
        match result {
            Ok(detail) => println!("PASS criterion {}: {title} [{time}] {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {title} [{time}] {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
