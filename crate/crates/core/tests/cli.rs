use std::path::PathBuf;
use std::process::{Command, Output};

use boolforget::io::read_bench_csv;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boolforget"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn check_sat_exit_codes() {
    let sat = run(&["check-sat", &data("five_vars.fml")]);
    assert_eq!(sat.status.code(), Some(10));
    assert_eq!(stdout(&sat).trim(), "SAT");
    let unsat = run(&["check-sat", &data("refutation.fml"), "--trace"]);
    assert_eq!(unsat.status.code(), Some(20));
    assert_eq!(stdout(&unsat).trim(), "UNSAT");
    assert!(String::from_utf8_lossy(&unsat.stderr).contains("step 1 forget"));
    assert_eq!(
        run(&["check-sat", &data("empty.fml")]).status.code(),
        Some(10)
    );
    let ordered = run(&["check-sat", &data("refutation.fml"), "--order", "q,p"]);
    assert_eq!(ordered.status.code(), Some(20));
}

#[test]
fn check_sat_dimacs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.cnf");
    std::fs::write(&path, "c tiny\np cnf 2 3\n1 2 0\n-1 0\n-2 0\n").unwrap();
    assert_eq!(
        run(&["check-sat", path.to_str().unwrap()]).status.code(),
        Some(20)
    );
    std::fs::write(&path, "p cnf 2 2\n1 2 0\n-1 0\n").unwrap();
    assert_eq!(
        run(&["check-sat", path.to_str().unwrap()]).status.code(),
        Some(10)
    );
}

#[test]
fn errors_exit_one() {
    assert_eq!(
        run(&["check-sat", "/nonexistent/file.fml"]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(
        run(&["retract", &data("five_vars.fml"), "--forget", "zz"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&[
            "retract",
            &data("five_vars.fml"),
            "--forget",
            "r,t",
            "--order",
            "r"
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn retract_outputs() {
    let keep = run(&["retract", &data("five_vars.fml"), "--keep", "r,s"]);
    assert_eq!(keep.status.code(), Some(0));
    assert_eq!(stdout(&keep).trim(), "1");
    let formula = run(&[
        "retract",
        &data("five_vars.fml"),
        "--keep",
        "r,s",
        "--emit",
        "formula",
    ]);
    assert_eq!(stdout(&formula).trim(), "T");

    let literal = run(&[
        "retract",
        &data("five_vars.fml"),
        "--forget",
        "r",
        "--all-pairs",
    ]);
    assert_eq!(stdout(&literal).lines().count(), 3);
    let refined = run(&["retract", &data("five_vars.fml"), "--forget", "r"]);
    let lines: Vec<String> = stdout(&refined).lines().map(str::to_owned).collect();
    assert_eq!(lines.len(), 2);

    let canonical = run(&[
        "retract",
        &data("five_vars.fml"),
        "--keep",
        "p,s",
        "--op",
        "canonical",
    ]);
    assert_eq!(canonical.status.code(), Some(0));
    assert_eq!(stdout(&canonical).trim(), "p*s+s+1");
}

#[test]
fn entails_exit_codes() {
    let kb = data("five_vars.fml");
    let holds = run(&["entails", &kb, "--goal", "p & q & t -> s"]);
    assert_eq!(holds.status.code(), Some(0));
    assert_eq!(stdout(&holds).trim(), "holds");
    let local = run(&["entails", &kb, "--goal", "s -> r", "--localize"]);
    assert_eq!(local.status.code(), Some(3));
    let text = stdout(&local);
    assert!(text.starts_with("does not hold\n# retraction onto {"));
    let assumed = run(&["entails", &kb, "--goal", "s", "--assume", "t & p"]);
    assert_eq!(assumed.status.code(), Some(0));
}

#[test]
fn sensitivity() {
    let rules = data("rules.fml");
    let out = run(&[
        "sensitive",
        &rules,
        "--formula",
        "p1 -> p9",
        "--var",
        "p1",
        "--assume",
        "~p2",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stdout(&out).trim(), "not sensitive");
    let out = run(&["sensitive", &rules, "--formula", "p1 -> p9", "--var", "p1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "sensitive");
    let out = run(&[
        "sensitive",
        &rules,
        "--formula",
        "p1 & p7 -> p11",
        "--var",
        "p1",
        "--assume",
        "p4",
    ]);
    assert_eq!(stdout(&out).trim(), "not sensitive");
}

#[test]
fn dangerous_report() {
    let out = run(&[
        "dangerous",
        &data("rules.fml"),
        "--facts",
        "p1,~p1,p2,~p2,p3,~p3,p4,~p4,p5,~p5,p6,~p6",
        "--state",
        "p1,~p2",
        "--warning",
        "p11",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("dangerous: p3, p4"));
    assert_eq!(lines.next(), Some("vacuous: ~p1, p2"));
    assert!(lines.next().unwrap().starts_with("safe: "));

    let none = run(&[
        "dangerous",
        &data("rules.fml"),
        "--facts",
        "p5,p6",
        "--state",
        "p1,~p2",
        "--warning",
        "p11",
    ]);
    assert_eq!(none.status.code(), Some(3));
    assert!(stdout(&none).starts_with("dangerous: \n"));
}

#[test]
fn bench_rows_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("g.cnf");
    let gen = run(&[
        "gen-cnf",
        "--vars",
        "20",
        "--clauses",
        "60",
        "--seed",
        "7",
        "--out",
        cnf.to_str().unwrap(),
    ]);
    assert_eq!(gen.status.code(), Some(0));
    let csv = dir.path().join("b.csv");
    let bench = run(&[
        "bench",
        cnf.to_str().unwrap(),
        "--steps",
        "3",
        "--seed",
        "7",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(bench.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(
        text.starts_with("step,variable,operator,kb_members,kb_size_symbols,elapsed_ms,status\n")
    );
    let rows = read_bench_csv(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 6);
    let (indep, canon) = rows.split_at(3);
    for (a, b) in indep.iter().zip(canon) {
        assert_eq!(a.operator, "independence");
        assert_eq!(b.operator, "canonical");
        assert_eq!((a.step, &a.variable), (b.step, &b.variable));
        assert_eq!(a.status, "ok");
    }

    let header_only = run(&["bench", cnf.to_str().unwrap(), "--steps", "0"]);
    assert_eq!(stdout(&header_only).lines().count(), 1);
    assert_eq!(
        run(&["bench", cnf.to_str().unwrap(), "--steps", "21"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn gen_cnf_is_deterministic() {
    let a = run(&["gen-cnf", "--vars", "10", "--clauses", "5", "--seed", "3"]);
    let b = run(&["gen-cnf", "--vars", "10", "--clauses", "5", "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("p cnf 10 5\n"));
    assert_eq!(
        run(&["gen-cnf", "--vars", "2", "--clauses", "1"])
            .status
            .code(),
        Some(1)
    );
}
